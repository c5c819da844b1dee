#include "fearbif/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "fearbif/error.hpp"
#include "fearbif/linear_stability.hpp"
#include "fearbif/spatial.hpp"

namespace fearbif {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::imex1: return "imex1";
    case Scheme::imex2: return "imex2";
    case Scheme::explicit_euler: return "explicit";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "imex1") return Scheme::imex1;
  if (name == "imex2") return Scheme::imex2;
  if (name == "explicit") return Scheme::explicit_euler;
  throw ValidationError("unknown scheme '" + name + "' (expected imex1, imex2 or explicit)");
}

double Grid::spacing(double l) const { return l * std::numbers::pi / (M - 1); }

std::vector<double> Grid::nodes(double l) const {
  std::vector<double> x(static_cast<std::size_t>(M));
  const double h = spacing(l);
  for (int j = 0; j < M; ++j) x[j] = j * h;
  return x;
}

double Grid::cfl_limit(const ModelParams& params) const {
  const double h = spacing(params.l);
  const double dmax = std::max(params.d1, params.d2);
  return dmax > 0.0 ? h * h / (2.0 * dmax) : std::numeric_limits<double>::infinity();
}

double default_horizon(const ModelParams& params) {
  double omega = 0.1;
  try {
    const ModeData md = mode_data(params, 0);
    if (md.omega_plus) omega = *md.omega_plus;
  } catch (const ValidationError&) {
  }
  return 60.0 * 2.0 * std::numbers::pi / omega;
}

Grid resolve_grid(const ModelParams& params, Grid grid) {
  if (grid.M < 16) throw ValidationError("grid needs M >= 16");
  if (grid.dt < 0.0 || grid.T < 0.0) throw ValidationError("grid dt and T must be positive");
  if (grid.dt == 0.0) grid.dt = params.tau > 0.0 ? std::min(0.01, params.tau / 200.0) : 0.01;
  if (grid.T == 0.0) grid.T = default_horizon(params);
  if (!(grid.T >= grid.dt)) throw ValidationError("grid horizon shorter than one step");
  return grid;
}

// ---------------------------------------------------------------------------

HistoryBuffer::HistoryBuffer(double tau, double dt, int M) : dt_(dt) {
  if (!(dt > 0.0) || tau < 0.0) throw ValidationError("history buffer needs dt > 0 and tau >= 0");
  const double steps = tau / dt;
  lag_steps_ = static_cast<std::size_t>(std::floor(steps));
  lag_frac_ = steps - static_cast<double>(lag_steps_);
  if (lag_frac_ < 1e-12) lag_frac_ = 0.0;
  ring_.assign(lag_steps_ + 2, Eigen::VectorXd::Zero(M));
}

Eigen::VectorXd& HistoryBuffer::next_slot() { return ring_[(head_ + 1) % ring_.size()]; }

void HistoryBuffer::commit() { head_ = (head_ + 1) % ring_.size(); }

const Eigen::VectorXd& HistoryBuffer::newest() const { return ring_[head_]; }

const Eigen::VectorXd& HistoryBuffer::back(std::size_t k) const {
  return ring_[(head_ + ring_.size() - k) % ring_.size()];
}

void HistoryBuffer::delayed(Eigen::VectorXd& out) const {
  if (lag_frac_ == 0.0) {
    out = back(lag_steps_);
  } else {
    out = (1.0 - lag_frac_) * back(lag_steps_) + lag_frac_ * back(lag_steps_ + 1);
  }
}

// ---------------------------------------------------------------------------

namespace {

// Neumann Laplacian with ghost nodes on a uniform grid.
void laplacian(const Eigen::VectorXd& u, double inv_h2, Eigen::VectorXd& out) {
  const Eigen::Index M = u.size();
  out.resize(M);
  out(0) = 2.0 * (u(1) - u(0)) * inv_h2;
  for (Eigen::Index j = 1; j + 1 < M; ++j) out(j) = (u(j - 1) - 2.0 * u(j) + u(j + 1)) * inv_h2;
  out(M - 1) = 2.0 * (u(M - 2) - u(M - 1)) * inv_h2;
}

// LU factors of I - s L for the ghost-node Laplacian L, reused every step.
class TridiagonalSolver {
 public:
  TridiagonalSolver(int M, double s) : lower_(M), upper_(M), inv_pivot_(M) {
    const double diag = 1.0 + 2.0 * s;
    for (int j = 0; j < M; ++j) {
      lower_[j] = j == M - 1 ? -2.0 * s : -s;
      upper_[j] = j == 0 ? -2.0 * s : -s;
    }
    double prev_upper = 0.0;
    for (int j = 0; j < M; ++j) {
      const double pivot = diag - (j > 0 ? lower_[j] * prev_upper : 0.0);
      inv_pivot_[j] = 1.0 / pivot;
      prev_upper = upper_[j] * inv_pivot_[j];
      upper_[j] = prev_upper;
    }
  }

  void solve(Eigen::VectorXd& rhs) const {
    const Eigen::Index M = rhs.size();
    rhs(0) *= inv_pivot_[0];
    for (Eigen::Index j = 1; j < M; ++j) rhs(j) = (rhs(j) - lower_[j] * rhs(j - 1)) * inv_pivot_[j];
    for (Eigen::Index j = M - 2; j >= 0; --j) rhs(j) -= upper_[j] * rhs(j + 1);
  }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;  // normalized by the pivot after factorization
  std::vector<double> inv_pivot_;
};

struct Weights {
  std::array<Eigen::VectorXd, 4> mode;  // trapezoid weight times gamma_k at the nodes
};

Weights mode_weights(const Grid& grid, double l) {
  Weights w;
  const auto x = grid.nodes(l);
  const double h = grid.spacing(l);
  for (int k = 0; k < 4; ++k) {
    w.mode[k].resize(grid.M);
    for (int j = 0; j < grid.M; ++j) {
      const double trap = (j == 0 || j == grid.M - 1) ? 0.5 * h : h;
      w.mode[k](j) = trap * neumann_mode(k, l, x[j]);
    }
  }
  return w;
}

class Integrator {
 public:
  Integrator(const ModelParams& params, const Grid& grid)
      : p_(params),
        grid_(grid),
        M_(grid.M),
        inv_h2_(1.0 / (grid.spacing(params.l) * grid.spacing(params.l))),
        hist_(params.tau, grid.dt, grid.M),
        weights_(mode_weights(grid, params.l)) {
    const double theta = grid.scheme == Scheme::imex2 ? 0.5 : 1.0;
    const double s = theta * grid.dt * inv_h2_;
    solver_u_.emplace(M_, s * p_.d1);
    solver_v_.emplace(M_, s * p_.d2);
    for (auto* vec : {&v_, &ud_, &ru_, &rv_, &ru_prev_, &rv_prev_, &lap_}) vec->setZero(M_);
  }

  void start(const HistoryFn& u0, const HistoryFn& v0) {
    const auto x = grid_.nodes(p_.l);
    const double dt = grid_.dt;
    const std::size_t cap = hist_.capacity();
    // Fill the ring from the oldest level to the newest (t = 0).
    for (std::size_t i = 0; i < cap; ++i) {
      const double t = std::max(-p_.tau, -static_cast<double>(cap - 1 - i) * dt);
      Eigen::VectorXd& slot = hist_.next_slot();
      for (int j = 0; j < M_; ++j) slot(j) = u0(x[j], t);
      hist_.commit();
    }
    for (int j = 0; j < M_; ++j) v_(j) = v0(x[j], 0.0);

    // Reaction one step back, needed by the two-step scheme.
    const double tm = std::max(-p_.tau, -dt);
    const double tmd = std::max(-p_.tau, -dt - p_.tau);
    Eigen::VectorXd um(M_), vm(M_), udm(M_);
    for (int j = 0; j < M_; ++j) {
      um(j) = u0(x[j], tm);
      vm(j) = v0(x[j], tm);
      udm(j) = u0(x[j], tmd);
    }
    reaction(um, vm, udm, ru_prev_, rv_prev_);
    t_ = 0.0;
    step_ = 0;
    check(hist_.newest(), v_);
  }

  void restore(const Checkpoint& cp) {
    if (cp.u_history.size() != hist_.capacity() || cp.v.size() != M_) {
      throw ValidationError("checkpoint does not match the grid");
    }
    for (const Eigen::VectorXd& u : cp.u_history) {
      hist_.next_slot() = u;
      hist_.commit();
    }
    v_ = cp.v;
    ru_prev_ = cp.reaction_u_prev;
    rv_prev_ = cp.reaction_v_prev;
    t_ = cp.t;
    step_ = cp.step;
  }

  [[nodiscard]] Checkpoint checkpoint() const {
    Checkpoint cp;
    cp.t = t_;
    cp.step = step_;
    const std::size_t cap = hist_.capacity();
    cp.u_history.reserve(cap);
    for (std::size_t i = 0; i < cap; ++i) cp.u_history.push_back(hist_.back(cap - 1 - i));
    cp.v = v_;
    cp.reaction_u_prev = ru_prev_;
    cp.reaction_v_prev = rv_prev_;
    return cp;
  }

  void advance() {
    const double dt = grid_.dt;
    const Eigen::VectorXd& u = hist_.newest();
    hist_.delayed(ud_);
    reaction(u, v_, ud_, ru_, rv_);

    Eigen::VectorXd& un = hist_.next_slot();
    switch (grid_.scheme) {
      case Scheme::imex2: {
        laplacian(u, inv_h2_, lap_);
        un = u + (0.5 * dt * p_.d1) * lap_ + dt * (1.5 * ru_ - 0.5 * ru_prev_);
        laplacian(v_, inv_h2_, lap_);
        v_ += (0.5 * dt * p_.d2) * lap_ + dt * (1.5 * rv_ - 0.5 * rv_prev_);
        solver_u_->solve(un);
        solver_v_->solve(v_);
        break;
      }
      case Scheme::imex1: {
        un = u + dt * ru_;
        v_ += dt * rv_;
        solver_u_->solve(un);
        solver_v_->solve(v_);
        break;
      }
      case Scheme::explicit_euler: {
        laplacian(u, inv_h2_, lap_);
        un = u + dt * (p_.d1 * lap_ + ru_);
        laplacian(v_, inv_h2_, lap_);
        v_ += dt * (p_.d2 * lap_ + rv_);
        break;
      }
    }
    hist_.commit();
    std::swap(ru_, ru_prev_);
    std::swap(rv_, rv_prev_);
    ++step_;
    t_ = static_cast<double>(step_) * dt;
    check(hist_.newest(), v_);
  }

  void record(Field& f) const {
    const Eigen::VectorXd& u = hist_.newest();
    f.t.push_back(t_);
    f.u_left.push_back(u(0));
    f.v_left.push_back(v_(0));
    for (int k = 0; k < 4; ++k) f.modes[k].push_back(weights_.mode[k].dot(u));
  }

  void snapshot(Field& f) const {
    f.snapshot_t.push_back(t_);
    f.snapshot_u.push_back(hist_.newest());
    f.snapshot_v.push_back(v_);
  }

  void finish(Field& f) {
    f.u_final = hist_.newest();
    f.v_final = v_;
    hist_.delayed(ud_);
    f.u_delayed_final = ud_;
    f.min_value = min_value_;
  }

  [[nodiscard]] long step() const { return step_; }

 private:
  void reaction(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& ud,
                Eigen::VectorXd& ru, Eigen::VectorXd& rv) const {
    ru = (u.array() * (p_.r0 / (1.0 + p_.K * v.array()) - p_.d - p_.a * ud.array() - p_.p * v.array())).matrix();
    rv = (v.array() * (-p_.r2 + p_.c * u.array() - p_.m * v.array())).matrix();
  }

  void check(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const double lo = std::min(u.minCoeff(), v.minCoeff());
    const double hi = std::max(u.maxCoeff(), v.maxCoeff());
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi > 1e6 || lo < -1e6) {
      throw NumericalError("simulation blew up at t = " + std::to_string(t_));
    }
    min_value_ = std::min(min_value_, lo);
  }

  ModelParams p_;
  Grid grid_;
  int M_;
  double inv_h2_;
  HistoryBuffer hist_;
  Weights weights_;
  std::optional<TridiagonalSolver> solver_u_;
  std::optional<TridiagonalSolver> solver_v_;
  Eigen::VectorXd v_, ud_, ru_, rv_, ru_prev_, rv_prev_, lap_;
  double t_ = 0.0;
  long step_ = 0;
  double min_value_ = std::numeric_limits<double>::infinity();
};

Field run(const ModelParams& params, const SimulationOptions& options, Integrator& integ, Grid grid) {
  Field f;
  f.params = params;
  f.grid = grid;
  f.x = grid.nodes(params.l);
  if (grid.scheme == Scheme::explicit_euler && grid.dt > grid.cfl_limit(params)) {
    f.warnings.push_back("explicit step dt = " + std::to_string(grid.dt) + " exceeds the CFL limit " +
                         std::to_string(grid.cfl_limit(params)));
  }
  const long n_end = std::lround(grid.T / grid.dt);
  const long n_start = integ.step();
  const long stride = std::max(1, options.record_stride);
  const long span = std::max(1L, n_end - n_start);
  const long snap_stride =
      options.max_snapshots > 1 ? std::max(1L, (span + options.max_snapshots - 2) / (options.max_snapshots - 1)) : span;
  const long n_checkpoint = options.checkpoint_time >= 0.0 ? std::lround(options.checkpoint_time / grid.dt) : -1;

  const auto reserve = static_cast<std::size_t>(span / stride + 2);
  f.t.reserve(reserve);
  f.u_left.reserve(reserve);
  f.v_left.reserve(reserve);
  for (auto& m : f.modes) m.reserve(reserve);

  auto on_level = [&] {
    const long rel = integ.step() - n_start;
    if (rel % stride == 0 || integ.step() == n_end) integ.record(f);
    if (options.max_snapshots > 0 && (rel % snap_stride == 0 || integ.step() == n_end)) integ.snapshot(f);
    if (integ.step() == n_checkpoint) f.checkpoint = std::make_shared<const Checkpoint>(integ.checkpoint());
  };
  on_level();
  while (integ.step() < n_end) {
    integ.advance();
    on_level();
  }
  integ.finish(f);
  if (f.min_value < -1e-8) {
    f.warnings.push_back("negative values reached " + std::to_string(f.min_value));
  }
  return f;
}

}  // namespace

Field simulate(const ModelParams& params, const HistoryFn& u0, const HistoryFn& v0,
               const SimulationOptions& options) {
  params.validate();
  if (!u0 || !v0) throw ValidationError("simulate: missing initial history");
  const Grid grid = resolve_grid(params, options.grid);
  Integrator integ(params, grid);
  integ.start(u0, v0);
  return run(params, options, integ, grid);
}

Field resume(const ModelParams& params, const Checkpoint& from, const SimulationOptions& options) {
  params.validate();
  const Grid grid = resolve_grid(params, options.grid);
  Integrator integ(params, grid);
  integ.restore(from);
  return run(params, options, integ, grid);
}

Checkpoint perturbed(const Checkpoint& cp, double du, double dv) {
  Checkpoint out = cp;
  for (Eigen::VectorXd& u : out.u_history) u.array() += du;
  out.v.array() += dv;
  return out;
}

double mode_projection(const Eigen::VectorXd& profile, int k, double l) {
  const Eigen::Index M = profile.size();
  if (M < 2) throw ValidationError("mode_projection needs at least two nodes");
  const double h = l * std::numbers::pi / static_cast<double>(M - 1);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < M; ++j) {
    const double trap = (j == 0 || j == M - 1) ? 0.5 * h : h;
    sum += trap * profile(j) * neumann_mode(k, l, static_cast<double>(j) * h);
  }
  return sum;
}

ModeSeries mode_projection(const Field& field, int k) {
  if (k < 0) throw ValidationError("mode index must be nonnegative");
  ModeSeries s;
  if (k < 4) {
    s.t = field.t;
    s.amplitude = field.modes[k];
    return s;
  }
  s.t = field.snapshot_t;
  for (const Eigen::VectorXd& u : field.snapshot_u) s.amplitude.push_back(mode_projection(u, k, field.params.l));
  return s;
}

double steady_residual(const Field& field) {
  const ModelParams& p = field.params;
  const Eigen::VectorXd& u = field.u_final;
  const Eigen::VectorXd& v = field.v_final;
  const Eigen::VectorXd& ud = field.u_delayed_final;
  const double h = field.grid.spacing(p.l);
  Eigen::VectorXd lu, lv;
  laplacian(u, 1.0 / (h * h), lu);
  laplacian(v, 1.0 / (h * h), lv);
  const Eigen::ArrayXd fu =
      p.d1 * lu.array() + u.array() * (p.r0 / (1.0 + p.K * v.array()) - p.d - p.a * ud.array() - p.p * v.array());
  const Eigen::ArrayXd fv = p.d2 * lv.array() + v.array() * (-p.r2 + p.c * u.array() - p.m * v.array());
  return std::max(fu.abs().maxCoeff(), fv.abs().maxCoeff());
}

double neumann_residual(const Field& field) {
  const double h = field.grid.spacing(field.params.l);
  double worst = 0.0;
  double scale = 1.0;
  for (const Eigen::VectorXd* w : {&field.u_final, &field.v_final}) {
    const Eigen::VectorXd& z = *w;
    const Eigen::Index n = z.size();
    const double left = (-3.0 * z(0) + 4.0 * z(1) - z(2)) / (2.0 * h);
    const double right = (3.0 * z(n - 1) - 4.0 * z(n - 2) + z(n - 3)) / (2.0 * h);
    worst = std::max({worst, std::abs(left), std::abs(right)});
    scale = std::max(scale, z.cwiseAbs().maxCoeff());
  }
  return worst / scale;
}

}  // namespace fearbif
