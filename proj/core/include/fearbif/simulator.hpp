#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fearbif/model.hpp"

namespace fearbif {

/// Time discretization of the method of lines.
///  - imex1: backward Euler diffusion, forward Euler reaction.
///  - imex2: Crank-Nicolson diffusion, second-order Adams-Bashforth reaction.
///  - explicit_euler: everything explicit; subject to the diffusive CFL limit.
enum class Scheme { imex1, imex2, explicit_euler };

[[nodiscard]] const char* to_string(Scheme s);
[[nodiscard]] Scheme parse_scheme(const std::string& name);

/// Uniform grid x_j = j l pi / (M - 1) with time step dt and horizon T.
/// Zero dt or T request the defaults: dt = min(0.01, tau / 200) and
/// T = 60 periods of the mode-0 Hopf frequency.
struct Grid {
  int M = 128;
  double dt = 0.0;
  double T = 0.0;
  Scheme scheme = Scheme::imex2;

  [[nodiscard]] double spacing(double l) const;
  [[nodiscard]] std::vector<double> nodes(double l) const;
  /// Largest stable dt for explicit diffusion.
  [[nodiscard]] double cfl_limit(const ModelParams& params) const;
};

/// Grid with defaults filled in; throws ValidationError for M < 16 or
/// non-positive values.
[[nodiscard]] Grid resolve_grid(const ModelParams& params, Grid grid);

/// Default horizon 60 * 2 pi / omega, omega the larger mode-0 crossing
/// frequency at these parameters (or 0.1 when no crossing exists).
[[nodiscard]] double default_horizon(const ModelParams& params);

/// Ring of past prey profiles at spacing dt covering [t - tau - dt, t].
/// Off-grid lags are linearly interpolated.
class HistoryBuffer {
 public:
  HistoryBuffer(double tau, double dt, int M);

  /// Slot that becomes the newest state on the next call to commit().
  Eigen::VectorXd& next_slot();
  void commit();

  [[nodiscard]] const Eigen::VectorXd& newest() const;
  /// State k steps in the past, 0 <= k < capacity().
  [[nodiscard]] const Eigen::VectorXd& back(std::size_t k) const;
  /// Profile at t - tau.
  void delayed(Eigen::VectorXd& out) const;

  [[nodiscard]] std::size_t capacity() const { return ring_.size(); }
  [[nodiscard]] double covered_time() const { return dt_ * static_cast<double>(ring_.size() - 1); }

 private:
  std::vector<Eigen::VectorXd> ring_;
  std::size_t head_ = 0;  // index of the newest state
  std::size_t lag_steps_ = 0;
  double lag_frac_ = 0.0;
  double dt_;
};

/// Initial history phi(x, t) for t in [-tau, 0].
using HistoryFn = std::function<double(double x, double t)>;

/// Complete integrator state at one time level, sufficient to resume.
struct Checkpoint {
  double t = 0.0;
  long step = 0;
  std::vector<Eigen::VectorXd> u_history;  ///< oldest first, newest last
  Eigen::VectorXd v;
  Eigen::VectorXd reaction_u_prev;  ///< reaction terms one step back (imex2)
  Eigen::VectorXd reaction_v_prev;
};

struct SimulationOptions {
  Grid grid;
  int record_stride = 1;          ///< steps between x = 0 and mode samples
  int max_snapshots = 200;        ///< full profiles kept, evenly spaced in time
  double checkpoint_time = -1.0;  ///< negative: no checkpoint
};

/// Result of a run: boundary time series, mode amplitudes, profile
/// snapshots and the final state.
struct Field {
  ModelParams params;
  Grid grid;
  std::vector<double> x;

  std::vector<double> t;       ///< recorded times
  std::vector<double> u_left;  ///< u(0, t)
  std::vector<double> v_left;  ///< v(0, t)
  std::array<std::vector<double>, 4> modes;  ///< <u(., t), gamma_k>, k = 0..3

  std::vector<double> snapshot_t;
  std::vector<Eigen::VectorXd> snapshot_u;
  std::vector<Eigen::VectorXd> snapshot_v;

  Eigen::VectorXd u_final;
  Eigen::VectorXd v_final;
  Eigen::VectorXd u_delayed_final;  ///< u(., T - tau)

  double min_value = 0.0;  ///< smallest u or v seen
  std::vector<std::string> warnings;

  std::shared_ptr<const Checkpoint> checkpoint;
};

/// Integrates the delayed reaction-diffusion system with Neumann boundaries.
/// Throws NumericalError when any value exceeds 1e6 or turns non-finite.
[[nodiscard]] Field simulate(const ModelParams& params, const HistoryFn& u0, const HistoryFn& v0,
                             const SimulationOptions& options = {});

/// Continues from a checkpoint up to options.grid.T. The grid must match the
/// one that produced the checkpoint.
[[nodiscard]] Field resume(const ModelParams& params, const Checkpoint& from,
                           const SimulationOptions& options);

/// Copy of a checkpoint with (du, dv) added uniformly to the stored history
/// and current state.
[[nodiscard]] Checkpoint perturbed(const Checkpoint& cp, double du, double dv);

/// Trapezoid inner product of a profile with gamma_k.
[[nodiscard]] double mode_projection(const Eigen::VectorXd& profile, int k, double l);
struct ModeSeries {
  std::vector<double> t;
  std::vector<double> amplitude;
};
/// Mode-k amplitude over time: the recorded series for k <= 3, snapshots
/// otherwise.
[[nodiscard]] ModeSeries mode_projection(const Field& field, int k);

/// Max-norm of the discrete right-hand side at the final time.
[[nodiscard]] double steady_residual(const Field& field);

/// Largest second-order one-sided boundary derivative of the final profiles,
/// relative to max(1, field scale).
[[nodiscard]] double neumann_residual(const Field& field);

}  // namespace fearbif
