#include "expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <utility>

#include "fearbif/error.hpp"

namespace fearbif::app {

namespace {

struct Node {
  virtual ~Node() = default;
  [[nodiscard]] virtual double eval(double x, double t) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct Constant final : Node {
  double value;
  explicit Constant(double v) : value(v) {}
  double eval(double, double) const override { return value; }
};

struct Variable final : Node {
  bool is_x;
  explicit Variable(bool x) : is_x(x) {}
  double eval(double x, double t) const override { return is_x ? x : t; }
};

struct Negate final : Node {
  NodePtr arg;
  explicit Negate(NodePtr a) : arg(std::move(a)) {}
  double eval(double x, double t) const override { return -arg->eval(x, t); }
};

struct Cosine final : Node {
  NodePtr arg;
  explicit Cosine(NodePtr a) : arg(std::move(a)) {}
  double eval(double x, double t) const override { return std::cos(arg->eval(x, t)); }
};

struct Binary final : Node {
  char op;
  NodePtr lhs, rhs;
  Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
  double eval(double x, double t) const override {
    const double a = lhs->eval(x, t);
    const double b = rhs->eval(x, t);
    switch (op) {
      case '+': return a + b;
      case '-': return a - b;
      case '*': return a * b;
      default: return a / b;
    }
  }
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("history expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = std::make_shared<Binary>('+', lhs, term());
      } else if (accept('-')) {
        lhs = std::make_shared<Binary>('-', lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = std::make_shared<Binary>('*', lhs, factor());
      } else if (accept('/')) {
        lhs = std::make_shared<Binary>('/', lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    if (accept('-')) return std::make_shared<Negate>(factor());
    if (accept('+')) return factor();
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (s_.compare(pos_, 3, "cos") == 0) {
      pos_ += 3;
      if (!accept('(')) fail("expected '(' after cos");
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return std::make_shared<Cosine>(arg);
    }
    if (c == 'x' || c == 't') {
      ++pos_;
      return std::make_shared<Variable>(c == 'x');
    }
    fail(std::string("unknown token '") + c + "'");
  }

  NodePtr number() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto res = std::from_chars(first, s_.data() + s_.size(), v, std::chars_format::general);
    if (res.ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return std::make_shared<Constant>(v);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

HistoryFn parse_history(const std::string& text) {
  NodePtr root = Parser(text).parse();
  return [root](double x, double t) { return root->eval(x, t); };
}

}  // namespace fearbif::app
