#include "tipscan/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "tipscan/errors.hpp"

namespace tipscan {
namespace detail {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

class PathNode {
 public:
  virtual ~PathNode() = default;
  virtual double value(double t, Side side) const = 0;
  virtual double bound() const = 0;
  virtual double window() const = 0;
  virtual std::optional<double> limit(bool plus) const = 0;
  virtual void collect_breakpoints(double a, double b,
                                   std::vector<double>& out) const = 0;
};

class ConstantNode final : public PathNode {
 public:
  explicit ConstantNode(double v) : v_(v) {}
  double value(double, Side) const override { return v_; }
  double bound() const override { return std::abs(v_); }
  double window() const override { return 0.0; }
  std::optional<double> limit(bool) const override { return v_; }
  void collect_breakpoints(double, double, std::vector<double>&) const override {}

 private:
  double v_;
};

class ScaledArctanNode final : public PathNode {
 public:
  explicit ScaledArctanNode(double c) : c_(c) {}
  double value(double t, Side) const override {
    return (2.0 / kPi) * std::atan(c_ * t);
  }
  double bound() const override { return c_ == 0.0 ? 0.0 : 1.0; }
  double window() const override {
    // |(2/pi) atan(x) -+ 1| <= 1e-3 needs |x| >= cot(pi/2 * 1e-3) ~ 636.6.
    if (c_ == 0.0) return 0.0;
    return 637.0 / std::abs(c_);
  }
  std::optional<double> limit(bool plus) const override {
    if (c_ == 0.0) return 0.0;
    const double s = (c_ > 0.0) == plus ? 1.0 : -1.0;
    return s;
  }
  void collect_breakpoints(double, double, std::vector<double>&) const override {}

 private:
  double c_;
};

class SinusoidSumNode final : public PathNode {
 public:
  SinusoidSumNode(double offset, std::vector<SinusoidTerm> terms)
      : offset_(offset), terms_(std::move(terms)) {}
  double value(double t, Side) const override {
    double v = offset_;
    for (const auto& term : terms_)
      v += term.amplitude * std::sin(term.frequency * t + term.phase);
    return v;
  }
  double bound() const override {
    double b = std::abs(offset_);
    for (const auto& term : terms_) b += std::abs(term.amplitude);
    return b;
  }
  double window() const override { return 0.0; }
  std::optional<double> limit(bool) const override {
    for (const auto& term : terms_)
      if (term.amplitude != 0.0 && term.frequency != 0.0) return std::nullopt;
    double v = offset_;
    for (const auto& term : terms_)
      if (term.frequency == 0.0) v += term.amplitude * std::sin(term.phase);
    return v;
  }
  void collect_breakpoints(double, double, std::vector<double>&) const override {}

 private:
  double offset_;
  std::vector<SinusoidTerm> terms_;
};

class StepNode final : public PathNode {
 public:
  StepNode(std::vector<double> levels, std::vector<double> thresholds)
      : levels_(std::move(levels)), thresholds_(std::move(thresholds)) {}
  double value(double t, Side side) const override {
    // Index of the piece containing t; right-continuous at thresholds.
    std::size_t k = std::upper_bound(thresholds_.begin(), thresholds_.end(), t) -
                    thresholds_.begin();
    if (side == Side::Left && k > 0 && thresholds_[k - 1] == t) --k;
    return levels_[k];
  }
  double bound() const override {
    double b = 0.0;
    for (double v : levels_) b = std::max(b, std::abs(v));
    return b;
  }
  double window() const override {
    double w = 0.0;
    for (double thr : thresholds_) w = std::max(w, std::abs(thr));
    return w;
  }
  std::optional<double> limit(bool plus) const override {
    return plus ? levels_.back() : levels_.front();
  }
  void collect_breakpoints(double a, double b,
                           std::vector<double>& out) const override {
    for (double thr : thresholds_)
      if (thr >= a && thr <= b) out.push_back(thr);
  }

 private:
  std::vector<double> levels_;
  std::vector<double> thresholds_;
};

class SumNode final : public PathNode {
 public:
  explicit SumNode(std::vector<NodePtr> terms) : terms_(std::move(terms)) {}
  double value(double t, Side side) const override {
    double v = 0.0;
    for (const auto& term : terms_) v += term->value(t, side);
    return v;
  }
  double bound() const override {
    double b = 0.0;
    for (const auto& term : terms_) b += term->bound();
    return b;
  }
  double window() const override {
    double w = 0.0;
    for (const auto& term : terms_) w = std::max(w, term->window());
    return w;
  }
  std::optional<double> limit(bool plus) const override {
    double v = 0.0;
    for (const auto& term : terms_) {
      auto l = term->limit(plus);
      if (!l) return std::nullopt;
      v += *l;
    }
    return v;
  }
  void collect_breakpoints(double a, double b,
                           std::vector<double>& out) const override {
    for (const auto& term : terms_) term->collect_breakpoints(a, b, out);
  }

 private:
  std::vector<NodePtr> terms_;
};

class ScaleNode final : public PathNode {
 public:
  ScaleNode(double factor, NodePtr inner)
      : factor_(factor), inner_(std::move(inner)) {}
  double value(double t, Side side) const override {
    return factor_ * inner_->value(t, side);
  }
  double bound() const override { return std::abs(factor_) * inner_->bound(); }
  double window() const override { return inner_->window(); }
  std::optional<double> limit(bool plus) const override {
    auto l = inner_->limit(plus);
    if (!l) return std::nullopt;
    return factor_ * *l;
  }
  void collect_breakpoints(double a, double b,
                           std::vector<double>& out) const override {
    inner_->collect_breakpoints(a, b, out);
  }

 private:
  double factor_;
  NodePtr inner_;
};

class SquareNode final : public PathNode {
 public:
  explicit SquareNode(NodePtr inner) : inner_(std::move(inner)) {}
  double value(double t, Side side) const override {
    const double v = inner_->value(t, side);
    return v * v;
  }
  double bound() const override {
    const double b = inner_->bound();
    return b * b;
  }
  double window() const override { return inner_->window(); }
  std::optional<double> limit(bool plus) const override {
    auto l = inner_->limit(plus);
    if (!l) return std::nullopt;
    return *l * *l;
  }
  void collect_breakpoints(double a, double b,
                           std::vector<double>& out) const override {
    inner_->collect_breakpoints(a, b, out);
  }

 private:
  NodePtr inner_;
};

class ShiftNode final : public PathNode {
 public:
  ShiftNode(NodePtr inner, double s) : inner_(std::move(inner)), s_(s) {}
  double value(double t, Side side) const override {
    return inner_->value(t + s_, side);
  }
  double bound() const override { return inner_->bound(); }
  double window() const override { return inner_->window() + std::abs(s_); }
  std::optional<double> limit(bool plus) const override {
    return inner_->limit(plus);
  }
  void collect_breakpoints(double a, double b,
                           std::vector<double>& out) const override {
    std::vector<double> inner_points;
    inner_->collect_breakpoints(a + s_, b + s_, inner_points);
    for (double t : inner_points) out.push_back(t - s_);
  }

  const NodePtr& inner() const { return inner_; }
  double offset() const { return s_; }

 private:
  NodePtr inner_;
  double s_;
};

class SampleHoldNode final : public PathNode {
 public:
  SampleHoldNode(NodePtr inner, double rate, double hold)
      : inner_(std::move(inner)), rate_(rate), hold_(hold) {}

  // Index j with t in [j*h, (j+1)*h), using j*h products so that the lattice
  // agrees exactly with the breakpoints this node reports.
  long long piece_index(double t, Side side) const {
    long long j = static_cast<long long>(std::floor(t / hold_));
    while (static_cast<double>(j + 1) * hold_ <= t) ++j;
    while (static_cast<double>(j) * hold_ > t) --j;
    if (side == Side::Left && static_cast<double>(j) * hold_ == t) --j;
    return j;
  }

  double value(double t, Side side) const override {
    const long long j = piece_index(t, side);
    return inner_->value(rate_ * static_cast<double>(j) * hold_, Side::Right);
  }
  double bound() const override { return inner_->bound(); }
  double window() const override {
    const double iw = inner_->window();
    if (rate_ == 0.0) return hold_;
    return iw / std::abs(rate_) + hold_;
  }
  std::optional<double> limit(bool plus) const override {
    if (rate_ == 0.0) return inner_->value(0.0, Side::Right);
    return inner_->limit((rate_ > 0.0) == plus);
  }
  void collect_breakpoints(double a, double b,
                           std::vector<double>& out) const override {
    long long j_lo = static_cast<long long>(std::ceil(a / hold_));
    while (static_cast<double>(j_lo - 1) * hold_ >= a) --j_lo;
    while (static_cast<double>(j_lo) * hold_ < a) ++j_lo;
    for (long long j = j_lo; static_cast<double>(j) * hold_ <= b; ++j)
      out.push_back(static_cast<double>(j) * hold_);
  }

 private:
  NodePtr inner_;
  double rate_;
  double hold_;
};

}  // namespace detail

double PiecewisePath::value(double t, Side side) const {
  return node_ ? node_->value(t, side) : 0.0;
}

double PiecewisePath::sup_norm_bound() const {
  return node_ ? node_->bound() : 0.0;
}

double PiecewisePath::window() const { return node_ ? node_->window() : 0.0; }

std::optional<double> PiecewisePath::limit_at(bool plus_infinity) const {
  return node_ ? node_->limit(plus_infinity) : std::optional<double>(0.0);
}

std::vector<double> PiecewisePath::breakpoints_in(double a, double b) const {
  std::vector<double> out;
  if (!node_ || a > b) return out;
  node_->collect_breakpoints(a, b, out);
  std::sort(out.begin(), out.end());
  // Coalesce coincident points coming from different subtrees, then require
  // a strictly positive gap between the survivors.
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  const double coincide = 1e-12 * scale;
  std::vector<double> merged;
  for (double t : out) {
    if (merged.empty() || t - merged.back() > coincide)
      merged.push_back(t);
  }
  for (std::size_t i = 1; i < merged.size(); ++i) {
    if (merged[i] - merged[i - 1] < 1e-9)
      throw NonDisperseBreakpoints(
          "breakpoint gap below 1e-9 in query interval; the breakpoint set "
          "is not disperse");
  }
  return merged;
}

PiecewisePath constant_path(double v) {
  if (v == 0.0) return PiecewisePath();
  return PiecewisePath(std::make_shared<detail::ConstantNode>(v));
}

PiecewisePath scaled_arctan_path(double c) {
  return PiecewisePath(std::make_shared<detail::ScaledArctanNode>(c));
}

PiecewisePath sinusoid_sum_path(double offset, std::vector<SinusoidTerm> terms) {
  return PiecewisePath(
      std::make_shared<detail::SinusoidSumNode>(offset, std::move(terms)));
}

PiecewisePath step_path(std::vector<double> levels,
                        std::vector<double> thresholds) {
  if (levels.size() != thresholds.size() + 1)
    throw InvalidParams("step path needs levels.size() == thresholds.size() + 1");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (!(thresholds[i] > thresholds[i - 1]))
      throw InvalidParams("step path thresholds must be strictly increasing");
  return PiecewisePath(std::make_shared<detail::StepNode>(std::move(levels),
                                                          std::move(thresholds)));
}

PiecewisePath sum_path(std::vector<PiecewisePath> terms) {
  std::vector<detail::NodePtr> nodes;
  nodes.reserve(terms.size());
  for (auto& t : terms)
    if (!t.is_zero()) nodes.push_back(t.node());
  if (nodes.empty()) return PiecewisePath();
  if (nodes.size() == 1) return PiecewisePath(nodes.front());
  return PiecewisePath(std::make_shared<detail::SumNode>(std::move(nodes)));
}

PiecewisePath scale_path(double factor, PiecewisePath inner) {
  if (factor == 0.0 || inner.is_zero()) return PiecewisePath();
  if (factor == 1.0) return inner;
  return PiecewisePath(std::make_shared<detail::ScaleNode>(factor, inner.node()));
}

PiecewisePath square_path(PiecewisePath inner) {
  if (inner.is_zero()) return PiecewisePath();
  return PiecewisePath(std::make_shared<detail::SquareNode>(inner.node()));
}

PiecewisePath sample_hold_path(PiecewisePath inner, double rate, double hold) {
  if (!(hold > 0.0) || !std::isfinite(rate) || !std::isfinite(hold))
    throw InvalidParams("sample-hold path needs finite rate and hold > 0");
  return PiecewisePath(
      std::make_shared<detail::SampleHoldNode>(inner.node() ? inner.node()
                                                            : constant_path(0.0).node(),
                                               rate, hold));
}

PiecewisePath shift_forcing(const PiecewisePath& path, double s) {
  if (path.is_zero()) return path;
  if (s == 0.0) return path;
  if (auto shifted = std::dynamic_pointer_cast<const detail::ShiftNode>(path.node())) {
    const double merged = shifted->offset() + s;
    if (merged == 0.0) return PiecewisePath(shifted->inner());
    return PiecewisePath(std::make_shared<detail::ShiftNode>(shifted->inner(), merged));
  }
  return PiecewisePath(std::make_shared<detail::ShiftNode>(path.node(), s));
}

double sup_norm_bound(const PiecewisePath& path) { return path.sup_norm_bound(); }

}  // namespace tipscan
