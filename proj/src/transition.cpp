#include "tipscan/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "tipscan/errors.hpp"

namespace tipscan {

std::string Rate::str() const {
  if (plus_inf()) return "+inf";
  if (minus_inf()) return "-inf";
  return std::to_string(value_);
}

namespace {

// Verifies that the base path really settles near its claimed limits and
// that the oscillation over the outer 10% of the window stays within the
// tail tolerance.
AsymptoticLimits checked_limits(const PiecewisePath& base) {
  auto lp = base.limit_at(true);
  auto lm = base.limit_at(false);
  if (!lp || !lm)
    throw NonConvergentTails("transition base has no asymptotic limits");
  AsymptoticLimits lim;
  lim.gamma_plus = *lp;
  lim.gamma_minus = *lm;
  lim.gamma_zero = base.value(0.0);

  const double w = base.window();
  if (w > 0.0) {
    if (std::abs(base.value(w) - lim.gamma_plus) > kTailTolerance ||
        std::abs(base.value(-w) - lim.gamma_minus) > kTailTolerance)
      throw NonConvergentTails(
          "transition base value at the window edge deviates from its limit "
          "by more than the tail tolerance");
    // Oscillation over the last 10% of the window, both sides.
    constexpr int kSamples = 64;
    for (int sign = -1; sign <= 1; sign += 2) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int i = 0; i <= kSamples; ++i) {
        const double t = sign * w * (0.9 + 0.1 * i / kSamples);
        const double v = base.value(t);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > kTailTolerance)
        throw NonConvergentTails(
            "tail oscillation over the last 10% of the window exceeds the "
            "tail tolerance");
    }
  }
  return lim;
}

}  // namespace

TransitionSpec::TransitionSpec(PiecewisePath base, Rate rate, double hold)
    : base_(std::move(base)), rate_(rate), hold_(hold) {
  if (hold_ < 0.0 || !std::isfinite(hold_))
    throw InvalidParams("transition hold must be finite and >= 0");
  if (rate_.finite() && !std::isfinite(rate_.value()))
    throw InvalidParams("finite transition rate must be a finite number");
  limits_ = checked_limits(base_);
}

double TransitionSpec::value(double t, Side side) const {
  if (!rate_.finite()) {
    const double before = rate_.plus_inf() ? limits_.gamma_minus : limits_.gamma_plus;
    const double after = rate_.plus_inf() ? limits_.gamma_plus : limits_.gamma_minus;
    if (hold_ > 0.0) {
      if (t < 0.0 || (t == 0.0 && side == Side::Left)) return before;
      if (t < hold_ || (t == hold_ && side == Side::Left)) return limits_.gamma_zero;
      return after;
    }
    if (t < 0.0 || (t == 0.0 && side == Side::Left)) return before;
    return after;
  }
  const double c = rate_.value();
  if (c == 0.0) return limits_.gamma_zero;
  if (hold_ == 0.0) {
    // Right-continuity in t maps to the same side for c > 0 and flips for c < 0.
    const Side inner_side =
        c > 0.0 ? side : (side == Side::Right ? Side::Left : Side::Right);
    return base_.value(c * t, inner_side);
  }
  long long j = static_cast<long long>(std::floor(t / hold_));
  while (static_cast<double>(j + 1) * hold_ <= t) ++j;
  while (static_cast<double>(j) * hold_ > t) --j;
  if (side == Side::Left && static_cast<double>(j) * hold_ == t) --j;
  return base_.value(c * static_cast<double>(j) * hold_);
}

double TransitionSpec::sup_norm_bound() const {
  if (!rate_.finite())
    return std::max({std::abs(limits_.gamma_minus), std::abs(limits_.gamma_zero),
                     std::abs(limits_.gamma_plus)});
  if (rate_.value() == 0.0) return std::abs(limits_.gamma_zero);
  return base_.sup_norm_bound();
}

void TransitionSpec::collect_breakpoints(double a, double b,
                                         std::vector<double>& out) const {
  if (!rate_.finite()) {
    if (a <= 0.0 && 0.0 <= b) out.push_back(0.0);
    if (hold_ > 0.0 && a <= hold_ && hold_ <= b) out.push_back(hold_);
    return;
  }
  const double c = rate_.value();
  if (c == 0.0) return;
  if (hold_ == 0.0) {
    // Breakpoints of base(c*t) sit at (base breakpoints)/c.
    const double u = a * c;
    const double v = b * c;
    for (double s : base_.breakpoints_in(std::min(u, v), std::max(u, v)))
      out.push_back(s / c);
    return;
  }
  long long j_lo = static_cast<long long>(std::ceil(a / hold_));
  while (static_cast<double>(j_lo - 1) * hold_ >= a) --j_lo;
  while (static_cast<double>(j_lo) * hold_ < a) ++j_lo;
  for (long long j = j_lo; static_cast<double>(j) * hold_ <= b; ++j)
    out.push_back(static_cast<double>(j) * hold_);
}

namespace {

// Smallest x >= 0 with |base(s*x') - limit| <= delta for all x' >= x on the
// given side (s = +1 or -1), found by scan plus bisection over the window.
double base_tail_time(const PiecewisePath& base, double limit, double delta,
                      double sign) {
  double w = std::max(base.window(), 1.0);
  const auto settled = [&](double x) {
    return std::abs(base.value(sign * x) - limit) <= delta;
  };
  // Extend the search range if the window tolerance (1e-3) is coarser than
  // the requested delta.
  int extensions = 0;
  while (!settled(w)) {
    w *= 2.0;
    if (++extensions > 40)
      throw NonConvergentTails("transition tail never settles within delta");
  }
  constexpr int kScan = 4096;
  double last_bad = -1.0;
  for (int i = kScan; i >= 0; --i) {
    const double x = w * i / kScan;
    if (!settled(x)) {
      last_bad = x;
      break;
    }
  }
  if (last_bad < 0.0) return 0.0;
  double lo = last_bad;          // not settled
  double hi = last_bad + w / kScan;  // settled
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (settled(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

double TransitionSpec::tail_settle_time(double delta) const {
  if (!(delta > 0.0)) throw InvalidParams("tail delta must be positive");
  if (!rate_.finite()) return hold_;
  const double c = rate_.value();
  if (c == 0.0) return 0.0;
  const double x_plus = base_tail_time(base_, limits_.gamma_plus, delta, +1.0);
  const double x_minus = base_tail_time(base_, limits_.gamma_minus, delta, -1.0);
  // For hold h > 0 the sample time c*j*h lies within (c(t-h), c*t], so the
  // settled region starts h later than in the continuous case.
  return std::max(x_plus, x_minus) / std::abs(c) + hold_;
}

namespace detail {

// PathNode adapter so transitions participate in coefficient algebra.
class TransitionPathNode final : public PathNode {
 public:
  explicit TransitionPathNode(TransitionSpec spec) : spec_(std::move(spec)) {}
  double value(double t, Side side) const override { return spec_.value(t, side); }
  double bound() const override { return spec_.sup_norm_bound(); }
  double window() const override {
    if (!spec_.rate().finite()) return std::max(spec_.hold(), 1.0);
    const double c = spec_.rate().value();
    if (c == 0.0) return 0.0;
    return spec_.base().window() / std::abs(c) + spec_.hold();
  }
  std::optional<double> limit(bool plus) const override {
    if (spec_.rate().finite() && spec_.rate().value() == 0.0)
      return spec_.gamma_zero();
    const bool forward = !spec_.rate().finite()
                             ? spec_.rate().plus_inf()
                             : spec_.rate().value() > 0.0;
    if (forward == plus) return spec_.gamma_plus();
    return spec_.gamma_minus();
  }
  void collect_breakpoints(double a, double b,
                           std::vector<double>& out) const override {
    spec_.collect_breakpoints(a, b, out);
  }

 private:
  TransitionSpec spec_;
};

}  // namespace detail

PiecewisePath TransitionSpec::as_path() const {
  return PiecewisePath(std::make_shared<detail::TransitionPathNode>(*this));
}

double eval_transition(const TransitionSpec& spec, double t) {
  return spec.value(t);
}

AsymptoticLimits asymptotic_limits(const TransitionSpec& spec) {
  return spec.limits();
}

GeneralForm to_general_form(const ProblemSpec& problem) {
  GeneralForm form;
  const PiecewisePath gamma = problem.transition.as_path();
  form.q = scale_path(2.0, gamma);
  form.p_eff = sum_path({problem.forcing, scale_path(-1.0, square_path(gamma)),
                         constant_path(problem.offset)});
  return form;
}

TransitionSpec zero_transition() {
  return TransitionSpec(constant_path(0.0), Rate(0.0), 0.0);
}

TransitionSpec step_limit_transition(const TransitionSpec& spec, bool plus) {
  return TransitionSpec(spec.base(),
                        plus ? Rate::plus_infinity() : Rate::minus_infinity(),
                        0.0);
}

}  // namespace tipscan
