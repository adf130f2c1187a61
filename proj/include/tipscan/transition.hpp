#ifndef TIPSCAN_TRANSITION_HPP
#define TIPSCAN_TRANSITION_HPP

#include <string>
#include <vector>

#include "tipscan/path.hpp"

namespace tipscan {

// Tolerance that defines "numerically constant tails" for transition bases.
inline constexpr double kTailTolerance = 1e-3;

// Extended-real transition rate: finite values, or the two step limits.
class Rate {
 public:
  Rate() = default;
  Rate(double v) : kind_(Kind::Finite), value_(v) {}  // NOLINT: implicit by design

  static Rate plus_infinity() { return Rate(Kind::PlusInf); }
  static Rate minus_infinity() { return Rate(Kind::MinusInf); }

  bool finite() const { return kind_ == Kind::Finite; }
  bool plus_inf() const { return kind_ == Kind::PlusInf; }
  bool minus_inf() const { return kind_ == Kind::MinusInf; }
  double value() const { return value_; }

  std::string str() const;

  friend bool operator==(const Rate& a, const Rate& b) {
    if (a.kind_ != b.kind_) return false;
    return a.kind_ != Kind::Finite || a.value_ == b.value_;
  }

 private:
  enum class Kind { Finite, PlusInf, MinusInf };
  explicit Rate(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

struct AsymptoticLimits {
  double gamma_minus = 0.0;
  double gamma_zero = 0.0;
  double gamma_plus = 0.0;
};

// A transition coefficient: a base path with constant tails, run at a rate
// c (possibly +-infinity) with a sample-and-hold period h >= 0.
//
//   rate finite, h = 0:  t -> base(c * t)
//   rate finite, h > 0:  t -> base(c * j * h) on [j*h, (j+1)*h)
//   rate = +inf:         gamma- for t < 0, gamma0 on [0, h), gamma+ for t >= h
//   rate = -inf:         the same with gamma- and gamma+ swapped
//
// Evaluation is right-continuous at every breakpoint.
class TransitionSpec {
 public:
  // Throws NonConvergentTails if the base path does not settle to constant
  // tails within kTailTolerance at its window edges, and InvalidParams for
  // hold < 0.
  TransitionSpec(PiecewisePath base, Rate rate, double hold);

  double value(double t, Side side = Side::Right) const;

  const PiecewisePath& base() const { return base_; }
  const Rate& rate() const { return rate_; }
  double hold() const { return hold_; }
  double gamma_minus() const { return limits_.gamma_minus; }
  double gamma_zero() const { return limits_.gamma_zero; }
  double gamma_plus() const { return limits_.gamma_plus; }
  AsymptoticLimits limits() const { return limits_; }

  // Exact upper bound on sup |Gamma_c^h|.
  double sup_norm_bound() const;

  // Breakpoints of the evaluated transition inside [a, b].
  void collect_breakpoints(double a, double b, std::vector<double>& out) const;

  // Smallest T >= 0 such that |Gamma_c^h(t) - gamma+-| <= delta for every
  // |t| >= T, accounting for the sample-and-hold lag. Returns 0 for constant
  // transitions. Throws NonConvergentTails when no such T exists.
  double tail_settle_time(double delta) const;

  // The transition as a PiecewisePath (for general-form coefficient algebra).
  PiecewisePath as_path() const;

 private:
  PiecewisePath base_;
  Rate rate_;
  double hold_ = 0.0;
  AsymptoticLimits limits_;
};

// One equation instance y' = -(y - Gamma_c^h(t))^2 + p(t) + lambda.
struct ProblemSpec {
  TransitionSpec transition;
  PiecewisePath forcing;
  double offset = 0.0;  // lambda

  ProblemSpec(TransitionSpec t, PiecewisePath p, double lambda)
      : transition(std::move(t)), forcing(std::move(p)), offset(lambda) {}

  ProblemSpec with_offset(double lambda) const {
    return ProblemSpec(transition, forcing, lambda);
  }

  ProblemSpec with_forcing(PiecewisePath p) const {
    return ProblemSpec(transition, std::move(p), offset);
  }
};

struct GeneralForm {
  PiecewisePath q;      // 2 * Gamma_c^h
  PiecewisePath p_eff;  // p - (Gamma_c^h)^2 + lambda
};

// Free-function forms of the coefficient operations.
double eval_transition(const TransitionSpec& spec, double t);
AsymptoticLimits asymptotic_limits(const TransitionSpec& spec);
GeneralForm to_general_form(const ProblemSpec& problem);

// A transition that is identically zero (for the base equation x'=-x^2+p).
TransitionSpec zero_transition();
// The h = 0 step limit of spec's transition family, keeping spec's gammas.
TransitionSpec step_limit_transition(const TransitionSpec& spec, bool plus);

}  // namespace tipscan

#endif  // TIPSCAN_TRANSITION_HPP
