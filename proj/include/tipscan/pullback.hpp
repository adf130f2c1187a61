#ifndef TIPSCAN_PULLBACK_HPP
#define TIPSCAN_PULLBACK_HPP

#include <optional>
#include <string>
#include <vector>

#include "tipscan/ivp.hpp"
#include "tipscan/transition.hpp"

namespace tipscan {

// Epsilon in the escape-bound inequality -m^2 + |q| m + |p_eff| <= -eps.
inline constexpr double kEscapeEpsilon = 0.76;
// Default distance between the comparison window edge and the launch horizon.
inline constexpr double kDefaultSettle = 465.0;

struct HorizonParams {
  double t_match = 35.0;     // comparison window edge
  double t_far = 500.0;      // launch horizon
  double tol_gap = 1e-4;     // Case-B band half-width
  double delta_tail = 0.1;   // tail tolerance for auto horizon selection

  void validate() const {
    if (!(t_match > 0.0) || !(t_far > t_match))
      throw InvalidParams("horizons need t_far > t_match > 0");
    if (!(tol_gap > 0.0)) throw InvalidParams("tol_gap must be positive");
  }

  HorizonParams with_far(double far) const {
    HorizonParams hp = *this;
    hp.t_far = far;
    return hp;
  }
};

enum class CaseVerdict { CaseA, CaseB, CaseC };

std::string to_string(CaseVerdict v);

struct EscapeWitness {
  enum class Branch { Attractor, Repeller };
  double t_escape = 0.0;
  Branch branch = Branch::Attractor;
  EscapeDirection direction = EscapeDirection::Below;
};

struct Classification {
  CaseVerdict verdict = CaseVerdict::CaseB;
  std::optional<double> gap;  // a(t_match) - r(t_match) when both exist
  double t_match = 0.0;
  std::optional<EscapeWitness> escape;
  Trajectory attractor_trace;
  Trajectory repeller_trace;
  double m_bound = 0.0;
  double launch = 0.0;
  // Filled only when robustness checks run.
  bool robust_consistent = true;
  std::vector<std::string> notes;

  bool case_a() const { return verdict == CaseVerdict::CaseA; }
  bool case_c() const { return verdict == CaseVerdict::CaseC; }
};

// Finite-window substitute for a dichotomy exponent: the average of
// -2 b(l) + q(l) over [window_start, window_end].
struct SeparationDiagnostic {
  double window_start = 0.0;
  double window_end = 0.0;
  double exponent = 0.0;

  bool attractive() const { return exponent < 0.0; }
  bool repulsive() const { return exponent > 0.0; }
};

struct ClassifyOptions {
  // Rerun with doubled launch horizon, halved tolerances and a raised launch
  // value, and spot-check the maximal-solution ordering with two extra
  // integrations. Controlled by TIPSCAN_SEED_CHECK=1 in the CLI.
  bool robustness_checks = false;
};

// m from the problem's general-form coefficient bounds.
double problem_escape_bound(const ProblemSpec& problem,
                            double epsilon = kEscapeEpsilon);

// Horizon selection from the transition tails: t_match is where the
// transition stays delta_tail-close to its limits (with the hold lag), and
// t_far = t_match + settle.
HorizonParams auto_horizons(const TransitionSpec& spec, double delta_tail = 0.1,
                            double settle = kDefaultSettle);

// Forward trajectory from (-t_far, m + escape_margin) toward +t_far. By the
// collision argument it approximates the maximal bounded-in-the-past
// solution on [-t_match, ...] to solver precision.
Trajectory pullback_attractor(const ProblemSpec& problem,
                              const HorizonParams& hp, const IvpParams& ip);

// Backward trajectory from (+t_far, -(m + escape_margin)) toward -t_far.
Trajectory pullback_repeller(const ProblemSpec& problem,
                             const HorizonParams& hp, const IvpParams& ip);

// Runs both pullback integrations and classifies the equation:
//   Case A  gap > tol_gap        (attractor-repeller pair)
//   Case B  |gap| <= tol_gap     (borderline within tolerance)
//   Case C  escape before the comparison point, or gap < -tol_gap
Classification classify(const ProblemSpec& problem, const HorizonParams& hp,
                        const IvpParams& ip, const ClassifyOptions& opts = {});

SeparationDiagnostic separation_exponent(const ProblemSpec& problem,
                                         const Trajectory& b,
                                         double window_start,
                                         double window_end);

// Numerical sub-solution certificate: true when at every interior grid time
// the centered finite-difference slope of b is at most the quadratic
// right-hand side plus a discretization-aware slack. A pass certifies that
// bounded solutions exist for the problem, hence lambda* <= lambda.
bool certify_with_subsolution(const ProblemSpec& problem, const Trajectory& b,
                              double grid_step, const IvpParams& ip = {});

}  // namespace tipscan

#endif  // TIPSCAN_PULLBACK_HPP
