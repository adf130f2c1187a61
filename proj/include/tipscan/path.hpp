#ifndef TIPSCAN_PATH_HPP
#define TIPSCAN_PATH_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tipscan {

// Which one-sided limit to take when a time lands exactly on a breakpoint.
// Paths are right-continuous by convention; the integrator asks for the left
// limit when a step ends on a breakpoint so that no stage ever samples the
// wrong piece.
enum class Side { Left, Right };

struct SinusoidTerm {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
};

namespace detail {
class PathNode;
using NodePtr = std::shared_ptr<const PathNode>;
}  // namespace detail

// A bounded piecewise-uniformly-continuous coefficient on the real line,
// represented as a closed-form expression tree. Immutable and cheap to copy;
// evaluation is pure and thread-safe.
class PiecewisePath {
 public:
  PiecewisePath() = default;  // the zero path

  double value(double t, Side side = Side::Right) const;

  // Upper bound B on sup |value|; exact for the closed-form primitives.
  double sup_norm_bound() const;

  // Half-width of the window outside which the path is pure tail behavior.
  double window() const;

  // Limits at plus/minus infinity when the tails converge.
  std::optional<double> limit_at(bool plus_infinity) const;

  // All breakpoints inside [a, b] (a <= b), sorted ascending, deduplicated.
  // Throws NonDisperseBreakpoints if two distinct breakpoints nearly collide.
  std::vector<double> breakpoints_in(double a, double b) const;

  bool is_zero() const { return node_ == nullptr; }

  const detail::NodePtr& node() const { return node_; }
  explicit PiecewisePath(detail::NodePtr node) : node_(std::move(node)) {}

 private:
  detail::NodePtr node_;
};

// Primitive constructors.
PiecewisePath constant_path(double v);
// (2/pi) * arctan(c * t); tails at +-sign(c).
PiecewisePath scaled_arctan_path(double c);
// offset + sum of amplitude * sin(frequency * t + phase).
PiecewisePath sinusoid_sum_path(double offset, std::vector<SinusoidTerm> terms);
// Right-continuous step function: levels.size() == thresholds.size() + 1,
// thresholds strictly increasing; value is levels[k] on [thr[k-1], thr[k]).
PiecewisePath step_path(std::vector<double> levels, std::vector<double> thresholds);

// Combinators.
PiecewisePath sum_path(std::vector<PiecewisePath> terms);
PiecewisePath scale_path(double factor, PiecewisePath inner);
PiecewisePath square_path(PiecewisePath inner);
// inner(c * j * h) on [j*h, (j+1)*h); requires h > 0 and finite c.
PiecewisePath sample_hold_path(PiecewisePath inner, double rate, double hold);

// p_s(t) := p(t + s). Breakpoints translate by -s; the sup-norm bound and the
// asymptotic limits are unchanged. Nested shifts collapse, so shifting by s
// and then by -s returns a path that evaluates exactly like the original.
PiecewisePath shift_forcing(const PiecewisePath& path, double s);

// Convenience alias matching the coefficient-module vocabulary.
double sup_norm_bound(const PiecewisePath& path);

}  // namespace tipscan

#endif  // TIPSCAN_PATH_HPP
