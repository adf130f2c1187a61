#ifndef TIPSCAN_IVP_HPP
#define TIPSCAN_IVP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "tipscan/errors.hpp"
#include "tipscan/path.hpp"
#include "tipscan/transition.hpp"

namespace tipscan {

struct IvpParams {
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
  double escape_margin = 0.1;
  double max_step = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw InvalidParams("integrator tolerances must be positive");
    if (escape_margin < 0.0)
      throw InvalidParams("escape margin must be >= 0");
    if (!(max_step > 0.0)) throw InvalidParams("max step must be positive");
  }

  IvpParams halved() const {
    IvpParams p = *this;
    p.rel_tol *= 0.5;
    p.abs_tol *= 0.5;
    return p;
  }
};

enum class EscapeDirection { Below, Above };

struct EscapeEvent {
  double t_escape = 0.0;
  EscapeDirection direction = EscapeDirection::Below;
};

// One adaptive integration run. Times are strictly monotone: increasing for
// forward runs, decreasing for backward runs. Every coefficient breakpoint
// crossed by the run is a node. Between nodes, values interpolate with a
// cubic Hermite built from the stored endpoint derivatives.
class Trajectory {
 public:
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  bool completed() const { return !escape_.has_value(); }
  const std::optional<EscapeEvent>& escape() const { return escape_; }
  bool forward() const { return forward_; }
  std::size_t size() const { return times_.size(); }

  double front_time() const { return times_.front(); }
  double back_time() const { return times_.back(); }
  double back_value() const { return values_.back(); }

  // Whether t lies inside the integrated time range.
  bool covers(double t) const;

  // Hermite-interpolated value; throws WindowOutOfRange outside the range.
  double value_at(double t) const;

  // Right-hand side value at node i, taken on the side facing out of /
  // into the node (equal except at coefficient breakpoints).
  double deriv_out(std::size_t i) const { return deriv_out_[i]; }
  double deriv_in(std::size_t i) const { return deriv_in_[i]; }

  // Sum of the accepted local error estimates; a coarse global error proxy.
  double error_estimate() const { return error_estimate_; }

 private:
  template <class Rhs>
  friend Trajectory integrate(Rhs&& rhs, double t0, double y0, double t1,
                              const std::vector<double>& extra_nodes,
                              const IvpParams& params, double m_bound);

  std::vector<double> times_, values_, deriv_in_, deriv_out_;
  std::optional<EscapeEvent> escape_;
  double error_estimate_ = 0.0;
  bool forward_ = true;
};

// Smallest m with -m^2 + q_norm * m + p_eff_norm <= -epsilon.
inline double escape_bound(double q_norm, double p_eff_norm, double epsilon) {
  if (q_norm < 0.0 || p_eff_norm < 0.0 || !(epsilon > 0.0))
    throw InvalidParams("escape_bound needs q_norm, p_eff_norm >= 0 and epsilon > 0");
  return 0.5 * (q_norm + std::sqrt(q_norm * q_norm + 4.0 * (p_eff_norm + epsilon)));
}

// The quadratic right-hand side -(y - Gamma(t))^2 + p(t) + lambda.
struct QuadraticRhs {
  TransitionSpec transition;
  PiecewisePath forcing;
  double lambda = 0.0;

  double operator()(double t, double y, Side side) const {
    const double d = y - transition.value(t, side);
    return -d * d + forcing.value(t, side) + lambda;
  }
};

inline QuadraticRhs quadratic_rhs(const ProblemSpec& problem) {
  return QuadraticRhs{problem.transition, problem.forcing, problem.offset};
}

// Sorted unique breakpoints of the problem coefficients inside [a, b].
std::vector<double> problem_breakpoints(const ProblemSpec& problem, double a,
                                        double b);

namespace detail {

// Dormand-Prince 5(4) coefficients (the classical ode45 pair).
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                          c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0,
                          b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                          b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                          e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                          e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
};

inline double hermite(double t, double t0, double y0, double f0, double t1,
                      double y1, double f1) {
  const double h = t1 - t0;
  if (h == 0.0) return y0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * f0 +
         (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * f1;
}

}  // namespace detail

// Adaptive Dormand-Prince 5(4) integration of y' = rhs(t, y) from (t0, y0)
// toward t1 (either direction). Every node listed in extra_nodes and every
// coefficient breakpoint must be supplied through extra_nodes by the caller;
// steps never straddle them, and the right-hand side is evaluated on the
// side of each node that faces the step interior.
//
// Escape detection: with a finite m_bound, integration halts once the value
// crosses -(m_bound + escape_margin) on forward runs or +(m_bound +
// escape_margin) on backward runs, and the crossing time is refined on the
// dense output to abs_tol.
template <class Rhs>
Trajectory integrate(Rhs&& rhs, double t0, double y0, double t1,
                     const std::vector<double>& extra_nodes,
                     const IvpParams& params,
                     double m_bound = std::numeric_limits<double>::infinity()) {
  using D = detail::Dopri5;
  params.validate();
  if (t0 == t1) throw InvalidParams("integration needs t0 != t1");
  if (!std::isfinite(t0) || !std::isfinite(t1) || !std::isfinite(y0))
    throw InvalidParams("integration endpoints must be finite");

  const bool forward = t1 > t0;
  const double dir = forward ? 1.0 : -1.0;
  const double threshold = m_bound + params.escape_margin;

  // Segment boundaries: start, mandatory nodes inside (t0, t1), end.
  std::vector<double> nodes;
  nodes.push_back(t0);
  {
    const double lo = std::min(t0, t1);
    const double hi = std::max(t0, t1);
    std::vector<double> inner(extra_nodes);
    std::sort(inner.begin(), inner.end());
    for (double t : inner)
      if (t > lo && t < hi) nodes.push_back(t);
    if (!forward) std::reverse(nodes.begin() + 1, nodes.end());
  }
  nodes.push_back(t1);
  // Drop nodes that coincide with a neighbor.
  {
    std::vector<double> unique_nodes;
    for (double t : nodes) {
      const double scale = std::max(1.0, std::abs(t));
      if (unique_nodes.empty() ||
          std::abs(t - unique_nodes.back()) > 1e-14 * scale)
        unique_nodes.push_back(t);
      else if (&t == &nodes.back())
        unique_nodes.back() = t;
    }
    nodes = std::move(unique_nodes);
  }

  Trajectory traj;
  traj.forward_ = forward;
  const std::size_t reserve = 1024;
  traj.times_.reserve(reserve);
  traj.values_.reserve(reserve);
  traj.deriv_in_.reserve(reserve);
  traj.deriv_out_.reserve(reserve);

  double t = t0;
  double y = y0;
  const double eps = std::numeric_limits<double>::epsilon();
  constexpr double safe = 0.9, beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
  double facold = 1e-4;
  double h = 0.0;  // chosen per segment below

  for (std::size_t seg = 0; seg + 1 < nodes.size(); ++seg) {
    const double seg_a = nodes[seg];
    const double seg_b = nodes[seg + 1];
    const double seg_hi = std::max(seg_a, seg_b);
    // Evaluate on the side of a node facing the step interior.
    const auto f = [&](double tt, double yy) {
      return rhs(tt, yy, tt == seg_hi ? Side::Left : Side::Right);
    };

    double k1 = f(t, y);
    if (seg == 0) {
      traj.times_.push_back(t);
      traj.values_.push_back(y);
      traj.deriv_in_.push_back(k1);
      traj.deriv_out_.push_back(k1);
    } else {
      traj.deriv_out_.back() = k1;  // fresh right-hand side on the new side
    }

    // Initial step guess: reuse the controller's scale across segments.
    if (h == 0.0) {
      const double sk = params.abs_tol + params.rel_tol * std::abs(y);
      const double d0 = std::abs(y) / sk;
      const double d1 = std::abs(k1) / sk;
      h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * (d0 / d1);
    }
    h = std::min({h, std::abs(seg_b - seg_a), params.max_step});

    bool reject = false;
    while (dir * (seg_b - t) > 0.0) {
      if (h < 1e3 * eps * std::max(std::abs(t), 1.0))
        throw StepUnderflow("required step below 1e3*eps*|t| at t=" +
                            std::to_string(t));
      bool last = false;
      if (dir * (t + dir * h - seg_b) >= 0.0 ||
          dir * (t + 1.01 * dir * h - seg_b) > 0.0) {
        h = std::abs(seg_b - t);
        last = true;
      }
      const double hs = dir * h;
      const double tph = last ? seg_b : t + hs;

      const double k2 = f(t + D::c2 * hs, y + hs * (D::a21 * k1));
      const double k3 = f(t + D::c3 * hs, y + hs * (D::a31 * k1 + D::a32 * k2));
      const double k4 =
          f(t + D::c4 * hs, y + hs * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3));
      const double k5 = f(t + D::c5 * hs, y + hs * (D::a51 * k1 + D::a52 * k2 +
                                                    D::a53 * k3 + D::a54 * k4));
      const double k6 = f(tph, y + hs * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 +
                                         D::a64 * k4 + D::a65 * k5));
      const double y_new = y + hs * (D::b1 * k1 + D::b3 * k3 + D::b4 * k4 +
                                     D::b5 * k5 + D::b6 * k6);
      const double k7 = f(tph, y_new);

      const double err_raw = hs * (D::e1 * k1 + D::e3 * k3 + D::e4 * k4 +
                                   D::e5 * k5 + D::e6 * k6 + D::e7 * k7);
      const double sk = params.abs_tol +
                        params.rel_tol * std::max(std::abs(y), std::abs(y_new));
      const double err = std::abs(err_raw) / sk;

      const double fac11 = std::pow(std::max(err, 1e-30), expo1);
      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      double h_new = h / fac;

      if (err <= 1.0) {
        facold = std::max(err, 1e-4);
        traj.error_estimate_ += std::abs(err_raw);

        // Escape test: crossing of the divergence-certifying threshold.
        const bool crossed = forward ? (y_new < -threshold) : (y_new > threshold);
        if (std::isfinite(threshold) && crossed) {
          const double target = forward ? -threshold : threshold;
          double lo = t, hi = tph;  // value(lo) inside, value(hi) outside
          for (int i = 0; i < 200 && std::abs(hi - lo) > params.abs_tol; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double ym = detail::hermite(mid, t, y, k1, tph, y_new, k7);
            const bool out = forward ? (ym < target) : (ym > target);
            (out ? hi : lo) = mid;
          }
          const double t_esc = 0.5 * (lo + hi);
          traj.times_.push_back(t_esc);
          traj.values_.push_back(target);
          traj.deriv_in_.push_back(f(t_esc, target));
          traj.deriv_out_.push_back(traj.deriv_in_.back());
          traj.escape_ = EscapeEvent{
              t_esc, forward ? EscapeDirection::Below : EscapeDirection::Above};
          return traj;
        }

        t = tph;
        y = y_new;
        k1 = k7;
        traj.times_.push_back(t);
        traj.values_.push_back(y);
        traj.deriv_in_.push_back(k7);
        traj.deriv_out_.push_back(k7);
        if (reject) h_new = std::min(h_new, h);
        reject = false;
        h = std::min(h_new, params.max_step);
      } else {
        h = h / std::min(facc1, fac11 / safe);
        reject = true;
      }
    }
  }
  return traj;
}

}  // namespace tipscan

#endif  // TIPSCAN_IVP_HPP
