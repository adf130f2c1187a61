#include "tipscan/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tipscan {

bool Trajectory::covers(double t) const {
  if (times_.empty()) return false;
  const double lo = std::min(times_.front(), times_.back());
  const double hi = std::max(times_.front(), times_.back());
  return t >= lo && t <= hi;
}

double Trajectory::value_at(double t) const {
  if (!covers(t))
    throw WindowOutOfRange("time " + std::to_string(t) +
                           " outside trajectory range");
  // Nodes are sorted ascending for forward runs, descending for backward.
  std::size_t i;
  if (forward_) {
    i = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
  } else {
    i = std::upper_bound(times_.begin(), times_.end(), t,
                         [](double a, double b) { return a > b; }) -
        times_.begin();
  }
  if (i == 0) return values_.front();
  if (i >= times_.size()) return values_.back();
  const std::size_t j = i - 1;
  if (times_[j] == t) return values_[j];
  return detail::hermite(t, times_[j], values_[j], deriv_out_[j], times_[i],
                         values_[i], deriv_in_[i]);
}

std::vector<double> problem_breakpoints(const ProblemSpec& problem, double a,
                                        double b) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  std::vector<double> out;
  problem.transition.collect_breakpoints(lo, hi, out);
  for (double t : problem.forcing.breakpoints_in(lo, hi)) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace tipscan
