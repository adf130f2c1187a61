#include "tipscan/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tipscan {

std::string to_string(CaseVerdict v) {
  switch (v) {
    case CaseVerdict::CaseA: return "CaseA";
    case CaseVerdict::CaseB: return "CaseB";
    case CaseVerdict::CaseC: return "CaseC";
  }
  return "CaseB";
}

double problem_escape_bound(const ProblemSpec& problem, double epsilon) {
  const GeneralForm form = to_general_form(problem);
  return escape_bound(form.q.sup_norm_bound(), form.p_eff.sup_norm_bound(),
                      epsilon);
}

HorizonParams auto_horizons(const TransitionSpec& spec, double delta_tail,
                            double settle) {
  if (!(settle > 0.0)) throw InvalidParams("settle must be positive");
  const double t_settle = spec.tail_settle_time(delta_tail);
  HorizonParams hp;
  hp.t_match = t_settle > 0.0 ? t_settle : 1.0;
  hp.t_far = hp.t_match + settle;
  hp.delta_tail = delta_tail;
  return hp;
}

namespace {

std::vector<double> run_nodes(const ProblemSpec& problem,
                              const HorizonParams& hp) {
  std::vector<double> nodes =
      problem_breakpoints(problem, -hp.t_far, hp.t_far);
  nodes.push_back(-hp.t_match);
  nodes.push_back(hp.t_match);
  return nodes;
}

}  // namespace

Trajectory pullback_attractor(const ProblemSpec& problem,
                              const HorizonParams& hp, const IvpParams& ip) {
  hp.validate();
  const double m = problem_escape_bound(problem);
  const double launch = m + ip.escape_margin;
  return integrate(quadratic_rhs(problem), -hp.t_far, launch, hp.t_far,
                   run_nodes(problem, hp), ip, m);
}

Trajectory pullback_repeller(const ProblemSpec& problem,
                             const HorizonParams& hp, const IvpParams& ip) {
  hp.validate();
  const double m = problem_escape_bound(problem);
  const double launch = m + ip.escape_margin;
  return integrate(quadratic_rhs(problem), hp.t_far, -launch, -hp.t_far,
                   run_nodes(problem, hp), ip, m);
}

namespace {

Classification classify_once(const ProblemSpec& problem,
                             const HorizonParams& hp, const IvpParams& ip) {
  Classification c;
  c.t_match = hp.t_match;
  c.m_bound = problem_escape_bound(problem);
  c.launch = c.m_bound + ip.escape_margin;
  c.attractor_trace = pullback_attractor(problem, hp, ip);
  c.repeller_trace = pullback_repeller(problem, hp, ip);

  const bool att_reached = c.attractor_trace.covers(hp.t_match);
  const bool rep_reached = c.repeller_trace.covers(hp.t_match);

  if (c.attractor_trace.escape())
    c.escape = EscapeWitness{c.attractor_trace.escape()->t_escape,
                             EscapeWitness::Branch::Attractor,
                             c.attractor_trace.escape()->direction};
  else if (c.repeller_trace.escape())
    c.escape = EscapeWitness{c.repeller_trace.escape()->t_escape,
                             EscapeWitness::Branch::Repeller,
                             c.repeller_trace.escape()->direction};

  if (!att_reached || !rep_reached) {
    c.verdict = CaseVerdict::CaseC;
    return c;
  }

  const double gap = c.attractor_trace.value_at(hp.t_match) -
                     c.repeller_trace.value_at(hp.t_match);
  c.gap = gap;
  if (gap > hp.tol_gap)
    c.verdict = CaseVerdict::CaseA;
  else if (gap < -hp.tol_gap)
    c.verdict = CaseVerdict::CaseC;
  else
    c.verdict = CaseVerdict::CaseB;
  if (c.escape && c.verdict == CaseVerdict::CaseA)
    c.notes.push_back("escape witness despite positive gap; borderline data");
  return c;
}

}  // namespace

Classification classify(const ProblemSpec& problem, const HorizonParams& hp,
                        const IvpParams& ip, const ClassifyOptions& opts) {
  Classification c = classify_once(problem, hp, ip);
  if (!opts.robustness_checks) return c;

  // Verdict must survive a doubled launch horizon, halved tolerances and a
  // raised launch value.
  {
    HorizonParams hp2 = hp.with_far(hp.t_match + 2.0 * (hp.t_far - hp.t_match));
    IvpParams ip2 = ip.halved();
    ip2.escape_margin += 0.5;
    const Classification check = classify_once(problem, hp2, ip2);
    if (check.verdict != c.verdict) {
      c.robust_consistent = false;
      c.notes.push_back("verdict changed under doubled horizon / halved "
                        "tolerance rerun: " +
                        to_string(c.verdict) + " vs " + to_string(check.verdict));
    }
  }

  // Maximal-solution ordering: starting above the attractor launch value the
  // solution must blow up backward, and starting below the repeller launch
  // value it must blow up forward.
  {
    const double probe = 100.0;
    const std::vector<double> no_nodes;
    const auto above =
        integrate(quadratic_rhs(problem), -hp.t_far, c.launch + 0.5,
                  -hp.t_far - probe,
                  problem_breakpoints(problem, -hp.t_far - probe, -hp.t_far),
                  ip, c.m_bound);
    if (above.completed()) {
      c.robust_consistent = false;
      c.notes.push_back("solution above the attractor launch stayed bounded "
                        "backward in time");
    }
    const auto below =
        integrate(quadratic_rhs(problem), hp.t_far, -c.launch - 0.5,
                  hp.t_far + probe,
                  problem_breakpoints(problem, hp.t_far, hp.t_far + probe), ip,
                  c.m_bound);
    if (below.completed()) {
      c.robust_consistent = false;
      c.notes.push_back("solution below the repeller launch stayed bounded "
                        "forward in time");
    }
  }
  return c;
}

SeparationDiagnostic separation_exponent(const ProblemSpec& problem,
                                         const Trajectory& b,
                                         double window_start,
                                         double window_end) {
  if (!(window_end > window_start))
    throw InvalidParams("separation window needs end > start");
  if (!b.covers(window_start) || !b.covers(window_end))
    throw WindowOutOfRange("separation window outside trajectory range");

  // Panel edges: window endpoints plus every node strictly inside.
  std::vector<double> edges;
  edges.push_back(window_start);
  for (double t : b.times())
    if (t > window_start && t < window_end) edges.push_back(t);
  edges.push_back(window_end);
  std::sort(edges.begin(), edges.end());

  const auto integrand = [&](double t, Side side) {
    return -2.0 * b.value_at(t) + 2.0 * problem.transition.value(t, side);
  };
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double u = edges[i];
    const double v = edges[i + 1];
    integral += 0.5 * (integrand(u, Side::Right) + integrand(v, Side::Left)) *
                (v - u);
  }
  SeparationDiagnostic diag;
  diag.window_start = window_start;
  diag.window_end = window_end;
  diag.exponent = integral / (window_end - window_start);
  return diag;
}

bool certify_with_subsolution(const ProblemSpec& problem, const Trajectory& b,
                              double grid_step, const IvpParams& ip) {
  if (b.size() < 3) throw DegenerateTrajectory("need at least 3 nodes");
  if (!(grid_step > 0.0)) throw InvalidParams("grid step must be positive");

  const double lo = std::min(b.front_time(), b.back_time());
  const double hi = std::max(b.front_time(), b.back_time());

  // Curvature estimate from within-segment derivative differences.
  double max_b2 = 0.0;
  const auto& ts = b.times();
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    const double dt = std::abs(ts[i + 1] - ts[i]);
    if (dt > 0.0)
      max_b2 = std::max(max_b2,
                        std::abs(b.deriv_in(i + 1) - b.deriv_out(i)) / dt);
  }
  const double slack =
      10.0 * ip.abs_tol + grid_step * grid_step * max_b2 / 8.0;

  const GeneralForm form = to_general_form(problem);
  const auto rhs_at = [&](double t, double y) {
    return -y * y + form.q.value(t) * y + form.p_eff.value(t);
  };

  const long long n = static_cast<long long>(std::floor((hi - lo) / grid_step));
  bool ok = false;  // at least one interior grid point must exist
  for (long long i = 1; i < n; ++i) {
    const double t = lo + grid_step * static_cast<double>(i);
    if (t - grid_step < lo || t + grid_step > hi) continue;
    ok = true;
    const double slope =
        (b.value_at(t + grid_step) - b.value_at(t - grid_step)) /
        (2.0 * grid_step);
    if (slope > rhs_at(t, b.value_at(t)) + slack) return false;
  }
  if (!ok) throw DegenerateTrajectory("grid step leaves no interior points");
  return true;
}

}  // namespace tipscan
