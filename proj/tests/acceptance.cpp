// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wkam/asymptotics.hpp"
#include "wkam/evolution.hpp"
#include "wkam/experiment.hpp"
#include "wkam/io.hpp"
#include "wkam/weak_kam.hpp"

using namespace wkam;

namespace {

// Frozen after one measurement on interval(400): worst gap / (h + dt) at t = 0.1, 0.2, 0.4.
constexpr double kHopfLaxC = 1.25;
constexpr double kHopfLaxCMax = 10.0;

constexpr double kTolAubryAcc = 1e-9;
constexpr double kTolQuadrature = 1e-12;
constexpr double kTolOrder = 1e-12;
constexpr double kTolShift = 1e-12;    // relative to 1 + |k|
constexpr double kTolRounding = 1e-13; // float slack on inequalities between path sums
constexpr double kMinRefinementGain = 1.5;

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Report {
 public:
  void fail(const std::string& why) {
    out_.ok = false;
    note(why);
  }
  void note(const std::string& s) { out_.detail += (out_.detail.empty() ? "" : "; ") + s; }
  void expect(bool cond, const std::string& what) {
    if (!cond) fail(what);
  }
  Outcome& outcome() { return out_; }

 private:
  Outcome out_;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<double> cos_of_x(const MetricGraph& g) {
  std::vector<double> f(g.vertex_count());
  for (VertexId v = 0; v < f.size(); ++v) f[v] = std::cos(2.0 * M_PI * g.coords()[v].x);
  return f;
}

NodeFunction sin_profile(const MetricGraph& g, double amplitude, double frequency) {
  std::vector<double> u(g.vertex_count());
  for (VertexId v = 0; v < u.size(); ++v) u[v] = amplitude * std::sin(2.0 * M_PI * frequency * g.coords()[v].x);
  return NodeFunction(g, u);
}

double edge_slope(const MetricGraph& g, const NodeFunction& v) {
  double s = 0.0;
  for (const auto& e : g.edges()) s = std::max(s, std::abs(v[e.a] - v[e.b]) / e.length);
  return s;
}

// -- 1 --------------------------------------------------------------------------

void critical_value_exact(Report& r) {
  const auto g = build_interval(200, 1.0);
  const auto H = Hamiltonian::affine(g, 1.0, cos_of_x(g));
  const double c = critical_value(g, H);
  r.expect(std::abs(c - 1.0) <= std::numeric_limits<double>::epsilon(), "c = " + num(c));
  const auto A = aubry_set(g, H, c, kTolAubryAcc);
  r.expect(A == std::vector<VertexId>{0, 200}, "A has " + std::to_string(A.size()) + " vertices");
  r.note("c - 1 = " + num(c - 1.0) + ", A = {0, 200}");
}

// -- 2 --------------------------------------------------------------------------

void mane_potential_oracle(Report& r) {
  const auto g = build_interval(200, 1.0);
  const auto H = Hamiltonian::affine(g, 1.0, cos_of_x(g));
  const auto S = mane_potential(g, H, 1.0, 0);
  std::vector<double> xs(g.vertex_count());
  for (VertexId v = 0; v < xs.size(); ++v) xs[v] = g.coords()[v].x;
  const auto quad = oracle::trapezoid_cumulative(xs, [](double s) { return 1.0 - std::cos(2.0 * M_PI * s); });
  double worst = 0.0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) worst = std::max(worst, std::abs(S[v] - quad[v]));
  r.expect(worst <= kTolQuadrature, "quadrature gap " + num(worst));
  r.note("quadrature gap " + num(worst));

  std::size_t triples = 0;
  double excess = 0.0;
  for (const auto& h : {build_interval(50, 1.0), build_sierpinski(2)}) {
    const auto Hh = Hamiltonian::affine(h, 1.0, cos_of_x(h));
    const auto crit = critical_data(h, Hh);
    std::vector<NodeFunction> P;
    for (VertexId y = 0; y < h.vertex_count(); ++y) P.push_back(mane_potential(h, crit.sigma, y));
    for (VertexId x = 0; x < h.vertex_count(); ++x)
      for (VertexId y = 0; y < h.vertex_count(); ++y)
        for (VertexId z = 0; z < h.vertex_count(); ++z, ++triples)
          excess = std::max(excess, P[z][x] - P[y][x] - P[z][y]);
  }
  r.expect(excess <= kTolRounding, "triangle inequality off by " + num(excess));
  r.note(std::to_string(triples) + " triples, max excess " + num(excess));
}

// -- 3 --------------------------------------------------------------------------

void equi_lipschitz(Report& r) {
  const MetricGraph graphs[] = {build_interval(200, 1.0), build_circle(150, 1.0), build_sierpinski(3)};
  const char* names[] = {"interval", "circle", "sierpinski(3)"};
  double worst_ratio = 0.0;
  std::size_t solutions = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& g = graphs[i];
    const auto f = cos_of_x(g);
    const Hamiltonian hs[] = {Hamiltonian::affine(g, 1.0, f), Hamiltonian::power(g, 2.0, f),
                              Hamiltonian::power(g, 3.0, f)};
    for (const auto& H : hs) {
      const auto report = check_assumptions(g, H, 64);
      if (!report.L) {
        r.fail(std::string(names[i]) + ": no coercivity bound");
        continue;
      }
      const auto crit = critical_data(g, H);
      std::vector<NodeFunction> sols{stationary_solution(g, H).v};
      for (VertexId y : crit.aubry) sols.push_back(mane_potential(g, crit.sigma, y));
      for (const auto& v : sols) {
        const double ratio = edge_slope(g, v) / (2.0 * *report.L);
        worst_ratio = std::max(worst_ratio, ratio);
        ++solutions;
        if (ratio > 1.0) r.fail(std::string(names[i]) + ": slope " + num(ratio) + " x 2L");
      }
    }
  }
  r.note(std::to_string(solutions) + " solutions, max slope / 2L = " + num(worst_ratio));
}

// -- 4 --------------------------------------------------------------------------

void discrete_comparison(Report& r) {
  const auto g = build_sierpinski(2);
  const auto H = Hamiltonian::affine(g, 1.0, cos_of_x(g));
  std::mt19937_64 rng(2024);
  double worst_order = 0.0, worst_expansion = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const NodeFunction u0(g, oracle::random_field(rng, g.vertex_count(), -1.0, 1.0));
    const auto bump = oracle::random_field(rng, g.vertex_count(), 0.0, 1.0);
    std::vector<double> v(g.vertex_count());
    for (VertexId x = 0; x < v.size(); ++x) v[x] = u0[x] + bump[x];
    const NodeFunction v0(g, v);
    const auto a = solve(g, H, u0, 1.0);
    const auto b = solve(g, H, v0, 1.0);
    if (a.times != b.times) {
      r.fail("runs of pair " + std::to_string(pair) + " stored different times");
      return;
    }
    const double d0 = sup_distance(u0, v0);
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
      for (VertexId x = 0; x < g.vertex_count(); ++x)
        worst_order = std::max(worst_order, a.snapshots[k][x] - b.snapshots[k][x]);
      worst_expansion = std::max(worst_expansion, sup_distance(a.snapshots[k], b.snapshots[k]) - d0);
    }
  }
  r.expect(worst_order <= kTolOrder, "ordering broken by " + num(worst_order));
  r.expect(worst_expansion <= kTolOrder, "sup distance grew by " + num(worst_expansion));
  r.note("100 pairs, max(u - v) = " + num(worst_order) + ", max growth = " + num(worst_expansion));
}

// -- 5 --------------------------------------------------------------------------

void hopf_lax_agreement(Report& r) {
  const auto g = build_interval(400, 1.0);
  const auto H = Hamiltonian::affine(g, 1.0, std::vector<double>(g.vertex_count(), 0.0));
  const auto u0 = sin_profile(g, 0.3, 1.5);
  const double h = g.max_edge_length();
  double worst = 0.0;
  for (double t : {0.1, 0.2, 0.4}) {
    const auto tr = solve(g, H, u0, t);
    const NodeFunction exact(g, oracle::eikonal_hopf_lax(g, {u0.values().begin(), u0.values().end()}, t));
    const double gap = sup_distance(tr.snapshots.back(), exact);
    const double ratio = gap / (h + tr.dt);
    worst = std::max(worst, ratio);
    r.expect(gap <= kHopfLaxC * (h + tr.dt), "t = " + num(t) + ": gap " + num(gap));
  }
  r.expect(kHopfLaxC <= kHopfLaxCMax, "frozen C exceeds " + num(kHopfLaxCMax));
  r.note("measured gap / (h + dt) = " + num(worst) + " (frozen C = " + num(kHopfLaxC) + ")");
}

// -- 6 --------------------------------------------------------------------------

struct ConvergedRun {
  MetricGraph g;
  Hamiltonian H;
  CriticalData crit;
  EvolutionTrace trace;
  NodeFunction phi_minus;
  NodeFunction phi_inf;
  ConvergenceReport report;
  double tol;
};

constexpr double kTEnd = 3.0;

ConvergedRun converge(std::size_t segments, bool sine, double shift = 0.0) {
  auto g = build_interval(segments, 1.0);
  auto H = Hamiltonian::affine(g, 1.0, cos_of_x(g));
  auto crit = critical_data(g, H, kTolAubryAcc);
  const auto u0 = (sine ? sin_profile(g, 0.3, 1.5) : NodeFunction::constant(g, 0.0)).shifted(shift);
  auto trace = solve(g, H, u0, kTEnd);
  auto pm = phi_minus(trace, crit.c);
  auto pinf = phi_infinity(g, crit.sigma, pm, crit.aubry);
  const double tol = scheme_tolerance(g, trace.dt);
  auto rep = convergence_report(trace, crit.c, pinf, tol, crit.aubry);
  return {std::move(g), std::move(H), std::move(crit), std::move(trace), std::move(pm), std::move(pinf),
          std::move(rep), tol};
}

void large_time_convergence(Report& r) {
  for (bool sine : {false, true}) {
    const std::string name = sine ? "sin" : "zero";
    const auto coarse = converge(200, sine);
    const auto fine = converge(400, sine);
    // one stored step may raise the gap by at most spacing * |H(x, D-phi) - c|
    const auto res = stationary_residual(coarse.g, coarse.H, coarse.phi_inf, coarse.crit.c, coarse.crit.aubry);
    const double slack =
        coarse.trace.spacing() * std::max(res.max_sub_violation, res.max_super_violation) + kTolRounding;
    r.expect(gap_nonincreasing_after_peak(coarse.report, slack), name + ": gap rises after its maximum");
    r.expect(coarse.report.final_gap <= coarse.tol, name + ": final gap " + num(coarse.report.final_gap));
    r.expect(coarse.report.t_star.has_value(), name + ": gap never below tol");
    r.expect(std::abs(fine.trace.dt - 0.5 * coarse.trace.dt) <= 1e-3 * coarse.trace.dt,
             name + ": refined dt is not half");
    const double gain = coarse.report.final_gap / fine.report.final_gap;
    r.expect(gain >= kMinRefinementGain, name + ": refinement gain " + num(gain));
    r.note(name + ": gap " + num(coarse.report.final_gap) + " <= " + num(coarse.tol) + ", t* = " +
           num(coarse.report.t_star.value_or(NAN)) + ", gain " + num(gain));
  }
}

// -- 7 --------------------------------------------------------------------------

void profile_identities(Report& r) {
  for (bool sine : {false, true}) {
    const std::string name = sine ? "sin" : "zero";
    const auto run = converge(200, sine);
    const double tol_cmp = default_tol_cmp(run.phi_minus);
    double on_a = 0.0;
    for (VertexId a : run.crit.aubry) on_a = std::max(on_a, std::abs(run.phi_inf[a] - run.phi_minus[a]));
    r.expect(on_a <= tol_cmp, name + ": phi_inf - phi_minus on A = " + num(on_a));
    const auto res = stationary_residual(run.g, run.H, run.phi_inf, run.crit.c, run.crit.aubry);
    const double worst = std::max(res.max_sub_violation, res.max_super_violation);
    r.expect(worst <= run.tol, name + ": residual " + num(worst));

    double shift_err = 0.0;
    for (double k : {-2.5, 1.0, 10.0}) {
      const auto moved = converge(200, sine, k);
      for (VertexId x = 0; x < run.g.vertex_count(); ++x)
        shift_err = std::max(shift_err, std::abs(moved.phi_inf[x] - run.phi_inf[x] - k) / (1.0 + std::abs(k)));
    }
    r.expect(shift_err <= kTolShift, name + ": shift mismatch " + num(shift_err));
    r.note(name + ": residual " + num(worst) + ", shift error " + num(shift_err));
  }
}

// -- 8 --------------------------------------------------------------------------

void rescaling(Report& r) {
  for (bool sine : {false, true}) {
    const std::string name = sine ? "sin" : "zero";
    const auto run = converge(200, sine);
    if (!run.report.t_star) {
      r.fail(name + ": run never converged");
      continue;
    }
    // the forward difference cannot follow u_t across kinks still forming before t*
    const auto settled = run.trace.tail(*run.report.t_star);
    std::string line = name + " from t* = " + num(*run.report.t_star) + ":";
    for (double lambda : {0.5, 1.0, 2.0}) {
      const double res = rescale_check(run.g, settled, lambda, run.H, run.crit.c);
      r.expect(res <= run.tol, name + ": lambda " + num(lambda) + " residual " + num(res));
      line += " " + num(res);
    }
    const double unscaled = trace_residual(run.g, settled, run.H, run.crit.c);
    r.expect(rescale_check(run.g, settled, 1.0, run.H, run.crit.c) == unscaled, name + ": lambda 1 differs");
    line += ", whole run lambda 0.5: " + num(rescale_check(run.g, run.trace, 0.5, run.H, run.crit.c));
    r.note(line);
  }
}

// -- 9 --------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void fractal_run(Report& r) {
  const fs::path root = fs::temp_directory_path() / "wkam_acceptance";
  fs::remove_all(root);
  auto config = [&](const std::string& out) {
    nlohmann::json doc{{"schema", "wkam.experiment/1"},
                       {"space", {{"kind", "sierpinski"}, {"level", 5}}},
                       {"hamiltonian",
                        {{"family", "affine"},
                         {"a", 1.0},
                         {"potential", {{"profile", "cos"}, {"amplitude", 1.0}, {"frequency", 1.0}}}}},
                       {"initial", {{"profile", "sin"}, {"amplitude", 0.3}, {"frequency", 1.5}}},
                       {"t_end", 4.0},
                       {"seed", 7},
                       {"output", (root / out).string()}};
    return validate_config(doc, root);
  };
  const auto a = config("a"), b = config("b");
  if (!a.ok() || !b.ok()) {
    r.fail("config rejected");
    return;
  }
  const auto ra = run_experiment(*a.config);
  const auto rb = run_experiment(*b.config);
  r.expect(ra.summary["vertices"] == 366, "vertex count " + ra.summary["vertices"].dump());
  r.expect(ra.exit_code == 0, "first run exit " + std::to_string(ra.exit_code) + ": " + ra.message);
  r.expect(rb.exit_code == 0, "second run exit " + std::to_string(rb.exit_code) + ": " + rb.message);
  std::size_t compared = 0;
  for (const auto& f : ra.summary["files"]) {
    const std::string name = f.get<std::string>();
    ++compared;
    if (slurp(root / "a" / name) != slurp(root / "b" / name)) r.fail(name + " differs between runs");
  }
  auto sa = ra.summary, sb = rb.summary;
  sa["config"].erase("output");
  sb["config"].erase("output");
  r.expect(sa.dump() == sb.dump(), "summaries differ");
  r.note("366 vertices, exit " + std::to_string(ra.exit_code) + ", final gap " +
         num(ra.summary.value("final_gap", NAN)) + ", " + std::to_string(compared + 1) + " files identical");
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<void(Report&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "critical value exactness", 1.0, critical_value_exact},
      {2, "potential vs trapezoid oracle, triangle inequality", 5.0, mane_potential_oracle},
      {3, "equi-Lipschitz bound 2L", 60.0, equi_lipschitz},
      {4, "discrete comparison and non-expansiveness", 60.0, discrete_comparison},
      {5, "Hopf-Lax agreement", 10.0, hopf_lax_agreement},
      {6, "large-time convergence", 60.0, large_time_convergence},
      {7, "asymptotic profile identities", 60.0, profile_identities},
      {8, "rescaling diagnostic", 60.0, rescaling},
      {9, "fractal pipeline run", 120.0, fractal_run},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Report report;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(report);
    } catch (const std::exception& e) {
      report.fail(std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) report.fail("took " + num(secs) + " s, budget " + num(c.budget_s) + " s");
    const auto& out = report.outcome();
    std::printf("[%s] %d %s (%.2f s) %s\n", out.ok ? "PASS" : "FAIL", c.id, c.title, secs, out.detail.c_str());
    failed += out.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
