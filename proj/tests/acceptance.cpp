// One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bsl/commands.hpp"
#include "bsl/io.hpp"
#include "bsl/sim.hpp"

using namespace bsl;

namespace {

constexpr double kRelTol = 0.10;        // two significant figures
constexpr double kOracleTol = 1e-10;
constexpr double kMixtureTol = 1e-12;
constexpr double kThresholdTol = 1e-12;
constexpr double kSigmas = 4.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("criterion %d %s: %s%s%s\n", id, ok ? "PASS" : "FAIL", title.c_str(),
              detail.empty() ? "" : " | ", detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::vector<double> curve(RuleKind kind, int d, double noise, int rounds) {
  CurveRequest req;
  req.model = AgentModel::binary(noise);
  req.rule = kind == RuleKind::Bayesian ? UpdateRule::bayesian() : UpdateRule::majority();
  req.d = d;
  req.rounds = rounds;
  return regular_tree_errors(req).errors;
}

// Appends every entry off by more than kRelTol to `misses`.
bool match(const std::string& label, const std::vector<double>& got,
           const std::vector<double>& want, std::ostringstream& misses) {
  bool ok = got.size() == want.size();
  for (std::size_t t = 0; ok && t < want.size(); ++t) {
    const double rel = std::abs(got[t] - want[t]) / want[t];
    if (rel > kRelTol) {
      ok = false;
      misses << label << " round " << t << ": " << format_double(got[t]) << " vs "
             << want[t] << " (rel " << rel << "); ";
    }
  }
  return ok;
}

void timed(const std::string& what, double limit, double secs, bool& ok, std::ostringstream& out) {
  out << what << " " << secs << "s (limit " << limit << "s)";
  if (secs > limit) ok = false;
}

void criterion_tables(int id, const std::string& title, double limit,
                      const std::vector<std::tuple<std::string, RuleKind, int, double,
                                                   std::vector<double>>>& columns,
                      bool slopes) {
  const auto t0 = Clock::now();
  std::ostringstream misses;
  bool ok = true;
  bool doubly = true;
  for (const auto& [label, kind, d, noise, want] : columns) {
    const auto got = curve(kind, d, noise, static_cast<int>(want.size()) - 1);
    ok = match(label, got, want, misses) && ok;
    if (slopes) doubly = doubling_slope(got).doubly_exponential && doubly;
  }
  if (slopes && !doubly) {
    ok = false;
    misses << "doubling_slope did not flag every sequence; ";
  }
  timed("runtime", limit, seconds_since(t0), ok, misses);
  report(id, title, ok, misses.str());
}

}  // namespace

int main() {
  const std::vector<double> t1_bayes{0.15, 2.7e-2, 7.6e-4, 2.8e-7, 1.4e-12};
  const std::vector<double> t1_major{0.15, 2.7e-2, 1.7e-3, 8.4e-6, 2.5e-10};
  const std::vector<double> t2_bayes{0.15, 6.1e-2, 1.5e-2, 3.0e-3, 3.4e-4, 2.7e-5, 2.2e-6, 1.4e-7};
  const std::vector<double> t2_major{0.15, 6.1e-2, 3.0e-2, 1.6e-2, 9.2e-3, 5.5e-3, 3.4e-3, 3.4e-3};
  const std::vector<double> t4_d3{0.30, 0.22, 0.13, 7.8e-2, 3.8e-2, 1.7e-2, 5.7e-3, 1.5e-3};
  const std::vector<double> t4_d5{0.30, 0.16, 5.1e-2, 4.1e-3, 1.6e-5};
  const std::vector<double> t4_d7{0.30, 0.13, 1.3e-2, 4.4e-6};

  criterion_tables(1, "d=5 noise=0.15 table", 300,
                   {{"bayesian", RuleKind::Bayesian, 5, 0.15, t1_bayes},
                    {"majority", RuleKind::Majority, 5, 0.15, t1_major}},
                   false);
  criterion_tables(2, "d=3 noise=0.15 table", 120,
                   {{"bayesian", RuleKind::Bayesian, 3, 0.15, t2_bayes},
                    {"majority", RuleKind::Majority, 3, 0.15, t2_major}},
                   false);
  criterion_tables(3, "noise=0.3 decay curves", 300,
                   {{"d=3", RuleKind::Bayesian, 3, 0.3, t4_d3},
                    {"d=5", RuleKind::Bayesian, 5, 0.3, t4_d5},
                    {"d=7", RuleKind::Bayesian, 7, 0.3, t4_d7}},
                   true);

  {
    const auto t0 = Clock::now();
    const VerifyReport rep = verify_against_oracle(8, 3, kOracleTol);
    std::ostringstream out;
    bool ok = rep.passed();
    double worst = 0.0;
    for (const auto& l : rep.lines) {
      worst = std::max(worst, l.value);
      if (!l.passed) out << l.name << " dev " << l.value << "; ";
    }
    out << rep.lines.size() << " checks, worst deviation " << worst << ", ";
    timed("runtime", 120, seconds_since(t0), ok, out);
    report(4, "engine equals brute force on small trees", ok, out.str());
  }

  {
    const VerifyReport rep = invariant_suite({3, 5}, {0.15, 0.3}, 4);
    std::ostringstream out;
    for (const auto& l : rep.lines)
      if (!l.passed) out << l.name << " dev " << l.value << "; ";
    out << rep.lines.size() << " checks";
    report(5, "cavity invariants", rep.passed(), out.str());
  }

  {
    const auto maj = curve(RuleKind::Majority, 5, 0.15, 4);
    const auto bound = undirected_bound_sequence(5, 0.15, 4);
    bool ok = true;
    std::ostringstream out;
    for (int t = 0; t <= 4; ++t)
      if (maj[static_cast<std::size_t>(t)] > bound.values[static_cast<std::size_t>(t)]) {
        ok = false;
        out << "round " << t << " exceeds the bound; ";
      }
    const double gap = std::abs(noise_threshold(5) - std::pow(8.0 * std::numbers::e / 3.0, -3.0));
    if (gap > kThresholdTol) ok = false;
    out << "threshold gap " << gap;
    report(6, "majority error under the undirected bound", ok, out.str());
  }

  {
    bool ok = true;
    std::ostringstream out;
    for (const auto& row : default_conjecture_configs()) {
      const ConjectureResult r = run_conjecture(row);
      if (!r.report.holds) {
        ok = false;
        out << "d=" << row.d << " noise=" << row.noise << " violated at " << r.report.violations.size()
            << " rounds; ";
      }
    }
    out << default_conjecture_configs().size() << " configurations";
    report(7, "Bayesian no worse than majority", ok, out.str());
  }

  {
    const auto t0 = Clock::now();
    const AgentModel model = AgentModel::binary(0.15);
    const Graph g = regular_tree(5, 5);
    GraphEngine engine(g, model, UpdateRule::bayesian());
    engine.advance_to(2);
    SimConfig cfg{2, 1'000'000, 1, 1, {0}};
    const RunResult r = simulate(g, model, UpdateRule::bayesian(), tables_from(engine), cfg);
    const double listed[3] = {0.15, 2.7e-2, 7.6e-4};
    bool ok = true;
    std::ostringstream out;
    for (int t = 0; t <= 2; ++t) {
      const double exact = engine.error_probability(0, t);
      const double z_exact = (r.rate(0, t) - exact) / r.standard_error(0, t, exact);
      const double z_listed = (r.rate(0, t) - listed[t]) / r.standard_error(0, t, listed[t]);
      if (std::abs(z_exact) > kSigmas || std::abs(z_listed) > kSigmas) ok = false;
      out << "t=" << t << " rate " << r.rate(0, t) << " z " << z_exact << " (vs listed " << z_listed
          << "); ";
    }
    timed("runtime", 300, seconds_since(t0), ok, out);
    report(8, "Monte Carlo on the depth-5 tree", ok, out.str());
  }

  {
    bool ok = true;
    std::ostringstream out;
    const AgentModel model = AgentModel::binary(0.15);

    EnsembleEngine full(model, UpdateRule::bayesian(), DegreeDistribution::single(5), 1.0);
    full.advance_to(2);
    const double table1_round2 = curve(RuleKind::Bayesian, 5, 0.15, 2)[2];
    if (full.error_probability(2) != table1_round2) ok = false;
    out << "p=1 round 2 diff " << std::abs(full.error_probability(2) - table1_round2) << "; ";

    // degenerate mixture against the finite-tree recursion
    EnsembleEngine mix(model, UpdateRule::bayesian(), DegreeDistribution({3, 5}, {0.0, 1.0}));
    mix.advance_to(3);
    GraphEngine tree(regular_tree(5, 4), model, UpdateRule::bayesian());
    tree.advance_to(3);
    double gap = 0.0;
    for (int t = 0; t <= 3; ++t)
      gap = std::max(gap, std::abs(mix.error_probability(t) - tree.error_probability(0, t)));
    if (gap > kMixtureTol) ok = false;
    out << "degenerate mixture gap " << gap << "; ";

    const Graph tri(3, {{0, 1}, {1, 2}, {0, 2}}, {}, {1});
    GraphEngine hub(tri, model, UpdateRule::bayesian());
    hub.advance_to(3);
    const Oracle oracle(tri, model, UpdateRule::bayesian(), 3);
    double worst = 0.0;
    for (int v = 0; v < 3; ++v)
      for (int t = 1; t <= 3; ++t)
        for (const auto& [key, post] : oracle.posteriors(v, t)) {
          const std::span<const Code> obs(key.data() + 1, key.size() - 2);
          const auto mine = hub.posterior(v, static_cast<Signal>(key[0]), obs, t);
          for (std::size_t s = 0; s < 2; ++s) worst = std::max(worst, std::abs(mine[s] - post[s]));
        }
    if (worst > kOracleTol) ok = false;
    out << "triangle posterior gap " << worst;
    report(9, "extensions", ok, out.str());
  }

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
