#include "bsl/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "bsl/io.hpp"

namespace bsl {

UpdateRule rule_from_name(const std::string& name) {
  switch (parse_rule(name)) {
    case RuleKind::Bayesian: return UpdateRule::bayesian();
    case RuleKind::Majority: return UpdateRule::majority();
    case RuleKind::CustomKernel: break;
  }
  throw ConfigError("rule '" + name + "' cannot be selected by name");
}

CurveResult regular_tree_errors(const CurveRequest& request) {
  if (request.rounds < 0) throw ConfigError("rounds must be non-negative");
  if (request.given_state &&
      (*request.given_state < 0 || *request.given_state >= request.model.num_states()))
    throw ConfigError("conditioning state out of range");
  const auto start = std::chrono::steady_clock::now();
  auto engine = EnsembleEngine::regular(request.model, request.rule, request.d, request.engine);
  engine.advance_to(request.rounds);
  CurveResult out;
  for (int t = 0; t <= request.rounds; ++t) {
    const ErrorReport rep = engine.error_report(t);
    out.errors.push_back(request.given_state
                             ? rep.error_given_state[static_cast<std::size_t>(*request.given_state)]
                             : rep.error);
    out.max_mass_deviation = std::max(out.max_mass_deviation, rep.max_mass_deviation);
  }
  out.steps = engine.steps();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string table_csv(const std::string& rule, int d, double noise,
                      const std::vector<double>& errors) {
  std::ostringstream out;
  out << "rule,d,noise,round,error_prob,unreliable\n";
  for (std::size_t t = 0; t < errors.size(); ++t)
    out << rule << ',' << d << ',' << format_double(noise) << ',' << t << ','
        << format_double(errors[t]) << ',' << (errors[t] < kUnreliableBelow ? 1 : 0) << '\n';
  return out.str();
}

std::string curve_csv(const std::string& rule, int d, double noise,
                      const std::vector<double>& errors, bool header) {
  std::ostringstream out;
  if (header) out << "rule,d,noise,round,error_prob,log_neg_log,slope\n";
  double prev = 0.0;
  for (std::size_t t = 0; t < errors.size(); ++t) {
    const double p = errors[t];
    const bool defined = p > 0.0 && p < 1.0;
    const double lnl = defined ? std::log(-std::log(p)) : std::nan("");
    out << rule << ',' << d << ',' << format_double(noise) << ',' << t << ',' << format_double(p)
        << ',' << (defined ? format_double(lnl) : "") << ',';
    if (t > 0 && defined && !std::isnan(prev)) out << format_double(lnl - prev);
    out << '\n';
    prev = lnl;
  }
  return out.str();
}

BoundSequence bound_sequence(BoundVariant variant, int d, double delta0, int rounds) {
  if (rounds < 0) throw ConfigError("rounds must be non-negative");
  switch (variant) {
    case BoundVariant::Directed: return directed_bound_sequence(d, delta0, rounds);
    case BoundVariant::Undirected: return undirected_bound_sequence(d, delta0, rounds);
    case BoundVariant::Chernoff: return chernoff_envelope(d, delta0, rounds);
  }
  throw ConfigError("unknown bound variant");
}

std::string bounds_csv(const BoundSequence& seq) {
  std::ostringstream out;
  out << "variant,d,delta0,t,value\n";
  for (std::size_t t = 0; t < seq.values.size(); ++t)
    out << to_string(seq.variant) << ',' << seq.d << ',' << format_double(seq.delta0) << ',' << t
        << ',' << format_double(seq.values[t]) << '\n';
  return out.str();
}

ActionKernel kernel_from_table(const TrajectoryTable& table, Signal x,
                               std::span<const Code> observed, Code own) {
  const int t = table.horizon();
  const Radix actions(table.action_alphabet(), t + 1);
  ActionKernel k(static_cast<std::size_t>(table.action_alphabet()), 0.0);
  double total = 0.0;
  table.for_each(table.index(x, observed), [&](Code c, double p) {
    if (actions.prefix(c, t) != own) return;
    k[static_cast<std::size_t>(actions.digit(c, t))] += p;
    total += p;
  });
  if (!(total > 0.0)) return {};
  for (double& v : k) v /= total;
  return k;
}

bool VerifyReport::passed() const {
  return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.passed; });
}

std::string VerifyReport::text() const {
  std::ostringstream out;
  for (const auto& l : lines) {
    out << (l.passed ? "PASS " : "FAIL ") << l.name << "  dev=" << format_double(l.value)
        << " tol=" << format_double(l.tolerance);
    if (!l.note.empty()) out << "  " << l.note;
    out << '\n';
  }
  out << (passed() ? "verify: pass" : "verify: FAIL") << '\n';
  return out.str();
}

namespace {

struct NamedGraph {
  std::string name;
  Graph graph;
};

std::vector<NamedGraph> verify_family(int max_nodes) {
  std::vector<NamedGraph> out;
  for (int n = 2; n <= std::min(6, max_nodes); ++n)
    out.push_back({"path" + std::to_string(n), path_graph(n)});
  for (int n = 4; n <= std::min(5, max_nodes); ++n)
    out.push_back({"star" + std::to_string(n), star_graph(n - 1)});
  if (max_nodes >= 7) out.push_back({"binary2", binary_tree(2)});
  return out;
}

}  // namespace

VerifyReport verify_against_oracle(int max_nodes, int max_t, double tolerance, double noise) {
  if (max_t < 0) throw ConfigError("max_t must be non-negative");
  const AgentModel model = AgentModel::binary(noise);
  VerifyReport report;
  for (const auto& [name, graph] : verify_family(max_nodes)) {
    for (const std::string rule_name : {"bayesian", "majority"}) {
      const UpdateRule rule = rule_from_name(rule_name);
      GraphEngine engine(graph, model, rule);
      engine.advance_to(max_t);
      const Oracle oracle(graph, model, rule, max_t);
      double kernel_dev = 0.0;
      double error_dev = 0.0;
      std::size_t keys = 0;
      bool missing = false;
      for (int v = 0; v < graph.size(); ++v)
        for (int t = 0; t <= max_t; ++t) {
          error_dev = std::max(error_dev, std::abs(engine.error_probability(v, t) -
                                                   oracle.error_probability(v, t)));
          const TrajectoryTable& table = engine.decision(v, t);
          for (const auto& [key, kernel] : oracle.decisions(v, t)) {
            ++keys;
            const std::span<const Code> observed(key.data() + 1, key.size() - 2);
            const ActionKernel mine =
                kernel_from_table(table, static_cast<Signal>(key[0]), observed, key.back());
            if (mine.size() != kernel.size()) {
              missing = true;
              continue;
            }
            for (std::size_t a = 0; a < kernel.size(); ++a)
              kernel_dev = std::max(kernel_dev, std::abs(mine[a] - kernel[a]));
          }
        }
      const std::string tag = name + "/" + rule_name;
      report.lines.push_back({tag + " kernels", kernel_dev, tolerance,
                              !missing && kernel_dev <= tolerance,
                              std::to_string(keys) + " keys" + (missing ? ", unreachable own trajectory" : "")});
      report.lines.push_back({tag + " errors", error_dev, tolerance, error_dev <= tolerance, ""});
    }
  }
  return report;
}

namespace {

int digits_of(std::uint64_t count, int base) {
  int k = 0;
  for (std::uint64_t c = 1; c < count; c *= static_cast<std::uint64_t>(base)) ++k;
  return k;
}

double flip_deviation(const CavityTable& q) {
  const int a = q.action_alphabet();
  const int b = q.obs_alphabet();
  const Radix sr(b, 32);
  const Radix tr(a, 32);
  const int sd = digits_of(q.sigma_count(), b);
  const int td = digits_of(q.tau_count(), a);
  double dev = 0.0;
  for (State s = 0; s < 2; ++s)
    for (Code tau = 0; tau < q.tau_count(); ++tau)
      for (Code sigma = 0; sigma < q.sigma_count(); ++sigma)
        dev = std::max(dev, std::abs(q(sigma, tau, s) -
                                     q(flip_code(sigma, sd, sr), flip_code(tau, td, tr), 1 - s)));
  return dev;
}

}  // namespace

VerifyReport invariant_suite(const std::vector<int>& degrees, const std::vector<double>& noises,
                             int max_t) {
  VerifyReport report;
  for (int d : degrees)
    for (double noise : noises)
      for (const std::string rule_name : {"bayesian", "majority"}) {
        const AgentModel model = AgentModel::binary(noise);
        EngineOptions opts;
        auto engine = EnsembleEngine::regular(model, rule_from_name(rule_name), d, opts);
        engine.advance_to(max_t);
        std::ostringstream tag;
        tag << rule_name << " d=" << d << " noise=" << noise;
        double drift = 0.0, marg = 0.0, norm = 0.0, flip = 0.0, mass = 0.0, state_gap = 0.0;
        std::ostringstream drifts;
        for (const StepReport& s : engine.steps()) {
          drift = std::max(drift, s.normalization_drift);
          marg = std::max(marg, s.marginalization_error);
          drifts << (drifts.tellp() > 0 ? " " : "") << format_double(s.normalization_drift);
        }
        for (int h = 0; h < engine.horizon(); ++h) {
          norm = std::max(norm, engine.message(h).normalization_error());
          flip = std::max(flip, flip_deviation(engine.message(h)));
        }
        double rise = 0.0;
        for (int t = 0; t <= max_t; ++t) {
          const ErrorReport rep = engine.error_report(t);
          mass = std::max(mass, rep.max_mass_deviation);
          state_gap = std::max(state_gap, std::abs(rep.error_given_state[0] - rep.error_given_state[1]));
          if (t > 0) rise = std::max(rise, rep.error - engine.error_report(t - 1).error);
        }
        const std::string base = tag.str();
        report.lines.push_back({base + " normalization", std::max(norm, drift), 1e-12,
                                std::max(norm, drift) <= 1e-12, "pre-renormalization drift: " + drifts.str()});
        report.lines.push_back({base + " marginalization", marg, 1e-12, marg <= 1e-12, ""});
        report.lines.push_back({base + " coupling mass", mass, 1e-9, mass <= 1e-9, ""});
        report.lines.push_back({base + " flip symmetry", std::max(flip, state_gap), 1e-12,
                                std::max(flip, state_gap) <= 1e-12, ""});
        if (rule_name == "bayesian")
          report.lines.push_back({base + " monotone", std::max(0.0, rise), 0.0, rise <= 0.0, ""});
      }
  return report;
}

std::vector<ConjectureRow> default_conjecture_configs() {
  return {{5, 0.15, 4}, {3, 0.15, 7}, {3, 0.3, 7}, {5, 0.3, 4}, {7, 0.3, 3}};
}

ConjectureResult run_conjecture(const ConjectureRow& row, const EngineOptions& engine) {
  CurveRequest req;
  req.model = AgentModel::binary(row.noise);
  req.d = row.d;
  req.rounds = row.rounds;
  req.engine = engine;
  req.rule = UpdateRule::bayesian();
  ConjectureResult out{row, regular_tree_errors(req).errors, {}, {}};
  req.rule = UpdateRule::majority();
  out.majority = regular_tree_errors(req).errors;
  out.report = conjecture_check(out.bayes, out.majority);
  return out;
}

std::string conjecture_csv(const std::vector<ConjectureResult>& results) {
  std::ostringstream out;
  out << "d,noise,round,bayesian,majority,holds\n";
  for (const auto& r : results)
    for (std::size_t t = 0; t < r.bayes.size(); ++t) {
      const bool bad = std::find(r.report.violations.begin(), r.report.violations.end(),
                                 static_cast<int>(t)) != r.report.violations.end();
      out << r.config.d << ',' << format_double(r.config.noise) << ',' << t << ','
          << format_double(r.bayes[t]) << ',' << format_double(r.majority[t]) << ','
          << (bad ? 0 : 1) << '\n';
    }
  return out.str();
}

}  // namespace bsl
