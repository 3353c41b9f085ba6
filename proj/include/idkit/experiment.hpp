#pragma once
// Experiment configs, dispatch to the library, and analytic-versus-oracle
// verification runs. Used by the command-line tool.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "idkit/bayes.hpp"
#include "idkit/bit_source.hpp"
#include "idkit/bitstring.hpp"
#include "idkit/config_schema.hpp"
#include "idkit/errors.hpp"
#include "idkit/experiment_schema.hpp"
#include "idkit/format.hpp"
#include "idkit/identification.hpp"
#include "idkit/info_measures.hpp"
#include "idkit/process_io.hpp"
#include "idkit/process_spec.hpp"
#include "idkit/rational.hpp"
#include "idkit/sample_complexity.hpp"
#include "idkit/sampling.hpp"
#include "idkit/sc_distributions.hpp"
#include "idkit/sequence_measures.hpp"
#include "idkit/typical_sets.hpp"

namespace idkit {

inline constexpr const char* kVersion = "0.1.0";

/// Config rejected before any computation; `path` points into the config.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& out) const {
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

namespace detail {
inline std::string cell(double v) { return format_double(v); }
inline std::string cell(std::uint64_t v) { return std::to_string(v); }
inline std::string cell(const std::string& v) { return v; }
inline std::string cell(const char* v) { return v; }

template <class... T>
std::vector<std::string> row(const T&... v) {
  return {cell(v)...};
}

// JSON number that survives infinities (JSON has none).
inline nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}
}  // namespace detail

struct ExperimentConfig {
  nlohmann::json raw;
  std::string kind;  // empty for verification configs
  std::string pair;  // verification pair, empty for experiments
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::optional<double> tolerance;
  std::string out_path;
  std::string format = "json";
  nlohmann::json params = nlohmann::json::object();

  bool is_verification() const noexcept { return !pair.empty(); }
};

inline const nlohmann::json& experiment_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(kExperimentSchema);
  return schema;
}

inline std::string emit_schema() { return kExperimentSchema; }

/// Validates against the experiment schema and extracts the common fields.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  static const SchemaValidator validator(experiment_schema());
  const auto violations = validator.validate(j);
  if (!violations.empty()) throw ValidationError(violations.front().path, violations.front().message);
  ExperimentConfig c;
  c.raw = j;
  c.kind = j.value("kind", std::string{});
  c.pair = j.value("pair", std::string{});
  c.seed = j.value("seed", std::uint64_t{0});
  c.threads = j.value("threads", 1u);
  if (j.contains("tolerance")) c.tolerance = j["tolerance"].get<double>();
  if (j.contains("output")) {
    c.out_path = j["output"].value("path", std::string{});
    c.format = j["output"].value("format", std::string{"json"});
  }
  if (j.contains("params")) c.params = j["params"];
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("", std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

struct RunOutput {
  nlohmann::json result;
  Table table;
  bool passed = true;  // verification outcome; always true for experiments
};

namespace detail {

// Library errors raised while turning params into objects are config errors.
template <class F>
auto build(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const RefusalError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(path, e.what());
  }
}

inline std::string to_bits_string(const Sequence& s, std::size_t alphabet) {
  std::string out;
  if (alphabet <= 10) {
    for (Symbol x : s) out.push_back(static_cast<char>('0' + x));
    return out;
  }
  for (std::size_t k = 0; k < s.size(); ++k) out += (k ? " " : "") + std::to_string(s[k]);
  return out;
}

inline std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? " " : "") + std::to_string(v[k]);
  return out;
}

inline RunOutput run_identify(const ExperimentConfig& c) {
  const auto& p = c.params;
  std::vector<BitString> members;
  for (std::size_t k = 0; k < p["set"].size(); ++k)
    members.push_back(build("/params/set/" + std::to_string(k), [&] { return BitString::from_string(p["set"][k].get<std::string>()); }));
  const auto set = build("/params/set", [&] {
    return p.value("sorted", false) ? SortedHypothesisSet::from_sorted(members) : SortedHypothesisSet::sort(members);
  });
  const BitString query = build("/params/query", [&] { return BitString::from_string(p["query"].get<std::string>()); });
  const Resolution r = build("/params/r", [&] { return Resolution(p.value("r", 0.0)); });
  const std::string algorithm = p.value("algorithm", std::string{"all"});

  RunOutput out;
  out.table.header = {"algorithm", "status", "h", "i", "partial_subset"};
  nlohmann::json members_json = nlohmann::json::array();
  for (const auto& m : set) members_json.push_back(m.to_string());
  out.result["members"] = members_json;
  out.result["query"] = query.to_string();
  auto add = [&](const std::string& name, const IdOutcome& o) {
    out.result["outcomes"][name] = to_json(o);
    out.table.rows.push_back(row(name, std::string(to_string(o.status)), o.h, o.i, join(o.partial_subset)));
  };
  if (p.contains("start") || p.contains("window")) {
    const std::size_t start = p.value("start", std::size_t{1});
    const std::size_t window = p.value("window", query.length() + 1 - start);
    const auto res = build("/params/window", [&] { return substring_identify(set, query, start, window, r); });
    nlohmann::json slices = nlohmann::json::array();
    for (const auto& m : res.slices) slices.push_back(m.to_string());
    out.result["slices"] = slices;
    add("substring", res.outcome);
    return out;
  }
  const ObservedQuery q = ObservedQuery::of(query, r);
  std::vector<IdOutcome> all;
  auto wanted = [&](const char* name) { return algorithm == name || algorithm == "all"; };
  if (wanted("sorted")) {
    all.push_back(identify_sorted(set, q));
    add("sorted", all.back());
  }
  if (wanted("depth-first")) {
    all.push_back(identify_depth_first(set.members(), q));
    add("depth-first", all.back());
  }
  if (wanted("tree")) {
    all.push_back(identify_tree(build_context_tree(set), q));
    add("tree", all.back());
  }
  if (all.size() > 1) {
    bool agree = true;
    for (const auto& o : all) agree = agree && o.status == all.front().status && o.partial_subset == all.front().partial_subset;
    out.result["agree"] = agree;
  }
  return out;
}

inline RunOutput run_scdist(const ExperimentConfig& c) {
  const auto& p = c.params;
  RunOutput out;
  out.table.header = {"i", "pmf", "cdf"};
  std::vector<SCRow> rows;
  if (p["model"] == "pairwise") {
    const auto L = p["L"].get<std::uint64_t>();
    const auto K = p["K"].get<std::uint64_t>();
    const PairwiseSCDist d = build("/params", [&] { return PairwiseSCDist(L, K); });
    rows = sc_table(d);
    out.result = {{"model", "pairwise"}, {"L", L}, {"K", K}};
    if (L <= PairwiseSCDist::kExactLimit) {
      nlohmann::json exact = nlohmann::json::array();
      for (const auto& rw : rows) exact.push_back({{"i", rw.i}, {"pmf", to_string(d.pmf_exact(rw.i))}, {"cdf", to_string(d.cdf_exact(rw.i))}});
      out.result["exact"] = exact;
    }
    out.result["mean"] = dist_moments(d, 1);
  } else {
    const double prob = p["p"].get<double>();
    const GeometricSCDist d = build("/params/p", [&] { return GeometricSCDist(prob); });
    rows = sc_table(d, p.value("tail", 1e-12), p.value("max_rows", std::uint64_t{10'000}));
    out.result = {{"model", "geometric"}, {"p", prob}, {"mean", d.moment(1)}};
  }
  nlohmann::json table = nlohmann::json::array();
  for (const auto& rw : rows) {
    table.push_back({rw.i, rw.pmf, rw.cdf});
    out.table.rows.push_back(row(rw.i, rw.pmf, rw.cdf));
  }
  out.result["rows"] = table;
  return out;
}

inline ProbVector symbol_marginal(const MarkovSpec& m) {
  const ProbVector& w = m.stationary_distribution();
  std::vector<double> v(m.alphabet_size(), 0.0);
  for (std::size_t c = 0; c < m.num_contexts(); ++c)
    for (std::size_t x = 0; x < v.size(); ++x) v[x] += w[c] * m.step(c)[x];
  double total = 0.0;
  for (double x : v) total += x;
  for (double& x : v) x = std::min(1.0, x / total);
  return ProbVector(std::move(v));
}

inline RunOutput run_sample(const ExperimentConfig& c) {
  const auto& p = c.params;
  const MarkovSpec spec = build("/params/process", [&] { return process_from_json(p["process"]); });
  const std::size_t t = p["t"].get<std::size_t>();
  const std::uint64_t samples = p.value("samples", std::uint64_t{1});
  const bool emit = p.value("emit_sequences", false);
  std::vector<std::uint64_t> counts(spec.alphabet_size(), 0);
  EmpiricalProcess empirical(spec.alphabet_size(), spec.memory());
  std::uint64_t bits = 0;
  nlohmann::json sequences = nlohmann::json::array();
  for (std::uint64_t s = 0; s < samples; ++s) {
    BitSource src(derive_seed(c.seed, s));
    std::size_t ctx = 0;
    if (spec.num_contexts() > 1) ctx = sample_discrete(IidSpec(spec.initial_distribution()), src).symbol;
    const std::uint64_t before = src.consumed();
    Sequence seq;
    for (std::size_t k = 0; k < t; ++k) {
      const Symbol x = sample_discrete(spec.step(ctx), src).symbol;
      empirical.record(ctx, x);
      ctx = spec.shift(ctx, x);
      ++counts[x];
      if (emit) seq.push_back(x);
    }
    bits += src.consumed() - before;
    if (emit) sequences.push_back(to_bits_string(seq, spec.alphabet_size()));
  }
  const double n = static_cast<double>(samples) * static_cast<double>(t);
  const ProbVector marginal = spec.is_ergodic() ? symbol_marginal(spec) : ProbVector::uniform(spec.alphabet_size());
  RunOutput out;
  out.table.header = {"symbol", "count", "frequency", "probability"};
  std::vector<double> freq;
  for (std::size_t x = 0; x < counts.size(); ++x) {
    freq.push_back(static_cast<double>(counts[x]) / n);
    out.table.rows.push_back(row(static_cast<std::uint64_t>(x), counts[x], freq.back(), marginal[x]));
  }
  double tv = 0.0;
  for (std::size_t x = 0; x < freq.size(); ++x) tv += std::abs(freq[x] - marginal[x]);
  out.result = {{"samples", samples},
                {"t", t},
                {"frequencies", freq},
                {"total_variation", tv / 2.0},
                {"mean_bits_per_symbol", static_cast<double>(bits) / n},
                {"entropy_rate", entropy_rate(spec)},
                {"empirical_divergence", detail::number(empirical_divergence(empirical, spec))}};
  if (emit) out.result["sequences"] = sequences;
  return out;
}

inline RunOutput run_spread(const ExperimentConfig& c) {
  const auto& p = c.params;
  const BitString message = build("/params/message", [&] { return BitString::from_string(p["message"].get<std::string>()); });
  const SpreadCode code = build("/params", [&] {
    return SpreadCode(message.length(), IidSpec(detail::prob_vector_from_json(p["zero"], "zero")),
                      IidSpec(detail::prob_vector_from_json(p["one"], "one")));
  });
  const std::size_t t = p["t"].get<std::size_t>();
  const std::uint64_t trials = p.value("trials", std::uint64_t{1});
  RunOutput out;
  out.table.header = {"trial", "decoded", "bit_errors", "undetermined", "posterior_error"};
  std::uint64_t message_errors = 0, bit_errors = 0;
  double posterior_error = 0.0;
  for (std::uint64_t k = 0; k < trials; ++k) {
    BitSource src(derive_seed(c.seed, k));
    const Sequence obs = spread_encode(code, message, t, src);
    const SpreadDecoding dec = spread_decode(obs, message.length(), code);
    std::uint64_t wrong = 0, undetermined = 0;
    for (std::size_t m = 0; m < message.length(); ++m) {
      if (!dec.bits[m]) ++undetermined;
      else if (*dec.bits[m] != message[m]) ++wrong;
    }
    message_errors += (wrong + undetermined) > 0;
    bit_errors += wrong;
    posterior_error += dec.message_error_probability();
    out.table.rows.push_back(row(k, dec.decoded().to_string(), wrong, undetermined, dec.message_error_probability()));
  }
  const double n = static_cast<double>(trials);
  out.result = {{"message", message.to_string()},
                {"t", t},
                {"trials", trials},
                {"message_error_rate", static_cast<double>(message_errors) / n},
                {"bit_error_rate", static_cast<double>(bit_errors) / (n * static_cast<double>(message.length()))},
                {"mean_posterior_error", posterior_error / n}};
  return out;
}

struct IdentificationSetup {
  MarkovSpec ideal;
  HypothesisSet set;
  ProbVector prior;
  StoppingConfig cfg;
  MCOptions mc;
};

inline IdentificationSetup identification_setup(const ExperimentConfig& c) {
  const auto& p = c.params;
  const MarkovSpec ideal = build("/params/ideal", [&] { return process_from_json(p["ideal"]); });
  std::vector<MarkovSpec> members;
  for (std::size_t k = 0; k < p["hypotheses"].size(); ++k)
    members.push_back(build("/params/hypotheses/" + std::to_string(k), [&] { return process_from_json(p["hypotheses"][k]); }));
  std::vector<std::string> labels = p.value("labels", std::vector<std::string>{});
  HypothesisSet set = build("/params/hypotheses", [&] { return HypothesisSet(members, labels); });
  if (ideal.alphabet_size() != set.alphabet_size()) throw ValidationError("/params/ideal", "alphabet differs from the hypotheses'");
  ProbVector prior = ProbVector::uniform(set.size());
  if (p.contains("prior")) {
    prior = build("/params/prior", [&] { return detail::prob_vector_from_json(p["prior"], "prior"); });
    if (prior.size() != set.size()) throw ValidationError("/params/prior", "needs one entry per hypothesis");
  }
  StoppingConfig cfg{p["p"].get<double>(), p.value("q", 0.0), p.value("eps_d", 0.0), p.value("r", 0.0)};
  build("/params", [&] { cfg.validate(); return 0; });
  MCOptions mc;
  mc.trials = p["trials"].get<std::uint64_t>();
  mc.seed = c.seed;
  mc.threads = c.threads;
  mc.max_steps = p.value("max_steps", std::size_t{100000});
  mc.record_trace = p.value("trace", false);
  return {ideal, std::move(set), std::move(prior), cfg, mc};
}

inline nlohmann::json mc_summary(const MCResult& r) {
  nlohmann::json j;
  j["trials"] = r.stopping_times.trials();
  j["censored"] = r.stopping_times.censored();
  j["decisions"] = r.decision_histogram;
  j["verifications"] = r.verifications;
  j["correct_verifications"] = r.correct_verifications;
  if (r.stopping_times.completed() > 0) {
    j["mean_stopping_time"] = r.mean();
    j["ci95_half_width"] = detail::number(r.ci95_half_width());
    std::vector<double> moments;
    for (unsigned m = 1; m <= 4; ++m) moments.push_back(r.moment(m));
    j["moments"] = moments;
  }
  const auto med = r.stopping_times.median();
  j["median_stopping_time"] = med ? nlohmann::json(*med) : nlohmann::json("censored");
  return j;
}

inline nlohmann::json sc_summary(const ExpectedSampleComplexity& e) {
  return {{"reachable", e.reachable},
          {"expected_t", detail::number(e.expected_t)},
          {"t_ceil", e.t_ceil},
          {"method", e.method},
          {"threshold_bits", e.threshold},
          {"limit_bits", e.limit},
          {"ci95_half_width", e.ci_half_width},
          {"formula_value", e.formula_value}};
}

inline void stopping_table(RunOutput& out, const MCResult& r) {
  out.table.header = {"t", "count", "pmf"};
  for (const auto& [i, n] : r.stopping_times.counts()) out.table.rows.push_back(row(i, n, r.stopping_times.pmf(i)));
  if (r.stopping_times.censored())
    out.table.rows.push_back(row(std::string("censored"), r.stopping_times.censored(),
                                 static_cast<double>(r.stopping_times.censored()) / static_cast<double>(r.stopping_times.trials())));
}

inline RunOutput run_bayes(const ExperimentConfig& c) {
  const auto s = identification_setup(c);
  const MCResult r = mc_sample_complexity(s.ideal, s.set, s.prior, s.cfg, s.mc);
  RunOutput out;
  out.result["monte_carlo"] = mc_summary(r);
  if (!r.trace.empty()) out.result["trace"] = r.trace;
  const bool analytic = c.params.value("analytic", true);
  const bool member = s.set.find(s.ideal).has_value();
  if (analytic && member && s.prior[*s.set.find(s.ideal)] > 0.0) {
    out.result["evaluator"] = sc_summary(expected_sc_evaluator(s.ideal, s.set, s.prior, s.cfg.p));
    out.result["predictive"] = sc_summary(expected_sc_predictive(s.set, s.prior, s.cfg.p));
  }
  stopping_table(out, r);
  return out;
}

inline RunOutput run_novelty(const ExperimentConfig& c) {
  const auto s = identification_setup(c);
  const MCResult r = mc_sample_complexity(s.ideal, s.set, s.prior, s.cfg, s.mc);
  RunOutput out;
  out.result["monte_carlo"] = mc_summary(r);
  if (!r.trace.empty()) out.result["trace"] = r.trace;
  const auto it = r.decision_histogram.find("falsified");
  const std::uint64_t falsified = it == r.decision_histogram.end() ? 0 : it->second;
  out.result["falsification_rate"] = static_cast<double>(falsified) / static_cast<double>(r.stopping_times.trials());
  out.result["misspecified"] = !s.set.find(s.ideal).has_value();
  const auto b = falsification_bounds(s.ideal, s.set, s.cfg.q);
  out.result["falsification_bounds"] = {{"t_lower", b.t_lower},
                                        {"t_upper", detail::number(b.t_upper)},
                                        {"cross_entropy_rate", b.cross_entropy_rate},
                                        {"entropy_rate", b.entropy_rate},
                                        {"eps_q", b.eps_q}};
  const auto med = r.stopping_times.median();
  out.result["median_within_bounds"] =
      med.has_value() && static_cast<double>(*med) >= b.t_lower && static_cast<double>(*med) <= b.t_upper;
  stopping_table(out, r);
  return out;
}

inline RunOutput run_thresholds(const ExperimentConfig& c) {
  const auto& p = c.params;
  const MarkovSpec spec = build("/params/process", [&] { return process_from_json(p["process"]); });
  const double pp = p["p"].get<double>(), q = p["q"].get<double>();
  const std::size_t t_max = p.value("t_max", std::size_t{10});
  const auto rows = build("/params", [&] { return threshold_table(spec, pp, q, t_max); });
  RunOutput out;
  out.table.header = {"t", "centre", "p_lower", "p_upper", "q_lower", "q_upper"};
  nlohmann::json table = nlohmann::json::array();
  for (const auto& rw : rows) {
    out.table.rows.push_back(row(rw.t, rw.centre, rw.p_bounds.lower, rw.p_bounds.upper, rw.q_bounds.lower, rw.q_bounds.upper));
    table.push_back({rw.t, rw.centre, rw.p_bounds.lower, rw.p_bounds.upper, rw.q_bounds.lower, rw.q_bounds.upper});
  }
  const Bits h = entropy_rate(spec);
  out.result = {{"entropy_rate", h}, {"step_ratio", std::exp2(-h)}, {"p", pp}, {"q", q}, {"rows", table}};
  return out;
}

// ---- verification pairs ----

inline RunOutput verify_pairwise(const ExperimentConfig& c) {
  const std::uint64_t max_L = c.params.value("max_L", std::uint64_t{8});
  const double tol = c.tolerance.value_or(0.0);
  RunOutput out;
  out.table.header = {"L", "K", "max_abs_diff", "match"};
  for (std::uint64_t L = 1; L <= max_L; ++L) {
    for (std::uint64_t K = 0; K <= L; ++K) {
      std::vector<std::uint8_t> a(L, 0), b(L, 0);
      std::fill(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(K), 1);
      const EmpiricalSCDist oracle = enumerate_orderings_oracle(BitString(a), BitString(b));
      const PairwiseSCDist d(L, K);
      bool match = true;
      double diff = 0.0;
      Rational cdf = 0;
      for (std::uint64_t i = 1; i <= L; ++i) {
        const Rational o = oracle.pmf_exact(i);
        cdf += o;
        const Rational e = d.pmf_exact(i);
        diff = std::max({diff, std::abs(to_double(o - e)), std::abs(to_double(cdf - d.cdf_exact(i)))});
        if (tol == 0.0) match = match && o == e && cdf == d.cdf_exact(i);
      }
      if (tol > 0.0) match = diff <= tol;
      out.passed = out.passed && match;
      out.table.rows.push_back(row(L, K, diff, std::string(match ? "true" : "false")));
    }
  }
  out.result = {{"pair", "eq3-enumeration"}, {"max_L", max_L}, {"exact", tol == 0.0}, {"passed", out.passed}};
  return out;
}

inline RunOutput verify_coin_bits(const ExperimentConfig& c) {
  const auto& p = c.params;
  const IidSpec spec = build("/params/process", [&] {
    return IidSpec(detail::prob_vector_from_json(p.value("process", nlohmann::json{0.25, 0.75}), "process"));
  });
  const std::uint64_t samples = p.value("samples", std::uint64_t{100000});
  const double tol = c.tolerance.value_or(0.01);
  BitSource src(c.seed);
  std::vector<std::uint64_t> counts(spec.alphabet_size(), 0);
  std::uint64_t bits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto d = sample_discrete(spec, src);
    ++counts[d.symbol];
    bits += d.bits_used;
  }
  const double mean_bits = static_cast<double>(bits) / static_cast<double>(samples);
  const Bits h = entropy(spec.distribution());
  double tv = 0.0;
  for (std::size_t x = 0; x < counts.size(); ++x)
    tv += std::abs(static_cast<double>(counts[x]) / static_cast<double>(samples) - spec[x]);
  tv /= 2.0;
  const bool bits_ok = mean_bits >= h && mean_bits < h + 2.0;
  const bool tv_ok = tv < tol;
  RunOutput out;
  out.passed = bits_ok && tv_ok;
  out.table.header = {"check", "value", "bound", "pass"};
  out.table.rows.push_back(row(std::string("mean_bits_lower"), mean_bits, h, std::string(mean_bits >= h ? "true" : "false")));
  out.table.rows.push_back(row(std::string("mean_bits_upper"), mean_bits, h + 2.0, std::string(mean_bits < h + 2.0 ? "true" : "false")));
  out.table.rows.push_back(row(std::string("total_variation"), tv, tol, std::string(tv_ok ? "true" : "false")));
  out.result = {{"pair", "coin-bits"}, {"entropy", h}, {"mean_bits", mean_bits}, {"total_variation", tv},
                {"tolerance", tol}, {"passed", out.passed}};
  return out;
}

inline RunOutput verify_sc(const ExperimentConfig& c) {
  const auto& p = c.params;
  const MarkovSpec ideal = build("/params/ideal", [&] { return process_from_json(p.value("ideal", nlohmann::json{0.5, 0.5})); });
  std::vector<MarkovSpec> members;
  const auto hyps = p.value("hypotheses", nlohmann::json{{0.5, 0.5}, {0.1, 0.9}});
  for (std::size_t k = 0; k < hyps.size(); ++k)
    members.push_back(build("/params/hypotheses/" + std::to_string(k), [&] { return process_from_json(hyps[k]); }));
  const HypothesisSet set = build("/params/hypotheses", [&] { return HypothesisSet(members); });
  if (!set.find(ideal)) throw ValidationError("/params/ideal", "the ideal must be one of the hypotheses");
  const double prob = p.value("p", 0.9);
  MCOptions mc;
  mc.trials = p.value("trials", std::uint64_t{10000});
  mc.seed = c.seed;
  mc.threads = c.threads;
  const ProbVector prior = ProbVector::uniform(set.size());
  const auto analytic = expected_sc_evaluator(ideal, set, prior, prob);
  const auto r = mc_sample_complexity(ideal, set, prior, StoppingConfig{prob, 0.0, 0.0, 0.0}, mc);
  const double half = r.ci95_half_width() + c.tolerance.value_or(0.0);
  RunOutput out;
  out.passed = analytic.reachable && std::abs(analytic.expected_t - r.mean()) <= half;
  out.table.header = {"analytic", "mc_mean", "ci95_half_width", "pass"};
  out.table.rows.push_back(row(analytic.expected_t, r.mean(), r.ci95_half_width(), std::string(out.passed ? "true" : "false")));
  out.result = {{"pair", "sc-monte-carlo"}, {"analytic", sc_summary(analytic)}, {"monte_carlo", mc_summary(r)},
                {"passed", out.passed}};
  return out;
}

inline RunOutput verify_geometric(const ExperimentConfig& c) {
  const double prob = c.params.value("p", 0.5);
  const std::uint64_t trials = c.params.value("trials", std::uint64_t{100000});
  const double tol = c.tolerance.value_or(0.01);
  const GeometricSCDist g(prob);
  const EmpiricalSCDist e = mc_infinite_pair_oracle(prob, trials, c.seed);
  std::uint64_t max_i = 1;
  for (const auto& [i, n] : e.counts()) max_i = std::max(max_i, i);
  const double tv = e.total_variation([&](std::uint64_t i) { return i == 0 ? 0.0 : g.pmf(i).value_or(0.0); }, max_i);
  RunOutput out;
  out.passed = tv < tol;
  out.table.header = {"i", "empirical", "geometric"};
  for (std::uint64_t i = 1; i <= max_i; ++i) out.table.rows.push_back(row(i, e.pmf(i), g.pmf(i).value_or(0.0)));
  out.result = {{"pair", "geometric-mc"}, {"p", prob}, {"trials", trials}, {"total_variation", tv},
                {"tolerance", tol}, {"passed", out.passed}};
  return out;
}

}  // namespace detail

/// Runs an experiment config (kind) or a verification config (pair).
inline RunOutput run(const ExperimentConfig& c) {
  if (c.is_verification()) {
    if (c.pair == "eq3-enumeration") return detail::verify_pairwise(c);
    if (c.pair == "coin-bits") return detail::verify_coin_bits(c);
    if (c.pair == "sc-monte-carlo") return detail::verify_sc(c);
    if (c.pair == "geometric-mc") return detail::verify_geometric(c);
    throw ValidationError("/pair", "unknown verification pair " + c.pair);
  }
  if (c.kind == "identify") return detail::run_identify(c);
  if (c.kind == "scdist") return detail::run_scdist(c);
  if (c.kind == "sample") return detail::run_sample(c);
  if (c.kind == "spread") return detail::run_spread(c);
  if (c.kind == "bayes") return detail::run_bayes(c);
  if (c.kind == "novelty") return detail::run_novelty(c);
  if (c.kind == "figure3") return detail::run_thresholds(c);
  throw ValidationError("/kind", "unknown experiment kind " + c.kind);
}

/// Verification entry point; refuses experiment configs.
inline RunOutput verify(const ExperimentConfig& c) {
  if (!c.is_verification()) throw ValidationError("/pair", "verification needs a \"pair\"");
  return run(c);
}

/// Config echo, payload, timing and version. Everything except
/// duration_seconds is a function of (config, seed).
inline nlohmann::json result_record(const ExperimentConfig& c, const RunOutput& out, double duration_seconds) {
  nlohmann::json config = c.raw;
  config["seed"] = c.seed;
  nlohmann::json rec;
  rec["version"] = kVersion;
  rec["config"] = config;
  rec["result"] = out.result;
  if (c.is_verification()) rec["passed"] = out.passed;
  rec["duration_seconds"] = duration_seconds;
  return rec;
}

}  // namespace idkit
