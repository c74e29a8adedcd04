#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ripcert/bounds.hpp"
#include "ripcert/certifier.hpp"
#include "ripcert/common.hpp"
#include "ripcert/parallel.hpp"
#include "ripcert/rip_core.hpp"
#include "ripcert/rng.hpp"
#include "ripcert/sampling.hpp"

namespace ripcert {

enum class CertifierKind { exact, lazy, witness };

inline const char* to_string(CertifierKind k) {
  switch (k) {
    case CertifierKind::exact: return "exact";
    case CertifierKind::lazy: return "lazy";
    default: return "witness";
  }
}

/// One planted-vs-null experiment. Trials are independent units with derived
/// seeds; everything downstream of (spec, master_seed) is deterministic.
struct ExperimentSpec {
  Index n = 0;
  Index m = 0;
  int s = 0;
  double delta = 0.0;
  int trials = 1;
  CertifierKind certifier = CertifierKind::exact;
  int lazy_r = 0;  // 0 = auto via select_r
  double c_r = 1.0;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::uint64_t enumeration_ceiling = 100'000'000ull;
  bool override_ceiling = false;

  void validate() const {
    if (n < 1 || m < 1 || m > n) throw parameter_error("experiment spec: need 1 <= m <= n");
    if (s < 1 || static_cast<Index>(s) > n)
      throw parameter_error("experiment spec: need 1 <= s <= n");
    if (!(delta > 0.0 && delta < 1.0))
      throw parameter_error("experiment spec: delta must lie in (0, 1)");
    if (trials < 1) throw parameter_error("experiment spec: need trials >= 1");
    if (lazy_r != 0 && (lazy_r <= 1 || lazy_r > s))
      throw parameter_error("experiment spec: fixed r must satisfy 1 < r <= s");
  }

  /// Canonical result-affecting fields; thread count deliberately excluded.
  std::string canonical() const {
    char buf[64];
    std::string out;
    auto add = [&](const char* k, const std::string& v) {
      out += k;
      out += '=';
      out += v;
      out += ';';
    };
    add("n", std::to_string(n));
    add("m", std::to_string(m));
    add("s", std::to_string(s));
    std::snprintf(buf, sizeof(buf), "%.17g", delta);
    add("delta", buf);
    add("trials", std::to_string(trials));
    add("certifier", to_string(certifier));
    add("r", std::to_string(lazy_r));
    std::snprintf(buf, sizeof(buf), "%.17g", c_r);
    add("c_r", buf);
    add("ceiling", std::to_string(enumeration_ceiling));
    add("override", override_ceiling ? "1" : "0");
    add("seed", std::to_string(master_seed));
    return out;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }
};

struct RateCI {
  double rate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson 95% interval; valid at small trial counts.
inline RateCI wilson_interval(std::uint64_t successes, std::uint64_t total) {
  if (total == 0) return RateCI{};
  const double z = 1.959963984540054;
  const double nd = static_cast<double>(total);
  const double p = static_cast<double>(successes) / nd;
  const double z2n = z * z / nd;
  const double center = (p + z2n / 2.0) / (1.0 + z2n);
  const double half =
      z * std::sqrt(p * (1.0 - p) / nd + z2n / (4.0 * nd)) / (1.0 + z2n);
  RateCI ci{p, std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == total) ci.hi = 1.0;  // boundary is exact, not a rounding artifact
  if (successes == 0) ci.lo = 0.0;
  return ci;
}

struct BoundComparison {
  std::string name;
  double empirical = 0.0;
  double sigma = 0.0;  // Monte-Carlo standard error of the empirical rate
  double bound = 0.0;
  bool vacuous = false;

  bool ok(double n_sigma = 3.0) const { return empirical <= bound + n_sigma * sigma; }
};

enum class Verdict { yes, no, refused };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    default: return "refused";
  }
}

struct TrialRecord {
  Verdict verdict = Verdict::refused;
  double statistic = 0.0;     // B_s or B_r of the matrix the certifier saw
  double scaled_bound = 0.0;  // lazy only
  std::vector<Index> witness;
  double wall_ms = 0.0;
};

struct ExperimentReport {
  std::uint64_t spec_hash = 0;
  std::uint64_t master_seed = 0;
  std::string spec_line;
  std::uint64_t trials = 0;
  std::uint64_t null_yes = 0, null_no = 0, null_refused = 0;
  std::uint64_t planted_yes = 0, planted_no = 0, planted_refused = 0;
  RateCI yes_rate_null, yes_rate_planted, type1, type2;
  std::vector<BoundComparison> bound_comparisons;
  double mean_wall_ms = 0.0;  // reporting only; never serialized
  std::vector<TrialRecord> null_trials, planted_trials;

  bool comparisons_ok(double n_sigma = 3.0) const {
    for (const auto& c : bound_comparisons)
      if (!c.ok(n_sigma)) return false;
    return true;
  }

  /// Deterministic artifact: identical (spec, master_seed) gives identical
  /// bytes. Wall time intentionally lives elsewhere.
  std::string csv() const {
    char buf[96];
    std::ostringstream os;
    os << "# spec_hash=";
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(spec_hash));
    os << buf << " master_seed=" << master_seed << "\n";
    os << "# spec: " << spec_line << "\n";
    os << "section,name,a,b,c\n";
    auto rate_row = [&](const char* name, const RateCI& r) {
      std::snprintf(buf, sizeof(buf), "rate,%s,%.6f,%.6f,%.6f", name, r.rate, r.lo, r.hi);
      os << buf << "\n";
    };
    rate_row("yes_rate_null", yes_rate_null);
    rate_row("yes_rate_planted", yes_rate_planted);
    rate_row("type1", type1);
    rate_row("type2", type2);
    rate_row("refusal_rate_null", wilson_interval(null_refused, trials));
    rate_row("refusal_rate_planted", wilson_interval(planted_refused, trials));
    for (const auto& c : bound_comparisons) {
      std::snprintf(buf, sizeof(buf), "bound,%s,%.6g,%.6g,%.6g", c.name.c_str(),
                    c.empirical, c.bound, c.sigma);
      os << buf << "\n";
    }
    return os.str();
  }
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

/// The blind certifier path: receives the matrix view only.
inline TrialRecord run_blind_certifier(const SensingMatrix& x, const ExperimentSpec& spec) {
  TrialRecord rec;
  EnumerationPolicy policy;
  policy.ceiling = spec.enumeration_ceiling;
  policy.override_ceiling = spec.override_ceiling;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (spec.certifier == CertifierKind::exact) {
      RipDecision d = is_rip_exact(x, RipParams{spec.s, spec.delta}, policy);
      rec.verdict = d.is_rip ? Verdict::yes : Verdict::no;
      rec.statistic = d.detail.value;
      rec.scaled_bound = d.detail.value;
      if (!d.is_rip) rec.witness = d.detail.argmax_support;
    } else {
      LazyConfig cfg;
      cfg.s = spec.s;
      cfg.delta = spec.delta;
      cfg.c_r = spec.c_r;
      cfg.r = spec.lazy_r > 0 ? spec.lazy_r
                              : select_r(spec.s, x.rows(), x.cols(), spec.delta, spec.c_r);
      cfg.normalize_columns = true;  // keeps the scaling step sound
      cfg.policy = policy;
      CertificateOutcome out = lazy_certify(x, cfg);
      rec.verdict = out.yes ? Verdict::yes : Verdict::no;
      rec.statistic = out.b_r;
      rec.scaled_bound = out.scaled_bound;
      if (out.witness) rec.witness = *out.witness;
    }
  } catch (const refusal&) {
    rec.verdict = Verdict::refused;
  }
  rec.wall_ms = elapsed_ms(t0);
  return rec;
}

/// Witness test from the planted-model analysis: the hidden spike proves
/// non-RIP when it is s-sparse and ||(1/sqrt(m)) A x||^2 < (1-delta)||x||^2.
inline bool witness_violates(const SpikedSample& sample, int s, double delta) {
  if (!sample.spike) return false;
  const Eigen::VectorXd& x = *sample.spike;
  Index nnz = 0;
  for (Index i = 0; i < x.size(); ++i) nnz += x[i] != 0.0;
  if (nnz > static_cast<Index>(s)) return false;
  const double image = (sample.matrix * x).squaredNorm() /
                       static_cast<double>(sample.matrix.rows());
  return image < (1.0 - delta) * x.squaredNorm();
}

}  // namespace detail

/// Draws one planted and one null sample per trial, runs the certifier blind
/// to the spike (yes -> null, no -> planted), and aggregates error rates with
/// Wilson intervals. Refusals are a third outcome, never folded into a
/// verdict.
inline ExperimentReport run_distinguish(const ExperimentSpec& spec) {
  spec.validate();
  const ExperimentParams planted_params = derive_experiment_params(spec.delta, spec.s, spec.n);
  const WishartParams wishart{spec.n, spec.m, planted_params.beta,
                              SparseRademacherParams{spec.n, planted_params.rho}};

  ExperimentReport rep;
  rep.spec_hash = spec.hash();
  rep.master_seed = spec.master_seed;
  rep.spec_line = spec.canonical();
  rep.trials = static_cast<std::uint64_t>(spec.trials);
  rep.null_trials.resize(static_cast<std::size_t>(spec.trials));
  rep.planted_trials.resize(static_cast<std::size_t>(spec.trials));

  run_chunks(static_cast<std::uint64_t>(spec.trials), spec.threads, [&](std::uint64_t t) {
    const std::uint64_t null_seed = rng::derive_stream(spec.master_seed, 2 * t);
    const std::uint64_t planted_seed = rng::derive_stream(spec.master_seed, 2 * t + 1);

    SpikedSample null_sample = sample_null(spec.m, spec.n, null_seed);
    SpikedSample planted_sample = sample_planted(wishart, planted_seed);

    if (spec.certifier == CertifierKind::witness) {
      // diagnostic mode: uses the hidden spike on the planted arm; a null
      // sample carries no witness, so it is always accepted
      TrialRecord null_rec;
      null_rec.verdict = Verdict::yes;
      rep.null_trials[t] = null_rec;
      TrialRecord planted_rec;
      const auto t0 = std::chrono::steady_clock::now();
      planted_rec.verdict = detail::witness_violates(planted_sample, spec.s, spec.delta)
                                ? Verdict::no
                                : Verdict::yes;
      planted_rec.wall_ms = detail::elapsed_ms(t0);
      rep.planted_trials[t] = planted_rec;
      return;
    }

    const SensingMatrix null_blind =
        sensing_from_sample(null_sample, Scale::inv_sqrt_m, null_seed, "blind");
    const SensingMatrix planted_blind =
        sensing_from_sample(planted_sample, Scale::inv_sqrt_m, planted_seed, "blind");
    rep.null_trials[t] = detail::run_blind_certifier(null_blind, spec);
    rep.planted_trials[t] = detail::run_blind_certifier(planted_blind, spec);
  });

  double wall = 0.0;
  for (const auto& r : rep.null_trials) {
    rep.null_yes += r.verdict == Verdict::yes;
    rep.null_no += r.verdict == Verdict::no;
    rep.null_refused += r.verdict == Verdict::refused;
    wall += r.wall_ms;
  }
  for (const auto& r : rep.planted_trials) {
    rep.planted_yes += r.verdict == Verdict::yes;
    rep.planted_no += r.verdict == Verdict::no;
    rep.planted_refused += r.verdict == Verdict::refused;
    wall += r.wall_ms;
  }
  rep.mean_wall_ms = wall / (2.0 * static_cast<double>(spec.trials));

  const std::uint64_t null_decided = rep.null_yes + rep.null_no;
  const std::uint64_t planted_decided = rep.planted_yes + rep.planted_no;
  rep.yes_rate_null = wilson_interval(rep.null_yes, null_decided);
  rep.yes_rate_planted = wilson_interval(rep.planted_yes, planted_decided);
  rep.type1 = wilson_interval(rep.null_no, null_decided);        // null classified planted
  rep.type2 = wilson_interval(rep.planted_yes, planted_decided); // planted classified null

  // With the exact certifier, yes-on-planted means the planted draw really
  // is RIP, which the planted-model bound controls. Same for witness mode.
  if ((spec.certifier == CertifierKind::exact || spec.certifier == CertifierKind::witness) &&
      planted_decided > 0) {
    BoundComparison cmp;
    cmp.name = "planted_yes_rate_vs_planted_rip_bound";
    cmp.empirical = rep.type2.rate;
    cmp.sigma = std::sqrt(cmp.empirical * (1.0 - cmp.empirical) /
                          static_cast<double>(planted_decided));
    cmp.bound = planted_rip_prob_bound(spec.m, spec.s, spec.delta);
    cmp.vacuous = cmp.bound >= 1.0;
    rep.bound_comparisons.push_back(cmp);
  }
  return rep;
}

struct WitnessReport {
  std::uint64_t spec_hash = 0;
  std::uint64_t master_seed = 0;
  std::string spec_line;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;  // witness failed to certify non-RIP
  RateCI failure_rate;
  BoundComparison comparison;
  double mean_wall_ms = 0.0;

  std::string csv() const {
    char buf[160];
    std::ostringstream os;
    std::snprintf(buf, sizeof(buf), "# spec_hash=%016llx master_seed=%llu",
                  static_cast<unsigned long long>(spec_hash),
                  static_cast<unsigned long long>(master_seed));
    os << buf << "\n# spec: " << spec_line << "\n";
    os << "trials,failures,failure_rate,lo95,hi95,bound,sigma,vacuous\n";
    std::snprintf(buf, sizeof(buf), "%llu,%llu,%.6f,%.6f,%.6f,%.9g,%.6g,%d",
                  static_cast<unsigned long long>(trials),
                  static_cast<unsigned long long>(failures), failure_rate.rate,
                  failure_rate.lo, failure_rate.hi, comparison.bound, comparison.sigma,
                  comparison.vacuous ? 1 : 0);
    os << buf << "\n";
    return os.str();
  }
};

/// Planted-model witness experiment: how often does the hidden spike fail to
/// exhibit the RIP violation? The failure frequency is controlled by
/// planted_rip_prob_bound.
inline WitnessReport run_witness_check(const ExperimentSpec& spec) {
  spec.validate();
  const ExperimentParams planted_params = derive_experiment_params(spec.delta, spec.s, spec.n);
  const WishartParams wishart{spec.n, spec.m, planted_params.beta,
                              SparseRademacherParams{spec.n, planted_params.rho}};

  WitnessReport rep;
  rep.spec_hash = spec.hash();
  rep.master_seed = spec.master_seed;
  rep.spec_line = spec.canonical();
  rep.trials = static_cast<std::uint64_t>(spec.trials);

  std::vector<char> failed(static_cast<std::size_t>(spec.trials), 0);
  std::vector<double> wall(static_cast<std::size_t>(spec.trials), 0.0);
  run_chunks(static_cast<std::uint64_t>(spec.trials), spec.threads, [&](std::uint64_t t) {
    const auto t0 = std::chrono::steady_clock::now();
    SpikedSample sample = sample_planted(wishart, rng::derive_stream(spec.master_seed, t));
    failed[t] = detail::witness_violates(sample, spec.s, spec.delta) ? 0 : 1;
    wall[t] = detail::elapsed_ms(t0);
  });
  for (std::size_t t = 0; t < failed.size(); ++t) {
    rep.failures += failed[t];
    rep.mean_wall_ms += wall[t];
  }
  rep.mean_wall_ms /= static_cast<double>(spec.trials);
  rep.failure_rate = wilson_interval(rep.failures, rep.trials);

  rep.comparison.name = "witness_failure_vs_planted_rip_bound";
  rep.comparison.empirical = rep.failure_rate.rate;
  rep.comparison.sigma = std::sqrt(rep.comparison.empirical *
                                   (1.0 - rep.comparison.empirical) /
                                   static_cast<double>(rep.trials));
  rep.comparison.bound = planted_rip_prob_bound(spec.m, spec.s, spec.delta);
  rep.comparison.vacuous = rep.comparison.bound >= 1.0;
  return rep;
}

struct SweepRow {
  int s = 0;
  double r_raw = 0.0;
  int r = 0;
  std::uint64_t trials = 0;
  std::uint64_t yes = 0, no = 0, refused = 0;
  double median_wall_ms = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::uint64_t spec_hash = 0;
  std::uint64_t master_seed = 0;
  std::string spec_line;

  /// Deterministic table; wall time goes to timing_csv() instead so that
  /// identical (spec, seed) runs produce identical bytes at any thread count.
  std::string csv() const {
    char buf[160];
    std::ostringstream os;
    std::snprintf(buf, sizeof(buf), "# spec_hash=%016llx master_seed=%llu",
                  static_cast<unsigned long long>(spec_hash),
                  static_cast<unsigned long long>(master_seed));
    os << buf << "\n# spec: " << spec_line << "\n";
    os << "s,r_raw,r,trials,yes,no,refused,yes_rate\n";
    for (const auto& row : rows) {
      const std::uint64_t decided = row.yes + row.no;
      std::snprintf(buf, sizeof(buf), "%d,%.9g,%d,%llu,%llu,%llu,%llu,", row.s, row.r_raw,
                    row.r, static_cast<unsigned long long>(row.trials),
                    static_cast<unsigned long long>(row.yes),
                    static_cast<unsigned long long>(row.no),
                    static_cast<unsigned long long>(row.refused));
      os << buf;
      if (decided > 0) {
        std::snprintf(buf, sizeof(buf), "%.6f",
                      static_cast<double>(row.yes) / static_cast<double>(decided));
        os << buf;
      }
      os << "\n";
    }
    return os.str();
  }

  std::string timing_csv() const {
    char buf[64];
    std::ostringstream os;
    os << "s,median_wall_ms\n";
    for (const auto& row : rows) {
      std::snprintf(buf, sizeof(buf), "%d,%.3f", row.s, row.median_wall_ms);
      os << buf << "\n";
    }
    return os.str();
  }
};

/// Runtime-vs-sparsity tradeoff on null samples: for each s in the grid,
/// select r, certify `trials` null draws lazily, and record rates. Infeasible
/// grid points are recorded as refusals, never skipped.
inline SweepResult sweep_tradeoff(const ExperimentSpec& base, const std::vector<int>& s_grid,
                                  bool auto_r = true) {
  if (s_grid.empty()) throw parameter_error("sweep_tradeoff: empty s grid");
  SweepResult result;
  result.spec_hash = base.hash();
  result.master_seed = base.master_seed;
  result.spec_line = base.canonical();

  for (std::size_t g = 0; g < s_grid.size(); ++g) {
    const int s = s_grid[g];
    ExperimentSpec spec = base;
    spec.s = s;
    spec.certifier = CertifierKind::lazy;
    spec.validate();

    SweepRow row;
    row.s = s;
    row.trials = static_cast<std::uint64_t>(spec.trials);
    row.r_raw = select_r_raw(s, spec.m, spec.n, spec.delta, spec.c_r);
    row.r = auto_r ? select_r(s, spec.m, spec.n, spec.delta, spec.c_r)
                   : (spec.lazy_r > 0 ? spec.lazy_r : 2);
    spec.lazy_r = row.r;

    std::vector<TrialRecord> recs(static_cast<std::size_t>(spec.trials));
    const std::uint64_t grid_seed = rng::derive_stream(base.master_seed, g);
    run_chunks(static_cast<std::uint64_t>(spec.trials), base.threads, [&](std::uint64_t t) {
      SpikedSample sample = sample_null(spec.m, spec.n, rng::derive_stream(grid_seed, t));
      const SensingMatrix blind =
          sensing_from_sample(sample, Scale::inv_sqrt_m, rng::derive_stream(grid_seed, t),
                              "null");
      recs[t] = detail::run_blind_certifier(blind, spec);
    });

    std::vector<double> walls;
    for (const auto& rec : recs) {
      row.yes += rec.verdict == Verdict::yes;
      row.no += rec.verdict == Verdict::no;
      row.refused += rec.verdict == Verdict::refused;
      if (rec.verdict != Verdict::refused) walls.push_back(rec.wall_ms);
    }
    if (!walls.empty()) {
      std::sort(walls.begin(), walls.end());
      row.median_wall_ms = walls[walls.size() / 2];
    }
    result.rows.push_back(row);
  }
  return result;
}

/// Flat key=value config file: one pair per line, '#' starts a comment.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw data_error("config: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string v) {
    const auto a = v.find_first_not_of(" \t\r");
    const auto b = v.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw data_error("config: expected key=value, got '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace ripcert
