// ripcert: sampling, RIP certification, LDLR computation, bound evaluation
// and distinguishing experiments for spiked-Wishart sensing matrices.
//
// Exit codes: 0 success, 1 refusal (cost ceiling), 2 parameter/data error.
// Every run echoes its resolved configuration (including a defaulted seed)
// as '#' comment lines ahead of the results, so any artifact can be
// reproduced from its own header. CSV column orders are pinned in FORMAT.md.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ripcert/bounds.hpp"
#include "ripcert/certifier.hpp"
#include "ripcert/common.hpp"
#include "ripcert/harness.hpp"
#include "ripcert/io.hpp"
#include "ripcert/ldlr.hpp"
#include "ripcert/parallel.hpp"
#include "ripcert/rip_core.hpp"
#include "ripcert/sampling.hpp"

namespace {

using namespace ripcert;

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

struct OutputTarget {
  std::string path;  // empty = stdout

  void write(const std::string& content) const {
    if (path.empty()) {
      std::cout << content;
      return;
    }
    std::ofstream os(path);
    if (!os) throw data_error("cannot open output file " + path);
    os << content;
  }
};

struct CommonOpts {
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = default_threads();

  std::uint64_t resolve_seed() {
    if (!seed_set) seed = fresh_seed();
    return seed;
  }
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed, "RNG master seed (default: generated, echoed)")
      ->each([&c](const std::string&) { c.seed_set = true; });
  cmd->add_option("--threads", c.threads, "worker threads (results are thread-count independent)");
}

void echo_config(std::ostream& os, const std::string& sub,
                 const std::vector<std::pair<std::string, std::string>>& kv) {
  os << "# config: subcommand=" << sub;
  for (const auto& [k, v] : kv) os << ' ' << k << '=' << v;
  os << "\n";
}

// ---------------------------------------------------------------- sample --

int cmd_sample(const std::string& model, Index n, Index m, double rho, double beta,
               std::optional<double> eps, CommonOpts& common, const std::string& out,
               const std::string& format, const std::string& scale_name) {
  const std::uint64_t seed = common.resolve_seed();
  const Scale scale = scale_name == "scaled" ? Scale::inv_sqrt_m : Scale::raw;

  std::ostringstream hdr;
  echo_config(hdr, "sample",
              {{"model", model},
               {"n", std::to_string(n)},
               {"m", std::to_string(m)},
               {"rho", fmt(rho)},
               {"beta", fmt(beta)},
               {"eps", eps ? fmt(*eps) : "none"},
               {"scale", scale_name},
               {"seed", std::to_string(seed)},
               {"out", out.empty() ? "-" : out},
               {"format", format}});
  std::cout << hdr.str();

  SensingMatrix x;
  if (model == "prior") {
    SparseRademacherParams params{n, rho};
    Eigen::VectorXd v = eps ? sample_truncated_prior(params, *eps, seed)
                            : sample_sparse_rademacher(params, seed);
    x.data = v.transpose();
    x.scale = Scale::raw;
    x.seed = seed;
    x.model = "prior";
  } else if (model == "null") {
    SpikedSample s = sample_null(m, n, seed, common.threads);
    x = sensing_from_sample(s, scale, seed, "null");
  } else if (model == "planted") {
    WishartParams params{n, m, beta, SparseRademacherParams{n, rho}};
    SpikedSample s = sample_planted(params, seed, common.threads);
    x = sensing_from_sample(s, scale, seed, "planted");
    std::cout << "# truncated=" << (s.truncated ? 1 : 0) << "\n";
  } else {
    throw parameter_error("sample: --model must be prior, null or planted");
  }

  if (out.empty()) {
    if (format == "bin") throw parameter_error("sample: binary output needs --out");
    write_matrix_csv(std::cout, x);
  } else if (format == "bin") {
    write_matrix_bin(out, x);
  } else {
    write_matrix_csv(out, x);
  }
  return 0;
}

// --------------------------------------------------------------- certify --

SensingMatrix load_scaled(const std::string& in) {
  SensingMatrix x = read_matrix_bin(in);
  if (x.scale == Scale::raw) x = x.scaled();
  return x;
}

int cmd_certify(const std::string& in, int s, double delta, int fixed_r, double c_r,
                int normalize, std::uint64_t ceiling, bool override_ceiling,
                CommonOpts& common, const OutputTarget& out) {
  SensingMatrix x = read_matrix_bin(in);
  const bool norm = normalize < 0 ? true : normalize != 0;
  if (x.scale == Scale::raw) x = x.scaled();

  EnumerationPolicy policy;
  policy.ceiling = ceiling;
  policy.override_ceiling = override_ceiling;
  policy.threads = common.threads;

  LazyConfig cfg;
  cfg.s = s;
  cfg.delta = delta;
  cfg.c_r = c_r;
  cfg.r = fixed_r > 0 ? fixed_r : select_r(s, x.rows(), x.cols(), delta, c_r);
  cfg.normalize_columns = norm;
  cfg.policy = policy;

  std::ostringstream os;
  echo_config(os, "certify",
              {{"in", in},
               {"s", std::to_string(s)},
               {"delta", fmt(delta)},
               {"r", std::to_string(cfg.r)},
               {"c_r", fmt(c_r)},
               {"normalize_columns", norm ? "1" : "0"},
               {"ceiling", std::to_string(ceiling)},
               {"matrix_seed", std::to_string(x.seed)}});

  const auto t0 = std::chrono::steady_clock::now();
  CertificateOutcome outcome = lazy_certify(x, cfg);
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  os << "seed,model,n,m,s,delta,r,b_r,scaled_bound,verdict,wall_time_ms\n";
  os << x.seed << ',' << x.model << ',' << x.cols() << ',' << x.rows() << ',' << s << ','
     << fmt(delta) << ',' << outcome.r_used << ',' << fmt(outcome.b_r) << ','
     << fmt(outcome.scaled_bound) << ',' << (outcome.yes ? "yes" : "no") << ','
     << fmt(wall, "%.3f") << "\n";
  out.write(os.str());
  return 0;
}

int cmd_exact_rip(const std::string& in, int s, double delta, std::uint64_t ceiling,
                  bool override_ceiling, CommonOpts& common, const OutputTarget& out) {
  SensingMatrix x = load_scaled(in);
  EnumerationPolicy policy;
  policy.ceiling = ceiling;
  policy.override_ceiling = override_ceiling;
  policy.threads = common.threads;

  std::ostringstream os;
  echo_config(os, "exact-rip",
              {{"in", in},
               {"s", std::to_string(s)},
               {"delta", fmt(delta)},
               {"ceiling", std::to_string(ceiling)},
               {"matrix_seed", std::to_string(x.seed)}});

  const auto t0 = std::chrono::steady_clock::now();
  RipDecision d = is_rip_exact(x, RipParams{s, delta}, policy);
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  os << "seed,model,n,m,s,delta,b_s,verdict,witness,subsets,wall_time_ms\n";
  os << x.seed << ',' << x.model << ',' << x.cols() << ',' << x.rows() << ',' << s << ','
     << fmt(delta) << ',' << fmt(d.detail.value) << ',' << (d.is_rip ? "yes" : "no") << ',';
  if (!d.is_rip) {
    for (std::size_t i = 0; i < d.detail.argmax_support.size(); ++i) {
      if (i) os << '|';
      os << d.detail.argmax_support[i];
    }
  }
  os << ',' << d.detail.subsets_examined << ',' << fmt(wall, "%.3f") << "\n";
  out.write(os.str());
  return 0;
}

// ------------------------------------------------------------------ ldlr --

int cmd_ldlr(Index n, Index m, double rho, double beta, std::optional<double> eps,
             std::optional<double> delta, int degree, const std::string& method,
             std::uint64_t pairs, CommonOpts& common, const OutputTarget& out) {
  double eps_val = 1.0;  // raw prior unless told otherwise
  if (eps) {
    eps_val = *eps;
  } else if (delta) {
    if (!(*delta > 0.0 && *delta < 1.0))
      throw parameter_error("ldlr: delta must lie in (0, 1)");
    eps_val = (1.0 - *delta) / (2.0 * (1.0 + *delta));
  }

  const std::uint64_t seed = common.resolve_seed();
  WishartParams params{n, m, beta, SparseRademacherParams{n, rho}};

  std::ostringstream os;
  echo_config(os, "ldlr",
              {{"n", std::to_string(n)},
               {"m", std::to_string(m)},
               {"rho", fmt(rho)},
               {"beta", fmt(beta)},
               {"eps", fmt(eps_val)},
               {"degree", std::to_string(degree)},
               {"method", method},
               {"pairs", std::to_string(pairs)},
               {"seed", std::to_string(seed)}});

  LdlrEstimate est;
  if (method == "mc") {
    est = ldlr_norm_mc(params, eps_val, degree, pairs, seed, common.threads);
  } else if (method == "exact") {
    est = ldlr_norm_exact(params, eps_val, degree);
  } else {
    throw parameter_error("ldlr: --method must be mc or exact");
  }

  // geometric moment bound, defined when s = 2*rho*n satisfies s <= m <= n
  std::string q_str, bound_str;
  const double s_real = 2.0 * rho * static_cast<double>(n);
  const auto s_int = static_cast<Index>(s_real + 0.5);
  if (std::abs(s_real - static_cast<double>(s_int)) < 1e-9 && s_int >= 1 && s_int <= m) {
    MomentBoundReport mb = ldlr_moment_bound(n, m, s_int, degree, beta);
    q_str = fmt(mb.q);
    bound_str = fmt(mb.bound);
  }

  os << "n,m,rho,beta,eps,D,method,value,stderr,samples,q_ratio,bound\n";
  os << n << ',' << m << ',' << fmt(rho) << ',' << fmt(beta) << ',' << fmt(eps_val) << ','
     << degree << ',' << (est.method == LdlrMethod::monte_carlo ? "monte-carlo" : "exact-overlap")
     << ',' << fmt(est.value) << ',' << fmt(est.stderr_value) << ',' << est.samples << ','
     << q_str << ',' << bound_str << "\n";
  out.write(os.str());
  return 0;
}

// ---------------------------------------------------------------- bounds --

int cmd_bounds(Index n, Index m, Index s, double delta, std::optional<double> rho_opt,
               std::optional<double> mu_opt, const OutputTarget& out) {
  const ExperimentParams derived = derive_experiment_params(delta, s, n);
  const double rho = rho_opt ? *rho_opt : derived.rho;
  const double mu = mu_opt ? *mu_opt : derived.eps;

  std::ostringstream os;
  echo_config(os, "bounds",
              {{"n", std::to_string(n)},
               {"m", std::to_string(m)},
               {"s", std::to_string(s)},
               {"delta", fmt(delta)},
               {"rho", fmt(rho)},
               {"mu", fmt(mu)},
               {"eps", fmt(derived.eps)},
               {"beta", fmt(derived.beta)}});

  std::vector<BoundReport> rows;
  const BernoulliNormBounds ber = bernoulli_norm_bounds(rho, n, mu);
  rows.push_back(BoundReport::make("bernoulli_norm_two_sided",
                                   {{"rho", rho}, {"n", double(n)}, {"mu", mu}},
                                   ber.two_sided));
  rows.push_back(BoundReport::make("chi2_upper", {{"m", double(m)}, {"delta", delta}},
                                   chi2_upper_bound(m, delta)));
  rows.push_back(BoundReport::make("planted_rip_prob",
                                   {{"m", double(m)}, {"s", double(s)}, {"delta", delta}},
                                   planted_rip_prob_bound(m, s, delta)));
  const NullNonRipBound q = null_nonrip_prob_bound(n, m, s, delta);
  rows.push_back(BoundReport::make(
      "null_nonrip_prob", {{"n", double(n)}, {"m", double(m)}, {"s", double(s)}, {"delta", delta}},
      q.value));

  os << "name,bound_value,vacuous,inputs\n";
  for (const auto& r : rows) {
    os << r.name << ',' << fmt(r.bound_value) << ',' << (r.vacuous ? 1 : 0) << ',';
    for (std::size_t i = 0; i < r.inputs.size(); ++i) {
      if (i) os << ';';
      os << r.inputs[i].first << '=' << fmt(r.inputs[i].second);
    }
    os << "\n";
  }
  out.write(os.str());
  return 0;
}

// --------------------------------------------- distinguish/witness/sweep --

ExperimentSpec spec_from(const std::map<std::string, std::string>& kv, Index n, Index m,
                         int s, double delta, int trials, const std::string& certifier,
                         int r, double c_r, CommonOpts& common) {
  ExperimentSpec spec;
  auto lookup = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  spec.n = lookup("n") ? std::stoll(*lookup("n")) : n;
  spec.m = lookup("m") ? std::stoll(*lookup("m")) : m;
  spec.s = lookup("s") ? std::stoi(*lookup("s")) : s;
  spec.delta = lookup("delta") ? std::stod(*lookup("delta")) : delta;
  spec.trials = lookup("trials") ? std::stoi(*lookup("trials")) : trials;
  spec.lazy_r = lookup("r") ? std::stoi(*lookup("r")) : r;
  spec.c_r = lookup("c_r") ? std::stod(*lookup("c_r")) : c_r;
  std::string cert = lookup("certifier") ? *lookup("certifier") : certifier;
  if (cert == "exact")
    spec.certifier = CertifierKind::exact;
  else if (cert == "lazy")
    spec.certifier = CertifierKind::lazy;
  else if (cert == "witness")
    spec.certifier = CertifierKind::witness;
  else
    throw parameter_error("certifier must be exact, lazy or witness");
  if (auto sd = lookup("seed")) {
    spec.master_seed = std::stoull(*sd);
  } else {
    spec.master_seed = common.resolve_seed();
  }
  spec.threads = common.threads;
  return spec;
}

int cmd_distinguish(const ExperimentSpec& spec, const OutputTarget& out,
                    const std::string& details_path) {
  ExperimentReport rep = run_distinguish(spec);
  out.write(rep.csv());
  std::cerr << "# mean_wall_time_ms=" << fmt(rep.mean_wall_ms, "%.3f")
            << " threads=" << spec.threads << "\n";
  if (!details_path.empty()) {
    std::ofstream os(details_path);
    if (!os) throw data_error("cannot open " + details_path);
    os << "trial,model,verdict,statistic,scaled_bound,witness\n";
    auto dump = [&](const std::vector<TrialRecord>& recs, const char* model) {
      for (std::size_t t = 0; t < recs.size(); ++t) {
        os << t << ',' << model << ',' << to_string(recs[t].verdict) << ','
           << fmt(recs[t].statistic) << ',' << fmt(recs[t].scaled_bound) << ',';
        for (std::size_t i = 0; i < recs[t].witness.size(); ++i) {
          if (i) os << '|';
          os << recs[t].witness[i];
        }
        os << "\n";
      }
    };
    dump(rep.null_trials, "null");
    dump(rep.planted_trials, "planted");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIP certification and spiked-Wishart hardness probing"};
  app.require_subcommand(1);

  try {
    // sample
    auto* sample = app.add_subcommand("sample", "draw a prior vector or a null/planted matrix");
    std::string sample_model = "null", sample_out, sample_format = "bin",
                sample_scale = "raw";
    Index sample_n = 0, sample_m = 1;
    double sample_rho = 0.1, sample_beta = 0.0;
    std::optional<double> sample_eps;
    CommonOpts sample_common;
    sample->add_option("--model", sample_model, "prior|null|planted");
    sample->add_option("--n", sample_n, "columns / ambient dimension")->required();
    sample->add_option("--m", sample_m, "rows");
    sample->add_option("--rho", sample_rho, "prior nonzero probability");
    sample->add_option("--beta", sample_beta, "spike strength");
    sample->add_option("--eps", sample_eps, "truncation parameter (prior model)");
    sample->add_option("--out", sample_out, "output path (default: stdout, csv only)");
    sample->add_option("--format", sample_format, "bin|csv");
    sample->add_option("--scale", sample_scale, "raw|scaled matrix payload");
    add_common(sample, sample_common);

    // certify
    auto* certify = app.add_subcommand("certify", "lazy RIP certification of a stored matrix");
    std::string certify_in, certify_out;
    int certify_s = 0, certify_r = 0, certify_norm = -1;
    double certify_delta = 0.0, certify_cr = 1.0;
    std::uint64_t certify_ceiling = 100'000'000ull;
    bool certify_override = false;
    CommonOpts certify_common;
    certify->add_option("--in", certify_in, "matrix file (RIPMAT01)")->required();
    certify->add_option("--s", certify_s, "target sparsity")->required();
    certify->add_option("--delta", certify_delta, "target distortion")->required();
    certify->add_option("--r", certify_r, "fixed subset size (default: selection rule)");
    certify->add_option("--c-r", certify_cr, "constant in the r selection rule");
    certify->add_option("--normalize-columns", certify_norm, "1 to rescale columns to unit norm (default 1)");
    certify->add_option("--ceiling", certify_ceiling, "max subsets before refusing");
    certify->add_flag("--override-ceiling", certify_override, "enumerate past the ceiling");
    certify->add_option("--out", certify_out, "output path (default: stdout)");
    add_common(certify, certify_common);

    // exact-rip
    auto* exact = app.add_subcommand("exact-rip", "exact (s,delta)-RIP decision");
    std::string exact_in, exact_out;
    int exact_s = 0;
    double exact_delta = 0.0;
    std::uint64_t exact_ceiling = 100'000'000ull;
    bool exact_override = false;
    CommonOpts exact_common;
    exact->add_option("--in", exact_in, "matrix file (RIPMAT01)")->required();
    exact->add_option("--s", exact_s, "sparsity")->required();
    exact->add_option("--delta", exact_delta, "distortion")->required();
    exact->add_option("--ceiling", exact_ceiling, "max subsets before refusing");
    exact->add_flag("--override-ceiling", exact_override, "enumerate past the ceiling");
    exact->add_option("--out", exact_out, "output path (default: stdout)");
    add_common(exact, exact_common);

    // ldlr
    auto* ldlr = app.add_subcommand("ldlr", "low-degree likelihood-ratio norm");
    Index ldlr_n = 0, ldlr_m = 0;
    double ldlr_rho = 0.0, ldlr_beta = 0.0;
    std::optional<double> ldlr_eps, ldlr_delta;
    int ldlr_degree = 0;
    std::string ldlr_method = "exact", ldlr_out;
    std::uint64_t ldlr_pairs = 100'000;
    CommonOpts ldlr_common;
    ldlr->add_option("--n", ldlr_n, "ambient dimension")->required();
    ldlr->add_option("--m", ldlr_m, "Wishart rows")->required();
    ldlr->add_option("--rho", ldlr_rho, "prior nonzero probability")->required();
    ldlr->add_option("--beta", ldlr_beta, "spike strength")->required();
    ldlr->add_option("--eps", ldlr_eps, "truncation parameter (1 = raw prior)");
    ldlr->add_option("--delta", ldlr_delta, "derive eps = (1-delta)/(2(1+delta))");
    ldlr->add_option("--degree", ldlr_degree, "polynomial degree D")->required();
    ldlr->add_option("--method", ldlr_method, "exact|mc");
    ldlr->add_option("--pairs", ldlr_pairs, "Monte-Carlo spike pairs");
    ldlr->add_option("--out", ldlr_out, "output path (default: stdout)");
    add_common(ldlr, ldlr_common);

    // bounds
    auto* bounds = app.add_subcommand("bounds", "closed-form concentration bounds");
    Index bounds_n = 0, bounds_m = 0, bounds_s = 0;
    double bounds_delta = 0.0;
    std::optional<double> bounds_rho, bounds_mu;
    std::string bounds_out;
    bounds->add_option("--n", bounds_n, "columns")->required();
    bounds->add_option("--m", bounds_m, "rows")->required();
    bounds->add_option("--s", bounds_s, "sparsity")->required();
    bounds->add_option("--delta", bounds_delta, "distortion")->required();
    bounds->add_option("--rho", bounds_rho, "override rho (default s/(2n))");
    bounds->add_option("--mu", bounds_mu, "override mu (default eps)");
    bounds->add_option("--out", bounds_out, "output path (default: stdout)");

    // distinguish / witness / sweep share flags
    auto add_experiment_flags = [](CLI::App* cmd, std::string& config, Index& n, Index& m,
                                   int& s, double& delta, int& trials, std::string& cert,
                                   int& r, double& c_r, std::string& out, CommonOpts& common) {
      cmd->add_option("--config", config, "key=value config file");
      cmd->add_option("--n", n, "columns");
      cmd->add_option("--m", m, "rows");
      cmd->add_option("--s", s, "sparsity");
      cmd->add_option("--delta", delta, "distortion");
      cmd->add_option("--trials", trials, "trials per model");
      cmd->add_option("--certifier", cert, "exact|lazy|witness");
      cmd->add_option("--r", r, "fixed lazy subset size (0 = auto)");
      cmd->add_option("--c-r", c_r, "constant in the r selection rule");
      cmd->add_option("--out", out, "output path (default: stdout)");
      add_common(cmd, common);
    };

    auto* distinguish = app.add_subcommand("distinguish", "planted-vs-null experiment");
    std::string dist_config, dist_cert = "exact", dist_out, dist_details;
    Index dist_n = 0, dist_m = 0;
    int dist_s = 0, dist_trials = 100, dist_r = 0;
    double dist_delta = 0.0, dist_cr = 1.0;
    CommonOpts dist_common;
    add_experiment_flags(distinguish, dist_config, dist_n, dist_m, dist_s, dist_delta,
                         dist_trials, dist_cert, dist_r, dist_cr, dist_out, dist_common);
    distinguish->add_option("--details", dist_details, "per-trial records file");

    auto* witness = app.add_subcommand("witness", "planted-model witness experiment");
    std::string wit_config, wit_cert = "witness", wit_out;
    Index wit_n = 0, wit_m = 0;
    int wit_s = 0, wit_trials = 100, wit_r = 0;
    double wit_delta = 0.0, wit_cr = 1.0;
    CommonOpts wit_common;
    add_experiment_flags(witness, wit_config, wit_n, wit_m, wit_s, wit_delta, wit_trials,
                         wit_cert, wit_r, wit_cr, wit_out, wit_common);

    auto* sweep = app.add_subcommand("sweep", "runtime-vs-sparsity tradeoff on null samples");
    std::string sweep_config, sweep_cert = "lazy", sweep_out, sweep_grid;
    Index sweep_n = 0, sweep_m = 0;
    int sweep_s = 2, sweep_trials = 10, sweep_r = 0;
    double sweep_delta = 0.0, sweep_cr = 1.0;
    CommonOpts sweep_common;
    add_experiment_flags(sweep, sweep_config, sweep_n, sweep_m, sweep_s, sweep_delta,
                         sweep_trials, sweep_cert, sweep_r, sweep_cr, sweep_out, sweep_common);
    sweep->add_option("--s-grid", sweep_grid, "comma-separated sparsity grid");

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return 2;  // unknown flag, missing required flag
    }

    if (sample->parsed())
      return cmd_sample(sample_model, sample_n, sample_m, sample_rho, sample_beta,
                        sample_eps, sample_common, sample_out, sample_format, sample_scale);
    if (certify->parsed())
      return cmd_certify(certify_in, certify_s, certify_delta, certify_r, certify_cr,
                         certify_norm, certify_ceiling, certify_override, certify_common,
                         OutputTarget{certify_out});
    if (exact->parsed())
      return cmd_exact_rip(exact_in, exact_s, exact_delta, exact_ceiling, exact_override,
                           exact_common, OutputTarget{exact_out});
    if (ldlr->parsed())
      return cmd_ldlr(ldlr_n, ldlr_m, ldlr_rho, ldlr_beta, ldlr_eps, ldlr_delta, ldlr_degree,
                      ldlr_method, ldlr_pairs, ldlr_common, OutputTarget{ldlr_out});
    if (bounds->parsed())
      return cmd_bounds(bounds_n, bounds_m, bounds_s, bounds_delta, bounds_rho, bounds_mu,
                        OutputTarget{bounds_out});

    if (distinguish->parsed()) {
      std::map<std::string, std::string> kv;
      if (!dist_config.empty()) kv = parse_config_file(dist_config);
      ExperimentSpec spec = spec_from(kv, dist_n, dist_m, dist_s, dist_delta, dist_trials,
                                      dist_cert, dist_r, dist_cr, dist_common);
      return cmd_distinguish(spec, OutputTarget{dist_out}, dist_details);
    }
    if (witness->parsed()) {
      std::map<std::string, std::string> kv;
      if (!wit_config.empty()) kv = parse_config_file(wit_config);
      ExperimentSpec spec = spec_from(kv, wit_n, wit_m, wit_s, wit_delta, wit_trials,
                                      wit_cert, wit_r, wit_cr, wit_common);
      spec.certifier = CertifierKind::witness;
      WitnessReport rep = run_witness_check(spec);
      OutputTarget{wit_out}.write(rep.csv());
      std::cerr << "# mean_wall_time_ms=" << fmt(rep.mean_wall_ms, "%.3f")
                << " threads=" << spec.threads << "\n";
      return 0;
    }
    if (sweep->parsed()) {
      std::map<std::string, std::string> kv;
      if (!sweep_config.empty()) kv = parse_config_file(sweep_config);
      ExperimentSpec spec = spec_from(kv, sweep_n, sweep_m, sweep_s, sweep_delta,
                                      sweep_trials, sweep_cert, sweep_r, sweep_cr,
                                      sweep_common);
      std::string grid_text = sweep_grid;
      if (grid_text.empty() && kv.count("s_grid")) grid_text = kv.at("s_grid");
      if (grid_text.empty()) throw parameter_error("sweep: --s-grid is required");
      std::vector<int> grid;
      std::stringstream ss(grid_text);
      std::string tok;
      while (std::getline(ss, tok, ',')) grid.push_back(std::stoi(tok));

      SweepResult result = sweep_tradeoff(spec, grid, spec.lazy_r == 0);
      OutputTarget{sweep_out}.write(result.csv());
      if (!sweep_out.empty()) {
        std::ofstream os(sweep_out + ".timing.csv");
        if (!os) throw data_error("cannot open " + sweep_out + ".timing.csv");
        os << result.timing_csv();
      } else {
        std::cerr << result.timing_csv();
      }
      std::cerr << "# threads=" << spec.threads << "\n";
      return 0;
    }
    return 2;
  } catch (const refusal& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 1;
  } catch (const parameter_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const phi_overflow& e) {
    std::cerr << "overflow: " << e.what() << "\n";
    return 2;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
