#include "cli_commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "blocknys/block_nystrom.hpp"
#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/flat_tail.hpp"
#include "blocknys/kernels.hpp"
#include "blocknys/krr.hpp"
#include "blocknys/leverage.hpp"
#include "blocknys/matrix_market.hpp"
#include "blocknys/nystrom.hpp"
#include "blocknys/psd_operator.hpp"
#include "blocknys/quadratic.hpp"
#include "blocknys/recursive_solve.hpp"
#include "blocknys/report.hpp"
#include "blocknys/rng.hpp"
#include "blocknys/spectrum.hpp"
#include "blocknys/woodbury.hpp"

namespace blocknys::cli {
namespace {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Option plumbing
// ---------------------------------------------------------------------------

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string out;             // report path; for `gen` the generated artifact
  std::string format = "csv";  // artifact format where a choice exists
  int threads = 1;
  int trials = 10;
  std::string config_path;
};

// Pairs every CLI option with a setter so a JSON config file can fill in any
// value the command line left untouched: flags given on the command line
// always win over the file.
class ConfigBook {
 public:
  template <class T>
  void bind(const std::string& key, CLI::Option* opt, T* target) {
    entries_.push_back(
        Entry{key, opt, [target](const ordered_json& v) { *target = v.get<T>(); }});
  }

  void apply(const ordered_json& file) const {
    for (const auto& e : entries_) {
      if (e.opt->count() > 0) continue;
      auto it = file.find(e.key);
      if (it == file.end()) continue;
      try {
        e.set(*it);
      } catch (const nlohmann::json::exception& ex) {
        throw InvalidSpecError("cli: config key '" + e.key + "': " + ex.what());
      }
    }
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const ordered_json&)> set;
  };
  std::vector<Entry> entries_;
};

ordered_json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cli: cannot open config file " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cli: config file " + path + ": " + e.what());
  }
  if (!j.is_object())
    throw InvalidSpecError("cli: config file must hold a JSON object");
  return j;
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

struct MatrixOptions {
  std::string in;              // Matrix Market path; overrides the generator
  std::string kind = "spiked"; // spiked | poly (| krr under `gen`)
  Eigen::Index n = 256;
  double gamma = 1.0;          // poly: eigenvalue i decays like i^(-1/gamma)
  Eigen::Index head = 10;      // spiked: spike count
  double head_condition = 100.0;
  double tail_spread = 1.9;
};

void add_matrix_options(CLI::App* sub, MatrixOptions& m, ConfigBook& book,
                        bool allow_input) {
  if (allow_input) {
    book.bind("in", sub->add_option("--in", m.in,
                                    "symmetric PSD input (Matrix Market); "
                                    "overrides the generator flags"),
              &m.in);
  }
  book.bind("kind",
            sub->add_option("--kind", m.kind, "generated spectrum: spiked | poly")
                ->capture_default_str(),
            &m.kind);
  book.bind("n", sub->add_option("--n", m.n, "matrix size")->capture_default_str(),
            &m.n);
  book.bind("gamma",
            sub->add_option("--gamma", m.gamma,
                            "poly decay exponent: eigenvalue i ~ i^(-1/gamma)")
                ->capture_default_str(),
            &m.gamma);
  book.bind("head",
            sub->add_option("--head", m.head, "spiked: head eigenvalue count")
                ->capture_default_str(),
            &m.head);
  book.bind("head-condition",
            sub->add_option("--head-condition", m.head_condition,
                            "spiked: ratio of largest to smallest head value")
                ->capture_default_str(),
            &m.head_condition);
  book.bind("tail-spread",
            sub->add_option("--tail-spread", m.tail_spread,
                            "spiked: max/min ratio within the flat tail")
                ->capture_default_str(),
            &m.tail_spread);
}

struct KernelOptions {
  std::string kernel = "rbf";  // rbf | polynomial | linear
  double bandwidth = 1.0;
  int degree = 2;
  double offset = 1.0;
  double bound = 1.0;
};

void add_kernel_options(CLI::App* sub, KernelOptions& k, ConfigBook& book) {
  book.bind("kernel",
            sub->add_option("--kernel", k.kernel,
                            "kernel: rbf | polynomial | linear")
                ->capture_default_str(),
            &k.kernel);
  book.bind("bandwidth",
            sub->add_option("--bandwidth", k.bandwidth, "rbf bandwidth")
                ->capture_default_str(),
            &k.bandwidth);
  book.bind("degree",
            sub->add_option("--degree", k.degree, "polynomial degree")
                ->capture_default_str(),
            &k.degree);
  book.bind("offset",
            sub->add_option("--offset", k.offset, "polynomial offset")
                ->capture_default_str(),
            &k.offset);
  book.bind("bound",
            sub->add_option("--bound", k.bound,
                            "declared diagonal bound G with k(x,x) <= G^2")
                ->capture_default_str(),
            &k.bound);
}

KernelSpec to_kernel_spec(const KernelOptions& k) {
  KernelSpec spec;
  if (k.kernel == "rbf") {
    spec.kind = KernelKind::kRbf;
  } else if (k.kernel == "polynomial" || k.kernel == "poly") {
    spec.kind = KernelKind::kPolynomial;
  } else if (k.kernel == "linear") {
    spec.kind = KernelKind::kLinear;
  } else {
    throw InvalidSpecError("cli: unknown kernel " + k.kernel +
                           " (expected rbf, polynomial, linear)");
  }
  spec.bandwidth = k.bandwidth;
  spec.degree = k.degree;
  spec.offset = k.offset;
  spec.bound = k.bound;
  return spec;
}

// Builds the working matrix and echoes the effective source into the report.
Eigen::MatrixXd make_matrix(const MatrixOptions& m, std::uint64_t seed,
                            RunReport& r) {
  auto& cfg = r.config();
  if (!m.in.empty()) {
    cfg["in"] = m.in;
    Eigen::MatrixXd a = read_matrix_market(m.in);
    if (a.rows() != a.cols())
      throw InvalidSpecError("cli: input matrix must be square");
    return a;
  }
  if (m.n < 1) throw InvalidSpecError("cli: --n must be at least 1");
  cfg["kind"] = m.kind;
  cfg["n"] = m.n;
  if (m.kind == "poly") {
    cfg["gamma"] = m.gamma;
    return gen_psd(m.n, PolyDecaySpectrum{m.gamma}, seed);
  }
  if (m.kind == "spiked") {
    cfg["head"] = m.head;
    cfg["head_condition"] = m.head_condition;
    cfg["tail_spread"] = m.tail_spread;
    return gen_psd(m.n, SpikedSpectrum{m.head, m.head_condition, m.tail_spread},
                   seed);
  }
  throw InvalidSpecError("cli: unknown matrix kind " + m.kind +
                         " (expected spiked or poly)");
}

// --lambda 0 selects automatically: the ceil(n/16)-th largest eigenvalue,
// floored away from zero. Deterministic given the matrix.
double pick_lambda(const Eigen::MatrixXd& a, double requested) {
  if (requested > 0.0) return requested;
  if (requested < 0.0)
    throw InvalidSpecError(
        "cli: --lambda must be positive (0 selects automatically)");
  const Eigen::Index n = a.rows();
  const SymEig eig = sym_eig(a);
  const Eigen::Index j = std::max<Eigen::Index>(1, (n + 15) / 16);
  const double lam = eig.values(n - j);
  const double floor_val = std::max(eig.values(n - 1), 1.0) * 1e-12;
  return std::max(lam, floor_val);
}

Eigen::VectorXd read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cli: cannot open vector file " + path);
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string cell = line.substr(first, last - first + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      vals.push_back(v);
    } catch (const std::exception&) {
      throw IoError("cli: vector file " + path + ": cannot parse line '" +
                    cell + "'");
    }
  }
  if (vals.empty()) throw IoError("cli: vector file " + path + " is empty");
  return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                           static_cast<Eigen::Index>(vals.size()));
}

Eigen::VectorXd default_rhs(std::uint64_t seed, Eigen::Index n) {
  Rng rng = make_rng(seed + 900001);
  return gaussian_vector(rng, n);
}

// Folds a nested solve record into the report: iteration counts and residuals
// are deterministic and stay in metrics, wall/prep times move to timing.
void merge_solve_report(RunReport& r, const SolveReport& s,
                        const std::string& tag) {
  ordered_json j = ordered_json::parse(solve_report_to_json(s));
  if (j.contains("wall_ms")) {
    r.set_timing(tag + "_wall_ms", j["wall_ms"].get<double>());
    j.erase("wall_ms");
  }
  if (j.contains("prep_ms")) {
    r.set_timing(tag + "_prep_ms", j["prep_ms"].get<double>());
    j.erase("prep_ms");
  }
  j["block_applies"] = s.block_applies;
  j["converged"] = s.converged;
  r.metrics()[tag] = std::move(j);
}

int finish(RunReport& r, const GlobalOptions& g) {
  if (!g.out.empty()) r.write(g.out);
  std::cout << r.to_json() << "\n";
  return r.passed() ? 0 : 1;
}

std::uint64_t trial_seed(std::uint64_t base, int trial) {
  return base + static_cast<std::uint64_t>(trial) + 1;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) throw InvalidSpecError("cli: median of an empty set");
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenOptions {
  MatrixOptions matrix;
  KernelOptions kernel;
  Eigen::Index dim = 3;
  double zeta = 0.25;
  double noise = 0.1;
};

int run_gen(const GlobalOptions& g, const GenOptions& o) {
  if (g.out.empty())
    throw InvalidSpecError("gen: --out is required (path of the artifact)");
  RunReport r("gen");
  r.config()["seed"] = g.seed;
  auto& met = r.metrics();
  if (o.matrix.kind == "krr") {
    auto& cfg = r.config();
    cfg["kind"] = "krr";
    cfg["n"] = o.matrix.n;
    cfg["dim"] = o.dim;
    cfg["zeta"] = o.zeta;
    cfg["noise"] = o.noise;
    cfg["kernel"] = o.kernel.kernel;
    const KernelSpec spec = to_kernel_spec(o.kernel);
    const SyntheticRegression sr = make_synthetic_regression(
        spec, o.matrix.n, o.dim, o.zeta, o.noise, g.seed);
    save_dataset_csv(g.out, sr.data);
    met["rows"] = sr.data.n();
    met["cols"] = sr.data.dim() + 1;
    met["label_mean_square"] =
        sr.data.labels.squaredNorm() / static_cast<double>(sr.data.n());
  } else {
    const Eigen::MatrixXd a = make_matrix(o.matrix, g.seed, r);
    write_matrix_market(g.out, a);
    met["rows"] = a.rows();
    met["cols"] = a.cols();
    met["trace"] = a.trace();
  }
  met["path"] = g.out;
  std::cout << r.to_json() << "\n";
  return r.passed() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// rls
// ---------------------------------------------------------------------------

struct RlsOptions {
  MatrixOptions matrix;
  double lambda = 0.0;
  std::string method = "exact";  // exact | recursive | flat-tail
  Eigen::Index head = 0;         // flat-tail head size; 0 -> n/8
  std::string scores_out;
};

int run_rls(const GlobalOptions& g, const RlsOptions& o) {
  RunReport r("rls");
  r.config()["seed"] = g.seed;
  const Eigen::MatrixXd a = make_matrix(o.matrix, g.seed, r);
  const DenseOperator op(a);
  const Eigen::Index n = op.n();
  RidgeScores sc;
  auto& met = r.metrics();
  if (o.method == "flat-tail") {
    const Eigen::Index k = o.head > 0 ? o.head : std::max<Eigen::Index>(1, n / 8);
    r.config()["head"] = k;
    const FlatTailResult res = fast_rls_flat_tail(op, k, FlatTailConfig{}, g.seed);
    sc = res.scores;
    met["lambda_bar"] = res.lambda_bar;
    met["lambda_tilde"] = res.lambda_tilde;
    met["retries"] = res.retries_used;
  } else if (o.method == "exact" || o.method == "recursive") {
    const double lam = pick_lambda(a, o.lambda);
    sc = o.method == "exact"
             ? exact_rls(op, lam)
             : approx_rls_recursive(op, lam, ApproxRlsConfig{}, g.seed);
  } else {
    throw InvalidSpecError("rls: unknown method " + o.method +
                           " (expected exact, recursive, flat-tail)");
  }
  r.config()["method"] = o.method;
  r.config()["lambda"] = sc.lambda;
  met["sum"] = sc.sum();
  met["max"] = sc.scores.maxCoeff();
  met["min"] = sc.scores.minCoeff();
  met["approx_factor"] = sc.approx_factor;
  r.add_flag("scores_in_unit_interval", sc.scores.minCoeff() >= 0.0 &&
                                            sc.scores.maxCoeff() <= 1.0 + 1e-12);
  if (n <= kDeskCap) {
    met["effective_dim"] = effective_dim(op, sc.lambda);
    if (o.method != "exact") {
      // Certified overestimation: every score must sit above exact / factor.
      const RidgeScores ex = exact_rls(op, sc.lambda);
      const double floor_val = 1e-12 * std::max(ex.scores.maxCoeff(), 1e-300);
      double margin = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (ex.scores(i) <= floor_val) continue;
        margin = std::min(margin, sc.scores(i) * sc.approx_factor / ex.scores(i));
      }
      if (std::isinf(margin)) margin = 1.0;
      r.add_check("overestimation_margin", margin, ">=", 1.0);
    }
  }
  if (!o.scores_out.empty()) {
    if (g.format == "csv") {
      write_scores_csv(o.scores_out, sc);
    } else if (g.format == "json") {
      write_scores_json(o.scores_out, sc);
    } else {
      throw InvalidSpecError("cli: unknown format " + g.format +
                             " (expected csv or json)");
    }
    met["scores_path"] = o.scores_out;
  }
  return finish(r, g);
}

// ---------------------------------------------------------------------------
// nystrom
// ---------------------------------------------------------------------------

struct NystromOptions {
  MatrixOptions matrix;
  double lambda = 0.0;
  Eigen::Index b = 0;  // 0 -> ceil(2 * effective_dim * log n)
  std::string model_out;
};

int run_nystrom(const GlobalOptions& g, const NystromOptions& o) {
  RunReport r("nystrom");
  r.config()["seed"] = g.seed;
  const Eigen::MatrixXd a = make_matrix(o.matrix, g.seed, r);
  const DenseOperator op(a);
  const Eigen::Index n = op.n();
  const double lam = pick_lambda(a, o.lambda);
  r.config()["lambda"] = lam;
  const RidgeScores sc =
      n <= kDeskCap ? exact_rls(op, lam)
                    : approx_rls_recursive(op, lam, ApproxRlsConfig{}, g.seed);
  const double d = n <= kDeskCap ? effective_dim(op, lam) : sc.sum();
  const double logn = std::max(std::log(static_cast<double>(n)), 1.0);
  const Eigen::Index b =
      o.b > 0 ? o.b
              : std::max<Eigen::Index>(
                    1, static_cast<Eigen::Index>(std::ceil(2.0 * d * logn)));
  r.config()["b"] = b;
  const LandmarkSet draw = sample_landmarks(sc.scores, b, g.seed + 1);
  const NystromFactor f = build_factor(op, draw);
  auto& met = r.metrics();
  met["effective_dim"] = d;
  met["width"] = f.width();
  met["rank"] = f.rank();
  if (n <= kDeskCap) {
    const double err = check_operator_error(op, f);
    met["operator_error"] = err;
    r.add_check("operator_error", err, "<=", lam);
  }
  if (!o.model_out.empty()) {
    save_factor(o.model_out, f);
    met["model_path"] = o.model_out;
  }
  return finish(r, g);
}

// ---------------------------------------------------------------------------
// block
// ---------------------------------------------------------------------------

struct BlockOptions {
  MatrixOptions matrix;
  double lambda = 0.0;
  double alpha = 4.0;
  Eigen::Index b = 0;
  Eigen::Index q = 0;
  double cb = 2.0;
  double cq = 1.0;
  std::string model_out;
};

int run_block(const GlobalOptions& g, const BlockOptions& o) {
  RunReport r("block");
  r.config()["seed"] = g.seed;
  const Eigen::MatrixXd a = make_matrix(o.matrix, g.seed, r);
  const DenseOperator op(a);
  const double lam = pick_lambda(a, o.lambda);
  auto& cfgj = r.config();
  cfgj["lambda"] = lam;
  cfgj["alpha"] = o.alpha;
  cfgj["cb"] = o.cb;
  cfgj["cq"] = o.cq;
  BlockNystromConfig cfg;
  cfg.c_b = o.cb;
  cfg.c_q = o.cq;
  cfg.b_override = o.b;
  cfg.q_override = o.q;
  const BlockNystromOperator bn = build_block_nystrom(op, lam, o.alpha, cfg, g.seed);
  auto& met = r.metrics();
  met["q"] = bn.q();
  met["b"] = bn.b();
  met["lambda_prime"] = bn.lambda_prime();
  if (op.n() <= kDeskCap) {
    const ApproximationCheck chk = verify_approximation(op, bn);
    met["gmin"] = chk.gmin;
    met["gmax"] = chk.gmax;
    met["alpha_measured"] = chk.alpha_measured;
    r.add_flag("upper_bound_holds", chk.upper_ok);
    r.add_check("alpha_measured", chk.alpha_measured, "<=", 64.0 * o.alpha);
  }
  if (!o.model_out.empty()) {
    save_block_nystrom(o.model_out, bn);
    met["model_path"] = o.model_out;
  }
  return finish(r, g);
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyOptions {
  MatrixOptions matrix;
  std::string claim;
  double lambda = 0.0;
  double alpha = 2.0;
  double theta = 0.5;
  Eigen::Index b = 0;
  Eigen::Index q = 0;
  int projections = 200;
};

int run_verify(const GlobalOptions& g, const VerifyOptions& o) {
  if (g.trials < 1) throw InvalidSpecError("verify: --trials must be at least 1");
  RunReport r("verify");
  auto& cfgj = r.config();
  cfgj["seed"] = g.seed;
  cfgj["claim"] = o.claim;
  cfgj["trials"] = g.trials;
  const Eigen::MatrixXd a = make_matrix(o.matrix, g.seed, r);
  const DenseOperator op(a);
  const Eigen::Index n = op.n();
  if (n > kDeskCap)
    throw TooLargeError("verify: dense certificates need n <= " +
                        std::to_string(kDeskCap));
  const double lam = pick_lambda(a, o.lambda);
  const double lamp = o.alpha * o.alpha * lam;
  cfgj["lambda"] = lam;
  const double logn = std::max(std::log(static_cast<double>(n)), 1.0);
  const int need = static_cast<int>(std::ceil(0.9 * g.trials));
  int pass_count = 0;
  auto& rows = r.trials();

  if (o.claim == "sandwich") {
    cfgj["alpha"] = o.alpha;
    BlockNystromConfig cfg;
    cfg.b_override = o.b;
    cfg.q_override = o.q;
    for (int t = 0; t < g.trials; ++t) {
      const std::uint64_t st = trial_seed(g.seed, t);
      const BlockNystromOperator bn = build_block_nystrom(op, lam, o.alpha, cfg, st);
      const ApproximationCheck chk = verify_approximation(op, bn);
      const bool pass = chk.upper_ok && chk.alpha_measured <= 64.0 * o.alpha;
      rows.push_back({{"trial", t},
                      {"seed", st},
                      {"gmin", chk.gmin},
                      {"gmax", chk.gmax},
                      {"alpha_measured", chk.alpha_measured},
                      {"pass", pass}});
      pass_count += pass;
    }
  } else if (o.claim == "classical-nystrom") {
    const RidgeScores sc = exact_rls(op, lam);
    const double d = effective_dim(op, lam);
    const Eigen::Index b =
        o.b > 0 ? o.b
                : std::max<Eigen::Index>(
                      1, static_cast<Eigen::Index>(std::ceil(2.0 * d * logn)));
    cfgj["b"] = b;
    for (int t = 0; t < g.trials; ++t) {
      const std::uint64_t st = trial_seed(g.seed, t);
      const NystromFactor f = build_factor(op, sample_landmarks(sc.scores, b, st));
      const double err = check_operator_error(op, f);
      const bool pass = err <= lam;
      rows.push_back({{"trial", t},
                      {"seed", st},
                      {"operator_error", err},
                      {"pass", pass}});
      pass_count += pass;
    }
  } else if (o.claim == "projection") {
    cfgj["alpha"] = o.alpha;
    cfgj["projections"] = o.projections;
    const double d = effective_dim(op, lamp);
    const Eigen::Index b =
        o.b > 0 ? o.b
                : std::max<Eigen::Index>(
                      1, static_cast<Eigen::Index>(std::ceil(2.0 * d * logn)));
    cfgj["b"] = b;
    for (int t = 0; t < g.trials; ++t) {
      const std::uint64_t st = trial_seed(g.seed, t);
      const LoewnerGap gap =
          estimate_expected_projection(op, lamp, b, o.projections, st);
      const bool pass = gap.gmin >= 0.4;
      rows.push_back({{"trial", t},
                      {"seed", st},
                      {"gmin", gap.gmin},
                      {"gmax", gap.gmax},
                      {"pass", pass}});
      pass_count += pass;
    }
  } else if (o.claim == "concentration") {
    cfgj["alpha"] = o.alpha;
    cfgj["theta"] = o.theta;
    const RidgeScores sc = exact_rls(op, lamp);
    const double d = effective_dim(op, lamp);
    const Eigen::Index b =
        o.b > 0 ? o.b
                : std::max<Eigen::Index>(
                      1, static_cast<Eigen::Index>(std::ceil(2.0 * d * logn)));
    const Eigen::Index q_small =
        o.q > 0 ? o.q
                : std::max<Eigen::Index>(
                      1, static_cast<Eigen::Index>(std::ceil(8.0 * o.alpha * logn)));
    cfgj["b"] = b;
    cfgj["q"] = q_small;
    cfgj["reference_q"] = 50 * q_small;
    BlockNystromConfig cfg;
    cfg.leverage = LeverageMethod::kPrecomputed;
    cfg.scores = sc.scores;
    cfg.b_override = b;
    cfg.q_override = 50 * q_small;
    const BlockNystromOperator ref =
        build_block_nystrom(op, lam, o.alpha, cfg, g.seed + 777000);
    Eigen::MatrixXd mref = ref.materialize_approx();
    mref.diagonal().array() += lam;
    cfg.q_override = q_small;
    for (int t = 0; t < g.trials; ++t) {
      const std::uint64_t st = trial_seed(g.seed, t);
      const BlockNystromOperator bn = build_block_nystrom(op, lam, o.alpha, cfg, st);
      Eigen::MatrixXd mt = bn.materialize_approx();
      mt.diagonal().array() += lam;
      const LoewnerGap gap = loewner_gap(mt, mref);
      const bool pass =
          gap.gmin >= 1.0 - o.theta / 2.0 && gap.gmax <= 1.0 + o.theta / 2.0;
      rows.push_back({{"trial", t},
                      {"seed", st},
                      {"gmin", gap.gmin},
                      {"gmax", gap.gmax},
                      {"pass", pass}});
      pass_count += pass;
    }
  } else if (o.claim == "exact") {
    // Single block, saturated uniform draw: the approximation must coincide
    // with the matrix itself up to round-off.
    const Eigen::Index b = o.b > 0 ? o.b : 12 * n;
    cfgj["b"] = b;
    BlockNystromConfig cfg;
    cfg.leverage = LeverageMethod::kPrecomputed;
    cfg.scores = Eigen::VectorXd::Ones(n);
    cfg.b_override = b;
    cfg.q_override = 1;
    for (int t = 0; t < g.trials; ++t) {
      const std::uint64_t st = trial_seed(g.seed, t);
      const BlockNystromOperator bn = build_block_nystrom(op, lam, 1.0, cfg, st);
      const ApproximationCheck chk = verify_approximation(op, bn);
      const bool pass = chk.upper_ok && chk.gmin >= 1.0 - 1e-6;
      rows.push_back({{"trial", t},
                      {"seed", st},
                      {"width", bn.factors().front().width()},
                      {"gmin", chk.gmin},
                      {"gmax", chk.gmax},
                      {"pass", pass}});
      pass_count += pass;
    }
  } else {
    throw InvalidSpecError(
        "verify: unknown claim " + o.claim +
        " (expected sandwich, classical-nystrom, projection, concentration, "
        "exact)");
  }
  r.metrics()["pass_count"] = pass_count;
  r.add_check("pass_count", pass_count, ">=", need);
  return finish(r, g);
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveOptions {
  MatrixOptions matrix;
  double lambda = 0.0;
  double alpha = 4.0;
  double eps = 1e-8;
  Eigen::Index b = 0;
  Eigen::Index q = 0;
  std::string rhs;
};

int run_solve(const GlobalOptions& g, const SolveOptions& o) {
  RunReport r("solve");
  auto& cfgj = r.config();
  cfgj["seed"] = g.seed;
  const Eigen::MatrixXd a = make_matrix(o.matrix, g.seed, r);
  const DenseOperator op(a);
  const Eigen::Index n = op.n();
  const double lam = pick_lambda(a, o.lambda);
  cfgj["lambda"] = lam;
  cfgj["alpha"] = o.alpha;
  cfgj["eps"] = o.eps;
  BlockNystromConfig cfg;
  cfg.b_override = o.b;
  cfg.q_override = o.q;
  const BlockNystromOperator bn = build_block_nystrom(op, lam, o.alpha, cfg, g.seed);
  const Eigen::VectorXd rhs =
      o.rhs.empty() ? default_rhs(g.seed, n) : read_vector_file(o.rhs);
  if (rhs.size() != n)
    throw DimensionMismatchError("cli: rhs length " + std::to_string(rhs.size()) +
                                 " does not match n = " + std::to_string(n));
  const auto [u, rep] = recursive_solve(bn, rhs, o.eps);
  auto& met = r.metrics();
  met["q"] = bn.q();
  met["b"] = bn.b();
  met["lambda_prime"] = bn.lambda_prime();
  merge_solve_report(r, rep, "solve");
  r.add_flag("converged", rep.converged);
  const double denom = rhs.norm() > 0.0 ? rhs.norm() : 1.0;
  if (n <= kDeskCap) {
    const Eigen::MatrixXd ahat = bn.materialize_approx();
    const Eigen::VectorXd x_ref = dense_reg_solve(ahat, lam, rhs);
    const double err = (u - x_ref).norm() / denom;
    met["solution_error"] = err;
    r.add_check("solution_error", err, "<=", o.eps);
  }
  if (bn.q() == 1) {
    const Eigen::VectorXd w = woodbury_solve(bn.factors().front(), lam, rhs);
    const double gap = (u - w).norm() / denom;
    met["woodbury_gap"] = gap;
    r.add_check("woodbury_agreement", gap, "<=", std::max(1e-10, o.eps));
  }
  return finish(r, g);
}

// ---------------------------------------------------------------------------
// quad
// ---------------------------------------------------------------------------

struct QuadOptions {
  MatrixOptions matrix;
  Eigen::Index head = 32;
  double eps = 1e-8;
  double cb = 2.0;
  std::string rhs;
};

int run_quad(const GlobalOptions& g, const QuadOptions& o) {
  RunReport r("quad");
  auto& cfgj = r.config();
  cfgj["seed"] = g.seed;
  cfgj["eps"] = o.eps;
  cfgj["cb"] = o.cb;
  MatrixOptions m = o.matrix;
  if (m.in.empty()) {
    m.kind = "spiked";
    m.head = o.head;
  }
  const Eigen::MatrixXd a = make_matrix(m, g.seed, r);
  const DenseOperator op(a);
  const Eigen::Index n = op.n();
  QuadraticProblem problem;
  problem.a = &op;
  problem.rhs = o.rhs.empty() ? default_rhs(g.seed, n) : read_vector_file(o.rhs);
  problem.head_size = o.head;
  if (n <= kDeskCap) {
    const Eigen::VectorXd x_star = dense_reg_solve(a, 0.0, problem.rhs);
    problem.true_min = -0.5 * problem.rhs.dot(x_star);
  }
  QuadraticConfig qc;
  qc.c_b = o.cb;
  const auto [x, qr] = solve_quadratic(problem, o.eps, g.seed, qc);
  auto& met = r.metrics();
  met["outer_iterations"] = qr.outer_iterations;
  met["alpha"] = qr.alpha;
  met["head"] = qr.head_size;
  met["lambda_bar"] = qr.lambda_bar;
  met["lambda"] = qr.lambda;
  met["cond_measured"] = qr.cond_measured;
  met["energy_ratio"] = qr.achieved_energy_ratio;
  merge_solve_report(r, qr.solve, "outer");
  r.add_flag("converged", qr.solve.converged);
  if (qr.cond_measured > 0.0)
    r.add_check("cond_measured", qr.cond_measured, "<=", 64.0 * qr.alpha);
  const double outer_budget =
      std::ceil(8.0 *
                std::pow(static_cast<double>(n) /
                             static_cast<double>(std::max<Eigen::Index>(
                                 qr.head_size, 1)),
                         0.25) *
                std::log(1.0 / o.eps));
  r.add_check("outer_iterations", static_cast<double>(qr.outer_iterations), "<=",
              outer_budget);
  if (problem.true_min)
    r.add_check("energy_ratio", qr.achieved_energy_ratio, "<=", o.eps);
  return finish(r, g);
}

// ---------------------------------------------------------------------------
// krr
// ---------------------------------------------------------------------------

struct KrrOptions {
  std::string data;
  std::string test_data;
  Eigen::Index n = 200;
  Eigen::Index dim = 3;
  double zeta = 0.25;
  double decay = 1.0;  // capacity exponent for the regularizer schedule
  double noise = 0.1;
  KernelOptions kernel;
  double lambda = 0.0;  // 0 -> schedule from (zeta, decay, n)
  double lambda_constant = 1.0;
  double alpha = 2.0;
  double beta = 0.0;  // > 0 enables reduced averaging
  Eigen::Index b = 0;
  Eigen::Index q = 0;
  double fit_accuracy = 1e-9;
  std::string model_out;
  std::string predictions_out;
};

int run_krr(const GlobalOptions& g, const KrrOptions& o) {
  RunReport r("krr");
  auto& cfgj = r.config();
  cfgj["seed"] = g.seed;
  const KernelSpec spec = to_kernel_spec(o.kernel);
  cfgj["kernel"] = o.kernel.kernel;
  Dataset train;
  if (!o.data.empty()) {
    cfgj["data"] = o.data;
    train = load_dataset_csv(o.data);
  } else {
    cfgj["n"] = o.n;
    cfgj["dim"] = o.dim;
    cfgj["zeta"] = o.zeta;
    cfgj["noise"] = o.noise;
    train = make_synthetic_regression(spec, o.n, o.dim, o.zeta, o.noise, g.seed)
                .data;
  }
  const Eigen::Index n = train.n();
  auto& met = r.metrics();
  double lam = o.lambda;
  if (lam <= 0.0) {
    const RegularizerSchedule sch =
        schedule_lambda(o.zeta, o.decay, n, o.lambda_constant);
    lam = sch.lambda_star;
    cfgj["decay"] = o.decay;
    met["lambda_star"] = sch.lambda_star;
    met["in_regime"] = sch.in_regime;
  }
  cfgj["lambda"] = lam;
  cfgj["alpha"] = o.alpha;
  KrrConfig kc;
  kc.b_override = o.b;
  kc.q_override = o.q;
  if (o.beta > 0.0) {
    kc.beta = o.beta;
    cfgj["beta"] = o.beta;
  }
  kc.fit_accuracy = o.fit_accuracy;
  const KrrModel model = fit_block_krr(train, spec, lam, o.alpha, kc, g.seed);
  met["n"] = n;
  met["q"] = model.q();
  met["b"] = model.b();
  merge_solve_report(r, model.fit_report(), "fit");
  r.add_flag("fit_converged", model.fit_report().converged);
  const Dataset eval =
      o.test_data.empty() ? train : load_dataset_csv(o.test_data);
  if (!o.test_data.empty()) cfgj["test_data"] = o.test_data;
  const double risk = empirical_risk(model, eval);
  met["risk"] = risk;
  // A single prediction must cost exactly q*b kernel evaluations.
  const long long before = model.kernel_evals();
  model.predict(train.points.row(0).transpose());
  const double evals_per_predict =
      static_cast<double>(model.kernel_evals() - before);
  r.add_check("kernel_evals_per_prediction", evals_per_predict, "==",
              static_cast<double>(model.q() * model.b()));
  if (n <= kDeskCap) {
    // Dense ridge oracle at the same regularizer for the risk comparison.
    const KernelOperator kop = build_kernel(train, spec);
    const Eigen::MatrixXd kmat = kop.materialize();
    const Eigen::VectorXd z_star =
        dense_reg_solve(kmat, static_cast<double>(n) * lam, train.labels);
    Eigen::VectorXd oracle_preds(eval.n());
    for (Eigen::Index i = 0; i < eval.n(); ++i) {
      double acc = 0.0;
      const Eigen::VectorXd xi = eval.points.row(i).transpose();
      for (Eigen::Index j = 0; j < n; ++j) {
        acc += z_star(j) * kernel_eval(spec, xi, train.points.row(j).transpose());
      }
      oracle_preds(i) = acc;
    }
    const double oracle_risk = (oracle_preds - eval.labels).squaredNorm() /
                               static_cast<double>(eval.n());
    met["oracle_risk"] = oracle_risk;
    r.add_check("risk_vs_oracle", risk, "<=", 4.0 * oracle_risk + 1e-12);
  }
  if (!o.model_out.empty()) {
    save_krr_model(o.model_out, model);
    met["model_path"] = o.model_out;
  }
  if (!o.predictions_out.empty()) {
    write_predictions_csv(o.predictions_out, model.predict_batch(eval.points));
    met["predictions_path"] = o.predictions_out;
  }
  return finish(r, g);
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOptions {
  std::string mode = "apply";  // apply | ladder
  Eigen::Index n = 512;
  double lambda = 0.0;
  double alpha = 4.0;
  std::vector<Eigen::Index> sizes;  // apply: per-block draw counts
  Eigen::Index q = 0;               // ladder: base block count
  double eps = 1e-6;
};

int run_bench(const GlobalOptions& g, const BenchOptions& o) {
  RunReport r("bench");
  auto& cfgj = r.config();
  cfgj["seed"] = g.seed;
  cfgj["mode"] = o.mode;
  cfgj["n"] = o.n;
  auto& met = r.metrics();
  const Eigen::MatrixXd a = gen_psd(o.n, PolyDecaySpectrum{1.0}, g.seed);
  const DenseOperator op(a);
  const double lam = pick_lambda(a, o.lambda);
  cfgj["lambda"] = lam;
  if (o.mode == "apply") {
    // Wall time of one averaged application against the total landmark count,
    // fitted on a log-log grid. Derived values live under timing because they
    // vary run to run.
    std::vector<Eigen::Index> sizes = o.sizes;
    if (sizes.empty()) sizes = {32, 64, 128, 256};
    cfgj["sizes"] = sizes;
    BlockNystromConfig cfg;
    cfg.leverage = LeverageMethod::kPrecomputed;
    cfg.scores = Eigen::VectorXd::Ones(o.n);
    cfg.q_override = 2;
    Rng rng = make_rng(g.seed + 900001);
    const Eigen::VectorXd v = gaussian_vector(rng, o.n);
    ordered_json points = ordered_json::array();
    ordered_json widths = ordered_json::array();
    std::vector<double> log_m;
    std::vector<double> log_t;
    for (const Eigen::Index b : sizes) {
      cfg.b_override = b;
      const BlockNystromOperator bn =
          build_block_nystrom(op, lam, 1.0, cfg, g.seed + static_cast<std::uint64_t>(b));
      Eigen::Index m = 0;
      for (const NystromFactor& f : bn.factors()) m += f.width();
      Eigen::VectorXd sink = bn.apply(v);  // warm-up
      const auto t0 = std::chrono::steady_clock::now();
      sink = bn.apply(v);
      const auto t1 = std::chrono::steady_clock::now();
      const double once = std::chrono::duration<double>(t1 - t0).count();
      const int reps = std::clamp(
          static_cast<int>(std::ceil(0.05 / std::max(once, 1e-7))), 3, 500);
      const auto t2 = std::chrono::steady_clock::now();
      for (int i = 0; i < reps; ++i) sink.noalias() = bn.apply(v);
      const auto t3 = std::chrono::steady_clock::now();
      const double ms =
          1000.0 * std::chrono::duration<double>(t3 - t2).count() / reps;
      points.push_back({{"m", m}, {"reps", reps}, {"ms", ms}});
      widths.push_back(m);
      log_m.push_back(std::log(static_cast<double>(m)));
      log_t.push_back(std::log(std::max(ms, 1e-9)));
    }
    met["total_landmarks"] = widths;
    const double k = static_cast<double>(log_m.size());
    const double mx = std::accumulate(log_m.begin(), log_m.end(), 0.0) / k;
    const double my = std::accumulate(log_t.begin(), log_t.end(), 0.0) / k;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < log_m.size(); ++i) {
      num += (log_m[i] - mx) * (log_t[i] - my);
      den += (log_m[i] - mx) * (log_m[i] - mx);
    }
    if (den <= 0.0)
      throw InvalidSpecError("bench: need at least two distinct sizes");
    const double slope = num / den;
    r.timing()["apply_points"] = points;
    r.timing()["apply_slope"] = slope;
    r.add_check("apply_time_slope_upper", slope, "<=", 1.3);
    r.add_check("apply_time_slope_lower", slope, ">=", 0.8);
  } else if (o.mode == "ladder") {
    // Block-apply counters are deterministic, so doubling the block count
    // must raise the solve cost by at most the predicted factor.
    if (g.trials < 1)
      throw InvalidSpecError("bench: --trials must be at least 1");
    cfgj["alpha"] = o.alpha;
    cfgj["eps"] = o.eps;
    const double logn = std::max(std::log(static_cast<double>(o.n)), 1.0);
    const Eigen::Index q_base =
        o.q > 0 ? o.q
                : std::max<Eigen::Index>(
                      1, static_cast<Eigen::Index>(std::ceil(o.alpha * logn)));
    cfgj["q"] = q_base;
    const RidgeScores sc = exact_rls(op, o.alpha * o.alpha * lam);
    BlockNystromConfig cfg;
    cfg.leverage = LeverageMethod::kPrecomputed;
    cfg.scores = sc.scores;
    auto& rows = r.trials();
    std::vector<double> ratios;
    for (int t = 0; t < g.trials; ++t) {
      const std::uint64_t st = trial_seed(g.seed, t);
      cfg.q_override = q_base;
      const BlockNystromOperator bn1 = build_block_nystrom(op, lam, o.alpha, cfg, st);
      cfg.q_override = 2 * q_base;
      const BlockNystromOperator bn2 =
          build_block_nystrom(op, lam, o.alpha, cfg, st + 500000);
      const Eigen::VectorXd rhs = default_rhs(st, o.n);
      const auto [x1, rep1] = recursive_solve(bn1, rhs, o.eps);
      const auto [x2, rep2] = recursive_solve(bn2, rhs, o.eps);
      const double ratio =
          static_cast<double>(rep2.block_applies) /
          static_cast<double>(std::max<long>(rep1.block_applies, 1));
      ratios.push_back(ratio);
      rows.push_back({{"trial", t},
                      {"seed", st},
                      {"applies_base", rep1.block_applies},
                      {"applies_doubled", rep2.block_applies},
                      {"ratio", ratio}});
    }
    const double med = median_of(ratios);
    met["median_ratio"] = med;
    r.add_check("block_applies_doubling_ratio", med, "<=", std::pow(2.0, 1.5));
  } else {
    throw InvalidSpecError("bench: unknown mode " + o.mode +
                           " (expected apply or ladder)");
  }
  return finish(r, g);
}

// ---------------------------------------------------------------------------
// Wiring
// ---------------------------------------------------------------------------

int run_impl(int argc, char** argv) {
  CLI::App app{
      "Block-averaged Nystrom toolkit: low-rank PSD approximation with "
      "spectral certificates, recursive preconditioned solvers, and "
      "downstream quadratic / kernel ridge regression pipelines. Every "
      "command emits a JSON report whose checks decide the exit code."};
  app.require_subcommand(1);

  GlobalOptions g;
  ConfigBook book;
  book.bind("seed",
            app.add_option("--seed", g.seed, "base random seed")
                ->capture_default_str(),
            &g.seed);
  book.bind("out",
            app.add_option("--out", g.out,
                           "report path (gen: the generated artifact); the "
                           "report always also prints to stdout"),
            &g.out);
  book.bind("format",
            app.add_option("--format", g.format, "artifact format: csv | json")
                ->capture_default_str(),
            &g.format);
  book.bind("threads",
            app.add_option("--threads", g.threads, "linear-algebra threads")
                ->capture_default_str(),
            &g.threads);
  book.bind("trials",
            app.add_option("--trials", g.trials,
                           "repetitions for trial-based commands")
                ->capture_default_str(),
            &g.trials);
  app.add_option("--config", g.config_path,
                 "JSON file of defaults; explicit command-line flags win");

  GenOptions gen_o;
  CLI::App* gen = app.add_subcommand(
      "gen", "write a deterministic test matrix or regression dataset");
  gen->fallthrough();
  add_matrix_options(gen, gen_o.matrix, book, false);
  gen->get_option("--kind")
      ->description("artifact kind: spiked | poly | krr")
      ->capture_default_str();
  book.bind("dim",
            gen->add_option("--dim", gen_o.dim, "krr: feature dimension")
                ->capture_default_str(),
            &gen_o.dim);
  book.bind("zeta",
            gen->add_option("--zeta", gen_o.zeta, "krr: source smoothness")
                ->capture_default_str(),
            &gen_o.zeta);
  book.bind("noise",
            gen->add_option("--noise", gen_o.noise, "krr: label noise sd")
                ->capture_default_str(),
            &gen_o.noise);
  add_kernel_options(gen, gen_o.kernel, book);

  RlsOptions rls_o;
  CLI::App* rls = app.add_subcommand(
      "rls", "ridge leverage scores with overestimation certificates");
  rls->fallthrough();
  add_matrix_options(rls, rls_o.matrix, book, true);
  book.bind("lambda",
            rls->add_option("--lambda", rls_o.lambda,
                            "ridge regularizer (0 selects automatically)")
                ->capture_default_str(),
            &rls_o.lambda);
  book.bind("method",
            rls->add_option("--method", rls_o.method,
                            "exact | recursive | flat-tail")
                ->capture_default_str(),
            &rls_o.method);
  book.bind("rls-head",
            rls->add_option("--rls-head", rls_o.head,
                            "flat-tail head size (0: n/8)")
                ->capture_default_str(),
            &rls_o.head);
  book.bind("scores-out",
            rls->add_option("--scores-out", rls_o.scores_out,
                            "write the scores artifact here (--format)"),
            &rls_o.scores_out);

  NystromOptions ny_o;
  CLI::App* ny = app.add_subcommand(
      "nystrom", "single leverage-sampled factor with an error certificate");
  ny->fallthrough();
  add_matrix_options(ny, ny_o.matrix, book, true);
  book.bind("lambda",
            ny->add_option("--lambda", ny_o.lambda,
                           "target error level (0 selects automatically)")
                ->capture_default_str(),
            &ny_o.lambda);
  book.bind("b",
            ny->add_option("--b", ny_o.b,
                           "landmark draws (0: 2 * effective_dim * log n)")
                ->capture_default_str(),
            &ny_o.b);
  book.bind("model-out",
            ny->add_option("--model-out", ny_o.model_out, "save the factor"),
            &ny_o.model_out);

  BlockOptions bl_o;
  CLI::App* bl = app.add_subcommand(
      "block", "averaged block approximation with the sandwich certificate");
  bl->fallthrough();
  add_matrix_options(bl, bl_o.matrix, book, true);
  book.bind("lambda",
            bl->add_option("--lambda", bl_o.lambda,
                           "regularizer (0 selects automatically)")
                ->capture_default_str(),
            &bl_o.lambda);
  book.bind("alpha",
            bl->add_option("--alpha", bl_o.alpha, "approximation factor target")
                ->capture_default_str(),
            &bl_o.alpha);
  book.bind("b",
            bl->add_option("--b", bl_o.b, "draws per block (0: automatic)")
                ->capture_default_str(),
            &bl_o.b);
  book.bind("q",
            bl->add_option("--q", bl_o.q, "block count (0: automatic)")
                ->capture_default_str(),
            &bl_o.q);
  book.bind("cb",
            bl->add_option("--cb", bl_o.cb, "landmark budget multiplier")
                ->capture_default_str(),
            &bl_o.cb);
  book.bind("cq",
            bl->add_option("--cq", bl_o.cq, "block count multiplier")
                ->capture_default_str(),
            &bl_o.cq);
  book.bind("model-out",
            bl->add_option("--model-out", bl_o.model_out, "save the model"),
            &bl_o.model_out);

  VerifyOptions ve_o;
  CLI::App* ve = app.add_subcommand(
      "verify", "repeat a randomized guarantee over --trials seeds; at least "
                "90% of the trials must pass");
  ve->fallthrough();
  add_matrix_options(ve, ve_o.matrix, book, true);
  book.bind("claim",
            ve->add_option("--claim", ve_o.claim,
                           "sandwich | classical-nystrom | projection | "
                           "concentration | exact")
                ->required(),
            &ve_o.claim);
  book.bind("lambda",
            ve->add_option("--lambda", ve_o.lambda,
                           "regularizer (0 selects automatically)")
                ->capture_default_str(),
            &ve_o.lambda);
  book.bind("alpha",
            ve->add_option("--alpha", ve_o.alpha, "approximation factor target")
                ->capture_default_str(),
            &ve_o.alpha);
  book.bind("theta",
            ve->add_option("--theta", ve_o.theta, "concentration slack")
                ->capture_default_str(),
            &ve_o.theta);
  book.bind("b",
            ve->add_option("--b", ve_o.b, "draws per block (0: automatic)")
                ->capture_default_str(),
            &ve_o.b);
  book.bind("q",
            ve->add_option("--q", ve_o.q, "block count (0: automatic)")
                ->capture_default_str(),
            &ve_o.q);
  book.bind("projections",
            ve->add_option("--projections", ve_o.projections,
                           "Monte Carlo draws for the projection claim")
                ->capture_default_str(),
            &ve_o.projections);

  SolveOptions so_o;
  CLI::App* so = app.add_subcommand(
      "solve", "recursive ladder solve of the regularized approximation");
  so->fallthrough();
  add_matrix_options(so, so_o.matrix, book, true);
  book.bind("lambda",
            so->add_option("--lambda", so_o.lambda,
                           "regularizer (0 selects automatically)")
                ->capture_default_str(),
            &so_o.lambda);
  book.bind("alpha",
            so->add_option("--alpha", so_o.alpha, "approximation factor target")
                ->capture_default_str(),
            &so_o.alpha);
  book.bind("eps",
            so->add_option("--eps", so_o.eps, "relative solution accuracy")
                ->capture_default_str(),
            &so_o.eps);
  book.bind("b",
            so->add_option("--b", so_o.b, "draws per block (0: automatic)")
                ->capture_default_str(),
            &so_o.b);
  book.bind("q",
            so->add_option("--q", so_o.q, "block count (0: automatic)")
                ->capture_default_str(),
            &so_o.q);
  book.bind("rhs",
            so->add_option("--rhs", so_o.rhs,
                           "right-hand side file, one value per line "
                           "(default: seeded Gaussian)"),
            &so_o.rhs);

  QuadOptions qu_o;
  CLI::App* qu = app.add_subcommand(
      "quad", "preconditioned quadratic minimization with energy certificate");
  qu->fallthrough();
  add_matrix_options(qu, qu_o.matrix, book, true);
  book.bind("quad-head",
            qu->add_option("--quad-head", qu_o.head,
                           "assumed head size of the spectrum")
                ->capture_default_str(),
            &qu_o.head);
  book.bind("eps",
            qu->add_option("--eps", qu_o.eps, "relative energy accuracy")
                ->capture_default_str(),
            &qu_o.eps);
  book.bind("cb",
            qu->add_option("--cb", qu_o.cb, "landmark budget multiplier")
                ->capture_default_str(),
            &qu_o.cb);
  book.bind("rhs",
            qu->add_option("--rhs", qu_o.rhs,
                           "right-hand side file, one value per line "
                           "(default: seeded Gaussian)"),
            &qu_o.rhs);

  KrrOptions kr_o;
  CLI::App* kr = app.add_subcommand(
      "krr", "block-approximated kernel ridge regression");
  kr->fallthrough();
  book.bind("data",
            kr->add_option("--data", kr_o.data,
                           "training CSV (features..., label); omit to use "
                           "the synthetic generator"),
            &kr_o.data);
  book.bind("test-data",
            kr->add_option("--test-data", kr_o.test_data,
                           "evaluation CSV (default: training set)"),
            &kr_o.test_data);
  book.bind("n",
            kr->add_option("--n", kr_o.n, "synthetic sample count")
                ->capture_default_str(),
            &kr_o.n);
  book.bind("dim",
            kr->add_option("--dim", kr_o.dim, "synthetic feature dimension")
                ->capture_default_str(),
            &kr_o.dim);
  book.bind("zeta",
            kr->add_option("--zeta", kr_o.zeta, "source smoothness in (0,1)")
                ->capture_default_str(),
            &kr_o.zeta);
  book.bind("decay",
            kr->add_option("--decay", kr_o.decay,
                           "capacity exponent in (0,1] for the regularizer "
                           "schedule")
                ->capture_default_str(),
            &kr_o.decay);
  book.bind("noise",
            kr->add_option("--noise", kr_o.noise, "synthetic label noise sd")
                ->capture_default_str(),
            &kr_o.noise);
  add_kernel_options(kr, kr_o.kernel, book);
  book.bind("lambda",
            kr->add_option("--lambda", kr_o.lambda,
                           "statistical regularizer (0: schedule from zeta, "
                           "decay, n)")
                ->capture_default_str(),
            &kr_o.lambda);
  book.bind("lambda-constant",
            kr->add_option("--lambda-constant", kr_o.lambda_constant,
                           "prefactor of the scheduled regularizer")
                ->capture_default_str(),
            &kr_o.lambda_constant);
  book.bind("alpha",
            kr->add_option("--alpha", kr_o.alpha, "approximation factor target")
                ->capture_default_str(),
            &kr_o.alpha);
  book.bind("beta",
            kr->add_option("--beta", kr_o.beta,
                           "reduced averaging knob in [1, alpha] (0: off)")
                ->capture_default_str(),
            &kr_o.beta);
  book.bind("b",
            kr->add_option("--b", kr_o.b, "draws per block (0: automatic)")
                ->capture_default_str(),
            &kr_o.b);
  book.bind("q",
            kr->add_option("--q", kr_o.q, "block count (0: automatic)")
                ->capture_default_str(),
            &kr_o.q);
  book.bind("fit-accuracy",
            kr->add_option("--fit-accuracy", kr_o.fit_accuracy,
                           "relative Euclidean accuracy of the dual solve")
                ->capture_default_str(),
            &kr_o.fit_accuracy);
  book.bind("model-out",
            kr->add_option("--model-out", kr_o.model_out, "save the model"),
            &kr_o.model_out);
  book.bind("predictions-out",
            kr->add_option("--predictions-out", kr_o.predictions_out,
                           "write evaluation-set predictions as CSV"),
            &kr_o.predictions_out);

  BenchOptions be_o;
  CLI::App* be = app.add_subcommand(
      "bench", "scaling measurements (timing-derived values vary run to run)");
  be->fallthrough();
  book.bind("mode",
            be->add_option("--mode", be_o.mode, "apply | ladder")
                ->capture_default_str(),
            &be_o.mode);
  book.bind("n",
            be->add_option("--n", be_o.n, "matrix size")->capture_default_str(),
            &be_o.n);
  book.bind("lambda",
            be->add_option("--lambda", be_o.lambda,
                           "regularizer (0 selects automatically)")
                ->capture_default_str(),
            &be_o.lambda);
  book.bind("alpha",
            be->add_option("--alpha", be_o.alpha, "approximation factor target")
                ->capture_default_str(),
            &be_o.alpha);
  book.bind("sizes",
            be->add_option("--sizes", be_o.sizes,
                           "apply: per-block draw counts for the grid"),
            &be_o.sizes);
  book.bind("q",
            be->add_option("--q", be_o.q, "ladder: base block count (0: "
                                          "automatic)")
                ->capture_default_str(),
            &be_o.q);
  book.bind("eps",
            be->add_option("--eps", be_o.eps, "ladder: solve accuracy")
                ->capture_default_str(),
            &be_o.eps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (!g.config_path.empty()) book.apply(load_config_file(g.config_path));
  if (g.threads < 1)
    throw InvalidSpecError("cli: --threads must be at least 1");
  Eigen::setNbThreads(g.threads);

  if (gen->parsed()) return run_gen(g, gen_o);
  if (rls->parsed()) return run_rls(g, rls_o);
  if (ny->parsed()) return run_nystrom(g, ny_o);
  if (bl->parsed()) return run_block(g, bl_o);
  if (ve->parsed()) return run_verify(g, ve_o);
  if (so->parsed()) return run_solve(g, so_o);
  if (qu->parsed()) return run_quad(g, qu_o);
  if (kr->parsed()) return run_krr(g, kr_o);
  if (be->parsed()) return run_bench(g, be_o);
  throw InvalidSpecError("cli: no subcommand selected");
}

}  // namespace
}  // namespace blocknys::cli

namespace blocknys::cli {

int run(int argc, char** argv) {
  try {
    return run_impl(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace blocknys::cli
