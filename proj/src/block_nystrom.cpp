#include "blocknys/block_nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/leverage.hpp"
#include "blocknys/rng.hpp"

namespace blocknys {

namespace {

Eigen::VectorXd sampling_scores(const PsdOperator& a, double lambda_prime,
                                const BlockNystromConfig& cfg,
                                std::uint64_t seed) {
  switch (cfg.leverage) {
    case LeverageMethod::kExact:
      return exact_rls(a, lambda_prime, cfg.cap).scores;
    case LeverageMethod::kRecursive:
      return approx_rls_recursive(a, lambda_prime, ApproxRlsConfig{}, seed)
          .scores;
    case LeverageMethod::kPrecomputed:
      if (!cfg.scores || cfg.scores->size() != a.n())
        throw InvalidSpecError(
            "build_block_nystrom: precomputed scores missing or mis-sized");
      return *cfg.scores;
    case LeverageMethod::kAuto:
    default:
      if (a.n() <= cfg.cap) return exact_rls(a, lambda_prime, cfg.cap).scores;
      return approx_rls_recursive(a, lambda_prime, ApproxRlsConfig{}, seed)
          .scores;
  }
}

}  // namespace

BlockNystromOperator build_block_nystrom(const PsdOperator& a, double lambda,
                                         double alpha,
                                         const BlockNystromConfig& cfg,
                                         std::uint64_t seed) {
  if (!(lambda > 0.0))
    throw InvalidSpecError("build_block_nystrom: lambda must be positive");
  if (!(alpha >= 1.0))
    throw InvalidSpecError("build_block_nystrom: alpha must be >= 1");
  if (!(cfg.c_b > 0.0) || !(cfg.c_q > 0.0))
    throw InvalidSpecError("build_block_nystrom: c_b and c_q must be positive");

  BlockNystromOperator bn;
  bn.n_ = a.n();
  bn.lambda_ = lambda;
  bn.alpha_ = alpha;
  bn.lambda_prime_ = alpha * alpha * lambda;
  bn.seed_ = seed;

  const Eigen::VectorXd scores =
      sampling_scores(a, bn.lambda_prime_, cfg, seed);
  const double d_est = scores.sum();
  const double logn = std::log(static_cast<double>(a.n()));

  Eigen::Index b = cfg.b_override;
  if (b <= 0)
    b = static_cast<Eigen::Index>(
        std::ceil(cfg.c_b * std::max(d_est, 1.0) * std::max(logn, 1.0)));
  if (cfg.max_landmarks > 0) b = std::min(b, cfg.max_landmarks);
  b = std::max<Eigen::Index>(b, 1);
  bn.b_ = b;

  Eigen::Index q = cfg.q_override;
  if (q <= 0)
    q = static_cast<Eigen::Index>(
        std::ceil(cfg.c_q * alpha * std::max(logn, 1.0)));
  q = std::max<Eigen::Index>(q, 1);

  bn.factors_.reserve(static_cast<std::size_t>(q));
  for (Eigen::Index i = 1; i <= q; ++i)
    bn.factors_.push_back(
        build_factor(a, sample_landmarks(scores, b, seed + std::uint64_t(i))));
  return bn;
}

Eigen::VectorXd BlockNystromOperator::apply(const Eigen::VectorXd& v) const {
  return apply_prefix(v, q());
}

Eigen::VectorXd BlockNystromOperator::apply_prefix(const Eigen::VectorXd& v,
                                                   Eigen::Index blocks) const {
  if (blocks < 1 || blocks > q())
    throw InvalidSpecError("apply_prefix: block count out of range");
  if (v.size() != n_)
    throw DimensionMismatchError("block apply: vector length mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (Eigen::Index i = 0; i < blocks; ++i)
    out += factors_[static_cast<std::size_t>(i)].apply(v);
  return out / static_cast<double>(blocks);
}

Eigen::MatrixXd BlockNystromOperator::materialize_approx(
    Eigen::Index cap) const {
  if (n_ > cap)
    throw TooLargeError("block materialization exceeds the desk cap");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_, n_);
  const double scale = 1.0 / static_cast<double>(q());
  for (const NystromFactor& f : factors_)
    acc.selfadjointView<Eigen::Lower>().rankUpdate(f.reduced_root(),
                                                   scale);
  return Eigen::MatrixXd(acc.selfadjointView<Eigen::Lower>());
}

ApproximationCheck verify_approximation(const PsdOperator& a,
                                        const BlockNystromOperator& bn,
                                        Eigen::Index cap) {
  if (a.n() != bn.n())
    throw DimensionMismatchError("verify_approximation: size mismatch");
  Eigen::MatrixXd x = bn.materialize_approx(cap);
  Eigen::MatrixXd y = a.materialize(cap);
  x.diagonal().array() += bn.lambda();
  y.diagonal().array() += bn.lambda();
  const LoewnerGap gap = loewner_gap(x, y, cap);
  ApproximationCheck out;
  out.gmin = gap.gmin;
  out.gmax = gap.gmax;
  out.alpha_measured =
      gap.gmin > 0.0 ? 1.0 / gap.gmin : std::numeric_limits<double>::infinity();
  out.upper_ok = gap.gmax <= 1.0 + 1e-7;
  return out;
}

LoewnerGap estimate_expected_projection(const PsdOperator& a,
                                        double lambda_prime, Eigen::Index b,
                                        int trials, std::uint64_t seed,
                                        Eigen::Index cap) {
  if (trials < 1)
    throw InvalidSpecError("estimate_expected_projection: trials must be >= 1");
  if (!(lambda_prime > 0.0))
    throw InvalidSpecError(
        "estimate_expected_projection: lambda' must be positive");
  const Eigen::MatrixXd ad = a.materialize(cap);
  const SymEig ea = sym_eig(ad);
  const Eigen::VectorXd mu = ea.values.cwiseMax(0.0);
  const Eigen::MatrixXd root =
      ea.vectors * mu.cwiseSqrt().asDiagonal() * ea.vectors.transpose();
  const Eigen::VectorXd scores = dense_rls(ad, lambda_prime, cap);

  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(a.n(), a.n());
  for (int t = 0; t < trials; ++t) {
    const LandmarkSet s =
        sample_landmarks(scores, b, seed + std::uint64_t(t) + 1);
    std::vector<Eigen::Index> unique(s.indices.begin(), s.indices.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    Eigen::MatrixXd x(a.n(), static_cast<Eigen::Index>(unique.size()));
    for (std::size_t j = 0; j < unique.size(); ++j)
      x.col(static_cast<Eigen::Index>(j)) = root.col(unique[j]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::Index r = qr.rank();
    if (r == 0) continue;
    const Eigen::MatrixXd qthin =
        qr.householderQ() * Eigen::MatrixXd::Identity(a.n(), r);
    mean.selfadjointView<Eigen::Lower>().rankUpdate(qthin,
                                                    1.0 / double(trials));
  }
  mean = Eigen::MatrixXd(mean.selfadjointView<Eigen::Lower>());

  // Reference: the ridge projection A (A + lambda' I)^{-1}.
  Eigen::VectorXd ridge(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    ridge(i) = mu(i) / (mu(i) + lambda_prime);
  const Eigen::MatrixXd target =
      ea.vectors * ridge.asDiagonal() * ea.vectors.transpose();
  return loewner_gap(mean, target, cap);
}

void save_block_nystrom(const std::string& path,
                        const BlockNystromOperator& bn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write block container: " + path);
  nlohmann::ordered_json header;
  header["n"] = bn.n();
  header["q"] = bn.q();
  header["b"] = bn.b();
  header["lambda"] = bn.lambda();
  header["alpha"] = bn.alpha();
  header["lambda_prime"] = bn.lambda_prime();
  header["seed"] = bn.seed();
  const std::string htext = header.dump();
  const std::uint64_t hlen = htext.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  for (const NystromFactor& f : bn.factors()) save_factor_stream(out, f);
  if (!out) throw IoError("write failed for block container: " + path);
}

BlockNystromOperator load_block_nystrom(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open block container: " + path);
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in || hlen == 0 || hlen > (1u << 20))
    throw IoError("corrupt block container header: " + path);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw IoError("truncated block container header: " + path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(htext);
  } catch (const nlohmann::json::exception&) {
    throw IoError("unparseable block container header: " + path);
  }

  BlockNystromOperator bn;
  try {
    bn.n_ = header.at("n").get<Eigen::Index>();
    bn.b_ = header.at("b").get<Eigen::Index>();
    bn.lambda_ = header.at("lambda").get<double>();
    bn.alpha_ = header.at("alpha").get<double>();
    bn.lambda_prime_ = header.at("lambda_prime").get<double>();
    bn.seed_ = header.at("seed").get<std::uint64_t>();
    const auto q = header.at("q").get<Eigen::Index>();
    if (q < 1 || bn.n_ < 1) throw IoError("bad block container sizes: " + path);
    bn.factors_.reserve(static_cast<std::size_t>(q));
    for (Eigen::Index i = 0; i < q; ++i) {
      NystromFactor f = load_factor_stream(in, path);
      if (f.n() != bn.n_)
        throw IoError("block container factor size mismatch: " + path);
      bn.factors_.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception&) {
    throw IoError("block container header missing fields: " + path);
  }
  in.peek();
  if (!in.eof()) throw IoError("trailing bytes in block container: " + path);
  return bn;
}

}  // namespace blocknys
