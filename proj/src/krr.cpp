#include "blocknys/krr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "blocknys/block_nystrom.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/leverage.hpp"
#include "blocknys/nystrom.hpp"
#include "blocknys/recursive_solve.hpp"
#include "blocknys/schedule.hpp"

namespace blocknys {

namespace {

void write_raw(std::ostream& out, const void* data, std::size_t bytes) {
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(bytes));
}

void read_raw(std::istream& in, void* data, std::size_t bytes,
              const std::string& what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (!in) throw IoError("truncated model container: " + what);
}

KernelKind kernel_kind_from_name(const std::string& name,
                                 const std::string& what) {
  if (name == "rbf") return KernelKind::kRbf;
  if (name == "polynomial") return KernelKind::kPolynomial;
  if (name == "linear") return KernelKind::kLinear;
  throw IoError("unknown kernel kind \"" + name + "\" in " + what);
}

}  // namespace

double KrrModel::predict(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw DimensionMismatchError(
        "predict: query dimension " + std::to_string(x.size()) +
        " does not match training dimension " + std::to_string(dim_));
  double acc = 0.0;
  long long used = 0;
  for (std::size_t i = 0; i < landmarks_.size(); ++i) {
    const Eigen::MatrixXd& li = landmarks_[i];
    const Eigen::VectorXd& ui = coeffs_[i];
    double block = 0.0;
    for (Eigen::Index t = 0; t < li.rows(); ++t) {
      block += ui(t) * kernel_eval(spec_, li.row(t).transpose(), x);
      ++used;
    }
    acc += block;
  }
  evals_->fetch_add(used, std::memory_order_relaxed);
  return acc / static_cast<double>(landmarks_.size());
}

Eigen::VectorXd KrrModel::predict_batch(const Eigen::MatrixXd& points) const {
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    out(i) = predict(points.row(i).transpose());
  return out;
}

KrrModel fit_block_krr(const Dataset& data, const KernelSpec& spec,
                       double lambda, double alpha, const KrrConfig& cfg,
                       std::uint64_t seed) {
  if (!(lambda > 0.0))
    throw InvalidSpecError("krr: lambda must be positive");
  if (!(alpha >= 1.0)) throw InvalidSpecError("krr: alpha must be >= 1");
  if (!(cfg.fit_accuracy > 0.0 && cfg.fit_accuracy < 1.0))
    throw InvalidSpecError("krr: fit accuracy must lie in (0, 1)");
  if (cfg.beta && !(*cfg.beta >= 1.0 && *cfg.beta <= alpha))
    throw InvalidSpecError("krr: beta must satisfy 1 <= beta <= alpha");

  const KernelOperator kernel = build_kernel(data, spec);
  const Eigen::Index n = kernel.n();
  const double matrix_reg = static_cast<double>(n) * lambda;
  const double alpha_sample =
      cfg.beta ? std::sqrt(*cfg.beta * alpha) : alpha;
  const double lambda_prime = alpha_sample * alpha_sample * matrix_reg;

  Eigen::VectorXd scores;
  if (cfg.scores) {
    if (cfg.scores->size() != n)
      throw DimensionMismatchError(
          "krr: supplied sampling scores have length " +
          std::to_string(cfg.scores->size()) + " for n = " +
          std::to_string(n));
    scores = *cfg.scores;
  } else if (n <= cfg.cap) {
    scores = exact_rls(kernel, lambda_prime, cfg.cap).scores;
  } else {
    scores =
        approx_rls_recursive(kernel, lambda_prime, ApproxRlsConfig{}, seed)
            .scores;
  }

  BlockNystromConfig bcfg;
  bcfg.leverage = LeverageMethod::kPrecomputed;
  bcfg.scores = scores;
  bcfg.c_b = cfg.c_b;
  bcfg.c_q = cfg.c_q;
  bcfg.b_override = cfg.b_override;
  bcfg.q_override = cfg.q_override;
  bcfg.cap = cfg.cap;
  if (cfg.beta && cfg.q_override <= 0)
    bcfg.q_override = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(std::ceil(
               cfg.c_q * *cfg.beta *
               std::max(std::log(static_cast<double>(n)), 1.0))));
  const BlockNystromOperator bn =
      build_block_nystrom(kernel, matrix_reg, alpha_sample, bcfg, seed);

  ScheduleConfig scfg;
  scfg.q0 = bn.q();
  const RecursiveSolver solver(
      bn, build_schedule(alpha_sample, matrix_reg, bn.lambda_prime(), scfg));

  KrrModel model;
  model.spec_ = spec;
  model.lambda_ = lambda;
  model.alpha_ = alpha;
  model.b_ = bn.b();
  model.dim_ = data.dim();
  model.dual_ = solver.solve(data.labels, cfg.fit_accuracy,
                             &model.fit_report_);

  model.landmarks_.reserve(static_cast<std::size_t>(bn.q()));
  model.coeffs_.reserve(static_cast<std::size_t>(bn.q()));
  model.draws_.reserve(static_cast<std::size_t>(bn.q()));
  for (const NystromFactor& f : bn.factors()) {
    // The factor stores only the deduplicated landmark set, so the original
    // with-replacement draw is replayed from its recorded seed.
    const std::vector<Eigen::Index> draw =
        sample_landmarks(scores, bn.b(), f.seed()).indices;
    const std::vector<Eigen::Index>& uniq = f.landmarks();
    std::vector<double> mult(uniq.size(), 0.0);
    std::vector<std::size_t> pos(draw.size(), 0);
    for (std::size_t t = 0; t < draw.size(); ++t) {
      const auto it = std::lower_bound(uniq.begin(), uniq.end(), draw[t]);
      if (it == uniq.end() || *it != draw[t])
        throw Error("krr: replayed draw disagrees with the stored factor");
      pos[t] = static_cast<std::size_t>(it - uniq.begin());
      mult[pos[t]] += 1.0;
    }
    for (const double m : mult)
      if (m == 0.0)
        throw Error("krr: replayed draw disagrees with the stored factor");

    // Coefficients of the deduplicated factor, spread over the duplicated
    // draw so that the repeated kernel evaluations sum back to one copy.
    const Eigen::VectorXd base =
        f.w_pinv_apply(f.c().transpose() * model.dual_);
    Eigen::VectorXd u(static_cast<Eigen::Index>(draw.size()));
    Eigen::MatrixXd points(static_cast<Eigen::Index>(draw.size()),
                           data.dim());
    for (std::size_t t = 0; t < draw.size(); ++t) {
      u(static_cast<Eigen::Index>(t)) =
          base(static_cast<Eigen::Index>(pos[t])) / mult[pos[t]];
      points.row(static_cast<Eigen::Index>(t)) = data.points.row(draw[t]);
    }
    model.draws_.push_back(draw);
    model.coeffs_.push_back(std::move(u));
    model.landmarks_.push_back(std::move(points));
  }
  model.evals_ = std::make_shared<std::atomic<long long>>(0);
  return model;
}

double empirical_risk(const KrrModel& model, const Dataset& eval_data) {
  if (eval_data.n() < 1)
    throw InvalidSpecError("empirical risk: the evaluation set is empty");
  if (eval_data.dim() != model.dim())
    throw DimensionMismatchError(
        "empirical risk: evaluation dimension " +
        std::to_string(eval_data.dim()) + " does not match the model's " +
        std::to_string(model.dim()));
  if (eval_data.labels.size() != eval_data.n())
    throw DimensionMismatchError("empirical risk: label count mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eval_data.n(); ++i) {
    const double diff =
        model.predict(eval_data.points.row(i).transpose()) -
        eval_data.labels(i);
    acc += diff * diff;
  }
  return acc / static_cast<double>(eval_data.n());
}

RegularizerSchedule schedule_lambda(double zeta, double gamma, Eigen::Index n,
                                    double constant) {
  if (!(zeta > 0.0 && zeta < 1.0))
    throw InvalidSpecError("schedule: zeta must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw InvalidSpecError("schedule: gamma must lie in (0, 1]");
  if (n < 1) throw InvalidSpecError("schedule: n must be >= 1");
  if (!(constant > 0.0))
    throw InvalidSpecError("schedule: constant must be positive");
  RegularizerSchedule out;
  out.zeta = zeta;
  out.gamma = gamma;
  out.n = n;
  out.in_regime = zeta < 0.5;
  const double exponent = 2.0 * zeta + gamma;
  const double nd = static_cast<double>(n);
  out.lambda_star = exponent > 1.0 ? constant * std::pow(nd, -1.0 / exponent)
                                   : constant / nd;
  return out;
}

void save_krr_model(const std::string& path, const KrrModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model container: " + path);
  nlohmann::ordered_json header;
  header["kernel"] = kernel_kind_name(model.kernel().kind);
  header["bandwidth"] = model.kernel().bandwidth;
  header["degree"] = model.kernel().degree;
  header["offset"] = model.kernel().offset;
  header["bound"] = model.kernel().bound;
  header["lambda"] = model.lambda();
  header["alpha"] = model.alpha();
  header["q"] = model.q();
  header["b"] = model.b();
  header["dim"] = model.dim();
  const std::string htext = header.dump();
  const std::uint64_t hlen = htext.size();
  write_raw(out, &hlen, sizeof(hlen));
  write_raw(out, htext.data(), htext.size());
  for (Eigen::Index i = 0; i < model.q(); ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    std::vector<std::int64_t> draw(model.draws()[idx].begin(),
                                   model.draws()[idx].end());
    write_raw(out, draw.data(), draw.size() * sizeof(std::int64_t));
    const Eigen::MatrixXd& points = model.landmark_points()[idx];
    write_raw(out, points.data(),
              static_cast<std::size_t>(points.size()) * sizeof(double));
    const Eigen::VectorXd& u = model.coefficients()[idx];
    write_raw(out, u.data(),
              static_cast<std::size_t>(u.size()) * sizeof(double));
  }
  if (!out) throw IoError("write failed for model container: " + path);
}

KrrModel load_krr_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model container: " + path);
  std::uint64_t hlen = 0;
  read_raw(in, &hlen, sizeof(hlen), path);
  if (hlen == 0 || hlen > (1u << 20))
    throw IoError("corrupt model container header: " + path);
  std::string htext(hlen, '\0');
  read_raw(in, htext.data(), hlen, path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(htext);
  } catch (const nlohmann::json::exception&) {
    throw IoError("unparseable model container header: " + path);
  }

  KrrModel model;
  Eigen::Index q = 0;
  try {
    model.spec_.kind =
        kernel_kind_from_name(header.at("kernel").get<std::string>(), path);
    model.spec_.bandwidth = header.at("bandwidth").get<double>();
    model.spec_.degree = header.at("degree").get<int>();
    model.spec_.offset = header.at("offset").get<double>();
    model.spec_.bound = header.at("bound").get<double>();
    model.lambda_ = header.at("lambda").get<double>();
    model.alpha_ = header.at("alpha").get<double>();
    q = header.at("q").get<Eigen::Index>();
    model.b_ = header.at("b").get<Eigen::Index>();
    model.dim_ = header.at("dim").get<Eigen::Index>();
  } catch (const nlohmann::json::exception&) {
    throw IoError("model container header missing fields: " + path);
  }
  if (q < 1 || model.b_ < 1 || model.dim_ < 1)
    throw IoError("bad model container sizes: " + path);

  model.landmarks_.reserve(static_cast<std::size_t>(q));
  model.coeffs_.reserve(static_cast<std::size_t>(q));
  model.draws_.reserve(static_cast<std::size_t>(q));
  for (Eigen::Index i = 0; i < q; ++i) {
    std::vector<std::int64_t> draw(static_cast<std::size_t>(model.b_));
    read_raw(in, draw.data(), draw.size() * sizeof(std::int64_t), path);
    Eigen::MatrixXd points(model.b_, model.dim_);
    read_raw(in, points.data(),
             static_cast<std::size_t>(points.size()) * sizeof(double), path);
    Eigen::VectorXd u(model.b_);
    read_raw(in, u.data(),
             static_cast<std::size_t>(u.size()) * sizeof(double), path);
    model.draws_.emplace_back(draw.begin(), draw.end());
    model.landmarks_.push_back(std::move(points));
    model.coeffs_.push_back(std::move(u));
  }
  in.peek();
  if (!in.eof()) throw IoError("trailing bytes in model container: " + path);
  model.evals_ = std::make_shared<std::atomic<long long>>(0);
  return model;
}

}  // namespace blocknys
