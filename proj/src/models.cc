// Copyright 2026 The cfaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfaudit/models.h"

#include <cmath>
#include <numbers>

#include "cfaudit/common.h"
#include "json.hpp"

namespace cfaudit {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

constexpr int kModelFormatVersion = 1;

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

VectorXd sigmoid_vec(const VectorXd& z) { return z.unaryExpr([](double v) { return sigmoid(v); }); }

double mean_log_loss(const VectorXd& z, const VectorXd& y) {
  double s = 0.0;
  for (Index i = 0; i < z.size(); ++i) s += softplus(z[i]) - y[i] * z[i];
  return s / static_cast<double>(z.size());
}

constexpr std::size_t kMlpLayers = 4;

std::size_t layer_in(std::size_t l, std::size_t input_dim) {
  return l == 0 ? input_dim : kMlpHidden[l - 1];
}
std::size_t layer_out(std::size_t l) { return l < 3 ? kMlpHidden[l] : 1; }

json vec_to_json(const VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

VectorXd json_to_vec(const json& j, std::size_t expected, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != expected) {
    throw DataError(std::string("model file: ") + what + " has " + std::to_string(v.size()) +
                    " values, expected " + std::to_string(expected));
  }
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

std::string_view model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::kLogReg: return "logreg";
    case ModelKind::kGaussianNB: return "gaussian_nb";
    case ModelKind::kMlp: return "mlp";
  }
  return "logreg";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "logreg") return ModelKind::kLogReg;
  if (name == "gnb" || name == "gaussian_nb") return ModelKind::kGaussianNB;
  if (name == "mlp") return ModelKind::kMlp;
  throw UsageError("model must be logreg, gnb or mlp, got '" + std::string(name) + "'");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ---- logistic regression ----

double logreg_loss_grad(const MatrixXd& X, const VectorXd& y, const LogRegParams& p, double l2,
                        LogRegParams* grad) {
  const VectorXd z = (X * p.w).array() + p.b;
  const double loss = mean_log_loss(z, y) + 0.5 * l2 * p.w.squaredNorm();
  if (grad) {
    const double n = static_cast<double>(X.rows());
    const VectorXd r = sigmoid_vec(z) - y;
    grad->w = X.transpose() * r / n + l2 * p.w;
    grad->b = r.sum() / n;
  }
  return loss;
}

LogRegParams train_logreg(const MatrixXd& X, const VectorXd& y, const TrainParams& params) {
  LogRegParams p{VectorXd::Zero(X.cols()), 0.0};
  LogRegParams g;
  double f = logreg_loss_grad(X, y, p, params.l2, &g);
  double step = 1.0;
  for (std::size_t it = 0; it < params.max_iter; ++it) {
    const double gnorm2 = g.w.squaredNorm() + g.b * g.b;
    if (std::sqrt(gnorm2) < params.tol) break;
    step = std::min(step * 2.0, 1e6);
    // Armijo backtracking.
    LogRegParams cand;
    double fc = 0.0;
    while (true) {
      cand.w = p.w - step * g.w;
      cand.b = p.b - step * g.b;
      fc = logreg_loss_grad(X, y, cand, params.l2, nullptr);
      if (fc <= f - 0.5 * step * gnorm2 || step < 1e-12) break;
      step *= 0.5;
    }
    if (step < 1e-12) break;
    p = std::move(cand);
    f = logreg_loss_grad(X, y, p, params.l2, &g);
  }
  return p;
}

// ---- Gaussian naive Bayes ----

GnbParams fit_gnb(const MatrixXd& X, const VectorXd& y, double var_smoothing) {
  const Index d = X.cols();
  const double n = static_cast<double>(X.rows());
  // Smoothing scales with the largest feature variance of the whole data.
  const VectorXd mean_all = X.colwise().mean();
  const double max_var = (X.rowwise() - mean_all.transpose()).array().square().colwise().mean().maxCoeff();
  const double eps = var_smoothing * (max_var > 0 ? max_var : 1.0);

  GnbParams p;
  p.theta = MatrixXd::Zero(2, d);
  p.var = MatrixXd::Zero(2, d);
  for (int c = 0; c < 2; ++c) {
    std::vector<Index> rows;
    for (Index i = 0; i < X.rows(); ++i) {
      if (static_cast<int>(y[i]) == c) rows.push_back(i);
    }
    const double nc = static_cast<double>(rows.size());
    VectorXd mu = VectorXd::Zero(d);
    for (Index i : rows) mu += X.row(i).transpose();
    mu /= nc;
    VectorXd var = VectorXd::Zero(d);
    for (Index i : rows) var += (X.row(i).transpose() - mu).array().square().matrix();
    var /= nc;
    p.theta.row(c) = mu.transpose();
    p.var.row(c) = (var.array() + eps).matrix().transpose();
    p.log_prior[c] = std::log(nc / n);
  }
  return p;
}

double gnb_posterior(const GnbParams& p, const VectorXd& x) {
  double jll[2];
  for (int c = 0; c < 2; ++c) {
    const auto var = p.var.row(c).transpose().array();
    const auto diff = x.array() - p.theta.row(c).transpose().array();
    jll[c] = p.log_prior[c] - 0.5 * (2.0 * std::numbers::pi * var).log().sum() -
             0.5 * (diff.square() / var).sum();
  }
  return sigmoid(jll[1] - jll[0]);
}

// ---- MLP ----

MlpParams MlpParams::zeros(std::size_t input_dim) {
  MlpParams p;
  for (std::size_t l = 0; l < kMlpLayers; ++l) {
    p.W.push_back(MatrixXd::Zero(static_cast<Index>(layer_out(l)),
                                 static_cast<Index>(layer_in(l, input_dim))));
    p.b.push_back(VectorXd::Zero(static_cast<Index>(layer_out(l))));
  }
  return p;
}

std::size_t MlpParams::size() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < W.size(); ++l) n += W[l].size() + b[l].size();
  return n;
}

VectorXd MlpParams::flatten() const {
  VectorXd flat(static_cast<Index>(size()));
  Index k = 0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    flat.segment(k, W[l].size()) = Eigen::Map<const VectorXd>(W[l].data(), W[l].size());
    k += W[l].size();
    flat.segment(k, b[l].size()) = b[l];
    k += b[l].size();
  }
  return flat;
}

MlpParams MlpParams::unflatten(const VectorXd& flat, std::size_t input_dim) {
  MlpParams p = zeros(input_dim);
  if (static_cast<std::size_t>(flat.size()) != p.size()) {
    throw DataError("MLP parameter vector has " + std::to_string(flat.size()) +
                    " values, expected " + std::to_string(p.size()));
  }
  Index k = 0;
  for (std::size_t l = 0; l < kMlpLayers; ++l) {
    p.W[l] = Eigen::Map<const MatrixXd>(flat.data() + k, p.W[l].rows(), p.W[l].cols());
    k += p.W[l].size();
    p.b[l] = flat.segment(k, p.b[l].size());
    k += p.b[l].size();
  }
  return p;
}

double mlp_forward(const MlpParams& p, const VectorXd& x) {
  VectorXd a = x;
  for (std::size_t l = 0; l + 1 < kMlpLayers; ++l) {
    a = (p.W[l] * a + p.b[l]).cwiseMax(0.0);
  }
  return sigmoid((p.W.back() * a + p.b.back())[0]);
}

double mlp_loss_grad(const MatrixXd& X, const VectorXd& y, const MlpParams& p, double l2,
                     MlpParams* grad) {
  const double n = static_cast<double>(X.rows());
  std::vector<MatrixXd> acts{X.transpose()};  // each layer: units x n
  std::vector<MatrixXd> pre;
  for (std::size_t l = 0; l < kMlpLayers; ++l) {
    MatrixXd z = (p.W[l] * acts.back()).colwise() + p.b[l];
    pre.push_back(z);
    acts.push_back(l + 1 < kMlpLayers ? MatrixXd(z.cwiseMax(0.0)) : z);
  }
  const VectorXd z_out = pre.back().row(0).transpose();
  double loss = mean_log_loss(z_out, y);
  for (const auto& W : p.W) loss += 0.5 * l2 * W.squaredNorm();
  if (!grad) return loss;

  *grad = MlpParams::zeros(static_cast<std::size_t>(X.cols()));
  MatrixXd delta = ((sigmoid_vec(z_out) - y) / n).transpose();  // 1 x n
  for (std::size_t l = kMlpLayers; l-- > 0;) {
    grad->W[l] = delta * acts[l].transpose() + l2 * p.W[l];
    grad->b[l] = delta.rowwise().sum();
    if (l == 0) break;
    MatrixXd back = p.W[l].transpose() * delta;
    delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return loss;
}

MlpParams init_mlp(std::size_t input_dim, std::uint64_t seed) {
  MlpParams p = MlpParams::zeros(input_dim);
  Rng rng(seed);
  for (std::size_t l = 0; l < kMlpLayers; ++l) {
    const double scale = std::sqrt(2.0 / static_cast<double>(p.W[l].cols()));
    // Column-major fill keeps the draw order fixed.
    for (Index j = 0; j < p.W[l].cols(); ++j) {
      for (Index i = 0; i < p.W[l].rows(); ++i) p.W[l](i, j) = scale * rng.normal();
    }
  }
  return p;
}

MlpParams train_mlp(const MatrixXd& X, const VectorXd& y, const TrainParams& params,
                    std::uint64_t seed) {
  const std::size_t d = static_cast<std::size_t>(X.cols());
  MlpParams p = init_mlp(d, derive_seed(seed, "mlp-init"));
  Rng shuffle_rng(derive_seed(seed, "mlp-shuffle"));

  VectorXd theta = p.flatten();
  VectorXd m = VectorXd::Zero(theta.size());
  VectorXd v = VectorXd::Zero(theta.size());
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::size_t t = 0;

  std::vector<Index> order(static_cast<std::size_t>(X.rows()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
  const std::size_t batch = std::max<std::size_t>(1, params.batch_size);
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      MatrixXd xb(static_cast<Index>(end - start), X.cols());
      VectorXd yb(static_cast<Index>(end - start));
      for (std::size_t i = start; i < end; ++i) {
        xb.row(static_cast<Index>(i - start)) = X.row(order[i]);
        yb[static_cast<Index>(i - start)] = y[order[i]];
      }
      MlpParams g;
      mlp_loss_grad(xb, yb, MlpParams::unflatten(theta, d), params.mlp_l2, &g);
      const VectorXd gf = g.flatten();
      ++t;
      m = kBeta1 * m + (1 - kBeta1) * gf;
      v = kBeta2 * v + (1 - kBeta2) * gf.cwiseProduct(gf);
      const double c1 = 1 - std::pow(kBeta1, static_cast<double>(t));
      const double c2 = 1 - std::pow(kBeta2, static_cast<double>(t));
      theta.array() -= params.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
    }
  }
  return MlpParams::unflatten(theta, d);
}

// ---- model wrapper ----

TrainedModel::TrainedModel(ModelKind kind, FeatureConfig features, Params params,
                           std::uint64_t seed)
    : kind_(kind), features_(features), params_(std::move(params)), seed_(seed) {
  validate(features_);
  const bool ok = (kind == ModelKind::kLogReg && std::holds_alternative<LogRegParams>(params_)) ||
                  (kind == ModelKind::kGaussianNB && std::holds_alternative<GnbParams>(params_)) ||
                  (kind == ModelKind::kMlp && std::holds_alternative<MlpParams>(params_));
  if (!ok) throw std::invalid_argument("model kind does not match its parameters");
}

double TrainedModel::predict_proba(std::string_view text) const {
  return predict_proba_features(featurize(text, features_));
}

double TrainedModel::predict_proba_features(const VectorXd& x) const {
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LogRegParams>) {
          return sigmoid(p.w.dot(x) + p.b);
        } else if constexpr (std::is_same_v<P, GnbParams>) {
          return gnb_posterior(p, x);
        } else {
          return mlp_forward(p, x);
        }
      },
      params_);
}

std::string TrainedModel::to_json() const {
  json j;
  j["format"] = "cfaudit-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = std::string(model_kind_name(kind_));
  j["seed"] = seed_;
  j["features"] = {{"method", std::string(feature_method_name(features_.method))},
                   {"dim", features_.dim},
                   {"hash_seed", features_.hash_seed}};
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LogRegParams>) {
          j["params"] = {{"w", vec_to_json(p.w)}, {"b", p.b}};
        } else if constexpr (std::is_same_v<P, GnbParams>) {
          const MatrixXd theta_t = p.theta.transpose();  // row-major flattening
          const MatrixXd var_t = p.var.transpose();
          j["params"] = {
              {"theta", vec_to_json(Eigen::Map<const VectorXd>(theta_t.data(), theta_t.size()))},
              {"var", vec_to_json(Eigen::Map<const VectorXd>(var_t.data(), var_t.size()))},
              {"log_prior", vec_to_json(p.log_prior)}};
        } else {
          j["params"] = {{"flat", vec_to_json(p.flatten())}};
        }
      },
      params_);
  return j.dump();
}

TrainedModel TrainedModel::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "cfaudit-model") throw DataError("not a cfaudit model file");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw DataError("unsupported model file version " + j.at("version").dump());
    }
    FeatureConfig fc;
    fc.method = parse_feature_method(j.at("features").at("method").get<std::string>());
    fc.dim = j.at("features").at("dim").get<std::size_t>();
    fc.hash_seed = j.at("features").at("hash_seed").get<std::uint64_t>();
    if (fc.dim < 2) throw DataError("model file: feature dim must be at least 2");
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    const auto seed = j.at("seed").get<std::uint64_t>();
    const json& pj = j.at("params");
    const Index d = static_cast<Index>(fc.dim);
    switch (kind) {
      case ModelKind::kLogReg: {
        LogRegParams p{json_to_vec(pj.at("w"), fc.dim, "w"), pj.at("b").get<double>()};
        return TrainedModel(kind, fc, std::move(p), seed);
      }
      case ModelKind::kGaussianNB: {
        GnbParams p;
        const VectorXd theta = json_to_vec(pj.at("theta"), 2 * fc.dim, "theta");
        const VectorXd var = json_to_vec(pj.at("var"), 2 * fc.dim, "var");
        p.theta = Eigen::Map<const MatrixXd>(theta.data(), d, 2).transpose();
        p.var = Eigen::Map<const MatrixXd>(var.data(), d, 2).transpose();
        p.log_prior = json_to_vec(pj.at("log_prior"), 2, "log_prior");
        return TrainedModel(kind, fc, std::move(p), seed);
      }
      case ModelKind::kMlp: {
        const auto flat = pj.at("flat").get<std::vector<double>>();
        MlpParams p = MlpParams::unflatten(
            Eigen::Map<const VectorXd>(flat.data(), static_cast<Index>(flat.size())), fc.dim);
        return TrainedModel(kind, fc, std::move(p), seed);
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
  throw DataError("malformed model file");
}

TrainedModel train(const std::vector<std::string>& texts, const std::vector<int>& labels,
                   ModelKind kind, const FeatureConfig& features, const TrainParams& params,
                   std::uint64_t seed, std::size_t workers) {
  validate(features);
  if (texts.empty()) throw DataError("cannot train on an empty corpus");
  if (texts.size() != labels.size()) throw DataError("texts and labels differ in length");
  std::size_t ones = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw DataError("labels must be 0 or 1");
    ones += static_cast<std::size_t>(l);
  }
  if (ones == 0 || ones == labels.size()) {
    throw DataError("training corpus has a single class; both labels are required");
  }
  const MatrixXd X = featurize_all(texts, features, workers);
  VectorXd y(static_cast<Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y[static_cast<Index>(i)] = labels[i];
  switch (kind) {
    case ModelKind::kLogReg:
      return TrainedModel(kind, features, train_logreg(X, y, params), seed);
    case ModelKind::kGaussianNB:
      return TrainedModel(kind, features, fit_gnb(X, y, params.var_smoothing), seed);
    case ModelKind::kMlp:
      return TrainedModel(kind, features, train_mlp(X, y, params, seed), seed);
  }
  throw std::invalid_argument("unknown model kind");
}

double evaluate(const Classifier& model, const std::vector<std::string>& texts,
                const std::vector<int>& labels, std::size_t workers) {
  if (texts.empty()) throw DataError("cannot evaluate on an empty corpus");
  if (texts.size() != labels.size()) throw DataError("texts and labels differ in length");
  std::vector<int> correct(texts.size(), 0);
  parallel_for(texts.size(), workers,
               [&](std::size_t i) { correct[i] = model.predict(texts[i]) == labels[i] ? 1 : 0; });
  std::size_t sum = 0;
  for (int c : correct) sum += static_cast<std::size_t>(c);
  return static_cast<double>(sum) / static_cast<double>(texts.size());
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, model.to_json() + "\n");
}

TrainedModel load_model(const std::filesystem::path& path) {
  return TrainedModel::from_json(read_file(path));
}

}  // namespace cfaudit
