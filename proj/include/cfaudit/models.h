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

#ifndef CFAUDIT_MODELS_H_
#define CFAUDIT_MODELS_H_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cfaudit {

enum class FeatureMethod { kHashedBow, kHashedEmbedding };

std::string_view feature_method_name(FeatureMethod m);
FeatureMethod parse_feature_method(std::string_view name);

struct FeatureConfig {
  FeatureMethod method = FeatureMethod::kHashedBow;
  std::size_t dim = 32;
  std::uint64_t hash_seed = 0;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

// Throws UsageError when dim < 2.
void validate(const FeatureConfig& cfg);

// Lowercased word tokens of `text`, hashed into `dim` buckets.
// Bag of words: signed counts, then L2-normalized. Embedding: the average of
// per-token pseudorandom unit vectors. Empty text gives the zero vector.
Eigen::VectorXd featurize(std::string_view text, const FeatureConfig& cfg);
// One row per text.
Eigen::MatrixXd featurize_all(const std::vector<std::string>& texts, const FeatureConfig& cfg,
                              std::size_t workers = 1);

// Anything that scores text. Auditing only needs this interface, so external
// model adapters can be plugged in.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual double predict_proba(std::string_view text) const = 0;
  int predict(std::string_view text) const { return predict_proba(text) >= 0.5 ? 1 : 0; }
};

enum class ModelKind { kLogReg, kGaussianNB, kMlp };

std::string_view model_kind_name(ModelKind k);
// Accepts logreg, gnb / gaussian_nb, mlp.
ModelKind parse_model_kind(std::string_view name);

struct TrainParams {
  // logreg: mean log-loss + l2/2 |w|^2, gradient descent with backtracking.
  double l2 = 1e-3;
  std::size_t max_iter = 500;
  double tol = 1e-6;
  // gnb
  double var_smoothing = 1e-9;
  // mlp: Adam on shuffled mini-batches.
  double mlp_l2 = 1e-4;
  double learning_rate = 1e-2;
  std::size_t epochs = 60;
  std::size_t batch_size = 32;
};

struct LogRegParams {
  Eigen::VectorXd w;
  double b = 0.0;
};

struct GnbParams {
  Eigen::MatrixXd theta;  // 2 x d class means
  Eigen::MatrixXd var;    // 2 x d smoothed class variances
  Eigen::Vector2d log_prior = Eigen::Vector2d::Zero();
};

inline constexpr std::size_t kMlpHidden[3] = {12, 8, 6};

// Layers d -> 12 -> 8 -> 6 -> 1; ReLU on hidden layers, sigmoid output.
struct MlpParams {
  std::vector<Eigen::MatrixXd> W;  // W[l] is out x in
  std::vector<Eigen::VectorXd> b;

  static MlpParams zeros(std::size_t input_dim);
  std::size_t size() const;
  Eigen::VectorXd flatten() const;
  static MlpParams unflatten(const Eigen::VectorXd& flat, std::size_t input_dim);
};

double sigmoid(double z);

// Mean log-loss plus l2/2 |w|^2 over rows of X. Writes the gradient when the
// output pointers are non-null.
double logreg_loss_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const LogRegParams& p, double l2, LogRegParams* grad);
LogRegParams train_logreg(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const TrainParams& params);

GnbParams fit_gnb(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double var_smoothing);
// P(y = 1 | x).
double gnb_posterior(const GnbParams& p, const Eigen::VectorXd& x);

double mlp_forward(const MlpParams& p, const Eigen::VectorXd& x);
// Mean log-loss plus l2/2 over all weight matrices (biases unpenalized).
double mlp_loss_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const MlpParams& p,
                     double l2, MlpParams* grad);
MlpParams init_mlp(std::size_t input_dim, std::uint64_t seed);
MlpParams train_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TrainParams& params,
                    std::uint64_t seed);

class TrainedModel : public Classifier {
 public:
  using Params = std::variant<LogRegParams, GnbParams, MlpParams>;

  TrainedModel(ModelKind kind, FeatureConfig features, Params params, std::uint64_t seed);

  double predict_proba(std::string_view text) const override;
  double predict_proba_features(const Eigen::VectorXd& x) const;

  ModelKind kind() const { return kind_; }
  const FeatureConfig& features() const { return features_; }
  const Params& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  // Versioned JSON; doubles round-trip exactly.
  std::string to_json() const;
  static TrainedModel from_json(std::string_view json);

 private:
  ModelKind kind_;
  FeatureConfig features_;
  Params params_;
  std::uint64_t seed_;
};

// Throws DataError on an empty corpus, mismatched lengths, labels outside
// {0,1} or a single class.
TrainedModel train(const std::vector<std::string>& texts, const std::vector<int>& labels,
                   ModelKind kind, const FeatureConfig& features, const TrainParams& params,
                   std::uint64_t seed, std::size_t workers = 1);

// Fraction of correct predictions. Throws DataError when empty.
double evaluate(const Classifier& model, const std::vector<std::string>& texts,
                const std::vector<int>& labels, std::size_t workers = 1);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace cfaudit

#endif  // CFAUDIT_MODELS_H_
