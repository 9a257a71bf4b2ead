#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rffdq/freqcore.hpp"
#include "rffdq/freqsample.hpp"
#include "rffdq/kernelmap.hpp"
#include "rffdq/rng.hpp"

namespace rffdq {

/// n samples of (x in [0, 2pi)^d, y) with |y| <= b_bound.
struct Dataset {
  Eigen::MatrixXd X;  // n x d
  Eigen::VectorXd Y;
  double b_bound = 0.0;
  std::string meta;

  std::size_t size() const noexcept { return static_cast<std::size_t>(X.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(X.cols()); }
  void validate() const;
};

/// Sampled features nu_i = (omega_i, gamma_i), psi(x, nu) = sqrt(2) cos(<omega, x> + gamma).
struct RffFeatureSet {
  std::vector<Frequency> frequencies;
  std::vector<double> phases;

  std::size_t size() const noexcept { return frequencies.size(); }
  /// n x M matrix with entries psi(x_k, nu_i) / sqrt(M).
  Eigen::MatrixXd feature_matrix(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd features(std::span<const double> x) const;

  static RffFeatureSet draw(const FrequencyDistribution& dist, std::size_t count, SeededRng& rng);
};

/// Kernel K_(D,w) together with the encoding it came from (kept for serialization).
struct KernelSpec {
  EncodingStrategy encoding;
  std::shared_ptr<const FrequencySet> fs;
  WeightVector weights;

  static KernelSpec make(EncodingStrategy encoding, std::optional<std::vector<double>> weights = std::nullopt);
  /// n x (2|Omega+|+1) matrix of re-weighted feature maps.
  Eigen::MatrixXd feature_matrix(const Eigen::MatrixXd& X) const;
};

struct ExplicitLinearModel {
  KernelSpec kernel;
  Eigen::VectorXd hyperplane;  // v over phi_(D,w)
};

struct KrrModel {
  KernelSpec kernel;
  Eigen::MatrixXd train_x;
  Eigen::VectorXd alpha;
};

struct RffModel {
  RffFeatureSet features;
  Eigen::VectorXd weights;
};

class FittedModel {
 public:
  using Variant = std::variant<ExplicitLinearModel, KrrModel, RffModel>;

  FittedModel(Variant model, double lambda) : model_(std::move(model)), lambda_(lambda) {}

  const Variant& variant() const noexcept { return model_; }
  double lambda() const noexcept { return lambda_; }
  std::string kind_name() const;

  double predict(std::span<const double> x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

  /// Largest absolute frequency component the model can contain.
  double max_abs_frequency() const;

 private:
  Variant model_;
  double lambda_;
};

/// Solves (F^T F + lambda n I) w = F^T Y. Uses the dual form when F has more columns than
/// rows and lambda > 0. lambda = 0 requires F^T F to be numerically nonsingular.
Eigen::VectorXd linear_ridge_fit(const Eigen::MatrixXd& F, const Eigen::VectorXd& Y, double lambda);

/// Solves (K + n lambda I) alpha = Y for a PSD Gram matrix K, with jitter escalation.
Eigen::VectorXd kernel_ridge_solve(const Eigen::MatrixXd& K, const Eigen::VectorXd& Y, double lambda);
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const std::function<double(std::span<const double>, std::span<const double>)>& kernel);

FittedModel explicit_linear_fit(const Dataset& data, const KernelSpec& kernel, double lambda);
FittedModel kernel_ridge_fit(const Dataset& data, const KernelSpec& kernel, double lambda);
/// lambda = nullopt selects 1/sqrt(n).
FittedModel rff_fit(const Dataset& data, const FrequencyDistribution& dist, std::size_t M,
                    std::optional<double> lambda, SeededRng& rng);
FittedModel rff_fit(const Dataset& data, RffFeatureSet features, std::optional<double> lambda);

double rff_kernel_estimate(const RffFeatureSet& fset, std::span<const double> x, std::span<const double> xprime);

double empirical_risk(const FittedModel& model, const Dataset& data);

struct RiskEstimate {
  double risk = 0.0;       // ||f - f*||^2 under uniform P_X, plus sigma^2
  double l2_sq = 0.0;      // ||f - f*||^2 alone (normalised measure)
  double std_error = 0.0;  // zero for quadrature
  bool quadrature = true;
};

struct RiskOptions {
  std::size_t mc_points = 100'000;
  std::uint64_t mc_seed = 0x5eed;
  std::uint64_t max_grid_points = 2'000'000;
};

RiskEstimate true_risk_estimate(const FittedModel& model, const TrigPolynomial& target, double noise_variance,
                                RiskOptions options = {});

/// Exact Fourier spectrum of a fitted model on an integer lattice.
TrigPolynomial model_spectrum(const FittedModel& model, std::shared_ptr<const FrequencySet> fs);

/// Seeded 80/20 split (train, holdout).
std::pair<Dataset, Dataset> holdout_split(const Dataset& data, SeededRng& rng, double train_fraction = 0.8);

}  // namespace rffdq
