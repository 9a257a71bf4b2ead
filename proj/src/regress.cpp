#include "rffdq/regress.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rffdq/error.hpp"

namespace rffdq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxEscalations = 4;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

std::span<const double> row_span(const Eigen::MatrixXd& X, Eigen::Index r, std::vector<double>& buf) {
  buf.resize(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) buf[static_cast<std::size_t>(j)] = X(r, j);
  return buf;
}

// Cholesky solve of A x = b. When jitter is allowed and the factorization fails, retries
// with diag += eps * trace/D for eps in 1e-12, 1e-10, 1e-8, 1e-6.
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, bool allow_jitter,
                          const char* what) {
  const double scale = std::max(A.trace() / static_cast<double>(A.rows()), 1e-300);
  double jitter = 0.0;
  for (int attempt = 0; attempt <= kMaxEscalations; ++attempt) {
    Eigen::MatrixXd Aj = A;
    if (jitter > 0.0) Aj.diagonal().array() += jitter * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(Aj);
    bool ok = llt.info() == Eigen::Success;
    if (ok && !allow_jitter) {
      const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().array().square();
      ok = pivots.minCoeff() > 1e-13 * pivots.maxCoeff();
    }
    if (ok) {
      Eigen::VectorXd x = llt.solve(b);
      x += llt.solve(b - Aj * x);
      if (x.allFinite()) return x;
    }
    if (!allow_jitter) break;
    jitter = attempt == 0 ? 1e-12 : jitter * 100.0;
  }
  fail(ErrorKind::Numeric, std::string(what) + ": system is numerically singular");
}

void check_residual(const Eigen::VectorXd& residual, const Eigen::VectorXd& rhs, const char* what) {
  const double bound = 1e-8 * (1.0 + rhs.cwiseAbs().maxCoeff());
  if (!(residual.cwiseAbs().maxCoeff() <= bound))
    fail(ErrorKind::Numeric, std::string(what) + ": residual check failed (" +
                                 std::to_string(residual.cwiseAbs().maxCoeff()) + ")");
}

}  // namespace

void Dataset::validate() const {
  require(X.rows() >= 1, ErrorKind::Config, "dataset must contain at least one sample");
  require(X.rows() == Y.size(), ErrorKind::Config, "dataset X and Y row counts differ");
  require(X.cols() >= 1, ErrorKind::Config, "dataset must have at least one input dimension");
  require(X.allFinite() && Y.allFinite(), ErrorKind::Config, "dataset contains non-finite values");
  require((X.array() >= 0.0).all() && (X.array() < kTwoPi).all(), ErrorKind::Config,
          "dataset inputs must lie in [0, 2pi)");
  require(Y.size() == 0 || Y.cwiseAbs().maxCoeff() <= b_bound, ErrorKind::Config, "labels exceed the bound b");
}

Eigen::MatrixXd RffFeatureSet::feature_matrix(const Eigen::MatrixXd& X) const {
  const auto M = static_cast<Eigen::Index>(size());
  require(M >= 1, ErrorKind::Config, "feature set is empty");
  const double scale = std::sqrt(2.0) / std::sqrt(static_cast<double>(M));
  Eigen::MatrixXd Phi(X.rows(), M);
  for (Eigen::Index i = 0; i < M; ++i) {
    const auto& omega = frequencies[static_cast<std::size_t>(i)];
    require(omega.size() == static_cast<std::size_t>(X.cols()), ErrorKind::Config, "feature dimension mismatch");
    for (Eigen::Index k = 0; k < X.rows(); ++k) {
      double phase = phases[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < X.cols(); ++j) phase += omega[static_cast<std::size_t>(j)] * X(k, j);
      Phi(k, i) = scale * std::cos(phase);
    }
  }
  return Phi;
}

Eigen::VectorXd RffFeatureSet::features(std::span<const double> x) const {
  const auto M = size();
  const double scale = std::sqrt(2.0) / std::sqrt(static_cast<double>(M));
  Eigen::VectorXd phi(static_cast<Eigen::Index>(M));
  for (std::size_t i = 0; i < M; ++i) {
    double phase = phases[i];
    for (std::size_t j = 0; j < x.size(); ++j) phase += frequencies[i][j] * x[j];
    phi(static_cast<Eigen::Index>(i)) = scale * std::cos(phase);
  }
  return phi;
}

RffFeatureSet RffFeatureSet::draw(const FrequencyDistribution& dist, std::size_t count, SeededRng& rng) {
  RffFeatureSet fset;
  fset.frequencies = dist.sample(rng, count);
  fset.phases.resize(count);
  for (double& g : fset.phases) g = rng.uniform(0.0, kTwoPi);
  return fset;
}

KernelSpec KernelSpec::make(EncodingStrategy encoding, std::optional<std::vector<double>> weights) {
  auto fs = std::make_shared<const FrequencySet>(FrequencySet::build(encoding));
  WeightVector w = weights ? WeightVector(std::move(*weights)) : WeightVector::uniform(fs->half_size());
  require(w.size() == fs->half_size(), ErrorKind::Config, "weight vector length does not match |Omega_D|");
  return KernelSpec{std::move(encoding), std::move(fs), std::move(w)};
}

Eigen::MatrixXd KernelSpec::feature_matrix(const Eigen::MatrixXd& X) const {
  const auto D = static_cast<Eigen::Index>(2 * fs->positive_size() + 1);
  Eigen::MatrixXd Phi(X.rows(), D);
  std::vector<double> buf;
  for (Eigen::Index k = 0; k < X.rows(); ++k) {
    const auto phi = feature_map_eval(row_span(X, k, buf), *fs, weights);
    for (Eigen::Index i = 0; i < D; ++i) Phi(k, i) = phi[static_cast<std::size_t>(i)];
  }
  return Phi;
}

std::string FittedModel::kind_name() const {
  switch (model_.index()) {
    case 0: return "explicit_linear";
    case 1: return "krr";
    default: return "rff";
  }
}

double FittedModel::predict(std::span<const double> x) const {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExplicitLinearModel>) {
          const auto phi = feature_map_eval(x, *m.kernel.fs, m.kernel.weights);
          return Eigen::Map<const Eigen::VectorXd>(phi.data(), static_cast<Eigen::Index>(phi.size())).dot(m.hyperplane);
        } else if constexpr (std::is_same_v<T, KrrModel>) {
          std::vector<double> buf;
          double s = 0.0;
          for (Eigen::Index i = 0; i < m.train_x.rows(); ++i)
            s += m.alpha(i) * kernel_eval(row_span(m.train_x, i, buf), x, *m.kernel.fs, m.kernel.weights);
          return s;
        } else {
          return m.features.features(x).dot(m.weights);
        }
      },
      model_);
}

Eigen::VectorXd FittedModel::predict(const Eigen::MatrixXd& X) const {
  return std::visit(
      [&](const auto& m) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExplicitLinearModel>) {
          return m.kernel.feature_matrix(X) * m.hyperplane;
        } else if constexpr (std::is_same_v<T, KrrModel>) {
          const Eigen::MatrixXd Phi = m.kernel.feature_matrix(X);
          const Eigen::MatrixXd PhiTrain = m.kernel.feature_matrix(m.train_x);
          return Phi * (PhiTrain.transpose() * m.alpha);
        } else {
          return m.features.feature_matrix(X) * m.weights;
        }
      },
      model_);
}

double FittedModel::max_abs_frequency() const {
  auto lattice_max = [](const FrequencySet& fs) {
    double mx = 0.0;
    for (const auto& set : fs.per_dimension()) mx = std::max(mx, std::abs(set.back()));
    return mx;
  };
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RffModel>) {
          double mx = 0.0;
          for (const auto& w : m.features.frequencies)
            for (double v : w) mx = std::max(mx, std::abs(v));
          return mx;
        } else {
          return lattice_max(*m.kernel.fs);
        }
      },
      model_);
}

Eigen::VectorXd linear_ridge_fit(const Eigen::MatrixXd& F, const Eigen::VectorXd& Y, double lambda) {
  require(F.rows() == Y.size() && F.rows() >= 1, ErrorKind::Config, "ridge: feature and target sizes differ");
  require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::Config, "ridge: lambda must be finite and >= 0");
  require(all_finite(F) && Y.allFinite(), ErrorKind::Numeric, "ridge: non-finite inputs");
  const auto n = static_cast<double>(F.rows());
  const double reg = lambda * n;
  const Eigen::VectorXd FtY = F.transpose() * Y;

  Eigen::VectorXd w;
  if (F.cols() > F.rows() && lambda > 0.0) {
    Eigen::MatrixXd G = F * F.transpose();
    G.diagonal().array() += reg;
    const Eigen::VectorXd alpha = spd_solve(G, Y, true, "ridge (dual)");
    w = F.transpose() * alpha;
  } else {
    Eigen::MatrixXd A = F.transpose() * F;
    A.diagonal().array() += reg;
    w = spd_solve(A, FtY, lambda > 0.0, "ridge");
  }
  const Eigen::VectorXd residual = F.transpose() * (F * w) + reg * w - FtY;
  check_residual(residual, FtY, "ridge");
  return w;
}

Eigen::VectorXd kernel_ridge_solve(const Eigen::MatrixXd& K, const Eigen::VectorXd& Y, double lambda) {
  require(K.rows() == K.cols() && K.rows() == Y.size(), ErrorKind::Config, "KRR: Gram matrix shape mismatch");
  require(std::isfinite(lambda) && lambda > 0.0, ErrorKind::Config, "KRR: lambda must be > 0");
  Eigen::MatrixXd A = K;
  A.diagonal().array() += lambda * static_cast<double>(K.rows());
  return spd_solve(A, Y, true, "kernel ridge");
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X,
                            const std::function<double(std::span<const double>, std::span<const double>)>& kernel) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  std::vector<double> a, b;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto xi = row_span(X, i, a);
    for (Eigen::Index j = 0; j <= i; ++j) {
      K(i, j) = K(j, i) = kernel(xi, row_span(X, j, b));
    }
  }
  return K;
}

FittedModel explicit_linear_fit(const Dataset& data, const KernelSpec& kernel, double lambda) {
  data.validate();
  const Eigen::MatrixXd Phi = kernel.feature_matrix(data.X);
  Eigen::VectorXd v = linear_ridge_fit(Phi, data.Y, lambda);
  return FittedModel(ExplicitLinearModel{kernel, std::move(v)}, lambda);
}

FittedModel kernel_ridge_fit(const Dataset& data, const KernelSpec& kernel, double lambda) {
  data.validate();
  const Eigen::MatrixXd Phi = kernel.feature_matrix(data.X);
  const Eigen::MatrixXd K = Phi * Phi.transpose();
  Eigen::VectorXd alpha = kernel_ridge_solve(K, data.Y, lambda);
  return FittedModel(KrrModel{kernel, data.X, std::move(alpha)}, lambda);
}

FittedModel rff_fit(const Dataset& data, RffFeatureSet features, std::optional<double> lambda) {
  data.validate();
  const double lam = lambda.value_or(1.0 / std::sqrt(static_cast<double>(data.size())));
  const Eigen::MatrixXd Phi = features.feature_matrix(data.X);
  Eigen::VectorXd w = linear_ridge_fit(Phi, data.Y, lam);
  return FittedModel(RffModel{std::move(features), std::move(w)}, lam);
}

FittedModel rff_fit(const Dataset& data, const FrequencyDistribution& dist, std::size_t M,
                    std::optional<double> lambda, SeededRng& rng) {
  require(M >= 1, ErrorKind::Config, "M must be at least 1");
  require(dist.freq_set().dim() == data.dim(), ErrorKind::Config, "distribution and data dimensions differ");
  return rff_fit(data, RffFeatureSet::draw(dist, M, rng), lambda);
}

double rff_kernel_estimate(const RffFeatureSet& fset, std::span<const double> x, std::span<const double> xprime) {
  double s = 0.0;
  for (std::size_t i = 0; i < fset.size(); ++i) {
    double px = fset.phases[i], pxp = fset.phases[i];
    for (std::size_t j = 0; j < x.size(); ++j) {
      px += fset.frequencies[i][j] * x[j];
      pxp += fset.frequencies[i][j] * xprime[j];
    }
    s += 2.0 * std::cos(px) * std::cos(pxp);
  }
  return s / static_cast<double>(fset.size());
}

double empirical_risk(const FittedModel& model, const Dataset& data) {
  const Eigen::VectorXd r = model.predict(data.X) - data.Y;
  return r.squaredNorm() / static_cast<double>(data.size());
}

RiskEstimate true_risk_estimate(const FittedModel& model, const TrigPolynomial& target, double noise_variance,
                                RiskOptions options) {
  require(noise_variance >= 0.0, ErrorKind::Config, "noise variance must be nonnegative");
  const std::size_t d = target.dim();
  double max_freq = model.max_abs_frequency();
  for (const auto& set : target.freq_set().per_dimension()) max_freq = std::max(max_freq, std::abs(set.back()));

  RiskEstimate est;
  auto grid_points = [&](std::size_t g) {
    long double total = 1.0L;
    for (std::size_t j = 0; j < d; ++j) total *= g;
    return total;
  };
  // integer lattices: a periodic grid with more than 2*(2 max) points integrates (f - f*)^2 exactly
  std::size_t grid = static_cast<std::size_t>(std::ceil(4.0 * max_freq)) + 1;
  if (!target.freq_set().is_integer()) grid = std::max<std::size_t>(grid * 4, 64);
  if (d <= 3 && grid_points(grid) <= static_cast<long double>(options.max_grid_points)) {
    const auto total = static_cast<std::size_t>(grid_points(grid));
    Eigen::MatrixXd X(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(d));
    for (std::size_t p = 0; p < total; ++p) {
      std::size_t rem = p;
      for (std::size_t j = d; j-- > 0;) {
        X(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) =
            kTwoPi * static_cast<double>(rem % grid) / static_cast<double>(grid);
        rem /= grid;
      }
    }
    const Eigen::VectorXd pred = model.predict(X);
    std::vector<double> buf(d);
    double acc = 0.0;
    for (std::size_t p = 0; p < total; ++p) {
      for (std::size_t j = 0; j < d; ++j) buf[j] = X(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j));
      const double diff = pred(static_cast<Eigen::Index>(p)) - target(buf);
      acc += diff * diff;
    }
    est.l2_sq = acc / static_cast<double>(total);
    est.quadrature = true;
  } else {
    SeededRng rng(options.mc_seed, 0);
    const auto m = options.mc_points;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    for (Eigen::Index p = 0; p < X.rows(); ++p)
      for (Eigen::Index j = 0; j < X.cols(); ++j) X(p, j) = rng.uniform(0.0, kTwoPi);
    const Eigen::VectorXd pred = model.predict(X);
    std::vector<double> buf(d);
    double sum = 0.0, sum_sq = 0.0;
    for (Eigen::Index p = 0; p < X.rows(); ++p) {
      for (std::size_t j = 0; j < d; ++j) buf[j] = X(p, static_cast<Eigen::Index>(j));
      const double diff = pred(p) - target(buf);
      sum += diff * diff;
      sum_sq += diff * diff * diff * diff;
    }
    const double mean = sum / static_cast<double>(m);
    const double var = std::max(0.0, sum_sq / static_cast<double>(m) - mean * mean);
    est.l2_sq = mean;
    est.std_error = std::sqrt(var / static_cast<double>(m));
    est.quadrature = false;
  }
  est.risk = est.l2_sq + noise_variance;
  return est;
}

TrigPolynomial model_spectrum(const FittedModel& model, std::shared_ptr<const FrequencySet> fs) {
  require(fs->is_integer(), ErrorKind::Domain, "model spectra are only defined on integer lattices");
  auto from_hyperplane = [&](const KernelSpec& k, const Eigen::VectorXd& v) {
    require(k.fs->same_lattice(*fs), ErrorKind::Config, "model kernel lattice differs from requested lattice");
    RealFourierForm form;
    const double inv = 1.0 / k.weights.norm2();
    form.c0 = v(0) * k.weights[0] * inv;
    const std::size_t m = fs->positive_size();
    form.a.resize(m);
    form.b.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      form.a[i] = v(static_cast<Eigen::Index>(2 * i + 1)) * k.weights[i + 1] * inv;
      form.b[i] = v(static_cast<Eigen::Index>(2 * i + 2)) * k.weights[i + 1] * inv;
    }
    return from_real_form(fs, form);
  };
  return std::visit(
      [&](const auto& m) -> TrigPolynomial {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExplicitLinearModel>) {
          return from_hyperplane(m.kernel, m.hyperplane);
        } else if constexpr (std::is_same_v<T, KrrModel>) {
          const Eigen::VectorXd v = m.kernel.feature_matrix(m.train_x).transpose() * m.alpha;
          return from_hyperplane(m.kernel, v);
        } else {
          std::vector<Complex> c(fs->half_size());
          const double scale = std::sqrt(2.0) / std::sqrt(static_cast<double>(m.features.size()));
          for (std::size_t i = 0; i < m.features.size(); ++i) {
            const auto& omega = m.features.frequencies[i];
            auto idx = fs->folded_index_of(omega);
            require(idx.has_value(), ErrorKind::Config, "model frequency is not on the requested lattice");
            const double amp = m.weights(static_cast<Eigen::Index>(i)) * scale;
            const double gamma = is_canonical(omega) ? m.features.phases[i] : -m.features.phases[i];
            if (*idx == 0) {
              c[0] += amp * std::cos(m.features.phases[i]);
            } else {
              // amp cos(t + g) = (amp/2) e^{ig} e^{it} + c.c.
              c[*idx] += 0.5 * amp * std::polar(1.0, gamma);
            }
          }
          return TrigPolynomial(fs, std::move(c));
        }
      },
      model.variant());
}

std::pair<Dataset, Dataset> holdout_split(const Dataset& data, SeededRng& rng, double train_fraction) {
  const std::size_t n = data.size();
  require(n >= 2, ErrorKind::Config, "holdout split needs at least two samples");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  std::size_t n_train = std::clamp<std::size_t>(static_cast<std::size_t>(std::round(train_fraction * n)), 1, n - 1);
  auto take = [&](std::size_t begin, std::size_t end) {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(end - begin), data.X.cols());
    out.Y.resize(static_cast<Eigen::Index>(end - begin));
    for (std::size_t r = begin; r < end; ++r) {
      out.X.row(static_cast<Eigen::Index>(r - begin)) = data.X.row(static_cast<Eigen::Index>(perm[r]));
      out.Y(static_cast<Eigen::Index>(r - begin)) = data.Y(static_cast<Eigen::Index>(perm[r]));
    }
    out.b_bound = data.b_bound;
    out.meta = data.meta;
    return out;
  };
  return {take(0, n_train), take(n_train, n)};
}

}  // namespace rffdq
