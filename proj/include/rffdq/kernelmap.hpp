#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "rffdq/freqcore.hpp"

namespace rffdq {

using Complex = std::complex<double>;

/// Nonnegative re-weighting over the canonical half, indexed like FrequencySet::half().
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  const std::vector<double>& values() const noexcept { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }
  double norm2() const noexcept { return norm2_; }
  bool strictly_positive() const noexcept { return strictly_positive_; }

  static WeightVector uniform(std::size_t size);

 private:
  std::vector<double> weights_;
  double norm2_ = 0.0;
  bool strictly_positive_ = false;
};

/// p_i = w_i^2 / ||w||^2.
std::vector<double> distribution_of(const WeightVector& w);
/// w_i = sqrt(p_i); unit 2-norm when p sums to one.
WeightVector weights_of(std::span<const double> p);

/// Real-valued trigonometric polynomial over a frequency lattice. Stores c_omega for each
/// canonical omega; c_{-omega} is its conjugate.
class TrigPolynomial {
 public:
  static constexpr double kRealnessTolerance = 1e-10;

  /// Canonical coefficients, one per half index. c_{omega0} must be real within tolerance.
  TrigPolynomial(std::shared_ptr<const FrequencySet> fs, std::vector<Complex> canonical);
  /// From explicit (c_omega, c_{-omega}) pairs; validates c_{-omega} == conj(c_omega).
  static TrigPolynomial from_pairs(std::shared_ptr<const FrequencySet> fs,
                                   std::span<const std::pair<Complex, Complex>> pairs);
  static TrigPolynomial zero(std::shared_ptr<const FrequencySet> fs);

  const FrequencySet& freq_set() const noexcept { return *fs_; }
  const std::shared_ptr<const FrequencySet>& freq_set_ptr() const noexcept { return fs_; }
  std::size_t dim() const noexcept { return fs_->dim(); }
  std::size_t size() const noexcept { return coeffs_.size(); }

  const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
  Complex coeff(std::size_t half_index) const { return coeffs_.at(half_index); }
  /// Coefficient at any lattice frequency (conjugated for the mirrored half); zero off-lattice.
  Complex coeff_at(std::span<const double> omega) const;
  void set_coeff(std::size_t half_index, Complex c);

  double operator()(std::span<const double> x) const;
  /// Indices of canonical frequencies whose coefficient magnitude exceeds tol.
  std::vector<std::size_t> support(double tol = 1e-12) const;

 private:
  std::shared_ptr<const FrequencySet> fs_;
  std::vector<Complex> coeffs_;
};

/// f = c0 + sum_i a_i cos<omega_i,x> + b_i sin<omega_i,x> over the positive half.
struct RealFourierForm {
  double c0 = 0.0;
  std::vector<double> a;
  std::vector<double> b;

  double operator()(const FrequencySet& fs, std::span<const double> x) const;
};

RealFourierForm to_real_form(const TrigPolynomial& f);
TrigPolynomial from_real_form(std::shared_ptr<const FrequencySet> fs, const RealFourierForm& form);

/// Re-weighted feature map (w0, w_i cos, w_i sin, ...) / ||w||, length 2|Omega+| + 1.
std::vector<double> feature_map_eval(std::span<const double> x, const FrequencySet& fs, const WeightVector& w);
double kernel_eval(std::span<const double> x, std::span<const double> xprime, const FrequencySet& fs,
                   const WeightVector& w);

/// Operator norm of the kernel integral operator under uniform inputs as given by the
/// closed form max_omega p(omega)/2. Requires an integer lattice.
double integral_operator_norm(std::span<const double> p, const FrequencySet& fs);
/// Largest eigenvalue of the same operator counting the constant mode, whose eigenvalue is
/// p(omega0) rather than p(omega0)/2: max(p0, max_{omega != 0} p/2).
double integral_operator_spectral_radius(std::span<const double> p, const FrequencySet& fs);

/// ||f||_K for K = K_(D,w) via the unique hyperplane (integer lattices only).
double rkhs_norm(const TrigPolynomial& f, const WeightVector& w);
/// Hyperplane v with f = <v, phi_(D,w)>, in feature-map order.
std::vector<double> rkhs_hyperplane(const TrigPolynomial& f, const WeightVector& w);

/// Lebesgue L2 norm squared over [0, 2pi)^d, via Parseval.
double l2_norm_sq(const TrigPolynomial& f);
/// Squared 2-norm of the full coefficient vector over the mirrored lattice.
double coefficient_norm_sq(const TrigPolynomial& f);

/// Kernel integral operator (uniform inputs) applied to f; p is indexed over kernel_fs's half.
/// Frequencies of f absent from kernel_fs are annihilated.
TrigPolynomial apply_integral_operator(const TrigPolynomial& f, const FrequencySet& kernel_fs,
                                       std::span<const double> p);

}  // namespace rffdq
