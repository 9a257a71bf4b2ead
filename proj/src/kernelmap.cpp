#include "rffdq/kernelmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rffdq/error.hpp"

namespace rffdq {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

void check_weights(const FrequencySet& fs, std::size_t size) {
  require(fs.materialized(), ErrorKind::Capacity, "operation needs a materialized frequency set");
  require(size == fs.half_size(), ErrorKind::Config,
          "weight/probability length " + std::to_string(size) + " does not match |Omega_D| = " +
              std::to_string(fs.half_size()));
}

void check_point(const FrequencySet& fs, std::span<const double> x) {
  require(x.size() == fs.dim(), ErrorKind::Config, "input point has wrong dimension");
}

}  // namespace

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  require(!weights_.empty(), ErrorKind::Config, "weight vector must be nonempty");
  double sq = 0.0;
  strictly_positive_ = true;
  for (double v : weights_) {
    require(std::isfinite(v) && v >= 0.0, ErrorKind::Config, "weights must be finite and nonnegative");
    if (v == 0.0) strictly_positive_ = false;
    sq += v * v;
  }
  norm2_ = std::sqrt(sq);
  require(norm2_ > 0.0, ErrorKind::Config, "weight vector must have positive norm");
}

WeightVector WeightVector::uniform(std::size_t size) { return WeightVector(std::vector<double>(size, 1.0)); }

std::vector<double> distribution_of(const WeightVector& w) {
  const double n2 = w.norm2() * w.norm2();
  std::vector<double> p(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) p[i] = w[i] * w[i] / n2;
  return p;
}

WeightVector weights_of(std::span<const double> p) {
  std::vector<double> w(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(p[i] >= 0.0, ErrorKind::Config, "probabilities must be nonnegative");
    w[i] = std::sqrt(p[i]);
  }
  return WeightVector(std::move(w));
}

TrigPolynomial::TrigPolynomial(std::shared_ptr<const FrequencySet> fs, std::vector<Complex> canonical)
    : fs_(std::move(fs)), coeffs_(std::move(canonical)) {
  require(fs_ != nullptr, ErrorKind::Config, "trig polynomial needs a frequency set");
  require(fs_->materialized(), ErrorKind::Capacity, "trig polynomial needs a materialized frequency set");
  require(coeffs_.size() == fs_->half_size(), ErrorKind::Config, "coefficient count does not match |Omega_D|");
  for (const auto& c : coeffs_)
    require(std::isfinite(c.real()) && std::isfinite(c.imag()), ErrorKind::Numeric, "non-finite coefficient");
  require(std::abs(coeffs_[0].imag()) <= kRealnessTolerance, ErrorKind::Domain,
          "coefficient at omega0 must be real");
  coeffs_[0] = Complex(coeffs_[0].real(), 0.0);
}

TrigPolynomial TrigPolynomial::from_pairs(std::shared_ptr<const FrequencySet> fs,
                                          std::span<const std::pair<Complex, Complex>> pairs) {
  std::vector<Complex> canonical;
  canonical.reserve(pairs.size());
  for (const auto& [c, cm] : pairs) {
    require(std::abs(cm - std::conj(c)) <= kRealnessTolerance, ErrorKind::Domain,
            "realness violated: c_{-omega} != conj(c_omega)");
    canonical.push_back(c);
  }
  return TrigPolynomial(std::move(fs), std::move(canonical));
}

TrigPolynomial TrigPolynomial::zero(std::shared_ptr<const FrequencySet> fs) {
  const auto n = fs->half_size();
  return TrigPolynomial(std::move(fs), std::vector<Complex>(n));
}

Complex TrigPolynomial::coeff_at(std::span<const double> omega) const {
  auto idx = fs_->folded_index_of(omega);
  if (!idx) return {};
  const Complex c = coeffs_[*idx];
  return is_canonical(omega) ? c : std::conj(c);
}

void TrigPolynomial::set_coeff(std::size_t half_index, Complex c) {
  require(half_index < coeffs_.size(), ErrorKind::Config, "half index out of range");
  if (half_index == 0) {
    require(std::abs(c.imag()) <= kRealnessTolerance, ErrorKind::Domain, "coefficient at omega0 must be real");
    c = Complex(c.real(), 0.0);
  }
  coeffs_[half_index] = c;
}

double TrigPolynomial::operator()(std::span<const double> x) const {
  check_point(*fs_, x);
  const auto& half = fs_->half();
  double value = coeffs_[0].real();
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    const Complex& c = coeffs_[i];
    if (c == Complex{}) continue;
    const double phase = dot(half[i], x);
    // c e^{i t} + conj(c) e^{-i t} = 2 Re(c e^{i t})
    value += 2.0 * (c.real() * std::cos(phase) - c.imag() * std::sin(phase));
  }
  return value;
}

std::vector<std::size_t> TrigPolynomial::support(double tol) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (std::abs(coeffs_[i]) > tol) idx.push_back(i);
  return idx;
}

double RealFourierForm::operator()(const FrequencySet& fs, std::span<const double> x) const {
  const auto& half = fs.half();
  double value = c0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double phase = dot(half[i + 1], x);
    value += a[i] * std::cos(phase) + b[i] * std::sin(phase);
  }
  return value;
}

RealFourierForm to_real_form(const TrigPolynomial& f) {
  RealFourierForm form;
  form.c0 = f.coeff(0).real();
  const std::size_t m = f.size() - 1;
  form.a.resize(m);
  form.b.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Complex c = f.coeff(i + 1);
    const Complex cm = std::conj(c);
    form.a[i] = (c + cm).real();                   // a = c + c_{-}
    form.b[i] = (Complex(0.0, 1.0) * (c - cm)).real();  // b = i (c - c_{-})
  }
  return form;
}

TrigPolynomial from_real_form(std::shared_ptr<const FrequencySet> fs, const RealFourierForm& form) {
  require(form.a.size() + 1 == fs->half_size() && form.b.size() == form.a.size(), ErrorKind::Config,
          "real Fourier form length does not match |Omega+|");
  std::vector<Complex> c(fs->half_size());
  c[0] = form.c0;
  for (std::size_t i = 0; i < form.a.size(); ++i) c[i + 1] = Complex(form.a[i] / 2.0, -form.b[i] / 2.0);
  return TrigPolynomial(std::move(fs), std::move(c));
}

std::vector<double> feature_map_eval(std::span<const double> x, const FrequencySet& fs, const WeightVector& w) {
  check_weights(fs, w.size());
  check_point(fs, x);
  const auto& half = fs.half();
  const double inv = 1.0 / w.norm2();
  std::vector<double> phi(2 * (half.size() - 1) + 1);
  phi[0] = w[0] * inv;
  for (std::size_t i = 1; i < half.size(); ++i) {
    const double phase = dot(half[i], x);
    phi[2 * i - 1] = w[i] * inv * std::cos(phase);
    phi[2 * i] = w[i] * inv * std::sin(phase);
  }
  return phi;
}

double kernel_eval(std::span<const double> x, std::span<const double> xprime, const FrequencySet& fs,
                   const WeightVector& w) {
  check_weights(fs, w.size());
  check_point(fs, x);
  check_point(fs, xprime);
  const auto& half = fs.half();
  std::vector<double> delta(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) delta[j] = x[j] - xprime[j];
  double acc = w[0] * w[0];
  for (std::size_t i = 1; i < half.size(); ++i) {
    if (w[i] == 0.0) continue;
    acc += w[i] * w[i] * std::cos(dot(half[i], delta));
  }
  return acc / (w.norm2() * w.norm2());
}

double integral_operator_norm(std::span<const double> p, const FrequencySet& fs) {
  require(fs.is_integer(), ErrorKind::Domain, "operator norm formula requires an integer frequency lattice");
  require(p.size() == fs.half_size(), ErrorKind::Config, "probability vector length does not match |Omega_D|");
  return *std::max_element(p.begin(), p.end()) / 2.0;
}

double integral_operator_spectral_radius(std::span<const double> p, const FrequencySet& fs) {
  require(fs.is_integer(), ErrorKind::Domain, "operator spectrum requires an integer frequency lattice");
  require(p.size() == fs.half_size(), ErrorKind::Config, "probability vector length does not match |Omega_D|");
  double r = p[0];
  for (std::size_t i = 1; i < p.size(); ++i) r = std::max(r, p[i] / 2.0);
  return r;
}

std::vector<double> rkhs_hyperplane(const TrigPolynomial& f, const WeightVector& w) {
  const FrequencySet& fs = f.freq_set();
  require(fs.is_integer(), ErrorKind::Domain,
          "RKHS norm is only supported for integer frequency lattices (hyperplane may not be unique)");
  check_weights(fs, w.size());
  const RealFourierForm form = to_real_form(f);
  const double tol = 1e-12;
  std::vector<double> v(2 * form.a.size() + 1, 0.0);
  auto scaled = [&](double coef, std::size_t i) {
    if (std::abs(coef) <= tol) return 0.0;
    if (w[i] == 0.0)
      fail(ErrorKind::Domain, "function has support on a zero-weight frequency (half index " + std::to_string(i) +
                                  "); it is not in the re-weighted function class");
    return coef * w.norm2() / w[i];
  };
  v[0] = scaled(form.c0, 0);
  for (std::size_t i = 0; i < form.a.size(); ++i) {
    v[2 * i + 1] = scaled(form.a[i], i + 1);
    v[2 * i + 2] = scaled(form.b[i], i + 1);
  }
  return v;
}

double rkhs_norm(const TrigPolynomial& f, const WeightVector& w) {
  const auto v = rkhs_hyperplane(f, w);
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

double coefficient_norm_sq(const TrigPolynomial& f) {
  const auto& c = f.coeffs();
  double s = std::norm(c[0]);
  for (std::size_t i = 1; i < c.size(); ++i) s += 2.0 * std::norm(c[i]);
  return s;
}

double l2_norm_sq(const TrigPolynomial& f) {
  return std::pow(2.0 * std::numbers::pi, static_cast<double>(f.dim())) * coefficient_norm_sq(f);
}

TrigPolynomial apply_integral_operator(const TrigPolynomial& f, const FrequencySet& kernel_fs,
                                       std::span<const double> p) {
  require(kernel_fs.is_integer() && f.freq_set().is_integer(), ErrorKind::Domain,
          "integral operator action requires integer frequency lattices");
  require(p.size() == kernel_fs.half_size(), ErrorKind::Config, "probability vector length does not match kernel lattice");
  require(kernel_fs.dim() == f.dim(), ErrorKind::Config, "dimension mismatch between function and kernel");
  const auto& half = f.freq_set().half();
  std::vector<Complex> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.coeff(i) == Complex{}) continue;
    if (i == 0) {
      out[0] = f.coeff(0) * p[0];
      continue;
    }
    auto idx = kernel_fs.folded_index_of(half[i]);
    if (!idx || *idx == 0) continue;
    out[i] = f.coeff(i) * (p[*idx] / 2.0);
  }
  return TrigPolynomial(f.freq_set_ptr(), std::move(out));
}

}  // namespace rffdq
