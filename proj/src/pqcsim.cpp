#include "rffdq/pqcsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "rffdq/error.hpp"

namespace rffdq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PauliMasks {
  std::uint64_t flip = 0;   // X or Y
  std::uint64_t sign = 0;   // Y or Z
  std::size_t y_count = 0;
};

PauliMasks masks_of(const std::string& pauli) {
  PauliMasks m;
  for (std::size_t q = 0; q < pauli.size(); ++q) {
    switch (pauli[q]) {
      case 'I': break;
      case 'X': m.flip |= 1ULL << q; break;
      case 'Y': m.flip |= 1ULL << q; m.sign |= 1ULL << q; ++m.y_count; break;
      case 'Z': m.sign |= 1ULL << q; break;
      default: fail(ErrorKind::Config, "invalid Pauli character '" + std::string(1, pauli[q]) + "'");
    }
  }
  return m;
}

void check_pauli(const std::string& pauli, std::size_t qubits) {
  require(!pauli.empty(), ErrorKind::Config, "Pauli word must be nonempty");
  require(pauli.size() <= qubits, ErrorKind::Config, "Pauli word '" + pauli + "' is longer than the register");
  masks_of(pauli);
}

void check_qubit(std::size_t q, std::size_t qubits) {
  require(q < qubits, ErrorKind::Config, "gate references qubit " + std::to_string(q) + " outside the register");
}

}  // namespace

double Observable::inf_norm_bound() const noexcept {
  double s = 0.0;
  for (const auto& [coef, word] : terms) s += std::abs(coef);
  return s;
}

Circuit::Circuit(std::size_t qubits, std::vector<GateSpec> gates, std::size_t input_dim)
    : qubits_(qubits), gates_(std::move(gates)) {
  require(qubits >= 1 && qubits <= kMaxQubits, ErrorKind::Config,
          "qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
  std::size_t max_dim = 0;
  for (const auto& g : gates_) {
    switch (g.kind) {
      case GateSpec::Kind::Encoding:
        check_pauli(g.pauli, qubits);
        require(std::isfinite(g.scale), ErrorKind::Config, "encoding scale must be finite");
        max_dim = std::max(max_dim, g.dim + 1);
        break;
      case GateSpec::Kind::Rotation:
        check_pauli(g.pauli, qubits);
        theta_count_ = std::max(theta_count_, g.theta_index + 1);
        break;
      case GateSpec::Kind::Cnot:
      case GateSpec::Kind::Cz:
        check_qubit(g.control, qubits);
        check_qubit(g.target, qubits);
        require(g.control != g.target, ErrorKind::Config, "two-qubit gate needs distinct qubits");
        break;
      case GateSpec::Kind::Fixed: {
        const std::size_t k = g.qubits.size();
        require(k == 1 || k == 2, ErrorKind::Config, "fixed unitaries act on one or two qubits");
        for (auto q : g.qubits) check_qubit(q, qubits);
        require(k == 1 || g.qubits[0] != g.qubits[1], ErrorKind::Config, "fixed unitary qubits must be distinct");
        const std::size_t n = std::size_t{1} << k;
        require(g.matrix.size() == n * n, ErrorKind::Config, "fixed unitary has the wrong number of entries");
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < n; ++c) {
            Complex dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += std::conj(g.matrix[i * n + r]) * g.matrix[i * n + c];
            require(std::abs(dot - (r == c ? 1.0 : 0.0)) <= 1e-10, ErrorKind::Config, "fixed gate is not unitary");
          }
        break;
      }
    }
  }
  require(input_dim == 0 || input_dim >= max_dim, ErrorKind::Config,
          "declared input dimension is smaller than the largest encoded dimension");
  input_dim_ = std::max<std::size_t>({input_dim, max_dim, 1});
}

StateVector::StateVector(std::size_t qubits) : qubits_(qubits), amp_(std::size_t{1} << qubits) {
  require(qubits >= 1 && qubits <= kMaxQubits, ErrorKind::Config, "unsupported qubit count");
  amp_[0] = 1.0;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

std::vector<Complex> StateVector::apply_pauli(const std::string& pauli) const {
  const auto m = masks_of(pauli);
  static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex base = kIPow[m.y_count % 4];
  std::vector<Complex> out(amp_.size());
  for (std::uint64_t k = 0; k < amp_.size(); ++k) {
    const bool odd = std::popcount(k & m.sign) % 2 == 1;
    out[k ^ m.flip] = (odd ? -base : base) * amp_[k];
  }
  return out;
}

void StateVector::apply_pauli_rotation(const std::string& pauli, double alpha) {
  const auto p = apply_pauli(pauli);
  const double c = std::cos(alpha);
  const Complex s(0.0, -std::sin(alpha));
  for (std::size_t k = 0; k < amp_.size(); ++k) amp_[k] = c * amp_[k] + s * p[k];
}

void StateVector::apply_cnot(std::size_t control, std::size_t target) {
  const std::uint64_t cm = 1ULL << control, tm = 1ULL << target;
  for (std::uint64_t k = 0; k < amp_.size(); ++k)
    if ((k & cm) && !(k & tm)) std::swap(amp_[k], amp_[k | tm]);
}

void StateVector::apply_cz(std::size_t a, std::size_t b) {
  const std::uint64_t mask = (1ULL << a) | (1ULL << b);
  for (std::uint64_t k = 0; k < amp_.size(); ++k)
    if ((k & mask) == mask) amp_[k] = -amp_[k];
}

void StateVector::apply_matrix(std::span<const std::size_t> qubits, std::span<const Complex> matrix) {
  const std::size_t k = qubits.size();
  const std::size_t n = std::size_t{1} << k;
  std::uint64_t mask = 0;
  for (auto q : qubits) mask |= 1ULL << q;
  std::vector<std::uint64_t> offsets(n);
  for (std::size_t local = 0; local < n; ++local)
    for (std::size_t b = 0; b < k; ++b)
      if (local & (std::size_t{1} << b)) offsets[local] |= 1ULL << qubits[b];
  std::vector<Complex> in(n);
  for (std::uint64_t base = 0; base < amp_.size(); ++base) {
    if (base & mask) continue;
    for (std::size_t i = 0; i < n; ++i) in[i] = amp_[base | offsets[i]];
    for (std::size_t r = 0; r < n; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = 0; c < n; ++c) acc += matrix[r * n + c] * in[c];
      amp_[base | offsets[r]] = acc;
    }
  }
}

double StateVector::expectation(const Observable& obs) const {
  double total = 0.0;
  for (const auto& [coef, word] : obs.terms) {
    require(word.size() <= qubits_, ErrorKind::Config, "observable term is longer than the register");
    const auto p = apply_pauli(word);
    Complex acc = 0.0;
    for (std::size_t k = 0; k < amp_.size(); ++k) acc += std::conj(amp_[k]) * p[k];
    total += coef * acc.real();
  }
  return total;
}

StateVector simulate(const Circuit& circuit, std::span<const double> theta, std::span<const double> x) {
  require(theta.size() >= circuit.theta_count(), ErrorKind::Config,
          "circuit needs " + std::to_string(circuit.theta_count()) + " parameters, got " + std::to_string(theta.size()));
  require(x.size() == circuit.input_dim(), ErrorKind::Config,
          "circuit expects " + std::to_string(circuit.input_dim()) + " inputs, got " + std::to_string(x.size()));
  StateVector psi(circuit.qubits());
  for (const auto& g : circuit.gates()) {
    switch (g.kind) {
      case GateSpec::Kind::Encoding: psi.apply_pauli_rotation(g.pauli, g.scale * x[g.dim]); break;
      case GateSpec::Kind::Rotation: psi.apply_pauli_rotation(g.pauli, 0.5 * theta[g.theta_index]); break;
      case GateSpec::Kind::Cnot: psi.apply_cnot(g.control, g.target); break;
      case GateSpec::Kind::Cz: psi.apply_cz(g.control, g.target); break;
      case GateSpec::Kind::Fixed: psi.apply_matrix(g.qubits, g.matrix); break;
    }
  }
  return psi;
}

double evaluate_model(const Circuit& circuit, const Observable& obs, std::span<const double> theta,
                      std::span<const double> x) {
  return simulate(circuit, theta, x).expectation(obs);
}

EncodingStrategy encoding_of(const Circuit& circuit) {
  EncodingStrategy enc;
  enc.per_dimension.resize(circuit.input_dim());
  for (const auto& g : circuit.gates())
    if (g.kind == GateSpec::Kind::Encoding) {
      const double s = std::abs(g.scale);
      enc.per_dimension[g.dim].push_back(HamiltonianSpectrum({-s, s}));
    }
  return enc;
}

SpectrumExtraction extract_spectrum(const Circuit& circuit, const Observable& obs, std::span<const double> theta,
                                    std::size_t grid_per_dim) {
  auto fs = std::make_shared<const FrequencySet>(FrequencySet::build(encoding_of(circuit)));
  require(fs->is_integer(), ErrorKind::Domain, "spectrum extraction needs integer encoding frequencies");
  const std::size_t d = fs->dim();
  long kmax = 0;
  for (const auto& set : fs->per_dimension()) kmax = std::max(kmax, std::lround(std::abs(set.back())));
  const std::size_t min_grid = static_cast<std::size_t>(2 * kmax + 1);
  if (grid_per_dim == 0) grid_per_dim = min_grid;
  require(grid_per_dim >= min_grid, ErrorKind::Numeric,
          "grid of " + std::to_string(grid_per_dim) + " points per dimension aliases frequencies up to " +
              std::to_string(kmax) + " (need " + std::to_string(min_grid) + ")");
  if (grid_per_dim % 2 == 0) ++grid_per_dim;
  const std::size_t G = grid_per_dim;
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < d; ++j) {
    total *= G;
    require(total <= 4'000'000, ErrorKind::Capacity, "extraction grid exceeds 4e6 points");
  }

  SpectrumExtraction out{TrigPolynomial::zero(fs)};
  out.grid_per_dim = G;
  std::vector<Complex> values(total);
  std::vector<double> x(d);
  for (std::uint64_t p = 0; p < total; ++p) {
    std::uint64_t rem = p;
    for (std::size_t j = d; j-- > 0;) {
      x[j] = kTwoPi * static_cast<double>(rem % G) / static_cast<double>(G);
      rem /= G;
    }
    const double f = evaluate_model(circuit, obs, theta, x);
    out.grid_max_abs = std::max(out.grid_max_abs, std::abs(f));
    values[p] = f;
  }

  // Separable DFT; after the pass over axis j, slot s along that axis holds frequency s - h.
  const long h = static_cast<long>(G - 1) / 2;
  std::vector<Complex> twiddle(G);
  for (std::size_t m = 0; m < G; ++m) twiddle[m] = std::polar(1.0, -kTwoPi * static_cast<double>(m) / static_cast<double>(G));
  std::vector<Complex> line(G);
  std::uint64_t stride = total;
  for (std::size_t axis = 0; axis < d; ++axis) {
    stride /= G;
    const std::uint64_t block = stride * G;
    for (std::uint64_t outer = 0; outer < total; outer += block)
      for (std::uint64_t inner = 0; inner < stride; ++inner) {
        const std::uint64_t base = outer + inner;
        for (std::size_t m = 0; m < G; ++m) line[m] = values[base + m * stride];
        for (std::size_t s = 0; s < G; ++s) {
          const long k = static_cast<long>(s) - h;
          const auto kk = static_cast<std::size_t>(((k % static_cast<long>(G)) + static_cast<long>(G)) % static_cast<long>(G));
          Complex acc = 0.0;
          for (std::size_t m = 0; m < G; ++m) acc += line[m] * twiddle[(kk * m) % G];
          values[base + s * stride] = acc / static_cast<double>(G);
        }
      }
  }

  std::vector<Complex> coeffs(fs->half_size());
  std::vector<double> omega(d);
  for (std::uint64_t p = 0; p < total; ++p) {
    std::uint64_t rem = p;
    for (std::size_t j = d; j-- > 0;) {
      omega[j] = static_cast<double>(static_cast<long>(rem % G) - h);
      rem /= G;
    }
    out.conjugate_asymmetry = std::max(out.conjugate_asymmetry, std::abs(values[total - 1 - p] - std::conj(values[p])));
    if (!fs->contains(omega)) {
      out.off_lattice_max = std::max(out.off_lattice_max, std::abs(values[p]));
      continue;
    }
    if (auto idx = fs->index_of(omega)) coeffs[*idx] = values[p];
  }
  coeffs[0] = coeffs[0].real();
  out.poly = TrigPolynomial(fs, std::move(coeffs));
  return out;
}

void check_extraction(const SpectrumExtraction& ex) {
  require(ex.off_lattice_max <= kOffLatticeTolerance, ErrorKind::Numeric,
          "extracted spectrum has mass " + std::to_string(ex.off_lattice_max) + " outside the encoding lattice");
  require(ex.conjugate_asymmetry <= kConjugateTolerance, ErrorKind::Numeric,
          "extracted spectrum is not conjugate symmetric");
}

TrigPolynomial extract_trig_polynomial(const Circuit& circuit, const Observable& obs, std::span<const double> theta,
                                       std::size_t grid_per_dim) {
  auto ex = extract_spectrum(circuit, obs, theta, grid_per_dim);
  check_extraction(ex);
  return std::move(ex.poly);
}

}  // namespace rffdq
