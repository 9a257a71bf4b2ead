#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rffdq/freqcore.hpp"
#include "rffdq/kernelmap.hpp"

namespace rffdq {

inline constexpr std::size_t kMaxQubits = 14;
inline constexpr double kOffLatticeTolerance = 1e-9;
inline constexpr double kConjugateTolerance = 1e-10;

/// Pauli word over {I, X, Y, Z}; character i acts on qubit i (bit i of a basis index).
struct GateSpec {
  enum class Kind { Fixed, Rotation, Encoding, Cnot, Cz };

  Kind kind = Kind::Rotation;
  std::string pauli;
  double scale = 0.0;          // Encoding: exp(-i scale x_dim P)
  std::size_t dim = 0;         // Encoding: zero-based data dimension
  std::size_t theta_index = 0; // Rotation: exp(-i theta/2 P)
  std::size_t control = 0;
  std::size_t target = 0;
  std::vector<std::size_t> qubits;   // Fixed: one or two qubits, qubits[0] is the low bit of the matrix index
  std::vector<Complex> matrix;       // Fixed: row-major 2^k x 2^k unitary
};

struct Observable {
  std::vector<std::pair<double, std::string>> terms;

  /// Sum of |coefficients|, an upper bound on the operator norm.
  double inf_norm_bound() const noexcept;
};

class Circuit {
 public:
  Circuit(std::size_t qubits, std::vector<GateSpec> gates, std::size_t input_dim = 0);

  std::size_t qubits() const noexcept { return qubits_; }
  const std::vector<GateSpec>& gates() const noexcept { return gates_; }
  std::size_t theta_count() const noexcept { return theta_count_; }
  std::size_t input_dim() const noexcept { return input_dim_; }

 private:
  std::size_t qubits_;
  std::vector<GateSpec> gates_;
  std::size_t theta_count_ = 0;
  std::size_t input_dim_ = 1;
};

class StateVector {
 public:
  explicit StateVector(std::size_t qubits);

  std::size_t qubits() const noexcept { return qubits_; }
  const std::vector<Complex>& amplitudes() const noexcept { return amp_; }
  double norm() const;

  /// psi <- exp(-i alpha P) psi
  void apply_pauli_rotation(const std::string& pauli, double alpha);
  void apply_cnot(std::size_t control, std::size_t target);
  void apply_cz(std::size_t a, std::size_t b);
  void apply_matrix(std::span<const std::size_t> qubits, std::span<const Complex> matrix);

  double expectation(const Observable& obs) const;

 private:
  std::vector<Complex> apply_pauli(const std::string& pauli) const;

  std::size_t qubits_;
  std::vector<Complex> amp_;
};

StateVector simulate(const Circuit& circuit, std::span<const double> theta, std::span<const double> x);

double evaluate_model(const Circuit& circuit, const Observable& obs, std::span<const double> theta,
                      std::span<const double> x);

/// Every Pauli word with scale s has spectrum {-|s|, +|s|}.
EncodingStrategy encoding_of(const Circuit& circuit);

struct SpectrumExtraction {
  TrigPolynomial poly;
  double off_lattice_max = 0.0;      // largest |c_k| at grid frequencies outside the lattice
  double conjugate_asymmetry = 0.0;  // max |c_{-k} - conj(c_k)|
  double grid_max_abs = 0.0;         // max |f| over the evaluation grid
  std::size_t grid_per_dim = 0;
};

/// Samples f on an odd grid_per_dim^d tensor grid (0 picks the smallest alias-free size)
/// and recovers the Fourier coefficients by DFT. Does not enforce tolerances.
SpectrumExtraction extract_spectrum(const Circuit& circuit, const Observable& obs, std::span<const double> theta,
                                    std::size_t grid_per_dim = 0);

/// Raises Numeric when off-lattice mass exceeds kOffLatticeTolerance or conjugate
/// symmetry is violated beyond kConjugateTolerance.
void check_extraction(const SpectrumExtraction& ex);

/// As extract_spectrum, but raises Numeric when off-lattice mass exceeds 1e-9 or
/// conjugate symmetry is violated beyond 1e-10.
TrigPolynomial extract_trig_polynomial(const Circuit& circuit, const Observable& obs, std::span<const double> theta,
                                       std::size_t grid_per_dim = 0);

}  // namespace rffdq
