#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rffdq/freqcore.hpp"
#include "rffdq/rng.hpp"

namespace rffdq {

/// Nonnegative tensor-train core of shape (left x phys x right), row-major.
struct MpsCore {
  std::size_t left = 1;
  std::size_t phys = 1;
  std::size_t right = 1;
  std::vector<double> data;

  double at(std::size_t a, std::size_t k, std::size_t b) const { return data[(a * phys + k) * right + b]; }
};

/// Distribution over the canonical half Omega_D. Product and MPS variants hold a
/// distribution over the full mirrored lattice and fold it: p(omega0) = q(omega0),
/// p(omega) = q(omega) + q(-omega) otherwise.
class FrequencyDistribution {
 public:
  enum class Kind { Explicit, ProductInduced, MpsInduced };

  /// Sparse (half index, probability) entries; probabilities must sum to one.
  static FrequencyDistribution explicit_dist(std::shared_ptr<const FrequencySet> fs,
                                             std::vector<std::pair<std::uint64_t, double>> entries);
  /// Dense probabilities over the canonical half.
  static FrequencyDistribution explicit_dense(std::shared_ptr<const FrequencySet> fs, std::span<const double> p);
  /// Per-dimension pmfs over each Omega~^(j), each summing to one.
  static FrequencyDistribution product(std::shared_ptr<const FrequencySet> fs,
                                       std::vector<std::vector<double>> per_dim);
  /// Tensor-train cores, core j of shape (chi_{j-1}, N_j, chi_j) with chi_0 = chi_d = 1.
  static FrequencyDistribution mps(std::shared_ptr<const FrequencySet> fs, std::vector<MpsCore> cores);

  Kind kind() const noexcept { return kind_; }
  std::string kind_name() const;
  const FrequencySet& freq_set() const noexcept { return *fs_; }
  const std::shared_ptr<const FrequencySet>& freq_set_ptr() const noexcept { return fs_; }

  /// Probability of a canonical frequency. Throws Config if omega is off-lattice or not canonical.
  double pmf(std::span<const double> omega) const;
  double pmf_index(std::uint64_t half_index) const;
  /// Unfolded probability over the full lattice (q above), by flat index. Explicit
  /// distributions split no mass: q(omega) = p(omega) for canonical omega, 0 otherwise.
  double full_pmf_flat(std::uint64_t flat) const;
  /// Dense pmf over the canonical half; Capacity error above the materialization cap.
  std::vector<double> dense_pmf(std::uint64_t cap = 10'000'000) const;
  double p_max(std::uint64_t cap = 10'000'000) const;
  /// Cheap upper bound: exact for Explicit, 2*prod_j max p^(j) for product, p_max otherwise.
  double p_max_upper_bound() const;

  /// Conditional pmf over Omega~^(j) given coordinates for dimensions 0..j-1 (MPS only).
  std::vector<double> mps_marginal(std::size_t j, std::span<const std::size_t> prefix) const;
  double mps_total_mass() const;

  /// M iid canonical draws (duplicates retained).
  std::vector<Frequency> sample(SeededRng& rng, std::size_t count) const;
  std::vector<std::uint64_t> sample_indices(SeededRng& rng, std::size_t count) const;

  const std::vector<std::pair<std::uint64_t, double>>& explicit_entries() const;
  const std::vector<std::vector<double>>& product_pmfs() const;
  const std::vector<MpsCore>& mps_cores() const;

 private:
  struct ExplicitRep {
    std::vector<std::pair<std::uint64_t, double>> entries;  // sorted by index
    std::vector<double> cumulative;
  };
  struct ProductRep {
    std::vector<std::vector<double>> per_dim;
  };
  struct MpsRep {
    std::vector<MpsCore> cores;
    std::vector<std::vector<double>> right_env;  // right_env[j]: length chi_j, contraction of cores j+1..d-1
    double total_mass = 0.0;
  };

  FrequencyDistribution(Kind kind, std::shared_ptr<const FrequencySet> fs) : kind_(kind), fs_(std::move(fs)) {}

  double full_pmf_coords(std::span<const std::size_t> coords) const;
  std::uint64_t fold_flat(std::uint64_t flat) const;
  std::uint64_t sample_flat(SeededRng& rng) const;

  Kind kind_;
  std::shared_ptr<const FrequencySet> fs_;
  std::variant<ExplicitRep, ProductRep, MpsRep> rep_;
};

enum class UniformKind {
  Explicit,     // 1/|Omega_D| on every canonical frequency
  LazyProduct,  // fold of per-dimension uniform pmfs: 1/|Omega~| at omega0, 2/|Omega~| elsewhere
};

FrequencyDistribution uniform_distribution(std::shared_ptr<const FrequencySet> fs,
                                           UniformKind kind = UniformKind::Explicit);

}  // namespace rffdq
