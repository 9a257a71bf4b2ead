#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace rffdq {

/// Counter-based generator: draw i is a pure function of (seed, stream, i),
/// so sequences are identical on every platform and parallel streams never overlap.
/// All derived variates are computed here rather than through <random>
/// distributions, whose algorithms are implementation-defined.
class SeededRng {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64-ctr";

  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Index i with probability weights[i] / sum(weights). Weights must be nonnegative with positive sum.
  std::size_t categorical(std::span<const double> weights) noexcept;

  /// Independent generator for a sub-stream (e.g. one per trial or sweep cell).
  SeededRng derive(std::uint64_t sub_stream) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace rffdq
