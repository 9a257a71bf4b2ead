#pragma once
// Independent reference implementations used as test oracles. They enumerate
// everything explicitly and share no code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline void dedupe(std::vector<double>& v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  v = std::move(out);
}

/// Every difference of two eigenvalue sums, one eigenvalue per spectrum in each sum.
inline std::vector<double> difference_set(const std::vector<std::vector<double>>& spectra) {
  std::vector<std::vector<std::size_t>> tuples{{}};
  for (const auto& s : spectra) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& t : tuples)
      for (std::size_t i = 0; i < s.size(); ++i) {
        auto u = t;
        u.push_back(i);
        next.push_back(std::move(u));
      }
    tuples = std::move(next);
  }
  std::vector<double> sums;
  for (const auto& t : tuples) {
    double s = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) s += spectra[k][t[k]];
    sums.push_back(s);
  }
  std::vector<double> diffs;
  for (double a : sums)
    for (double b : sums) diffs.push_back(a - b);
  dedupe(diffs, 1e-12);
  for (auto& d : diffs)
    if (std::abs(d) <= 1e-12) d = 0.0;
  return diffs;
}

/// Cartesian product of per-dimension sets.
inline std::vector<Vec> cartesian(const std::vector<std::vector<double>>& sets) {
  std::vector<Vec> out{{}};
  for (const auto& s : sets) {
    std::vector<Vec> next;
    for (const auto& v : out)
      for (double x : s) {
        auto u = v;
        u.push_back(x);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

inline bool canonical(const Vec& w) {
  for (double x : w) {
    if (x > 0) return true;
    if (x < 0) return false;
  }
  return true;
}

/// Integrates g over [0, 2pi)^d with an m^d trapezoid (exact for trig polynomials of degree < m).
inline double torus_mean(std::size_t d, std::size_t m, const std::function<double(const Vec&)>& g) {
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) total *= m;
  Vec x(d);
  double s = 0.0;
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t r = p;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = 2.0 * M_PI * static_cast<double>(r % m) / static_cast<double>(m);
      r /= m;
    }
    s += g(x);
  }
  return s / static_cast<double>(total);
}

}  // namespace oracle
