#include "rffdq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rffdq/error.hpp"

namespace rffdq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_op_norm(double op_norm) {
  require(std::isfinite(op_norm) && op_norm > 0.0 && op_norm <= 0.5, ErrorKind::Domain,
          "operator norm must lie in (0, 1/2]");
}

void check_delta(double delta) {
  require(std::isfinite(delta) && delta > 0.0 && delta <= 1.0, ErrorKind::Domain, "delta must lie in (0, 1]");
}

void check_shared_lattice(const TrigPolynomial& f, const FrequencyDistribution& p) {
  require(f.freq_set().same_lattice(p.freq_set()), ErrorKind::Config,
          "function and distribution are defined on different frequency lattices");
}

std::pair<double, bool> best_p_max(const FrequencyDistribution& p) {
  try {
    return {p.p_max(), true};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Capacity) throw;
    return {p.p_max_upper_bound(), false};
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double theorem1_n0(double op_norm, double delta) {
  check_op_norm(op_norm);
  check_delta(delta);
  const double second = 528.0 * std::log(1112.0 * std::numbers::sqrt2 / delta);
  return std::max(4.0 * op_norm * op_norm, second * second);
}

double theorem1_c0(double op_norm) {
  check_op_norm(op_norm);
  return 36.0 * (3.0 + 2.0 / op_norm);
}

double theorem1_c1(double b, double C) {
  require(std::isfinite(b) && b > 0.0 && std::isfinite(C) && C > 0.0, ErrorKind::Domain, "b and C must be positive");
  return 8.0 * std::numbers::sqrt2 * (4.0 * b + (5.0 / std::numbers::sqrt2) * C + 2.0 * std::sqrt(2.0 * C));
}

double theorem1_m_min(double op_norm, double n, double delta) {
  check_delta(delta);
  require(std::isfinite(n) && n >= 1.0, ErrorKind::Domain, "n must be at least 1");
  const double root = std::sqrt(n);
  return theorem1_c0(op_norm) * root * std::log(108.0 * root / delta);
}

BoundsReport theorem1_sufficient(const SufficientInputs& in) {
  require(std::isfinite(in.eps) && in.eps > 0.0, ErrorKind::Domain, "eps must be positive");
  BoundsReport r;
  r.inputs = in;
  r.n0 = theorem1_n0(in.op_norm, in.delta);
  r.c0 = theorem1_c0(in.op_norm);
  r.c1 = theorem1_c1(in.b, in.C);
  const double l = std::log(1.0 / in.delta);
  r.n_min = std::max(r.c1 * r.c1 * l * l * l * l / (in.eps * in.eps), r.n0);
  r.m_min = theorem1_m_min(in.op_norm, r.n_min, in.delta);
  r.notes = r.n_min == r.n0 ? "n bound set by n0" : "n bound set by the c1 term";
  return r;
}

double alignment(const TrigPolynomial& f_hat, const FrequencyDistribution& p) {
  check_shared_lattice(f_hat, p);
  double a = 0.0;
  for (std::size_t i : f_hat.support(0.0)) a += std::norm(f_hat.coeff(i)) * p.pmf_index(i);
  return a;
}

double lower_bound_rhs(const TrigPolynomial& f_hat, const FrequencyDistribution& p, double M) {
  const double vol = std::pow(kTwoPi, static_cast<double>(f_hat.dim()));
  return vol * (coefficient_norm_sq(f_hat) - 2.0 * M * alignment(f_hat, p));
}

LowerBoundReport lemma3_required_samples(const TrigPolynomial& f_hat, const FrequencyDistribution& p,
                                         double eps_hat) {
  check_shared_lattice(f_hat, p);
  require(f_hat.freq_set().is_integer(), ErrorKind::Domain, "the lower bound needs an integer frequency lattice");
  require(std::isfinite(eps_hat) && eps_hat >= 0.0, ErrorKind::Domain, "eps_hat must be nonnegative");
  LowerBoundReport r;
  std::tie(r.p_max, r.p_max_exact) = best_p_max(p);
  r.alignment = alignment(f_hat, p);
  r.coeff_norm_sq = coefficient_norm_sq(f_hat);
  r.l2_sq = l2_norm_sq(f_hat);
  r.eps_hat = eps_hat;
  r.vacuous = r.l2_sq <= eps_hat;
  if (r.vacuous) return r;
  r.m_required_pmax = (1.0 / (2.0 * r.p_max)) * (1.0 - eps_hat / r.l2_sq);
  const double vol = std::pow(kTwoPi, static_cast<double>(f_hat.dim()));
  const double gap = r.coeff_norm_sq - eps_hat / vol;
  r.m_required_alignment =
      r.alignment > 0.0 ? gap / (2.0 * r.alignment) : std::numeric_limits<double>::infinity();
  return r;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::SufficientBoundPoly: return "SUFFICIENT-BOUND-POLY";
    case Verdict::LowerBoundBlocks: return "LOWER-BOUND-BLOCKS";
    default: return "INCONCLUSIVE";
  }
}

FeasibilityReport feasibility_report(const EncodingStrategy& enc, const FrequencyDistribution& dist,
                                     const FeasibilityInputs& in) {
  const auto lattice = FrequencySet::build(enc, false);
  require(lattice.same_lattice(dist.freq_set()), ErrorKind::Config,
          "distribution lattice does not match the encoding strategy");
  FeasibilityReport r;
  r.dim = lattice.dim();
  const double d = static_cast<double>(r.dim);
  r.budget = in.budget.value_or(std::max(16.0, d * d * d));
  require(r.budget > 0.0, ErrorKind::Config, "budget must be positive");
  std::tie(r.p_max, r.p_max_exact) = best_p_max(dist);

  switch (dist.kind()) {
    case FrequencyDistribution::Kind::ProductInduced: {
      double prod = 1.0;
      for (const auto& pj : dist.product_pmfs()) prod *= *std::max_element(pj.begin(), pj.end());
      r.p_max_note = "product-induced: p_max <= 2 * prod_j max p~(j) = " + format_double(2.0 * prod) +
                     ", which decays exponentially in d unless the per-dimension pmfs are point masses";
      break;
    }
    case FrequencyDistribution::Kind::MpsInduced:
      r.p_max_note = r.p_max_exact ? "mps-induced: p_max by enumeration" : "mps-induced: p_max not enumerable";
      break;
    default:
      r.p_max_note = "explicit: p_max read from the table";
  }
  if (!r.p_max_exact) r.notes.push_back("p_max replaced by an upper bound; the lattice is too large to enumerate");

  const double op_norm = std::min(0.5, r.p_max / 2.0);
  std::optional<double> C = in.C;
  if (in.f_hat) {
    try {
      const auto w = weights_of(dist.dense_pmf());
      r.rkhs_norm = rkhs_norm(*in.f_hat, w);
      if (!C) C = r.rkhs_norm;
    } catch (const Error& e) {
      r.notes.push_back(std::string("RKHS norm unavailable: ") + e.what());
    }
    try {
      r.lower = lemma3_required_samples(*in.f_hat, dist, in.eps_hat.value_or(in.eps));
    } catch (const Error& e) {
      r.notes.push_back(std::string("lower bound unavailable: ") + e.what());
    }
  }
  if (C && *C > 0.0 && op_norm > 0.0)
    r.sufficient = theorem1_sufficient({op_norm, *C, in.b, in.eps, in.delta});

  bool blocks = false;
  if (r.lower && !r.lower->vacuous) {
    const double need = std::max(r.lower->m_required_pmax, r.lower->m_required_alignment);
    blocks = need > r.budget;
    if (blocks) r.notes.push_back("necessary M (" + format_double(need) + ") exceeds budget " + format_double(r.budget));
  } else if (r.lower) {
    r.notes.push_back("lower bound is vacuous: ||f*||^2 <= eps_hat");
  }

  if (blocks) {
    r.verdict = Verdict::LowerBoundBlocks;
  } else if (C && r.p_max >= 1.0 / r.budget && *C <= r.budget) {
    r.verdict = Verdict::SufficientBoundPoly;
    r.notes.push_back("p_max >= 1/budget and C <= budget, so the sufficient sample counts scale polynomially");
  } else {
    r.verdict = Verdict::Inconclusive;
    if (!C) r.notes.push_back("RKHS norm C unknown");
  }
  return r;
}

}  // namespace rffdq
