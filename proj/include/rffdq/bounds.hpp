#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rffdq/freqcore.hpp"
#include "rffdq/freqsample.hpp"
#include "rffdq/kernelmap.hpp"

namespace rffdq {

struct SufficientInputs {
  double op_norm = 0.5;
  double C = 1.0;
  double b = 1.0;
  double eps = 0.1;
  double delta = 0.05;
};

struct BoundsReport {
  SufficientInputs inputs;
  double n0 = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double n_min = 0.0;
  double m_min = 0.0;  // frequency samples required at n = n_min
  std::string notes;
};

/// Sufficient data and frequency sample counts for RFF regression to be within eps of the
/// best function of RKHS norm <= C, with probability 1 - delta. Natural logarithms.
BoundsReport theorem1_sufficient(const SufficientInputs& in);
double theorem1_n0(double op_norm, double delta);
double theorem1_c0(double op_norm);
double theorem1_c1(double b, double C);
/// M threshold c0 sqrt(n) ln(108 sqrt(n) / delta) at an arbitrary n.
double theorem1_m_min(double op_norm, double n, double delta);

/// sum over the canonical half of |f(omega)|^2 p(omega).
double alignment(const TrigPolynomial& f_hat, const FrequencyDistribution& p);

/// Right-hand side of the overlap form of the lower bound: (2pi)^d (||f||^2 - 2 M alignment).
double lower_bound_rhs(const TrigPolynomial& f_hat, const FrequencyDistribution& p, double M);

struct LowerBoundReport {
  double p_max = 0.0;
  bool p_max_exact = true;       // false when only an upper bound on p_max was affordable
  double alignment = 0.0;
  double coeff_norm_sq = 0.0;    // ||f_hat||_2^2 over the full lattice
  double l2_sq = 0.0;            // ||f*||_2^2 = (2pi)^d ||f_hat||_2^2
  double eps_hat = 0.0;
  double m_required_pmax = 0.0;
  double m_required_alignment = 0.0;
  bool integer_lattice = true;
  bool vacuous = false;          // ||f*||^2 <= eps_hat
};

/// Necessary frequency-sample counts for expected squared L2 error eps_hat (unnormalised
/// Lebesgue measure). Requires an integer lattice shared by f_hat and p.
LowerBoundReport lemma3_required_samples(const TrigPolynomial& f_hat, const FrequencyDistribution& p,
                                         double eps_hat);

enum class Verdict { SufficientBoundPoly, LowerBoundBlocks, Inconclusive };
std::string verdict_name(Verdict v);

struct FeasibilityInputs {
  std::optional<TrigPolynomial> f_hat;
  std::optional<double> C;
  double b = 1.0;
  double eps = 0.1;
  double delta = 0.05;
  std::optional<double> eps_hat;  // defaults to eps
  std::optional<double> budget;   // polynomial sample budget; defaults to max(16, d^3)
};

struct FeasibilityReport {
  Verdict verdict = Verdict::Inconclusive;
  std::size_t dim = 0;
  double budget = 0.0;
  double p_max = 0.0;
  bool p_max_exact = true;
  std::string p_max_note;
  std::optional<double> rkhs_norm;
  std::optional<BoundsReport> sufficient;
  std::optional<LowerBoundReport> lower;
  std::vector<std::string> notes;
};

FeasibilityReport feasibility_report(const EncodingStrategy& enc, const FrequencyDistribution& dist,
                                     const FeasibilityInputs& in);

}  // namespace rffdq
