#pragma once

#include <string>
#include <vector>

#include "resodecay/quadrature.hpp"

namespace resodecay {

// Which half-plane a function is analytic in. LowerHalfPlane ("H2-") means
// analytic for Im z < 0, i.e. every pole lies above the real axis; these are
// the functions with one-sided Fourier transforms supported on t > 0.
enum class HardyClass { LowerHalfPlane, UpperHalfPlane };

std::string hardy_class_name(HardyClass c);
HardyClass hardy_class_from_name(const std::string& name);

struct RationalTerm {
  Complex pole{0.0, 1.0};
  int multiplicity = 1;
  Complex coefficient{1.0, 0.0};
};

// Finite sum of c_k / (z - p_k)^{m_k}. The declared Hardy class is enforced
// at construction: every pole must sit strictly inside the forbidden
// half-plane for that class (above the axis for H2-, below for H2+).
class RationalHardyFunction {
 public:
  RationalHardyFunction(std::vector<RationalTerm> terms, HardyClass cls);

  const std::vector<RationalTerm>& terms() const { return terms_; }
  HardyClass hardy_class() const { return cls_; }

  // Power p in the large-|z| behaviour |f(z)| ~ C / |z|^p, detected from the
  // asymptotic expansion (cancellations between terms raise it above the
  // smallest multiplicity). The zero function reports a large sentinel.
  int decay_order() const { return decay_order_; }

  Complex operator()(Complex z) const;
  Complex operator()(double e) const { return (*this)(Complex(e, 0.0)); }

  // conj(f(conj z)): poles reflect across the axis, class flips.
  RationalHardyFunction conjugate() const;

  AnalyticIntegrand as_integrand() const;

  std::string to_json() const;
  static RationalHardyFunction from_json(const std::string& text);

 private:
  std::vector<RationalTerm> terms_;
  HardyClass cls_;
  int decay_order_;
};

struct MembershipReport {
  double residual = 0.0;  // worst reconstruction mismatch on the analytic side
  double leakage = 0.0;   // worst kernel magnitude on the forbidden side
  bool pass = false;
  std::vector<Complex> probes;
};

// Numerical Hardy-class test: at probe points straddling the axis, the Cauchy
// kernel must reproduce f on the analytic side and vanish on the other.
// The claimed class is checked as stated, independent of how f was built.
MembershipReport hardy_membership_check(const RationalHardyFunction& f,
                                        HardyClass claimed, double tol,
                                        const QuadratureSpec& spec);

// (i / 2 pi) Int f(E) / (E - z) dE for f in H2- and Im z < 0, where it
// reproduces f(z).
Complex titchmarsh_reconstruct(const RationalHardyFunction& f, Complex z,
                               const QuadratureSpec& spec);

}  // namespace resodecay
