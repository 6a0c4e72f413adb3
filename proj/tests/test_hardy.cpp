#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "resodecay/hardy.hpp"

using resodecay::Complex;
using resodecay::HardyClass;
using resodecay::QuadratureSpec;
using resodecay::RationalHardyFunction;
using resodecay::RationalTerm;

namespace {

bool rel_close(Complex a, Complex b, double tol) {
  return std::abs(a - b) <= tol * (std::abs(b) + 1e-300);
}

RationalHardyFunction lower_double_pole() {
  return RationalHardyFunction({{Complex(0.0, 1.0), 2, Complex(1.0, 0.0)}},
                               HardyClass::LowerHalfPlane);
}

}  // namespace

TEST_CASE("class names round-trip and accept aliases") {
  CHECK(resodecay::hardy_class_name(HardyClass::LowerHalfPlane) == "H2-");
  CHECK(resodecay::hardy_class_name(HardyClass::UpperHalfPlane) == "H2+");
  CHECK(resodecay::hardy_class_from_name("H2-") == HardyClass::LowerHalfPlane);
  CHECK(resodecay::hardy_class_from_name("h2+") == HardyClass::UpperHalfPlane);
  CHECK(resodecay::hardy_class_from_name("lower") == HardyClass::LowerHalfPlane);
  CHECK_THROWS_AS(resodecay::hardy_class_from_name("bogus"), resodecay::BadParams);
}

TEST_CASE("construction enforces the declared half-plane") {
  // H2- functions are analytic below the axis; their poles must lie above it.
  CHECK_THROWS_AS(RationalHardyFunction({{Complex(1.0, -2.0), 1, Complex(1.0, 0.0)}},
                                        HardyClass::LowerHalfPlane),
                  resodecay::WrongClass);
  CHECK_THROWS_AS(RationalHardyFunction({{Complex(1.0, 2.0), 1, Complex(1.0, 0.0)}},
                                        HardyClass::UpperHalfPlane),
                  resodecay::WrongClass);
  // Poles pinned to the axis are rejected outright.
  CHECK_THROWS_AS(RationalHardyFunction({{Complex(1.0, 1e-12), 1, Complex(1.0, 0.0)}},
                                        HardyClass::LowerHalfPlane),
                  resodecay::BadParams);
  CHECK_THROWS_AS(RationalHardyFunction({{Complex(0.0, 1.0), 0, Complex(1.0, 0.0)}},
                                        HardyClass::LowerHalfPlane),
                  resodecay::BadParams);
}

TEST_CASE("evaluation matches the rational formula") {
  const RationalHardyFunction f({{Complex(1.0, 2.0), 2, Complex(0.5, -0.25)},
                                 {Complex(-1.0, 1.0), 1, Complex(0.0, 1.0)}},
                                HardyClass::LowerHalfPlane);
  const Complex z(0.3, -0.7);
  const Complex direct = Complex(0.5, -0.25) / std::pow(z - Complex(1.0, 2.0), 2) +
                         Complex(0.0, 1.0) / (z - Complex(-1.0, 1.0));
  CHECK(rel_close(f(z), direct, 1e-14));
  CHECK(rel_close(f(0.3), Complex(0.5, -0.25) / std::pow(Complex(0.3, 0.0) - Complex(1.0, 2.0), 2) +
                              Complex(0.0, 1.0) / (Complex(0.3, 0.0) - Complex(-1.0, 1.0)),
                  1e-14));
}

TEST_CASE("evaluation at a pole is refused") {
  const RationalHardyFunction f = lower_double_pole();
  CHECK_THROWS_AS(f(Complex(0.0, 1.0)), resodecay::EvalAtPole);
}

TEST_CASE("decay order counts multiplicities and cancellations") {
  CHECK(RationalHardyFunction({{Complex(0.0, 1.0), 1, Complex(1.0, 0.0)}},
                              HardyClass::LowerHalfPlane)
            .decay_order() == 1);
  CHECK(lower_double_pole().decay_order() == 2);
  // Leading 1/z coefficients cancel: c1 + c2 = 0 lifts the order to 2.
  const RationalHardyFunction cancel({{Complex(0.0, 1.0), 1, Complex(1.0, 0.0)},
                                      {Complex(0.0, 2.0), 1, Complex(-1.0, 0.0)}},
                                     HardyClass::LowerHalfPlane);
  CHECK(cancel.decay_order() == 2);
  CHECK(RationalHardyFunction({{Complex(1.0, 2.0), 3, Complex(2.0, 1.0)}},
                              HardyClass::LowerHalfPlane)
            .decay_order() == 3);
}

TEST_CASE("conjugate reflects poles and flips the class") {
  const RationalHardyFunction f({{Complex(1.0, 2.0), 2, Complex(0.5, -0.25)}},
                                HardyClass::LowerHalfPlane);
  const RationalHardyFunction g = f.conjugate();
  CHECK(g.hardy_class() == HardyClass::UpperHalfPlane);
  REQUIRE(g.terms().size() == 1);
  CHECK(g.terms()[0].pole == Complex(1.0, -2.0));
  // g(z) = conj(f(conj z)) pointwise.
  const Complex z(0.4, 1.1);
  CHECK(rel_close(g(z), std::conj(f(std::conj(z))), 1e-14));
}

TEST_CASE("membership: a lower-class function passes its own class") {
  const QuadratureSpec spec;
  const auto report =
      resodecay::hardy_membership_check(lower_double_pole(), HardyClass::LowerHalfPlane,
                                        1e-6, spec);
  CHECK(report.pass);
  CHECK(report.residual <= 1e-6);
  CHECK(report.leakage <= 1e-6);
  CHECK(!report.probes.empty());
}

TEST_CASE("membership: the wrong claim fails loudly") {
  const QuadratureSpec spec;
  // Claimed analytic above the axis, but the pole at +i breaks reconstruction
  // there; the mismatch is of the order of the function itself.
  const auto report =
      resodecay::hardy_membership_check(lower_double_pole(), HardyClass::UpperHalfPlane,
                                        1e-6, spec);
  CHECK(!report.pass);
  CHECK(report.residual > 1e-3);
}

TEST_CASE("membership: upper-class function in its own class, and crossed") {
  const QuadratureSpec spec;
  const RationalHardyFunction f({{Complex(0.0, -1.0), 2, Complex(1.0, 0.0)}},
                                HardyClass::UpperHalfPlane);
  CHECK(resodecay::hardy_membership_check(f, HardyClass::UpperHalfPlane, 1e-6, spec).pass);
  const auto crossed =
      resodecay::hardy_membership_check(f, HardyClass::LowerHalfPlane, 1e-6, spec);
  CHECK(!crossed.pass);
}

TEST_CASE("Titchmarsh reconstruction hits the function value below the axis") {
  const QuadratureSpec spec;
  const RationalHardyFunction f({{Complex(2.0, 0.5), 2, Complex(1.0, 0.0)},
                                 {Complex(-1.0, 1.5), 1, Complex(0.0, -2.0)}},
                                HardyClass::LowerHalfPlane);
  for (const Complex z : {Complex(0.0, -0.5), Complex(3.0, -2.0), Complex(-4.0, -0.1)}) {
    CHECK(rel_close(resodecay::titchmarsh_reconstruct(f, z, spec), f(z), 1e-7));
  }
}

TEST_CASE("Titchmarsh reconstruction guards its domain") {
  const QuadratureSpec spec;
  const RationalHardyFunction upper({{Complex(0.0, -1.0), 2, Complex(1.0, 0.0)}},
                                    HardyClass::UpperHalfPlane);
  CHECK_THROWS_AS(resodecay::titchmarsh_reconstruct(upper, Complex(0.0, -1.5), spec),
                  resodecay::WrongClass);
  CHECK_THROWS_AS(
      resodecay::titchmarsh_reconstruct(lower_double_pole(), Complex(0.0, 1.5), spec),
      resodecay::BadParams);
}

TEST_CASE("JSON round trip preserves terms and class") {
  const RationalHardyFunction f({{Complex(1.0, 2.0), 2, Complex(0.5, -0.25)},
                                 {Complex(-1.0, 1.0), 1, Complex(0.0, 1.0)}},
                                HardyClass::LowerHalfPlane);
  const RationalHardyFunction g = RationalHardyFunction::from_json(f.to_json());
  CHECK(g.hardy_class() == f.hardy_class());
  REQUIRE(g.terms().size() == f.terms().size());
  for (std::size_t i = 0; i < f.terms().size(); ++i) {
    CHECK(g.terms()[i].pole == f.terms()[i].pole);
    CHECK(g.terms()[i].multiplicity == f.terms()[i].multiplicity);
    CHECK(g.terms()[i].coefficient == f.terms()[i].coefficient);
  }
  CHECK_THROWS_AS(RationalHardyFunction::from_json("not json at all"),
                  resodecay::InvalidData);
  CHECK_THROWS_AS(RationalHardyFunction::from_json("{\"class\": \"H2-\"}"),
                  resodecay::InvalidData);
}
