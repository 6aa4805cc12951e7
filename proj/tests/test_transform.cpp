#include <doctest.h>

#include "mapfluct/transform.hpp"

using namespace mapfluct;

TEST_CASE("tilted view") {
  auto mA = validate_or_throw(builtin("MODEL-A"));

  TiltedView tv0(mA, 0.0);
  CHECK((tv0.cgm_real(0.5) - cgm_eval_real(mA, 0.5)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(tv0.kappa(0.5) - kappa(mA, 0.5)) < 1e-12);

  TiltedView tv(mA, 1.0);
  // F_gamma(0) is a generator
  Matrix F0 = tv.cgm_real(0.0);
  CHECK(F0.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
  CHECK(F0(0, 1) >= 0.0);
  CHECK(F0(1, 0) >= 0.0);

  // kappa shift identity evaluated through two independent perron calls
  CHECK(std::abs(tv.kappa(0.5) - (kappa(mA, 1.5) - kappa(mA, 1.0))) < 1e-10);

  // tilt composition
  TiltedView tv12(mA, 1.0 + 0.4);
  TiltedView tv1(mA, 1.0);
  for (double a : {0.0, 0.3, 0.9})
    CHECK(std::abs(tv12.kappa(a) - (tv1.kappa(a + 0.4) - tv1.kappa(0.4))) < 1e-9);

  // h_gamma is the Perron vector of the tilted cumulant matrix
  Vector hg = tv.h(0.5);
  Matrix Fg = tv.cgm_real(0.5);
  CHECK((Fg * hg - tv.kappa(0.5) * hg).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(tv.stationary().dot(hg) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("reversed view") {
  auto mA = validate_or_throw(builtin("MODEL-A"));
  ReversedView rv(mA);

  // MODEL-A is reversible: Qhat equals Q
  CHECK((rv.Qhat() - mA.Q()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rv.Qhat().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);

  const Vector& pi = mA.stationary();
  for (double a : {0.0, 0.4, 0.8, 1.3, 2.0}) {
    CHECK(std::abs(rv.kappa(a) - kappa(mA, a)) < 1e-10);
    // duality normalization: D_pi h^(a)^T = v(a)^T
    Vector hh = rv.h(a);
    Vector v = perron(mA, a).v;
    CHECK((Vector(pi.asDiagonal() * hh) - v).cwiseAbs().maxCoeff() < 1e-8);
    // double reversal comes back to the base cumulant matrix
    Matrix Fh = rv.cgm_real(a);
    Matrix Fhh = pi.cwiseInverse().asDiagonal() * Fh.transpose() * pi.asDiagonal();
    CHECK((Fhh - cgm_eval_real(mA, a)).cwiseAbs().maxCoeff() < 1e-12);
  }

  // a non-reversible chain still yields a generator with matching spectrum
  MapSpec s = builtin("MODEL-A");
  s.Q = Matrix{{-1.0, 1.0}, {0.5, -0.5}};
  auto m2 = validate_or_throw(s);
  ReversedView rv2(m2);
  CHECK(rv2.Qhat().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(rv2.kappa(0.7) - kappa(m2, 0.7)) < 1e-10);
}
