// Three-state stress models: transition jumps, exponential mixtures, negative
// mean drift, and a complex conjugate root pair.  Frozen matrices come from an
// independent implementation of the same spectral problem; the Monte Carlo
// checks close the loop between the generator convention q_ij Gtilde_i and the
// simulator's jump-at-transition sampling.
#include <doctest.h>

#include "mapfluct/cumulant.hpp"
#include "mapfluct/rng.hpp"
#include "mapfluct/ladder.hpp"
#include "mapfluct/simulate.hpp"

using namespace mapfluct;

namespace {

ValidatedModel model_trans_jumps() {
  MapSpec s;
  s.n_states = 3;
  s.Q = Matrix{{-2.0, 1.5, 0.5}, {1.0, -1.5, 0.5}, {0.5, 1.0, -1.5}};
  s.levy = {
      LevyComponent{0.5, 1.5, {{0.7, JumpLaw::mixture({0.4, 0.6}, {1.5, 3.0}, -1)}}},
      LevyComponent{-0.3, 2.0, {}},
      LevyComponent{1.0, 1.0, {{0.5, JumpLaw::exponential(2.0, -1)}}},
  };
  s.trans_jump = {JumpLaw::degenerate(-0.2), JumpLaw::exponential(1.5, -1),
                  JumpLaw::degenerate(0.0)};
  s.spectrally_negative = true;
  return validate_or_throw(s);
}

ValidatedModel model_complex_pair() {
  MapSpec s;
  s.n_states = 3;
  s.Q = Matrix{{-5.0, 1.75, 3.25}, {4.5, -5.5, 1.0}, {1.25, 4.75, -6.0}};
  s.levy = {LevyComponent{1.8, 2.5, {}}, LevyComponent{4.0, 2.35, {}},
            LevyComponent{3.5, 1.2, {}}};
  s.trans_jump = {JumpLaw::degenerate(0.0), JumpLaw::degenerate(0.0), JumpLaw::degenerate(0.0)};
  s.spectrally_negative = true;
  return validate_or_throw(s);
}

}  // namespace

TEST_CASE("three-state model with transition jumps and mixtures") {
  auto m = model_trans_jumps();
  CHECK(kappa_derivative0(m) == doctest::Approx(-0.4744444444444444).epsilon(1e-12));

  auto L = ladder_factors(m, 1.0);
  CHECK(L->phi_q == doctest::Approx(1.2169930054636269).epsilon(1e-9));
  REQUIRE(L->roots.size() == 3);
  for (const auto& r : L->roots) {
    CHECK(r.zeta.real() > 0.0);
    CMatrix A = cgm_eval(m, r.zeta) - CMatrix::Identity(3, 3);
    CHECK((A * r.u).cwiseAbs().maxCoeff() < 1e-8);
  }
  Matrix Xi_expect{{1.753443629758729, -0.3882476490179531, -0.1484727891445668},
                   {-0.1614930320306245, 1.6738130847831638, -0.1033845289086873},
                   {-0.2088502911556036, -0.4137152872044617, 1.5208558035388615}};
  CHECK((L->Xi0 - Xi_expect).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(L->Lambda.rowwise().sum().cwiseAbs().maxCoeff() < 1e-8);

  Matrix upx_expect{{0.4997920496858373, 0.08109043650621, 0.0326415306174705},
                    {0.0335658250936032, 0.5163892787952307, 0.0229055036007562},
                    {0.0463443907331656, 0.0910452397469242, 0.5474944694102961}};
  CHECK((up_crossing(m, 1.0, 0.0, 0.4) - upx_expect).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("transition-jump convention agrees with the simulator") {
  auto m = model_trans_jumps();
  const long n = 30000;

  // up-crossing transform: exact first-passage sampling vs exp(-Xi(1,0) x)
  auto fp = first_passage(m, 0.4, n, 515, std::nullopt, 25.0);
  EstimateMatrix est = estimate_passage_transform(fp, 1.0, 3);
  Matrix exact = up_crossing(m, 1.0, 0.0, 0.4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(est.value(i, j).real() - exact(i, j)) < 3.5 * est.stderr_(i, j) + 1e-4);

  // sup factor from killed paths
  auto ks = killed_stats(m, 1.0, n, 516);
  FunctionalSpec f;
  f.weight = Weight::sup_laplace;
  f.alpha = 0.5;
  f.xi = 0.2;
  f.epoch = Epoch::at_eq;
  EstimateMatrix sup = estimate_transform(ks, f, 3);
  Matrix sup_exact = sup_factor(m, 1.0, 0.5, 0.2, Conditioning::at_eq);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(sup.value(i, j).real() - sup_exact(i, j)) < 3.5 * sup.stderr_(i, j) + 1e-4);
}

TEST_CASE("inf factor at the infimum epoch on bounded-variation paths") {
  // for drift-minus-subordinator paths the time set {X = S} has positive
  // measure and the state distribution at the extremum epoch differs from
  // pi; the at_G normalizer must use it, or row sums of the alpha=xi=0
  // factor (a law of J(G)) come out wrong
  auto m = validate_or_throw(builtin("MODEL-C"));
  Matrix P = inf_factor(m, 1.0, 0.0, 0.0, Conditioning::at_G);
  CHECK((P.rowwise().sum() - Vector::Ones(2)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(P.minCoeff() > 0.0);

  const long n = 150000;
  auto ks = killed_stats(m, 1.0, n, 2718);
  for (auto [alpha, xi] : {std::pair{0.0, 0.0}, std::pair{0.4, 0.2}}) {
    FunctionalSpec f;
    f.weight = Weight::inf_laplace;
    f.alpha = alpha;
    f.xi = xi;
    f.epoch = Epoch::at_G;
    EstimateMatrix est = estimate_transform(ks, f, 2);
    Matrix exact = inf_factor(m, 1.0, alpha, xi, Conditioning::at_G);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(std::abs(est.value(i, j).real() - exact(i, j)) < 3.5 * est.stderr_(i, j));
  }
}

TEST_CASE("ladder bundle invariants across a randomized model family") {
  Philox rng(424242, 0);
  auto urange = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  int built = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 3.0);
    MapSpec s;
    s.n_states = n;
    s.Q = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        if (i != j) s.Q(i, j) = urange(0.2, 4.0);
      s.Q(i, i) = -s.Q.row(i).sum();
    }
    for (int i = 0; i < n; ++i) {
      LevyComponent lc;
      lc.drift = urange(-2.0, 3.0);
      lc.sigma2 = urange(0.1, 3.0);
      if (rng.uniform() < 0.5) {
        if (rng.uniform() < 0.5)
          lc.jumps.push_back({urange(0.2, 1.5), JumpLaw::exponential(urange(0.5, 3.0), -1)});
        else
          lc.jumps.push_back({urange(0.2, 1.5),
                              JumpLaw::mixture({0.3, 0.7}, {urange(0.5, 2.0), urange(2.0, 5.0)}, -1)});
      }
      s.levy.push_back(std::move(lc));
      double u = rng.uniform();
      if (u < 0.4) s.trans_jump.push_back(JumpLaw::degenerate(0.0));
      else if (u < 0.7) s.trans_jump.push_back(JumpLaw::degenerate(-urange(0.05, 0.6)));
      else s.trans_jump.push_back(JumpLaw::exponential(urange(0.8, 3.0), -1));
    }
    s.spectrally_negative = true;
    auto m = validate_or_throw(s);
    for (double q : {0.4, 1.3}) {
      std::shared_ptr<const LadderFactors> L;
      try {
        L = ladder_factors(m, q);
      } catch (const DefectiveRoots&) {
        // coalescing roots: the documented remedy is a perturbed q
        L = ladder_factors(m, q * 1.000173);
      }
      ++built;
      REQUIRE(static_cast<int>(L->roots.size()) == n);
      CHECK(std::abs(kappa(m, L->phi_q) - L->q) < 1e-9);
      for (const auto& r : L->roots) {
        CHECK(r.zeta.real() > 0.0);
        CMatrix A = cgm_eval(m, r.zeta) - L->q * CMatrix::Identity(n, n);
        CHECK((A * r.u).cwiseAbs().maxCoeff() < 1e-7);
      }
      CHECK(L->Lambda.rowwise().sum().cwiseAbs().maxCoeff() < 1e-7);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) CHECK(L->Lambda(i, j) > -1e-7);
      CHECK((xi_matrix(m, L->q, 0.3) - L->Xi0 - 0.3 * Matrix::Identity(n, n))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
  CHECK(built == 50);
}

TEST_CASE("complex conjugate root pair assembles a real ladder bundle") {
  auto m = model_complex_pair();
  auto L = ladder_factors(m, 1.0);
  REQUIRE(L->roots.size() == 3);

  int complex_count = 0;
  for (const auto& r : L->roots)
    if (std::abs(r.zeta.imag()) > 1e-9) ++complex_count;
  CHECK(complex_count == 2);

  // frozen from the exact characteristic polynomial of det(F(z) - I)
  CHECK(L->phi_q == doctest::Approx(0.29698767000367354).epsilon(1e-9));
  bool seen_pair = false;
  for (const auto& r : L->roots)
    if (r.zeta.imag() > 1e-9) {
      seen_pair = true;
      CHECK(r.zeta.real() == doctest::Approx(1.9100205958179348).epsilon(1e-8));
      CHECK(r.zeta.imag() == doctest::Approx(0.3375903287897006).epsilon(1e-8));
    }
  CHECK(seen_pair);

  Matrix Xi_expect{{1.4739078647204, -0.4914936244700666, -0.6075661999123086},
                   {-0.6499693793076574, 1.1109878453320916, -0.2060336897378097},
                   {-0.30566623869843, -0.9516832581061538, 1.5321331515870507}};
  CHECK((L->Xi0 - Xi_expect).cwiseAbs().maxCoeff() < 1e-7);

  // Lambda stays a generator even through the complex pair
  CHECK(L->Lambda.rowwise().sum().cwiseAbs().maxCoeff() < 1e-8);
  double offmin = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) offmin = std::min(offmin, L->Lambda(i, j));
  CHECK(offmin > -1e-8);

  Matrix upx_expect{{0.6588507747486895, 0.1185375071384303, 0.1204608538623807},
                    {0.1357166488668586, 0.7338865253503648, 0.0539046772833226},
                    {0.0776256124917106, 0.1987941713286613, 0.6438977490216711}};
  CHECK((up_crossing(m, 1.0, 0.0, 0.3) - upx_expect).cwiseAbs().maxCoeff() < 1e-7);
}
