#include "mapfluct/suites.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "mapfluct/cumulant.hpp"
#include "mapfluct/ladder.hpp"
#include "mapfluct/rng.hpp"
#include "mapfluct/simulate.hpp"
#include "mapfluct/transform.hpp"

namespace mapfluct {

namespace {

class Timer {
public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

ValidatedModel scalar_brownian(double a, double s2) {
  MapSpec s;
  s.n_states = 1;
  s.Q = Matrix::Zero(1, 1);
  s.levy = {LevyComponent{a, s2, {}}};
  s.trans_jump = {JumpLaw::degenerate(0.0)};
  s.spectrally_negative = true;
  return validate_or_throw(s);
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// largest |estimate - exact| / stderr over entries (with a tiny floor)
double max_z(const CMatrix& est, const Matrix& se, const CMatrix& exact) {
  double z = 0.0;
  for (int i = 0; i < est.rows(); ++i)
    for (int j = 0; j < est.cols(); ++j)
      z = std::max(z, std::abs(est(i, j) - exact(i, j)) / (se(i, j) + 1e-12));
  return z;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

SuiteReport suite_scalar_reduction() {
  Timer timer;
  SuiteReport rep;
  rep.suite = "scalar-reduction";
  rep.model = "N=1 Brownian";
  const double qs[] = {0.5, 1.0, 2.0};
  const double xis[] = {0.0, 0.3};
  const double fracs[] = {0.25, 0.7};
  for (auto [a, s2] : {std::pair{0.0, 1.0}, std::pair{1.0, 2.0}, std::pair{-0.5, 1.0}}) {
    ValidatedModel m = scalar_brownian(a, s2);
    auto psi = [&](double th) { return a * th + 0.5 * s2 * th * th; };
    for (double q : qs)
      for (double xi : xis)
        for (double frac : fracs) {
          double phi_q = phi_inverse(m, q);
          double phi_qx = phi_inverse(m, q + xi);
          double alpha = frac * phi_qx;
          std::ostringstream tag;
          tag << "[a=" << a << ",s2=" << s2 << ",q=" << q << ",xi=" << xi << ",alpha=" << fmt(alpha) << "]";
          double sup = sup_factor(m, q, alpha, xi, Conditioning::at_eq)(0, 0);
          double sup_exact = phi_q / (phi_qx + alpha);
          rep.add("scalar-sup" + tag.str(), std::abs(sup - sup_exact), 1e-9);
          double inf = inf_factor(m, q, alpha, xi, Conditioning::at_eq)(0, 0);
          double inf_exact = q * (phi_qx - alpha) / (phi_q * (q + xi - psi(alpha)));
          rep.add("scalar-inf" + tag.str(), std::abs(inf - inf_exact), 1e-9);
        }
  }
  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport suite_structure(const ValidatedModel& m, std::uint64_t seed) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "structure";
  rep.seed = seed;
  const int n = m.n_states();
  const Vector& pi = m.stationary();
  const Matrix id = Matrix::Identity(n, n);

  // stationary distribution
  rep.add("stationary-piQ", (pi.transpose() * m.Q()).cwiseAbs().maxCoeff(), 1e-10);
  {
    MapSpec scaled = m.spec();
    scaled.Q *= 3.0;
    Vector pi3 = validate_or_throw(scaled).stationary();
    rep.add("stationary-rescale-invariant", (pi3 - pi).cwiseAbs().maxCoeff(), 1e-12);
  }

  // Perron triple at 0 and on a grid
  SpectralTriple t0 = perron(m, 0.0);
  rep.add("kappa(0)", std::abs(t0.kappa), 1e-12);
  rep.add("h(0)=e", (t0.h - Vector::Ones(n)).cwiseAbs().maxCoeff(), 1e-12);

  double hi_cap = std::min(3.0, 0.9 * m.alpha_hi());
  std::vector<double> agrid;
  for (int k = 0; k <= 20; ++k) agrid.push_back(hi_cap * k / 20.0);
  double norm_res = 0.0, eig_res = 0.0;
  for (double a : agrid) {
    SpectralTriple t = perron(m, a);
    norm_res = std::max(norm_res, std::abs(t.v.dot(t.h) - 1.0));
    norm_res = std::max(norm_res, std::abs(pi.dot(t.h) - 1.0));
    Matrix F = cgm_eval_real(m, a);
    eig_res = std::max(eig_res, (F * t.h - t.kappa * t.h).cwiseAbs().maxCoeff());
    eig_res = std::max(eig_res, (t.v.transpose() * F - t.kappa * t.v.transpose()).cwiseAbs().maxCoeff());
  }
  rep.add("perron-normalization", norm_res, 1e-10);
  rep.add("perron-eigen-residual", eig_res, 1e-10);

  // convexity of kappa via second differences
  {
    double worst = 0.0;
    std::vector<double> kv;
    for (double a : agrid) kv.push_back(kappa(m, a));
    for (std::size_t k = 1; k + 1 < kv.size(); ++k)
      worst = std::min(worst, kv[k + 1] - 2.0 * kv[k] + kv[k - 1]);
    rep.add("kappa-convexity", std::max(0.0, -worst), 1e-8);
  }

  // kappa'(0): analytic vs central difference
  {
    double kp = kappa_derivative0(m);
    double h = 1e-5;
    double fd = (kappa(m, h) - kappa(m, -h)) / (2.0 * h);
    rep.add("kappa-prime0-fd", std::abs(kp - fd), 1e-6);
  }

  // conservativity of exp(F(0) t)
  {
    double worst = 0.0;
    for (double t : {0.7, 1.3}) {
      Matrix E = Matrix(m.Q() * t).exp();
      worst = std::max(worst, (E.rowwise().sum() - Vector::Ones(n)).cwiseAbs().maxCoeff());
    }
    rep.add("exp(Qt)-row-sums", worst, 1e-10);
  }

  // resolvent stochastic
  {
    double worst = 0.0, neg = 0.0;
    for (double q : {0.5, 1.0, 2.0}) {
      Matrix I_q = resolvent_I(m, q);
      worst = std::max(worst, (I_q.rowwise().sum() - Vector::Ones(n)).cwiseAbs().maxCoeff());
      neg = std::max(neg, std::max(0.0, -I_q.minCoeff()));
    }
    rep.add("resolvent-stochastic", worst, 1e-12);
    rep.add("resolvent-nonnegative", neg, 1e-12);
  }

  if (m.spectrally_negative()) {
    double phi_res = 0.0;
    for (double q : {0.25, 0.5, 1.0, 2.0, 4.0})
      phi_res = std::max(phi_res, std::abs(kappa(m, phi_inverse(m, q)) - q));
    rep.add("kappa(Phi(q))=q", phi_res, 1e-10);

    double xi_aff = 0.0, lam_rows = 0.0, lam_off = 0.0, root_res = 0.0, phi_root = 0.0;
    double lam_eq = 0.0, fact_cons = 0.0;
    for (double q : {0.5, 1.0, 2.0}) {
      auto L = ladder_factors(m, q);
      xi_aff = std::max(xi_aff, max_abs(xi_matrix(m, q, 0.7) - (L->Xi0 + 0.7 * id)));
      lam_rows = std::max(lam_rows, L->Lambda.rowwise().sum().cwiseAbs().maxCoeff());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) lam_off = std::max(lam_off, std::max(0.0, -L->Lambda(i, j)));
      // root and null-vector residuals; one root must be Phi(q) with u = h
      double best_phi = std::numeric_limits<double>::infinity();
      for (const auto& r : L->roots) {
        CMatrix A = cgm_eval(m, r.zeta) - L->q * CMatrix::Identity(n, n);
        root_res = std::max(root_res, (A * r.u).cwiseAbs().maxCoeff());
        best_phi = std::min(best_phi, std::abs(r.zeta - L->phi_q));
        // Xi(q,0) u = zeta u
        root_res = std::max(root_res,
                            (L->Xi0.cast<Complex>() * r.u - r.zeta * r.u).cwiseAbs().maxCoeff());
      }
      phi_root = std::max(phi_root, best_phi);
      // eigenpair residual of F_{Phi(q)}(-Lambda) = 0
      Eigen::EigenSolver<Matrix> es(-L->Lambda);
      TiltedView tv(m, L->phi_q);
      for (int k = 0; k < n; ++k) {
        Complex mu = es.eigenvalues()(k);
        CVector r = es.eigenvectors().col(k);
        CMatrix Fmu = tv.cgm(mu);
        lam_eq = std::max(lam_eq, (Fmu * r).cwiseAbs().maxCoeff());
      }
      // at_eq factor = at_G factor * C
      for (double alpha : {0.0, 0.5})
        for (double xi : {0.0, 0.4}) {
          Matrix at_eq = sup_factor(m, q, alpha, xi, Conditioning::at_eq);
          Matrix at_G = sup_factor(m, q, alpha, xi, Conditioning::at_G);
          Matrix C = Vector(L->Xi0.rowwise().sum()).cwiseInverse().asDiagonal() *
                     L->Xi0 * resolvent_I(m, q);
          fact_cons = std::max(fact_cons, max_abs(at_eq - at_G * C));
        }
    }
    rep.add("xi-affine-in-alpha", xi_aff, 1e-12);
    rep.add("lambda-generator-rows", lam_rows, 1e-8);
    rep.add("lambda-offdiag-nonneg", lam_off, 1e-8);
    rep.add("wh-root-residuals", root_res, 1e-8);
    rep.add("phi-among-roots", phi_root, 1e-8);
    rep.add("lambda-eq-eigenpair", lam_eq, 1e-7);
    rep.add("sup-factor-consistency", fact_cons, 1e-9);
    rep.add("up-crossing-x0", max_abs(up_crossing(m, 1.0, 0.0, 0.0) - id), 1e-12);

    // range contracts: factor entries live in [0,1], rows sum to at most 1
    {
      double out_of_range = 0.0;
      for (auto cond : {Conditioning::at_eq, Conditioning::at_G})
        for (double alpha : {0.0, 0.5})
          for (double xi : {0.0, 0.4}) {
            Matrix S = sup_factor(m, 1.0, alpha, xi, cond);
            out_of_range = std::max({out_of_range, -S.minCoeff(), S.maxCoeff() - 1.0,
                                     S.rowwise().sum().maxCoeff() - 1.0});
          }
      for (double x : {0.25, 1.0}) {
        Matrix U = up_crossing(m, 1.0, 0.5, x);
        out_of_range = std::max({out_of_range, -U.minCoeff(), U.maxCoeff() - 1.0,
                                 U.rowwise().sum().maxCoeff() - 1.0});
      }
      rep.add("factor-range-substochastic", std::max(0.0, out_of_range), 1e-10);
    }

    // monotonicity of exp(-Xi(q,0)x): row sums fall in x (tau_x grows
    // pathwise), entries fall in q (e^{-q tau} does); off-diagonal entries
    // are NOT monotone in x -- they start at zero
    {
      double worst = 0.0;
      for (double q : {0.5, 1.0}) {
        Vector prev = up_crossing(m, q, 0.0, 0.25).rowwise().sum();
        for (double x : {0.5, 1.0, 2.0}) {
          Vector cur = up_crossing(m, q, 0.0, x).rowwise().sum();
          worst = std::max(worst, (cur - prev).maxCoeff());
          prev = cur;
        }
      }
      rep.add("up-crossing-monotone-in-x", std::max(0.0, worst), 1e-12, "row sums");
      worst = 0.0;
      for (double x : {0.25, 1.0}) {
        Matrix a = up_crossing(m, 0.5, 0.0, x);
        Matrix b = up_crossing(m, 1.0, 0.0, x);
        worst = std::max(worst, (b - a).maxCoeff());
      }
      rep.add("up-crossing-monotone-in-q", std::max(0.0, worst), 1e-12, "entrywise");
    }
  }

  // tilt identities
  {
    double gen_res = 0.0, kap_res = 0.0, comp_res = 0.0, zero_res = 0.0;
    double g1 = std::min(1.0, 0.3 * hi_cap), g2 = std::min(0.5, 0.2 * hi_cap);
    TiltedView tv1(m, g1);
    Matrix F0 = tv1.cgm_real(0.0);
    gen_res = F0.rowwise().sum().cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) gen_res = std::max(gen_res, std::max(0.0, -F0(i, j)));
    for (double a : {0.0, 0.25 * hi_cap, 0.5 * hi_cap}) {
      kap_res = std::max(kap_res, std::abs(tv1.kappa(a) - (kappa(m, a + g1) - kappa(m, g1))));
      TiltedView tv12(m, g1 + g2);
      TiltedView tvg1(m, g1);
      comp_res = std::max(comp_res,
                          std::abs(tv12.kappa(a) - (tvg1.kappa(a + g2) - tvg1.kappa(g2))));
    }
    TiltedView tv0(m, 0.0);
    zero_res = max_abs(tv0.cgm_real(0.35 * hi_cap) - cgm_eval_real(m, 0.35 * hi_cap));
    rep.add("tilt-generator-rows", gen_res, 1e-10);
    rep.add("tilt-kappa-shift", kap_res, 1e-9);
    rep.add("tilt-composition", comp_res, 1e-9);
    rep.add("tilt-gamma0-identity", zero_res, 1e-12);
  }

  // reversal identities
  {
    ReversedView rv(m);
    Matrix Qh = rv.Qhat();
    rep.add("reversal-Qhat-rows", Qh.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    double wiring = 0.0, kap_res = 0.0, dual = 0.0, dbl = 0.0, spec_res = 0.0;
    for (double a : {0.0, 0.2 * hi_cap, 0.4 * hi_cap, 0.6 * hi_cap, 0.8 * hi_cap}) {
      Matrix Fh = rv.cgm_real(a);
      Matrix expect = pi.cwiseInverse().asDiagonal() * cgm_eval_real(m, a).transpose() * pi.asDiagonal();
      wiring = std::max(wiring, max_abs(Fh - expect));
      kap_res = std::max(kap_res, std::abs(rv.kappa(a) - kappa(m, a)));
      SpectralTriple t = perron(m, a);
      Vector hh = rv.h(a);
      dual = std::max(dual, (Vector(pi.asDiagonal() * hh) - t.v).cwiseAbs().maxCoeff());
      // double reversal returns the base cgm
      Matrix Fhh = pi.cwiseInverse().asDiagonal() * Fh.transpose() * pi.asDiagonal();
      dbl = std::max(dbl, max_abs(Fhh - cgm_eval_real(m, a)));
      // spectra agree
      Eigen::VectorXcd e1 = Eigen::EigenSolver<Matrix>(Fh).eigenvalues();
      Eigen::VectorXcd e2 = Eigen::EigenSolver<Matrix>(cgm_eval_real(m, a)).eigenvalues();
      std::sort(e1.data(), e1.data() + n, [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
      });
      std::sort(e2.data(), e2.data() + n, [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
      });
      spec_res = std::max(spec_res, (e1 - e2).cwiseAbs().maxCoeff());
    }
    rep.add("reversal-cgm-wiring", wiring, 1e-12);
    rep.add("reversal-kappa", kap_res, 1e-10);
    rep.add("reversal-duality-Dpi-h=v", dual, 1e-8);
    rep.add("reversal-double", dbl, 1e-12);
    rep.add("reversal-spectrum", spec_res, 1e-8);
  }

  // matrix Frullani identity vs direct linear solve, 100 seeded random matrices
  {
    Philox rng(seed, 0xF2u);
    double worst = 0.0;
    const int nn = 3;
    const double q = 1.0;
    for (int rep_i = 0; rep_i < 100; ++rep_i) {
      Matrix A(nn, nn);
      for (int i = 0; i < nn; ++i)
        for (int j = 0; j < nn; ++j) A(i, j) = 2.0 * rng.uniform() - 1.0;
      // shift the spectrum into (0, ...) so q I + A is comfortably invertible
      Eigen::EigenSolver<Matrix> es(A);
      double remin = es.eigenvalues().real().minCoeff();
      A += (0.1 - std::min(0.0, remin)) * Matrix::Identity(nn, nn);
      Matrix F = frullani_expm(A, q);
      Matrix resid = F * (q * Matrix::Identity(nn, nn) + A) - q * Matrix::Identity(nn, nn);
      worst = std::max(worst, max_abs(resid));
    }
    rep.add("frullani-vs-solve", worst, 1e-8, "100 random 3x3 matrices");
  }

  rep.seconds = timer.seconds();
  return rep;
}

CheckResult check_distinct_eigs(const ValidatedModel& m, const std::vector<double>& alphas) {
  double min_gap = std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    CMatrix F = cgm_eval(m, Complex(0.0, a));
    Eigen::ComplexEigenSolver<CMatrix> es(F);
    for (int i = 0; i < m.n_states(); ++i)
      for (int j = i + 1; j < m.n_states(); ++j)
        min_gap = std::min(min_gap, std::abs(es.eigenvalues()(i) - es.eigenvalues()(j)));
  }
  CheckResult c;
  c.name = "F(i.alpha)-distinct-eigenvalues";
  c.residual = min_gap;
  c.threshold = 1e-6;           // pass iff gap exceeds this
  c.pass = min_gap > 1e-6;
  c.note = "min eigenvalue gap (pass iff > threshold)";
  return c;
}

SuiteReport suite_wh(const ValidatedModel& m, double q, long paths, std::uint64_t seed, int threads) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "wh";
  rep.seed = seed;
  rep.paths = paths;
  const int n = m.n_states();

  // (a) up-crossing transform vs first-passage MC at x = 0.5
  {
    auto fp = first_passage(m, 0.5, paths, seed, std::nullopt, 50.0, StartMode::per_state, threads);
    long lost = 0;
    for (const auto& s : fp)
      if (!s.crossed) ++lost;
    EstimateMatrix est = estimate_passage_transform(fp, q, n);
    Matrix exact = up_crossing(m, q, 0.0, 0.5);
    rep.add("up-crossing-vs-mc[x=0.5]", max_z(est.value, est.stderr_, exact.cast<Complex>()), 3.0,
            "horizon-exhausted paths: " + std::to_string(lost));
  }

  auto ks = killed_stats(m, q, paths, seed + 1, StartMode::per_state, threads);

  // (b) sup factor (0.7, 0.3), both conditionings
  for (auto cond : {Conditioning::at_eq, Conditioning::at_G}) {
    FunctionalSpec f;
    f.weight = Weight::sup_laplace;
    f.alpha = 0.7;
    f.xi = 0.3;
    f.epoch = cond == Conditioning::at_eq ? Epoch::at_eq : Epoch::at_Gbar;
    EstimateMatrix est = estimate_transform(ks, f, n);
    Matrix exact = sup_factor(m, q, 0.7, 0.3, cond);
    rep.add(std::string("sup-factor-vs-mc[0.7,0.3,") +
                (cond == Conditioning::at_eq ? "at_eq]" : "at_G]"),
            max_z(est.value, est.stderr_, exact.cast<Complex>()), 3.0);
  }

  // inf factor at (0.4, 0.2) and (0.2, 0), both conditionings
  for (auto [alpha, xi] : {std::pair{0.4, 0.2}, std::pair{0.2, 0.0}}) {
    for (auto cond : {Conditioning::at_eq, Conditioning::at_G}) {
      FunctionalSpec f;
      f.weight = Weight::inf_laplace;
      f.alpha = alpha;
      f.xi = xi;
      f.epoch = cond == Conditioning::at_eq ? Epoch::at_eq : Epoch::at_G;
      EstimateMatrix est = estimate_transform(ks, f, n);
      Matrix exact = inf_factor(m, q, alpha, xi, cond);
      std::ostringstream nm;
      nm << "inf-factor-vs-mc[" << alpha << "," << xi << ","
         << (cond == Conditioning::at_eq ? "at_eq]" : "at_G]");
      rep.add(nm.str(), max_z(est.value, est.stderr_, exact.cast<Complex>()), 3.0);
    }
  }

  // fully analytic key identity at xi = 0
  {
    double worst = 0.0;
    double phi = phi_inverse(m, q);
    Vector v = perron(m, phi).v;
    Matrix Lh = ladder_factors_reversed(m, q)->Lambda;
    for (double alpha : {0.2, 0.5, 0.8}) {
      // alpha = 0.8 lies beyond Phi(1); the identity extends there analytically
      Matrix M = inf_factor(m, q, alpha, 0.0, Conditioning::at_eq, /*continue_past_phi=*/true);
      Matrix F = cgm_eval_real(m, alpha);
      Matrix lhs = M.transpose() * (F - q * Matrix::Identity(n, n)).transpose();
      Matrix inner = Eigen::PartialPivLU<Matrix>(phi * Matrix::Identity(n, n) - Lh)
                         .solve(alpha * Matrix::Identity(n, n)) -
                     Matrix::Identity(n, n);
      Matrix rhs = q * v.asDiagonal() * inner * v.cwiseInverse().asDiagonal();
      worst = std::max(worst, max_abs(lhs - rhs));
    }
    rep.add("key-identity-analytic", worst, 1e-6, "alpha in {0.2, 0.5, 0.8}");
  }

  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport suite_independence(const ValidatedModel& general_map,
                               const ValidatedModel& reversible_map, long paths,
                               std::uint64_t seed, int threads) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "independence";
  rep.seed = seed;
  rep.paths = paths;
  const double q = 1.0;
  const int n = general_map.n_states();
  const Vector& pi = general_map.stationary();

  auto revspec = reversed_spec(general_map);
  if (!revspec) throw std::invalid_argument("general map has no representable reversal");
  ValidatedModel mrev = validate_or_throw(*revspec);

  auto fwd = killed_stats(general_map, q, paths, seed, StartMode::per_state, threads);
  auto rev = killed_stats(mrev, q, paths, seed + 7777, StartMode::per_state, threads);

  const std::pair<double, double> grid[] = {{0.3, 0.0}, {0.5, 0.0}, {1.0, 0.0},
                                            {0.5, 0.3}, {1.0, 0.3}, {0.3, 0.7}};
  for (auto [alpha, xi] : grid) {
    FunctionalSpec fs;
    fs.weight = Weight::sup_fourier;
    fs.alpha = alpha;
    fs.xi = xi;
    fs.epoch = Epoch::at_Gbar;
    EstimateMatrix sup = estimate_transform(fwd, fs, n);
    FunctionalSpec fi;
    fi.weight = Weight::inf_fourier;
    fi.alpha = alpha;
    fi.xi = xi;
    fi.epoch = Epoch::at_G;
    EstimateMatrix inf = estimate_transform(rev, fi, n);

    CMatrix prod = sup.value * pi.cwiseInverse().asDiagonal() * inf.value.transpose() *
                   pi.asDiagonal();
    CMatrix lhs = Eigen::PartialPivLU<CMatrix>(
                      (q + xi) * CMatrix::Identity(n, n) - cgm_eval(general_map, Complex(0.0, alpha)))
                      .solve(q * CMatrix::Identity(n, n));
    // first-order variance propagation through the product
    Matrix se = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
          double scale = pi(j) / pi(k);
          acc += scale * scale *
                 (std::norm(inf.value(j, k)) * sup.stderr_(i, k) * sup.stderr_(i, k) +
                  std::norm(sup.value(i, k)) * inf.stderr_(j, k) * inf.stderr_(j, k));
        }
        se(i, j) = std::sqrt(acc);
      }
    std::ostringstream nm;
    nm << "th1i-product[alpha=" << alpha << ",xi=" << xi << "]";
    rep.add(nm.str(), max_z(prod, se, lhs), 3.0);
  }

  // time-reversal law: (e_q - Gbar, X - S) under pi vs (G, I) of the reversal
  {
    long nks = paths / 2;
    auto revspec2 = reversed_spec(reversible_map);
    if (!revspec2) throw std::invalid_argument("reversible map has no representable reversal");
    ValidatedModel mrev2 = validate_or_throw(*revspec2);
    auto a = killed_stats(reversible_map, q, nks, seed + 13, StartMode::stationary, threads);
    auto b = killed_stats(mrev2, q, nks, seed + 14, StartMode::stationary, threads);
    std::vector<double> u1, v1, u2, v2;
    u1.reserve(a.size());
    for (const auto& s : a) {
      u1.push_back(s.e_q - s.Gbar);
      v1.push_back(s.X - s.S);
    }
    for (const auto& s : b) {
      u2.push_back(s.G);
      v2.push_back(s.I);
    }
    double thr = 1.63 / std::sqrt(static_cast<double>(nks));
    rep.add("ks-reversal-time-marginal", ks_two_sample(u1, u2), thr,
            "n=" + std::to_string(nks) + " per sample");
    rep.add("ks-reversal-depth-marginal", ks_two_sample(v1, v2), thr);
  }

  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport suite_rogozin(const ValidatedModel& m, double q, std::uint64_t seed) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "rogozin";
  rep.seed = seed;

  // scalar positive control: the hypothesis holds trivially for N = 1
  {
    ValidatedModel m1 = scalar_brownian(0.0, 1.0);
    double gate = commute_residual(m1, 1.0, 0.5, 1.0);
    rep.add("rogozin-gate-scalar", gate, 1e-3);
    Matrix R = rogozin_factor(m1, 0.5, 1.0, 0.0, HalfLine::nonneg);
    rep.add("rogozin-scalar-control", std::abs(R(0, 0) - 0.5) / 0.5, 1e-3,
            "N=1 sigma=1 q=1/2 alpha=1: exact value 1/2");
  }

  // commute gate on the supplied model
  double gate = commute_residual(m, 1.0, 0.5 / q, 1.0 / q);
  rep.add("rogozin-commute-gate", gate, 1e-3, "alpha=1, t=0.5/q, s=1/q");

  for (auto [alpha, xi] : {std::pair{0.5, 0.25}, std::pair{1.0, 0.0}}) {
    Matrix R = rogozin_factor(m, q, alpha, xi, HalfLine::nonneg, {}, /*enforce_gate=*/false);
    Matrix L = sup_factor(m, q, alpha, xi, Conditioning::at_eq);
    double rel = 0.0;
    for (int i = 0; i < m.n_states(); ++i)
      for (int j = 0; j < m.n_states(); ++j)
        rel = std::max(rel, std::abs(R(i, j) - L(i, j)) / std::max(std::abs(L(i, j)), 1e-12));
    std::ostringstream nm;
    nm << "rogozin-vs-ladder[alpha=" << alpha << ",xi=" << xi << "]";
    rep.add(nm.str(), rel, 1e-3, "gate bypassed for measurement");
  }

  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport suite_kendall(const ValidatedModel& m, long paths, std::uint64_t seed, int threads) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "kendall";
  rep.seed = seed;
  rep.paths = paths;
  const int n = m.n_states();

  {
    auto rep_a = kendall_assumption_check(m, {0.5, 2.0});
    CheckResult c;
    c.name = "kendall-assumption-independence";
    c.residual = rep_a.cond;
    c.threshold = 1e8;
    c.pass = rep_a.independent;
    c.note = "condition number of stacked h(Phi(q_k)), det=" + fmt(rep_a.det);
    rep.checks.push_back(c);
  }

  // scalar positive control: N=1 Brownian with drift, cell (t,x) = (1,1)
  {
    ValidatedModel m1 = scalar_brownian(1.0, 1.0);
    long n1 = std::max(50000L, paths / 5);
    auto fp = first_passage(m1, 1.0, n1, seed + 99, std::nullopt, 25.0, StartMode::per_state, threads);
    double dt = 0.1, t = 1.0;
    long hits = 0;
    for (const auto& s : fp)
      if (s.crossed && s.tau >= t - dt / 2 && s.tau < t + dt / 2) ++hits;
    double lhs = t * static_cast<double>(hits) / (static_cast<double>(n1) * dt);
    DensitySlice slice = density_matrix(m1, t, {1.0});
    double rhs = 1.0 * slice.values[0](0, 0);
    double se = t * std::sqrt(static_cast<double>(hits)) / (static_cast<double>(n1) * dt);
    rep.add("kendall-scalar-control[t=1,x=1]", std::abs(lhs - rhs) / se, 3.0);
  }

  // matrix grid
  const std::vector<double> xs = {0.25, 0.5, 0.75, 1.0};
  const std::vector<double> ts = {0.75, 1.0, 1.5, 2.0};
  const double dt = 0.1;
  long n_per_x = paths / static_cast<long>(xs.size());
  std::vector<PassageHist> hists;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    auto fp = first_passage(m, xs[k], n_per_x, seed + 17 * static_cast<std::uint64_t>(k + 1),
                            std::nullopt, 25.0, StartMode::per_state, threads);
    PassageHist h;
    h.x = xs[k];
    h.t_centers = ts;
    h.bin_width = dt;
    h.n_per_start = n_per_x / n;
    h.counts.assign(ts.size(), Matrix::Zero(n, n));
    for (const auto& s : fp) {
      if (!s.crossed) continue;
      for (std::size_t c = 0; c < ts.size(); ++c)
        if (s.tau >= ts[c] - dt / 2 && s.tau < ts[c] + dt / 2)
          h.counts[c](s.j0, s.j_tau) += 1.0;
    }
    hists.push_back(std::move(h));
  }
  KendallReport kr = kendall_residual(m, hists);
  std::ostringstream note;
  note << "mean dev " << fmt(kr.mean_dev) << "; pi-aggregated max dev " << fmt(kr.max_agg_dev)
       << " (diagnostic)";
  rep.add("kendall-matrix-max-dev", kr.max_dev, 0.05, note.str());

  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport suite_ballot(const ValidatedModel& m, long paths, std::uint64_t seed, int threads) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "ballot";
  rep.seed = seed;
  rep.paths = paths;
  const double t_end = 1.0;
  auto raw = ballot_samples(m, t_end, paths, seed, threads);
  std::vector<BallotSampleRow> rows;
  rows.reserve(raw.size());
  for (const auto& s : raw) rows.push_back({s.X, s.inf_zero, s.j0, s.j_t});

  BallotReport br = ballot_residual(m, t_end, {0.5, 1.0, 1.5}, rows, 0.1);
  std::ostringstream note;
  note << "per-entry cells:";
  for (const auto& c : br.cells)
    if (!c.insufficient)
      note << " (x=" << c.x << "," << c.i << "->" << c.j << "): z=" << fmt(c.z);
  rep.add("ballot-max-abs-z", br.max_abs_z, 3.0, note.str());
  double agg = 0.0;
  for (double z : br.agg_z) agg = std::max(agg, std::abs(z));
  rep.add("ballot-aggregated-stationary-z", agg, 3.0, "pi-weighted, state-summed (diagnostic)");

  // impossible region x > c t: both sides empty
  BallotReport far = ballot_residual(m, t_end, {2.5}, rows, 0.1);
  long far_hits = 0;
  for (const auto& c : far.cells) far_hits += c.hits;
  rep.add("ballot-impossible-region-empty", static_cast<double>(far_hits), 0.0, "x > ct bin count");

  rep.seconds = timer.seconds();
  return rep;
}

std::string report_to_json(const std::vector<SuiteReport>& reports, int indent) {
  nlohmann::json root = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json jr;
    jr["suite"] = r.suite;
    if (!r.model.empty()) jr["model"] = r.model;
    jr["pass"] = r.pass();
    jr["seconds"] = r.seconds;
    if (r.paths > 0) jr["paths"] = r.paths;
    jr["seed"] = r.seed;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
      nlohmann::json jc;
      jc["name"] = c.name;
      jc["residual"] = c.residual;
      jc["threshold"] = c.threshold;
      jc["pass"] = c.pass;
      if (!c.note.empty()) jc["note"] = c.note;
      checks.push_back(jc);
    }
    jr["checks"] = checks;
    root.push_back(jr);
  }
  return root.dump(indent);
}

}  // namespace mapfluct
