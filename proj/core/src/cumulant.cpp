#include "mapfluct/cumulant.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace mapfluct {

Complex psi_eval(const LevyComponent& levy, Complex z) {
  Complex val = levy.drift * z + 0.5 * levy.sigma2 * z * z;
  for (const auto& term : levy.jumps) val += term.rate * (term.law.transform(z) - 1.0);
  return val;
}

double psi_prime(const LevyComponent& levy, double alpha) {
  // rational-transform derivative: d/dz beta/(beta - s z) = s beta/(beta - s z)^2
  double val = levy.drift + levy.sigma2 * alpha;
  for (const auto& term : levy.jumps) {
    const auto& l = term.law;
    switch (l.family) {
      case JumpLaw::Family::degenerate:
        val += term.rate * l.c * std::exp(alpha * l.c);
        break;
      case JumpLaw::Family::exponential: {
        double d = l.rates[0] - l.sign * alpha;
        val += term.rate * l.sign * l.rates[0] / (d * d);
        break;
      }
      case JumpLaw::Family::mixture:
        for (std::size_t k = 0; k < l.rates.size(); ++k) {
          double d = l.rates[k] - l.sign * alpha;
          val += term.rate * l.weights[k] * l.sign * l.rates[k] / (d * d);
        }
        break;
    }
  }
  return val;
}

CMatrix cgm_eval(const ValidatedModel& m, Complex z) {
  const int n = m.n_states();
  CMatrix F(n, n);
  for (int i = 0; i < n; ++i) {
    try {
      Complex g = m.trans_jump(i).transform(z);
      for (int j = 0; j < n; ++j) F(i, j) = m.Q()(i, j) * g;
      F(i, i) = m.Q()(i, i) + psi_eval(m.levy(i), z);
    } catch (const DomainViolation& e) {
      throw DomainViolation(std::string(e.what()) + " (state " + std::to_string(i) + ")");
    }
  }
  return F;
}

Matrix cgm_eval_real(const ValidatedModel& m, double alpha) {
  CMatrix F = cgm_eval(m, Complex(alpha, 0.0));
  return F.real();
}

Matrix cgm_deriv_real(const ValidatedModel& m, double alpha) {
  const int n = m.n_states();
  Matrix D(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& l = m.trans_jump(i);
    double gp = 0.0;
    switch (l.family) {
      case JumpLaw::Family::degenerate:
        gp = l.c * std::exp(alpha * l.c);
        break;
      case JumpLaw::Family::exponential: {
        double d = l.rates[0] - l.sign * alpha;
        gp = l.sign * l.rates[0] / (d * d);
        break;
      }
      case JumpLaw::Family::mixture: {
        gp = 0.0;
        for (std::size_t k = 0; k < l.rates.size(); ++k) {
          double d = l.rates[k] - l.sign * alpha;
          gp += l.weights[k] * l.sign * l.rates[k] / (d * d);
        }
        break;
      }
    }
    for (int j = 0; j < n; ++j) D(i, j) = m.Q()(i, j) * gp;
    D(i, i) = psi_prime(m.levy(i), alpha);
  }
  return D;
}

namespace {

// right eigenvector of the eigenvalue with maximal real part, sign-fixed positive
std::pair<double, Vector> leading_pair(const Matrix& A, const char* what) {
  Eigen::EigenSolver<Matrix> es(A);
  if (es.info() != Eigen::Success) throw NumericalFailure(std::string("eigensolver failed: ") + what);
  int k = 0;
  for (int i = 1; i < A.rows(); ++i)
    if (es.eigenvalues()(i).real() > es.eigenvalues()(k).real()) k = i;
  Complex lam = es.eigenvalues()(k);
  if (std::abs(lam.imag()) > 1e-8 * (1.0 + std::abs(lam.real())))
    throw NumericalFailure(std::string("leading eigenvalue not real: ") + what);
  CVector vc = es.eigenvectors().col(k);
  // rotate the phase so the largest entry is real positive
  int imax = 0;
  for (int i = 1; i < vc.size(); ++i)
    if (std::abs(vc(i)) > std::abs(vc(imax))) imax = i;
  vc *= std::abs(vc(imax)) / vc(imax);
  if (vc.imag().cwiseAbs().maxCoeff() > 1e-7)
    throw NumericalFailure(std::string("leading eigenvector not real: ") + what);
  Vector v = vc.real();
  if (v.minCoeff() <= 0.0) {
    std::ostringstream os;
    os << "Perron eigenvector not strictly positive (" << what << "): " << v.transpose();
    throw NumericalFailure(os.str());
  }
  return {lam.real(), v};
}

}  // namespace

SpectralTriple perron(const ValidatedModel& m, double alpha) {
  Matrix F = cgm_eval_real(m, alpha);
  auto [kap, h] = leading_pair(F, "right");
  auto [kap2, v] = leading_pair(F.transpose(), "left");
  if (std::abs(kap - kap2) > 1e-8 * (1.0 + std::abs(kap)))
    throw NumericalFailure("left/right leading eigenvalues disagree");
  SpectralTriple t;
  t.alpha = alpha;
  t.kappa = kap;
  h /= m.stationary().dot(h);
  v /= v.dot(h);
  t.h = std::move(h);
  t.v = std::move(v);
  return t;
}

double kappa(const ValidatedModel& m, double alpha) { return perron(m, alpha).kappa; }

double kappa_prime(const ValidatedModel& m, double alpha) {
  SpectralTriple t = perron(m, alpha);
  return t.v.dot(cgm_deriv_real(m, alpha) * t.h);
}

double kappa_derivative0(const ValidatedModel& m) {
  const Vector& pi = m.stationary();
  double d = 0.0;
  for (int i = 0; i < m.n_states(); ++i) {
    double di = m.levy(i).drift;
    for (const auto& term : m.levy(i).jumps) di += term.rate * term.law.mean();
    for (int j = 0; j < m.n_states(); ++j)
      if (j != i) di += m.Q()(i, j) * m.trans_jump(i).mean();
    d += pi(i) * di;
  }
  return d;
}

double phi_inverse(const ValidatedModel& m, double q) {
  if (q < 0.0) throw std::invalid_argument("phi_inverse needs q >= 0");
  const double kp0 = kappa_derivative0(m);
  if (q == 0.0 && kp0 >= 0.0) return 0.0;

  // left bracket end: 0 on the increasing branch, else the minimizer of kappa
  double lo = 0.0;
  if (kp0 < 0.0) {
    double a = 0.0, b = 1.0;
    while (kappa_prime(m, b) < 0.0) {
      a = b;
      b *= 2.0;
      if (b > 1e8) throw NumericalFailure("kappa has no increasing branch (NoFiniteRoot)");
    }
    for (int it = 0; it < 200 && b - a > 1e-13 * (1.0 + b); ++it) {
      double mid = 0.5 * (a + b);
      (kappa_prime(m, mid) < 0.0 ? a : b) = mid;
    }
    lo = b;
  }
  double hi = std::max(1.0, 2.0 * lo);
  while (kappa(m, hi) <= q) {
    hi *= 2.0;
    if (hi > 1e10) throw NumericalFailure("kappa(alpha) never exceeds q (NoFiniteRoot)");
  }

  // safeguarded Newton on the convex increasing branch
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    double f = kappa(m, x) - q;
    if (f > 0.0) hi = x; else lo = x;
    double fp = kappa_prime(m, x);
    double xn = fp > 0.0 ? x - f / fp : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < 1e-14 * (1.0 + std::abs(x))) { x = xn; break; }
    x = xn;
  }
  return x;
}

}  // namespace mapfluct
