#include "mapfluct/identity.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "mapfluct/cumulant.hpp"
#include "mapfluct/ladder.hpp"

namespace mapfluct {

namespace {

double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

void require_density(const ValidatedModel& m) {
  for (int i = 0; i < m.n_states(); ++i)
    if (!(m.levy(i).sigma2 > 0.0))
      throw NoDensity("density requires sigma_i > 0 in every state (state " +
                      std::to_string(i) + " has sigma = 0)");
}

double sigma_min(const ValidatedModel& m) {
  double s = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.n_states(); ++i) s = std::min(s, m.levy(i).sigma2);
  return std::sqrt(s);
}
double sigma_max(const ValidatedModel& m) {
  double s = 0.0;
  for (int i = 0; i < m.n_states(); ++i) s = std::max(s, m.levy(i).sigma2);
  return std::sqrt(s);
}
double drift_max(const ValidatedModel& m) {
  double a = 0.0;
  for (int i = 0; i < m.n_states(); ++i) a = std::max(a, std::abs(m.levy(i).drift));
  return a;
}

// Midpoint grid {b + (k+1/2) dth}, k = -nh..nh-1, chosen so the Gaussian
// characteristic factor is resolved and the periodization aliases are small.
struct ThetaGrid {
  double dth;
  long nh;
  double b;
};

ThetaGrid make_grid(const ValidatedModel& m, double t, double b, double period_extra,
                    const QuadratureConfig& cfg) {
  double smin = sigma_min(m), smax = sigma_max(m), amax = drift_max(m);
  double th_max = cfg.theta_cut / (smin * std::sqrt(t)) + 2.0 * amax / (smin * smin);
  double L = cfg.support_pad * smax * std::sqrt(t) + amax * t + 1.0 + period_extra;
  double dth = M_PI / L;
  long nh = static_cast<long>(std::ceil(th_max / dth));
  return {dth, nh, b};
}

// E[e^{w X(t)} 1{X(t) >= 0}; J(t)] for Re w <= 0; `reflect` evaluates the
// mirrored process (density of -X), turning the x < 0 side into this one.
CMatrix halfline_pos(const ValidatedModel& m, double t, Complex w, bool reflect,
                     const QuadratureConfig& cfg) {
  require_density(m);
  const int n = m.n_states();
  const double sgn = reflect ? -1.0 : 1.0;
  auto Ft = [&](double th) {
    CMatrix F = cgm_eval(m, Complex(0.0, sgn * th));
    return CMatrix((F * t).exp());
  };
  const double a = -w.real(), b = w.imag();
  if (a < 0.0) {
    // growing kernel on this side: go through the complement,
    // E[e^{wY} 1{Y>=0}] = E e^{wY} - E[e^{wY} 1{Y<0}] with Y the (possibly
    // reflected) process, and the second term decays
    CMatrix whole = CMatrix((cgm_eval(m, Complex(sgn * w.real(), sgn * w.imag())) * t).exp());
    CMatrix other = halfline_pos(m, t, -w, !reflect, cfg);
    return whole - other;
  }
  if (a > 1e-14) {
    ThetaGrid g = make_grid(m, t, b, cfg.laplace_pad / a, cfg);
    CMatrix acc = CMatrix::Zero(n, n);
    for (long k = -g.nh; k < g.nh; ++k) {
      double th = b + (static_cast<double>(k) + 0.5) * g.dth;
      acc += Ft(th) / Complex(a, th - b);
    }
    return acc * (g.dth / (2.0 * M_PI));
  }
  // Fourier boundary: 1/2 exp(F(ib)t) + 1/2 S_b with the principal-value
  // sign-kernel integral; midpoint symmetry around b handles the PV
  ThetaGrid g = make_grid(m, t, b, 0.0, cfg);
  CMatrix acc = CMatrix::Zero(n, n);
  for (long k = -g.nh; k < g.nh; ++k) {
    double th = b + (static_cast<double>(k) + 0.5) * g.dth;
    acc += Ft(th) / (th - b);
  }
  CMatrix S = acc * (g.dth / (Complex(0.0, 1.0) * M_PI));
  CMatrix mid = CMatrix((cgm_eval(m, Complex(0.0, sgn * b)) * t).exp());
  return 0.5 * mid + 0.5 * S;
}

// E[e^{w X(t)} 1{X(t) in side}; J(t)]
CMatrix halfline(const ValidatedModel& m, double t, Complex w, HalfLine side,
                 const QuadratureConfig& cfg) {
  if (side == HalfLine::nonneg) return halfline_pos(m, t, w, false, cfg);
  return halfline_pos(m, t, -w, true, cfg);
}

}  // namespace

Matrix frullani_expm(const Matrix& A, double q) {
  const int n = static_cast<int>(A.rows());
  if (!(q > 0.0)) throw std::invalid_argument("frullani_expm needs q > 0");
  Eigen::EigenSolver<Matrix> es(A);
  if (es.info() != Eigen::Success) throw NumericalFailure("frullani_expm: eigensolver failed");
  CVector lam = es.eigenvalues();
  CMatrix S = es.eigenvectors();
  Eigen::JacobiSVD<CMatrix> svd(S);
  double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
  if (!(cond < 1e10)) throw NumericalFailure("frullani_expm: defective matrix (DefectiveMatrix)");
  CVector fr(n);
  for (int k = 0; k < n; ++k) {
    Complex shift = q + lam(k);
    if (std::abs(shift) < 1e-14 || shift.real() <= 0.0)
      throw NumericalFailure("frullani_expm: spectrum leaves the shifted right half-plane (SingularShift)");
    // scalar Frullani: int_0^inf (e^{-lam x} - 1) x^-1 e^{-qx} dx = log(q/(q+lam))
    fr(k) = std::log(q / shift);
  }
  CMatrix M = S * fr.asDiagonal() * Eigen::PartialPivLU<CMatrix>(S).solve(CMatrix::Identity(n, n));
  CMatrix E = M.exp();
  if (E.imag().cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, E.real().cwiseAbs().maxCoeff()))
    throw NumericalFailure("frullani_expm: result not real");
  return E.real();
}

DensitySlice density_matrix(const ValidatedModel& m, double t, const std::vector<double>& x_grid,
                            const QuadratureConfig& cfg) {
  require_density(m);
  if (!(t > 0.0)) throw std::invalid_argument("density_matrix needs t > 0");
  const int n = m.n_states();
  double xmax = 0.0;
  for (double x : x_grid) xmax = std::max(xmax, std::abs(x));
  ThetaGrid g = make_grid(m, t, 0.0, xmax, cfg);
  std::vector<CMatrix> E;
  std::vector<double> ths;
  E.reserve(static_cast<std::size_t>(2 * g.nh));
  for (long k = -g.nh; k < g.nh; ++k) {
    double th = (static_cast<double>(k) + 0.5) * g.dth;
    ths.push_back(th);
    E.push_back(CMatrix((cgm_eval(m, Complex(0.0, th)) * t).exp()));
  }
  DensitySlice out;
  out.t = t;
  out.x_grid = x_grid;
  out.values.reserve(x_grid.size());
  for (double x : x_grid) {
    CMatrix acc = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < ths.size(); ++k)
      acc += std::exp(Complex(0.0, -ths[k] * x)) * E[k];
    out.values.push_back(Matrix(acc.real()) * (g.dth / (2.0 * M_PI)));
  }
  return out;
}

Vector density_row_mass(const DensitySlice& slice) {
  const auto& xs = slice.x_grid;
  const int n = static_cast<int>(slice.values.front().rows());
  Vector mass = Vector::Zero(n);
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    double h = xs[k + 1] - xs[k];
    Vector rk = slice.values[k].rowwise().sum();
    Vector rk1 = slice.values[k + 1].rowwise().sum();
    mass += 0.5 * h * (rk + rk1);
  }
  return mass;
}

CMatrix half_line_transform(const ValidatedModel& m, double t, double alpha, double xi,
                            HalfLine side, const QuadratureConfig& cfg) {
  CMatrix H = halfline(m, t, Complex(0.0, alpha), side, cfg);
  return std::exp(-xi * t) * H;
}

double commute_residual(const ValidatedModel& m, double alpha, double t, double s,
                        const QuadratureConfig& cfg) {
  CMatrix A = halfline(m, t, Complex(0.0, alpha), HalfLine::nonneg, cfg);
  CMatrix B = halfline(m, s, Complex(0.0, alpha), HalfLine::neg, cfg);
  return operator_norm(CMatrix(A * B - B * A));
}

namespace {

// E[e^{wU} 1{U in side}] for one jump law, real w inside the domain
double law_halfline(const JumpLaw& l, double w, bool nonneg) {
  switch (l.family) {
    case JumpLaw::Family::degenerate:
      return ((l.c >= 0.0) == nonneg) ? std::exp(w * l.c) : 0.0;
    case JumpLaw::Family::exponential:
    case JumpLaw::Family::mixture:
      if ((l.sign > 0) != nonneg) return 0.0;
      return l.transform(Complex(w, 0.0)).real();
  }
  return 0.0;
}

// diagonal of the Rogozin integrand for small t: exact Gaussian no-event term
// plus the first-order one-jump correction (relevant when a jump lands the
// path on the integration side)
Matrix small_t_g(const ValidatedModel& m, double t, double alpha, double xi, HalfLine side) {
  const int n = m.n_states();
  const bool nonneg = side == HalfLine::nonneg;
  const double w = nonneg ? -alpha : alpha;
  Matrix g = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double lam = 0.0;
    for (const auto& term : m.levy(i).jumps) lam += term.rate;
    double pno = std::exp((m.Q()(i, i) - lam) * t);
    double mu = m.levy(i).drift * t;
    double sd = std::sqrt(m.levy(i).sigma2 * t);
    double H, P;
    if (nonneg) {
      H = std::exp(-alpha * mu + 0.5 * alpha * alpha * sd * sd) * norm_cdf((mu - alpha * sd * sd) / sd);
      P = norm_cdf(mu / sd);
    } else {
      H = std::exp(alpha * mu + 0.5 * alpha * alpha * sd * sd) * norm_cdf((-mu - alpha * sd * sd) / sd);
      P = norm_cdf(-mu / sd);
    }
    double jump_corr = 0.0;
    for (const auto& term : m.levy(i).jumps)
      jump_corr += term.rate * (std::exp(-xi * t) * law_halfline(term.law, w, nonneg) -
                                law_halfline(term.law, 0.0, nonneg));
    g(i, i) = pno * (std::exp(-xi * t) * H - P + t * jump_corr);
  }
  return g;
}

}  // namespace

Matrix rogozin_factor(const ValidatedModel& m, double q, double alpha, double xi, HalfLine side,
                      const QuadratureConfig& cfg, bool enforce_gate) {
  require_density(m);
  if (!(q > 0.0) || alpha < 0.0 || xi < 0.0)
    throw std::invalid_argument("rogozin_factor needs q > 0, alpha, xi >= 0");
  const int n = m.n_states();
  if (enforce_gate) {
    double ga = alpha > 0.0 ? alpha : 1.0;
    double res = commute_residual(m, ga, 0.5 / q, 1.0 / q, cfg);
    if (!(res <= 1e-3))
      throw CommuteGateFailed("commute residual " + std::to_string(res) + " exceeds gate 1e-3");
  }
  if (alpha == 0.0 && xi == 0.0) return resolvent_I(m, q);

  // Gauss-Legendre nodes on [-1,1]
  Eigen::SelfAdjointEigenSolver<Matrix> golub;
  const int gl = cfg.gl_nodes;
  Matrix J = Matrix::Zero(gl, gl);
  for (int k = 1; k < gl; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  golub.compute(J);
  Vector nodes = golub.eigenvalues();
  Vector wts(gl);
  for (int k = 0; k < gl; ++k) {
    double v0 = golub.eigenvectors()(0, k);
    wts(k) = 2.0 * v0 * v0;
  }

  Matrix M = Matrix::Zero(n, n);
  double t_lo = cfg.t_min;
  const double t_end = cfg.t_max_over_q / q;
  while (t_lo < t_end) {
    double t_hi = std::min(t_lo * cfg.panel_ratio, t_end);
    double mid = 0.5 * (t_lo + t_hi), half = 0.5 * (t_hi - t_lo);
    for (int k = 0; k < gl; ++k) {
      double t = mid + half * nodes(k);
      Matrix g;
      if (t < cfg.t_small) {
        g = small_t_g(m, t, alpha, xi, side);
      } else {
        Complex w = (side == HalfLine::nonneg) ? Complex(-alpha, 0.0) : Complex(alpha, 0.0);
        CMatrix H = halfline(m, t, w, side, cfg);
        CMatrix P = halfline(m, t, Complex(0.0, 0.0), side, cfg);
        g = (std::exp(-xi * t) * H - P).real();
      }
      M += (wts(k) * half * std::exp(-q * t) / t) * g;
    }
    t_lo = t_hi;
  }
  Matrix E = M.exp();
  return E * resolvent_I(m, q);
}

KendallAssumptionReport kendall_assumption_check(const ValidatedModel& m,
                                                 const std::vector<double>& qs) {
  const int n = m.n_states();
  if (static_cast<int>(qs.size()) != n)
    throw std::invalid_argument("kendall_assumption_check needs exactly N q-values");
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (!(qs[i] > 0.0)) throw std::invalid_argument("q values must be positive");
    for (std::size_t j = i + 1; j < qs.size(); ++j)
      if (qs[i] == qs[j]) throw std::invalid_argument("q values must be distinct");
  }
  Matrix H(n, n);
  for (int k = 0; k < n; ++k) {
    double phi = phi_inverse(m, qs[static_cast<std::size_t>(k)]);
    H.row(k) = perron(m, phi).h.transpose();
  }
  KendallAssumptionReport rep;
  rep.det = H.determinant();
  Eigen::JacobiSVD<Matrix> svd(H);
  rep.cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
  rep.independent = rep.cond < 1e8;
  return rep;
}

KendallReport kendall_residual(const ValidatedModel& m, const std::vector<PassageHist>& hists,
                               const QuadratureConfig& cfg) {
  const int n = m.n_states();
  const Vector& pi = m.stationary();
  KendallReport rep;
  double sum_dev = 0.0;
  long n_dev = 0;
  for (const auto& h : hists) {
    for (std::size_t c = 0; c < h.t_centers.size(); ++c) {
      double t = h.t_centers[c];
      DensitySlice slice = density_matrix(m, t, {h.x}, cfg);
      KendallCell cell;
      cell.t = t;
      cell.x = h.x;
      cell.rhs = h.x * slice.values[0];
      cell.lhs = Matrix::Zero(n, n);
      double hits = h.counts[c].sum();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          cell.lhs(i, j) = t * h.counts[c](i, j) /
                           (static_cast<double>(h.n_per_start) * h.bin_width);
      cell.insufficient = hits < 100;
      double l1r = cell.rhs.cwiseAbs().sum();
      cell.rel_dev = (cell.lhs - cell.rhs).cwiseAbs().sum() / std::max(l1r, 1e-300);
      // pi-aggregated scalar: sum_ij pi_i (...)_ij
      double la = 0.0, ra = 0.0;
      for (int i = 0; i < n; ++i) {
        la += pi(i) * cell.lhs.row(i).sum();
        ra += pi(i) * cell.rhs.row(i).sum();
      }
      cell.agg_rel_dev = std::abs(la - ra) / std::max(std::abs(ra), 1e-300);
      cell.se_rel = (hits > 0) ? std::sqrt(hits) * t /
                                     (static_cast<double>(h.n_per_start) * h.bin_width *
                                      std::max(l1r, 1e-300))
                               : std::numeric_limits<double>::infinity();
      if (!cell.insufficient) {
        rep.max_dev = std::max(rep.max_dev, cell.rel_dev);
        rep.max_agg_dev = std::max(rep.max_agg_dev, cell.agg_rel_dev);
        sum_dev += cell.rel_dev;
        ++n_dev;
      }
      rep.cells.push_back(std::move(cell));
    }
  }
  rep.mean_dev = n_dev > 0 ? sum_dev / static_cast<double>(n_dev) : 0.0;
  return rep;
}

BallotReport ballot_residual(const ValidatedModel& m, double t_end,
                             const std::vector<double>& x_grid,
                             const std::vector<BallotSampleRow>& samples, double bin_width) {
  const int n = m.n_states();
  double c = m.levy(0).drift;
  for (int i = 0; i < n; ++i) {
    const auto& lc = m.levy(i);
    if (lc.sigma2 != 0.0 || lc.drift != c || !(c > 0.0))
      throw ShapeViolation("ballot needs X = ct - subordinator: equal positive drifts, sigma = 0");
    for (const auto& term : lc.jumps)
      if (!term.law.nonpositive_support())
        throw ShapeViolation("ballot needs nonpositive jumps");
    if (!m.trans_jump(i).nonpositive_support())
      throw ShapeViolation("ballot needs nonpositive transition jumps");
  }
  std::vector<long> n_i(static_cast<std::size_t>(n), 0);
  for (const auto& s : samples) ++n_i[static_cast<std::size_t>(s.j0)];

  const Vector& pi = m.stationary();
  BallotReport rep;
  for (double x : x_grid) {
    double ratio = x / (c * t_end);
    // per-(i,j) paired difference and pi-aggregated scalar
    Matrix sum = Matrix::Zero(n, n), sq = Matrix::Zero(n, n);
    Matrix hits = Matrix::Zero(n, n);
    for (const auto& s : samples) {
      bool inb = s.X >= x - 0.5 * bin_width && s.X < x + 0.5 * bin_width;
      if (!inb) continue;
      double d = (s.inf_zero ? 1.0 : 0.0) - ratio;
      sum(s.j0, s.j_t) += d;
      sq(s.j0, s.j_t) += d * d;
      hits(s.j0, s.j_t) += 1.0;
    }
    for (int i = 0; i < n; ++i) {
      double ni = static_cast<double>(n_i[static_cast<std::size_t>(i)]);
      for (int j = 0; j < n; ++j) {
        BallotCell cell;
        cell.x = x; cell.i = i; cell.j = j;
        cell.hits = static_cast<long>(hits(i, j));
        double mean = sum(i, j) / ni;
        double var = std::max(0.0, sq(i, j) / ni - mean * mean);
        cell.diff = mean;
        cell.se = std::sqrt(var / ni);
        cell.z = cell.se > 0.0 ? mean / cell.se : 0.0;
        cell.insufficient = cell.hits < 100;
        if (!cell.insufficient) rep.max_abs_z = std::max(rep.max_abs_z, std::abs(cell.z));
        rep.cells.push_back(cell);
      }
    }
    double am = 0.0, var_am = 0.0;
    for (int i = 0; i < n; ++i) {
      double ni = static_cast<double>(n_i[static_cast<std::size_t>(i)]);
      double s1 = sum.row(i).sum(), s2 = sq.row(i).sum();
      double mi = s1 / ni;
      double vi = std::max(0.0, s2 / ni - mi * mi);
      am += pi(i) * mi;
      var_am += pi(i) * pi(i) * vi / ni;
    }
    rep.agg_z.push_back(var_am > 0.0 ? am / std::sqrt(var_am) : 0.0);
  }
  return rep;
}

}  // namespace mapfluct
