#include "mapfluct/ladder.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

namespace mapfluct {

Matrix resolvent_I(const ValidatedModel& m, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("resolvent needs q > 0");
  const int n = m.n_states();
  Matrix A = q * Matrix::Identity(n, n) - m.Q();
  return Eigen::PartialPivLU<Matrix>(A).solve(q * Matrix::Identity(n, n));
}

namespace {

using CgmFn = std::function<CMatrix(Complex)>;

Complex det_shift(const CgmFn& F, double q, int n, Complex z) {
  CMatrix A = F(z) - q * CMatrix::Identity(n, n);
  return Eigen::PartialPivLU<CMatrix>(A).determinant();
}

// winding count of z -> det(F(z)-qI) along the rectangle boundary, adaptive
// phase tracking with bisection refinement
int winding_count(const CgmFn& F, double q, int n, double X, double Y) {
  std::vector<Complex> corners = {Complex(0, -Y), Complex(X, -Y), Complex(X, Y),
                                  Complex(0, Y), Complex(0, -Y)};
  double total = 0.0;
  const int base_steps = 64;
  std::function<double(Complex, Complex, Complex, Complex, int)> walk =
      [&](Complex a, Complex b, Complex fa, Complex fb, int depth) -> double {
    double d = std::arg(fb / fa);
    if (std::abs(d) < 1.4) return d;
    if (depth > 48) throw NumericalFailure("argument-principle walk failed to refine (root on contour?)");
    Complex mzv = 0.5 * (a + b);
    Complex fm = det_shift(F, q, n, mzv);
    return walk(a, mzv, fa, fm, depth + 1) + walk(mzv, b, fm, fb, depth + 1);
  };
  for (std::size_t e = 0; e + 1 < corners.size(); ++e) {
    Complex a = corners[e], b = corners[e + 1];
    Complex fprev = det_shift(F, q, n, a);
    for (int s = 1; s <= base_steps; ++s) {
      Complex zb = a + (b - a) * (static_cast<double>(s) / base_steps);
      Complex fb = det_shift(F, q, n, zb);
      total += walk(a + (b - a) * (static_cast<double>(s - 1) / base_steps), zb, fprev, fb, 0);
      fprev = fb;
    }
  }
  double w = total / (2.0 * M_PI);
  int count = static_cast<int>(std::lround(w));
  if (std::abs(w - count) > 0.2)
    throw NumericalFailure("argument-principle count did not converge to an integer");
  return count;
}

struct RootSearchResult {
  std::vector<Complex> roots;
};

// deflated Newton from multistart seeds; stops when n_target roots
// (counting conjugates) are located.  re_floor is the left edge of the
// transform domain: iterates at or below it are abandoned.
RootSearchResult newton_roots(const CgmFn& F, double q, int n, double phi_q, double zmax,
                              double re_floor) {
  std::vector<Complex> found;  // representatives: real roots and Im>0 members
  auto count_with_conj = [&]() {
    int c = 0;
    for (const auto& r : found) c += (std::abs(r.imag()) > 0.0) ? 2 : 1;
    return c;
  };
  auto try_seed = [&](Complex z0) {
    Complex z = z0;
    for (int it = 0; it < 120; ++it) {
      Complex fz = det_shift(F, q, n, z);
      double h = 1e-7 * (1.0 + std::abs(z));
      Complex df = (det_shift(F, q, n, z + h) - det_shift(F, q, n, z - h)) / (2.0 * h);
      if (fz == 0.0) break;
      Complex r = df / fz;
      for (const auto& rt : found) {
        r -= 1.0 / (z - rt);
        if (std::abs(rt.imag()) > 0.0) r -= 1.0 / (z - std::conj(rt));
      }
      if (r == 0.0) return;
      Complex step = -1.0 / r;
      // keep iterates in a sane box
      if (std::abs(step) > zmax) step *= zmax / std::abs(step);
      z += step;
      if (z.real() <= re_floor || z.real() < -0.5 * zmax || std::abs(z) > 8.0 * zmax) return;
      if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) break;
    }
    if (!(z.real() > 1e-10)) return;
    // polish & accept: relative residual of the determinant via smallest singular value
    CMatrix A = F(z) - q * CMatrix::Identity(n, n);
    Eigen::JacobiSVD<CMatrix> svd(A);
    double smin = svd.singularValues()(n - 1);
    double smax = svd.singularValues()(0);
    if (smin > 1e-8 * std::max(1.0, smax)) return;
    if (std::abs(z.imag()) < 1e-9 * (1.0 + std::abs(z.real()))) z = Complex(z.real(), 0.0);
    else if (z.imag() < 0.0) z = std::conj(z);
    for (const auto& rt : found)
      if (std::abs(z - rt) < 1e-7 * (1.0 + std::abs(z))) return;
    found.push_back(z);
  };

  try_seed(Complex(phi_q, 0.0));
  const int grid = 8;
  for (int gx = 0; gx < grid && count_with_conj() < n; ++gx)
    for (int gy = 0; gy <= grid && count_with_conj() < n; ++gy) {
      double x = zmax * (0.03 + 0.97 * gx / (grid - 1.0));
      double y = zmax * (gy / static_cast<double>(grid));
      try_seed(Complex(x, y));
    }
  RootSearchResult rs;
  rs.roots = std::move(found);
  return rs;
}

LadderFactors compute_ladder(const CgmFn& F, int n, double q, double phi_q, const Vector& h_phi,
                             double re_floor) {
  // certified root count on a grown rectangle
  double zmax = 2.0 * (phi_q + 1.0);
  int count = -1;
  for (int attempt = 0; attempt < 14; ++attempt) {
    int c = winding_count(F, q, n, zmax, zmax);
    if (c == n && c == count) break;  // stabilized at n
    count = c;
    if (c == n && attempt >= 1) break;
    zmax *= 2.0;
    if (attempt == 13) {
      std::ostringstream os;
      os << "right-half-plane root count " << c << " != N = " << n << " (RootCountMismatch)";
      throw RootCountMismatch(os.str());
    }
  }

  RootSearchResult rs = newton_roots(F, q, n, phi_q, zmax, re_floor);
  std::vector<Complex> all;
  for (const auto& r : rs.roots) {
    all.push_back(r);
    if (r.imag() > 0.0) all.push_back(std::conj(r));
  }
  if (static_cast<int>(all.size()) != n) {
    std::ostringstream os;
    os << "located " << all.size() << " roots, expected " << n << " (RootCountMismatch); found:";
    for (auto& r : all) os << " " << r;
    throw RootCountMismatch(os.str());
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (std::abs(all[i] - all[j]) < 1e-6)
        throw DefectiveRoots("coalescing roots closer than 1e-6 (DefectiveRoots)");

  // null vectors; conjugate roots get conjugate vectors so Xi comes out real
  LadderFactors L;
  L.q = q;
  L.phi_q = phi_q;
  L.h_phi = h_phi;
  for (const auto& z : all) {
    if (z.imag() < 0.0) continue;
    CMatrix A = F(z) - q * CMatrix::Identity(n, n);
    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullV);
    CVector u = svd.matrixV().col(n - 1);
    if (z.imag() == 0.0) {
      int imax = 0;
      for (int i = 1; i < n; ++i)
        if (std::abs(u(i)) > std::abs(u(imax))) imax = i;
      u *= std::abs(u(imax)) / u(imax);
    }
    L.roots.push_back({z, u});
    if (z.imag() > 0.0) L.roots.push_back({std::conj(z), u.conjugate()});
  }

  CMatrix U(n, n), Z = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    U.col(k) = L.roots[static_cast<std::size_t>(k)].u;
    Z(k, k) = L.roots[static_cast<std::size_t>(k)].zeta;
  }
  Eigen::PartialPivLU<CMatrix> lu(U);
  CMatrix Xi = U * Z * lu.solve(CMatrix::Identity(n, n));
  if (Xi.imag().cwiseAbs().maxCoeff() > 1e-7 * std::max(1.0, Xi.real().cwiseAbs().maxCoeff()))
    throw DefectiveRoots("Xi(q,0) has a non-negligible imaginary part (deficient null vectors)");
  L.Xi0 = Xi.real();
  L.Lambda = phi_q * Matrix::Identity(n, n) -
             h_phi.cwiseInverse().asDiagonal() * L.Xi0 * h_phi.asDiagonal();
  return L;
}

struct CacheKey {
  const void* model;
  bool reversed;
  double q;
  bool operator<(const CacheKey& o) const {
    if (model != o.model) return model < o.model;
    if (reversed != o.reversed) return reversed < o.reversed;
    return q < o.q;
  }
};

// each entry pins the spec so its address cannot be recycled for a new model
struct CacheEntry {
  std::shared_ptr<const MapSpec> pin;
  std::shared_ptr<const LadderFactors> factors;
};

std::map<CacheKey, CacheEntry>& cache() {
  static std::map<CacheKey, CacheEntry> c;
  return c;
}
std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::shared_ptr<const LadderFactors> ladder_factors(const ValidatedModel& m, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("ladder factors need q > 0");
  if (!m.spectrally_negative())
    throw std::invalid_argument("ladder factors need a spectrally negative model");
  CacheKey key{&m.spec(), false, q};
  std::lock_guard<std::mutex> lock(cache_mutex());
  auto it = cache().find(key);
  if (it != cache().end()) return it->second.factors;
  double phi = phi_inverse(m, q);
  SpectralTriple t = perron(m, phi);
  auto F = [&m](Complex z) { return cgm_eval(m, z); };
  double floor = std::max(m.alpha_lo(), -0.45 * std::numeric_limits<double>::max());
  auto L = std::make_shared<const LadderFactors>(
      compute_ladder(F, m.n_states(), q, phi, t.h, floor));
  cache().emplace(key, CacheEntry{m.spec_ptr(), L});
  return L;
}

std::shared_ptr<const LadderFactors> ladder_factors_reversed(const ValidatedModel& m, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("ladder factors need q > 0");
  if (!m.spectrally_negative())
    throw std::invalid_argument("ladder factors need a spectrally negative model");
  CacheKey key{&m.spec(), true, q};
  std::lock_guard<std::mutex> lock(cache_mutex());
  auto it = cache().find(key);
  if (it != cache().end()) return it->second.factors;
  // kappa^ = kappa, so Phi is shared; h^ = D_pi^-1 v by duality
  double phi = phi_inverse(m, q);
  SpectralTriple t = perron(m, phi);
  Vector h_hat = t.v.cwiseQuotient(m.stationary());
  ReversedView rv(m);
  auto F = [rv](Complex z) { return rv.cgm(z); };
  double floor = std::max(m.alpha_lo(), -0.45 * std::numeric_limits<double>::max());
  auto L = std::make_shared<const LadderFactors>(
      compute_ladder(F, m.n_states(), q, phi, h_hat, floor));
  cache().emplace(key, CacheEntry{m.spec_ptr(), L});
  return L;
}

Matrix xi_matrix(const ValidatedModel& m, double q, double alpha) {
  auto L = ladder_factors(m, q);
  return L->Xi0 + alpha * Matrix::Identity(m.n_states(), m.n_states());
}

Matrix lambda_matrix(const ValidatedModel& m, double q) { return ladder_factors(m, q)->Lambda; }

std::vector<WhRoot> wh_roots(const ValidatedModel& m, double q) { return ladder_factors(m, q)->roots; }

Matrix up_crossing(const ValidatedModel& m, double q, double xi, double x) {
  if (x < 0.0 || xi < 0.0) throw std::invalid_argument("up_crossing needs x, xi >= 0");
  auto L = ladder_factors(m, q + xi);
  Matrix A = -L->Xi0 * x;
  return A.exp();
}

Matrix sup_factor(const ValidatedModel& m, double q, double alpha, double xi, Conditioning cond) {
  if (alpha < 0.0 || xi < 0.0) throw std::invalid_argument("sup_factor needs alpha, xi >= 0");
  const int n = m.n_states();
  auto Lq = ladder_factors(m, q);
  auto Lqx = ladder_factors(m, q + xi);
  Matrix Xia = Lqx->Xi0 + alpha * Matrix::Identity(n, n);
  Matrix rhs = (cond == Conditioning::at_eq)
                   ? Matrix(Lq->Xi0 * resolvent_I(m, q))
                   : Matrix(Vector(Lq->Xi0.rowwise().sum()).asDiagonal());
  return Eigen::PartialPivLU<Matrix>(Xia).solve(rhs);
}

Matrix inf_factor(const ValidatedModel& m, double q, double alpha, double xi, Conditioning cond,
                  bool continue_past_phi) {
  if (alpha < 0.0 || xi < 0.0) throw std::invalid_argument("inf_factor needs alpha, xi >= 0");
  const int n = m.n_states();
  double phi_qx = phi_inverse(m, q + xi);
  if (!(alpha < phi_qx) && !continue_past_phi)
    throw DomainViolation("inf_factor needs alpha < Phi(q+xi)");
  if (continue_past_phi && std::abs(kappa(m, alpha) - (q + xi)) < 1e-9 * (1.0 + q + xi))
    throw DomainViolation("inf_factor: alpha sits at the singular point Phi(q+xi)");
  auto Lh_qx = ladder_factors_reversed(m, q + xi);
  auto Lh_q = ladder_factors_reversed(m, q);
  const Vector& pi = m.stationary();
  Matrix A = (q + xi) * Matrix::Identity(n, n) - cgm_eval_real(m, alpha);
  Matrix front = Eigen::PartialPivLU<Matrix>(A).solve(q * Matrix::Identity(n, n));
  Matrix core = (Lh_qx->Xi0 - alpha * Matrix::Identity(n, n)).transpose();
  Matrix tail;
  if (cond == Conditioning::at_eq) {
    tail = Eigen::PartialPivLU<Matrix>(Lh_q->Xi0).solve(Matrix::Identity(n, n)).transpose() *
           pi.asDiagonal();
  } else {
    // normalize by the stationary law of the state at the extremum epoch,
    // rho_k = P_pi(J^(Gbar^) = k) = [pi Xi^(q,0)^-1 diag(Xi^(q,0) e)]_k.
    // rho equals pi whenever the time set {X = S} is Lebesgue-null (any
    // diffusion part present); for bounded-variation paths they differ and
    // rho is the normalizer that keeps the factor a transform of a
    // probability law.
    Vector row_sums = Lh_q->Xi0.rowwise().sum();
    Vector rho = (pi.transpose() *
                  Eigen::PartialPivLU<Matrix>(Lh_q->Xi0).solve(Matrix(row_sums.asDiagonal())))
                     .transpose();
    tail = rho.cwiseQuotient(row_sums).asDiagonal();
  }
  return front * pi.cwiseInverse().asDiagonal() * core * tail;
}

int wh_root_count(const ValidatedModel& m, double q, double X, double Y) {
  auto F = [&m](Complex z) { return cgm_eval(m, z); };
  return winding_count(F, q, m.n_states(), X, Y);
}

}  // namespace mapfluct
