#ifndef MAPFLUCT_CUMULANT_HPP
#define MAPFLUCT_CUMULANT_HPP

#include "mapfluct/model.hpp"

namespace mapfluct {

// Perron-Frobenius triple of F(alpha), normalized v h^T = 1 and pi h^T = 1.
struct SpectralTriple {
  double alpha = 0.0;
  double kappa = 0.0;
  Vector h;
  Vector v;
};

// Laplace exponent psi(z) = a z + sigma^2 z^2 / 2 + sum rate (Ee^{zU} - 1).
Complex psi_eval(const LevyComponent& levy, Complex z);
double psi_prime(const LevyComponent& levy, double alpha);

// Cumulant matrix F(z): off-diagonal q_ij * Gtilde_i(z), diagonal q_ii + psi_i(z).
CMatrix cgm_eval(const ValidatedModel& m, Complex z);
Matrix cgm_eval_real(const ValidatedModel& m, double alpha);
Matrix cgm_deriv_real(const ValidatedModel& m, double alpha);

SpectralTriple perron(const ValidatedModel& m, double alpha);

double kappa(const ValidatedModel& m, double alpha);
// d kappa / d alpha = v(a) F'(a) h(a)^T under the v h^T = 1 normalization
double kappa_prime(const ValidatedModel& m, double alpha);

// asymptotic drift kappa'(0) = sum_i pi_i (a_i + sum rate EU + sum_j q_ij EU^(i))
double kappa_derivative0(const ValidatedModel& m);

// right inverse of kappa: largest root of kappa(a) = q on [0, inf)
double phi_inverse(const ValidatedModel& m, double q);

}  // namespace mapfluct

#endif
