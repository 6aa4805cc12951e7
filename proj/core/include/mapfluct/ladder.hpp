#ifndef MAPFLUCT_LADDER_HPP
#define MAPFLUCT_LADDER_HPP

#include <memory>
#include <vector>

#include "mapfluct/transform.hpp"

namespace mapfluct {

class RootCountMismatch : public NumericalFailure {
public:
  explicit RootCountMismatch(const std::string& w) : NumericalFailure(w) {}
};
class DefectiveRoots : public NumericalFailure {
public:
  explicit DefectiveRoots(const std::string& w) : NumericalFailure(w) {}
};

struct WhRoot {
  Complex zeta;   // root of det(F(z) - q I) = 0, Re > 0
  CVector u;      // unit null vector of F(zeta) - q I
};

// Per-q ladder bundle.
struct LadderFactors {
  double q = 0.0;
  double phi_q = 0.0;
  std::vector<WhRoot> roots;  // exactly N, conjugate-closed
  Matrix Xi0;                 // Xi(q, 0)
  Matrix Lambda;              // Phi(q) I - D_h^-1 Xi0 D_h
  Vector h_phi;               // h(Phi(q)) used in the similarity
};

// I(q) = q (qI - Q)^-1, stochastic.
Matrix resolvent_I(const ValidatedModel& m, double q);

// Right-half-plane roots of det(F(z) - qI) with null vectors; exactly N for a
// spectrally negative model, certified by an argument-principle count.
std::vector<WhRoot> wh_roots(const ValidatedModel& m, double q);

// Cached ladder bundles for the model and for its time reversal.
std::shared_ptr<const LadderFactors> ladder_factors(const ValidatedModel& m, double q);
std::shared_ptr<const LadderFactors> ladder_factors_reversed(const ValidatedModel& m, double q);

Matrix xi_matrix(const ValidatedModel& m, double q, double alpha);
Matrix lambda_matrix(const ValidatedModel& m, double q);

// E(e^{-(q+xi) tau_x^+}; J(tau_x^+)) = exp(-Xi(q+xi,0) x)
Matrix up_crossing(const ValidatedModel& m, double q, double xi, double x);

enum class Conditioning { at_G, at_eq };

// E[e^{-alpha S(e_q) - xi Gbar(e_q)}; J(.)]
Matrix sup_factor(const ValidatedModel& m, double q, double alpha, double xi, Conditioning cond);

// E[e^{alpha I(e_q) - xi G(e_q)}; J(.)], needs 0 <= alpha < Phi(q+xi).
// `continue_past_phi` evaluates the same rational expression beyond the
// singular point Phi(q+xi), where it agrees with the (always finite)
// expectation by analytic continuation; the expression is only undefined at
// kappa(alpha) = q + xi itself.
Matrix inf_factor(const ValidatedModel& m, double q, double alpha, double xi, Conditioning cond,
                  bool continue_past_phi = false);

// winding number of det(F(z)-qI) around the rectangle [0,X]x[-Y,Y]; the
// test-facing oracle behind the root-count certification
int wh_root_count(const ValidatedModel& m, double q, double X, double Y);

}  // namespace mapfluct

#endif
