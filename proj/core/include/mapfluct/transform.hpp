#ifndef MAPFLUCT_TRANSFORM_HPP
#define MAPFLUCT_TRANSFORM_HPP

#include "mapfluct/cumulant.hpp"

namespace mapfluct {

// Exponentially tilted view: F_g(a) = D_h(g)^-1 F(a+g) D_h(g) - kappa(g) I.
// Lazy: evaluates through the base model, nothing is materialized.
class TiltedView {
public:
  TiltedView(ValidatedModel base, double gamma);

  double gamma() const { return gamma_; }
  const ValidatedModel& base() const { return base_; }

  CMatrix cgm(Complex alpha) const;
  Matrix cgm_real(double alpha) const;
  double kappa(double alpha) const;
  // Perron right eigenvector of F_g(alpha), normalized pi_g h^T = 1
  Vector h(double alpha) const;
  // stationary distribution of the tilted chain F_g(0)
  Vector stationary() const;

private:
  ValidatedModel base_;
  double gamma_;
  SpectralTriple at_gamma_;
};

// Time-reversed view: F^(a) = D_pi^-1 F(a)^T D_pi.  kappa^ = kappa and the
// right eigenvector is normalized by duality, h^ = D_pi^-1 v^T, so that
// D_pi h^(a)^T = v(a)^T holds exactly.
class ReversedView {
public:
  explicit ReversedView(ValidatedModel base) : base_(std::move(base)) {}

  const ValidatedModel& base() const { return base_; }

  Matrix Qhat() const;
  CMatrix cgm(Complex alpha) const;
  Matrix cgm_real(double alpha) const;
  double kappa(double alpha) const;
  Vector h(double alpha) const;

private:
  ValidatedModel base_;
};

}  // namespace mapfluct

#endif
