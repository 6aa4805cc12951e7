#include "mapfluct/transform.hpp"

namespace mapfluct {

TiltedView::TiltedView(ValidatedModel base, double gamma)
    : base_(std::move(base)), gamma_(gamma), at_gamma_(perron(base_, gamma)) {}

CMatrix TiltedView::cgm(Complex alpha) const {
  const Vector& h = at_gamma_.h;
  CMatrix F = cgm_eval(base_, alpha + gamma_);
  CMatrix out = h.cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>() * F *
                h.asDiagonal().toDenseMatrix().cast<Complex>();
  out -= at_gamma_.kappa * CMatrix::Identity(out.rows(), out.cols());
  return out;
}

Matrix TiltedView::cgm_real(double alpha) const {
  const Vector& h = at_gamma_.h;
  Matrix F = cgm_eval_real(base_, alpha + gamma_);
  return h.cwiseInverse().asDiagonal() * F * h.asDiagonal() -
         at_gamma_.kappa * Matrix::Identity(F.rows(), F.cols());
}

double TiltedView::kappa(double alpha) const {
  return mapfluct::kappa(base_, alpha + gamma_) - at_gamma_.kappa;
}

Vector TiltedView::stationary() const { return stationary_of(cgm_real(0.0)); }

Vector TiltedView::h(double alpha) const {
  // h_g(a) = D_h(g)^-1 h(a+g) up to scale; normalize against pi_g
  SpectralTriple t = perron(base_, alpha + gamma_);
  Vector hg = t.h.cwiseQuotient(at_gamma_.h);
  return hg / stationary().dot(hg);
}

Matrix ReversedView::Qhat() const {
  const Vector& pi = base_.stationary();
  Matrix Qh = pi.cwiseInverse().asDiagonal() * base_.Q().transpose() * pi.asDiagonal();
  return Qh;
}

CMatrix ReversedView::cgm(Complex alpha) const {
  const Vector& pi = base_.stationary();
  CMatrix F = cgm_eval(base_, alpha);
  return pi.cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>() * F.transpose() *
         pi.asDiagonal().toDenseMatrix().cast<Complex>();
}

Matrix ReversedView::cgm_real(double alpha) const {
  const Vector& pi = base_.stationary();
  return pi.cwiseInverse().asDiagonal() * cgm_eval_real(base_, alpha).transpose() * pi.asDiagonal();
}

double ReversedView::kappa(double alpha) const { return mapfluct::kappa(base_, alpha); }

Vector ReversedView::h(double alpha) const {
  SpectralTriple t = perron(base_, alpha);
  return t.v.cwiseQuotient(base_.stationary());
}

}  // namespace mapfluct
