#ifndef MAPFLUCT_TYPES_HPP
#define MAPFLUCT_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace mapfluct {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Thrown when a transform argument leaves the joint domain of the jump-law
// transforms (e.g. Re alpha <= -beta for a negative exponential jump).
class DomainViolation : public std::runtime_error {
public:
  explicit DomainViolation(const std::string& what) : std::runtime_error(what) {}
};

class NumericalFailure : public std::runtime_error {
public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

inline Matrix diag_of(const Vector& d) { return d.asDiagonal(); }

inline double operator_norm(const Matrix& m) {
  return m.jacobiSvd().singularValues()(0);
}

inline double operator_norm(const CMatrix& m) {
  return m.jacobiSvd().singularValues()(0);
}

}  // namespace mapfluct

#endif
