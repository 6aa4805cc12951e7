#ifndef MAPFLUCT_JUMP_LAW_HPP
#define MAPFLUCT_JUMP_LAW_HPP

#include <limits>
#include <vector>

#include "mapfluct/types.hpp"

namespace mapfluct {

// Jump size distribution with a rational moment transform.  Families:
//   degenerate(c)                   U = c a.s.
//   exponential(beta, sign)         |U| ~ Exp(beta), sign picks the half-line
//   mixture(weights, betas, sign)   one-sided hyperexponential
struct JumpLaw {
  enum class Family { degenerate, exponential, mixture };

  Family family = Family::degenerate;
  double c = 0.0;                 // degenerate point mass
  int sign = -1;                  // +1 or -1, exponential families only
  std::vector<double> weights;    // mixture only
  std::vector<double> rates;      // exponential: rates[0]=beta; mixture: all

  static JumpLaw degenerate(double c);
  static JumpLaw exponential(double beta, int sign);
  static JumpLaw mixture(std::vector<double> weights, std::vector<double> rates, int sign);

  bool is_zero() const { return family == Family::degenerate && c == 0.0; }

  // true if no mass on (0, inf)
  bool nonpositive_support() const;

  // E e^{zU}; throws DomainViolation outside the strip re_lo() < Re z < re_hi()
  Complex transform(Complex z) const;

  // open domain of the transform on the real axis
  double re_lo() const;
  double re_hi() const;

  double mean() const;

  // validation issues ("" if well formed)
  std::string check() const;
};

}  // namespace mapfluct

#endif
