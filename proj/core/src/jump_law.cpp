#include "mapfluct/jump_law.hpp"

#include <cmath>
#include <sstream>

namespace mapfluct {

JumpLaw JumpLaw::degenerate(double c) {
  JumpLaw l;
  l.family = Family::degenerate;
  l.c = c;
  return l;
}

JumpLaw JumpLaw::exponential(double beta, int sign) {
  JumpLaw l;
  l.family = Family::exponential;
  l.rates = {beta};
  l.sign = sign;
  return l;
}

JumpLaw JumpLaw::mixture(std::vector<double> weights, std::vector<double> rates, int sign) {
  JumpLaw l;
  l.family = Family::mixture;
  l.weights = std::move(weights);
  l.rates = std::move(rates);
  l.sign = sign;
  return l;
}

bool JumpLaw::nonpositive_support() const {
  switch (family) {
    case Family::degenerate: return c <= 0.0;
    default: return sign < 0;
  }
}

double JumpLaw::re_lo() const {
  if (family == Family::degenerate) return -std::numeric_limits<double>::infinity();
  if (sign > 0) return -std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
  for (double r : rates) b = std::min(b, r);
  return -b;
}

double JumpLaw::re_hi() const {
  if (family == Family::degenerate) return std::numeric_limits<double>::infinity();
  if (sign < 0) return std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
  for (double r : rates) b = std::min(b, r);
  return b;
}

Complex JumpLaw::transform(Complex z) const {
  if (family == Family::degenerate) return std::exp(z * c);
  if (z.real() <= re_lo() || z.real() >= re_hi()) {
    std::ostringstream os;
    os << "jump-law transform argument Re z = " << z.real()
       << " outside (" << re_lo() << ", " << re_hi() << ")";
    throw DomainViolation(os.str());
  }
  if (family == Family::exponential) {
    const double b = rates[0];
    return b / (b - static_cast<double>(sign) * z);
  }
  Complex acc = 0.0;
  for (std::size_t k = 0; k < rates.size(); ++k)
    acc += weights[k] * rates[k] / (rates[k] - static_cast<double>(sign) * z);
  return acc;
}

double JumpLaw::mean() const {
  switch (family) {
    case Family::degenerate: return c;
    case Family::exponential: return static_cast<double>(sign) / rates[0];
    case Family::mixture: {
      double m = 0.0;
      for (std::size_t k = 0; k < rates.size(); ++k) m += weights[k] / rates[k];
      return static_cast<double>(sign) * m;
    }
  }
  return 0.0;
}

std::string JumpLaw::check() const {
  if (family == Family::degenerate) return "";
  if (sign != 1 && sign != -1) return "jump law sign must be +1 or -1";
  if (rates.empty()) return "jump law needs at least one rate";
  for (double r : rates)
    if (!(r > 0.0)) return "jump law rates must be > 0";
  if (family == Family::mixture) {
    if (weights.size() != rates.size()) return "mixture weights/rates size mismatch";
    double s = 0.0;
    for (double w : weights) {
      if (w < 0.0) return "mixture weights must be >= 0";
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-12) return "mixture weights must sum to 1";
  }
  return "";
}

}  // namespace mapfluct
