#ifndef MAPFLUCT_RNG_HPP
#define MAPFLUCT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace mapfluct {

// Philox4x32-10 counter-based generator.  Each (seed, stream) pair is an
// independent substream; identical draws regardless of thread placement.
class Philox {
public:
  Philox(std::uint64_t seed, std::uint64_t stream)
      : k0_(static_cast<std::uint32_t>(seed)),
        k1_(static_cast<std::uint32_t>(seed >> 32)),
        c2_(static_cast<std::uint32_t>(stream)),
        c3_(static_cast<std::uint32_t>(stream >> 32)) {}

  std::uint32_t next_u32() {
    if (have_ == 0) {
      fill();
      have_ = 4;
    }
    return out_[--have_];
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // uniform on (0,1), never returns an endpoint
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // inverse Gaussian IG(mu, lambda), Michael-Schucany-Haas with the
  // cancellation-free form of the smaller root
  double inverse_gaussian(double mu, double lambda) {
    double z = normal();
    double w = mu * z * z / (2.0 * lambda);
    double x = mu / (1.0 + w + std::sqrt(w * (w + 2.0)));
    if (uniform() <= mu / (mu + x)) return x;
    return mu * mu / x;
  }

private:
  static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
  }

  void fill() {
    std::uint32_t c0 = ctr_lo_, c1 = ctr_hi_, c2 = c2_, c3 = c3_;
    std::uint32_t k0 = k0_, k1 = k1_;
    for (int round = 0; round < 10; ++round) {
      const std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
      std::uint32_t hi0 = mulhi(m0, c0), lo0 = m0 * c0;
      std::uint32_t hi1 = mulhi(m1, c2), lo1 = m1 * c2;
      std::uint32_t n0 = hi1 ^ c1 ^ k0;
      std::uint32_t n1 = lo1;
      std::uint32_t n2 = hi0 ^ c3 ^ k1;
      std::uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
    if (++ctr_lo_ == 0) ++ctr_hi_;
  }

  std::uint32_t k0_, k1_;
  std::uint32_t ctr_lo_ = 0, ctr_hi_ = 0;
  std::uint32_t c2_, c3_;
  std::uint32_t out_[4] = {0, 0, 0, 0};
  int have_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mapfluct

#endif
