#include "mapfluct/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "mapfluct/rng.hpp"

namespace mapfluct {

namespace {

double sample_jump(const JumpLaw& law, Philox& rng) {
  switch (law.family) {
    case JumpLaw::Family::degenerate:
      return law.c;
    case JumpLaw::Family::exponential:
      return static_cast<double>(law.sign) * rng.exponential(law.rates[0]);
    case JumpLaw::Family::mixture: {
      double u = rng.uniform(), acc = 0.0;
      std::size_t k = 0;
      for (; k + 1 < law.weights.size(); ++k) {
        acc += law.weights[k];
        if (u <= acc) break;
      }
      return static_cast<double>(law.sign) * rng.exponential(law.rates[k]);
    }
  }
  return 0.0;
}

int next_state(const ValidatedModel& m, int j, Philox& rng) {
  double u = rng.uniform() * (-m.Q()(j, j));
  double acc = 0.0;
  int jn = j;
  for (int k = 0; k < m.n_states(); ++k) {
    if (k == j) continue;
    acc += m.Q()(j, k);
    jn = k;
    if (u <= acc) break;
  }
  return jn;
}

double total_cp_rate(const ValidatedModel& m, int j) {
  double r = 0.0;
  for (const auto& term : m.levy(j).jumps) r += term.rate;
  return r;
}

double sample_cp_jump(const ValidatedModel& m, int j, Philox& rng) {
  const auto& terms = m.levy(j).jumps;
  double tot = total_cp_rate(m, j);
  double u = rng.uniform() * tot, acc = 0.0;
  std::size_t k = 0;
  for (; k + 1 < terms.size(); ++k) {
    acc += terms[k].rate;
    if (u <= acc) break;
  }
  return sample_jump(terms[k].law, rng);
}

// conditional maximum of a Brownian bridge x0 -> x1 over dt with variance s2*dt
double bridge_max(double x0, double x1, double s2, double dt, Philox& rng) {
  double d = x1 - x0;
  return 0.5 * (x0 + x1 + std::sqrt(d * d - 2.0 * s2 * dt * std::log(rng.uniform())));
}

// location of the maximum given its value: GIG(-1/2)/GIG(1/2) mixture
double argmax_time(double x0, double x1, double M, double s2, double dt, Philox& rng) {
  double c0 = M - x0, c1 = M - x1;
  double denom = 2.0 * s2 * dt;
  double A = c0 * c0 / denom, B = c1 * c1 / denom;
  if (!(A > 1e-280)) return 0.0;
  if (!(B > 1e-280)) return dt;
  double sA = std::sqrt(A), sB = std::sqrt(B);
  double y;
  if (rng.uniform() <= sA / (sA + sB))
    y = rng.inverse_gaussian(sB / sA, 2.0 * B);
  else
    y = 1.0 / rng.inverse_gaussian(sA / sB, 2.0 * A);
  return dt / (1.0 + y);
}

// first hitting time of `level` by a bridge known to cross: GIG(1/2)
double hit_time(double x0, double x1, double level, double s2, double dt, Philox& rng) {
  double c0 = level - x0, c1 = std::abs(x1 - level);
  double denom = 2.0 * s2 * dt;
  double A = c0 * c0 / denom, B = c1 * c1 / denom;
  if (!(A > 1e-280)) return 0.0;
  double y;
  if (!(B > 1e-280)) {
    double z = rng.normal();
    y = z * z / (2.0 * A);
  } else {
    y = 1.0 / rng.inverse_gaussian(std::sqrt(A / B), 2.0 * A);
  }
  return dt / (1.0 + y);
}

void parallel_for(long n, int threads, const std::function<void(long, long)>& body) {
  unsigned hw = std::thread::hardware_concurrency();
  int k = threads > 0 ? threads : static_cast<int>(hw ? hw : 1);
  if (k <= 1 || n < 4096) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  long chunk = (n + k - 1) / k;
  for (int w = 0; w < k; ++w) {
    long lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  for (auto& t : pool) t.join();
}

int start_state_of(const ValidatedModel& m, StartMode mode, long rep, Philox& rng) {
  if (mode == StartMode::per_state) return static_cast<int>(rep % m.n_states());
  double u = rng.uniform(), acc = 0.0;
  const Vector& pi = m.stationary();
  int j = m.n_states() - 1;
  for (int i = 0; i < m.n_states(); ++i) {
    acc += pi(i);
    if (u <= acc) { j = i; break; }
  }
  return j;
}

}  // namespace

std::vector<PathPoint> sample_path(const ValidatedModel& m, double horizon,
                                   std::uint64_t seed, std::uint64_t replication) {
  Philox rng(seed, replication);
  std::vector<PathPoint> pts;
  int j = static_cast<int>(replication % static_cast<std::uint64_t>(m.n_states()));
  double t = 0.0, x = 0.0;
  pts.push_back({t, x, j});
  while (t < horizon) {
    double q_out = -m.Q()(j, j);
    double cp = total_cp_rate(m, j);
    double t_tr = q_out > 0.0 ? rng.exponential(q_out) : std::numeric_limits<double>::infinity();
    double t_cp = cp > 0.0 ? rng.exponential(cp) : std::numeric_limits<double>::infinity();
    double dt = std::min({t_tr, t_cp, horizon - t});
    double x1 = x + m.levy(j).drift * dt;
    if (m.levy(j).sigma2 > 0.0) x1 += std::sqrt(m.levy(j).sigma2 * dt) * rng.normal();
    t += dt;
    x = x1;
    if (t >= horizon) {
      pts.push_back({t, x, j});
      break;
    }
    if (t_cp < t_tr) {
      x += sample_cp_jump(m, j, rng);
    } else {
      x += sample_jump(m.trans_jump(j), rng);
      j = next_state(m, j, rng);
    }
    pts.push_back({t, x, j});
  }
  return pts;
}

std::vector<KilledSample> killed_stats(const ValidatedModel& m, double q, long n,
                                       std::uint64_t seed, StartMode start, int threads) {
  if (!(q > 0.0) || n < 1) throw std::invalid_argument("killed_stats needs q > 0, n >= 1");
  std::vector<KilledSample> out(static_cast<std::size_t>(n));
  parallel_for(n, threads, [&](long lo, long hi) {
    for (long r = lo; r < hi; ++r) {
      Philox rng(seed, static_cast<std::uint64_t>(r));
      KilledSample s{};
      int j = start_state_of(m, start, r, rng);
      s.j0 = j;
      double e_q = rng.exponential(q);
      double t = 0.0, x = 0.0;
      double S = 0.0, I = 0.0, Gbar = 0.0, G = 0.0;
      int jGbar = j, jG = j;
      for (;;) {
        double q_out = -m.Q()(j, j);
        double cp = total_cp_rate(m, j);
        double t_tr = q_out > 0.0 ? rng.exponential(q_out) : std::numeric_limits<double>::infinity();
        double t_cp = cp > 0.0 ? rng.exponential(cp) : std::numeric_limits<double>::infinity();
        double dt = std::min(t_tr, t_cp);
        bool last = t + dt >= e_q;
        if (last) dt = e_q - t;
        const double a = m.levy(j).drift, s2 = m.levy(j).sigma2;
        double x1 = x + a * dt;
        if (s2 > 0.0 && dt > 0.0) x1 += std::sqrt(s2 * dt) * rng.normal();
        // segment extrema
        if (s2 > 0.0 && dt > 0.0) {
          double M = bridge_max(x, x1, s2, dt, rng);
          double thM = argmax_time(x, x1, M, s2, dt, rng);
          if (M >= S) { S = M; Gbar = t + thM; jGbar = j; }
          double mneg = -bridge_max(-x, -x1, s2, dt, rng);
          double thm = argmax_time(-x, -x1, -mneg, s2, dt, rng);
          if (mneg <= I) { I = mneg; G = t + thm; jG = j; }
        } else {
          // linear segment: extrema sit at the endpoints; flat segments
          // attain both everywhere, so the last epoch is the segment end
          double hi_v = std::max(x, x1), lo_v = std::min(x, x1);
          double t_hi = (x1 >= x) ? t + dt : t;
          double t_lo = (x1 <= x) ? t + dt : t;
          if (hi_v >= S) { S = hi_v; Gbar = t_hi; jGbar = j; }
          if (lo_v <= I) { I = lo_v; G = t_lo; jG = j; }
        }
        x = x1;
        t += dt;
        if (last) {
          s.e_q = e_q; s.X = x; s.S = S; s.I = I; s.Gbar = Gbar; s.G = G;
          s.j_eq = j; s.j_Gbar = jGbar; s.j_G = jG;
          break;
        }
        if (t_cp < t_tr) {
          x += sample_cp_jump(m, j, rng);
        } else {
          x += sample_jump(m.trans_jump(j), rng);
          j = next_state(m, j, rng);
        }
        if (x >= S) { S = x; Gbar = t; jGbar = j; }
        if (x <= I) { I = x; G = t; jG = j; }
      }
      out[static_cast<std::size_t>(r)] = s;
    }
  });
  return out;
}

std::vector<PassageSample> first_passage(const ValidatedModel& m, double level, long n,
                                         std::uint64_t seed, std::optional<double> kill_q,
                                         double horizon, StartMode start, int threads) {
  if (!(level > 0.0) || n < 1) throw std::invalid_argument("first_passage needs x > 0, n >= 1");
  std::vector<PassageSample> out(static_cast<std::size_t>(n));
  parallel_for(n, threads, [&](long lo, long hi) {
    for (long r = lo; r < hi; ++r) {
      Philox rng(seed, static_cast<std::uint64_t>(r));
      PassageSample s{};
      int j = start_state_of(m, start, r, rng);
      s.j0 = j;
      s.j_tau = j;
      double cap = horizon;
      if (kill_q) cap = std::min(cap, rng.exponential(*kill_q));
      double t = 0.0, x = 0.0;
      bool crossed = false;
      double tau = 0.0, x_tau = 0.0;
      while (t < cap) {
        double q_out = -m.Q()(j, j);
        double cp = total_cp_rate(m, j);
        double t_tr = q_out > 0.0 ? rng.exponential(q_out) : std::numeric_limits<double>::infinity();
        double t_cp = cp > 0.0 ? rng.exponential(cp) : std::numeric_limits<double>::infinity();
        bool event_is_cap = false;
        double dt = std::min(t_tr, t_cp);
        if (t + dt >= cap) { dt = cap - t; event_is_cap = true; }
        const double a = m.levy(j).drift, s2 = m.levy(j).sigma2;
        double x1 = x + a * dt;
        if (s2 > 0.0 && dt > 0.0) x1 += std::sqrt(s2 * dt) * rng.normal();
        if (s2 > 0.0 && dt > 0.0) {
          bool hits = x1 >= level;
          if (!hits) {
            double p = std::exp(-2.0 * (level - x) * (level - x1) / (s2 * dt));
            hits = rng.uniform() < p;
          }
          if (hits) {
            tau = t + hit_time(x, x1, level, s2, dt, rng);
            crossed = true;
            x_tau = level;
          }
        } else if (a > 0.0 && x1 >= level) {
          tau = t + (level - x) / a;
          crossed = true;
          x_tau = level;
        }
        if (crossed) { s.j_tau = j; break; }
        x = x1;
        t += dt;
        if (event_is_cap) break;
        if (t_cp < t_tr) {
          x += sample_cp_jump(m, j, rng);
        } else {
          x += sample_jump(m.trans_jump(j), rng);
          j = next_state(m, j, rng);
        }
        if (x >= level) {  // jump overshoot (possible only with positive jumps)
          tau = t;
          crossed = true;
          x_tau = x;
          s.j_tau = j;
          break;
        }
      }
      if (crossed && kill_q && tau > cap) crossed = false;
      s.crossed = crossed;
      s.tau = crossed ? tau : std::numeric_limits<double>::infinity();
      s.X_tau = crossed ? x_tau : 0.0;
      out[static_cast<std::size_t>(r)] = s;
    }
  });
  return out;
}

std::vector<BallotSample> ballot_samples(const ValidatedModel& m, double t_end, long n,
                                         std::uint64_t seed, int threads) {
  for (int i = 0; i < m.n_states(); ++i)
    if (m.levy(i).sigma2 != 0.0)
      throw std::invalid_argument("ballot_samples needs sigma == 0 in every state");
  std::vector<BallotSample> out(static_cast<std::size_t>(n));
  parallel_for(n, threads, [&](long lo, long hi) {
    for (long r = lo; r < hi; ++r) {
      Philox rng(seed, static_cast<std::uint64_t>(r));
      BallotSample s{};
      int j = static_cast<int>(r % m.n_states());
      s.j0 = j;
      double t = 0.0, x = 0.0, minv = 0.0;
      while (true) {
        double q_out = -m.Q()(j, j);
        double cp = total_cp_rate(m, j);
        double t_tr = q_out > 0.0 ? rng.exponential(q_out) : std::numeric_limits<double>::infinity();
        double t_cp = cp > 0.0 ? rng.exponential(cp) : std::numeric_limits<double>::infinity();
        double dt = std::min(t_tr, t_cp);
        if (t + dt >= t_end) {
          x += m.levy(j).drift * (t_end - t);
          break;
        }
        x += m.levy(j).drift * dt;
        minv = std::min(minv, x);
        t += dt;
        if (t_cp < t_tr) {
          x += sample_cp_jump(m, j, rng);
        } else {
          x += sample_jump(m.trans_jump(j), rng);
          j = next_state(m, j, rng);
        }
        minv = std::min(minv, x);
      }
      s.X = x;
      s.inf_zero = minv >= 0.0;
      s.j_t = j;
      out[static_cast<std::size_t>(r)] = s;
    }
  });
  return out;
}

EstimateMatrix estimate_transform(const std::vector<KilledSample>& samples,
                                  const FunctionalSpec& f, int n_states) {
  if (samples.empty()) throw std::invalid_argument("estimate_transform: empty samples");
  const int n = n_states;
  EstimateMatrix est;
  est.value = CMatrix::Zero(n, n);
  est.stderr_ = Matrix::Zero(n, n);
  est.n = static_cast<long>(samples.size());
  std::vector<long> cnt(static_cast<std::size_t>(n), 0);
  Matrix sum_re = Matrix::Zero(n, n), sum_im = Matrix::Zero(n, n);
  Matrix sq_re = Matrix::Zero(n, n), sq_im = Matrix::Zero(n, n);
  const Complex iu(0.0, 1.0);
  for (const auto& s : samples) {
    Complex w;
    switch (f.weight) {
      case Weight::unit: w = 1.0; break;
      case Weight::sup_laplace: w = std::exp(-f.alpha * s.S - f.xi * s.Gbar); break;
      case Weight::inf_laplace: w = std::exp(f.alpha * s.I - f.xi * s.G); break;
      case Weight::sup_fourier: w = std::exp(iu * (f.alpha * s.S) - f.xi * s.Gbar); break;
      case Weight::inf_fourier: w = std::exp(iu * (f.alpha * s.I) - f.xi * s.G); break;
      case Weight::x_fourier: w = std::exp(iu * (f.alpha * s.X) - f.xi * s.e_q); break;
    }
    int col;
    switch (f.epoch) {
      case Epoch::at_eq: col = s.j_eq; break;
      case Epoch::at_Gbar: col = s.j_Gbar; break;
      case Epoch::at_G: col = s.j_G; break;
      default: col = s.j_eq;
    }
    ++cnt[static_cast<std::size_t>(s.j0)];
    sum_re(s.j0, col) += w.real();
    sum_im(s.j0, col) += w.imag();
    sq_re(s.j0, col) += w.real() * w.real();
    sq_im(s.j0, col) += w.imag() * w.imag();
  }
  for (int i = 0; i < n; ++i) {
    if (cnt[static_cast<std::size_t>(i)] == 0)
      throw NumericalFailure("estimate_transform: no replications started in state " +
                             std::to_string(i) + " (EmptyCell)");
    double ni = static_cast<double>(cnt[static_cast<std::size_t>(i)]);
    for (int jj = 0; jj < n; ++jj) {
      double mr = sum_re(i, jj) / ni, mi = sum_im(i, jj) / ni;
      est.value(i, jj) = Complex(mr, mi);
      double vr = std::max(0.0, sq_re(i, jj) / ni - mr * mr);
      double vi = std::max(0.0, sq_im(i, jj) / ni - mi * mi);
      est.stderr_(i, jj) = std::sqrt((vr + vi) / ni);
    }
  }
  return est;
}

EstimateMatrix estimate_passage_transform(const std::vector<PassageSample>& samples,
                                          double q, int n_states) {
  if (samples.empty()) throw std::invalid_argument("estimate_passage_transform: empty samples");
  const int n = n_states;
  EstimateMatrix est;
  est.value = CMatrix::Zero(n, n);
  est.stderr_ = Matrix::Zero(n, n);
  est.n = static_cast<long>(samples.size());
  std::vector<long> cnt(static_cast<std::size_t>(n), 0);
  Matrix sum = Matrix::Zero(n, n), sq = Matrix::Zero(n, n);
  for (const auto& s : samples) {
    ++cnt[static_cast<std::size_t>(s.j0)];
    if (!s.crossed) continue;  // contributes 0
    double w = std::exp(-q * s.tau);
    sum(s.j0, s.j_tau) += w;
    sq(s.j0, s.j_tau) += w * w;
  }
  for (int i = 0; i < n; ++i) {
    if (cnt[static_cast<std::size_t>(i)] == 0)
      throw NumericalFailure("estimate_passage_transform: no replications started in state " +
                             std::to_string(i) + " (EmptyCell)");
    double ni = static_cast<double>(cnt[static_cast<std::size_t>(i)]);
    for (int jj = 0; jj < n; ++jj) {
      double mr = sum(i, jj) / ni;
      est.value(i, jj) = mr;
      double vr = std::max(0.0, sq(i, jj) / ni - mr * mr);
      est.stderr_(i, jj) = std::sqrt(vr / ni);
    }
  }
  return est;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

void dump_killed_csv(const std::vector<KilledSample>& samples, std::ostream& os) {
  os << "rep,start_state,e_q,X,S,I,G_bar,G,j_eq,j_Gbar,j_G\n";
  os.precision(17);
  long r = 0;
  for (const auto& s : samples) {
    os << r++ << ',' << s.j0 << ',' << s.e_q << ',' << s.X << ',' << s.S << ',' << s.I << ','
       << s.Gbar << ',' << s.G << ',' << s.j_eq << ',' << s.j_Gbar << ',' << s.j_G << '\n';
  }
}

}  // namespace mapfluct
