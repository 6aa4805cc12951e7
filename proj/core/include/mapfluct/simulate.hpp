#ifndef MAPFLUCT_SIMULATE_HPP
#define MAPFLUCT_SIMULATE_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "mapfluct/model.hpp"

namespace mapfluct {

// One killed replication: extrema and their (last) epochs with chain states.
struct KilledSample {
  double e_q, X, S, I, Gbar, G;
  int j0, j_eq, j_Gbar, j_G;
};

struct PassageSample {
  double tau;     // crossing time; meaningful iff crossed
  double X_tau;   // position at crossing (== level for spectrally negative)
  int j0, j_tau;
  bool crossed;   // false: killed or horizon exhausted before crossing
};

struct BallotSample {
  double X;       // X(t_end)
  bool inf_zero;  // I(t_end) == 0, detected exactly on the piecewise-linear path
  int j0, j_t;
};

struct PathPoint {
  double t, x;
  int j;
};

enum class StartMode { per_state, stationary };

// Exact path skeleton at event epochs (chain transitions, CP jumps, horizon).
std::vector<PathPoint> sample_path(const ValidatedModel& m, double horizon,
                                   std::uint64_t seed, std::uint64_t replication);

// n replications of the killed-path functional record.  StartMode::per_state
// splits replications evenly across start states (rep r starts in r % N).
std::vector<KilledSample> killed_stats(const ValidatedModel& m, double q, long n,
                                       std::uint64_t seed,
                                       StartMode start = StartMode::per_state,
                                       int threads = 0);

// First passage over level x > 0 with exact bridge crossing times; paths are
// capped at `horizon` (and killed at rate kill_q when given): such
// replications come back with crossed = false.
std::vector<PassageSample> first_passage(const ValidatedModel& m, double x, long n,
                                         std::uint64_t seed,
                                         std::optional<double> kill_q = std::nullopt,
                                         double horizon = 50.0,
                                         StartMode start = StartMode::per_state,
                                         int threads = 0);

// Fixed-horizon samples for the ballot identity; requires sigma == 0 in every
// state (piecewise-linear paths, infimum detected exactly at jump epochs).
std::vector<BallotSample> ballot_samples(const ValidatedModel& m, double t_end, long n,
                                         std::uint64_t seed, int threads = 0);

// --- empirical transforms ---------------------------------------------------

struct EstimateMatrix {
  CMatrix value;
  Matrix stderr_;  // per-entry standard error (combined Re/Im for complex)
  long n = 0;
  std::uint64_t seed = 0;
};

enum class Weight { unit, sup_laplace, inf_laplace, sup_fourier, inf_fourier, x_fourier };
enum class Epoch { at_eq, at_Gbar, at_G };

struct FunctionalSpec {
  Weight weight = Weight::unit;
  double alpha = 0.0;
  double xi = 0.0;
  Epoch epoch = Epoch::at_eq;
};

// entry (i,j) = mean over replications with j0 = i of w(sample) 1{state at
// epoch = j}; throws on an empty start-state cell
EstimateMatrix estimate_transform(const std::vector<KilledSample>& samples,
                                  const FunctionalSpec& f, int n_states);

// E[e^{-q tau}; J(tau)] with uncrossed replications contributing 0
EstimateMatrix estimate_passage_transform(const std::vector<PassageSample>& samples,
                                          double q, int n_states);

// two-sample Kolmogorov-Smirnov distance
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// raw-sample CSV: rep,start_state,e_q,X,S,I,G_bar,G,j_eq,j_Gbar,j_G
void dump_killed_csv(const std::vector<KilledSample>& samples, std::ostream& os);

}  // namespace mapfluct

#endif
