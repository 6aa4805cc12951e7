#ifndef MAPFLUCT_SUITES_HPP
#define MAPFLUCT_SUITES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mapfluct/identity.hpp"
#include "mapfluct/model.hpp"

namespace mapfluct {

struct CheckResult {
  std::string name;
  double residual = 0.0;   // measured value
  double threshold = 0.0;  // pass iff residual <= threshold
  bool pass = false;
  std::string note;
};

struct SuiteReport {
  std::string suite;
  std::string model;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  long paths = 0;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  CheckResult& add(std::string name, double residual, double threshold, std::string note = "") {
    checks.push_back({std::move(name), residual, threshold, residual <= threshold, std::move(note)});
    return checks.back();
  }
};

// scalar reductions of the sup/inf factors for N=1 Brownian models (12 triples)
SuiteReport suite_scalar_reduction();

// analytic invariants: Perron normalization, convexity, Phi, ladder generator,
// resolvent, tilt and reversal identities, matrix Frullani vs linear solve
SuiteReport suite_structure(const ValidatedModel& m, std::uint64_t seed = 1);

// up-crossing, sup and inf factors against killed/first-passage Monte Carlo,
// plus the fully analytic key identity
SuiteReport suite_wh(const ValidatedModel& m, double q, long paths, std::uint64_t seed,
                     int threads = 0);

// general-MAP factorization product (both factors MC) and the time-reversal
// law identity (two-sample KS)
SuiteReport suite_independence(const ValidatedModel& general_map,
                               const ValidatedModel& reversible_map, long paths,
                               std::uint64_t seed, int threads = 0);

// Spitzer-Rogozin quadrature factor vs the ladder factor + commute gate
SuiteReport suite_rogozin(const ValidatedModel& m, double q, std::uint64_t seed = 1);

// Kendall identity cells vs Monte Carlo passage histograms + assumption check
SuiteReport suite_kendall(const ValidatedModel& m, long paths, std::uint64_t seed,
                          int threads = 0);

// ballot identity cells on a drift-minus-subordinator model
SuiteReport suite_ballot(const ValidatedModel& m, long paths, std::uint64_t seed,
                         int threads = 0);

// eigenvalues of F(i alpha) pairwise distinct at the test arguments
CheckResult check_distinct_eigs(const ValidatedModel& m, const std::vector<double>& alphas);

std::string report_to_json(const std::vector<SuiteReport>& reports, int indent = 2);

}  // namespace mapfluct

#endif
