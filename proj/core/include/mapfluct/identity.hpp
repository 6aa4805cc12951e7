#ifndef MAPFLUCT_IDENTITY_HPP
#define MAPFLUCT_IDENTITY_HPP

#include <vector>

#include "mapfluct/model.hpp"

namespace mapfluct {

class NoDensity : public std::runtime_error {
public:
  explicit NoDensity(const std::string& w) : std::runtime_error(w) {}
};
class CommuteGateFailed : public std::runtime_error {
public:
  explicit CommuteGateFailed(const std::string& w) : std::runtime_error(w) {}
};
class ShapeViolation : public std::runtime_error {
public:
  explicit ShapeViolation(const std::string& w) : std::runtime_error(w) {}
};

struct QuadratureConfig {
  double theta_cut = 9.0;      // theta_max = theta_cut / (sigma_min sqrt(t)) + drift term
  double support_pad = 14.0;   // x-support half-width in units of sigma_max sqrt(t)
  double laplace_pad = 40.0;   // extra period 40/|Re w| for exponential weights
  double t_min = 1e-10;        // lower end of the Rogozin time quadrature
  double t_small = 1e-3;       // below this, diagonal Gaussian closed form
  double t_max_over_q = 40.0;  // upper end = 40/q
  double panel_ratio = 1.9;    // geometric time panels
  int gl_nodes = 12;           // Gauss-Legendre nodes per panel
  double mass_tol = 1e-4;      // density row-mass tolerance
};

// exp of the matrix Frullani integral, assembled from the scalar integral per
// eigenvalue of A; equals q (qI + A)^-1 for diagonalizable A, Re spec > -q
Matrix frullani_expm(const Matrix& A, double q);

struct DensitySlice {
  double t;
  std::vector<double> x_grid;
  std::vector<Matrix> values;  // p_t(x)_ij per grid point
};

// transition density by Fourier inversion of exp(F(i theta) t); needs
// sigma_i > 0 everywhere
DensitySlice density_matrix(const ValidatedModel& m, double t,
                            const std::vector<double>& x_grid,
                            const QuadratureConfig& cfg = {});

// sum over j of the integrated row mass of a slice (trapezoid on its grid)
Vector density_row_mass(const DensitySlice& slice);

enum class HalfLine { nonneg, neg };

// E[e^{i alpha X(t)} 1{X(t) in side}; J(t)] scaled by e^{-xi t}
CMatrix half_line_transform(const ValidatedModel& m, double t, double alpha, double xi,
                            HalfLine side, const QuadratureConfig& cfg = {});

// operator norm of the commutator of the two half-line transform matrices
double commute_residual(const ValidatedModel& m, double alpha, double t, double s,
                        const QuadratureConfig& cfg = {});

// Spitzer-Rogozin factor exp{int int (e^{-xi t -+ alpha x} - 1) t^-1 e^{-qt}
// P(X(t) in dx; J(t))} I(q); the gate checks the commute hypothesis first
Matrix rogozin_factor(const ValidatedModel& m, double q, double alpha, double xi,
                      HalfLine side, const QuadratureConfig& cfg = {},
                      bool enforce_gate = true);

struct KendallAssumptionReport {
  double det = 0.0;
  double cond = 0.0;
  bool independent = false;
};

KendallAssumptionReport kendall_assumption_check(const ValidatedModel& m,
                                                 const std::vector<double>& qs);

// binned first-passage estimates for one level x (filled by the simulator)
struct PassageHist {
  double x = 0.0;
  std::vector<double> t_centers;
  double bin_width = 0.0;
  long n_per_start = 0;
  std::vector<Matrix> counts;  // per t-center: (i,j) hit counts
};

struct KendallCell {
  double t, x;
  Matrix lhs, rhs;       // t * MC tau-density and x * p_t(x)
  double rel_dev;        // |L-R|_1 / |R|_1
  double agg_rel_dev;    // pi-aggregated scalar deviation
  double se_rel;         // MC standard error on the cell scalar
  bool insufficient;     // fewer than 100 hits
};

struct KendallReport {
  std::vector<KendallCell> cells;
  double max_dev = 0.0;   // over sufficient cells
  double mean_dev = 0.0;
  double max_agg_dev = 0.0;
};

KendallReport kendall_residual(const ValidatedModel& m, const std::vector<PassageHist>& hists,
                               const QuadratureConfig& cfg = {});

struct BallotSampleRow {  // mirror of simulate's BallotSample, kept sim-free
  double X;
  bool inf_zero;
  int j0, j_t;
};

struct BallotCell {
  double x;
  int i, j;
  double diff, se, z;
  long hits;
  bool insufficient;
};

struct BallotReport {
  std::vector<BallotCell> cells;
  std::vector<double> agg_z;  // pi-weighted, state-summed z per x
  double max_abs_z = 0.0;     // over sufficient per-entry cells
};

BallotReport ballot_residual(const ValidatedModel& m, double t_end,
                             const std::vector<double>& x_grid,
                             const std::vector<BallotSampleRow>& samples,
                             double bin_width = 0.1);

}  // namespace mapfluct

#endif
