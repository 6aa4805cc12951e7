#ifndef MAPFLUCT_MODEL_HPP
#define MAPFLUCT_MODEL_HPP

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mapfluct/jump_law.hpp"
#include "mapfluct/types.hpp"

namespace mapfluct {

// One compound-Poisson term of a per-state Levy component.
struct CompoundTerm {
  double rate = 0.0;
  JumpLaw law;
};

// Per-state Levy characteristics (finite-activity jumps only).
struct LevyComponent {
  double drift = 0.0;
  double sigma2 = 0.0;
  std::vector<CompoundTerm> jumps;
};

// Full MAP primitives.  Transition jumps are attached to the state being
// left, i.e. the (i,j) generator entry carries the transform of trans_jump[i].
struct MapSpec {
  int n_states = 0;
  Matrix Q;
  std::vector<LevyComponent> levy;
  std::vector<JumpLaw> trans_jump;
  bool spectrally_negative = false;
};

enum class ValidationError {
  RowSumViolation,
  NegativeOffDiagonal,
  Reducible,
  PositiveJumpInSpectrallyNegative,
  DegenerateComponent,
  BadShape,
  BadJumpLaw,
};

struct ValidationIssue {
  ValidationError code;
  std::string detail;
};

std::string to_string(ValidationError e);

class ValidatedModel;
using ValidationResult = std::variant<ValidatedModel, std::vector<ValidationIssue>>;

// Immutable validated model handle; cheap to copy, safe for concurrent reads.
class ValidatedModel {
public:
  int n_states() const { return spec_->n_states; }
  const Matrix& Q() const { return spec_->Q; }
  const LevyComponent& levy(int i) const { return spec_->levy[static_cast<std::size_t>(i)]; }
  const JumpLaw& trans_jump(int i) const { return spec_->trans_jump[static_cast<std::size_t>(i)]; }
  bool spectrally_negative() const { return spec_->spectrally_negative; }
  const MapSpec& spec() const { return *spec_; }
  std::shared_ptr<const MapSpec> spec_ptr() const { return spec_; }

  // stationary distribution of Q (pi Q = 0, sum 1, entries > 0)
  const Vector& stationary() const { return pi_; }

  // joint open domain (lo, hi) of all jump-law transforms on the real axis
  double alpha_lo() const { return alpha_lo_; }
  double alpha_hi() const { return alpha_hi_; }

  friend ValidationResult validate(const MapSpec& spec);

private:
  ValidatedModel(std::shared_ptr<const MapSpec> s, Vector pi, double lo, double hi)
      : spec_(std::move(s)), pi_(std::move(pi)), alpha_lo_(lo), alpha_hi_(hi) {}
  std::shared_ptr<const MapSpec> spec_;
  Vector pi_;
  double alpha_lo_, alpha_hi_;
};

ValidationResult validate(const MapSpec& spec);

// throws std::invalid_argument with the concatenated issue list on failure
ValidatedModel validate_or_throw(const MapSpec& spec);

// MODEL-A .. MODEL-D
MapSpec builtin(const std::string& name);

// stationary distribution of an arbitrary generator (SVD null space of Q^T)
Vector stationary_of(const Matrix& Q);

// Time-reversed MapSpec (hat process): Q^ = D_pi^-1 Q^T D_pi, per-state parts
// unchanged.  Representable in the left-attachment convention only when the
// transition-jump laws are degenerate-at-zero or state-independent; returns
// nullopt otherwise.
std::optional<MapSpec> reversed_spec(const ValidatedModel& m);

}  // namespace mapfluct

#endif
