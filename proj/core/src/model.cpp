#include "mapfluct/model.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace mapfluct {

std::string to_string(ValidationError e) {
  switch (e) {
    case ValidationError::RowSumViolation: return "RowSumViolation";
    case ValidationError::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case ValidationError::Reducible: return "Reducible";
    case ValidationError::PositiveJumpInSpectrallyNegative: return "PositiveJumpInSpectrallyNegative";
    case ValidationError::DegenerateComponent: return "DegenerateComponent";
    case ValidationError::BadShape: return "BadShape";
    case ValidationError::BadJumpLaw: return "BadJumpLaw";
  }
  return "?";
}

namespace {

bool irreducible(const Matrix& Q) {
  const int n = static_cast<int>(Q.rows());
  if (n == 1) return true;
  // reachability closure on the off-diagonal support graph, both directions
  auto reach_all = [&](bool transpose) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<int> stack = {0};
    seen[0] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        double w = transpose ? Q(v, u) : Q(u, v);
        if (u != v && w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = true;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace

Vector stationary_of(const Matrix& Q) {
  // smallest singular triple of Q^T spans the stationary direction
  Eigen::JacobiSVD<Matrix> svd(Q.transpose(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const int n = static_cast<int>(Q.rows());
  if (n > 1) {
    double scale = sv(0);
    if (sv(n - 2) < 1e-9 * std::max(scale, 1.0))
      throw NumericalFailure("null space of Q^T is not one-dimensional");
  }
  Vector pi = svd.matrixV().col(n - 1);
  if (pi.sum() < 0) pi = -pi;
  if (pi.minCoeff() < -1e-12 * std::max(1.0, pi.cwiseAbs().maxCoeff()))
    throw NumericalFailure("stationary vector has mixed signs");
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

ValidationResult validate(const MapSpec& spec) {
  std::vector<ValidationIssue> issues;
  auto add = [&](ValidationError e, const std::string& d) { issues.push_back({e, d}); };

  const int n = spec.n_states;
  if (n <= 0 || spec.Q.rows() != n || spec.Q.cols() != n ||
      static_cast<int>(spec.levy.size()) != n || static_cast<int>(spec.trans_jump.size()) != n) {
    add(ValidationError::BadShape, "n_states, Q, levy, trans_jump sizes disagree");
    return issues;
  }

  for (int i = 0; i < n; ++i) {
    double row = spec.Q.row(i).sum();
    if (std::abs(row) > 1e-12)
      add(ValidationError::RowSumViolation,
          "row " + std::to_string(i) + " sums to " + std::to_string(row));
    for (int j = 0; j < n; ++j)
      if (i != j && spec.Q(i, j) < 0.0)
        add(ValidationError::NegativeOffDiagonal,
            "Q(" + std::to_string(i) + "," + std::to_string(j) + ") < 0");
  }
  if (!irreducible(spec.Q)) add(ValidationError::Reducible, "off-diagonal support graph not strongly connected");

  for (int i = 0; i < n; ++i) {
    const auto& lc = spec.levy[static_cast<std::size_t>(i)];
    if (lc.sigma2 < 0.0) add(ValidationError::BadShape, "sigma2 < 0 in state " + std::to_string(i));
    bool pos_jumps = false;
    for (const auto& term : lc.jumps) {
      if (!(term.rate > 0.0)) add(ValidationError::BadJumpLaw, "jump rate <= 0 in state " + std::to_string(i));
      std::string msg = term.law.check();
      if (!msg.empty()) add(ValidationError::BadJumpLaw, "state " + std::to_string(i) + ": " + msg);
      if (!term.law.nonpositive_support()) pos_jumps = true;
    }
    std::string msg = spec.trans_jump[static_cast<std::size_t>(i)].check();
    if (!msg.empty()) add(ValidationError::BadJumpLaw, "trans_jump " + std::to_string(i) + ": " + msg);

    if (spec.spectrally_negative) {
      if (pos_jumps)
        add(ValidationError::PositiveJumpInSpectrallyNegative,
            "state " + std::to_string(i) + " has jumps with positive support");
      if (!spec.trans_jump[static_cast<std::size_t>(i)].nonpositive_support())
        add(ValidationError::PositiveJumpInSpectrallyNegative,
            "trans_jump " + std::to_string(i) + " has positive support");
    }

    // excluded per-state components: compound Poisson and downward subordinators
    if (!(lc.sigma2 > 0.0) && lc.drift == 0.0)
      add(ValidationError::DegenerateComponent,
          "state " + std::to_string(i) + ": compound Poisson component (sigma=0, drift=0)");
    if (!(lc.sigma2 > 0.0) && lc.drift <= 0.0 && !pos_jumps)
      add(ValidationError::DegenerateComponent,
          "state " + std::to_string(i) + ": downward subordinator (sigma=0, drift<=0, no positive jumps)");
  }

  if (!issues.empty()) return issues;

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (const auto& term : spec.levy[static_cast<std::size_t>(i)].jumps) {
      lo = std::max(lo, term.law.re_lo());
      hi = std::min(hi, term.law.re_hi());
    }
    lo = std::max(lo, spec.trans_jump[static_cast<std::size_t>(i)].re_lo());
    hi = std::min(hi, spec.trans_jump[static_cast<std::size_t>(i)].re_hi());
  }

  Vector pi;
  try {
    pi = stationary_of(spec.Q);
  } catch (const NumericalFailure& e) {
    add(ValidationError::Reducible, e.what());
    return issues;
  }
  return ValidatedModel(std::make_shared<MapSpec>(spec), std::move(pi), lo, hi);
}

ValidatedModel validate_or_throw(const MapSpec& spec) {
  auto r = validate(spec);
  if (auto* m = std::get_if<ValidatedModel>(&r)) return *m;
  std::ostringstream os;
  os << "invalid model:";
  for (const auto& iss : std::get<std::vector<ValidationIssue>>(r))
    os << " [" << to_string(iss.code) << "] " << iss.detail << ";";
  throw std::invalid_argument(os.str());
}

MapSpec builtin(const std::string& name) {
  MapSpec s;
  auto two_state = [&](double d1, double d2, double s21, double s22) {
    s.n_states = 2;
    s.Q = Matrix{{-1.0, 1.0}, {2.0, -2.0}};
    s.levy = {LevyComponent{d1, s21, {}}, LevyComponent{d2, s22, {}}};
    s.trans_jump = {JumpLaw::degenerate(0.0), JumpLaw::degenerate(0.0)};
  };
  if (name == "MODEL-A") {
    two_state(1.0, -1.0, 2.0, 2.0);
    s.spectrally_negative = true;
    return s;
  }
  if (name == "MODEL-B") {
    two_state(0.0, 0.0, 1.0, 4.0);  // sigma = (1, 2)
    s.spectrally_negative = true;
    return s;
  }
  if (name == "MODEL-C") {
    two_state(2.0, 2.0, 0.0, 0.0);
    s.levy[0].jumps = {{1.0, JumpLaw::exponential(1.0, -1)}};
    s.levy[1].jumps = {{3.0, JumpLaw::exponential(1.0, -1)}};
    s.spectrally_negative = true;
    return s;
  }
  if (name == "MODEL-D") {
    two_state(1.0, -1.0, 2.0, 2.0);
    s.levy[0].jumps = {{1.0, JumpLaw::exponential(2.0, +1)}};
    s.levy[1].jumps = {{1.0, JumpLaw::exponential(2.0, +1)}};
    s.spectrally_negative = false;
    return s;
  }
  throw std::invalid_argument("unknown builtin model: " + name);
}

std::optional<MapSpec> reversed_spec(const ValidatedModel& m) {
  const int n = m.n_states();
  bool same = true;
  for (int i = 1; i < n && same; ++i) {
    const auto &a = m.trans_jump(0), &b = m.trans_jump(i);
    same = a.family == b.family && a.c == b.c && a.sign == b.sign &&
           a.weights == b.weights && a.rates == b.rates;
  }
  bool all_zero = true;
  for (int i = 0; i < n; ++i) all_zero = all_zero && m.trans_jump(i).is_zero();
  if (!same && !all_zero) return std::nullopt;

  MapSpec rev = m.spec();
  const Vector& pi = m.stationary();
  rev.Q = pi.cwiseInverse().asDiagonal() * m.Q().transpose() * pi.asDiagonal();
  // enforce exact zero row sums against roundoff
  for (int i = 0; i < n; ++i) rev.Q(i, i) -= rev.Q.row(i).sum();
  return rev;
}

}  // namespace mapfluct
