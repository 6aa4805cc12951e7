// mapfluct command line: evaluate cumulant/ladder quantities and run the
// verification suites against model files.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "mapfluct/cumulant.hpp"
#include "mapfluct/identity.hpp"
#include "mapfluct/ladder.hpp"
#include "mapfluct/model_io.hpp"
#include "mapfluct/simulate.hpp"
#include "mapfluct/suites.hpp"

using namespace mapfluct;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitDomainError = 3;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MAPFLUCT_SEED")) return std::strtoull(env, nullptr, 10);
  return 20240901ULL;
}

ValidatedModel load_model(const std::string& spec_arg) {
  MapSpec spec;
  if (spec_arg.rfind("MODEL-", 0) == 0)
    spec = builtin(spec_arg);
  else
    spec = load_model_file(spec_arg);
  auto r = validate(spec);
  if (auto* issues = std::get_if<std::vector<ValidationIssue>>(&r)) {
    std::ostringstream os;
    os << "model validation failed:";
    for (const auto& iss : *issues) os << "\n  [" << to_string(iss.code) << "] " << iss.detail;
    throw ModelParseError(os.str());
  }
  return std::get<ValidatedModel>(r);
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

void print_matrix_csv(std::ostream& os, const Matrix& m, const std::string& label) {
  os << "# " << label << "\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix Wiener-Hopf fluctuation identities for Markov additive processes"};
  app.require_subcommand(1);

  // --- cumulant ---
  auto* cum = app.add_subcommand("cumulant", "evaluate F(alpha), the Perron triple and Phi(q)");
  std::string cum_model;
  std::vector<double> cum_alphas, cum_qs;
  bool cum_csv = false;
  cum->add_option("--model", cum_model, "model file or builtin name")->required();
  cum->add_option("--alpha", cum_alphas, "real arguments")->expected(-1);
  cum->add_option("--q", cum_qs, "killing rates for Phi(q)")->expected(-1);
  cum->add_flag("--csv", cum_csv, "flat CSV matrices instead of JSON");

  // --- whfactor ---
  auto* wh = app.add_subcommand("whfactor", "closed-form Wiener-Hopf factor matrices");
  std::string wh_model, wh_side = "sup", wh_cond = "at_eq";
  double wh_q = 1.0, wh_alpha = 0.0, wh_xi = 0.0;
  bool wh_csv = false;
  wh->add_option("--model", wh_model)->required();
  wh->add_option("--q", wh_q)->required();
  wh->add_option("--alpha", wh_alpha);
  wh->add_option("--xi", wh_xi);
  wh->add_option("--side", wh_side)->check(CLI::IsMember({"sup", "inf"}));
  wh->add_option("--cond", wh_cond)->check(CLI::IsMember({"at_G", "at_eq"}));
  wh->add_flag("--csv", wh_csv);

  // --- verify ---
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  std::string ver_suite, ver_model, ver_dump;
  long ver_paths = 0;
  std::uint64_t ver_seed = default_seed();
  int ver_threads = 0;
  double ver_tol = 1.0;
  ver->add_option("--suite", ver_suite, "wh|independence|rogozin|kendall|ballot|structure")
      ->required()
      ->check(CLI::IsMember({"wh", "independence", "rogozin", "kendall", "ballot", "structure"}));
  ver->add_option("--model", ver_model, "model file or builtin (default depends on suite)");
  ver->add_option("--paths", ver_paths, "Monte Carlo replications");
  ver->add_option("--seed", ver_seed, "RNG seed (default: MAPFLUCT_SEED or fixed)");
  ver->add_option("--threads", ver_threads, "simulator workers (results independent of this)");
  ver->add_option("--tol", ver_tol, "threshold multiplier applied to every check");
  ver->add_option("--dump-samples", ver_dump, "write killed-path samples as CSV (wh suite)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cum) {
      ValidatedModel m = load_model(cum_model);
      json out;
      out["model"] = cum_model;
      out["n_states"] = m.n_states();
      out["stationary"] = std::vector<double>(m.stationary().data(),
                                              m.stationary().data() + m.n_states());
      json evals = json::array();
      for (double a : cum_alphas) {
        SpectralTriple t = perron(m, a);
        json e;
        e["alpha"] = a;
        e["F"] = matrix_json(cgm_eval_real(m, a));
        e["kappa"] = t.kappa;
        e["h"] = std::vector<double>(t.h.data(), t.h.data() + m.n_states());
        e["v"] = std::vector<double>(t.v.data(), t.v.data() + m.n_states());
        evals.push_back(e);
        if (cum_csv) print_matrix_csv(std::cout, cgm_eval_real(m, a), "F(" + std::to_string(a) + ")");
      }
      out["evaluations"] = evals;
      json phis = json::array();
      for (double q : cum_qs) phis.push_back({{"q", q}, {"phi", phi_inverse(m, q)}});
      out["phi"] = phis;
      out["kappa_prime0"] = kappa_derivative0(m);
      if (!cum_csv) std::cout << out.dump(2) << "\n";
      return kExitOk;
    }

    if (*wh) {
      ValidatedModel m = load_model(wh_model);
      Conditioning cond = wh_cond == "at_G" ? Conditioning::at_G : Conditioning::at_eq;
      Matrix result = wh_side == "sup" ? sup_factor(m, wh_q, wh_alpha, wh_xi, cond)
                                       : inf_factor(m, wh_q, wh_alpha, wh_xi, cond);
      if (wh_csv) {
        print_matrix_csv(std::cout, result, wh_side + "-factor");
      } else {
        json out;
        out["model"] = wh_model;
        out["q"] = wh_q;
        out["alpha"] = wh_alpha;
        out["xi"] = wh_xi;
        out["side"] = wh_side;
        out["cond"] = wh_cond;
        out["factor"] = matrix_json(result);
        std::cout << out.dump(2) << "\n";
      }
      return kExitOk;
    }

    if (*ver) {
      std::string model_arg = ver_model;
      if (model_arg.empty()) {
        if (ver_suite == "independence") model_arg = "MODEL-D";
        else if (ver_suite == "rogozin") model_arg = "MODEL-B";
        else if (ver_suite == "ballot") model_arg = "MODEL-C";
        else model_arg = "MODEL-A";
      }
      ValidatedModel m = load_model(model_arg);
      std::vector<SuiteReport> reports;
      if (ver_suite == "structure") {
        reports.push_back(suite_scalar_reduction());
        reports.push_back(suite_structure(m, ver_seed));
      } else if (ver_suite == "wh") {
        long paths = ver_paths > 0 ? ver_paths : 100000;
        reports.push_back(suite_wh(m, 1.0, paths, ver_seed, ver_threads));
        if (!ver_dump.empty()) {
          auto ks = killed_stats(m, 1.0, paths, ver_seed + 1, StartMode::per_state, ver_threads);
          std::ofstream out(ver_dump);
          if (!out) throw ModelParseError("cannot open dump file: " + ver_dump);
          dump_killed_csv(ks, out);
        }
      } else if (ver_suite == "independence") {
        long paths = ver_paths > 0 ? ver_paths : 200000;
        ValidatedModel mrevkS = load_model("MODEL-A");
        reports.push_back(suite_independence(m, mrevkS, paths, ver_seed, ver_threads));
      } else if (ver_suite == "rogozin") {
        reports.push_back(suite_rogozin(m, 1.0, ver_seed));
      } else if (ver_suite == "kendall") {
        long paths = ver_paths > 0 ? ver_paths : 1000000;
        reports.push_back(suite_kendall(m, paths, ver_seed, ver_threads));
      } else if (ver_suite == "ballot") {
        long paths = ver_paths > 0 ? ver_paths : 1000000;
        reports.push_back(suite_ballot(m, paths, ver_seed, ver_threads));
      }
      if (ver_tol != 1.0)
        for (auto& r : reports)
          for (auto& c : r.checks) {
            c.threshold *= ver_tol;
            c.pass = c.residual <= c.threshold;
          }
      std::cout << report_to_json(reports) << "\n";
      for (const auto& r : reports)
        if (!r.pass()) return kExitCheckFailed;
      return kExitOk;
    }
  } catch (const DomainViolation& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const ModelParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}
