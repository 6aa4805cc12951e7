// Acceptance harness: runs every acceptance criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance --criterion K [--paths-scale S]
//
// Exit code 0 iff every executed criterion passed.
#include <cstring>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "mapfluct/suites.hpp"

using namespace mapfluct;

namespace {

constexpr std::uint64_t kSeed = 20240901ULL;

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::vector<std::string> lines;
};

void collect(CriterionResult& cr, const SuiteReport& rep,
             const std::vector<std::string>& name_filter = {}) {
  for (const auto& c : rep.checks) {
    bool keep = name_filter.empty();
    for (const auto& f : name_filter)
      if (c.name.rfind(f, 0) == 0) keep = true;
    if (!keep) continue;
    std::ostringstream os;
    os << "  " << (c.pass ? "ok  " : "FAIL") << " " << c.name << ": residual " << std::scientific
       << std::setprecision(3) << c.residual << " vs threshold " << c.threshold;
    if (!c.note.empty()) os << "  [" << c.note << "]";
    cr.lines.push_back(os.str());
    cr.pass = cr.pass && c.pass;
  }
}

CriterionResult criterion1() {
  CriterionResult cr{1, "scalar reductions of the Wiener-Hopf factors", true, {}};
  collect(cr, suite_scalar_reduction());
  return cr;
}

CriterionResult criterion2() {
  CriterionResult cr{2, "structure suite (analytic invariants)", true, {}};
  auto mA = validate_or_throw(builtin("MODEL-A"));
  collect(cr, suite_structure(mA, kSeed));
  auto mD = validate_or_throw(builtin("MODEL-D"));
  CheckResult dc = check_distinct_eigs(mD, {0.3, 0.7, 1.1});
  std::ostringstream os;
  os << "  " << (dc.pass ? "ok  " : "FAIL") << " " << dc.name << ": min gap " << std::scientific
     << std::setprecision(3) << dc.residual << " (needs > " << dc.threshold << ")";
  cr.lines.push_back(os.str());
  cr.pass = cr.pass && dc.pass;
  return cr;
}

SuiteReport& wh_report(long paths_scale) {
  static SuiteReport rep = [] {
    auto mA = validate_or_throw(builtin("MODEL-A"));
    return suite_wh(mA, 1.0, 100000, kSeed);
  }();
  (void)paths_scale;
  return rep;
}

CriterionResult criterion3() {
  CriterionResult cr{3, "up-crossing and sup factor vs Monte Carlo (MODEL-A)", true, {}};
  collect(cr, wh_report(1), {"up-crossing-vs-mc", "sup-factor-vs-mc"});
  return cr;
}

CriterionResult criterion4() {
  CriterionResult cr{4, "inf factor vs Monte Carlo + analytic key identity (MODEL-A)", true, {}};
  collect(cr, wh_report(1), {"inf-factor-vs-mc", "key-identity-analytic"});
  return cr;
}

SuiteReport& independence_report() {
  static SuiteReport rep = [] {
    auto mD = validate_or_throw(builtin("MODEL-D"));
    auto mA = validate_or_throw(builtin("MODEL-A"));
    return suite_independence(mD, mA, 200000, kSeed);
  }();
  return rep;
}

CriterionResult criterion5() {
  CriterionResult cr{5, "general-MAP factorization product (MODEL-D)", true, {}};
  collect(cr, independence_report(), {"th1i-product"});
  return cr;
}

CriterionResult criterion6() {
  CriterionResult cr{6, "Spitzer-Rogozin quadrature factor (MODEL-B)", true, {}};
  auto mB = validate_or_throw(builtin("MODEL-B"));
  collect(cr, suite_rogozin(mB, 1.0, kSeed));
  return cr;
}

CriterionResult criterion7(long paths) {
  CriterionResult cr{7, "Kendall and ballot identities (MODEL-A / MODEL-C)", true, {}};
  auto mA = validate_or_throw(builtin("MODEL-A"));
  collect(cr, suite_kendall(mA, paths, kSeed));
  auto mC = validate_or_throw(builtin("MODEL-C"));
  collect(cr, suite_ballot(mC, paths, kSeed));
  return cr;
}

CriterionResult criterion8() {
  CriterionResult cr{8, "time-reversal law identity (two-sample KS)", true, {}};
  collect(cr, independence_report(), {"ks-reversal"});
  return cr;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  long paths7 = 1000000;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) only = std::atoi(argv[++i]);
    if (!std::strcmp(argv[i], "--paths-scale") && i + 1 < argc)
      paths7 = static_cast<long>(1000000 * std::atof(argv[++i]));
  }

  std::vector<CriterionResult> results;
  auto want = [&](int k) { return only == 0 || only == k; };
  if (want(1)) results.push_back(criterion1());
  if (want(2)) results.push_back(criterion2());
  if (want(3)) results.push_back(criterion3());
  if (want(4)) results.push_back(criterion4());
  if (want(5)) results.push_back(criterion5());
  if (want(6)) results.push_back(criterion6());
  if (want(7)) results.push_back(criterion7(paths7));
  if (want(8)) results.push_back(criterion8());

  bool all = true;
  for (const auto& cr : results) {
    std::cout << "ACCEPTANCE " << cr.id << " [" << (cr.pass ? "PASS" : "FAIL") << "] " << cr.name
              << "\n";
    for (const auto& l : cr.lines) std::cout << l << "\n";
    all = all && cr.pass;
  }
  std::cout << (all ? "ALL ACCEPTANCE CRITERIA PASSED" : "ACCEPTANCE FAILURES PRESENT") << "\n";
  return all ? 0 : 1;
}
