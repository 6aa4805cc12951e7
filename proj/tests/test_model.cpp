#include <doctest.h>

#include "mapfluct/model.hpp"
#include "mapfluct/model_io.hpp"

using namespace mapfluct;

namespace {

MapSpec scalar_bm() {
  MapSpec s;
  s.n_states = 1;
  s.Q = Matrix::Zero(1, 1);
  s.levy = {LevyComponent{0.0, 1.0, {}}};
  s.trans_jump = {JumpLaw::degenerate(0.0)};
  s.spectrally_negative = true;
  return s;
}

bool has_issue(const ValidationResult& r, ValidationError e) {
  auto* issues = std::get_if<std::vector<ValidationIssue>>(&r);
  if (!issues) return false;
  for (const auto& iss : *issues)
    if (iss.code == e) return true;
  return false;
}

}  // namespace

TEST_CASE("jump law transforms and domains") {
  JumpLaw neg = JumpLaw::exponential(3.0, -1);
  CHECK(neg.transform(1.0).real() == doctest::Approx(3.0 / 4.0));
  CHECK(neg.nonpositive_support());
  CHECK(neg.mean() == doctest::Approx(-1.0 / 3.0));
  CHECK_THROWS_AS(neg.transform(-3.5), DomainViolation);

  JumpLaw pos = JumpLaw::exponential(3.0, +1);
  CHECK(pos.transform(1.0).real() == doctest::Approx(1.5));
  CHECK_FALSE(pos.nonpositive_support());
  CHECK_THROWS_AS(pos.transform(3.0), DomainViolation);

  JumpLaw mix = JumpLaw::mixture({0.25, 0.75}, {1.0, 2.0}, -1);
  CHECK(mix.mean() == doctest::Approx(-(0.25 / 1.0 + 0.75 / 2.0)));
  CHECK(mix.transform(0.0).real() == doctest::Approx(1.0));

  JumpLaw deg = JumpLaw::degenerate(-0.7);
  CHECK(deg.transform(2.0).real() == doctest::Approx(std::exp(-1.4)));
  CHECK(deg.nonpositive_support());

  CHECK(JumpLaw::mixture({0.5, 0.6}, {1.0, 2.0}, -1).check() != "");
  CHECK(JumpLaw::exponential(-1.0, -1).check() != "");
}

TEST_CASE("validate accepts the scalar Brownian model") {
  auto r = validate(scalar_bm());
  REQUIRE(std::holds_alternative<ValidatedModel>(r));
  auto m = std::get<ValidatedModel>(r);
  CHECK(m.n_states() == 1);
  CHECK(m.stationary()(0) == doctest::Approx(1.0));
}

TEST_CASE("validate accepts MODEL-A and rejects broken variants") {
  MapSpec a = builtin("MODEL-A");
  CHECK(std::holds_alternative<ValidatedModel>(validate(a)));

  SUBCASE("positive jump under the spectrally negative flag") {
    MapSpec bad = a;
    bad.levy[0].jumps = {{1.0, JumpLaw::exponential(3.0, +1)}};
    CHECK(has_issue(validate(bad), ValidationError::PositiveJumpInSpectrallyNegative));
  }
  SUBCASE("row sums") {
    MapSpec bad = a;
    bad.Q(0, 0) = -1.5;
    CHECK(has_issue(validate(bad), ValidationError::RowSumViolation));
  }
  SUBCASE("negative off-diagonal") {
    MapSpec bad = a;
    bad.Q(0, 1) = -1.0;
    bad.Q(0, 0) = 1.0;
    CHECK(has_issue(validate(bad), ValidationError::NegativeOffDiagonal));
  }
  SUBCASE("reducible chain") {
    MapSpec bad = a;
    bad.Q = Matrix{{0.0, 0.0}, {2.0, -2.0}};
    CHECK(has_issue(validate(bad), ValidationError::Reducible));
  }
  SUBCASE("compound Poisson component") {
    MapSpec bad = a;
    bad.levy[0] = LevyComponent{0.0, 0.0, {{1.0, JumpLaw::exponential(1.0, -1)}}};
    CHECK(has_issue(validate(bad), ValidationError::DegenerateComponent));
  }
  SUBCASE("downward subordinator component") {
    MapSpec bad = a;
    bad.spectrally_negative = true;
    bad.levy[0] = LevyComponent{-1.0, 0.0, {{1.0, JumpLaw::exponential(1.0, -1)}}};
    CHECK(has_issue(validate(bad), ValidationError::DegenerateComponent));
  }
}

TEST_CASE("stationary distribution") {
  auto mA = validate_or_throw(builtin("MODEL-A"));
  CHECK(mA.stationary()(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(mA.stationary()(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK((mA.stationary().transpose() * mA.Q()).cwiseAbs().maxCoeff() < 1e-10);

  // invariant under time rescaling
  MapSpec scaled = builtin("MODEL-A");
  scaled.Q *= 7.5;
  auto ms = validate_or_throw(scaled);
  CHECK((ms.stationary() - mA.stationary()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("builtins") {
  for (const char* name : {"MODEL-A", "MODEL-B", "MODEL-C", "MODEL-D"})
    CHECK(std::holds_alternative<ValidatedModel>(validate(builtin(name))));

  MapSpec c = builtin("MODEL-C");
  CHECK(c.levy[0].drift == 2.0);
  CHECK(c.levy[1].drift == 2.0);
  CHECK(c.levy[0].sigma2 == 0.0);
  CHECK(c.levy[0].jumps.at(0).law.nonpositive_support());
  CHECK(c.levy[1].jumps.at(0).rate == 3.0);

  CHECK_FALSE(builtin("MODEL-D").spectrally_negative);
  CHECK_THROWS_AS(builtin("MODEL-X"), std::invalid_argument);
}

TEST_CASE("reversed spec") {
  auto mA = validate_or_throw(builtin("MODEL-A"));
  auto rev = reversed_spec(mA);
  REQUIRE(rev.has_value());
  // MODEL-A satisfies detailed balance, so the reversal has the same generator
  CHECK((rev->Q - mA.Q()).cwiseAbs().maxCoeff() < 1e-12);

  // per-state transition laws that differ block representation
  MapSpec odd = builtin("MODEL-A");
  odd.spectrally_negative = true;
  odd.trans_jump = {JumpLaw::degenerate(-0.5), JumpLaw::degenerate(-0.25)};
  auto r2 = reversed_spec(validate_or_throw(odd));
  CHECK_FALSE(r2.has_value());
}

TEST_CASE("model JSON round trip and strict parsing") {
  MapSpec c = builtin("MODEL-C");
  std::string text = model_to_json(c);
  MapSpec back = parse_model_json(text);
  CHECK(back.n_states == c.n_states);
  CHECK((back.Q - c.Q).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.levy[1].jumps.at(0).rate == 3.0);
  CHECK(back.spectrally_negative == c.spectrally_negative);

  CHECK_THROWS_WITH_AS(parse_model_json(R"({"n_states":1,"bogus":2})"),
                       doctest::Contains("$.bogus"), ModelParseError);
  CHECK_THROWS_WITH_AS(parse_model_json(R"({"n_states":1})"), doctest::Contains("$.Q"),
                       ModelParseError);
  CHECK_THROWS_AS(parse_model_json("not json"), ModelParseError);
  std::string bad_law = R"({"n_states":1,"Q":[[0]],"states":[{"drift":0,"sigma2":1,
    "jumps":[{"rate":1,"law":{"family":"cauchy","params":{}}}]}],
    "trans_jumps":[{"family":"degenerate","params":{"c":0}}],"spectrally_negative":true})";
  CHECK_THROWS_WITH_AS(parse_model_json(bad_law), doctest::Contains("family"), ModelParseError);
}
