#include <cmath>
#include <string>

#include "catch_amalgamated.hpp"
#include "errors.hpp"
#include "model_syntax.hpp"

using namespace levycouple;

TEST_CASE("presets expand to their definitions", "[model_syntax]") {
  const auto es = parse_model("exp-stable(0.1,0.03)");
  REQUIRE(*es == LevyModelSpec{TruncatedStable{1.5, 0.4, 0.6, 0.03, 0.1}});

  const auto base = parse_model("stable-base");
  const auto& ts = std::get<TruncatedStable>(base->variant);
  REQUIRE(ts.eps_lo == std::ldexp(1.0, -40));
  REQUIRE(ts.eps_hi == 1.0);

  const auto an = parse_model("annulus(3)");
  const auto& a = std::get<SmallJumpAnnulus>(an->variant);
  REQUIRE(a.eps_lo == 0.0625);
  REQUIRE(a.eps_hi == 0.125);
  REQUIRE(*a.base == *base);

  REQUIRE(*parse_model("fig1-gamma") == LevyModelSpec{GammaMartingale{1.0, 1.0}});
  REQUIRE(*parse_model("brownian") == LevyModelSpec{BrownianMotion{}});

  const auto pb = parse_model("perturbed(0.25)");
  const auto& p = std::get<PerturbedBM>(pb->variant);
  REQUIRE(p.eps == 0.25);
  REQUIRE(*p.inner == *es);

  const auto atoms = parse_model("cpp-atoms(4)");
  const auto& c = std::get<CompoundPoissonDrift>(atoms->variant);
  REQUIRE(c.rate == 4.0);
  REQUIRE(c.jumps == JumpLaw{DiscreteJumps{{-1.0, 1.0}, {0.5, 0.5}}});
  REQUIRE(c.standardize);
  REQUIRE_FALSE(std::get<CompoundPoissonDrift>(parse_model("cpp-raw(2,normal(0,1))")->variant).standardize);

  REQUIRE(parse_model("jitter(brownian,1e-12)")->jitter_variance == 1e-12);
  REQUIRE(std::get<TruncatedStable>(parse_model("exp-stable(2^-3, 2^-4)")->variant).eps_lo == 0.0625);
}

TEST_CASE("format and parse round trip", "[model_syntax]") {
  for (const char* text : {"exp-stable(0.1,0.03)", "truncated-stable(1.2,1,0,0.001,0.5)", "annulus(5)",
                           "perturbed(0.3,gamma(2,0.5))", "cpp(3,uniform(-1,2))", "cpp-raw(1,exponential(2))",
                           "cpp(2,discrete(-1,0.25,0,0.25,3,0.5))", "brownian", "jitter(cpp-atoms(2),1e-12)",
                           "small-jumps(gamma(1,1),0.01,1)"}) {
    INFO(text);
    const auto spec = parse_model(text);
    const std::string s = format_model(*spec);
    REQUIRE(*parse_model(s) == *spec);
    REQUIRE(format_model(*parse_model(s)) == s);
  }
  REQUIRE(format_number(0.1) == "0.1");
}

TEST_CASE("malformed model text is a config error", "[model_syntax]") {
  for (const char* text : {"", "unknown", "exp-stable(0.1)", "exp-stable(0.1,0.03", "gamma(1,x)",
                           "cpp(1,cauchy(0,1))", "annulus()", "brownian(1)", "exp-stable(0.1,0.03) junk"}) {
    INFO(text);
    REQUIRE_THROWS_AS(parse_model(text), ConfigError);
  }
}
