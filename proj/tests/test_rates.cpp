#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "weinorman/rates.hpp"

using weinorman::RateFunction;

TEST_CASE("constant rate") {
  auto f = RateFunction::constant(1.5);
  CHECK(f(0.0) == 1.5);
  CHECK(f(123.0) == 1.5);
  CHECK(f.breakpoints(0, 100).empty());
  CHECK(f.str() == "constant:1.5");
}

TEST_CASE("exponential rate") {
  auto f = RateFunction::exponential(0.25, 0.5);
  CHECK(f(2.0) == Catch::Approx(0.25 * std::exp(1.0)).epsilon(1e-15));
  CHECK(f.breakpoints(0, 10).empty());
  auto decaying = RateFunction::parse("exp:2,-1");
  CHECK(decaying(3.0) == Catch::Approx(2.0 * std::exp(-3.0)).epsilon(1e-15));
}

TEST_CASE("rational rate") {
  auto f = RateFunction::parse("rational");
  CHECK(f(3.0) == Catch::Approx(0.25).epsilon(1e-15));
  CHECK(f(0.0) == 1.0);
  auto scaled = RateFunction::parse("rational:2.5");
  CHECK(scaled(4.0) == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(scaled.str() == "rational:2.5");
}

TEST_CASE("square wave value and edges") {
  // period 0.2, duty 0.5: high on [0.05, 0.15) within the first period
  auto f = RateFunction::parse("square:0,1,0.2,0.5");
  CHECK(f(0.02) == 0.0);
  CHECK(f(0.07) == 1.0);
  CHECK(f(0.1499) == 1.0);
  CHECK(f(0.16) == 0.0);
  CHECK(f(0.27) == 1.0);

  auto bps = f.breakpoints(0.0, 0.4);
  REQUIRE(bps.size() == 4);
  CHECK(bps[0] == Catch::Approx(0.05).margin(1e-15));
  CHECK(bps[1] == Catch::Approx(0.15).margin(1e-15));
  CHECK(bps[2] == Catch::Approx(0.25).margin(1e-15));
  CHECK(bps[3] == Catch::Approx(0.35).margin(1e-15));

  CHECK(RateFunction::square_wave(0, 1, 1, 0).breakpoints(0, 10).empty());
  CHECK(RateFunction::square_wave(0, 1, 1, 1).breakpoints(0, 10).empty());
  CHECK(RateFunction::square_wave(2, 2, 1, 0.5).breakpoints(0, 10).empty());
}

TEST_CASE("square wave zero spans") {
  auto f = RateFunction::parse("square:0,1,0.2,0.5");
  CHECK(f.is_zero_on(0.16, 0.24));
  CHECK_FALSE(f.is_zero_on(0.1, 0.12));
  CHECK_FALSE(f.is_zero_on(0.0, 0.2));
  CHECK(RateFunction::constant(0.0).is_zero_on(0, 100));
  CHECK_FALSE(RateFunction::parse("square:0.5,1,0.2,0.5").is_zero_on(0.16, 0.24));
}

TEST_CASE("piecewise rate") {
  auto f = RateFunction::parse("piecewise:0,constant:1;2,exp:1,0.1;5,rational");
  CHECK(f(1.0) == 1.0);
  CHECK(f(3.0) == Catch::Approx(std::exp(0.3)).epsilon(1e-15));
  CHECK(f(6.0) == Catch::Approx(1.0 / 7.0).epsilon(1e-15));
  auto bps = f.breakpoints(0.0, 10.0);
  REQUIRE(bps.size() == 2);
  CHECK(bps[0] == 2.0);
  CHECK(bps[1] == 5.0);
  // nested discontinuities surface too
  auto g = RateFunction::parse("piecewise:0,square:0,1,1,0.5;2,constant:0");
  auto gb = g.breakpoints(0.0, 3.0);
  REQUIRE(gb.size() == 5);  // wave edges 0.25, 0.75, 1.25, 1.75 plus the join at 2
  CHECK(gb.back() == 2.0);
}

TEST_CASE("parse rejects malformed and negative specs") {
  CHECK_THROWS_AS(RateFunction::parse("constant:-1"), std::invalid_argument);
  CHECK_THROWS_AS(RateFunction::parse("constant:abc"), std::invalid_argument);
  CHECK_THROWS_AS(RateFunction::parse("exp:1"), std::invalid_argument);
  CHECK_THROWS_AS(RateFunction::parse("square:0,1,0,0.5"), std::invalid_argument);
  CHECK_THROWS_AS(RateFunction::parse("square:0,1,1,1.5"), std::invalid_argument);
  CHECK_THROWS_AS(RateFunction::parse("nonsense"), std::invalid_argument);
  CHECK_THROWS_AS(RateFunction::parse("piecewise:1,constant:1"), std::invalid_argument);
  CHECK_THROWS_AS(RateFunction::piecewise({0.0, 0.0}, {RateFunction::constant(1), RateFunction::constant(2)}),
                  std::invalid_argument);
}

TEST_CASE("textual form round-trips") {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int i = 0; i < 200; ++i) {
    RateFunction f;
    switch (i % 5) {
      case 0: f = RateFunction::constant(u(rng)); break;
      case 1: f = RateFunction::exponential(u(rng), u(rng) - 2.5); break;
      case 2: f = RateFunction::rational(u(rng)); break;
      case 3: f = RateFunction::square_wave(u(rng), u(rng), u(rng), 0.2 * u(rng)); break;
      default:
        f = RateFunction::piecewise({0.0, u(rng)},
                                    {RateFunction::constant(u(rng)), RateFunction::rational(u(rng))});
    }
    auto g = RateFunction::parse(f.str());
    CHECK(g.str() == f.str());
    for (double t : {0.0, 0.3, 1.7, 4.9}) CHECK(g(t) == f(t));
  }
}
