#include <doctest.h>

#include <vector>

#include "bsl/model.hpp"

using namespace bsl;

TEST_CASE("trajectory encoding") {
  const std::vector<int> one{1};
  const Trajectory t = Trajectory::encode(one, 2);
  CHECK(t.code() == 1);
  CHECK(t.horizon() == 0);

  const std::vector<int> seq{0, 1, 1};
  const Trajectory u = Trajectory::encode(seq, 2);
  CHECK(u.decode() == seq);
  CHECK(u.prefix(1).decode() == std::vector<int>{0, 1});
  CHECK(u.code() < 8);

  // every sequence of length 4 over a ternary alphabet
  for (std::uint64_t c = 0; c < 81; ++c) {
    const Trajectory v(3, 3, c);
    CHECK(Trajectory::encode(v.decode(), 3).code() == c);
    for (int h = 0; h <= 3; ++h) {
      const auto full = v.decode();
      CHECK(v.prefix(h).decode() == std::vector<int>(full.begin(), full.begin() + h + 1));
    }
  }
  CHECK_THROWS_AS(Trajectory(1, 2, 4), ConfigError);
  const std::vector<int> bad{0, 2};
  CHECK_THROWS_AS(Trajectory::encode(bad, 2), ConfigError);
}

TEST_CASE("map_decision") {
  const auto u = UtilityTable::identity(2);
  const std::vector<double> strict{0.7, 0.3};
  CHECK(map_decision(strict, u, {}, 1, 2) == ActionKernel{1.0, 0.0});

  const std::vector<double> even{0.5, 0.5};
  CHECK(map_decision(even, u, {TieBreak::OwnSignal, {}}, 1, 2) == ActionKernel{0.0, 1.0});
  CHECK(map_decision(even, u, {TieBreak::OwnSignal, {}}, 0, 2) == ActionKernel{1.0, 0.0});
  CHECK(map_decision(even, u, {TieBreak::UniformRandom, {}}, 1, 2) == ActionKernel{0.5, 0.5});
  CHECK(map_decision(even, u, {TieBreak::LowestIndex, {}}, 1, 2) == ActionKernel{1.0, 0.0});

  // differences below the tie tolerance count as ties
  const std::vector<double> near{0.5 + 1e-14, 0.5 - 1e-14};
  CHECK(map_decision(near, u, {TieBreak::OwnSignal, {}}, 1, 2) == ActionKernel{0.0, 1.0});
}

TEST_CASE("signal_posterior") {
  const auto p = signal_posterior(SignalModel::binary_symmetric(0.15), 0);
  CHECK(p[0] == doctest::Approx(0.85).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.15).epsilon(1e-15));

  const auto q = signal_posterior(SignalModel::binary_symmetric(0.0), 0);
  CHECK(q[0] == 1.0);
  CHECK(q[1] == 0.0);

  const SignalModel skew({0.9, 0.1}, {{0.85, 0.15}, {0.15, 0.85}});
  const auto r = signal_posterior(skew, 1);
  const double a = 0.9 * 0.15, b = 0.1 * 0.85;
  CHECK(r[0] == doctest::Approx(a / (a + b)).epsilon(1e-14));
  CHECK(r[0] == doctest::Approx(0.6136).epsilon(1e-4));
}

TEST_CASE("signal model validation") {
  CHECK_THROWS_AS(SignalModel({0.6, 0.6}, {{0.5, 0.5}, {0.1, 0.9}}), ConfigError);
  CHECK_THROWS_AS(SignalModel({0.5, 0.5}, {{0.5, 0.6}, {0.1, 0.9}}), ConfigError);
  // identical rows carry no information
  CHECK_THROWS_AS(SignalModel({0.5, 0.5}, {{0.3, 0.7}, {0.3, 0.7}}), ConfigError);
  CHECK_NOTHROW(SignalModel({0.5, 0.5}, {{0.3, 0.7}, {0.7, 0.3}}));
}

TEST_CASE("rule and tie-break names") {
  CHECK(parse_rule("bayesian") == RuleKind::Bayesian);
  CHECK(parse_rule("majority") == RuleKind::Majority);
  CHECK_THROWS_AS(parse_rule("median"), ConfigError);
  for (auto v : {TieBreak::OwnSignal, TieBreak::LowestIndex, TieBreak::UniformRandom})
    CHECK(parse_tie_break(to_string(v)) == v);
}

TEST_CASE("plurality vote") {
  const TieBreakRule coin{TieBreak::UniformRandom, {}};
  const std::vector<Action> votes{1, 1, 0};
  CHECK(plurality_vote(votes, 2, coin, 0, 2) == ActionKernel{0.0, 1.0});
  const std::vector<Action> split{1, 0};
  CHECK(plurality_vote(split, 2, coin, 0, 2) == ActionKernel{0.5, 0.5});
  CHECK(plurality_vote({}, 2, coin, 0, 2).empty());
}
