#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "photonloom/oracle.hpp"
#include "photonloom/script.hpp"
#include "photonloom/verify.hpp"

using namespace photonloom;

TEST_CASE("permanents of small matrices") {
  CHECK(dense::permanent({}) == Complex{1.0, 0.0});
  CHECK(dense::permanent({{{2.0, 0.0}}}) == Complex{2.0, 0.0});

  std::vector<std::vector<Complex>> m{{{1, 0}, {2, 0}}, {{3, 0}, {4, 0}}};
  CHECK(dense::permanent(m) == Complex{10.0, 0.0});

  std::vector<std::vector<Complex>> ones(3, std::vector<Complex>(3, {1.0, 0.0}));
  CHECK(dense::permanent(ones) == Complex{6.0, 0.0});

  std::vector<std::vector<Complex>> im{{{0, 1}, {0, 1}}, {{0, 1}, {0, -1}}};
  CHECK(std::abs(dense::permanent(im) - Complex{0.0, 0.0}) < 1e-15);
}

TEST_CASE("transition amplitudes through a balanced splitter") {
  const double s = std::sqrt(0.5);
  std::vector<std::vector<Complex>> m{{{s, 0}, {s, 0}}, {{s, 0}, {-s, 0}}};

  Complex bunch = dense::transition(m, {1, 1}, {2, 0});
  CHECK(std::abs(bunch - Complex{s, 0.0}) < 1e-15);
  Complex anti = dense::transition(m, {1, 1}, {0, 2});
  CHECK(std::abs(anti + Complex{s, 0.0}) < 1e-15);
  CHECK(dense::transition(m, {1, 1}, {1, 1}) == Complex{0.0, 0.0});
  CHECK(dense::transition(m, {1, 0}, {2, 0}) == Complex{0.0, 0.0});
}

TEST_CASE("photon number compositions") {
  std::vector<std::vector<int>> out;
  dense::compositions(2, 2, out);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == std::vector<int>{0, 2});
  CHECK(out[2] == std::vector<int>{2, 0});
}

TEST_CASE("dense elements are unitary on each photon sector") {
  CHECK(dense_element_unitary(make_waveplate("m", 30.0), 3) < 1e-12);
  CHECK(dense_element_unitary(make_pbs("a", "b", "a", "b"), 3) < 1e-12);
  CHECK(dense_element_unitary(make_beamsplitter("a", "b", "a", "b", 0.25), 3) < 1e-12);
}

TEST_CASE("dense run agrees with the sparse engine") {
  Circuit c = parse_circuit(
      "mode a b\n"
      "pair a b 0.6 0.8\n"
      "hwp a 22.5\n"
      "bs a b a b 0.25\n"
      "pbs a b a b\n");
  auto branches = run_circuit(PureState::vacuum({}), c);
  REQUIRE(branches.size() == 1);
  CHECK(compare_states(dense_run(c), branches[0].state) < 1e-12);
}

TEST_CASE("dense run tracks detections") {
  Circuit c = parse_circuit(
      "mode m a\n"
      "source m H 2\n"
      "source a H 1\n"
      "bs m a m a 0.5\n"
      "detect a 1\n");
  auto branches = run_circuit(PureState::vacuum({}), c);
  REQUIRE(branches.size() == 1);
  CHECK(compare_states(dense_run(c), branches[0].state) < 1e-12);
}

TEST_CASE("dense and sparse agree on the concentration chain") {
  CHECK(concentration_oracle_diff({0.6, 0.0}, {0.8, 0.0}) < 1e-10);
}

TEST_CASE("comparison is insensitive to global phase") {
  Circuit c = parse_circuit("mode a\nsource a H 1\nhwp a 45\n");
  auto branches = run_circuit(PureState::vacuum({}), c);
  PureState rotated = branches[0].state;
  rotated.scale(Complex{0.0, 1.0});
  CHECK(compare_states(dense_run(c), rotated) < 1e-12);
}

TEST_CASE("comparison requires matching rails") {
  Circuit ca = parse_circuit("mode a\nsource a H 1\n");
  Circuit cb = parse_circuit("mode b\nsource b H 1\n");
  auto sb = run_circuit(PureState::vacuum({}), cb);
  REQUIRE_THROWS_AS(compare_states(dense_run(ca), sb[0].state), RailSetMismatch);
}

TEST_CASE("basis growth is guarded") {
  std::string src = "mode";
  for (int i = 0; i < 30; ++i) src += " m" + std::to_string(i);
  src += "\nsource m0 H 8\n";
  REQUIRE_THROWS_AS(dense_run(parse_circuit(src)), BasisOverflow);
}

TEST_CASE("both engines reject ambiguous mode detections") {
  Circuit c = parse_circuit("mode a\nsource a H 1\nhwp a 45\ndetect a 1\n");
  REQUIRE_THROWS_AS(dense_run(c), AmbiguousDetection);
  REQUIRE_THROWS_AS(run_circuit(PureState::vacuum({}), c), AmbiguousDetection);
}

TEST_CASE("the dense engine has no diagonal measurement") {
  Circuit c = parse_circuit("mode a\nsource a H 1\nmeasure-diag a\n");
  REQUIRE_THROWS_WITH(dense_run(c), Catch::Matchers::ContainsSubstring("diagonal"));
}

TEST_CASE("element sweep stays unitary") {
  CHECK(element_unitarity_worst(3) < 1e-12);
}

TEST_CASE("random circuits agree between the engines") {
  VerifySummary s = run_random_verification(20, 12345);
  CHECK(s.trials == 20);
  CHECK(s.max_diff < 1e-10);
}
