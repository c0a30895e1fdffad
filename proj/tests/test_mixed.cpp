#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "photonloom/mixed.hpp"
#include "photonloom/protocols.hpp"
#include "photonloom/script.hpp"

using namespace photonloom;

namespace {

PureState single(const std::string& mode, Pol pol) {
  PureState s = PureState::zero({});
  s.register_mode(mode);
  s.add_amplitude(FockBasisState::from_occupations({{{mode, pol}, 1}}), Complex{1.0, 0.0});
  return s;
}

}  // namespace

TEST_CASE("ensemble bookkeeping") {
  MixedState m;
  CHECK(m.empty());
  CHECK(m.total_weight() == 0.0);

  m.add_branch(0.25, single("a", Pol::H));
  m.add_branch(0.5, single("a", Pol::V));
  CHECK(m.branches().size() == 2);
  CHECK(std::abs(m.total_weight() - 0.75) < 1e-15);

  REQUIRE_THROWS_AS(m.add_branch(-0.1, single("a", Pol::H)), SimError);
}

TEST_CASE("pure wraps a single unit branch") {
  MixedState m = MixedState::pure(single("a", Pol::H));
  REQUIRE(m.branches().size() == 1);
  CHECK(m.total_weight() == 1.0);
}

TEST_CASE("renormalization") {
  MixedState m;
  m.add_branch(0.2, single("a", Pol::H));
  m.add_branch(0.6, single("a", Pol::V));
  MixedState n = m.renormalized();
  CHECK(std::abs(n.total_weight() - 1.0) < 1e-15);
  CHECK(std::abs(n.branches()[0].weight - 0.25) < 1e-15);

  MixedState z;
  REQUIRE_THROWS_AS(z.renormalized(), ZeroEnsemble);
}

TEST_CASE("circuits act branch by branch") {
  MixedState m;
  m.add_branch(0.5, single("a", Pol::H));
  m.add_branch(0.5, single("a", Pol::V));

  Circuit c = parse_circuit("mode a\ndetect-rail a H 1\n");
  c.stmts.erase(c.stmts.begin());  // mode declaration, rails already exist
  MixedState out = apply_circuit_mixed(m, c);
  REQUIRE(out.branches().size() == 1);
  CHECK(std::abs(out.total_weight() - 0.5) < 1e-15);
  CHECK(std::abs(out.branches()[0].state.norm2() - 1.0) < 1e-15);
}

TEST_CASE("branch weights follow acceptance probabilities") {
  MixedState m = MixedState::pure(single("a", Pol::H));
  Circuit c = parse_circuit("mode a\nhwp a 22.5\nmeasure-diag a\n");
  c.stmts.erase(c.stmts.begin());
  MixedState out = apply_circuit_mixed(m, c);
  REQUIRE(out.branches().size() == 2);
  double p0 = out.branches()[0].weight;
  double p1 = out.branches()[1].weight;
  CHECK(std::abs(p0 + p1 - 1.0) < 1e-12);
  double c8 = std::cos(std::numbers::pi / 8.0);
  CHECK(std::abs(p0 - c8 * c8) < 1e-12);
}

TEST_CASE("target fraction of a two component mixture") {
  MixedState m;
  m.add_branch(0.7, bell_psi_plus("a", "c"));
  m.add_branch(0.3, bell_phi_plus("a", "c"));

  FractionReport r = fraction_of(m, bell_psi_plus("a", "c"));
  CHECK(std::abs(r.gamma - 0.7) < 1e-12);
  CHECK(std::abs(r.residual_weight - 0.3) < 1e-12);
}

TEST_CASE("fraction matching ignores global phase") {
  PureState flipped = bell_psi_plus("a", "c");
  flipped.scale(Complex{-1.0, 0.0});
  MixedState m;
  m.add_branch(2.0, flipped);  // also exercises renormalization

  FractionReport r = fraction_of(m, bell_psi_plus("a", "c"));
  CHECK(std::abs(r.gamma - 1.0) < 1e-12);
}

TEST_CASE("mixed fidelity averages branch fidelities") {
  MixedState m;
  m.add_branch(0.7, bell_psi_plus("a", "c"));
  m.add_branch(0.3, bell_phi_plus("a", "c"));
  CHECK(std::abs(fidelity_mixed(m, bell_psi_plus("a", "c")) - 0.7) < 1e-12);

  MixedState vac = MixedState::pure(PureState::vacuum({{"a", Pol::H}, {"a", Pol::V},
                                                       {"c", Pol::H}, {"c", Pol::V}}));
  CHECK(fidelity_mixed(vac, bell_psi_plus("a", "c")) < 1e-15);
}
