#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "photonloom/fock.hpp"

using namespace photonloom;

namespace {

FockBasisState basis(std::initializer_list<std::pair<RailId, int>> occ) {
  return FockBasisState::from_occupations(occ);
}

PureState two_mode(int cap = kDefaultPhotonCap) {
  PureState s = PureState::zero({}, cap);
  s.register_mode("1");
  s.register_mode("2");
  return s;
}

}  // namespace

TEST_CASE("basis states canonicalize and label deterministically") {
  FockBasisState a = basis({{{"11", Pol::V}, 1}, {{"10", Pol::H}, 1}});
  FockBasisState b = basis({{{"10", Pol::H}, 1}, {{"11", Pol::V}, 1}});
  REQUIRE(a == b);
  REQUIRE(a.label() == "10.H 11.V");
  REQUIRE(basis({{{"5", Pol::H}, 2}}).label() == "5.H^2");
  REQUIRE(basis({}).label() == "-");
}

TEST_CASE("basis state occupancy queries") {
  FockBasisState f = basis({{{"1", Pol::H}, 2}, {{"1", Pol::V}, 1}, {{"2", Pol::H}, 1}});
  REQUIRE(f.count({"1", Pol::H}) == 2);
  REQUIRE(f.count({"2", Pol::V}) == 0);
  REQUIRE(f.mode_total("1") == 3);
  REQUIRE(f.total_photons() == 4);
  REQUIRE(f.adding({"2", Pol::V}, 1).total_photons() == 5);
  REQUIRE(f.without_rail({"1", Pol::H}).mode_total("1") == 1);
  REQUIRE(f.without_mode("1").total_photons() == 1);
}

TEST_CASE("basis state construction rejects bad occupations") {
  REQUIRE_THROWS_AS(basis({{{"1", Pol::H}, 1}, {{"1", Pol::H}, 1}}), DuplicateRail);
  REQUIRE_THROWS_AS(basis({{{"1", Pol::H}, -1}}), SimError);
}

TEST_CASE("amplitudes require registered rails and respect the photon cap") {
  PureState s = two_mode(3);
  REQUIRE_THROWS_AS(s.add_amplitude(basis({{{"9", Pol::H}, 1}}), Complex{1.0, 0.0}),
                    UnknownRail);
  REQUIRE_THROWS_AS(s.add_amplitude(basis({{{"1", Pol::H}, 4}}), Complex{1.0, 0.0}),
                    PhotonCapExceeded);
  s.add_amplitude(basis({{{"1", Pol::H}, 3}}), Complex{1.0, 0.0});
  REQUIRE(s.norm2() == 1.0);
}

TEST_CASE("prune drops amplitudes below tolerance") {
  PureState s = two_mode();
  s.add_amplitude(basis({{{"1", Pol::H}, 1}}), Complex{1e-15, 0.0});
  s.add_amplitude(basis({{{"1", Pol::V}, 1}}), Complex{0.5, 0.0});
  s.prune();
  REQUIRE(s.terms().size() == 1);
  REQUIRE(s.amplitude(basis({{{"1", Pol::V}, 1}})) == Complex{0.5, 0.0});
}

TEST_CASE("tensor multiplies amplitudes and merges registries") {
  PureState a = PureState::zero({{"1", Pol::H}, {"1", Pol::V}});
  a.add_amplitude(basis({{{"1", Pol::H}, 1}}), Complex{0.6, 0.0});
  PureState b = PureState::zero({{"2", Pol::H}, {"2", Pol::V}});
  b.add_amplitude(basis({{{"2", Pol::V}, 1}}), Complex{0.0, 0.8});
  PureState t = tensor(a, b);
  REQUIRE(t.registry().size() == 4);
  Complex amp = t.amplitude(basis({{{"1", Pol::H}, 1}, {{"2", Pol::V}, 1}}));
  REQUIRE(std::abs(amp - Complex{0.0, 0.48}) < 1e-15);
  REQUIRE_THROWS_AS(tensor(a, a), OverlappingRegistries);
}

TEST_CASE("inner product is conjugate linear in the first argument") {
  PureState a = two_mode();
  a.add_amplitude(basis({{{"1", Pol::H}, 1}}), Complex{0.0, 0.5});
  PureState b = two_mode();
  b.add_amplitude(basis({{{"1", Pol::H}, 1}}), Complex{1.0, 0.0});
  REQUIRE(std::abs(inner_product(a, b) - Complex{0.0, -0.5}) < 1e-15);
  REQUIRE(std::abs(inner_product(b, a) - Complex{0.0, 0.5}) < 1e-15);

  PureState other = PureState::zero({{"9", Pol::H}});
  REQUIRE_THROWS_AS(inner_product(a, other), RegistryMismatch);
}

TEST_CASE("normalized splits norm from direction") {
  PureState s = two_mode();
  s.add_amplitude(basis({{{"1", Pol::H}, 1}}), Complex{0.3, 0.0});
  s.add_amplitude(basis({{{"1", Pol::V}, 1}}), Complex{0.4, 0.0});
  auto [unit, norm] = normalized(s);
  REQUIRE(std::abs(norm - 0.5) < 1e-15);
  REQUIRE(std::abs(unit.norm2() - 1.0) < 1e-15);

  REQUIRE_THROWS_AS(normalized(two_mode()), ZeroState);
}

TEST_CASE("pure fidelity is a ray quantity") {
  PureState h = two_mode();
  h.add_amplitude(basis({{{"1", Pol::H}, 1}}), Complex{1.0, 0.0});
  PureState bell = two_mode();
  const double r = std::numbers::sqrt2 / 2.0;
  bell.add_amplitude(basis({{{"1", Pol::H}, 1}}), Complex{r, 0.0});
  bell.add_amplitude(basis({{{"1", Pol::V}, 1}}), Complex{r, 0.0});
  REQUIRE(std::abs(fidelity_pure(h, bell) - 0.5) < 1e-12);

  PureState flipped = bell;
  flipped.scale(Complex{0.0, -2.0});  // global phase and scale do not matter
  REQUIRE(std::abs(fidelity_pure(flipped, bell) - 1.0) < 1e-12);
}

TEST_CASE("max_total_photons tracks the heaviest term") {
  PureState s = two_mode();
  REQUIRE(s.max_total_photons() == 0);
  s.add_amplitude(basis({{{"1", Pol::H}, 2}, {{"2", Pol::H}, 1}}), Complex{0.1, 0.0});
  s.add_amplitude(basis({{{"2", Pol::V}, 1}}), Complex{0.9, 0.0});
  REQUIRE(s.max_total_photons() == 3);
}
