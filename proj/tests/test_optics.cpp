#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "photonloom/optics.hpp"

using namespace photonloom;

namespace {

constexpr double kR2 = 0.70710678118654752;

FockBasisState basis(std::initializer_list<std::pair<RailId, int>> occ) {
  return FockBasisState::from_occupations(occ);
}

PureState state_on(std::initializer_list<std::string> modes) {
  PureState s = PureState::zero({});
  for (const auto& m : modes) s.register_mode(m);
  return s;
}

PureState single(const std::string& mode, Pol pol) {
  PureState s = state_on({mode});
  s.add_amplitude(basis({{{mode, pol}, 1}}), Complex{1.0, 0.0});
  return s;
}

Complex amp(const PureState& s, std::initializer_list<std::pair<RailId, int>> occ) {
  return s.amplitude(FockBasisState::from_occupations(occ));
}

}  // namespace

TEST_CASE("waveplate at 45 degrees maps H and V to the diagonal basis") {
  Element wp = make_waveplate("1", 45.0);
  PureState h = apply_element(single("1", Pol::H), wp);
  CHECK(std::abs(amp(h, {{{"1", Pol::H}, 1}}) - Complex{kR2, 0.0}) < 1e-12);
  CHECK(std::abs(amp(h, {{{"1", Pol::V}, 1}}) - Complex{kR2, 0.0}) < 1e-12);

  PureState v = apply_element(single("1", Pol::V), wp);
  CHECK(std::abs(amp(v, {{{"1", Pol::H}, 1}}) - Complex{kR2, 0.0}) < 1e-12);
  CHECK(std::abs(amp(v, {{{"1", Pol::V}, 1}}) - Complex{-kR2, 0.0}) < 1e-12);
}

TEST_CASE("waveplate at 0 flips the V sign, at 90 swaps H and V") {
  PureState v = apply_element(single("1", Pol::V), make_waveplate("1", 0.0));
  CHECK(amp(v, {{{"1", Pol::V}, 1}}) == Complex{-1.0, 0.0});

  PureState h = apply_element(single("1", Pol::H), make_waveplate("1", 90.0));
  CHECK(std::abs(amp(h, {{{"1", Pol::V}, 1}}) - Complex{1.0, 0.0}) < 1e-12);
  CHECK(std::abs(amp(h, {{{"1", Pol::H}, 1}})) < 1e-12);
}

TEST_CASE("beam splitter convention at T=1/4") {
  PureState in = single("1", Pol::H);
  in.register_mode("2");
  PureState out = apply_element(in, make_beamsplitter("1", "2", "1", "2", 0.25));
  CHECK(std::abs(amp(out, {{{"1", Pol::H}, 1}}) - Complex{0.5, 0.0}) < 1e-12);
  CHECK(std::abs(amp(out, {{{"2", Pol::H}, 1}}) - Complex{std::sqrt(3.0) / 2.0, 0.0}) < 1e-12);
}

TEST_CASE("beam splitter second input picks up the minus sign") {
  PureState in = single("2", Pol::V);
  in.register_mode("1");
  PureState out = apply_element(in, make_beamsplitter("1", "2", "1", "2", 0.25));
  CHECK(std::abs(amp(out, {{{"1", Pol::V}, 1}}) - Complex{std::sqrt(3.0) / 2.0, 0.0}) < 1e-12);
  CHECK(std::abs(amp(out, {{{"2", Pol::V}, 1}}) - Complex{-0.5, 0.0}) < 1e-12);
}

TEST_CASE("two photons bunch on a symmetric beam splitter") {
  PureState in = state_on({"1", "2"});
  in.add_amplitude(basis({{{"1", Pol::H}, 1}, {{"2", Pol::H}, 1}}), Complex{1.0, 0.0});
  PureState out = apply_element(in, make_beamsplitter("1", "2", "1", "2", 0.5));
  CHECK(std::abs(amp(out, {{{"1", Pol::H}, 2}}) - Complex{kR2, 0.0}) < 1e-12);
  CHECK(std::abs(amp(out, {{{"2", Pol::H}, 2}}) - Complex{-kR2, 0.0}) < 1e-12);
  CHECK(std::abs(amp(out, {{{"1", Pol::H}, 1}, {{"2", Pol::H}, 1}})) < 1e-14);

  // running the bunched pair back through unbunches it deterministically
  PureState back = apply_element(out, make_beamsplitter("1", "2", "1", "2", 0.5));
  CHECK(std::abs(amp(back, {{{"1", Pol::H}, 1}, {{"2", Pol::H}, 1}}) - Complex{1.0, 0.0}) <
        1e-12);
  CHECK(back.terms().size() == 1);
}

TEST_CASE("stimulated emission factor on a doubly occupied input") {
  PureState in = state_on({"1", "2"});
  in.add_amplitude(basis({{{"1", Pol::H}, 2}}), Complex{1.0, 0.0});
  PureState out = apply_element(in, make_beamsplitter("1", "2", "1", "2", 0.5));
  CHECK(std::abs(amp(out, {{{"1", Pol::H}, 2}}) - Complex{0.5, 0.0}) < 1e-12);
  CHECK(std::abs(amp(out, {{{"1", Pol::H}, 1}, {{"2", Pol::H}, 1}}) - Complex{kR2, 0.0}) <
        1e-12);
  CHECK(std::abs(amp(out, {{{"2", Pol::H}, 2}}) - Complex{0.5, 0.0}) < 1e-12);
}

TEST_CASE("polarizing splitter transmits H and exchanges V") {
  PureState in = state_on({"1", "2"});
  in.add_amplitude(basis({{{"1", Pol::H}, 1}, {{"1", Pol::V}, 1}}), Complex{1.0, 0.0});
  PureState out = apply_element(in, make_pbs("1", "2", "1", "2"));
  CHECK(std::abs(amp(out, {{{"1", Pol::H}, 1}, {{"2", Pol::V}, 1}}) - Complex{1.0, 0.0}) <
        1e-15);
  CHECK(out.terms().size() == 1);
}

TEST_CASE("relabel moves a mode without touching amplitudes") {
  PureState in = single("1", Pol::V);
  in.register_mode("9");
  PureState out = apply_element(in, make_relabel("1", "9"));
  CHECK(amp(out, {{{"9", Pol::V}, 1}}) == Complex{1.0, 0.0});
  CHECK_FALSE(out.registry().count({"1", Pol::H}));
  CHECK(out.registry().count({"9", Pol::H}));
}

TEST_CASE("elements preserve norm and photon number") {
  PureState in = state_on({"1", "2"});
  in.add_amplitude(basis({{{"1", Pol::H}, 2}, {{"2", Pol::V}, 1}}), Complex{0.6, 0.0});
  in.add_amplitude(basis({{{"1", Pol::V}, 1}, {{"2", Pol::H}, 2}}), Complex{0.0, 0.8});
  for (const Element& e : {make_beamsplitter("1", "2", "1", "2", 0.37),
                           make_waveplate("1", 17.0), make_pbs("1", "2", "1", "2")}) {
    PureState out = apply_element(in, e);
    CHECK(std::abs(out.norm2() - 1.0) < 1e-12);
    for (const auto& term : out.terms()) CHECK(term.first.total_photons() == 3);
  }
}

TEST_CASE("element construction rejects bad parameters") {
  REQUIRE_THROWS_AS(make_beamsplitter("1", "2", "1", "2", 1.5), TransmittanceOutOfRange);
  REQUIRE_THROWS_AS(make_beamsplitter("1", "2", "1", "2", -0.1), TransmittanceOutOfRange);
  REQUIRE_THROWS_AS(make_relabel("1", "1"), DuplicateRail);
  REQUIRE_THROWS_AS(make_pbs("1", "2", "1", "1"), DuplicateRail);
}

TEST_CASE("apply_element validates rails") {
  PureState in = single("1", Pol::H);
  REQUIRE_THROWS_AS(apply_element(in, make_beamsplitter("1", "7", "1", "7", 0.5)),
                    UnknownRail);

  PureState occupied = state_on({"1", "9"});
  occupied.add_amplitude(basis({{{"1", Pol::H}, 1}, {{"9", Pol::H}, 1}}), Complex{1.0, 0.0});
  REQUIRE_THROWS_AS(apply_element(occupied, make_relabel("1", "9")), OccupiedOutputRail);
}

TEST_CASE("transmittance endpoints are exact routing") {
  PureState in = single("1", Pol::H);
  in.register_mode("2");
  PureState swap = apply_element(in, make_beamsplitter("1", "2", "1", "2", 0.0));
  CHECK(amp(swap, {{{"2", Pol::H}, 1}}) == Complex{1.0, 0.0});
  PureState stay = apply_element(in, make_beamsplitter("1", "2", "1", "2", 1.0));
  CHECK(amp(stay, {{{"1", Pol::H}, 1}}) == Complex{1.0, 0.0});
}
