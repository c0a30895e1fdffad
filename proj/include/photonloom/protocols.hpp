#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "photonloom/circuit.hpp"
#include "photonloom/common.hpp"
#include "photonloom/fock.hpp"
#include "photonloom/measurement.hpp"
#include "photonloom/mixed.hpp"
#include "photonloom/optics.hpp"

namespace photonloom {

// ---------------------------------------------------------------------------
// Reference states

/// alpha |H,H> + beta |V,V> on two spatial modes.
inline PureState pair_state(const std::string& m1, const std::string& m2, Complex alpha,
                            Complex beta, int photon_cap = kDefaultPhotonCap) {
  std::set<RailId> reg{{m1, Pol::H}, {m1, Pol::V}, {m2, Pol::H}, {m2, Pol::V}};
  PureState s = PureState::zero(std::move(reg), photon_cap);
  s.add_amplitude(FockBasisState::from_occupations({{{m1, Pol::H}, 1}, {{m2, Pol::H}, 1}}),
                  alpha);
  s.add_amplitude(FockBasisState::from_occupations({{{m1, Pol::V}, 1}, {{m2, Pol::V}, 1}}),
                  beta);
  s.prune();
  return s;
}

/// (|H,H> + |V,V>)/sqrt(2)
inline PureState bell_phi_plus(const std::string& m1, const std::string& m2,
                               int photon_cap = kDefaultPhotonCap) {
  return pair_state(m1, m2, {std::numbers::sqrt2 / 2.0, 0.0}, {std::numbers::sqrt2 / 2.0, 0.0},
                    photon_cap);
}

/// (|H,H> - |V,V>)/sqrt(2)
inline PureState bell_phi_minus(const std::string& m1, const std::string& m2,
                                int photon_cap = kDefaultPhotonCap) {
  return pair_state(m1, m2, {std::numbers::sqrt2 / 2.0, 0.0},
                    {-std::numbers::sqrt2 / 2.0, 0.0}, photon_cap);
}

/// (|H,V> + |V,H>)/sqrt(2)
inline PureState bell_psi_plus(const std::string& m1, const std::string& m2,
                               int photon_cap = kDefaultPhotonCap) {
  std::set<RailId> reg{{m1, Pol::H}, {m1, Pol::V}, {m2, Pol::H}, {m2, Pol::V}};
  PureState s = PureState::zero(std::move(reg), photon_cap);
  const double a = std::numbers::sqrt2 / 2.0;
  s.add_amplitude(FockBasisState::from_occupations({{{m1, Pol::H}, 1}, {{m2, Pol::V}, 1}}),
                  {a, 0.0});
  s.add_amplitude(FockBasisState::from_occupations({{{m1, Pol::V}, 1}, {{m2, Pol::H}, 1}}),
                  {a, 0.0});
  return s;
}

/// |V,V> on two spatial modes.
inline PureState vv_pair(const std::string& m1, const std::string& m2,
                         int photon_cap = kDefaultPhotonCap) {
  return pair_state(m1, m2, {0.0, 0.0}, {1.0, 0.0}, photon_cap);
}

/// The equal-amplitude four-photon target produced by the concentration
/// circuit: (|H10 V11 H12 V13> + |V10 H11 V12 H13>)/sqrt(2).
inline PureState ghz_target(int photon_cap = kDefaultPhotonCap) {
  std::set<RailId> reg;
  for (const char* m : {"10", "11", "12", "13"}) {
    reg.insert({m, Pol::H});
    reg.insert({m, Pol::V});
  }
  PureState s = PureState::zero(std::move(reg), photon_cap);
  const double a = std::numbers::sqrt2 / 2.0;
  s.add_amplitude(FockBasisState::from_occupations({{{"10", Pol::H}, 1},
                                                    {{"11", Pol::V}, 1},
                                                    {{"12", Pol::H}, 1},
                                                    {{"13", Pol::V}, 1}}),
                  {a, 0.0});
  s.add_amplitude(FockBasisState::from_occupations({{{"10", Pol::V}, 1},
                                                    {{"11", Pol::H}, 1},
                                                    {{"12", Pol::V}, 1},
                                                    {{"13", Pol::H}, 1}}),
                  {a, 0.0});
  return s;
}

// ---------------------------------------------------------------------------
// Concentration: two partially entangled pairs -> 4-photon GHZ -> Bell pairs

struct ConcentrationParams {
  Complex alpha{std::numbers::sqrt2 / 2.0, 0.0};
  Complex beta{std::numbers::sqrt2 / 2.0, 0.0};
};

struct BellOutcome {
  std::string label;       // D4D6, D5D7, D4D7, D5D6
  double probability = 0.0;
  PureState bell_state;    // normalized, after any correction
  bool correction_applied = false;
};

struct ConcentrationResult {
  PureState ghz_state;  // normalized 4-photon output (zero state when degenerate)
  double success_probability = 0.0;
  double claimed_probability = 0.0;  // closed-form |alpha*beta|^2 / 8 benchmark
  std::vector<BellOutcome> bell_outcomes;
  bool degenerate = false;
};

/// The full concentration circuit. Two pair sources feed polarization
/// splitters; one arm is rotated 45 degrees so the two-photon components
/// bunch; single-photon ancilla filters on modes 5 and 6 delete every branch
/// carrying exactly one photon there; a T=1/4 attenuator on mode 7 balances
/// the surviving branch pair; recombination yields a four-photon GHZ state on
/// modes 10-13 up to one vertical phase flip, which the final zero-degree
/// plate on mode 10 undoes.
inline Circuit build_concentration_circuit(Complex alpha = {std::numbers::sqrt2 / 2.0, 0.0},
                                           Complex beta = {std::numbers::sqrt2 / 2.0, 0.0}) {
  Circuit c;
  auto& v = c.stmts;
  v.push_back(Stmt::declare({"1", "2", "3", "4"}));
  v.push_back(Stmt::pair("1", "2", alpha, beta));
  v.push_back(Stmt::pair("3", "4", alpha, beta));
  v.push_back(Stmt::declare({"1p", "2p", "3p", "4p"}));
  v.push_back(Stmt::pbs("1", "3", "1p", "3p"));
  v.push_back(Stmt::pbs("2", "4", "2p", "4p"));
  v.push_back(Stmt::hwp("1p", 45.0));
  v.push_back(Stmt::declare({"5", "6", "7", "8", "x1", "x4"}));
  v.push_back(Stmt::pbs("1p", "x1", "5", "6"));
  v.push_back(Stmt::pbs("4p", "x4", "7", "8"));
  v.push_back(Stmt::declare({"a5", "a6"}));
  v.push_back(Stmt::source("a5", Pol::H, 1));
  v.push_back(Stmt::source("a6", Pol::V, 1));
  v.push_back(Stmt::bs("5", "a5", "5", "a5", 0.5));
  v.push_back(Stmt::bs("6", "a6", "6", "a6", 0.5));
  v.push_back(Stmt::detect("a5", 1));
  v.push_back(Stmt::detect("a6", 1));
  v.push_back(Stmt::declare({"t7"}));
  v.push_back(Stmt::bs("7", "t7", "7", "t7", 0.25));
  v.push_back(Stmt::detect("t7", 0));
  v.push_back(Stmt::declare({"5p", "7p", "w1", "w2"}));
  v.push_back(Stmt::pbs("5", "6", "5p", "w1"));
  v.push_back(Stmt::pbs("7", "8", "7p", "w2"));
  v.push_back(Stmt::detect("w1", 0));
  v.push_back(Stmt::detect("w2", 0));
  v.push_back(Stmt::hwp("5p", 45.0));
  v.push_back(Stmt::declare({"9"}));
  v.push_back(Stmt::relabel("5p", "9"));
  v.push_back(Stmt::declare({"10", "11", "12", "13"}));
  v.push_back(Stmt::pbs("9", "3p", "10", "11"));
  v.push_back(Stmt::pbs("2p", "7p", "12", "13"));
  v.push_back(Stmt::hwp("10", 0.0));
  return c;
}

/// Diagonal measurement of modes 11 and 13 with the four detector pairings.
/// D4/D5 fire for the +45/-45 outcome on mode 11, D6/D7 on mode 13. The
/// D4D6/D5D7 pairings leave (|H10 H12> + |V10 V12>)/sqrt(2) directly; the
/// D4D7/D5D6 pairings leave the minus form and a zero-degree plate on mode 10
/// flips it back (correction_applied = true).
inline std::vector<BellOutcome> project_ghz_to_bell(const PureState& ghz) {
  const char* ms[] = {"10", "11", "12", "13"};
  std::set<RailId> expect;
  for (const char* m : ms) {
    expect.insert({m, Pol::H});
    expect.insert({m, Pol::V});
  }
  if (ghz.registry() != expect)
    throw ShapeMismatch("bell projection expects a state on modes 10-13 only");
  for (const auto& [basis, amp] : ghz.terms())
    for (const char* m : ms)
      if (basis.mode_total(m) != 1)
        throw ShapeMismatch("bell projection expects one photon per mode");

  std::vector<BellOutcome> out;
  for (const auto& o11 : measure_diagonal(ghz, "11")) {
    for (const auto& o13 : measure_diagonal(o11.conditioned, "13")) {
      BellOutcome b;
      bool plus11 = o11.label == "+45";
      bool plus13 = o13.label == "+45";
      b.label = std::string(plus11 ? "D4" : "D5") + (plus13 ? "D6" : "D7");
      b.probability = o11.probability * o13.probability;
      b.correction_applied = (plus11 != plus13);
      b.bell_state = b.correction_applied
                         ? apply_element(o13.conditioned, make_waveplate("10", 0.0))
                         : o13.conditioned;
      out.push_back(std::move(b));
    }
  }
  // Canonical report order: the two uncorrected pairings first.
  std::sort(out.begin(), out.end(), [](const BellOutcome& a, const BellOutcome& b) {
    auto rank = [](const std::string& l) {
      if (l == "D4D6") return 0;
      if (l == "D5D7") return 1;
      if (l == "D4D7") return 2;
      return 3;
    };
    return rank(a.label) < rank(b.label);
  });
  return out;
}

/// Runs the concentration circuit from vacuum: success probability is the
/// squared norm of the conditioned output, which equals |alpha*beta|^2 / 8.
inline ConcentrationResult run_concentration(const ConcentrationParams& p,
                                             int photon_cap = kDefaultPhotonCap) {
  double n2 = std::norm(p.alpha) + std::norm(p.beta);
  if (std::abs(n2 - 1.0) > 1e-10)
    throw SimError("concentration parameters must satisfy |alpha|^2 + |beta|^2 = 1");

  ConcentrationResult r;
  r.claimed_probability = std::norm(p.alpha) * std::norm(p.beta) / 8.0;

  PureState vac = PureState::vacuum({}, photon_cap);
  auto branches = run_circuit(vac, build_concentration_circuit(p.alpha, p.beta));
  const PureState& final_state = branches.front().state;
  r.success_probability = final_state.norm2();
  if (r.success_probability <= kZeroNormTol) {
    r.degenerate = true;
    r.success_probability = 0.0;
    r.ghz_state = PureState::zero(final_state.registry(), photon_cap);
    return r;
  }
  r.ghz_state = normalized(final_state).first;
  r.bell_outcomes = project_ghz_to_bell(r.ghz_state);
  return r;
}

// ---------------------------------------------------------------------------
// Purification: one distillation round on a rank-2 mixture

/// gamma' = gamma^2 / (gamma^2 + (1-gamma)^2); fixed points 0, 1/2, 1.
inline double gamma_update_map(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw GammaOutOfRange("gamma must lie in [0,1]");
  double a = gamma * gamma, b = (1.0 - gamma) * (1.0 - gamma);
  return a / (a + b);
}

/// The distillation optics. Four polarization splitters fan modes 1-4 out
/// into separate H and V paths; four 50:50 splitters interfere matching
/// paths of the two pairs; eight single-photon ancilla filters keep only the
/// photon-bunched components; four more 50:50 splitters unbunch them; four
/// polarization splitters recombine into modes a-d; modes b and d are
/// measured in the diagonal basis.
///
/// The raw chain passes the bunched double-occupations of the target branch
/// through two attenuating filters but those of the |VV> branch through
/// four, so the |VV> branch is suppressed by an extra factor 2 relative to
/// the closed-form update. With `balanced` set, four T=1/sqrt(2) attenuators
/// on the V paths (modes 12, 13, 16, 17) restore the stated weights; the raw
/// variant is kept for the bundled script and the alternate-mixture driver.
inline Circuit build_purification_circuit(bool balanced = true) {
  Circuit c;
  auto& v = c.stmts;
  v.push_back(Stmt::declare({"1", "2", "3", "4"}));
  v.push_back(Stmt::declare({"5", "6", "7", "8", "5p", "6p", "7p", "8p", "y1", "y2", "y3",
                             "y4"}));
  v.push_back(Stmt::pbs("1", "y1", "5", "6"));
  v.push_back(Stmt::pbs("2", "y2", "7", "8"));
  v.push_back(Stmt::pbs("3", "y3", "5p", "6p"));
  v.push_back(Stmt::pbs("4", "y4", "7p", "8p"));
  v.push_back(Stmt::declare({"10", "11", "12", "13", "14", "15", "16", "17"}));
  v.push_back(Stmt::bs("5", "5p", "10", "11", 0.5));
  v.push_back(Stmt::bs("6", "6p", "12", "13", 0.5));
  v.push_back(Stmt::bs("7", "7p", "14", "15", 0.5));
  v.push_back(Stmt::bs("8", "8p", "16", "17", 0.5));
  v.push_back(Stmt::declare({"p10", "p11", "p12", "p13", "p14", "p15", "p16", "p17"}));
  const struct {
    const char* mode;
    Pol pol;
  } filters[] = {{"10", Pol::H}, {"11", Pol::H}, {"12", Pol::V}, {"13", Pol::V},
                 {"14", Pol::H}, {"15", Pol::H}, {"16", Pol::V}, {"17", Pol::V}};
  for (const auto& f : filters)
    v.push_back(Stmt::source(std::string("p") + f.mode, f.pol, 1));
  for (const auto& f : filters) {
    std::string anc = std::string("p") + f.mode;
    v.push_back(Stmt::bs(f.mode, anc, f.mode, anc, 0.5));
    v.push_back(Stmt::detect(anc, 1));
  }
  if (balanced) {
    v.push_back(Stmt::declare({"t12", "t13", "t16", "t17"}));
    for (const char* m : {"12", "13", "16", "17"}) {
      std::string trash = std::string("t") + m;
      v.push_back(Stmt::bs(m, trash, m, trash, std::numbers::sqrt2 / 2.0));
      v.push_back(Stmt::detect(trash, 0));
    }
  }
  v.push_back(Stmt::declare({"10p", "11p", "12p", "13p", "14p", "15p", "16p", "17p"}));
  v.push_back(Stmt::bs("10", "11", "10p", "11p", 0.5));
  v.push_back(Stmt::bs("12", "13", "12p", "13p", 0.5));
  v.push_back(Stmt::bs("14", "15", "14p", "15p", 0.5));
  v.push_back(Stmt::bs("16", "17", "16p", "17p", 0.5));
  v.push_back(Stmt::declare({"a", "b", "c", "d", "wa", "wb", "wc", "wd"}));
  v.push_back(Stmt::pbs("10p", "12p", "a", "wa"));
  v.push_back(Stmt::pbs("11p", "13p", "b", "wb"));
  v.push_back(Stmt::pbs("14p", "16p", "c", "wc"));
  v.push_back(Stmt::pbs("15p", "17p", "d", "wd"));
  v.push_back(Stmt::detect("wa", 0));
  v.push_back(Stmt::detect("wb", 0));
  v.push_back(Stmt::detect("wc", 0));
  v.push_back(Stmt::detect("wd", 0));
  v.push_back(Stmt::measure_diag("b"));
  v.push_back(Stmt::measure_diag("d"));
  return c;
}

/// Self-contained script variant: prepares the pure target pair on each side
/// and runs the raw (unbalanced) chain. This is the bundled example circuit.
inline Circuit build_purification_script() {
  Circuit c;
  const double a = std::numbers::sqrt2 / 2.0;
  c.stmts.push_back(Stmt::declare({"1", "2", "3", "4"}));
  c.stmts.push_back(Stmt::pair("1", "2", {a, 0.0}, {a, 0.0}));
  c.stmts.push_back(Stmt::hwp("2", 90.0));
  c.stmts.push_back(Stmt::pair("3", "4", {a, 0.0}, {a, 0.0}));
  c.stmts.push_back(Stmt::hwp("4", 90.0));
  c.append(build_purification_circuit(false), /*skip_front=*/1);  // drop duplicate mode decl
  return c;
}

struct PurificationRound {
  double gamma_in = 0.0;
  double gamma_out = 0.0;
  double acceptance_probability = 0.0;
  double cross_acceptance = 0.0;  // largest acceptance among the two cross branches
  MixedState output;              // weights sum to acceptance_probability
};

namespace detail {

// Detector pairing: b:+45 = D9, b:-45 = D10, d:+45 = D11, d:-45 = D12.
// D9D11 and D10D12 leave the kept states directly; D9D12 and D10D11 need a
// vertical phase flip on mode a.
inline bool outcome_needs_flip(const std::string& label) {
  bool b_plus = label.find("b:+45") != std::string::npos;
  bool d_plus = label.find("d:+45") != std::string::npos;
  return b_plus != d_plus;
}

}  // namespace detail

/// One full-circuit round on the ensemble
///   gamma   (|H,V>+|V,H>)/sqrt(2)  +  (1-gamma) |V,V>
/// per pair. All four detector pairings are kept (with the flip applied
/// where needed) and pooled into the output ensemble.
inline PurificationRound run_purification_round(double gamma, bool balanced = true,
                                                int photon_cap = kDefaultPhotonCap) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw GammaOutOfRange("gamma must lie in [0,1]");

  PurificationRound round;
  round.gamma_in = gamma;
  Circuit circuit = build_purification_circuit(balanced);

  struct InBranch {
    double weight;
    bool cross;
    PureState state;
  };
  double g1 = gamma, g0 = 1.0 - gamma;
  std::vector<InBranch> ins;
  auto psi12 = [&] { return bell_psi_plus("1", "2", photon_cap); };
  auto psi34 = [&] { return bell_psi_plus("3", "4", photon_cap); };
  auto vv12 = [&] { return vv_pair("1", "2", photon_cap); };
  auto vv34 = [&] { return vv_pair("3", "4", photon_cap); };
  if (g1 > 0.0) ins.push_back({g1 * g1, false, tensor(psi12(), psi34())});
  if (g1 > 0.0 && g0 > 0.0) {
    ins.push_back({g1 * g0, true, tensor(psi12(), vv34())});
    ins.push_back({g0 * g1, true, tensor(vv12(), psi34())});
  }
  if (g0 > 0.0) ins.push_back({g0 * g0, false, tensor(vv12(), vv34())});

  MixedState out;
  for (const auto& in : ins) {
    double branch_acceptance = 0.0;
    for (const auto& rb : run_circuit(in.state, circuit)) {
      double p = rb.state.norm2();
      branch_acceptance += p;
      if (p <= kZeroNormTol) continue;
      PureState kept = normalized(rb.state).first;
      if (detail::outcome_needs_flip(rb.label))
        kept = apply_element(kept, make_waveplate("a", 0.0));
      out.add_branch(in.weight * p, std::move(kept));
    }
    round.acceptance_probability += in.weight * branch_acceptance;
    if (in.cross) round.cross_acceptance = std::max(round.cross_acceptance, branch_acceptance);
  }

  round.output = out;
  round.gamma_out = fraction_of(out, bell_psi_plus("a", "c", photon_cap)).gamma;
  if (balanced) {
    double expect = gamma_update_map(gamma);
    if (std::abs(round.gamma_out - expect) > 1e-10)
      throw SimError("purification round deviates from the closed-form update");
  }
  return round;
}

/// Closed-form round: the update map plus the balanced-circuit acceptance
/// (gamma^2 + (1-gamma)^2) / 16384, with a symbolic two-branch output.
inline PurificationRound fast_purification_round(double gamma,
                                                 int photon_cap = kDefaultPhotonCap) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw GammaOutOfRange("gamma must lie in [0,1]");
  PurificationRound round;
  round.gamma_in = gamma;
  round.gamma_out = gamma_update_map(gamma);
  double a = gamma * gamma + (1.0 - gamma) * (1.0 - gamma);
  round.acceptance_probability = a / 16384.0;
  MixedState out;
  if (round.gamma_out > 0.0)
    out.add_branch(round.gamma_out * round.acceptance_probability, bell_psi_plus("a", "c", photon_cap));
  if (round.gamma_out < 1.0)
    out.add_branch((1.0 - round.gamma_out) * round.acceptance_probability,
                   vv_pair("a", "c", photon_cap));
  round.output = out;
  return round;
}

/// Iterates rounds until gamma >= target or max_rounds is hit. Fast mode uses
/// the closed-form update; circuit mode runs the balanced optics each round.
inline std::vector<PurificationRound> iterate_purification(double gamma0, double target,
                                                           int max_rounds, bool fast = true,
                                                           int photon_cap = kDefaultPhotonCap) {
  if (!(gamma0 > 0.0 && gamma0 < 1.0))
    throw GammaOutOfRange("initial gamma must lie in (0,1)");
  if (!(target > 0.5 && target < 1.0))
    throw GammaOutOfRange("target must lie in (1/2,1)");
  if (gamma0 <= 0.5)
    throw NotConverging("gamma <= 1/2 cannot be purified toward the target state");

  std::vector<PurificationRound> rounds;
  double g = gamma0;
  while (g < target && static_cast<int>(rounds.size()) < max_rounds) {
    PurificationRound r = fast ? fast_purification_round(g, photon_cap)
                               : run_purification_round(g, true, photon_cap);
    g = r.gamma_out;
    rounds.push_back(std::move(r));
  }
  return rounds;
}

// ---------------------------------------------------------------------------
// Closing variant: mixture of the two Bell forms

/// Round report for the ensemble gamma Psi+ + (1-gamma) Phi+ per pair, run
/// through the raw (unbalanced) chain, which treats the two branches
/// symmetrically. The dominant branch purifies: psi_fraction follows the
/// update map, phi_fraction its complement.
struct AlternateRound {
  double gamma_in = 0.0;
  double psi_fraction = 0.0;
  double phi_fraction = 0.0;
  double acceptance_probability = 0.0;
  double cross_acceptance = 0.0;
  MixedState output;
};

inline AlternateRound run_alternate_round(double gamma,
                                          int photon_cap = kDefaultPhotonCap) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw GammaOutOfRange("gamma must lie in [0,1]");

  AlternateRound round;
  round.gamma_in = gamma;
  Circuit circuit = build_purification_circuit(false);

  struct InBranch {
    double weight;
    bool cross;
    PureState state;
  };
  double g1 = gamma, g0 = 1.0 - gamma;
  std::vector<InBranch> ins;
  if (g1 > 0.0)
    ins.push_back({g1 * g1, false,
                   tensor(bell_psi_plus("1", "2", photon_cap), bell_psi_plus("3", "4", photon_cap))});
  if (g1 > 0.0 && g0 > 0.0) {
    ins.push_back({g1 * g0, true,
                   tensor(bell_psi_plus("1", "2", photon_cap), bell_phi_plus("3", "4", photon_cap))});
    ins.push_back({g0 * g1, true,
                   tensor(bell_phi_plus("1", "2", photon_cap), bell_psi_plus("3", "4", photon_cap))});
  }
  if (g0 > 0.0)
    ins.push_back({g0 * g0, false,
                   tensor(bell_phi_plus("1", "2", photon_cap), bell_phi_plus("3", "4", photon_cap))});

  MixedState out;
  for (const auto& in : ins) {
    double branch_acceptance = 0.0;
    for (const auto& rb : run_circuit(in.state, circuit)) {
      double p = rb.state.norm2();
      branch_acceptance += p;
      if (p <= kZeroNormTol) continue;
      PureState kept = normalized(rb.state).first;
      if (detail::outcome_needs_flip(rb.label))
        kept = apply_element(kept, make_waveplate("a", 0.0));
      out.add_branch(in.weight * p, std::move(kept));
    }
    round.acceptance_probability += in.weight * branch_acceptance;
    if (in.cross) round.cross_acceptance = std::max(round.cross_acceptance, branch_acceptance);
  }

  round.output = out;
  round.psi_fraction = fraction_of(out, bell_psi_plus("a", "c", photon_cap)).gamma;
  round.phi_fraction = fraction_of(out, bell_phi_plus("a", "c", photon_cap)).gamma;
  return round;
}

}  // namespace photonloom
