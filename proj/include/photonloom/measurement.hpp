#pragma once

#include <string>
#include <vector>

#include "photonloom/common.hpp"
#include "photonloom/fock.hpp"
#include "photonloom/optics.hpp"

namespace photonloom {

/// One detector requirement: an exact photon count on a single rail or on a
/// whole spatial mode (H rail + V rail).
struct DetectionConstraint {
  enum class Kind { RailCount, ModeTotal };
  Kind kind = Kind::ModeTotal;
  RailId rail;       // for RailCount
  std::string mode;  // for ModeTotal
  int count = 0;

  static DetectionConstraint on_rail(RailId r, int n) {
    DetectionConstraint c;
    c.kind = Kind::RailCount;
    c.rail = std::move(r);
    c.count = n;
    return c;
  }
  static DetectionConstraint on_mode(std::string m, int n) {
    DetectionConstraint c;
    c.kind = Kind::ModeTotal;
    c.mode = std::move(m);
    c.count = n;
    return c;
  }
};

struct DetectionPattern {
  std::vector<DetectionConstraint> constraints;
};

/// Normalized post-measurement state with the probability of its outcome.
struct MeasurementOutcome {
  std::string label;
  double probability = 0.0;
  PureState conditioned;
};

/// Keeps exactly the basis terms satisfying every constraint, removes the
/// measured rails from the registry (the detector absorbs those photons),
/// and returns the unnormalized remainder: its squared norm is the joint
/// acceptance probability times the input's squared norm. A mode-total
/// constraint additionally requires every kept term to carry the same
/// (n_H, n_V) split on that mode: otherwise the absorbed light holds a
/// polarization record that distinguishes the terms and the remainder is
/// not pure, which raises AmbiguousDetection.
inline PureState postselect(const PureState& s, const DetectionPattern& p) {
  std::set<RailId> measured;
  for (const auto& c : p.constraints) {
    if (c.kind == DetectionConstraint::Kind::RailCount) {
      if (!s.has_rail(c.rail))
        throw UnknownRail("postselect: rail " + c.rail.mode + "." +
                          pol_char(c.rail.pol) + " not in mode registry");
      measured.insert(c.rail);
    } else {
      RailId h{c.mode, Pol::H}, v{c.mode, Pol::V};
      if (!s.has_rail(h) && !s.has_rail(v))
        throw UnknownRail("postselect: mode " + c.mode + " not in mode registry");
      if (s.has_rail(h)) measured.insert(h);
      if (s.has_rail(v)) measured.insert(v);
    }
  }

  std::set<RailId> registry = s.registry();
  for (const auto& r : measured) registry.erase(r);
  PureState out = PureState::zero(std::move(registry), s.photon_cap());

  std::vector<std::pair<int, int>> seen_split(p.constraints.size(), {-1, -1});
  for (const auto& [basis, amp] : s.terms()) {
    bool keep = true;
    for (const auto& c : p.constraints) {
      int have = (c.kind == DetectionConstraint::Kind::RailCount)
                     ? basis.count(c.rail)
                     : basis.mode_total(c.mode);
      if (have != c.count) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    for (std::size_t ci = 0; ci < p.constraints.size(); ++ci) {
      const auto& c = p.constraints[ci];
      if (c.kind != DetectionConstraint::Kind::ModeTotal) continue;
      std::pair<int, int> split{basis.count({c.mode, Pol::H}), basis.count({c.mode, Pol::V})};
      if (seen_split[ci] == std::pair<int, int>{-1, -1}) {
        seen_split[ci] = split;
      } else if (seen_split[ci] != split) {
        throw AmbiguousDetection("postselect: mode " + c.mode +
                                 " holds different polarization splits across kept terms");
      }
    }
    FockBasisState reduced = basis;
    for (const auto& r : measured) reduced = reduced.without_rail(r);
    out.add_amplitude(reduced, amp);
  }
  out.prune();
  return out;
}

/// Complete photon-number measurement of one spatial mode: one outcome per
/// occurring (n_H, n_V) pair, labeled "nH,nV". Probabilities sum to the
/// input's squared norm; conditioned states are normalized with the measured
/// rails removed.
inline std::vector<MeasurementOutcome> measure_number_complete(const PureState& s,
                                                               const std::string& mode) {
  RailId h{mode, Pol::H}, v{mode, Pol::V};
  if (!s.has_rail(h) && !s.has_rail(v))
    throw UnknownRail("measure: mode " + mode + " not in mode registry");

  std::set<RailId> registry = s.registry();
  registry.erase(h);
  registry.erase(v);

  std::map<std::pair<int, int>, PureState> groups;
  for (const auto& [basis, amp] : s.terms()) {
    std::pair<int, int> key{basis.count(h), basis.count(v)};
    auto it = groups.find(key);
    if (it == groups.end())
      it = groups.emplace(key, PureState::zero(registry, s.photon_cap())).first;
    it->second.add_amplitude(basis.without_mode(mode), amp);
  }

  std::vector<MeasurementOutcome> outcomes;
  for (auto& [key, state] : groups) {
    state.prune();
    double p = state.norm2();
    if (p <= kZeroNormTol) continue;
    MeasurementOutcome o;
    o.label = std::to_string(key.first) + "," + std::to_string(key.second);
    o.probability = p;
    o.conditioned = normalized(state).first;
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

/// Diagonal-basis polarization measurement of a mode holding exactly one
/// photon: a 45-degree wave plate followed by photon-number detection of the
/// H and V rails. Outcome "+45" projects onto (|H>+|V>)/sqrt(2), "-45" onto
/// (|H>-|V>)/sqrt(2). Zero-probability outcomes are omitted.
inline std::vector<MeasurementOutcome> measure_diagonal(const PureState& s,
                                                        const std::string& mode) {
  RailId h{mode, Pol::H}, v{mode, Pol::V};
  if (!s.has_rail(h) && !s.has_rail(v))
    throw UnknownRail("measure-diag: mode " + mode + " not in mode registry");
  for (const auto& [basis, amp] : s.terms())
    if (basis.mode_total(mode) != 1)
      throw NonSinglePhotonMode("measure-diag: mode " + mode +
                                " must hold exactly one photon in every term");

  PureState rotated = apply_element(s, make_waveplate(mode, 45.0));

  std::vector<MeasurementOutcome> outcomes;
  const struct {
    const char* label;
    int nh, nv;
  } cases[] = {{"+45", 1, 0}, {"-45", 0, 1}};
  for (const auto& c : cases) {
    DetectionPattern p;
    p.constraints = {DetectionConstraint::on_rail(h, c.nh),
                     DetectionConstraint::on_rail(v, c.nv)};
    PureState cond = postselect(rotated, p);
    double prob = cond.norm2();
    if (prob <= kZeroNormTol) continue;
    MeasurementOutcome o;
    o.label = c.label;
    o.probability = prob;
    o.conditioned = normalized(cond).first;
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

}  // namespace photonloom
