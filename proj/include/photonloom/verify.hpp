#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "photonloom/circuit.hpp"
#include "photonloom/common.hpp"
#include "photonloom/oracle.hpp"
#include "photonloom/protocols.hpp"

namespace photonloom {

struct VerifySummary {
  int trials = 0;
  double max_diff = 0.0;
  int worst_trial = -1;
};

/// Draws a small self-contained circuit: 2-3 modes, up to 4 photons from
/// pair/source preparation, up to 8 in-place elements, then optional
/// detections whose counts are sampled from the actually reachable outcomes
/// so the conditioned state never vanishes.
inline Circuit random_verification_circuit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto coin = [&](double p) { return unit(rng) < p; };
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };

  const int nm = 2 + static_cast<int>(pick(2));
  std::vector<std::string> modes;
  for (int i = 0; i < nm; ++i) modes.push_back("m" + std::to_string(i));

  Circuit c;
  PureState state = PureState::vacuum({}, kDefaultPhotonCap);
  auto add = [&](Stmt s) {
    state = apply_stmt(state, s);
    c.stmts.push_back(std::move(s));
  };

  add(Stmt::declare(modes));
  int budget = 4;
  std::vector<std::string> vacant = modes;
  if (coin(0.5)) {
    double t = 0.15 + 1.25 * unit(rng);
    Complex a = std::polar(std::cos(t), 2.0 * std::numbers::pi * unit(rng));
    Complex b = std::polar(std::sin(t), 2.0 * std::numbers::pi * unit(rng));
    add(Stmt::pair(vacant[0], vacant[1], a, b));
    vacant.erase(vacant.begin(), vacant.begin() + 2);
    budget -= 2;
  }
  for (auto it = vacant.begin(); it != vacant.end() && budget > 0;) {
    if (coin(0.7)) {
      int n = (budget >= 2 && coin(0.35)) ? 2 : 1;
      add(Stmt::source(*it, coin(0.5) ? Pol::H : Pol::V, n));
      budget -= n;
      it = vacant.erase(it);
    } else {
      ++it;
    }
  }
  if (state.max_total_photons() == 0) add(Stmt::source(modes[0], Pol::H, 1));

  const int ne = static_cast<int>(pick(9));
  for (int e = 0; e < ne; ++e) {
    switch (pick(3)) {
      case 0:
        add(Stmt::hwp(modes[pick(modes.size())], 360.0 * unit(rng)));
        break;
      case 1: {
        std::size_t i = pick(modes.size()), j = pick(modes.size() - 1);
        if (j >= i) ++j;
        add(Stmt::bs(modes[i], modes[j], modes[i], modes[j], 0.05 + 0.9 * unit(rng)));
        break;
      }
      default: {
        std::size_t i = pick(modes.size()), j = pick(modes.size() - 1);
        if (j >= i) ++j;
        add(Stmt::pbs(modes[i], modes[j], modes[i], modes[j]));
        break;
      }
    }
  }

  std::vector<std::string> live = modes;
  int nd = coin(0.5) ? 1 + static_cast<int>(pick(2)) : 0;
  for (int d = 0; d < nd && !live.empty(); ++d) {
    std::size_t mi = pick(live.size());
    std::string m = live[mi];
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(mi));
    bool railwise = coin(0.5);
    Pol pol = coin(0.5) ? Pol::H : Pol::V;
    std::map<int, double> weight;
    std::map<int, std::set<int>> splits;
    for (const auto& [basis, amp] : state.terms()) {
      int n = railwise ? basis.count({m, pol}) : basis.mode_total(m);
      weight[n] += std::norm(amp);
      if (!railwise) splits[n].insert(basis.count({m, Pol::H}));
    }
    // A mode-total detection needs one polarization split across the kept
    // terms; counts that mix splits are rejected by both engines.
    std::vector<int> reachable;
    for (const auto& [n, w] : weight)
      if (w > 1e-20 && (railwise || splits[n].size() == 1)) reachable.push_back(n);
    if (reachable.empty()) continue;
    int count = reachable[pick(reachable.size())];
    add(railwise ? Stmt::detect_rail(m, pol, count) : Stmt::detect(m, count));
  }
  return c;
}

/// Runs one circuit through both engines and reports the phase-aligned
/// amplitude deviation.
inline double verification_trial_diff(const Circuit& c,
                                      int photon_cap = kDefaultPhotonCap) {
  PureState vac = PureState::vacuum({}, photon_cap);
  auto branches = run_circuit(vac, c);
  return compare_states(dense_run(c), branches.front().state);
}

inline VerifySummary run_random_verification(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VerifySummary sum;
  sum.trials = trials;
  for (int t = 0; t < trials; ++t) {
    double diff = verification_trial_diff(random_verification_circuit(rng));
    if (diff > sum.max_diff) {
      sum.max_diff = diff;
      sum.worst_trial = t;
    }
  }
  return sum;
}

/// Sparse-vs-dense deviation for the full concentration chain.
inline double concentration_oracle_diff(Complex alpha, Complex beta,
                                        int photon_cap = kDefaultPhotonCap) {
  Circuit c = build_concentration_circuit(alpha, beta);
  PureState vac = PureState::vacuum({}, photon_cap);
  auto branches = run_circuit(vac, c);
  return compare_states(dense_run(c), branches.front().state);
}

/// Worst unitarity deviation of the permanent-derived transition matrices
/// over a spread of element parameters.
inline double element_unitarity_worst(int nmax = 3) {
  std::vector<Element> elems;
  elems.push_back(make_pbs("a", "b", "c", "d"));
  elems.push_back(make_relabel("a", "b"));
  for (double deg : {0.0, 22.5, 30.0, 45.0, 67.5, 90.0, 13.7})
    elems.push_back(make_waveplate("a", deg));
  for (double t : {0.0, 0.25, 1.0 / 3.0, 0.5, 0.9, 1.0})
    elems.push_back(make_beamsplitter("a", "b", "c", "d", t));
  double worst = 0.0;
  for (const auto& e : elems) worst = std::max(worst, dense_element_unitary(e, nmax));
  return worst;
}

}  // namespace photonloom
