#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "photonloom/circuit.hpp"
#include "photonloom/common.hpp"
#include "photonloom/fock.hpp"
#include "photonloom/optics.hpp"

namespace photonloom {

/// Dense state vector over every occupation of a fixed rail list with total
/// photon number at most nmax. Kept deliberately independent of the sparse
/// engine: transition amplitudes come from matrix permanents, not from the
/// creation-operator expansion.
struct DenseState {
  std::vector<RailId> rails;  // sorted
  int nmax = 0;
  std::vector<std::vector<int>> basis;  // lexicographic
  std::map<std::vector<int>, std::size_t> index;
  std::vector<Complex> amps;
};

namespace dense {

inline constexpr double kBasisLimit = 2e6;

inline void check_basis_size(std::size_t nrails, int nmax) {
  double size = 1.0;
  for (int k = 1; k <= nmax; ++k) size *= double(nrails + k) / double(k);
  if (size > kBasisLimit) throw BasisOverflow("dense basis would exceed the size limit");
}

inline void enumerate_occupations(std::size_t nrails, int nmax,
                                  std::vector<std::vector<int>>& out) {
  std::vector<int> occ(nrails, 0);
  auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos == nrails) {
      out.push_back(occ);
      return;
    }
    for (int n = 0; n <= remaining; ++n) {
      occ[pos] = n;
      self(self, pos + 1, remaining - n);
    }
    occ[pos] = 0;
  };
  rec(rec, 0, nmax);
}

inline DenseState make_state(std::vector<RailId> rails, int nmax) {
  std::sort(rails.begin(), rails.end());
  check_basis_size(rails.size(), nmax);
  DenseState s;
  s.rails = std::move(rails);
  s.nmax = nmax;
  enumerate_occupations(s.rails.size(), nmax, s.basis);
  for (std::size_t i = 0; i < s.basis.size(); ++i) s.index.emplace(s.basis[i], i);
  s.amps.assign(s.basis.size(), Complex{0.0, 0.0});
  return s;
}

inline std::size_t rail_pos(const std::vector<RailId>& rails, const RailId& r) {
  auto it = std::lower_bound(rails.begin(), rails.end(), r);
  if (it == rails.end() || *it != r)
    throw SimError("oracle: rail " + r.mode + "." + std::string(1, pol_char(r.pol)) +
                   " not present");
  return static_cast<std::size_t>(it - rails.begin());
}

inline Complex permanent(const std::vector<std::vector<Complex>>& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return {1.0, 0.0};
  Complex total{0.0, 0.0};
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Complex prod{1.0, 0.0};
    for (int r = 0; r < n && prod != Complex{0.0, 0.0}; ++r) {
      Complex rowsum{0.0, 0.0};
      for (int c = 0; c < n; ++c)
        if (mask & (1u << c)) rowsum += a[r][c];
      prod *= rowsum;
    }
    bool odd = ((n - std::popcount(mask)) & 1) != 0;
    total += odd ? -prod : prod;
  }
  return total;
}

/// <m_out| U |m_in> = per(B) / sqrt(prod m_in! prod m_out!), where B repeats
/// column i of the rail matrix m_in[i] times and row j m_out[j] times.
inline Complex transition(const std::vector<std::vector<Complex>>& m,
                          const std::vector<int>& m_in, const std::vector<int>& m_out) {
  std::vector<int> cols, rows;
  for (std::size_t i = 0; i < m_in.size(); ++i)
    for (int k = 0; k < m_in[i]; ++k) cols.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < m_out.size(); ++j)
    for (int k = 0; k < m_out[j]; ++k) rows.push_back(static_cast<int>(j));
  if (rows.size() != cols.size()) return {0.0, 0.0};
  const int n = static_cast<int>(rows.size());
  std::vector<std::vector<Complex>> b(n, std::vector<Complex>(n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) b[r][c] = m[rows[r]][cols[c]];
  double denom = 1.0;
  for (int v : m_in) denom *= factorial(v);
  for (int v : m_out) denom *= factorial(v);
  return permanent(b) / std::sqrt(denom);
}

inline void compositions(int total, int slots, std::vector<std::vector<int>>& out) {
  std::vector<int> comp(slots, 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == slots - 1) {
      comp[pos] = remaining;
      out.push_back(comp);
      return;
    }
    for (int n = 0; n <= remaining; ++n) {
      comp[pos] = n;
      self(self, pos + 1, remaining - n);
    }
  };
  if (slots == 0) {
    if (total == 0) out.push_back({});
    return;
  }
  rec(rec, 0, total);
}

}  // namespace dense

inline DenseState dense_add_rails(const DenseState& in, const std::vector<RailId>& add) {
  std::set<RailId> rs(in.rails.begin(), in.rails.end());
  for (const auto& r : add) rs.insert(r);
  DenseState out = dense::make_state({rs.begin(), rs.end()}, in.nmax);
  std::vector<int> occ(out.rails.size(), 0);
  for (std::size_t i = 0; i < in.basis.size(); ++i) {
    if (in.amps[i] == Complex{0.0, 0.0}) continue;
    std::fill(occ.begin(), occ.end(), 0);
    for (std::size_t p = 0; p < in.rails.size(); ++p)
      occ[dense::rail_pos(out.rails, in.rails[p])] = in.basis[i][p];
    out.amps[out.index.at(occ)] += in.amps[i];
  }
  return out;
}

inline DenseState dense_source(const DenseState& in, const RailId& rail, int count) {
  std::size_t rp = dense::rail_pos(in.rails, rail);
  std::size_t mate = dense::rail_pos(in.rails, {rail.mode, rail.pol == Pol::H ? Pol::V : Pol::H});
  DenseState out = dense::make_state(in.rails, in.nmax + count);
  for (std::size_t i = 0; i < in.basis.size(); ++i) {
    if (in.amps[i] == Complex{0.0, 0.0}) continue;
    if (in.basis[i][rp] != 0 || in.basis[i][mate] != 0)
      throw OccupiedOutputRail("oracle: source target mode is occupied");
    std::vector<int> occ = in.basis[i];
    occ[rp] += count;
    out.amps[out.index.at(occ)] += in.amps[i];
  }
  return out;
}

inline DenseState dense_pair(const DenseState& in, const std::string& m1,
                             const std::string& m2, Complex alpha, Complex beta) {
  std::size_t h1 = dense::rail_pos(in.rails, {m1, Pol::H});
  std::size_t v1 = dense::rail_pos(in.rails, {m1, Pol::V});
  std::size_t h2 = dense::rail_pos(in.rails, {m2, Pol::H});
  std::size_t v2 = dense::rail_pos(in.rails, {m2, Pol::V});
  DenseState out = dense::make_state(in.rails, in.nmax + 2);
  for (std::size_t i = 0; i < in.basis.size(); ++i) {
    if (in.amps[i] == Complex{0.0, 0.0}) continue;
    const auto& b = in.basis[i];
    if (b[h1] != 0 || b[v1] != 0 || b[h2] != 0 || b[v2] != 0)
      throw OccupiedOutputRail("oracle: pair target modes are occupied");
    std::vector<int> occ = b;
    occ[h1] += 1;
    occ[h2] += 1;
    out.amps[out.index.at(occ)] += in.amps[i] * alpha;
    occ = b;
    occ[v1] += 1;
    occ[v2] += 1;
    out.amps[out.index.at(occ)] += in.amps[i] * beta;
  }
  return out;
}

inline DenseState dense_apply(const DenseState& in, const Element& e) {
  std::vector<std::size_t> in_pos;
  for (const auto& r : e.rails_in) in_pos.push_back(dense::rail_pos(in.rails, r));

  std::set<RailId> new_set(in.rails.begin(), in.rails.end());
  for (const auto& r : e.rails_in) new_set.erase(r);
  std::set<RailId> fresh;  // output rails that are currently spectators
  for (const auto& r : e.rails_out)
    if (new_set.count(r)) fresh.insert(r);
  for (const auto& r : e.rails_out) new_set.insert(r);

  DenseState out = dense::make_state({new_set.begin(), new_set.end()}, in.nmax);

  // spectator rails: everything surviving that the element does not write
  std::set<RailId> outs(e.rails_out.begin(), e.rails_out.end());
  std::vector<std::pair<std::size_t, std::size_t>> spect;  // (old pos, new pos)
  for (std::size_t p = 0; p < in.rails.size(); ++p) {
    const RailId& r = in.rails[p];
    if (std::find(e.rails_in.begin(), e.rails_in.end(), r) != e.rails_in.end()) continue;
    if (outs.count(r)) continue;  // fresh output, forced vacuum below
    spect.emplace_back(p, dense::rail_pos(out.rails, r));
  }
  std::vector<std::size_t> out_pos;
  for (const auto& r : e.rails_out) out_pos.push_back(dense::rail_pos(out.rails, r));
  std::vector<std::size_t> fresh_pos;
  for (const auto& r : fresh) fresh_pos.push_back(dense::rail_pos(in.rails, r));

  const int k_in = static_cast<int>(e.rails_in.size());
  const int k_out = static_cast<int>(e.rails_out.size());
  std::vector<int> m_in(k_in), occ(out.rails.size(), 0);
  std::vector<std::vector<int>> comps;
  for (std::size_t i = 0; i < in.basis.size(); ++i) {
    if (in.amps[i] == Complex{0.0, 0.0}) continue;
    const auto& b = in.basis[i];
    for (std::size_t fp : fresh_pos)
      if (b[fp] != 0) throw OccupiedOutputRail("oracle: element output rail is occupied");
    int n = 0;
    for (int q = 0; q < k_in; ++q) n += (m_in[q] = b[in_pos[q]]);
    comps.clear();
    dense::compositions(n, k_out, comps);
    for (const auto& m_out : comps) {
      Complex t = dense::transition(e.matrix, m_in, m_out);
      if (t == Complex{0.0, 0.0}) continue;
      std::fill(occ.begin(), occ.end(), 0);
      for (const auto& [op, np] : spect) occ[np] = b[op];
      for (int q = 0; q < k_out; ++q) occ[out_pos[q]] = m_out[q];
      out.amps[out.index.at(occ)] += in.amps[i] * t;
    }
  }
  return out;
}

inline DenseState dense_detect_rail(const DenseState& in, const RailId& rail, int count) {
  std::size_t rp = dense::rail_pos(in.rails, rail);
  std::vector<RailId> rails = in.rails;
  rails.erase(rails.begin() + static_cast<std::ptrdiff_t>(rp));
  DenseState out = dense::make_state(rails, std::max(0, in.nmax - count));
  for (std::size_t i = 0; i < in.basis.size(); ++i) {
    if (in.amps[i] == Complex{0.0, 0.0}) continue;
    if (in.basis[i][rp] != count) continue;
    std::vector<int> occ = in.basis[i];
    occ.erase(occ.begin() + static_cast<std::ptrdiff_t>(rp));
    out.amps[out.index.at(occ)] += in.amps[i];
  }
  return out;
}

inline DenseState dense_detect_mode(const DenseState& in, const std::string& mode, int count) {
  std::size_t hp = dense::rail_pos(in.rails, {mode, Pol::H});
  std::size_t vp = dense::rail_pos(in.rails, {mode, Pol::V});
  std::vector<RailId> rails;
  for (const auto& r : in.rails)
    if (r.mode != mode) rails.push_back(r);
  DenseState out = dense::make_state(rails, std::max(0, in.nmax - count));
  int seen_h = -1;
  for (std::size_t i = 0; i < in.basis.size(); ++i) {
    if (std::abs(in.amps[i]) <= kPruneTol) continue;
    if (in.basis[i][hp] + in.basis[i][vp] != count) continue;
    if (seen_h < 0)
      seen_h = in.basis[i][hp];
    else if (seen_h != in.basis[i][hp])
      throw AmbiguousDetection("oracle: mode " + mode +
                               " holds different polarization splits across kept terms");
    std::vector<int> occ;
    occ.reserve(rails.size());
    for (std::size_t p = 0; p < in.rails.size(); ++p)
      if (p != hp && p != vp) occ.push_back(in.basis[i][p]);
    out.amps[out.index.at(occ)] += in.amps[i];
  }
  return out;
}

/// Runs a self-contained circuit through the dense engine. Diagonal
/// measurements are not representable in a single dense vector.
inline DenseState dense_run(const Circuit& c) {
  DenseState s = dense::make_state({}, 0);
  s.amps[0] = {1.0, 0.0};
  for (const auto& st : c.stmts) {
    switch (st.kind) {
      case Stmt::Kind::Modes: {
        std::vector<RailId> add;
        for (const auto& m : st.modes) {
          add.push_back({m, Pol::H});
          add.push_back({m, Pol::V});
        }
        s = dense_add_rails(s, add);
        break;
      }
      case Stmt::Kind::Source:
        s = dense_source(s, {st.modes[0], st.pol}, st.count);
        break;
      case Stmt::Kind::Pair:
        s = dense_pair(s, st.modes[0], st.modes[1], st.alpha, st.beta);
        break;
      case Stmt::Kind::Pbs:
        s = dense_apply(s, make_pbs(st.modes[0], st.modes[1], st.modes[2], st.modes[3]));
        break;
      case Stmt::Kind::Hwp:
        s = dense_apply(s, make_waveplate(st.modes[0], st.value));
        break;
      case Stmt::Kind::Bs:
        s = dense_apply(s, make_beamsplitter(st.modes[0], st.modes[1], st.modes[2],
                                             st.modes[3], st.value));
        break;
      case Stmt::Kind::Relabel:
        s = dense_apply(s, make_relabel(st.modes[0], st.modes[1]));
        break;
      case Stmt::Kind::Detect:
        s = dense_detect_mode(s, st.modes[0], st.count);
        break;
      case Stmt::Kind::DetectRail:
        s = dense_detect_rail(s, {st.modes[0], st.pol}, st.count);
        break;
      case Stmt::Kind::MeasureDiag:
        throw SimError("oracle: diagonal measurement is not supported");
    }
  }
  return s;
}

inline DenseState dense_from_pure(const PureState& p) {
  std::vector<RailId> rails(p.registry().begin(), p.registry().end());
  DenseState s = dense::make_state(rails, p.max_total_photons());
  for (const auto& [basis, amp] : p.terms()) {
    std::vector<int> occ(s.rails.size(), 0);
    for (std::size_t i = 0; i < s.rails.size(); ++i) occ[i] = basis.count(s.rails[i]);
    s.amps[s.index.at(occ)] += amp;
  }
  return s;
}

/// Max amplitude deviation after aligning global phase on the overlap.
inline double compare_states(const DenseState& d, const PureState& p) {
  std::set<RailId> drails(d.rails.begin(), d.rails.end());
  if (drails != p.registry())
    throw RailSetMismatch("oracle comparison: rail sets differ");

  std::vector<Complex> sv(d.basis.size(), Complex{0.0, 0.0});
  for (const auto& [basis, amp] : p.terms()) {
    std::vector<int> occ(d.rails.size(), 0);
    for (std::size_t i = 0; i < d.rails.size(); ++i) occ[i] = basis.count(d.rails[i]);
    auto it = d.index.find(occ);
    if (it == d.index.end())
      throw RailSetMismatch("oracle comparison: sparse term outside dense basis");
    sv[it->second] += amp;
  }
  Complex overlap{0.0, 0.0};
  for (std::size_t i = 0; i < sv.size(); ++i) overlap += std::conj(d.amps[i]) * sv[i];
  Complex u = std::abs(overlap) > 1e-300 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  double worst = 0.0;
  for (std::size_t i = 0; i < sv.size(); ++i)
    worst = std::max(worst, std::abs(sv[i] - u * d.amps[i]));
  return worst;
}

/// Checks that the permanent-derived transition matrix of an element is
/// unitary on every photon-number sector up to nmax. Returns the largest
/// deviation from the identity.
inline double dense_element_unitary(const Element& e, int nmax) {
  const int k_in = static_cast<int>(e.rails_in.size());
  const int k_out = static_cast<int>(e.rails_out.size());
  double worst = 0.0;
  for (int n = 0; n <= nmax; ++n) {
    std::vector<std::vector<int>> ins, outs;
    dense::compositions(n, k_in, ins);
    dense::compositions(n, k_out, outs);
    std::vector<std::vector<Complex>> t(outs.size(), std::vector<Complex>(ins.size()));
    for (std::size_t r = 0; r < outs.size(); ++r)
      for (std::size_t c = 0; c < ins.size(); ++c)
        t[r][c] = dense::transition(e.matrix, ins[c], outs[r]);
    // T-dagger T should be the identity on the sector
    for (std::size_t i = 0; i < ins.size(); ++i) {
      for (std::size_t j = 0; j < ins.size(); ++j) {
        Complex dot{0.0, 0.0};
        for (std::size_t r = 0; r < outs.size(); ++r) dot += std::conj(t[r][i]) * t[r][j];
        double expect = (i == j) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(dot - Complex{expect, 0.0}));
      }
    }
  }
  return worst;
}

}  // namespace photonloom
