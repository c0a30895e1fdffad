#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "photonloom/common.hpp"
#include "photonloom/fock.hpp"

namespace photonloom {

enum class ElementKind { PBS, WavePlate, BeamSplitter, Relabel };

/// Linear transform on creation operators over an ordered rail list:
/// in_i^dag -> sum_j matrix[j][i] out_j^dag. Rails not listed are untouched.
struct Element {
  ElementKind kind = ElementKind::Relabel;
  std::vector<RailId> rails_in;
  std::vector<RailId> rails_out;
  std::vector<std::vector<Complex>> matrix;
  double param = 0.0;
};

namespace detail {

inline void require_distinct(const std::vector<RailId>& rails, const char* what) {
  for (size_t i = 0; i < rails.size(); ++i)
    for (size_t j = i + 1; j < rails.size(); ++j)
      if (rails[i] == rails[j])
        throw DuplicateRail(std::string(what) + ": rail " + rails[i].mode + "." +
                            pol_char(rails[i].pol) + " listed twice");
}

inline void require_unitary(const Element& e) {
  const size_t k = e.matrix.size();
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = 0; b < k; ++b) {
      Complex dot{0.0, 0.0};
      for (size_t c = 0; c < k; ++c) dot += e.matrix[a][c] * std::conj(e.matrix[b][c]);
      Complex expect = (a == b) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
      if (std::abs(dot - expect) > kUnitaryTol)
        throw SimError("element matrix is not unitary");
    }
  }
}

}  // namespace detail

/// PBS: transmits H, reflects V. in1.H->out1.H, in2.H->out2.H,
/// in1.V->out2.V, in2.V->out1.V, all with coefficient +1.
inline Element make_pbs(const std::string& in1, const std::string& in2,
                        const std::string& out1, const std::string& out2) {
  Element e;
  e.kind = ElementKind::PBS;
  e.rails_in = {{in1, Pol::H}, {in2, Pol::H}, {in1, Pol::V}, {in2, Pol::V}};
  e.rails_out = {{out1, Pol::H}, {out2, Pol::H}, {out1, Pol::V}, {out2, Pol::V}};
  detail::require_distinct(e.rails_in, "pbs inputs");
  detail::require_distinct(e.rails_out, "pbs outputs");
  e.matrix = {{1, 0, 0, 0},
              {0, 1, 0, 0},
              {0, 0, 0, 1},
              {0, 0, 1, 0}};
  detail::require_unitary(e);
  return e;
}

/// Wave plate on one spatial mode, angle in degrees:
/// H -> cos(t) H + sin(t) V, V -> sin(t) H - cos(t) V.
/// t = 45 gives the diagonal map, t = 0 is a V phase flip, t = 90 swaps H/V.
inline Element make_waveplate(const std::string& mode, double theta_deg) {
  if (!std::isfinite(theta_deg)) throw SimError("waveplate angle must be finite");
  Element e;
  e.kind = ElementKind::WavePlate;
  e.param = theta_deg;
  e.rails_in = {{mode, Pol::H}, {mode, Pol::V}};
  e.rails_out = e.rails_in;
  const double t = theta_deg * std::numbers::pi / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  e.matrix = {{c, s},
              {s, -c}};
  detail::require_unitary(e);
  return e;
}

/// Polarization-independent beam splitter of transmittance T:
/// in1^dag -> sqrt(T) out1^dag + sqrt(1-T) out2^dag,
/// in2^dag -> sqrt(1-T) out1^dag - sqrt(T) out2^dag,
/// acting as the same 2x2 map on the H rails and on the V rails.
inline Element make_beamsplitter(const std::string& in1, const std::string& in2,
                                 const std::string& out1, const std::string& out2,
                                 double T) {
  if (!(T >= 0.0 && T <= 1.0))
    throw TransmittanceOutOfRange("beam splitter transmittance must lie in [0,1]");
  Element e;
  e.kind = ElementKind::BeamSplitter;
  e.param = T;
  e.rails_in = {{in1, Pol::H}, {in2, Pol::H}, {in1, Pol::V}, {in2, Pol::V}};
  e.rails_out = {{out1, Pol::H}, {out2, Pol::H}, {out1, Pol::V}, {out2, Pol::V}};
  detail::require_distinct(e.rails_in, "bs inputs");
  detail::require_distinct(e.rails_out, "bs outputs");
  const double t = std::sqrt(T), r = std::sqrt(1.0 - T);
  e.matrix = {{t, r, 0, 0},
              {r, -t, 0, 0},
              {0, 0, t, r},
              {0, 0, r, -t}};
  detail::require_unitary(e);
  return e;
}

/// Renames a spatial mode (identity on amplitudes).
inline Element make_relabel(const std::string& old_mode, const std::string& new_mode) {
  if (old_mode == new_mode) throw DuplicateRail("relabel: modes must differ");
  Element e;
  e.kind = ElementKind::Relabel;
  e.rails_in = {{old_mode, Pol::H}, {old_mode, Pol::V}};
  e.rails_out = {{new_mode, Pol::H}, {new_mode, Pol::V}};
  e.matrix = {{1, 0},
              {0, 1}};
  return e;
}

/// Rewrites each basis term's creation-operator monomial under the element's
/// matrix and expands multinomially with bosonic sqrt(n!) normalization.
/// Consumed input rails leave the registry; output rails join it. Output
/// rails that are neither inputs nor vacuum raise OccupiedOutputRail.
inline PureState apply_element(const PureState& s, const Element& e) {
  const size_t k = e.rails_in.size();
  for (const auto& r : e.rails_in)
    if (!s.has_rail(r))
      throw UnknownRail("element input rail " + r.mode + "." + pol_char(r.pol) +
                        " not in mode registry");

  std::set<RailId> new_registry = s.registry();
  for (const auto& r : e.rails_in) new_registry.erase(r);
  for (const auto& r : e.rails_out) new_registry.insert(r);

  // Output rails that survive as spectators must be unoccupied.
  std::vector<RailId> fresh_out;
  for (const auto& r : e.rails_out) {
    bool reused = false;
    for (const auto& q : e.rails_in) reused |= (q == r);
    if (!reused) fresh_out.push_back(r);
  }

  PureState out = PureState::zero(new_registry, s.photon_cap());

  std::vector<int> n(k, 0);       // input occupations per element rail
  std::vector<int> m(k, 0);       // output occupations being assembled
  for (const auto& [basis, amp] : s.terms()) {
    for (const auto& r : fresh_out)
      if (s.has_rail(r) && basis.count(r) > 0)
        throw OccupiedOutputRail("element output rail " + r.mode + "." +
                                 pol_char(r.pol) + " is occupied");

    FockBasisState::Occ spectator;
    for (const auto& [r, c] : basis.occupations()) {
      bool consumed = false;
      for (size_t i = 0; i < k; ++i) consumed |= (e.rails_in[i] == r);
      if (!consumed) spectator.emplace_back(r, c);
    }
    for (size_t i = 0; i < k; ++i) n[i] = basis.count(e.rails_in[i]);

    int total = 0;
    double in_norm = 1.0;
    for (size_t i = 0; i < k; ++i) {
      total += n[i];
      in_norm *= factorial(n[i]);
    }
    if (total == 0) {
      out.add_amplitude(FockBasisState::from_occupations(spectator), amp);
      continue;
    }

    // Distribute each input rail's photons over the output rails.
    std::fill(m.begin(), m.end(), 0);
    std::function<void(size_t, Complex)> expand = [&](size_t i, Complex factor) {
      if (i == k) {
        FockBasisState::Occ occ = spectator;
        double out_norm = 1.0;
        for (size_t j = 0; j < k; ++j) {
          if (m[j] > 0) occ.emplace_back(e.rails_out[j], m[j]);
          out_norm *= factorial(m[j]);
        }
        Complex contrib = amp * factor * std::sqrt(out_norm) / std::sqrt(in_norm);
        out.add_amplitude(FockBasisState::from_occupations(std::move(occ)), contrib);
        return;
      }
      if (n[i] == 0) {
        expand(i + 1, factor);
        return;
      }
      // Compositions of n[i] over output slots with nonzero matrix entries.
      std::function<void(size_t, int, Complex)> comp = [&](size_t j, int left, Complex f) {
        if (j == k) {
          if (left == 0) expand(i + 1, f);
          return;
        }
        Complex mji = e.matrix[j][i];
        int cmax = (std::abs(mji) == 0.0) ? 0 : left;
        Complex pow{1.0, 0.0};
        for (int c = 0; c <= cmax; ++c) {
          m[j] += c;
          comp(j + 1, left - c, f * pow / factorial(c));
          m[j] -= c;
          pow *= mji;
        }
      };
      comp(0, n[i], factor * factorial(n[i]));
    };
    expand(0, Complex{1.0, 0.0});
  }
  out.prune();
  return out;
}

}  // namespace photonloom
