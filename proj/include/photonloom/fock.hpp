#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "photonloom/common.hpp"

namespace photonloom {

enum class Pol : unsigned char { H = 0, V = 1 };

inline char pol_char(Pol p) { return p == Pol::H ? 'H' : 'V'; }

/// One polarization rail: a spatial mode name plus H or V.
struct RailId {
  std::string mode;
  Pol pol = Pol::H;

  friend bool operator==(const RailId&, const RailId&) = default;
  friend auto operator<=>(const RailId& a, const RailId& b) {
    if (auto c = a.mode <=> b.mode; c != 0) return c;
    return a.pol <=> b.pol;
  }
};

inline RailId rail(std::string mode, Pol pol) { return RailId{std::move(mode), pol}; }

/// A number state over a sparse set of rails. Canonical form: occupations
/// sorted by rail, zero counts absent.
class FockBasisState {
 public:
  using Occ = std::vector<std::pair<RailId, int>>;

  FockBasisState() = default;

  static FockBasisState from_occupations(Occ occ) {
    std::sort(occ.begin(), occ.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Occ canon;
    canon.reserve(occ.size());
    for (auto& [r, n] : occ) {
      if (n < 0) throw SimError("negative occupation for rail " + r.mode);
      if (!canon.empty() && canon.back().first == r)
        throw DuplicateRail("duplicate rail " + r.mode + "." + pol_char(r.pol) +
                            " in basis state");
      if (n > 0) canon.emplace_back(r, n);
    }
    FockBasisState s;
    s.occ_ = std::move(canon);
    return s;
  }

  const Occ& occupations() const { return occ_; }

  int count(const RailId& r) const {
    auto it = std::lower_bound(occ_.begin(), occ_.end(), r,
                               [](const auto& p, const RailId& q) { return p.first < q; });
    return (it != occ_.end() && it->first == r) ? it->second : 0;
  }

  int mode_total(const std::string& mode) const {
    return count({mode, Pol::H}) + count({mode, Pol::V});
  }

  int total_photons() const {
    int n = 0;
    for (const auto& [r, c] : occ_) n += c;
    return n;
  }

  FockBasisState adding(const RailId& r, int n) const {
    Occ occ = occ_;
    auto it = std::find_if(occ.begin(), occ.end(),
                           [&](const auto& p) { return p.first == r; });
    if (it == occ.end())
      occ.emplace_back(r, n);
    else
      it->second += n;
    return from_occupations(std::move(occ));
  }

  FockBasisState without_rail(const RailId& r) const {
    Occ occ;
    occ.reserve(occ_.size());
    for (const auto& p : occ_)
      if (p.first != r) occ.push_back(p);
    FockBasisState s;
    s.occ_ = std::move(occ);
    return s;
  }

  FockBasisState without_mode(const std::string& mode) const {
    Occ occ;
    occ.reserve(occ_.size());
    for (const auto& p : occ_)
      if (p.first.mode != mode) occ.push_back(p);
    FockBasisState s;
    s.occ_ = std::move(occ);
    return s;
  }

  /// Text form used in reports, e.g. "10.H 11.V" or "5.H^2"; vacuum is "-".
  std::string label() const {
    if (occ_.empty()) return "-";
    std::string out;
    for (const auto& [r, n] : occ_) {
      if (!out.empty()) out += ' ';
      out += r.mode;
      out += '.';
      out += pol_char(r.pol);
      if (n > 1) {
        out += '^';
        out += std::to_string(n);
      }
    }
    return out;
  }

  friend bool operator==(const FockBasisState&, const FockBasisState&) = default;
  friend auto operator<=>(const FockBasisState& a, const FockBasisState& b) {
    return std::lexicographical_compare_three_way(a.occ_.begin(), a.occ_.end(),
                                                  b.occ_.begin(), b.occ_.end());
  }

 private:
  Occ occ_;
};

/// Sparse complex-amplitude state over a registry of rails. States are in
/// general sub-normalized: after post-selection the squared norm is the
/// cumulative acceptance probability of the branch.
class PureState {
 public:
  using TermMap = std::map<FockBasisState, Complex>;

  PureState() = default;

  static PureState vacuum(std::set<RailId> registry, int photon_cap = kDefaultPhotonCap) {
    PureState s;
    s.registry_ = std::move(registry);
    s.photon_cap_ = photon_cap;
    s.terms_[FockBasisState{}] = Complex{1.0, 0.0};
    return s;
  }

  /// Empty state (no terms) over a registry; building block for operations.
  static PureState zero(std::set<RailId> registry, int photon_cap = kDefaultPhotonCap) {
    PureState s;
    s.registry_ = std::move(registry);
    s.photon_cap_ = photon_cap;
    return s;
  }

  const TermMap& terms() const { return terms_; }
  const std::set<RailId>& registry() const { return registry_; }
  int photon_cap() const { return photon_cap_; }

  bool has_rail(const RailId& r) const { return registry_.count(r) > 0; }

  void register_rail(const RailId& r) { registry_.insert(r); }
  void register_mode(const std::string& mode) {
    registry_.insert({mode, Pol::H});
    registry_.insert({mode, Pol::V});
  }
  void unregister_rail(const RailId& r) { registry_.erase(r); }

  Complex amplitude(const FockBasisState& b) const {
    auto it = terms_.find(b);
    return it == terms_.end() ? Complex{0.0, 0.0} : it->second;
  }

  void add_amplitude(const FockBasisState& b, Complex a) {
    validate_term(b);
    terms_[b] += a;
  }

  void set_amplitude(const FockBasisState& b, Complex a) {
    validate_term(b);
    terms_[b] = a;
  }

  double norm2() const {
    double n = 0.0;
    for (const auto& [b, a] : terms_) n += std::norm(a);
    return n;
  }

  double norm() const { return std::sqrt(norm2()); }

  int max_total_photons() const {
    int n = 0;
    for (const auto& [b, a] : terms_) n = std::max(n, b.total_photons());
    return n;
  }

  void prune(double tol = kPruneTol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) < tol)
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  void scale(Complex c) {
    for (auto& [b, a] : terms_) a *= c;
  }

 private:
  void validate_term(const FockBasisState& b) const {
    for (const auto& [r, n] : b.occupations())
      if (!registry_.count(r))
        throw UnknownRail("rail " + r.mode + "." + pol_char(r.pol) +
                          " not in mode registry");
    if (b.total_photons() > photon_cap_)
      throw PhotonCapExceeded("basis state exceeds photon cap " +
                              std::to_string(photon_cap_));
  }

  TermMap terms_;
  std::set<RailId> registry_;
  int photon_cap_ = kDefaultPhotonCap;
};

/// Tensor product of states over disjoint registries.
inline PureState tensor(const PureState& a, const PureState& b) {
  for (const auto& r : b.registry())
    if (a.has_rail(r))
      throw OverlappingRegistries("tensor: rail " + r.mode + "." + pol_char(r.pol) +
                                  " present in both registries");
  std::set<RailId> reg = a.registry();
  reg.insert(b.registry().begin(), b.registry().end());
  PureState out = PureState::zero(std::move(reg), std::max(a.photon_cap(), b.photon_cap()));
  for (const auto& [ba, aa] : a.terms()) {
    for (const auto& [bb, ab] : b.terms()) {
      FockBasisState::Occ occ = ba.occupations();
      const auto& obb = bb.occupations();
      occ.insert(occ.end(), obb.begin(), obb.end());
      out.add_amplitude(FockBasisState::from_occupations(std::move(occ)), aa * ab);
    }
  }
  out.prune();
  return out;
}

inline Complex inner_product(const PureState& a, const PureState& b) {
  if (a.registry() != b.registry())
    throw RegistryMismatch("inner_product: mode registries differ");
  // Iterate over the smaller term map.
  const PureState& small = a.terms().size() <= b.terms().size() ? a : b;
  const PureState& big = a.terms().size() <= b.terms().size() ? b : a;
  Complex acc{0.0, 0.0};
  const bool small_is_a = &small == &a;
  for (const auto& [basis, amp] : small.terms()) {
    Complex other = big.amplitude(basis);
    acc += small_is_a ? std::conj(amp) * other : std::conj(other) * amp;
  }
  return acc;
}

/// Returns the unit-norm state and the norm that was divided out.
inline std::pair<PureState, double> normalized(const PureState& s) {
  double n2 = s.norm2();
  if (n2 <= kZeroNormTol) throw ZeroState("normalize: state has vanishing norm");
  double n = std::sqrt(n2);
  PureState out = s;
  out.scale(Complex{1.0 / n, 0.0});
  return {std::move(out), n};
}

/// |<a|b>|^2 for unit rays: norms are divided out, so sub-normalized branches
/// can be compared directly against unit targets.
inline double fidelity_pure(const PureState& a, const PureState& b) {
  double na = a.norm2(), nb = b.norm2();
  if (na <= kZeroNormTol || nb <= kZeroNormTol)
    throw ZeroState("fidelity: zero state");
  return std::norm(inner_product(a, b)) / (na * nb);
}

}  // namespace photonloom
