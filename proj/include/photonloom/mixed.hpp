#pragma once

#include <string>
#include <utility>
#include <vector>

#include "photonloom/circuit.hpp"
#include "photonloom/common.hpp"
#include "photonloom/fock.hpp"

namespace photonloom {

/// Weighted ensemble of normalized pure branches. Weights carry all
/// probability, so a sub-normalized ensemble encodes accumulated rejection.
struct MixedBranch {
  double weight = 0.0;
  PureState state;  // normalized
};

class MixedState {
 public:
  MixedState() = default;
  explicit MixedState(std::vector<MixedBranch> branches) : branches_(std::move(branches)) {}

  static MixedState pure(PureState s) {
    MixedState m;
    m.add_branch(1.0, std::move(s));
    return m;
  }

  void add_branch(double weight, PureState s) {
    if (weight < 0.0) throw SimError("ensemble weight must be non-negative");
    branches_.push_back({weight, std::move(s)});
  }

  const std::vector<MixedBranch>& branches() const { return branches_; }
  bool empty() const { return branches_.empty(); }

  double total_weight() const {
    double w = 0.0;
    for (const auto& b : branches_) w += b.weight;
    return w;
  }

  /// Weights rescaled to sum to 1.
  MixedState renormalized() const {
    double w = total_weight();
    if (w <= kZeroNormTol) throw ZeroEnsemble("ensemble has no weight");
    MixedState out;
    out.branches_ = branches_;
    for (auto& b : out.branches_) b.weight /= w;
    return out;
  }

 private:
  std::vector<MixedBranch> branches_;
};

/// Runs the circuit over every branch independently. Unitary steps leave
/// weights alone; post-selection and measurement multiply each branch weight
/// by that branch's acceptance probability and renormalize its state.
/// Branches whose acceptance vanishes are dropped.
inline MixedState apply_circuit_mixed(const MixedState& m, const Circuit& c) {
  MixedState out;
  for (const auto& b : m.branches()) {
    for (const auto& rb : run_circuit(b.state, c)) {
      double p = rb.state.norm2();
      if (p <= kZeroNormTol) continue;
      out.add_branch(b.weight * p, normalized(rb.state).first);
    }
  }
  return out;
}

/// Weight of the target pure state within a rank-small ensemble.
struct FractionReport {
  double gamma = 0.0;           // total weight of branches matching target
  PureState target;             // the reference state, normalized
  double residual_weight = 0.0; // 1 - gamma after renormalization
};

/// gamma = total renormalized weight of branches with fidelity >= 1 - 1e-9
/// to the target ray.
inline FractionReport fraction_of(const MixedState& m, const PureState& target) {
  MixedState norm = m.renormalized();
  FractionReport r;
  r.target = normalized(target).first;
  for (const auto& b : norm.branches()) {
    if (fidelity_pure(b.state, r.target) >= 1.0 - kBranchMatchTol) r.gamma += b.weight;
  }
  r.residual_weight = 1.0 - r.gamma;
  return r;
}

/// <target| rho |target> for the renormalized ensemble.
inline double fidelity_mixed(const MixedState& m, const PureState& target) {
  MixedState norm = m.renormalized();
  PureState t = normalized(target).first;
  double f = 0.0;
  for (const auto& b : norm.branches()) f += b.weight * fidelity_pure(b.state, t);
  return f;
}

}  // namespace photonloom
