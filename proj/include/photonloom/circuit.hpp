#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "photonloom/common.hpp"
#include "photonloom/fock.hpp"
#include "photonloom/measurement.hpp"
#include "photonloom/optics.hpp"

namespace photonloom {

/// One circuit statement, mirroring the script language one to one.
struct Stmt {
  enum class Kind { Modes, Source, Pair, Pbs, Hwp, Bs, Detect, DetectRail, MeasureDiag, Relabel };
  Kind kind = Kind::Modes;
  std::vector<std::string> modes;  // Modes: declared names; Pbs/Bs: in1 in2 out1 out2;
                                   // others: the single mode (Relabel: old new)
  Pol pol = Pol::H;                // Source, DetectRail
  int count = 0;                   // Source, Detect, DetectRail
  Complex alpha{0.0, 0.0};         // Pair
  Complex beta{0.0, 0.0};          // Pair
  double value = 0.0;              // Hwp angle (deg), Bs transmittance

  static Stmt declare(std::vector<std::string> names) {
    Stmt s;
    s.kind = Kind::Modes;
    s.modes = std::move(names);
    return s;
  }
  static Stmt source(std::string mode, Pol pol, int n) {
    Stmt s;
    s.kind = Kind::Source;
    s.modes = {std::move(mode)};
    s.pol = pol;
    s.count = n;
    return s;
  }
  static Stmt pair(std::string m1, std::string m2, Complex alpha, Complex beta) {
    Stmt s;
    s.kind = Kind::Pair;
    s.modes = {std::move(m1), std::move(m2)};
    s.alpha = alpha;
    s.beta = beta;
    return s;
  }
  static Stmt pbs(std::string in1, std::string in2, std::string out1, std::string out2) {
    Stmt s;
    s.kind = Kind::Pbs;
    s.modes = {std::move(in1), std::move(in2), std::move(out1), std::move(out2)};
    return s;
  }
  static Stmt hwp(std::string mode, double theta_deg) {
    Stmt s;
    s.kind = Kind::Hwp;
    s.modes = {std::move(mode)};
    s.value = theta_deg;
    return s;
  }
  static Stmt bs(std::string in1, std::string in2, std::string out1, std::string out2,
                 double T) {
    Stmt s;
    s.kind = Kind::Bs;
    s.modes = {std::move(in1), std::move(in2), std::move(out1), std::move(out2)};
    s.value = T;
    return s;
  }
  static Stmt detect(std::string mode, int n) {
    Stmt s;
    s.kind = Kind::Detect;
    s.modes = {std::move(mode)};
    s.count = n;
    return s;
  }
  static Stmt detect_rail(std::string mode, Pol pol, int n) {
    Stmt s;
    s.kind = Kind::DetectRail;
    s.modes = {std::move(mode)};
    s.pol = pol;
    s.count = n;
    return s;
  }
  static Stmt measure_diag(std::string mode) {
    Stmt s;
    s.kind = Kind::MeasureDiag;
    s.modes = {std::move(mode)};
    return s;
  }
  static Stmt relabel(std::string old_mode, std::string new_mode) {
    Stmt s;
    s.kind = Kind::Relabel;
    s.modes = {std::move(old_mode), std::move(new_mode)};
    return s;
  }
};

struct Circuit {
  std::vector<Stmt> stmts;

  void append(const Circuit& other, size_t skip_front = 0) {
    stmts.insert(stmts.end(), other.stmts.begin() + static_cast<long>(skip_front),
                 other.stmts.end());
  }
};

/// One post-selected evolution path. The state is unnormalized: its squared
/// norm is the cumulative probability of this branch (all detector
/// acceptances and measurement outcomes so far).
struct RunBranch {
  std::string label;  // measure-diag outcomes, e.g. "b:+45 d:-45"; empty if none
  PureState state;
};

namespace detail {

inline std::string fmt_real(double x) {
  if (x == 0.0) x = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt_complex(const Complex& c) {
  if (c.imag() == 0.0) return fmt_real(c.real());
  std::string s = fmt_real(c.real());
  s += (c.imag() < 0.0) ? '-' : '+';
  s += fmt_real(std::abs(c.imag()));
  s += 'j';
  return s;
}

inline void require_vacuum_mode(const PureState& s, const std::string& mode,
                                const char* what) {
  RailId h{mode, Pol::H}, v{mode, Pol::V};
  if (!s.has_rail(h) || !s.has_rail(v))
    throw UnknownRail(std::string(what) + ": mode " + mode + " not in mode registry");
  for (const auto& [basis, amp] : s.terms())
    if (basis.mode_total(mode) != 0)
      throw OccupiedOutputRail(std::string(what) + ": mode " + mode + " is occupied");
}

}  // namespace detail

/// Canonical text form; parse(print(c)) reproduces the statement list.
inline std::string print_circuit(const Circuit& c) {
  std::string out;
  for (const auto& s : c.stmts) {
    switch (s.kind) {
      case Stmt::Kind::Modes:
        out += "mode";
        for (const auto& m : s.modes) out += " " + m;
        break;
      case Stmt::Kind::Source:
        out += "source " + s.modes[0] + " " + pol_char(s.pol) + " " + std::to_string(s.count);
        break;
      case Stmt::Kind::Pair:
        out += "pair " + s.modes[0] + " " + s.modes[1] + " " + detail::fmt_complex(s.alpha) +
               " " + detail::fmt_complex(s.beta);
        break;
      case Stmt::Kind::Pbs:
        out += "pbs " + s.modes[0] + " " + s.modes[1] + " " + s.modes[2] + " " + s.modes[3];
        break;
      case Stmt::Kind::Hwp:
        out += "hwp " + s.modes[0] + " " + detail::fmt_real(s.value);
        break;
      case Stmt::Kind::Bs:
        out += "bs " + s.modes[0] + " " + s.modes[1] + " " + s.modes[2] + " " + s.modes[3] +
               " " + detail::fmt_real(s.value);
        break;
      case Stmt::Kind::Detect:
        out += "detect " + s.modes[0] + " " + std::to_string(s.count);
        break;
      case Stmt::Kind::DetectRail:
        out += "detect-rail " + s.modes[0] + " " + pol_char(s.pol) + " " +
               std::to_string(s.count);
        break;
      case Stmt::Kind::MeasureDiag:
        out += "measure-diag " + s.modes[0];
        break;
      case Stmt::Kind::Relabel:
        out += "relabel " + s.modes[0] + " " + s.modes[1];
        break;
    }
    out += '\n';
  }
  return out;
}

/// Applies one non-branching statement to a state in place.
/// MeasureDiag is handled by run_circuit, which owns branching.
inline PureState apply_stmt(const PureState& s, const Stmt& st) {
  switch (st.kind) {
    case Stmt::Kind::Modes: {
      PureState out = s;
      for (const auto& m : st.modes) out.register_mode(m);
      return out;
    }
    case Stmt::Kind::Source: {
      detail::require_vacuum_mode(s, st.modes[0], "source");
      RailId r{st.modes[0], st.pol};
      PureState out = PureState::zero(s.registry(), s.photon_cap());
      for (const auto& [basis, amp] : s.terms())
        out.add_amplitude(st.count > 0 ? basis.adding(r, st.count) : basis, amp);
      return out;
    }
    case Stmt::Kind::Pair: {
      detail::require_vacuum_mode(s, st.modes[0], "pair");
      detail::require_vacuum_mode(s, st.modes[1], "pair");
      RailId h1{st.modes[0], Pol::H}, h2{st.modes[1], Pol::H};
      RailId v1{st.modes[0], Pol::V}, v2{st.modes[1], Pol::V};
      PureState out = PureState::zero(s.registry(), s.photon_cap());
      for (const auto& [basis, amp] : s.terms()) {
        out.add_amplitude(basis.adding(h1, 1).adding(h2, 1), amp * st.alpha);
        out.add_amplitude(basis.adding(v1, 1).adding(v2, 1), amp * st.beta);
      }
      out.prune();
      return out;
    }
    case Stmt::Kind::Pbs:
      return apply_element(s, make_pbs(st.modes[0], st.modes[1], st.modes[2], st.modes[3]));
    case Stmt::Kind::Hwp:
      return apply_element(s, make_waveplate(st.modes[0], st.value));
    case Stmt::Kind::Bs:
      return apply_element(
          s, make_beamsplitter(st.modes[0], st.modes[1], st.modes[2], st.modes[3], st.value));
    case Stmt::Kind::Detect: {
      DetectionPattern p;
      p.constraints = {DetectionConstraint::on_mode(st.modes[0], st.count)};
      return postselect(s, p);
    }
    case Stmt::Kind::DetectRail: {
      DetectionPattern p;
      p.constraints = {DetectionConstraint::on_rail({st.modes[0], st.pol}, st.count)};
      return postselect(s, p);
    }
    case Stmt::Kind::Relabel:
      return apply_element(s, make_relabel(st.modes[0], st.modes[1]));
    case Stmt::Kind::MeasureDiag:
      throw SimError("measure-diag requires run_circuit");
  }
  throw SimError("unhandled statement");
}

/// Runs a circuit on an input state. Every measure-diag statement splits each
/// surviving branch into its outcomes; branch states stay unnormalized so
/// squared norms compose into cumulative probabilities.
inline std::vector<RunBranch> run_circuit(const PureState& input, const Circuit& c) {
  std::vector<RunBranch> branches{{"", input}};
  for (const auto& st : c.stmts) {
    if (st.kind == Stmt::Kind::MeasureDiag) {
      std::vector<RunBranch> next;
      for (const auto& b : branches) {
        if (b.state.norm2() <= kZeroNormTol) {
          next.push_back(b);
          continue;
        }
        for (const auto& o : measure_diagonal(b.state, st.modes[0])) {
          RunBranch nb;
          nb.label = b.label.empty() ? "" : b.label + " ";
          nb.label += st.modes[0] + ":" + o.label;
          nb.state = o.conditioned;
          nb.state.scale(Complex{std::sqrt(o.probability), 0.0});
          next.push_back(std::move(nb));
        }
      }
      branches = std::move(next);
    } else {
      for (auto& b : branches) b.state = apply_stmt(b.state, st);
    }
  }
  return branches;
}

}  // namespace photonloom
