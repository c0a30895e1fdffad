#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "photonloom/circuit.hpp"
#include "photonloom/common.hpp"
#include "photonloom/fock.hpp"

namespace photonloom {

inline std::string fnv1a64_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (ch < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += static_cast<char>(ch);
        }
    }
  }
  return out;
}

struct ReportTerm {
  std::string basis;
  Complex amp;
};

struct ReportBranch {
  std::string label;
  double probability = 0.0;
  std::vector<std::pair<std::string, double>> extra;  // e.g. gamma_in / gamma_out
  std::optional<bool> corrected;
  std::vector<ReportTerm> state;
};

/// One machine-readable run result. `parameters` values are pre-rendered
/// JSON fragments (quoted strings or bare numbers) so each driver controls
/// its own formatting; emission order is the insertion order.
struct RunReport {
  std::string circuit_hash;
  std::optional<double> oracle_max_diff;
  std::vector<std::pair<std::string, std::string>> parameters;
  double probability = 0.0;
  std::optional<double> claimed;
  std::vector<ReportTerm> state;
  std::vector<ReportBranch> branches;
};

/// Terms of a state sorted by basis label; pass normalized states.
inline std::vector<ReportTerm> report_terms(const PureState& s) {
  std::vector<ReportTerm> terms;
  for (const auto& [basis, amp] : s.terms()) terms.push_back({basis.label(), amp});
  std::sort(terms.begin(), terms.end(),
            [](const ReportTerm& a, const ReportTerm& b) { return a.basis < b.basis; });
  return terms;
}

namespace report_detail {

inline std::string num(double v) { return detail::fmt_real(v); }

inline void emit_terms(std::string& out, const std::vector<ReportTerm>& terms,
                       const std::string& indent) {
  if (terms.empty()) {
    out += "[]";
    return;
  }
  out += "[\n";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out += indent + "  {\"basis\": \"" + json_escape(terms[i].basis) + "\", \"re\": " +
           num(terms[i].amp.real()) + ", \"im\": " + num(terms[i].amp.imag()) + "}";
    out += (i + 1 < terms.size()) ? ",\n" : "\n";
  }
  out += indent + "]";
}

}  // namespace report_detail

/// Report for a plain scripted run: total acceptance probability, one entry
/// per surviving measurement branch, and the conditioned state when the run
/// has exactly one branch.
inline RunReport simulate_report(const Circuit& c, int photon_cap) {
  PureState vac = PureState::vacuum({}, photon_cap);
  RunReport r;
  r.circuit_hash = fnv1a64_hex(print_circuit(c));
  r.parameters.emplace_back("photon_cap", std::to_string(photon_cap));
  for (const auto& b : run_circuit(vac, c)) {
    double p = b.state.norm2();
    r.probability += p;
    if (p <= kZeroNormTol) continue;
    ReportBranch rb;
    rb.label = b.label;
    rb.probability = p;
    rb.state = report_terms(normalized(b.state).first);
    r.branches.push_back(std::move(rb));
  }
  if (r.branches.size() == 1) r.state = r.branches.front().state;
  return r;
}

inline std::string to_json(const RunReport& r) {
  using report_detail::num;
  std::string out;
  out += "{\n";
  out += "  \"meta\": {\n";
  out += "    \"circuit_hash\": \"" + r.circuit_hash + "\",\n";
  if (r.oracle_max_diff)
    out += "    \"oracle_max_diff\": " + num(*r.oracle_max_diff) + ",\n";
  if (r.parameters.empty()) {
    out += "    \"parameters\": {},\n";
  } else {
    out += "    \"parameters\": {\n";
    for (std::size_t i = 0; i < r.parameters.size(); ++i) {
      out += "      \"" + json_escape(r.parameters[i].first) + "\": " +
             r.parameters[i].second;
      out += (i + 1 < r.parameters.size()) ? ",\n" : "\n";
    }
    out += "    },\n";
  }
  out += "    \"tool_version\": \"" + std::string(kToolVersion) + "\"\n";
  out += "  },\n";
  out += "  \"probability\": " + num(r.probability) + ",\n";
  out += "  \"claimed\": " + (r.claimed ? num(*r.claimed) : std::string("null")) + ",\n";
  out += "  \"state\": ";
  report_detail::emit_terms(out, r.state, "  ");
  out += ",\n";
  if (r.branches.empty()) {
    out += "  \"branches\": []\n";
  } else {
    out += "  \"branches\": [\n";
    for (std::size_t i = 0; i < r.branches.size(); ++i) {
      const ReportBranch& b = r.branches[i];
      out += "    {\n";
      out += "      \"label\": \"" + json_escape(b.label) + "\",\n";
      out += "      \"probability\": " + num(b.probability);
      for (const auto& [k, v] : b.extra) out += ",\n      \"" + json_escape(k) + "\": " + num(v);
      if (b.corrected)
        out += ",\n      \"corrected\": " + std::string(*b.corrected ? "true" : "false");
      if (!b.state.empty()) {
        out += ",\n      \"state\": ";
        report_detail::emit_terms(out, b.state, "      ");
      }
      out += "\n    }";
      out += (i + 1 < r.branches.size()) ? ",\n" : "\n";
    }
    out += "  ]\n";
  }
  out += "}\n";
  return out;
}

}  // namespace photonloom
