#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "photonloom/circuit.hpp"
#include "photonloom/common.hpp"
#include "photonloom/oracle.hpp"
#include "photonloom/protocols.hpp"
#include "photonloom/report.hpp"
#include "photonloom/script.hpp"
#include "photonloom/verify.hpp"

namespace {

using namespace photonloom;

struct UsageError {
  std::string message;
};

int photon_cap_from_env() {
  const char* env = std::getenv("PHOTONLOOM_PHOTON_CAP");
  if (!env) return kDefaultPhotonCap;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (*env == '\0' || *end != '\0' || v < 1 || v > 64)
    throw UsageError{"PHOTONLOOM_PHOTON_CAP must be an integer in [1,64], got '" +
                     std::string(env) + "'"};
  return static_cast<int>(v);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError("cannot read circuit file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw SimError("cannot open output file: " + out_path);
  out << text;
}

std::string complex_param(const Complex& c) {
  return "\"" + detail::fmt_complex(c) + "\"";
}

Complex parse_complex_arg(const std::string& text, const std::string& name) {
  try {
    return script_detail::parse_complex({text, 0, 0});
  } catch (const ParseError&) {
    throw UsageError{"--" + name + " expects a real or complex literal, got '" + text + "'"};
  }
}

int cmd_simulate(const std::string& path, bool csv, const std::string& out_path) {
  int cap = photon_cap_from_env();
  Circuit c = parse_circuit(read_file(path));
  RunReport r = simulate_report(c, cap);

  if (csv) {
    std::string out = "branch,basis,re,im\n";
    for (const auto& b : r.branches)
      for (const auto& t : b.state)
        out += b.label + "," + t.basis + "," + detail::fmt_real(t.amp.real()) + "," +
               detail::fmt_real(t.amp.imag()) + "\n";
    write_output(out, out_path);
  } else {
    write_output(to_json(r), out_path);
  }
  return 0;
}

int cmd_concentrate(const std::string& alpha_text, const std::string& beta_text, bool oracle) {
  int cap = photon_cap_from_env();
  Complex a = parse_complex_arg(alpha_text, "alpha");
  Complex b = parse_complex_arg(beta_text, "beta");
  double n = std::sqrt(std::norm(a) + std::norm(b));
  if (n < 1e-150) throw SimError("alpha and beta cannot both be zero");
  a /= n;
  b /= n;

  ConcentrationResult res = run_concentration({a, b}, cap);

  RunReport r;
  r.circuit_hash = fnv1a64_hex(print_circuit(build_concentration_circuit(a, b)));
  r.parameters.emplace_back("alpha", complex_param(a));
  r.parameters.emplace_back("beta", complex_param(b));
  r.parameters.emplace_back("photon_cap", std::to_string(cap));
  r.probability = res.success_probability;
  r.claimed = res.claimed_probability;
  if (!res.degenerate) r.state = report_terms(res.ghz_state);
  for (const auto& o : res.bell_outcomes) {
    ReportBranch rb;
    rb.label = o.label;
    rb.probability = res.success_probability * o.probability;
    rb.corrected = o.correction_applied;
    rb.state = report_terms(o.bell_state);
    r.branches.push_back(std::move(rb));
  }

  double diff = 0.0;
  if (oracle) {
    diff = concentration_oracle_diff(a, b, cap);
    r.oracle_max_diff = diff;
  }
  write_output(to_json(r), "");
  if (oracle && diff > kOracleTol) {
    std::cerr << "error: sparse engine and dense oracle disagree by " << diff << "\n";
    return 3;
  }
  return 0;
}

int cmd_purify(double gamma, std::optional<int> rounds, std::optional<double> target,
               const std::string& mode) {
  int cap = photon_cap_from_env();
  bool fast = (mode == "fast");

  std::vector<PurificationRound> rs;
  if (target) {
    rs = iterate_purification(gamma, *target, rounds.value_or(64), fast, cap);
  } else {
    int n = rounds.value_or(1);
    if (n < 0) throw UsageError{"--rounds must be non-negative"};
    double g = gamma;
    for (int k = 0; k < n; ++k) {
      PurificationRound round =
          fast ? fast_purification_round(g, cap) : run_purification_round(g, true, cap);
      g = round.gamma_out;
      rs.push_back(std::move(round));
    }
  }

  double claimed = gamma;
  for (std::size_t k = 0; k < rs.size(); ++k) claimed = gamma_update_map(claimed);

  RunReport r;
  r.circuit_hash = fnv1a64_hex(print_circuit(build_purification_circuit(true)));
  r.parameters.emplace_back("gamma", report_detail::num(gamma));
  r.parameters.emplace_back("mode", "\"" + mode + "\"");
  if (target) r.parameters.emplace_back("target", report_detail::num(*target));
  r.parameters.emplace_back("rounds", std::to_string(rs.size()));
  r.parameters.emplace_back("photon_cap", std::to_string(cap));
  r.probability = rs.empty() ? 1.0 : rs.back().acceptance_probability;
  r.claimed = claimed;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    ReportBranch rb;
    rb.label = "round " + std::to_string(k + 1);
    rb.probability = rs[k].acceptance_probability;
    rb.extra.emplace_back("gamma_in", rs[k].gamma_in);
    rb.extra.emplace_back("gamma_out", rs[k].gamma_out);
    r.branches.push_back(std::move(rb));
  }
  write_output(to_json(r), "");
  return 0;
}

int cmd_sweep_gamma(double from, double to, double step, const std::string& mode) {
  int cap = photon_cap_from_env();
  if (step <= 0.0) throw UsageError{"--step must be positive"};
  bool fast = (mode == "fast");
  std::string out = "gamma,gamma_next,acceptance\n";
  for (int k = 0;; ++k) {
    double g = from + k * step;
    if (g > to + 1e-12) break;
    PurificationRound r =
        fast ? fast_purification_round(g, cap) : run_purification_round(g, true, cap);
    out += detail::fmt_real(g) + "," + detail::fmt_real(r.gamma_out) + "," +
           detail::fmt_real(r.acceptance_probability) + "\n";
  }
  write_output(out, "");
  return 0;
}

int cmd_sweep_alpha(int steps) {
  int cap = photon_cap_from_env();
  if (steps < 1) throw UsageError{"--steps must be at least 1"};
  PureState target = ghz_target(cap);
  std::string out = "alpha,beta,probability,claimed,ghz_fidelity\n";
  for (int k = 1; k <= steps; ++k) {
    double alpha = double(k) / double(steps + 1);
    double beta = std::sqrt(1.0 - alpha * alpha);
    ConcentrationResult res = run_concentration({{alpha, 0.0}, {beta, 0.0}}, cap);
    double fid = fidelity_pure(res.ghz_state, target);
    out += detail::fmt_real(alpha) + "," + detail::fmt_real(beta) + "," +
           detail::fmt_real(res.success_probability) + "," +
           detail::fmt_real(res.claimed_probability) + "," + detail::fmt_real(fid) + "\n";
  }
  write_output(out, "");
  return 0;
}

int cmd_verify(int trials, std::uint64_t seed) {
  int cap = photon_cap_from_env();
  bool ok = true;

  double worst_u = element_unitarity_worst(3);
  std::cout << "element transition matrices: max unitarity deviation " << worst_u << "\n";
  ok = ok && worst_u <= kOracleTol;

  VerifySummary sum = run_random_verification(trials, seed);
  std::cout << "random circuits: " << sum.trials << " trials, max amplitude diff "
            << sum.max_diff;
  if (sum.worst_trial >= 0) std::cout << " (trial " << sum.worst_trial << ")";
  std::cout << "\n";
  ok = ok && sum.max_diff <= kOracleTol;

  const double r2 = std::numbers::sqrt2 / 2.0;
  double d1 = concentration_oracle_diff({0.6, 0.0}, {0.8, 0.0}, cap);
  double d2 = concentration_oracle_diff({r2, 0.0}, {r2, 0.0}, cap);
  std::cout << "concentration vs oracle: diff " << d1 << " at alpha=0.6, " << d2
            << " at alpha=1/sqrt(2)\n";
  ok = ok && d1 <= kOracleTol && d2 <= kOracleTol;

  std::cout << (ok ? "verification passed" : "verification FAILED") << " (tolerance "
            << kOracleTol << ")\n";
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polarization-rail linear optics simulator"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a circuit script and report the result");
  std::string sim_path, sim_out;
  bool sim_json = false, sim_csv = false;
  sim->add_option("--circuit", sim_path, "circuit script path")->required();
  auto* fj = sim->add_flag("--json", sim_json, "emit JSON (default)");
  sim->add_flag("--csv", sim_csv, "emit CSV instead of JSON")->excludes(fj);
  sim->add_option("--out", sim_out, "write to a file instead of stdout");

  auto* conc = app.add_subcommand("concentrate", "run the pair-concentration chain");
  std::string conc_alpha, conc_beta;
  bool conc_oracle = false;
  conc->add_option("--alpha", conc_alpha, "H amplitude (complex literal)")->required();
  conc->add_option("--beta", conc_beta, "V amplitude (complex literal)")->required();
  conc->add_flag("--oracle", conc_oracle, "cross-check against the dense oracle");

  auto* pur = app.add_subcommand("purify", "iterate the distillation round");
  double pur_gamma = 0.0;
  int pur_rounds = 0;
  double pur_target = 0.0;
  std::string pur_mode = "circuit";
  pur->add_option("--gamma", pur_gamma, "initial target-state fraction")->required();
  auto* opt_rounds = pur->add_option("--rounds", pur_rounds, "number of rounds (default 1)");
  auto* opt_target = pur->add_option("--target", pur_target, "iterate until this fraction");
  pur->add_option("--mode", pur_mode, "fast (closed form) or circuit (full optics)")
      ->check(CLI::IsMember({"fast", "circuit"}));

  auto* swg = app.add_subcommand("sweep-gamma", "tabulate one round over a gamma range");
  double swg_from = 0.0, swg_to = 0.0, swg_step = 0.0;
  std::string swg_mode = "fast";
  swg->add_option("--from", swg_from, "first gamma")->required();
  swg->add_option("--to", swg_to, "last gamma")->required();
  swg->add_option("--step", swg_step, "gamma increment")->required();
  swg->add_option("--mode", swg_mode, "fast or circuit")
      ->check(CLI::IsMember({"fast", "circuit"}));

  auto* swa = app.add_subcommand("sweep-alpha", "tabulate concentration over alpha");
  int swa_steps = 0;
  swa->add_option("--steps", swa_steps, "number of interior grid points")->required();

  auto* ver = app.add_subcommand("verify", "run the oracle-equivalence suite");
  int ver_trials = 200;
  std::uint64_t ver_seed = 12345;
  ver->add_option("--trials", ver_trials, "random circuit count (default 200)");
  ver->add_option("--seed", ver_seed, "random seed (default 12345)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*sim) return cmd_simulate(sim_path, sim_csv, sim_out);
    if (*conc) return cmd_concentrate(conc_alpha, conc_beta, conc_oracle);
    if (*pur)
      return cmd_purify(pur_gamma,
                        *opt_rounds ? std::optional<int>(pur_rounds) : std::nullopt,
                        *opt_target ? std::optional<double>(pur_target) : std::nullopt,
                        pur_mode);
    if (*swg) return cmd_sweep_gamma(swg_from, swg_to, swg_step, swg_mode);
    if (*swa) return cmd_sweep_alpha(swa_steps);
    if (*ver) return cmd_verify(ver_trials, ver_seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.message << "\n";
    return 1;
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
