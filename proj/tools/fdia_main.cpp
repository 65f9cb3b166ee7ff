#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fdia/attack.hpp"
#include "fdia/demo.hpp"
#include "fdia/impact.hpp"
#include "fdia/riccati.hpp"
#include "fdia/sim.hpp"
#include "fdia/system_io.hpp"
#include "fdia/toeplitz.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitAnalysisNegative = 2;

struct CommonOptions {
  bool demo = false;
  std::string config_path;
  std::string interpretation = "paper-literal";
  std::optional<int> horizon;
  double rank_tol = fdia::kDefaultRankTol;
  double psd_tol = fdia::kDefaultPsdTol;
  std::optional<std::string> out_dir;
  bool dump_operators = false;
};

void add_common_options(CLI::App* cmd, CommonOptions* opts) {
  auto* demo = cmd->add_flag("--demo", opts->demo, "use the built-in power-system fixture");
  cmd->add_option("--config", opts->config_path, "JSON system description")
      ->excludes(demo);
  cmd->add_option("--detector-interpretation", opts->interpretation,
                  "residual definition for --demo: paper-literal emits the "
                  "observer's predicted output, residual-style the innovation")
      ->check(CLI::IsMember({"paper-literal", "residual-style"}));
  cmd->add_option("--horizon", opts->horizon, "override the horizon length")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rank-tol", opts->rank_tol,
                  "relative singular-value threshold for rank decisions")
      ->check(CLI::Range(1e-300, 1e-2));
  cmd->add_option("--psd-tol", opts->psd_tol,
                  "relative tolerance for the recursion existence checks")
      ->check(CLI::Range(1e-300, 1e-2));
  cmd->add_option("--out", opts->out_dir, "directory for file outputs");
  cmd->add_flag("--dump-operators", opts->dump_operators,
                "also write the stacked response maps as CSV");
}

fdia::SystemConfig load_config(const CommonOptions& opts) {
  if (opts.demo) {
    const auto interp = opts.interpretation == "residual-style"
                            ? fdia::DetectorInterpretation::ResidualStyle
                            : fdia::DetectorInterpretation::PaperLiteral;
    return fdia::demo_power_system(interp);
  }
  if (opts.config_path.empty()) {
    throw fdia::ConfigError("either --demo or --config <path> is required");
  }
  return fdia::load_system_config_file(opts.config_path);
}

std::filesystem::path ensure_out_dir(const std::string& dir) {
  std::filesystem::path path(dir);
  std::filesystem::create_directories(path);
  return path;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_matrix_csv(const std::filesystem::path& path, const fdia::Matrix& M) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      os << M(i, j) << (j + 1 < M.cols() ? "," : "");
    }
    os << "\n";
  }
  write_file(path, os.str());
}

json vector_to_json(const fdia::Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json report_to_json(const fdia::ImpactReport& report) {
  json j;
  j["bounded"] = report.bounded;
  j["gamma_star"] = report.bounded ? json(report.gamma_star) : json(nullptr);
  j["kernel_margin"] = report.kernel_margin;
  j["rank_Tr"] = report.rank_Tr;
  j["certificate_min_eig"] = report.certificate_min_eig.has_value()
                                 ? json(*report.certificate_min_eig)
                                 : json(nullptr);
  return j;
}

json kkt_to_json(const fdia::KktCertificate& kkt) {
  json j;
  j["primal_feasibility"] = kkt.primal_feasibility;
  j["dual_feasibility"] = kkt.dual_feasibility;
  j["complementary_slackness"] = kkt.complementary_slackness;
  j["stationarity"] = kkt.stationarity;
  j["psd_condition"] = kkt.psd_condition;
  j["conditions_ok"] = {kkt.primal_feasibility_ok, kkt.dual_feasibility_ok,
                        kkt.complementary_slackness_ok, kkt.stationarity_ok,
                        kkt.psd_condition_ok};
  j["pass"] = kkt.pass;
  return j;
}

std::string attack_trace_csv(const fdia::Signal& a) {
  std::ostringstream os;
  os.precision(17);
  const Eigen::Index na = a.empty() ? 0 : a.front().size();
  os << "k";
  for (Eigen::Index i = 1; i <= na; ++i) os << ",a_" << i;
  os << "\n";
  for (std::size_t k = 0; k < a.size(); ++k) {
    os << k;
    for (Eigen::Index i = 0; i < na; ++i) os << "," << a[k](i);
    os << "\n";
  }
  return os.str();
}

/// Reads an attack sequence from CSV with header k,a_1..a_na (extra columns
/// such as cumulative energies are ignored).
fdia::Signal read_attack_csv(const std::string& path, Eigen::Index n_a) {
  std::ifstream in(path);
  if (!in) throw fdia::ConfigError("cannot open attack file: " + path);

  std::string header;
  if (!std::getline(in, header)) {
    throw fdia::ConfigError("attack file is empty: " + path);
  }
  std::vector<int> a_columns;
  {
    std::stringstream ss(header);
    std::string cell;
    int idx = 0;
    while (std::getline(ss, cell, ',')) {
      if (cell.rfind("a_", 0) == 0) a_columns.push_back(idx);
      ++idx;
    }
  }
  if (static_cast<Eigen::Index>(a_columns.size()) != n_a) {
    throw fdia::ConfigError(
        "attack file has " + std::to_string(a_columns.size()) +
        " attack columns, the system needs " + std::to_string(n_a));
  }

  fdia::Signal a;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    fdia::Vector sample(n_a);
    for (Eigen::Index i = 0; i < n_a; ++i) {
      sample(i) = row.at(static_cast<std::size_t>(a_columns[static_cast<std::size_t>(i)]));
    }
    a.push_back(sample);
  }
  return a;
}

fdia::Vector read_v_file(const std::string& path, Eigen::Index expected) {
  std::ifstream in(path);
  if (!in) throw fdia::ConfigError("cannot open parameter file: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw fdia::ConfigError(std::string("parameter file: ") + e.what());
  }
  if (root.is_object() && root.contains("v")) root = root.at("v");
  if (!root.is_array()) {
    throw fdia::ConfigError("parameter file must hold a JSON array");
  }
  std::vector<double> flat;
  for (const auto& item : root) {
    if (item.is_array()) {
      for (const auto& x : item) flat.push_back(x.get<double>());
    } else {
      flat.push_back(item.get<double>());
    }
  }
  if (static_cast<Eigen::Index>(flat.size()) != expected) {
    throw fdia::ConfigError("parameter sequence has " +
                            std::to_string(flat.size()) + " entries, expected " +
                            std::to_string(expected));
  }
  fdia::Vector v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v(i) = flat[static_cast<std::size_t>(i)];
  return v;
}

struct Pipeline {
  fdia::ClosedLoopSystem sys;
  fdia::ToeplitzOperator Tp, Tr;
};

Pipeline build_pipeline(const CommonOptions& opts) {
  const auto config = load_config(opts);
  Pipeline p{fdia::build_closed_loop(config, opts.horizon), {}, {}};
  p.Tp = fdia::build_open_loop(p.sys, fdia::OutputKind::Performance);
  p.Tr = fdia::build_open_loop(p.sys, fdia::OutputKind::Residual);
  if (opts.dump_operators && opts.out_dir.has_value()) {
    const auto dir = ensure_out_dir(*opts.out_dir);
    write_matrix_csv(dir / "T_p.csv", p.Tp.M);
    write_matrix_csv(dir / "T_r.csv", p.Tr.M);
  }
  return p;
}

json assess_json(const Pipeline& p, const CommonOptions& opts) {
  const auto bound = fdia::check_bounded(p.Tp, p.Tr, opts.rank_tol);
  json out;
  if (bound.bounded) {
    out = report_to_json(fdia::compute_gamma_star(p.Tp, p.Tr, opts.rank_tol));
  } else {
    fdia::ImpactReport report;
    report.bounded = false;
    report.gamma_star = std::numeric_limits<double>::infinity();
    report.kernel_margin = bound.kernel_margin;
    report.rank_Tr = bound.rank_Tr;
    out = report_to_json(report);
  }
  if (const auto witness =
          fdia::check_feedthrough_unbounded(p.sys, 0.0, opts.rank_tol)) {
    out["feedthrough_witness"] = vector_to_json(*witness);
  }
  return out;
}

int cmd_assess(const CommonOptions& opts) {
  const Pipeline p = build_pipeline(opts);
  const json out = assess_json(p, opts);
  std::cout << out.dump(2) << "\n";
  if (opts.out_dir.has_value()) {
    write_file(ensure_out_dir(*opts.out_dir) / "impact.json", out.dump(2) + "\n");
  }
  return out.at("bounded").get<bool>() ? kExitOk : kExitAnalysisNegative;
}

int cmd_synthesize(const CommonOptions& opts, const std::string& v_file) {
  const Pipeline p = build_pipeline(opts);
  const auto bound = fdia::check_bounded(p.Tp, p.Tr, opts.rank_tol);
  if (!bound.bounded) {
    std::cerr << "impact is unbounded (kernel margin " << bound.kernel_margin
              << "); no boundary attack exists\n";
    return kExitAnalysisNegative;
  }
  const auto report = fdia::compute_gamma_star(p.Tp, p.Tr, opts.rank_tol);
  const auto weights = fdia::LagrangianWeights::from(p.sys, report.gamma_star);
  const auto gre = fdia::solve_gre(p.sys, weights, opts.psd_tol);
  if (!gre.exists) {
    std::cerr << "recursion failed at step " << gre.failure_step.value_or(-1)
              << " (" << (gre.failure_reason == fdia::GreFailure::Condition10Violated
                              ? "indefinite input weight"
                              : "kernel inclusion violated")
              << "); impact is unbounded at gamma = " << weights.gamma << "\n";
    return kExitAnalysisNegative;
  }

  const auto Tpv =
      fdia::build_feedback_parameterized(p.sys, gre, fdia::OutputKind::Performance);
  const auto Trv =
      fdia::build_feedback_parameterized(p.sys, gre, fdia::OutputKind::Residual);

  fdia::Vector v;
  if (!v_file.empty()) {
    const auto user_v = read_v_file(v_file, Trv.M.cols());
    v = fdia::select_v(Tpv, Trv, report.gamma_star,
                       fdia::VStrategy::UserSupplied, user_v, opts.rank_tol);
  } else {
    v = fdia::select_v(Tpv, Trv, report.gamma_star,
                       fdia::VStrategy::PencilEigenvector, std::nullopt,
                       opts.rank_tol);
  }
  const auto plan = fdia::synthesize_attack(p.sys, gre, v);

  json out;
  out["gamma_star"] = report.gamma_star;
  out["predicted_perf_energy"] = plan.predicted_perf_energy;
  out["predicted_det_energy"] = plan.predicted_det_energy;
  out["v"] = vector_to_json(plan.v);
  out["kkt"] = kkt_to_json(plan.kkt);
  std::cout << out.dump(2) << "\n";

  if (opts.out_dir.has_value()) {
    const auto dir = ensure_out_dir(*opts.out_dir);
    write_file(dir / "attack_plan.json", out.dump(2) + "\n");
    write_file(dir / "attack_trace.csv",
               attack_trace_csv(fdia::unstack(plan.a, p.sys.n_a())));
    if (opts.dump_operators) {
      write_matrix_csv(dir / "T_pv.csv", Tpv.M);
      write_matrix_csv(dir / "T_rv.csv", Trv.M);
    }
  }
  return plan.kkt.pass ? kExitOk : kExitAnalysisNegative;
}

int cmd_simulate(const CommonOptions& opts, const std::string& attack_file) {
  const auto config = load_config(opts);
  const auto sys = fdia::build_closed_loop(config, opts.horizon);
  fdia::Signal a;
  if (attack_file.empty()) {
    a.assign(static_cast<std::size_t>(sys.horizon) + 1,
             fdia::Vector::Zero(sys.n_a()));
  } else {
    a = read_attack_csv(attack_file, sys.n_a());
  }
  const auto trace = fdia::evaluate(sys, a);

  std::ostringstream csv;
  fdia::write_trace_csv(csv, trace);
  json summary;
  summary["E_p_final"] = trace.E_p.back();
  summary["E_r_final"] = trace.E_r.back();
  summary["eps_r"] = trace.eps_r;
  summary["stealthy"] = trace.stealthy;
  std::cout << summary.dump(2) << "\n";

  if (opts.out_dir.has_value()) {
    write_file(ensure_out_dir(*opts.out_dir) / "simulation_trace.csv", csv.str());
  } else {
    std::cout << csv.str();
  }
  return kExitOk;
}

int cmd_verify(const CommonOptions& opts, std::optional<double> gamma) {
  const Pipeline p = build_pipeline(opts);
  double g;
  if (gamma.has_value()) {
    g = *gamma;
  } else {
    const auto bound = fdia::check_bounded(p.Tp, p.Tr, opts.rank_tol);
    if (!bound.bounded) {
      std::cerr << "impact is unbounded; pass an explicit --gamma to probe\n";
      return kExitAnalysisNegative;
    }
    g = fdia::compute_gamma_star(p.Tp, p.Tr, opts.rank_tol).gamma_star;
  }

  const auto weights = fdia::LagrangianWeights::from(p.sys, g);
  const auto gre = fdia::solve_gre(p.sys, weights, opts.psd_tol);

  std::ostringstream csv;
  csv.precision(17);
  csv << "k,lambda_min_R,kernel_residual,tolerance,pass\n";
  for (auto it = gre.diagnostics.rbegin(); it != gre.diagnostics.rend(); ++it) {
    csv << it->k << "," << it->lambda_min_R << "," << it->kernel_residual << ","
        << it->tolerance << "," << (it->pass ? 1 : 0) << "\n";
  }
  if (opts.out_dir.has_value()) {
    write_file(ensure_out_dir(*opts.out_dir) / "gre_diagnostics.csv", csv.str());
  } else {
    std::cout << csv.str();
  }

  json summary;
  summary["gamma"] = g;
  summary["exists"] = gre.exists;
  if (gre.failure_step.has_value()) summary["failure_step"] = *gre.failure_step;
  std::cout << summary.dump(2) << "\n";
  return gre.exists ? kExitOk : kExitAnalysisNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "worst-case stealthy false-data-injection analysis for finite-horizon "
      "closed loops: impact assessment, boundary attack synthesis, replay and "
      "recursion diagnostics"};
  app.require_subcommand(1);

  CommonOptions assess_opts, synth_opts, sim_opts, verify_opts;
  std::string v_file, attack_file;
  std::optional<double> gamma;

  auto* assess = app.add_subcommand("assess", "compute the worst-case impact");
  add_common_options(assess, &assess_opts);

  auto* synth = app.add_subcommand("synthesize", "construct a boundary attack");
  add_common_options(synth, &synth_opts);
  synth->add_option("--v-file", v_file,
                    "JSON array with a user-supplied parameter sequence "
                    "(scaled onto the stealth boundary)");

  auto* sim = app.add_subcommand("simulate", "replay an attack sequence");
  add_common_options(sim, &sim_opts);
  sim->add_option("--attack", attack_file,
                  "attack trace CSV (header k,a_1..a_na); zero attack if absent");

  auto* verify = app.add_subcommand(
      "verify", "per-step recursion diagnostics for a given multiplier");
  add_common_options(verify, &verify_opts);
  verify->add_option("--gamma", gamma,
                     "multiplier to probe (defaults to the computed optimum)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (assess->parsed()) return cmd_assess(assess_opts);
    if (synth->parsed()) return cmd_synthesize(synth_opts, v_file);
    if (sim->parsed()) return cmd_simulate(sim_opts, attack_file);
    if (verify->parsed()) return cmd_verify(verify_opts, gamma);
  } catch (const fdia::ConfigError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const fdia::UnboundedError& e) {
    std::cerr << "analysis: " << e.what() << "\n";
    return kExitAnalysisNegative;
  } catch (const fdia::DegenerateResidualError& e) {
    std::cerr << "analysis: " << e.what() << "\n";
    return kExitAnalysisNegative;
  } catch (const fdia::ZeroResidualDirectionError& e) {
    std::cerr << "analysis: " << e.what() << "\n";
    return kExitAnalysisNegative;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
