#include "dged/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "dged/analysis.hpp"
#include "dged/cli/csv.hpp"
#include "dged/fluxes.hpp"
#include "dged/integrate.hpp"
#include "dged/kernels.hpp"

namespace dged::cli {

using nlohmann::json;

namespace {

json violations_to_json(const AuditReport& report) {
  json list = json::array();
  for (const auto& v : report.violations)
    list.push_back(json{{"i", v.i}, {"j", v.j}, {"k", v.k}, {"lhs", v.lhs}, {"rhs", v.rhs},
                        {"what", v.describe()}});
  return list;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

json step_stats_to_json(const StepStats& stats) {
  return json{{"accepted", stats.accepted},
              {"rejected", stats.rejected},
              {"min_step", stats.accepted > 0 ? stats.min_step : 0.0},
              {"max_step", stats.max_step}};
}

}  // namespace

json summarize_series(const std::vector<ConcentrationState>& states,
                      const std::optional<SigmaFunction>& sigma,
                      const std::optional<std::vector<double>>& lyapunov_profile) {
  if (states.empty()) throw std::invalid_argument("summarize_series: no samples");

  const double p0_start = moment(states.front(), 0.0);
  const double p1_start = moment(states.front(), 1.0);
  double p0_drift = 0.0;
  double p1_drift = 0.0;
  for (const auto& state : states) {
    p0_drift = std::max(p0_drift, std::abs(moment(state, 0.0) - p0_start));
    p1_drift = std::max(p1_drift, std::abs(moment(state, 1.0) - p1_start));
  }

  const auto& last = states.back();
  json summary;
  summary["p0_drift"] = p0_drift;
  summary["p1_drift"] = p1_drift;
  summary["final_moments"] = json{{"t", last.time},
                                  {"p0", moment(last, 0.0)},
                                  {"p1", moment(last, 1.0)},
                                  {"p2", moment(last, 2.0)}};
  if (sigma) summary["sigma_moment"] = sigma_moment(last, *sigma);
  if (lyapunov_profile) {
    json series = json::array();
    for (const auto& state : states)
      series.push_back(json{{"t", state.time}, {"value", lyapunov_v(state, *lyapunov_profile)}});
    summary["lyapunov_series"] = series;
  }
  return summary;
}

int cmd_simulate(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                 std::ostream& diag) {
  RunConfig config;
  try {
    config = load_run_config(config_path);
  } catch (const ConfigError& failure) {
    diag << "config error: " << failure.what() << "\n";
    return kExitConfig;
  }

  const AuditReport audit = audit_structure(config.kernel, std::max(2, config.truncation));
  if (!audit.passed()) {
    diag << "kernel audit failed with " << audit.violations.size() << " violation(s):\n";
    for (const auto& v : audit.violations) diag << "  " << v.describe() << "\n";
    return kExitAudit;
  }

  Trajectory trajectory;
  try {
    const ConcentrationState start = build_initial(config.initial, config.variant, config.bath);
    DiagnosticOptions diagnostics;
    diagnostics.sigma = config.sigma;
    diagnostics.lyapunov_profile = config.lyapunov_profile;
    trajectory = integrate(config.kernel, start, config.integrator, diagnostics);
  } catch (const IntegratorAbort& failure) {
    diag << "integrator abort: " << failure.what() << "\n";
    return kExitAbort;
  } catch (const std::exception& failure) {
    diag << "config error: " << failure.what() << "\n";
    return kExitConfig;
  }

  std::filesystem::create_directories(out_dir);
  const auto series_path = out_dir / config.series_csv;
  const auto summary_path = out_dir / config.summary_json;
  write_series_csv(series_path, trajectory);

  std::vector<ConcentrationState> states;
  states.reserve(trajectory.samples.size());
  for (const auto& sample : trajectory.samples) states.push_back(sample.state);

  json summary = summarize_series(states, config.sigma, config.lyapunov_profile);
  summary["config"] = config.echo;
  summary["step_stats"] = step_stats_to_json(trajectory.stats);

  const bool mass_flag = summary["p1_drift"].get<double>() > config.drift_threshold;
  const bool number_flag = config.variant == Variant::Isolated &&
                           summary["p0_drift"].get<double>() > config.drift_threshold;
  summary["drift_flagged"] = mass_flag || number_flag;
  if (mass_flag || number_flag)
    diag << "warning: conservation drift above " << format_double(config.drift_threshold) << "\n";

  write_text(summary_path, summary.dump(2) + "\n");
  return kExitOk;
}

int cmd_audit_kernel(const std::filesystem::path& config_path, int cap,
                     const std::filesystem::path& out_dir, std::ostream& out, std::ostream& diag) {
  RunConfig config;
  try {
    config = load_run_config(config_path);
  } catch (const ConfigError& failure) {
    diag << "config error: " << failure.what() << "\n";
    return kExitConfig;
  }
  if (cap < 2) {
    diag << "config error: audit cap must be >= 2\n";
    return kExitConfig;
  }

  json report_json;
  report_json["kernel"] = config.echo.at("kernel");
  report_json["cap"] = cap;

  const AuditReport structure = audit_structure(config.kernel, cap);
  report_json["structure"] = json{{"passed", structure.passed()},
                                  {"violations", violations_to_json(structure)}};

  bool certificate_failed = false;
  if (config.certificate_spec) {
    const BoundCertificate cert = certificate_from_json(*config.certificate_spec);
    const AuditReport bound = certify_bound(config.kernel, cert, cap);
    certificate_failed = !bound.passed();
    report_json["certificate"] = json{{"description", cert.description},
                                      {"C", cert.C},
                                      {"Q", cert.Q},
                                      {"passed", bound.passed()},
                                      {"violations", violations_to_json(bound)}};
  }

  const std::string text = report_json.dump(2) + "\n";
  out << text;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "audit.json", text);
  }
  return structure.passed() && !certificate_failed ? kExitOk : kExitAudit;
}

int cmd_sweep_truncation(const std::filesystem::path& config_path, const std::vector<int>& n_list,
                         const std::filesystem::path& out_dir, std::ostream& diag) {
  RunConfig config;
  try {
    config = load_run_config(config_path);
  } catch (const ConfigError& failure) {
    diag << "config error: " << failure.what() << "\n";
    return kExitConfig;
  }
  if (n_list.empty()) {
    diag << "config error: sweep needs a non-empty N list\n";
    return kExitConfig;
  }
  for (std::size_t m = 1; m < n_list.size(); ++m)
    if (n_list[m] <= n_list[m - 1]) {
      diag << "config error: N list must strictly increase\n";
      return kExitConfig;
    }

  const AuditReport audit = audit_structure(config.kernel, std::max(2, n_list.back()));
  if (!audit.passed()) {
    diag << "kernel audit failed with " << audit.violations.size() << " violation(s):\n";
    for (const auto& v : audit.violations) diag << "  " << v.describe() << "\n";
    return kExitAudit;
  }

  const TruncationTable table = truncation_convergence(config.kernel, config.initial,
                                                       config.variant, config.bath,
                                                       config.integrator, n_list);
  std::filesystem::create_directories(out_dir);
  write_sweep_csv(out_dir / "sweep.csv", table);

  for (const auto& failure : table.failures)
    diag << "run at N=" << failure.truncation << " failed: " << failure.message << "\n";
  return table.complete() ? kExitOk : kExitPartial;
}

int cmd_equilibrium(const std::filesystem::path& config_path, std::optional<double> rho,
                    const std::filesystem::path& out_dir, std::ostream& out, std::ostream& diag) {
  RunConfig config;
  try {
    config = load_run_config(config_path);
  } catch (const ConfigError& failure) {
    diag << "config error: " << failure.what() << "\n";
    return kExitConfig;
  }
  if (!rho) rho = config.rho;
  if (!rho || !(*rho > 0.0)) {
    diag << "config error: equilibrium needs rho > 0\n";
    return kExitConfig;
  }

  const int n = config.truncation;
  const std::vector<double> profile = config.equilibrium_profile
                                          ? *config.equilibrium_profile
                                          : std::vector<double>(static_cast<std::size_t>(n) + 1, 1.0);

  EquilibriumSpec equilibrium;
  try {
    equilibrium = equilibrium_from_mass(profile, n, *rho);
  } catch (const std::exception& failure) {
    diag << "config error: " << failure.what() << "\n";
    return kExitConfig;
  }

  const ResidualReport residual = detailed_balance_residual(config.kernel, profile, n);

  ConcentrationState induced;
  induced.values = equilibrium.state;
  induced.variant = config.variant;
  const FluxBreakdown fluxes = flux_breakdown(config.kernel, induced);
  double rhs_max = 0.0;
  double flux_scale = 0.0;
  for (const auto& terms : fluxes.per_size) {
    rhs_max = std::max(rhs_max, std::abs(terms.net()));
    flux_scale = std::max({flux_scale, std::abs(terms.q1), std::abs(terms.q2),
                           std::abs(terms.q3), std::abs(terms.q4)});
  }

  json result;
  result["config"] = config.echo;
  result["rho"] = *rho;
  result["z"] = equilibrium.fugacity;
  result["mass"] = equilibrium.mass;
  result["state"] = equilibrium.state;
  result["detailed_balance"] = json{{"max_residual", residual.max_residual},
                                    {"argmax", json{{"q", residual.q}, {"p", residual.p},
                                                    {"k", residual.k}}}};
  result["rhs_max_norm"] = rhs_max;
  result["flux_scale"] = flux_scale;

  const std::string text = result.dump(2) + "\n";
  out << text;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "equilibrium.json", text);
  }
  return kExitOk;
}

}  // namespace dged::cli
