#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dged/integrate.hpp"
#include "dged/kernels.hpp"
#include "dged/sigma.hpp"
#include "dged/state.hpp"

namespace dged::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Resolved run configuration. `echo` is the normalized JSON (defaults filled
// in) embedded into every summary so a run is reproducible from its summary
// alone.
struct RunConfig {
  nlohmann::json echo;
  RateKernel kernel = RateKernel::constant();
  Variant variant = Variant::Isolated;
  int truncation = 1;
  InitialSpec initial;
  std::optional<double> bath;
  IntegratorConfig integrator;
  std::string series_csv = "series.csv";
  std::string summary_json = "summary.json";
  std::optional<SigmaFunction> sigma;
  std::optional<std::vector<double>> lyapunov_profile;
  std::optional<nlohmann::json> certificate_spec;
  std::optional<std::vector<double>> equilibrium_profile;
  std::optional<double> rho;
  double drift_threshold = 1e-8;
};

// Throws ConfigError on parse or validation failure. Table-kernel paths are
// resolved relative to the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

BoundCertificate certificate_from_json(const nlohmann::json& spec);

}  // namespace dged::cli
