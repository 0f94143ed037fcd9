#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "dged/cli/run_config.hpp"
#include "dged/state.hpp"

namespace dged::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;   // parse/validation failure
inline constexpr int kExitAudit = 3;    // kernel audit or certificate failure
inline constexpr int kExitAbort = 4;    // integrator abort
inline constexpr int kExitPartial = 5;  // sweep finished with failed runs

// Moment summary of a sampled series; shared by cmd_simulate and by
// re-summarization of a written CSV so the two agree bit for bit.
nlohmann::json summarize_series(const std::vector<ConcentrationState>& states,
                                const std::optional<SigmaFunction>& sigma,
                                const std::optional<std::vector<double>>& lyapunov_profile);

int cmd_simulate(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                 std::ostream& diag);

int cmd_audit_kernel(const std::filesystem::path& config_path, int cap,
                     const std::filesystem::path& out_dir, std::ostream& out,
                     std::ostream& diag);

int cmd_sweep_truncation(const std::filesystem::path& config_path, const std::vector<int>& n_list,
                         const std::filesystem::path& out_dir, std::ostream& diag);

int cmd_equilibrium(const std::filesystem::path& config_path, std::optional<double> rho,
                    const std::filesystem::path& out_dir, std::ostream& out, std::ostream& diag);

}  // namespace dged::cli
