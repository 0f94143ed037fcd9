#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dged/fluxes.hpp"
#include "dged/sigma.hpp"
#include "dged/state.hpp"

namespace dged {

enum class Method {
  AdaptiveRK45,  // Dormand-Prince embedded 4(5) pair with step control
  FixedRK4,      // classical order 4, step = h_init
};

std::string to_string(Method method);

struct IntegratorConfig {
  Method method = Method::AdaptiveRK45;
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_max = 10.0;
  double negativity_floor = 1e-14;
  std::vector<double> sample_times;  // strictly increasing, first >= t0
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double min_step = std::numeric_limits<double>::infinity();
  double max_step = 0.0;
};

struct MomentReport {
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  std::optional<double> sigma;     // sum sigma(i) c_i, when requested
  std::optional<double> lyapunov;  // V(c) against a reference profile, when requested
};

struct TrajectorySample {
  ConcentrationState state;
  MomentReport moments;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  IntegratorConfig config;
  StepStats stats;
};

// Optional per-sample diagnostics recorded into MomentReport.
struct DiagnosticOptions {
  std::optional<SigmaFunction> sigma;
  std::optional<std::vector<double>> lyapunov_profile;  // O_0..O_N, all > 0
};

// Raised when a run cannot continue: the step size underflows below
// 1e-12 * h_init, or a derivative evaluation goes non-finite.
class IntegratorAbort : public std::runtime_error {
 public:
  enum class Reason { StepUnderflow, NonFiniteDerivative };
  IntegratorAbort(Reason reason, std::string message)
      : std::runtime_error(std::move(message)), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

// Integrates the truncated system from `initial` and samples it at
// config.sample_times (linear interpolation inside accepted steps).
//
// Nonnegativity policy: a component in (-negativity_floor, 0) after an
// accepted step is clamped to 0; a component <= -negativity_floor rejects
// the step and halves it. The truncated flow preserves the nonnegative
// cone, so violations are integration error by construction.
Trajectory integrate(const RateKernel& kernel, const ConcentrationState& initial,
                     const IntegratorConfig& config, const DiagnosticOptions& diagnostics = {});

struct ConservationDrift {
  double p0 = 0.0;  // max_t |P0(t) - P0(0)|
  double p1 = 0.0;  // max_t |P1(t) - P1(0)|
};

ConservationDrift conservation_drift(const Trajectory& trajectory);

}  // namespace dged
