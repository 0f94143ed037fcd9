#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dged/integrate.hpp"
#include "dged/kernels.hpp"
#include "dged/sigma.hpp"
#include "dged/state.hpp"

namespace dged {

// sigma(j+k) + sigma(i-k) - sigma(j) - sigma(i), the combination whose sign
// and growth control the sigma-moment along the flow. Requires 1 <= k <= i.
double sigma_tilde(const SigmaFunction& sigma, int i, int j, int k);

// Smallest M0 in [2, p_max] such that
//   sigma(p) - sigma(p-k) - sigma(k) >= eta * sigma(p-1)/(p-1)
// for all M0 <= p <= p_max and 1 <= k <= p-1; nullopt when no such M0
// exists. Exhaustive scan; M0 is an output, not an assumed constant.
std::optional<int> sigma_gap_scan(const SigmaFunction& sigma, double eta, int p_max);

struct MomentBoundReport {
  double growth_constant = 0.0;  // K = 2 C Q m_sigma P1(0)
  double max_ratio = 1.0;        // max_t sigma-moment(t) / sigma-moment(0)
  std::vector<std::size_t> violating_samples;
  bool passed() const { return violating_samples.empty(); }
};

// One-sided Gronwall check along an isolated trajectory whose kernel passed
// certify_bound with `certificate`: at every sample time t,
//   sum sigma(i) c_i(t)  <=  exp(K (t - t0)) * sum sigma(i) c_i(0).
// A trajectory with zero initial sigma-moment reports ratio 1 as long as it
// stays zero.
MomentBoundReport check_moment_bound(const Trajectory& trajectory, const SigmaFunction& sigma,
                                     const BoundCertificate& certificate);

struct ResidualReport {
  double max_residual = 0.0;
  int q = 0, p = 0, k = 0;  // argmax triple
};

// max over 1 <= k <= q <= N, 0 <= p <= N-k of
//   |a(q,p;k) O_q O_p - a(p+k,q-k;k) O_{p+k} O_{q-k}|.
// Requires O_0 = 1 and O_i > 0. The scan order is fixed so ties break
// deterministically.
ResidualReport detailed_balance_residual(const RateKernel& kernel,
                                         const std::vector<double>& profile, int truncation);

// Detailed-balance equilibrium family c_i = O_i z^i.
struct EquilibriumSpec {
  std::vector<double> profile;  // O_0..O_N, O_0 = 1
  double fugacity = 0.0;        // z
  std::vector<double> state;    // induced c_i = O_i z^i
  double mass = 0.0;            // sum i c_i
};

// Solves sum_{i=1}^{N} i O_i z^i = rho for z > 0 by bracketing + bisection
// (the mass is strictly increasing in z). Relative tolerance 1e-12 on the
// mass constraint. Throws std::domain_error when rho cannot be bracketed
// before the sum overflows.
EquilibriumSpec equilibrium_from_mass(const std::vector<double>& profile, int truncation,
                                      double rho);

// V(c) = sum_i c_i (log(c_i / O_i) - 1), with 0 log 0 = 0.
double lyapunov_v(const ConcentrationState& state, const std::vector<double>& profile);

// Truncated dissipation sum
//   sum_{k=1}^{N-1} sum_{i=k}^{N} sum_{j=0}^{N-k}
//     omega(i,j;k)(c) * log( c_{j+k} O_j / (c_j O_{j+k}) ).
// Returns quiet NaN when a term with omega != 0 needs the log of 0 (the
// computation is formal; the caller decides whether to regularize).
double lyapunov_rate(const RateKernel& kernel, const ConcentrationState& state,
                     const std::vector<double>& profile);

struct TruncationRow {
  int size = 0;         // cluster size i
  double t = 0.0;       // sample time
  int truncation = 0;   // N of the run
  double value = 0.0;   // c_i^N(t)
  std::optional<double> delta_prev;  // |c_i^N(t) - c_i^{N_prev}(t)|
};

struct TruncationRunFailure {
  int truncation = 0;
  std::string message;
};

struct TruncationTable {
  std::vector<TruncationRow> rows;
  std::vector<TruncationRunFailure> failures;
  bool complete() const { return failures.empty(); }
};

// Runs the same initial profile (entries beyond each N dropped) at every
// truncation in n_list (strictly increasing) and tabulates c_i^N at the
// configured sample times for all i <= min(n_list), together with the
// successive differences. Integrator aborts are recorded per N; the table
// keeps the runs that succeeded.
TruncationTable truncation_convergence(const RateKernel& kernel, const InitialSpec& init,
                                       Variant variant, std::optional<double> bath,
                                       const IntegratorConfig& config,
                                       const std::vector<int>& n_list);

}  // namespace dged
