#include "dged/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dged/kahan.hpp"

namespace dged {

namespace {

void validate_profile(const std::vector<double>& profile, int truncation, bool require_unit_head) {
  if (static_cast<int>(profile.size()) != truncation + 1)
    throw std::invalid_argument("equilibrium profile: expected N+1 entries");
  if (require_unit_head && profile[0] != 1.0)
    throw std::invalid_argument("equilibrium profile: O_0 must equal 1");
  for (double v : profile)
    if (!(v > 0.0)) throw std::invalid_argument("equilibrium profile: entries must be positive");
}

double profile_mass(const std::vector<double>& profile, int truncation, double z) {
  detail::KahanSum mass;
  double zpow = 1.0;
  for (int i = 1; i <= truncation; ++i) {
    zpow *= z;
    mass.add(static_cast<double>(i) * profile[static_cast<std::size_t>(i)] * zpow);
  }
  return mass.value();
}

}  // namespace

double sigma_tilde(const SigmaFunction& sigma, int i, int j, int k) {
  if (k < 1 || k > i || j < 0)
    throw std::invalid_argument("sigma_tilde: need 1 <= k <= i and j >= 0");
  return sigma(static_cast<double>(j + k)) + sigma(static_cast<double>(i - k)) -
         sigma(static_cast<double>(j)) - sigma(static_cast<double>(i));
}

std::optional<int> sigma_gap_scan(const SigmaFunction& sigma, double eta, int p_max) {
  if (p_max < 2) throw std::invalid_argument("sigma_gap_scan: p_max must be >= 2");
  int last_bad = 1;
  for (int p = 2; p <= p_max; ++p) {
    const double threshold = eta * sigma(static_cast<double>(p - 1)) / (p - 1);
    const double sp = sigma(static_cast<double>(p));
    for (int k = 1; k <= p - 1; ++k) {
      if (sp - sigma(static_cast<double>(p - k)) - sigma(static_cast<double>(k)) < threshold) {
        last_bad = p;
        break;
      }
    }
  }
  if (last_bad == p_max) return std::nullopt;
  return std::max(2, last_bad + 1);
}

MomentBoundReport check_moment_bound(const Trajectory& trajectory, const SigmaFunction& sigma,
                                     const BoundCertificate& certificate) {
  if (trajectory.samples.empty())
    throw std::invalid_argument("check_moment_bound: empty trajectory");

  const double p1_start = trajectory.samples.front().moments.p1;
  MomentBoundReport report;
  report.growth_constant = 2.0 * certificate.C * certificate.Q * sigma.m_sigma() * p1_start;

  const double start = sigma_moment(trajectory.samples.front().state, sigma);
  const double t0 = trajectory.samples.front().state.time;

  for (std::size_t idx = 0; idx < trajectory.samples.size(); ++idx) {
    const auto& sample = trajectory.samples[idx];
    const double current = sigma_moment(sample.state, sigma);
    double ratio;
    if (start == 0.0)
      ratio = current == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    else
      ratio = current / start;
    report.max_ratio = std::max(report.max_ratio, ratio);
    const double bound = std::exp(report.growth_constant * (sample.state.time - t0));
    if (ratio > bound * (1.0 + 1e-9)) report.violating_samples.push_back(idx);
  }
  return report;
}

ResidualReport detailed_balance_residual(const RateKernel& kernel,
                                         const std::vector<double>& profile, int truncation) {
  validate_profile(profile, truncation, /*require_unit_head=*/true);
  ResidualReport report;
  const int n = truncation;
  for (int q = 1; q <= n; ++q)
    for (int k = 1; k <= q; ++k)
      for (int p = 0; p + k <= n; ++p) {
        const double forward = kernel.evaluate(q, p, k) * profile[q] * profile[p];
        const double backward =
            kernel.evaluate(p + k, q - k, k) * profile[p + k] * profile[q - k];
        const double residual = std::abs(forward - backward);
        if (residual > report.max_residual) {
          report.max_residual = residual;
          report.q = q;
          report.p = p;
          report.k = k;
        }
      }
  return report;
}

EquilibriumSpec equilibrium_from_mass(const std::vector<double>& profile, int truncation,
                                      double rho) {
  validate_profile(profile, truncation, /*require_unit_head=*/true);
  if (!(rho > 0.0)) throw std::invalid_argument("equilibrium_from_mass: rho must be > 0");

  double hi = 1.0;
  double hi_mass = profile_mass(profile, truncation, hi);
  while (hi_mass < rho) {
    hi *= 2.0;
    hi_mass = profile_mass(profile, truncation, hi);
    if (!std::isfinite(hi_mass))
      throw std::domain_error("equilibrium_from_mass: mass overflows before bracketing rho");
  }

  double lo = 0.0;
  double z = hi;
  double mass = hi_mass;
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(mass - rho) <= 1e-12 * rho) break;
    const double mid = 0.5 * (lo + hi);
    const double mid_mass = profile_mass(profile, truncation, mid);
    if (mid_mass < rho)
      lo = mid;
    else
      hi = mid;
    z = mid;
    mass = mid_mass;
    if (hi - lo <= std::numeric_limits<double>::epsilon() * hi) break;
  }

  EquilibriumSpec spec;
  spec.profile = profile;
  spec.fugacity = z;
  spec.state.resize(static_cast<std::size_t>(truncation) + 1);
  double zpow = 1.0;
  for (int i = 0; i <= truncation; ++i) {
    spec.state[static_cast<std::size_t>(i)] = profile[static_cast<std::size_t>(i)] * zpow;
    zpow *= z;
  }
  spec.mass = profile_mass(profile, truncation, z);
  return spec;
}

double lyapunov_v(const ConcentrationState& state, const std::vector<double>& profile) {
  validate_profile(profile, state.truncation(), /*require_unit_head=*/false);
  detail::KahanSum sum;
  for (std::size_t i = 0; i < state.values.size(); ++i) {
    const double c = state.values[i];
    if (c > 0.0) sum.add(c * (std::log(c / profile[i]) - 1.0));
  }
  return sum.value();
}

double lyapunov_rate(const RateKernel& kernel, const ConcentrationState& state,
                     const std::vector<double>& profile) {
  const int n = state.truncation();
  validate_profile(profile, n, /*require_unit_head=*/false);
  const auto& c = state.values;
  detail::KahanSum total;

  for (int k = 1; k <= n - 1; ++k)
    for (int i = k; i <= n; ++i)
      for (int j = 0; j + k <= n; ++j) {
        const double net = kernel.evaluate(i, j, k) * c[i] * c[j] -
                           kernel.evaluate(j + k, i - k, k) * c[j + k] * c[i - k];
        if (net == 0.0) continue;
        if (c[j] == 0.0 || c[j + k] == 0.0)
          return std::numeric_limits<double>::quiet_NaN();  // formal sum hits log 0
        total.add(net * std::log((c[j + k] * profile[j]) / (c[j] * profile[j + k])));
      }
  return total.value();
}

TruncationTable truncation_convergence(const RateKernel& kernel, const InitialSpec& init,
                                       Variant variant, std::optional<double> bath,
                                       const IntegratorConfig& config,
                                       const std::vector<int>& n_list) {
  if (n_list.empty()) throw std::invalid_argument("truncation_convergence: empty N list");
  for (std::size_t m = 1; m < n_list.size(); ++m)
    if (n_list[m] <= n_list[m - 1])
      throw std::invalid_argument("truncation_convergence: N list must strictly increase");

  const int size_cap = n_list.front();
  TruncationTable table;

  // values[run][sample][i]
  std::vector<std::optional<std::vector<std::vector<double>>>> runs(n_list.size());
  std::vector<std::vector<double>> sample_times(n_list.size());

  for (std::size_t m = 0; m < n_list.size(); ++m) {
    const int n = n_list[m];
    InitialSpec local = init;
    local.truncation = n;
    if (auto* profile = std::get_if<ExplicitProfile>(&local.shape))
      profile->values.resize(static_cast<std::size_t>(n) + 1, 0.0);  // drop or zero-pad
    try {
      const ConcentrationState start = build_initial(local, variant, bath);
      const Trajectory trajectory = integrate(kernel, start, config);
      std::vector<std::vector<double>> sampled;
      sampled.reserve(trajectory.samples.size());
      for (const auto& sample : trajectory.samples) {
        sample_times[m].push_back(sample.state.time);
        sampled.emplace_back(sample.state.values.begin(),
                             sample.state.values.begin() + size_cap + 1);
      }
      runs[m] = std::move(sampled);
    } catch (const std::exception& failure) {
      table.failures.push_back({n, failure.what()});
    }
  }

  for (std::size_t m = 0; m < n_list.size(); ++m) {
    if (!runs[m]) continue;
    const bool prev_ok = m > 0 && runs[m - 1].has_value();
    for (std::size_t s = 0; s < runs[m]->size(); ++s)
      for (int i = 0; i <= size_cap; ++i) {
        TruncationRow row;
        row.size = i;
        row.t = sample_times[m][s];
        row.truncation = n_list[m];
        row.value = (*runs[m])[s][static_cast<std::size_t>(i)];
        if (prev_ok && s < runs[m - 1]->size())
          row.delta_prev = std::abs(row.value - (*runs[m - 1])[s][static_cast<std::size_t>(i)]);
        table.rows.push_back(row);
      }
  }
  return table;
}

}  // namespace dged
