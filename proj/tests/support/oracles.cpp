#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace dged::testsupport {

std::vector<double> coagfrag_reference_rhs(const std::function<double(int, int)>& a_coag,
                                           const std::function<double(int, int)>& b_frag,
                                           const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<double> dcdt(c.size(), 0.0);
  auto w = [&](int i, int j) {
    return a_coag(i, j) * c[i] * c[j] - b_frag(i, j) * c[i + j];
  };
  for (int i = 1; i <= n; ++i) {
    double gain = 0.0;
    for (int k = 1; k <= i - 1; ++k) gain += w(k, i - k);
    double loss = 0.0;
    for (int k = 1; k <= n - i; ++k) loss += w(i, k);
    dcdt[i] = 0.5 * gain - loss;
  }
  return dcdt;
}

ConcentrationState random_state(std::mt19937_64& rng, int truncation, Variant variant) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ConcentrationState state;
  state.variant = variant;
  state.values.resize(static_cast<std::size_t>(truncation) + 1);
  for (auto& v : state.values) v = uniform(rng);
  return state;
}

std::vector<double> random_weights(std::mt19937_64& rng, int truncation) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> weights(static_cast<std::size_t>(truncation) + 1);
  for (auto& w : weights) w = uniform(rng);
  return weights;
}

double gross_flux_scale(const RateKernel& kernel, const ConcentrationState& state) {
  const FluxBreakdown breakdown = flux_breakdown(kernel, state);
  double scale = 0.0;
  for (const auto& terms : breakdown.per_size)
    scale = std::max({scale, std::abs(terms.q1), std::abs(terms.q2), std::abs(terms.q3),
                      std::abs(terms.q4)});
  return scale;
}

bool componentwise_close(const std::vector<double>& a, const std::vector<double>& b, double tol,
                         double scale) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double reference = std::max({scale, std::abs(a[i]), std::abs(b[i])});
    if (std::abs(a[i] - b[i]) > tol * reference) return false;
  }
  return true;
}

}  // namespace dged::testsupport
