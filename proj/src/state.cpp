#include "dged/state.hpp"

#include <cmath>
#include <stdexcept>

#include "dged/kahan.hpp"

namespace dged {

std::string to_string(Variant variant) {
  return variant == Variant::Isolated ? "isolated" : "non_isolated";
}

namespace {

std::vector<double> layout_profile(const InitialSpec& spec) {
  const int n = spec.truncation;
  if (n < 1) throw std::invalid_argument("initial spec: truncation must be >= 1");
  std::vector<double> values(static_cast<std::size_t>(n) + 1, 0.0);

  if (const auto* mono = std::get_if<Monodisperse>(&spec.shape)) {
    if (mono->size < 0 || mono->size > n)
      throw std::invalid_argument("monodisperse initial: size exceeds truncation");
    if (mono->amount < 0.0) throw std::invalid_argument("monodisperse initial: negative amount");
    values[static_cast<std::size_t>(mono->size)] = mono->amount;
    return values;
  }

  if (const auto* geo = std::get_if<Geometric>(&spec.shape)) {
    if (!(geo->ratio > 0.0)) throw std::invalid_argument("geometric initial: ratio must be > 0");
    if (geo->amount < 0.0) throw std::invalid_argument("geometric initial: negative amount");
    // c_i proportional to ratio^i, scaled so the mass sum_i i c_i equals amount.
    detail::KahanSum mass;
    double power = 1.0;
    for (int i = 0; i <= n; ++i) {
      values[static_cast<std::size_t>(i)] = power;
      mass.add(static_cast<double>(i) * power);
      power *= geo->ratio;
    }
    const double scale = geo->amount / mass.value();
    for (auto& v : values) v *= scale;
    return values;
  }

  const auto& entries = std::get<ExplicitProfile>(spec.shape).values;
  if (static_cast<int>(entries.size()) != n + 1)
    throw std::invalid_argument("explicit initial: expected N+1 entries");
  for (double v : entries)
    if (!(v >= 0.0)) throw std::invalid_argument("explicit initial: negative entry");
  values = entries;
  return values;
}

}  // namespace

ConcentrationState build_initial(const InitialSpec& spec, Variant variant,
                                 std::optional<double> bath) {
  ConcentrationState state;
  state.values = layout_profile(spec);
  state.time = 0.0;
  state.variant = variant;
  if (variant == Variant::NonIsolated) {
    if (!bath.has_value() || !(*bath >= 0.0))
      throw std::invalid_argument("non-isolated initial: requires bath >= 0");
    state.values[0] = *bath;
  }
  return state;
}

double moment(const ConcentrationState& state, double order) {
  detail::KahanSum sum;
  for (std::size_t i = 0; i < state.values.size(); ++i) {
    const double weight =
        (i == 0 && order == 0.0) ? 1.0 : std::pow(static_cast<double>(i), order);
    sum.add(weight * state.values[i]);
  }
  return sum.value();
}

double sigma_moment(const ConcentrationState& state, const SigmaFunction& sigma) {
  detail::KahanSum sum;
  for (std::size_t i = 0; i < state.values.size(); ++i)
    sum.add(sigma(static_cast<double>(i)) * state.values[i]);
  return sum.value();
}

double norm_x01(const ConcentrationState& state) {
  detail::KahanSum sum;
  for (std::size_t i = 0; i < state.values.size(); ++i)
    sum.add((1.0 + static_cast<double>(i)) * std::abs(state.values[i]));
  return sum.value();
}

}  // namespace dged
