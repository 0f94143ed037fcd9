#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dged/sigma.hpp"

namespace dged {

// Treatment of the void-cluster concentration c_0:
//   Isolated     -- c_0 evolves so the total cluster number is conserved;
//   NonIsolated  -- c_0 is pinned to a bath value, only mass is conserved.
enum class Variant { Isolated, NonIsolated };

std::string to_string(Variant variant);

// Truncated concentration vector (c_0 .. c_N) with a time stamp.
// Immutable by convention once built; all operations below are read-only.
struct ConcentrationState {
  std::vector<double> values;
  double time = 0.0;
  Variant variant = Variant::Isolated;

  int truncation() const { return static_cast<int>(values.size()) - 1; }
};

struct Monodisperse {
  int size = 1;
  double amount = 1.0;
};

struct Geometric {
  double ratio = 0.5;
  double amount = 1.0;  // target mass, entries proportional to ratio^i
};

struct ExplicitProfile {
  std::vector<double> values;
};

struct InitialSpec {
  std::variant<Monodisperse, Geometric, ExplicitProfile> shape;
  int truncation = 1;  // N
};

// Builds the t = 0 state. Non-isolated runs pin index 0 to the bath value
// after the profile is laid out (the bath does not enter the geometric mass
// normalization). Throws std::invalid_argument on out-of-range sizes,
// negative entries, or a missing/negative bath in the non-isolated variant.
ConcentrationState build_initial(const InitialSpec& spec, Variant variant,
                                 std::optional<double> bath = std::nullopt);

// r-th moment  sum_i i^r c_i  with the convention 0^0 = 1, so order 0 counts
// the void clusters too.
double moment(const ConcentrationState& state, double order);

// sum_i sigma(i) c_i.
double sigma_moment(const ConcentrationState& state, const SigmaFunction& sigma);

// sum_i |c_i| + sum_i i |c_i|.
double norm_x01(const ConcentrationState& state);

}  // namespace dged
