#pragma once

#include <functional>
#include <random>
#include <vector>

#include "dged/fluxes.hpp"
#include "dged/kernels.hpp"
#include "dged/state.hpp"

namespace dged::testsupport {

// Reference coagulation-fragmentation right-hand side, coded directly from
// the classical form
//   dc_i/dt = 1/2 sum_{k<i} W_{k,i-k} - sum_{k<=N-i} W_{i,k},
//   W_{i,j} = a_coag(i,j) c_i c_j - b_frag(i,j) c_{i+j},
// for sizes i >= 1. Index 0 is not part of the classical system. Entirely
// independent of the flux-family evaluator.
std::vector<double> coagfrag_reference_rhs(const std::function<double(int, int)>& a_coag,
                                           const std::function<double(int, int)>& b_frag,
                                           const std::vector<double>& c);

// Deterministic nonnegative state with entries uniform in [0, 1).
ConcentrationState random_state(std::mt19937_64& rng, int truncation, Variant variant);

// Deterministic weight sequence with entries uniform in [-1, 1).
std::vector<double> random_weights(std::mt19937_64& rng, int truncation);

// max_i max(|q1|,|q2|,|q3|,|q4|): the natural magnitude against which
// near-cancelling right-hand sides are compared.
double gross_flux_scale(const RateKernel& kernel, const ConcentrationState& state);

// Componentwise |a - b| <= tol * max(scale, |a_i|, |b_i|).
bool componentwise_close(const std::vector<double>& a, const std::vector<double>& b, double tol,
                         double scale);

}  // namespace dged::testsupport
