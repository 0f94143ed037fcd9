#pragma once

#include <span>
#include <vector>

#include "dged/kernels.hpp"
#include "dged/state.hpp"

namespace dged {

// Per-size decomposition of the truncated right-hand side into the four flux
// families:
//   q1  gain:  a(i+k,j;k) c_{i+k} c_j   (an (i+k)-cluster sheds a k-chunk)
//   q2  loss:  a(j,i;k)   c_j   c_i     (the i-cluster absorbs a k-chunk)
//   q3  gain:  a(j,i-k;k) c_j   c_{i-k} (an (i-k)-cluster absorbs a k-chunk)
//   q4  loss:  a(i,j;k)   c_j   c_i     (the i-cluster sheds a k-chunk)
// Gains carry positive sign, losses negative. Empty sums are 0, so index N
// has q1 = q2 = 0 and index 0 has q3 = q4 = 0; the non-isolated variant
// zeroes all four at index 0.
struct FluxTerms {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double q4 = 0.0;
  double net() const { return q1 + q2 + q3 + q4; }
};

struct FluxBreakdown {
  std::vector<FluxTerms> per_size;  // index 0..N
  Variant variant = Variant::Isolated;
};

// Evaluates the truncated flux families for one kernel at one truncation.
// Construction snapshots the coefficients (dense cache when it fits a fixed
// memory budget) and picks the cheapest loop structure:
//   * k = 1 kernels (exchange-driven) and bounded-exchange kernels cap the
//     chunk loop, giving O(N^2 kmax) per evaluation;
//   * coag-frag composites use their delta structure, O(N^2);
//   * the general case is O(N^3).
// Instances are immutable and safe to share across threads.
class FluxEvaluator {
 public:
  FluxEvaluator(RateKernel kernel, int truncation, Variant variant,
                std::size_t cache_budget_bytes = default_cache_budget());

  int truncation() const { return n_; }
  Variant variant() const { return variant_; }
  const RateKernel& kernel() const { return kernel_; }

  // dc/dt = q1 + q2 + q3 + q4 per size; the non-isolated variant forces
  // dc_0/dt = 0. c and dcdt must have length N+1. With threads > 1 the
  // per-size loop is split across workers writing disjoint slots; each
  // size's accumulation order is fixed, so the result is identical to the
  // serial one.
  void rhs(std::span<const double> c, std::span<double> dcdt, int threads = 1) const;
  std::vector<double> rhs(std::span<const double> c, int threads = 1) const;

  FluxBreakdown breakdown(std::span<const double> c) const;

  // Exact rate of change of sum_i g_i c_i along the truncated flow:
  //   sum_{k=1}^{N-1} sum_{i=k}^{N} sum_{j=0}^{N-k}
  //       (g_{j+k} + g_{i-k} - g_j - g_i) a(i,j;k) c_i c_j
  // minus, in the non-isolated variant, the void-pinning correction
  //   g_0 ( sum_{k,j} a(k,j;k) c_k c_j - sum_{k,i} a(i,0;k) c_i c_0 ).
  double weighted_moment_rate(std::span<const double> c, std::span<const double> weights) const;

  static std::size_t default_cache_budget() { return std::size_t{48} << 20; }

 private:
  struct FamilySums;
  void accumulate(int i, std::span<const double> c, FluxTerms& out) const;
  double coef(int i, int j, int k) const;

  RateKernel kernel_;
  int n_;
  Variant variant_;
  int kmax_;               // chunk-size cap for the loop collapse
  bool coagfrag_ = false;  // delta-structure fast path
  bool dense_ = false;
  std::vector<double> cube_;  // dense a(i,j,k), k <= kmax
  std::vector<double> coag_;  // a(i,j;i)
  std::vector<double> frag_;  // a(i,0;k)
};

// One-shot conveniences over a freshly built evaluator.
FluxBreakdown flux_breakdown(const RateKernel& kernel, const ConcentrationState& state);
std::vector<double> rhs(const RateKernel& kernel, const ConcentrationState& state);
double weighted_moment_rate(const RateKernel& kernel, const ConcentrationState& state,
                            std::span<const double> weights);

// Independent stoichiometric oracle: enumerates every admissible reaction
// (i,j,k), applies its rate r = a(i,j;k) c_i c_j to the four affected sizes,
// and never touches the flux-family code path. Intended as the reference
// implementation the flux evaluator is checked against.
std::vector<double> rhs_enumeration_oracle(const RateKernel& kernel,
                                           const ConcentrationState& state);

// Net rate of the reversible pair <q>+<p> <-> <q-k>+<p+k>:
//   omega(q,p;k)(c) = a(q,p;k) c_q c_p - a(p+k,q-k;k) c_{p+k} c_{q-k}.
// Requires 1 <= k <= q <= N and p + k <= N; throws std::out_of_range
// otherwise.
double balanced_net_rate(const RateKernel& kernel, const ConcentrationState& state, int q, int p,
                         int k);

}  // namespace dged
