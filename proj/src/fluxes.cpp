#include "dged/fluxes.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "dged/kahan.hpp"

namespace dged {

namespace {

void require_length(std::span<const double> v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n + 1)
    throw std::invalid_argument(std::string(what) + ": expected N+1 entries");
}

}  // namespace

FluxEvaluator::FluxEvaluator(RateKernel kernel, int truncation, Variant variant,
                             std::size_t cache_budget_bytes)
    : kernel_(std::move(kernel)), n_(truncation), variant_(variant) {
  if (n_ < 1) throw std::invalid_argument("flux evaluator: truncation must be >= 1");

  kmax_ = kernel_.max_exchange() ? std::min(*kernel_.max_exchange(), n_) : n_;
  coagfrag_ = kernel_.form() == RateKernel::Form::CoagFrag;

  const std::size_t stride = static_cast<std::size_t>(n_) + 1;
  if (coagfrag_) {
    coag_.assign(stride * stride, 0.0);
    frag_.assign(stride * stride, 0.0);
    for (int i = 1; i <= n_; ++i)
      for (int j = 0; j <= n_; ++j) coag_[i * stride + j] = kernel_.evaluate(i, j, i);
    for (int i = 2; i <= n_; ++i)
      for (int k = 1; k <= i - 1; ++k) frag_[i * stride + k] = kernel_.evaluate(i, 0, k);
    return;
  }

  const std::size_t cube = stride * stride * (static_cast<std::size_t>(kmax_) + 1);
  if (cube * sizeof(double) <= cache_budget_bytes) {
    dense_ = true;
    cube_.assign(cube, 0.0);
    for (int i = 1; i <= n_; ++i)
      for (int k = 1; k <= std::min(i, kmax_); ++k)
        for (int j = 0; j <= n_; ++j)
          cube_[(i * stride + j) * (kmax_ + 1) + k] = kernel_.evaluate(i, j, k);
  }
}

double FluxEvaluator::coef(int i, int j, int k) const {
  if (dense_) {
    const std::size_t stride = static_cast<std::size_t>(n_) + 1;
    return cube_[(i * stride + j) * (kmax_ + 1) + k];
  }
  return kernel_.evaluate(i, j, k);
}

void FluxEvaluator::accumulate(int i, std::span<const double> c, FluxTerms& out) const {
  out = FluxTerms{};
  const int n = n_;
  if (variant_ == Variant::NonIsolated && i == 0) return;

  const std::size_t stride = static_cast<std::size_t>(n) + 1;
  const double ci = c[i];

  if (coagfrag_) {
    // Delta structure: coagulation entries a(i,j;i), fragmentation entries
    // a(i,0;k). Everything collapses to O(N) per size except the void row.
    detail::KahanSum q1, q2, q3, q4;
    if (i == 0) {
      for (int k = 1; k <= n; ++k) {
        const double ck = c[k];
        if (ck == 0.0) continue;
        for (int j = 1; j <= n - k; ++j)
          if (c[j] != 0.0) q1.add(coag_[k * stride + j] * ck * c[j]);
      }
      if (c[0] != 0.0)
        for (int j = 2; j <= n; ++j) {
          if (c[j] == 0.0) continue;
          detail::KahanSum row;
          for (int k = 1; k <= j - 1; ++k) row.add(frag_[j * stride + k]);
          q2.add(row.value() * c[j] * c[0]);
        }
    } else {
      if (c[0] != 0.0)
        for (int k = 1; k <= n - i; ++k)
          if (c[i + k] != 0.0) q1.add(frag_[(i + k) * stride + k] * c[i + k] * c[0]);
      if (ci != 0.0)
        for (int k = 1; k <= n - i; ++k)
          if (c[k] != 0.0) q2.add(coag_[k * stride + i] * c[k] * ci);
      for (int k = 1; k <= i - 1; ++k)
        if (c[k] != 0.0 && c[i - k] != 0.0) q3.add(coag_[k * stride + (i - k)] * c[k] * c[i - k]);
      if (c[0] != 0.0)
        for (int j = i + 1; j <= n; ++j)
          if (c[j] != 0.0) q3.add(frag_[j * stride + i] * c[j] * c[0]);
      if (ci != 0.0) {
        for (int j = 1; j <= n - i; ++j)
          if (c[j] != 0.0) q4.add(coag_[i * stride + j] * c[j] * ci);
        if (c[0] != 0.0) {
          detail::KahanSum row;
          for (int k = 1; k <= i - 1; ++k) row.add(frag_[i * stride + k]);
          q4.add(row.value() * c[0] * ci);
        }
      }
    }
    out.q1 = q1.value();
    out.q2 = -q2.value();
    out.q3 = q3.value();
    out.q4 = -q4.value();
    return;
  }

  detail::KahanSum q1, q2, q3, q4;

  for (int k = 1; k <= std::min(n - i, kmax_); ++k) {
    const double donor = c[i + k];
    if (donor == 0.0) continue;
    for (int j = 0; j <= n - k; ++j)
      if (c[j] != 0.0) q1.add(coef(i + k, j, k) * donor * c[j]);
  }

  if (ci != 0.0)
    for (int k = 1; k <= std::min(n - i, kmax_); ++k)
      for (int j = k; j <= n; ++j)
        if (c[j] != 0.0) q2.add(coef(j, i, k) * c[j] * ci);

  for (int k = 1; k <= std::min(i, kmax_); ++k) {
    const double acceptor = c[i - k];
    if (acceptor == 0.0) continue;
    for (int j = k; j <= n; ++j)
      if (c[j] != 0.0) q3.add(coef(j, i - k, k) * c[j] * acceptor);
  }

  if (ci != 0.0)
    for (int k = 1; k <= std::min(i, kmax_); ++k)
      for (int j = 0; j <= n - k; ++j)
        if (c[j] != 0.0) q4.add(coef(i, j, k) * c[j] * ci);

  out.q1 = q1.value();
  out.q2 = -q2.value();
  out.q3 = q3.value();
  out.q4 = -q4.value();
}

void FluxEvaluator::rhs(std::span<const double> c, std::span<double> dcdt, int threads) const {
  require_length(c, n_, "rhs state");
  if (static_cast<int>(dcdt.size()) != n_ + 1)
    throw std::invalid_argument("rhs output: expected N+1 entries");

  auto run_range = [this, c, dcdt](int begin, int end) {
    FluxTerms terms;
    for (int i = begin; i < end; ++i) {
      accumulate(i, c, terms);
      dcdt[i] = terms.net();
    }
  };

  const int workers = std::min(std::max(threads, 1), n_ + 1);
  if (workers == 1) {
    run_range(0, n_ + 1);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (n_ + workers) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(begin + chunk, n_ + 1);
    if (begin >= end) break;
    pool.emplace_back(run_range, begin, end);
  }
  for (auto& worker : pool) worker.join();
}

std::vector<double> FluxEvaluator::rhs(std::span<const double> c, int threads) const {
  std::vector<double> out(static_cast<std::size_t>(n_) + 1, 0.0);
  rhs(c, out, threads);
  return out;
}

FluxBreakdown FluxEvaluator::breakdown(std::span<const double> c) const {
  require_length(c, n_, "breakdown state");
  FluxBreakdown result;
  result.variant = variant_;
  result.per_size.resize(static_cast<std::size_t>(n_) + 1);
  for (int i = 0; i <= n_; ++i) accumulate(i, c, result.per_size[i]);
  return result;
}

double FluxEvaluator::weighted_moment_rate(std::span<const double> c,
                                           std::span<const double> weights) const {
  require_length(c, n_, "weighted rate state");
  require_length(weights, n_, "weight sequence");
  const int n = n_;
  detail::KahanSum total;

  for (int k = 1; k <= std::min(n - 1, kmax_); ++k)
    for (int i = k; i <= n; ++i) {
      const double ci = c[i];
      if (ci == 0.0) continue;
      for (int j = 0; j <= n - k; ++j) {
        const double cj = c[j];
        if (cj == 0.0) continue;
        const double w = weights[j + k] + weights[i - k] - weights[j] - weights[i];
        if (w == 0.0) continue;
        total.add(w * coef(i, j, k) * ci * cj);
      }
    }

  if (variant_ == Variant::NonIsolated) {
    // Pinning c_0 removes the void equation; the rate of sum g_i c_i picks
    // up -g_0 * (void destruction - void creation).
    detail::KahanSum destroyed, created;
    for (int k = 1; k <= std::min(n, kmax_); ++k) {
      const double ck = c[k];
      if (ck == 0.0) continue;
      for (int j = 0; j <= n - k; ++j)
        if (c[j] != 0.0) destroyed.add(coef(k, j, k) * ck * c[j]);
    }
    if (c[0] != 0.0)
      for (int k = 1; k <= std::min(n, kmax_); ++k)
        for (int i = k; i <= n; ++i)
          if (c[i] != 0.0) created.add(coef(i, 0, k) * c[i] * c[0]);
    total.add(-weights[0] * (destroyed.value() - created.value()));
  }

  return total.value();
}

FluxBreakdown flux_breakdown(const RateKernel& kernel, const ConcentrationState& state) {
  FluxEvaluator eval(kernel, state.truncation(), state.variant);
  return eval.breakdown(state.values);
}

std::vector<double> rhs(const RateKernel& kernel, const ConcentrationState& state) {
  FluxEvaluator eval(kernel, state.truncation(), state.variant);
  return eval.rhs(state.values);
}

double weighted_moment_rate(const RateKernel& kernel, const ConcentrationState& state,
                            std::span<const double> weights) {
  FluxEvaluator eval(kernel, state.truncation(), state.variant);
  return eval.weighted_moment_rate(state.values, weights);
}

std::vector<double> rhs_enumeration_oracle(const RateKernel& kernel,
                                           const ConcentrationState& state) {
  const int n = state.truncation();
  const auto& c = state.values;
  std::vector<detail::KahanSum> delta(static_cast<std::size_t>(n) + 1);

  for (int k = 1; k <= n; ++k)
    for (int i = k; i <= n; ++i) {
      if (c[i] == 0.0) continue;
      for (int j = 0; j <= n - k; ++j) {
        if (c[j] == 0.0) continue;
        const double rate = kernel.evaluate(i, j, k) * c[i] * c[j];
        if (rate == 0.0) continue;
        delta[i].add(-rate);      // donor loses a k-chunk
        delta[j].add(-rate);      // acceptor is consumed
        delta[i - k].add(rate);   // shrunken donor appears
        delta[j + k].add(rate);   // grown acceptor appears
      }
    }

  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i <= n; ++i) out[i] = delta[i].value();
  if (state.variant == Variant::NonIsolated) out[0] = 0.0;
  return out;
}

double balanced_net_rate(const RateKernel& kernel, const ConcentrationState& state, int q, int p,
                         int k) {
  const int n = state.truncation();
  if (k < 1 || q < k || q > n || p < 0 || p + k > n)
    throw std::out_of_range("balanced_net_rate: need 1 <= k <= q <= N and 0 <= p <= N-k");
  const auto& c = state.values;
  return kernel.evaluate(q, p, k) * c[q] * c[p] -
         kernel.evaluate(p + k, q - k, k) * c[p + k] * c[q - k];
}

}  // namespace dged
