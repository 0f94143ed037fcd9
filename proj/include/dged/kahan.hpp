#pragma once

namespace dged::detail {

// Kahan compensated accumulator. Used for every moment/flux sum so that
// conservation drift in long runs is attributable to the integrator, not
// to the diagnostics.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace dged::detail
