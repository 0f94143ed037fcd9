#include "dged/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "dged/analysis.hpp"

namespace dged {

std::string to_string(Method method) {
  return method == Method::AdaptiveRK45 ? "rk45" : "rk4";
}

namespace {

// Dormand-Prince 5(4) tableau. The 7th stage input equals the 5th-order
// result (FSAL), so an accepted step reuses its last stage as the next k1.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// y5 - y4 weights.
constexpr double kErr[7] = {71.0 / 57600,      0.0,          -71.0 / 16695, 71.0 / 1920,
                            -17253.0 / 339200, 22.0 / 525,   -1.0 / 40};

struct SampleCursor {
  const std::vector<double>* times;
  std::size_t next = 0;

  bool pending() const { return next < times->size(); }
  double current() const { return (*times)[next]; }
};

void validate_config(const IntegratorConfig& config, double t0) {
  if (!(config.rtol >= 1e-14)) throw std::invalid_argument("integrator: rtol must be >= 1e-14");
  if (!(config.atol > 0.0)) throw std::invalid_argument("integrator: atol must be > 0");
  if (!(config.h_init > 0.0)) throw std::invalid_argument("integrator: h_init must be > 0");
  if (!(config.h_max > 0.0)) throw std::invalid_argument("integrator: h_max must be > 0");
  if (!(config.negativity_floor >= 0.0))
    throw std::invalid_argument("integrator: negativity_floor must be >= 0");
  if (config.sample_times.empty())
    throw std::invalid_argument("integrator: sample_times must not be empty");
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : config.sample_times) {
    if (!(t > prev)) throw std::invalid_argument("integrator: sample_times must strictly increase");
    prev = t;
  }
  if (config.sample_times.front() < 0.0 || config.sample_times.front() < t0)
    throw std::invalid_argument("integrator: sample_times must start at or after t0");
}

class Recorder {
 public:
  Recorder(Trajectory& out, Variant variant, const DiagnosticOptions& diag, int truncation)
      : out_(out), variant_(variant), diag_(diag) {
    if (diag_.lyapunov_profile &&
        static_cast<int>(diag_.lyapunov_profile->size()) != truncation + 1)
      throw std::invalid_argument("integrator: lyapunov profile needs N+1 entries");
  }

  void record(double t, std::vector<double> values) {
    TrajectorySample sample;
    sample.state.values = std::move(values);
    sample.state.time = t;
    sample.state.variant = variant_;
    sample.moments.p0 = moment(sample.state, 0.0);
    sample.moments.p1 = moment(sample.state, 1.0);
    sample.moments.p2 = moment(sample.state, 2.0);
    if (diag_.sigma) sample.moments.sigma = sigma_moment(sample.state, *diag_.sigma);
    if (diag_.lyapunov_profile)
      sample.moments.lyapunov = lyapunov_v(sample.state, *diag_.lyapunov_profile);
    out_.samples.push_back(std::move(sample));
  }

 private:
  Trajectory& out_;
  Variant variant_;
  const DiagnosticOptions& diag_;
};

}  // namespace

Trajectory integrate(const RateKernel& kernel, const ConcentrationState& initial,
                     const IntegratorConfig& config, const DiagnosticOptions& diagnostics) {
  const int n = initial.truncation();
  if (n < 1) throw std::invalid_argument("integrator: state truncation must be >= 1");
  for (double v : initial.values)
    if (!(v >= 0.0)) throw std::invalid_argument("integrator: initial state must be nonnegative");
  validate_config(config, initial.time);

  const FluxEvaluator eval(kernel, n, initial.variant);

  Trajectory trajectory;
  trajectory.config = config;
  Recorder recorder(trajectory, initial.variant, diagnostics, n);

  const std::size_t dim = initial.values.size();
  auto derivative = [&eval, dim](const std::vector<double>& y, std::vector<double>& dy) {
    eval.rhs(std::span<const double>(y.data(), dim), std::span<double>(dy.data(), dim));
    for (double d : dy)
      if (!std::isfinite(d))
        throw IntegratorAbort(IntegratorAbort::Reason::NonFiniteDerivative,
                              "integrator: non-finite derivative");
  };

  double t = initial.time;
  std::vector<double> y = initial.values;

  SampleCursor cursor{&config.sample_times};
  const double t_end = config.sample_times.back();
  auto time_slack = [](double at) { return 1e-12 * std::max(1.0, std::abs(at)); };

  // samples at (or numerically at) the start
  while (cursor.pending() && cursor.current() <= t + time_slack(t)) {
    recorder.record(cursor.current(), y);
    ++cursor.next;
  }

  const double underflow_limit = 1e-12 * config.h_init;
  const double floor = config.negativity_floor;
  StepStats& stats = trajectory.stats;

  auto emit_in_step = [&](double t0, const std::vector<double>& y0, double t1,
                          const std::vector<double>& y1) {
    while (cursor.pending() && cursor.current() <= t1 + time_slack(t1)) {
      const double s = cursor.current();
      const double w = std::clamp((s - t0) / (t1 - t0), 0.0, 1.0);
      std::vector<double> interp(dim);
      for (std::size_t m = 0; m < dim; ++m) interp[m] = y0[m] + w * (y1[m] - y0[m]);
      recorder.record(s, std::move(interp));
      ++cursor.next;
    }
  };

  if (config.method == Method::AdaptiveRK45) {
    std::array<std::vector<double>, 7> k;
    for (auto& stage : k) stage.assign(dim, 0.0);
    std::vector<double> work(dim, 0.0);
    std::vector<double> y_next(dim, 0.0);

    derivative(y, k[0]);
    double h_ctrl = std::min(config.h_init, config.h_max);

    while (cursor.pending() && t < t_end - time_slack(t_end)) {
      // the horizon clamp may shorten the executed step arbitrarily; only the
      // controller's step is subject to the underflow guard
      if (h_ctrl < underflow_limit)
        throw IntegratorAbort(IntegratorAbort::Reason::StepUnderflow,
                              "integrator: step size underflow at t=" + std::to_string(t));
      const double h = std::min({h_ctrl, config.h_max, t_end - t});

      for (int stage = 1; stage <= 6; ++stage) {
        for (std::size_t m = 0; m < dim; ++m) {
          double acc = 0.0;
          for (int prev = 0; prev < stage; ++prev) {
            const double a = kA[stage][prev];
            if (a != 0.0) acc += a * k[prev][m];
          }
          work[m] = y[m] + h * acc;
        }
        if (stage == 6) y_next = work;  // FSAL: stage-7 input is the order-5 result
        derivative(work, k[stage]);
      }

      double err_sq = 0.0;
      double most_negative = 0.0;
      for (std::size_t m = 0; m < dim; ++m) {
        double e = 0.0;
        for (int stage = 0; stage < 7; ++stage)
          if (kErr[stage] != 0.0) e += kErr[stage] * k[stage][m];
        e *= h;
        const double scale =
            config.atol + config.rtol * std::max(std::abs(y[m]), std::abs(y_next[m]));
        err_sq += (e / scale) * (e / scale);
        most_negative = std::min(most_negative, y_next[m]);
      }
      const double err = std::sqrt(err_sq / static_cast<double>(dim));

      const bool error_ok = std::isfinite(err) && err <= 1.0;
      const bool cone_ok = most_negative > -floor;

      if (error_ok && cone_ok) {
        for (auto& v : y_next)
          if (v < 0.0) v = 0.0;  // only values in (-floor, 0) reach here
        const double t_new = t + h;
        emit_in_step(t, y, t_new, y_next);
        ++stats.accepted;
        stats.min_step = std::min(stats.min_step, h);
        stats.max_step = std::max(stats.max_step, h);
        y.swap(y_next);
        k[0].swap(k[6]);
        t = t_new;
        const double grow =
            err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
        h_ctrl = h * grow;
      } else {
        ++stats.rejected;
        double factor = 1.0;
        if (!std::isfinite(err))
          factor = 0.5;
        else if (err > 1.0)
          factor = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
        if (!cone_ok) factor = std::min(factor, 0.5);
        h_ctrl = h * factor;
        // k[0] still holds f(t, y); retry from the same state
      }
    }
  } else {
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), work(dim), y_next(dim);
    while (cursor.pending() && t < t_end - time_slack(t_end)) {
      double h = std::min(config.h_init, t_end - t);
      bool accepted = false;
      while (!accepted) {
        derivative(y, k1);
        for (std::size_t m = 0; m < dim; ++m) work[m] = y[m] + 0.5 * h * k1[m];
        derivative(work, k2);
        for (std::size_t m = 0; m < dim; ++m) work[m] = y[m] + 0.5 * h * k2[m];
        derivative(work, k3);
        for (std::size_t m = 0; m < dim; ++m) work[m] = y[m] + h * k3[m];
        derivative(work, k4);
        double most_negative = 0.0;
        for (std::size_t m = 0; m < dim; ++m) {
          y_next[m] = y[m] + h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
          most_negative = std::min(most_negative, y_next[m]);
        }
        if (most_negative > -floor) {
          accepted = true;
        } else {
          ++stats.rejected;
          h *= 0.5;
          if (h < underflow_limit)
            throw IntegratorAbort(IntegratorAbort::Reason::StepUnderflow,
                                  "integrator: step size underflow at t=" + std::to_string(t));
        }
      }
      for (auto& v : y_next)
        if (v < 0.0) v = 0.0;
      const double t_new = t + h;
      emit_in_step(t, y, t_new, y_next);
      ++stats.accepted;
      stats.min_step = std::min(stats.min_step, h);
      stats.max_step = std::max(stats.max_step, h);
      y.swap(y_next);
      t = t_new;
    }
  }

  // flush samples numerically at the horizon
  while (cursor.pending()) {
    recorder.record(cursor.current(), y);
    ++cursor.next;
  }

  return trajectory;
}

ConservationDrift conservation_drift(const Trajectory& trajectory) {
  if (trajectory.samples.empty())
    throw std::invalid_argument("conservation_drift: empty trajectory");
  const double p0_start = trajectory.samples.front().moments.p0;
  const double p1_start = trajectory.samples.front().moments.p1;
  ConservationDrift drift;
  for (const auto& sample : trajectory.samples) {
    drift.p0 = std::max(drift.p0, std::abs(sample.moments.p0 - p0_start));
    drift.p1 = std::max(drift.p1, std::abs(sample.moments.p1 - p1_start));
  }
  return drift;
}

}  // namespace dged
