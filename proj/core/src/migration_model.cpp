#include "migplan/migration_model.hpp"

#include <cmath>

#include "migplan/errors.hpp"

namespace migplan {

namespace {

void check_inputs(double memory_bytes, double dirty_rate, double bandwidth,
                  double v_thd_bytes) {
  if (!(memory_bytes > 0) || !std::isfinite(memory_bytes)) {
    throw ValidationError("memory size must be positive");
  }
  if (!(v_thd_bytes > 0) || !std::isfinite(v_thd_bytes)) {
    throw ValidationError("stop-and-copy threshold must be positive");
  }
  if (dirty_rate < 0 || !std::isfinite(dirty_rate)) {
    throw ValidationError("dirty rate must be nonnegative");
  }
  if (!(bandwidth > dirty_rate)) {
    throw ValidationError("non-convergent migration: bandwidth <= dirty rate");
  }
}

}  // namespace

int round_count(double memory_bytes, double dirty_rate, double bandwidth,
                double v_thd_bytes) {
  check_inputs(memory_bytes, dirty_rate, bandwidth, v_thd_bytes);
  if (v_thd_bytes >= memory_bytes) return 0;
  if (dirty_rate == 0) return 1;

  const double lambda = dirty_rate / bandwidth;
  // n = ceil(log_lambda(v_thd / M)); both logs are negative. Snap against the
  // volume sequence to keep the boundary stable under rounding noise: values
  // within 1e-9 relative of the threshold count as reaching it.
  const double x = std::log(v_thd_bytes / memory_bytes) / std::log(lambda);
  int n = static_cast<int>(std::ceil(x - 1e-12));
  if (n < 1) n = 1;
  const double snap = v_thd_bytes * (1 + 1e-9);
  while (memory_bytes * std::pow(lambda, n) > snap) ++n;
  while (n > 1 && memory_bytes * std::pow(lambda, n - 1) <= snap) --n;
  return n;
}

PrecopyBreakdown precopy_time(double memory_bytes, double dirty_rate,
                              double bandwidth, double v_thd_bytes) {
  const int n = round_count(memory_bytes, dirty_rate, bandwidth, v_thd_bytes);
  PrecopyBreakdown b;
  b.rounds = n;
  b.lambda = dirty_rate / bandwidth;
  b.volumes_bytes.reserve(n + 1);
  b.times_s.reserve(n + 1);
  double volume = memory_bytes;
  for (int i = 0; i <= n; ++i) {
    const double t = volume / bandwidth;
    b.volumes_bytes.push_back(volume);
    b.times_s.push_back(t);
    volume = dirty_rate * t;
  }
  if (b.lambda == 0) {
    b.total_s = memory_bytes / bandwidth;
  } else {
    b.total_s = memory_bytes / bandwidth *
                (1 - std::pow(b.lambda, n + 1)) / (1 - b.lambda);
  }
  return b;
}

double approx_time(double memory_bytes, double dirty_rate, double bandwidth) {
  if (!(memory_bytes > 0) || !std::isfinite(memory_bytes)) {
    throw ValidationError("memory size must be positive");
  }
  if (dirty_rate < 0 || !std::isfinite(dirty_rate)) {
    throw ValidationError("dirty rate must be nonnegative");
  }
  if (!(bandwidth > dirty_rate)) {
    throw ValidationError("non-convergent migration: bandwidth <= dirty rate");
  }
  return memory_bytes / (bandwidth - dirty_rate);
}

double downtime(double v_thd_bytes, double bandwidth, double t_r_s) {
  if (!(bandwidth > 0)) throw ValidationError("bandwidth must be positive");
  if (v_thd_bytes < 0 || t_r_s < 0) {
    throw ValidationError("downtime inputs must be nonnegative");
  }
  return v_thd_bytes / bandwidth + t_r_s;
}

}  // namespace migplan
