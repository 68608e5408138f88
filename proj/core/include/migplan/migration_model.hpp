#pragma once

#include <vector>

namespace migplan {

/// Pre-copy termination parameters: v_thd is the dirty-memory threshold that
/// triggers stop-and-copy, t_r the VM resume time at the target host.
struct MigrationModelParams {
  double v_thd_bytes = 1e8;
  double t_r_s = 0.02;
};

/// Per-round view of an iterative pre-copy transfer.
/// volumes[0] = M, volumes[i] = R * times[i-1], times[i] = volumes[i] / L,
/// total_s = sum of times, lambda = R / L.
struct PrecopyBreakdown {
  int rounds = 0;  // n; rounds 0..n are transferred
  std::vector<double> volumes_bytes;
  std::vector<double> times_s;
  double total_s = 0;
  double lambda = 0;
};

/// Number of pre-copy rounds until the remaining dirty volume is at most
/// v_thd: the smallest n with M * (R/L)^n <= v_thd. Degenerate inputs:
/// R == 0 gives 1 (one full copy, then an empty round); v_thd >= M gives 0
/// (immediate stop-and-copy). Throws ValidationError when L <= R.
int round_count(double memory_bytes, double dirty_rate, double bandwidth,
                double v_thd_bytes);

/// Full pre-copy breakdown; total time is the closed form
/// (M/L) * (1 - lambda^(n+1)) / (1 - lambda).
PrecopyBreakdown precopy_time(double memory_bytes, double dirty_rate,
                              double bandwidth, double v_thd_bytes);

/// Net-transmission-rate approximation of the migration time: M / (L - R).
double approx_time(double memory_bytes, double dirty_rate, double bandwidth);

/// Stop-and-copy duration: v_thd / L + t_r.
double downtime(double v_thd_bytes, double bandwidth, double t_r_s);

}  // namespace migplan
