#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "respert/errors.hpp"
#include "respert/format.hpp"
#include "respert/models.hpp"
#include "respert/parallel.hpp"
#include "respert/resistance.hpp"
#include "respert/rng.hpp"

namespace respert {

// Seed-stream tags. Each sampling context hashes its tag into the derived
// seed so calibration, null and alternative batches never share draws.
namespace stream {
constexpr std::uint64_t kCalibration = 1;
constexpr std::uint64_t kNull = 2;
constexpr std::uint64_t kAlternative = 3;
constexpr std::uint64_t kTimeseries = 4;
constexpr std::uint64_t kOracleCheck = 5;
}  // namespace stream

enum class Verdict { kAcceptH0, kRejectH0 };

/// One hypothesis-test evaluation on a growth snapshot.
struct TestOutcome {
  int n = 0;
  double d_n = 0.0;       // distance between the padded subgraph and the full graph
  double h = 0.0;         // linear term h(n, k_n), reported for diagnostics
  double z_n = 0.0;
  double threshold = 0.0;
  double level = 0.0;
  Verdict verdict = Verdict::kAcceptH0;
};

/// Empirically calibrated rejection threshold together with the sorted null
/// statistics it came from.
struct ThresholdEstimate {
  double level = 0.0;
  int replicates = 0;           // retained null replicates
  double threshold = 0.0;
  std::vector<double> samples;  // sorted ascending
  std::uint64_t master_seed = 0;
  int n = 0;                    // calibration size; test_step enforces a match
  double p = 0.0;
  double q = 0.0;
  int attempts = 0;
  double acceptance_rate = 0.0;
};

/// Distance moved in one growth step: the induced subgraph (padded by the
/// arriving vertex) against the full graph.
inline double distance_step(const GrowthPair& pair, const DistanceParams& params = {}) {
  return rd_distance(pair.sub, pair.full, params);
}

/// Linear leading term floor(n/2) + ceil(n/2) * k/(1+k): the contribution of
/// the arriving vertex's pairs when k cross-community edges are present.
inline double h_linear(int n, int k) {
  if (n < 1 || k < 0) throw InvalidParameter("h_linear requires n >= 1, k >= 0");
  const double cross = static_cast<double>(k) / (1.0 + k);
  return (n / 2) + ((n + 1) / 2) * cross;
}

/// Test statistic (16 m^2 / n^4) * (d - n). Large values indicate that the
/// growth step loosened the bottleneck between the communities.
inline double z_statistic(double d_n, long long m_n, int n) {
  if (n < 1) throw InvalidParameter("z_statistic requires n >= 1");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m_n);
  return (16.0 * md * md) / (nd * nd * nd * nd) * (d_n - nd);
}

/// Empirical quantile with the "higher" interpolation rule: the value at
/// index ceil((count-1) * q) of the ascending-sorted sample.
inline double quantile_higher(const std::vector<double>& sorted_ascending, double q) {
  if (sorted_ascending.empty()) throw InvalidParameter("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidParameter("quantile level outside [0,1]");
  const double pos = q * static_cast<double>(sorted_ascending.size() - 1);
  std::size_t idx = static_cast<std::size_t>(std::ceil(pos - 1e-9));
  if (idx >= sorted_ascending.size()) idx = sorted_ascending.size() - 1;
  return sorted_ascending[idx];
}

/// Calibrates the rejection threshold by simulation under the null: growth
/// snapshots are drawn with derived seeds and only those whose step created
/// no new cross-community edge are retained, up to 10*replicates attempts.
/// The threshold is the empirical (1-level) quantile of their statistics.
inline ThresholdEstimate calibrate_threshold(const Schedule& schedule, int n, double level,
                                             int replicates, std::uint64_t master_seed,
                                             unsigned threads = 0,
                                             const DistanceParams& params = {}) {
  if (replicates < 20) throw InvalidParameter("calibration requires at least 20 replicates");
  if (!(level > 0.0 && level < 1.0)) throw InvalidParameter("level must lie in (0,1)");
  const ScheduleSample sample = evaluate_schedule(schedule, n);

  // Rejection scan is cheap (no distance computation), so run it serially
  // with attempt-indexed seeds; the expensive statistics run in parallel.
  const int max_attempts = 10 * replicates;
  std::vector<std::uint64_t> retained;
  int attempts = 0;
  while (attempts < max_attempts && static_cast<int>(retained.size()) < replicates) {
    const std::uint64_t seed =
        derive_seed(master_seed, {stream::kCalibration, static_cast<std::uint64_t>(n),
                                  static_cast<std::uint64_t>(attempts)});
    ++attempts;
    const GrowthPair gp = grow_pair(n, sample, seed);
    if (gp.k_after == gp.k_before) retained.push_back(seed);
  }
  if (static_cast<int>(retained.size()) < (replicates + 1) / 2) {
    throw CalibrationStarved("only " + std::to_string(retained.size()) + " null snapshots in " +
                             std::to_string(attempts) +
                             " attempts; q is too large for null conditioning at n=" +
                             std::to_string(n));
  }

  std::vector<double> stats(retained.size(), 0.0);
  parallel_for(retained.size(), threads, [&](std::size_t i) {
    const GrowthPair gp = grow_pair(n, sample, retained[i]);
    stats[i] = z_statistic(distance_step(gp, params), gp.m_before, n);
  });
  std::sort(stats.begin(), stats.end());

  ThresholdEstimate est;
  est.level = level;
  est.replicates = static_cast<int>(stats.size());
  est.threshold = quantile_higher(stats, 1.0 - level);
  est.samples = std::move(stats);
  est.master_seed = master_seed;
  est.n = n;
  est.p = sample.p;
  est.q = sample.q;
  est.attempts = attempts;
  est.acceptance_rate = static_cast<double>(est.replicates) / attempts;
  return est;
}

/// Applies the calibrated test to one growth snapshot. Rejecting the null
/// means the statistic reached the threshold (the rejection region is
/// closed: z == threshold rejects).
inline TestOutcome test_step(const GrowthPair& pair, const ThresholdEstimate& est,
                             const DistanceParams& params = {}) {
  if (pair.sub.vertex_count() != est.n) {
    throw ConfigMismatch("snapshot has n=" + std::to_string(pair.sub.vertex_count()) +
                         " but the threshold was calibrated at n=" + std::to_string(est.n));
  }
  TestOutcome out;
  out.n = est.n;
  out.d_n = distance_step(pair, params);
  out.h = h_linear(out.n, pair.k_before);
  out.z_n = z_statistic(out.d_n, pair.m_before, out.n);
  out.threshold = est.threshold;
  out.level = est.level;
  out.verdict = out.z_n >= est.threshold ? Verdict::kRejectH0 : Verdict::kAcceptH0;
  return out;
}

/// CSV persistence: one metadata row, then (replicate, z_value) rows.
inline void write_threshold_csv(const ThresholdEstimate& est, std::ostream& os) {
  os << "n=" << est.n << ",p=" << fmt_double(est.p) << ",q=" << fmt_double(est.q)
     << ",epsilon=" << fmt_double(est.level) << ",M=" << est.replicates
     << ",master_seed=" << est.master_seed << '\n';
  os << "replicate,z_value\n";
  for (std::size_t i = 0; i < est.samples.size(); ++i) {
    os << i << ',' << fmt_double(est.samples[i]) << '\n';
  }
  if (!os) throw IoError("failed writing threshold csv");
}

}  // namespace respert
