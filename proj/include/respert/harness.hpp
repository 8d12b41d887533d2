#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "respert/detection.hpp"
#include "respert/errors.hpp"
#include "respert/format.hpp"
#include "respert/models.hpp"
#include "respert/parallel.hpp"
#include "respert/svg.hpp"

namespace respert {

enum class ExperimentKind { kTimeseries, kSeparation, kPower, kOracleCheck };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kTimeseries;
  std::vector<int> n_values;
  Schedule schedule;
  int replicates = 200;
  double level = 0.05;
  double beta = 1.0;
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";
  unsigned threads = 0;  // 0 = all hardware threads
  bool log_y = false;
};

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n_values.empty()) throw InvalidParameter("config needs at least one n value");
  for (int n : cfg.n_values) {
    if (n < 4) throw InvalidParameter("n=" + std::to_string(n) + " is below the minimum of 4");
  }
  if (cfg.replicates < 1) throw InvalidParameter("replicates must be >= 1");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw InvalidParameter("level must lie in (0,1)");
  if (!(cfg.beta > 0.0)) throw InvalidParameter("beta must be positive");
}

// ---------------------------------------------------------------------------
// JSON configuration

inline nlohmann::ordered_json rule_to_json(const ScheduleRule& r) {
  if (r.kind == ScheduleRule::Kind::Constant) {
    return {{"rule", "constant"}, {"c", r.c}};
  }
  return {{"rule", "powerlog"}, {"c", r.c}, {"a", r.a}, {"b", r.b}};
}

inline ScheduleRule rule_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("rule").get<std::string>();
  if (kind == "constant") return ScheduleRule::constant(j.at("c").get<double>());
  if (kind == "powerlog") {
    return ScheduleRule::power_log(j.at("c").get<double>(), j.at("a").get<double>(),
                                   j.at("b").get<double>());
  }
  throw InvalidParameter("unknown schedule rule '" + kind + "'");
}

inline std::string kind_to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kTimeseries: return "timeseries";
    case ExperimentKind::kSeparation: return "separation";
    case ExperimentKind::kPower: return "power";
    case ExperimentKind::kOracleCheck: return "oracle_check";
  }
  throw InvalidParameter("unknown experiment kind");
}

inline ExperimentKind kind_from_string(const std::string& s) {
  if (s == "timeseries") return ExperimentKind::kTimeseries;
  if (s == "separation") return ExperimentKind::kSeparation;
  if (s == "power") return ExperimentKind::kPower;
  if (s == "oracle_check") return ExperimentKind::kOracleCheck;
  throw InvalidParameter("unknown experiment kind '" + s + "'");
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["kind"] = kind_to_string(cfg.kind);
  j["n_values"] = cfg.n_values;
  j["schedule"] = {{"p", rule_to_json(cfg.schedule.p_rule)},
                   {"q", rule_to_json(cfg.schedule.q_rule)}};
  j["replicates"] = cfg.replicates;
  j["level"] = cfg.level;
  j["beta"] = cfg.beta;
  j["master_seed"] = cfg.master_seed;
  j["out_dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  j["log_y"] = cfg.log_y;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("kind")) cfg.kind = kind_from_string(j.at("kind").get<std::string>());
    cfg.n_values = j.at("n_values").get<std::vector<int>>();
    const nlohmann::json& sched = j.at("schedule");
    cfg.schedule.p_rule = rule_from_json(sched.at("p"));
    cfg.schedule.q_rule = rule_from_json(sched.at("q"));
    if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<int>();
    if (j.contains("level")) cfg.level = j.at("level").get<double>();
    if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
    if (j.contains("log_y")) cfg.log_y = j.at("log_y").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("bad experiment config: ") + e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Time series

struct TimeSeriesRow {
  int n = 0;
  double d_n = 0.0;
  int k_n = 0;
  int k_np1 = 0;
  bool event = false;  // true iff the growth step created a cross-community edge
};

struct TimeSeriesRecord {
  std::vector<TimeSeriesRow> rows;
};

/// One growth snapshot per configured n, each with its own derived seed, so
/// the series entries are mutually independent and the record depends only
/// on (config, master_seed).
inline TimeSeriesRecord run_timeseries(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const DistanceParams params{cfg.beta};
  TimeSeriesRecord record;
  record.rows.resize(cfg.n_values.size());
  parallel_for(cfg.n_values.size(), cfg.threads, [&](std::size_t i) {
    const int n = cfg.n_values[i];
    const ScheduleSample sample = evaluate_schedule(cfg.schedule, n);
    const std::uint64_t seed =
        derive_seed(cfg.master_seed, {stream::kTimeseries, static_cast<std::uint64_t>(n)});
    const GrowthPair gp = grow_pair(n, sample, seed);
    record.rows[i] = {n, distance_step(gp, params), gp.k_before, gp.k_after,
                      gp.k_after > gp.k_before};
  });
  return record;
}

inline void write_timeseries_csv(const TimeSeriesRecord& record, std::ostream& os) {
  os << "n,d_n,k_n,k_np1,event\n";
  for (const TimeSeriesRow& r : record.rows) {
    os << r.n << ',' << fmt_double(r.d_n) << ',' << r.k_n << ',' << r.k_np1 << ','
       << (r.event ? 1 : 0) << '\n';
  }
  if (!os) throw IoError("failed writing timeseries csv");
}

// ---------------------------------------------------------------------------
// Separation and power

struct HypothesisSummary {
  double lo = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, hi = 0.0;
};

struct SeparationRecord {
  int n = 0;
  double level = 0.0;
  std::vector<double> z0_raw, z1_raw;    // per-replicate statistics, replicate order
  std::vector<double> z0_norm, z1_norm;  // affinely mapped so the null batch
                                         // has mean 0 and unit variance
  HypothesisSummary h0, h1;              // five-number summaries of the normalized values
  double norm_mean = 0.0;
  double norm_stddev = 1.0;
  bool degenerate_normalization = false;  // too few samples or zero variance
  double threshold = 0.0;
  bool threshold_from_calibration = false;
  double power = 0.0;
  double level_empirical = 0.0;
  std::optional<ThresholdEstimate> calibration;
};

namespace detail {

inline double quantile_linear(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline HypothesisSummary summarize(std::vector<double> values) {
  HypothesisSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.lo = values.front();
  s.hi = values.back();
  s.q1 = quantile_linear(values, 0.25);
  s.median = quantile_linear(values, 0.5);
  s.q3 = quantile_linear(values, 0.75);
  return s;
}

}  // namespace detail

/// Growth snapshot conditioned by rejection on whether the step created a
/// cross-community edge. Attempts are seed-indexed, so the result is the
/// same whichever worker runs the replicate.
inline GrowthPair sample_conditioned_pair(const ScheduleSample& sample, int n,
                                          std::uint64_t master_seed, std::uint64_t tag,
                                          int replicate, bool want_alternative,
                                          int max_attempts = 200000) {
  if (want_alternative && sample.q == 0.0) {
    throw CalibrationStarved("cross-community probability is zero at n=" + std::to_string(n) +
                             "; no growth step can create a cross-community edge");
  }
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t seed =
        derive_seed(master_seed, {tag, static_cast<std::uint64_t>(n),
                                  static_cast<std::uint64_t>(replicate),
                                  static_cast<std::uint64_t>(attempt)});
    GrowthPair gp = grow_pair(n, sample, seed);
    if ((gp.k_after > gp.k_before) == want_alternative) return gp;
  }
  throw CalibrationStarved(std::string("no ") + (want_alternative ? "alternative" : "null") +
                           "-conditioned snapshot at n=" + std::to_string(n) + " after " +
                           std::to_string(max_attempts) + " attempts");
}

/// At each configured n: calibrate a threshold on one null batch, then draw
/// fresh null and alternative batches, record their statistics (raw and
/// normalized), the box summaries, the out-of-sample level and the power.
/// Fewer than 20 replicates cannot support calibration; the threshold then
/// falls back to the in-sample null quantile and the record is flagged.
inline std::vector<SeparationRecord> run_separation(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const DistanceParams params{cfg.beta};
  const int m = cfg.replicates;
  std::vector<SeparationRecord> records;

  for (int n : cfg.n_values) {
    const ScheduleSample sample = evaluate_schedule(cfg.schedule, n);
    SeparationRecord rec;
    rec.n = n;
    rec.level = cfg.level;
    rec.z0_raw.resize(m);
    rec.z1_raw.resize(m);

    auto fill = [&](std::uint64_t tag, bool want_alternative, std::vector<double>& out) {
      parallel_for(static_cast<std::size_t>(m), cfg.threads, [&](std::size_t r) {
        const GrowthPair gp = sample_conditioned_pair(sample, n, cfg.master_seed, tag,
                                                      static_cast<int>(r), want_alternative);
        out[r] = z_statistic(distance_step(gp, params), gp.m_before, n);
      });
    };
    fill(stream::kNull, false, rec.z0_raw);
    fill(stream::kAlternative, true, rec.z1_raw);

    if (m >= 20) {
      rec.calibration = calibrate_threshold(cfg.schedule, n, cfg.level, m, cfg.master_seed,
                                            cfg.threads, params);
      rec.threshold = rec.calibration->threshold;
      rec.threshold_from_calibration = true;
    } else {
      std::vector<double> sorted = rec.z0_raw;
      std::sort(sorted.begin(), sorted.end());
      rec.threshold = quantile_higher(sorted, 1.0 - cfg.level);
      rec.threshold_from_calibration = false;
    }

    double mean = 0.0;
    for (double z : rec.z0_raw) mean += z;
    mean /= m;
    double var = 0.0;
    for (double z : rec.z0_raw) var += (z - mean) * (z - mean);
    var /= m;
    const double stddev = std::sqrt(var);
    rec.norm_mean = mean;
    rec.degenerate_normalization = (m < 2) || !(stddev > 0.0);
    rec.norm_stddev = rec.degenerate_normalization ? 1.0 : stddev;
    auto normalize_batch = [&](const std::vector<double>& raw) {
      std::vector<double> out(raw.size());
      for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - mean) / rec.norm_stddev;
      return out;
    };
    rec.z0_norm = normalize_batch(rec.z0_raw);
    rec.z1_norm = normalize_batch(rec.z1_raw);
    rec.h0 = detail::summarize(rec.z0_norm);
    rec.h1 = detail::summarize(rec.z1_norm);

    int reject0 = 0, reject1 = 0;
    for (double z : rec.z0_raw) reject0 += z >= rec.threshold;
    for (double z : rec.z1_raw) reject1 += z >= rec.threshold;
    rec.level_empirical = static_cast<double>(reject0) / m;
    rec.power = static_cast<double>(reject1) / m;

    records.push_back(std::move(rec));
  }
  return records;
}

struct PowerRow {
  int n = 0;
  double epsilon = 0.0;
  double threshold = 0.0;
  double power = 0.0;
  double level_empirical = 0.0;
};

inline std::vector<PowerRow> power_rows(const std::vector<SeparationRecord>& records) {
  std::vector<PowerRow> rows;
  rows.reserve(records.size());
  for (const SeparationRecord& r : records) {
    rows.push_back({r.n, r.level, r.threshold, r.power, r.level_empirical});
  }
  return rows;
}

inline std::vector<PowerRow> run_power(const ExperimentConfig& cfg) {
  return power_rows(run_separation(cfg));
}

inline void write_separation_csv(const std::vector<SeparationRecord>& records,
                                 std::ostream& os) {
  os << "n,hypothesis,replicate,z_raw,z_normalized\n";
  for (const SeparationRecord& rec : records) {
    for (std::size_t r = 0; r < rec.z0_raw.size(); ++r) {
      os << rec.n << ",H0," << r << ',' << fmt_double(rec.z0_raw[r]) << ','
         << fmt_double(rec.z0_norm[r]) << '\n';
    }
    for (std::size_t r = 0; r < rec.z1_raw.size(); ++r) {
      os << rec.n << ",H1," << r << ',' << fmt_double(rec.z1_raw[r]) << ','
         << fmt_double(rec.z1_norm[r]) << '\n';
    }
  }
  if (!os) throw IoError("failed writing separation csv");
}

inline void write_power_csv(const std::vector<PowerRow>& rows, std::ostream& os) {
  os << "n,epsilon,threshold,power,level_empirical\n";
  for (const PowerRow& r : rows) {
    os << r.n << ',' << fmt_double(r.epsilon) << ',' << fmt_double(r.threshold) << ','
       << fmt_double(r.power) << ',' << fmt_double(r.level_empirical) << '\n';
  }
  if (!os) throw IoError("failed writing power csv");
}

// ---------------------------------------------------------------------------
// Oracle check

struct OracleCheckReport {
  long long checks = 0;
  long long failures = 0;
  double max_error = 0.0;
  int same_component_updates = 0;
  int bridge_updates = 0;
  std::vector<std::string> messages;

  bool passed() const { return failures == 0; }
};

/// Cross-validates the two independent resistance routes (pseudoinverse vs
/// spanning-tree counting) on random small graphs, then checks the
/// incremental edge update against full recomputation, including the
/// monotonicity of every entry. inject_fault corrupts one comparison on
/// purpose so harness plumbing for failures stays testable.
inline OracleCheckReport run_oracle_check(int n_max, int trials, std::uint64_t master_seed,
                                          bool inject_fault = false) {
  if (n_max < 2) throw InvalidParameter("oracle check needs n_max >= 2");
  if (trials < 1) throw InvalidParameter("oracle check needs at least one trial");
  OracleCheckReport report;
  auto record_failure = [&report](const std::string& msg) {
    ++report.failures;
    if (report.messages.size() < 20) report.messages.push_back(msg);
  };

  bool fault_pending = inject_fault;
  for (int t = 0; t < trials; ++t) {
    SplitMix64 meta(derive_seed(master_seed, {stream::kOracleCheck, 1, static_cast<std::uint64_t>(t)}));
    const int n = 2 + static_cast<int>(meta.next_u64() % static_cast<std::uint64_t>(n_max - 1));
    const double p = 0.25 + 0.65 * meta.next_double();
    const Graph g = sample_er(n, p, meta.next_u64());
    const ResistanceMatrix direct = resistance_matrix(g);
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        const std::optional<double> a = direct.at(u, v);
        const std::optional<double> b = oracle_resistance(g, u, v);
        ++report.checks;
        if (a.has_value() != b.has_value()) {
          record_failure("connectivity mismatch at trial " + std::to_string(t));
          continue;
        }
        if (!a.has_value()) continue;
        double lhs = *a;
        if (fault_pending) {
          lhs += 1e-3;
          fault_pending = false;
        }
        const double err = std::abs(lhs - *b);
        report.max_error = std::max(report.max_error, err);
        if (err > 1e-8) {
          record_failure("route disagreement " + fmt_double(err) + " at trial " +
                         std::to_string(t) + " pair (" + std::to_string(u) + "," +
                         std::to_string(v) + ")");
        }
      }
    }
  }

  for (int t = 0; t < trials; ++t) {
    SplitMix64 meta(derive_seed(master_seed, {stream::kOracleCheck, 2, static_cast<std::uint64_t>(t)}));
    const int n = 4 + static_cast<int>(meta.next_u64() % 27ULL);  // 4..30
    const double p = 0.15 + 0.6 * meta.next_double();
    // Every third trial splits the graph in two so the bridge branch of the
    // update gets exercised.
    const Graph g = (t % 3 == 0) ? sample_sbm(n, p, 0.0, meta.next_u64())
                                 : sample_er(n, p, meta.next_u64());
    std::vector<Edge> non_edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (!g.has_edge(u, v)) non_edges.emplace_back(u, v);
      }
    }
    if (non_edges.empty()) continue;
    const Edge added = non_edges[meta.next_u64() % non_edges.size()];
    const ResistanceMatrix before = resistance_matrix(g);
    if (before.connected(added.first, added.second)) {
      ++report.same_component_updates;
    } else {
      ++report.bridge_updates;
    }
    const ResistanceMatrix updated = update_add_edge(before, added.first, added.second);
    std::vector<Edge> edges = g.edges();
    edges.push_back(added);
    const ResistanceMatrix direct = resistance_matrix(graph_from_edge_list(n, edges));
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        const std::optional<double> a = updated.at(u, v);
        const std::optional<double> b = direct.at(u, v);
        ++report.checks;
        if (a.has_value() != b.has_value()) {
          record_failure("update connectivity mismatch at trial " + std::to_string(t));
          continue;
        }
        if (!a.has_value()) continue;
        const double err = std::abs(*a - *b);
        report.max_error = std::max(report.max_error, err);
        if (err > 1e-8) {
          record_failure("update disagreement " + fmt_double(err) + " at trial " +
                         std::to_string(t));
        }
        const std::optional<double> old = before.at(u, v);
        if (old.has_value() && *a > *old + 1e-10) {
          record_failure("monotonicity violation at trial " + std::to_string(t));
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Experiment orchestration

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << contents;
  if (!os) throw IoError("failed writing " + path.string());
}

inline BoxGlyph to_glyph(const HypothesisSummary& s, bool valid) {
  return {s.lo, s.q1, s.median, s.q3, s.hi, valid};
}

}  // namespace detail

inline void emit_timeseries_plot(const TimeSeriesRecord& record, std::ostream& os) {
  std::vector<std::pair<int, double>> series;
  std::vector<int> events;
  for (const TimeSeriesRow& r : record.rows) {
    series.emplace_back(r.n, r.d_n);
    if (r.event) events.push_back(r.n);
  }
  svg_timeseries(series, events, os);
}

inline void emit_separation_plot(const std::vector<SeparationRecord>& records, bool log_y,
                                 std::ostream& os) {
  std::vector<BoxPairColumn> columns;
  for (const SeparationRecord& r : records) {
    columns.push_back({r.n, detail::to_glyph(r.h0, !r.z0_norm.empty()),
                       detail::to_glyph(r.h1, !r.z1_norm.empty())});
  }
  svg_box_pairs(columns, log_y, os);
}

/// Runs the configured experiment and writes every artifact (resolved config
/// echo, CSVs, plots, calibration tables) under cfg.out_dir.
inline void run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
  detail::write_file(fs::path(cfg.out_dir) / "config.json", config_to_json(cfg).dump(2) + "\n");

  switch (cfg.kind) {
    case ExperimentKind::kTimeseries: {
      const TimeSeriesRecord record = run_timeseries(cfg);
      std::ostringstream csv, svg;
      write_timeseries_csv(record, csv);
      emit_timeseries_plot(record, svg);
      detail::write_file(fs::path(cfg.out_dir) / "timeseries.csv", csv.str());
      detail::write_file(fs::path(cfg.out_dir) / "timeseries.svg", svg.str());
      break;
    }
    case ExperimentKind::kSeparation: {
      const std::vector<SeparationRecord> records = run_separation(cfg);
      std::ostringstream sep, pow, svg;
      write_separation_csv(records, sep);
      write_power_csv(power_rows(records), pow);
      emit_separation_plot(records, cfg.log_y, svg);
      detail::write_file(fs::path(cfg.out_dir) / "separation.csv", sep.str());
      detail::write_file(fs::path(cfg.out_dir) / "power.csv", pow.str());
      detail::write_file(fs::path(cfg.out_dir) / "separation.svg", svg.str());
      for (const SeparationRecord& rec : records) {
        if (!rec.calibration) continue;
        std::ostringstream cal;
        write_threshold_csv(*rec.calibration, cal);
        detail::write_file(fs::path(cfg.out_dir) / ("calibration_n" + std::to_string(rec.n) + ".csv"),
                           cal.str());
      }
      break;
    }
    case ExperimentKind::kPower: {
      const std::vector<SeparationRecord> records = run_separation(cfg);
      std::ostringstream pow;
      write_power_csv(power_rows(records), pow);
      detail::write_file(fs::path(cfg.out_dir) / "power.csv", pow.str());
      for (const SeparationRecord& rec : records) {
        if (!rec.calibration) continue;
        std::ostringstream cal;
        write_threshold_csv(*rec.calibration, cal);
        detail::write_file(fs::path(cfg.out_dir) / ("calibration_n" + std::to_string(rec.n) + ".csv"),
                           cal.str());
      }
      break;
    }
    case ExperimentKind::kOracleCheck: {
      const OracleCheckReport report = run_oracle_check(12, cfg.replicates, cfg.master_seed);
      std::ostringstream os;
      os << "checks=" << report.checks << " failures=" << report.failures
         << " max_error=" << fmt_double(report.max_error) << '\n';
      for (const std::string& msg : report.messages) os << msg << '\n';
      detail::write_file(fs::path(cfg.out_dir) / "oracle_check.txt", os.str());
      break;
    }
  }
}

}  // namespace respert
