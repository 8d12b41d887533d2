// Acceptance suite: one test case per release criterion, each printing a
// PASS/FAIL line. Every tolerance is pinned here, not computed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "respert/detection.hpp"
#include "respert/harness.hpp"
#include "respert/models.hpp"
#include "respert/resistance.hpp"

using namespace respert;

namespace {

void report(int id, const std::string& what, bool ok) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << std::endl;
  CHECK(ok);
}

Graph complete(int n) {
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return graph_from_edge_list(n, edges);
}

Graph random_connected(int n, double p, std::uint64_t seed) {
  for (std::uint64_t bump = 0;; ++bump) {
    const Graph g = sample_er(n, p, derive_seed(seed, {bump}));
    if (components(g).component_count == 1) return g;
  }
}

Schedule separated_regime() {
  return {ScheduleRule::power_log(1, 2, 1), ScheduleRule::power_log(1, 1, 2)};
}

Schedule overlap_regime() {
  return {ScheduleRule::power_log(1, 2, 1), ScheduleRule::power_log(1, 2, 1.5)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("criterion 1: analytic resistances") {
  bool ok = true;
  const ResistanceMatrix edge = resistance_matrix(graph_from_edge_list(2, {{0, 1}}));
  ok = ok && std::abs(edge.finite_at(0, 1) - 1.0) <= 1e-9;
  const ResistanceMatrix p3 = resistance_matrix(graph_from_edge_list(3, {{0, 1}, {1, 2}}));
  ok = ok && std::abs(p3.finite_at(0, 2) - 2.0) <= 1e-9;
  const ResistanceMatrix tri = resistance_matrix(complete(3));
  for (int u = 0; u < 3; ++u) {
    for (int v = u + 1; v < 3; ++v) {
      ok = ok && std::abs(tri.finite_at(u, v) - 2.0 / 3.0) <= 1e-9;
    }
  }
  const ResistanceMatrix k4 = resistance_matrix(complete(4));
  for (int u = 0; u < 4; ++u) {
    for (int v = u + 1; v < 4; ++v) {
      ok = ok && std::abs(k4.finite_at(u, v) - 0.5) <= 1e-9;
    }
  }
  report(1, "single edge, path, triangle, K4 within 1e-9", ok);
}

TEST_CASE("criterion 2: pseudoinverse route matches the spanning-tree route") {
  double max_err = 0.0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    SplitMix64 meta(derive_seed(202, {t}));
    const int n = 2 + static_cast<int>(meta.next_u64() % 11);
    const double p = 0.3 + 0.6 * meta.next_double();
    const Graph g = random_connected(n, p, meta.next_u64());
    const ResistanceMatrix direct = resistance_matrix(g);
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        max_err = std::max(max_err, std::abs(direct.finite_at(u, v) - *oracle_resistance(g, u, v)));
      }
    }
  }
  report(2, "200 connected graphs (n<=12) agree entrywise, max error " + fmt_double(max_err),
         max_err <= 1e-8);
}

TEST_CASE("criterion 3: incremental edge update equals recomputation") {
  double max_err = 0.0;
  double worst_increase = 0.0;
  int same_branch = 0, bridge_branch = 0;
  bool patterns_ok = true;
  for (std::uint64_t t = 0; t < 200; ++t) {
    SplitMix64 meta(derive_seed(303, {t}));
    const int n = 4 + static_cast<int>(meta.next_u64() % 27);
    const double p = 0.1 + 0.5 * meta.next_double();
    const Graph g = (t % 3 == 0) ? sample_sbm(n, p, 0.0, meta.next_u64())
                                 : sample_er(n, p, meta.next_u64());
    std::vector<Edge> non_edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (!g.has_edge(u, v)) non_edges.emplace_back(u, v);
      }
    }
    if (non_edges.empty()) continue;
    const Edge e = non_edges[meta.next_u64() % non_edges.size()];
    const ResistanceMatrix before = resistance_matrix(g);
    (before.connected(e.first, e.second) ? same_branch : bridge_branch) += 1;
    const ResistanceMatrix incremental = update_add_edge(before, e.first, e.second);
    std::vector<Edge> edges = g.edges();
    edges.push_back(e);
    const ResistanceMatrix direct = resistance_matrix(graph_from_edge_list(n, edges));
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        const std::optional<double> a = incremental.at(u, v);
        const std::optional<double> b = direct.at(u, v);
        patterns_ok = patterns_ok && (a.has_value() == b.has_value());
        if (!a || !b) continue;
        max_err = std::max(max_err, std::abs(*a - *b));
        if (const std::optional<double> old = before.at(u, v)) {
          worst_increase = std::max(worst_increase, *a - *old);
        }
      }
    }
  }
  const bool ok = patterns_ok && max_err <= 1e-8 && worst_increase <= 1e-10 &&
                  same_branch > 0 && bridge_branch > 0;
  report(3,
         "200 updates (both branches: " + std::to_string(same_branch) + "/" +
             std::to_string(bridge_branch) + "), max error " + fmt_double(max_err) +
             ", worst increase " + fmt_double(worst_increase),
         ok);
}

TEST_CASE("criterion 4: renormalized distance is a metric on a fixed vertex set") {
  bool ok = true;
  for (std::uint64_t t = 0; t < 100 && ok; ++t) {
    SplitMix64 meta(derive_seed(404, {t}));
    const int n = 2 + static_cast<int>(meta.next_u64() % 19);
    const double p = 0.15 + 0.6 * meta.next_double();
    const Graph a = sample_er(n, p, meta.next_u64());
    const Graph b = sample_er(n, p, meta.next_u64());
    const Graph c = sample_er(n, p, meta.next_u64());
    const double ab = rd_distance(a, b);
    ok = ok && ab >= 0.0;
    ok = ok && ab == rd_distance(b, a);
    ok = ok && ab <= rd_distance(a, c) + rd_distance(c, b) + 1e-9;
    ok = ok && rd_distance(a, a) == 0.0;
    const Graph padded = graph_from_edge_list(n + 2, a.edges());
    ok = ok && rd_distance(a, padded) == 0.0;
  }
  report(4, "symmetry, nonnegativity, triangle inequality, isolated-vertex identity", ok);
}

TEST_CASE("criterion 5: cross-community resistance respects the cutset bound") {
  bool ok = true;
  double worst_margin = 1e300;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const Graph g = sample_sbm(200, 0.2, 0.005, derive_seed(505, {t}));
    const int k = count_cross_edges(g);
    if (k == 0) continue;
    const ResistanceMatrix r = resistance_matrix(g);
    for (int u = 0; u < 200; ++u) {
      for (int v = u + 1; v < 200; ++v) {
        if (same_community(u, v)) continue;
        const std::optional<double> res = r.at(u, v);
        if (!res) continue;
        worst_margin = std::min(worst_margin, *res - 1.0 / k);
        ok = ok && *res >= 1.0 / k - 1e-9;
      }
    }
  }
  report(5, "50 blockmodel samples, min(R - 1/k) = " + fmt_double(worst_margin), ok);
}

TEST_CASE("criterion 6: null growth steps stay within the linear term plus O(n^2/dbar^2)") {
  const Schedule schedule = separated_regime();
  bool sign_ok = true;
  bool bounded_ok = true;
  std::string detail;
  for (int n : {128, 256, 512}) {
    const ScheduleSample sample = evaluate_schedule(schedule, n);
    const int m = 100;
    std::vector<double> excess(m);
    parallel_for(m, 0, [&](std::size_t r) {
      const GrowthPair gp =
          sample_conditioned_pair(sample, n, 606, stream::kNull, static_cast<int>(r), false);
      excess[r] = distance_step(gp) - h_linear(n, gp.k_before);
    });
    double min_excess = 1e300;
    int within = 0;
    for (double e : excess) {
      min_excess = std::min(min_excess, e);
      if (sample.p * sample.p * e <= 64.0) ++within;
    }
    sign_ok = sign_ok && min_excess >= -1e-9;
    bounded_ok = bounded_ok && within >= 99;
    detail += " n=" + std::to_string(n) + ": min(d-h)=" + fmt_double(min_excess) +
              ", p^2(d-h)<=64 in " + std::to_string(within) + "/100;";
  }
  report(6, "null conditioning:" + detail, sign_ok && bounded_ok);
}

TEST_CASE("criterion 7: level, power and regime separation at desk scale") {
  // Separated regime: level stays near epsilon, power saturates, and the
  // power is non-decreasing across n.
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kSeparation;
  cfg.n_values = {128, 256, 512};
  cfg.schedule = separated_regime();
  cfg.replicates = 200;
  cfg.level = 0.05;
  cfg.master_seed = 707;
  const std::vector<SeparationRecord> separated = run_separation(cfg);
  REQUIRE(separated.size() == 3);
  const SeparationRecord& at256 = separated[1];

  ExperimentConfig overlap_cfg = cfg;
  overlap_cfg.n_values = {256};
  overlap_cfg.schedule = overlap_regime();
  overlap_cfg.master_seed = 708;
  const std::vector<SeparationRecord> overlapped = run_separation(overlap_cfg);
  REQUIRE(overlapped.size() == 1);

  const bool level_ok = at256.level_empirical <= 0.08;
  const bool power_ok = at256.power >= 0.95;
  const bool monotone_ok =
      separated[0].power <= separated[1].power && separated[1].power <= separated[2].power;
  const bool overlap_ok = overlapped.front().power <= 0.6;
  report(7,
         "separated regime n=256: level " + fmt_double(at256.level_empirical) + ", power " +
             fmt_double(at256.power) + "; power across {128,256,512}: " +
             fmt_double(separated[0].power) + "," + fmt_double(separated[1].power) + "," +
             fmt_double(separated[2].power) + "; overlap regime power " +
             fmt_double(overlapped.front().power),
         level_ok && power_ok && monotone_ok && overlap_ok);
}

TEST_CASE("criterion 8: edge density estimates the in-community probability") {
  const int n = 1000;
  const double p = 0.05, q = 1e-4;
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Graph g = sample_sbm(n, p, q, derive_seed(808, {seed}));
    const double estimate = 4.0 * g.edge_count() / (static_cast<double>(n) * n);
    if (std::abs(estimate - p) <= 0.1 * p) ++inside;
  }
  report(8, "4m/n^2 within 10% of p in " + std::to_string(inside) + "/100 samples", inside >= 95);
}

TEST_CASE("criterion 9: experiments are byte-identical across runs and worker counts") {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "respert_acceptance_det";
  fs::remove_all(base);

  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kSeparation;
  cfg.n_values = {64};
  cfg.schedule = separated_regime();
  cfg.replicates = 40;
  cfg.level = 0.05;
  cfg.master_seed = 909;

  const std::vector<std::pair<std::string, unsigned>> runs = {
      {"serial", 1}, {"parallel", 4}, {"parallel_again", 4}};
  for (const auto& [name, threads] : runs) {
    cfg.out_dir = (base / name).string();
    cfg.threads = threads;
    run_experiment(cfg);
  }
  bool ok = true;
  for (const char* file : {"separation.csv", "power.csv", "calibration_n64.csv"}) {
    const std::string serial = slurp(base / "serial" / file);
    ok = ok && serial == slurp(base / "parallel" / file);
    ok = ok && serial == slurp(base / "parallel_again" / file);
  }
  fs::remove_all(base);
  report(9, "separation CSVs identical for 1 and 4 workers and across reruns", ok);
}
