#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cvqkd/config.hpp"
#include "cvqkd/countermeasure.hpp"

namespace cvqkd {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const;
};

/// Built-in sweep presets: 3 = one-way, 5 = MDI
/// symmetric, 6 = MDI extreme asymmetric.
ScenarioConfig figure_defaults(int figure_id);

/// Columns: distance_km, g, epsilon, K_estimated, K_practical, gap, feasible,
/// physical. feasible marks K_practical > 0; physical marks both branches
/// evaluating on a valid covariance matrix (the estimated branch loses that
/// once g*T exceeds 1 at short range). Rates carry 6 significant digits,
/// parameters full round-trip precision. Rows appear in (eps, g, distance)
/// grid order regardless of how many threads evaluated them.
CsvTable run_figure(int figure_id, const ScenarioConfig& cfg);

/// Simulated batch -> moments -> estimates per attack gain; one row per
/// (g, parameter) with truth, the bias-law prediction, the estimate, its
/// delta-method standard error and the z-score against the prediction.
CsvTable run_estimation_study(const ScenarioConfig& cfg);

/// Rows (u, g_min) with g_min = concealment_gain(eps_t, u, eps_target).
CsvTable run_concealment_table(double eps_t, const std::vector<double>& u_grid,
                               double eps_target);

/// Per-reading monitor gains; every source id must have a reference in refs.
struct MonitorRunReport {
  CsvTable readings;                       // timestamp,source_id,intensity,g,below_reference
  std::map<std::string, double> mean_gain;  // per source
};
MonitorRunReport run_monitor(const std::vector<MonitorRecord>& records,
                             const std::map<std::string, double>& refs);

/// Extension beyond the core attack model: how a relative calibration error
/// in the monitored gain propagates into the corrected key rate. Row per
/// delta: (delta, g_used, K_corrected, K_practical, k_error).
CsvTable run_monitor_sensitivity(const ScenarioConfig& cfg, double g_true,
                                 const std::vector<double>& rel_errors);

}  // namespace cvqkd
