#include "cvqkd/experiments.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "cvqkd/channel.hpp"
#include "cvqkd/csv.hpp"
#include "cvqkd/estimation.hpp"
#include "cvqkd/keyrate.hpp"

namespace cvqkd {
namespace {

std::string flag(bool b) { return b ? "1" : "0"; }

// Evaluates jobs[0..n) into results in index order, optionally on a pool.
// Writers consume results by index afterwards, so row order never depends on
// scheduling.
template <typename Job, typename Result, typename Eval>
std::vector<Result> evaluate_jobs(const std::vector<Job>& jobs, unsigned threads,
                                  const Eval& eval) {
  std::vector<Result> results(jobs.size());
  unsigned nthreads = threads != 0 ? threads : std::thread::hardware_concurrency();
  nthreads = std::max(1u, nthreads);
  if (nthreads == 1 || jobs.size() < 2) {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = eval(jobs[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
      results[i] = eval(jobs[i]);
  };
  std::vector<std::thread> pool;
  const unsigned count = std::min<unsigned>(nthreads, static_cast<unsigned>(jobs.size()));
  pool.reserve(count);
  for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace

void CsvTable::write(std::ostream& out) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
}

ScenarioConfig figure_defaults(int figure_id) {
  ScenarioConfig cfg;
  switch (figure_id) {
    case 3:
      cfg.protocol = "oneway";
      cfg.oneway = OneWayParams{4.0, 0.0, 0.2, 0.01, DetectorModel{0.5, 0.01}, 0.95};
      cfg.eps_list = {0.01, 0.05};
      cfg.g_list = {1.0, 1.005, 1.01, 1.02};
      cfg.sweep = {0.0, 80.0, 0.5};
      break;
    case 5:
    case 6:
      cfg.protocol = "mdi";
      cfg.topology = figure_id == 5 ? "symmetric" : "asymmetric";
      cfg.mdi = MdiParams{40.0, 40.0, 0.0, 0.0, 0.2, 0.01, 0.01, DetectorModel{0.6, 0.01}, 0.95};
      cfg.eps_list = {0.01, 0.05};
      cfg.g_list = {1.02};
      cfg.sweep = {0.0, 30.0, 0.1};
      break;
    default:
      throw ConfigError("unknown figure id (expected 3, 5 or 6)");
  }
  return cfg;
}

CsvTable run_figure(int figure_id, const ScenarioConfig& cfg) {
  if (figure_id != 3 && figure_id != 5 && figure_id != 6)
    throw ConfigError("unknown figure id (expected 3, 5 or 6)");
  cfg.validate();
  const bool oneway = figure_id == 3;

  struct Job {
    double eps, g, l;
  };
  std::vector<Job> jobs;
  const std::vector<double> eps_values =
      !cfg.eps_list.empty() ? cfg.eps_list
                            : std::vector<double>{oneway ? cfg.oneway.eps : cfg.mdi.eps_ac};
  const std::vector<double> distances = cfg.sweep.points();
  for (const double eps : eps_values)
    for (const double g : cfg.g_list)
      for (const double l : distances) jobs.push_back({eps, g, l});

  const auto eval = [&](const Job& job) -> KeyRatePair {
    if (oneway) {
      OneWayParams p = cfg.oneway;
      p.eps = job.eps;
      p.l_km = job.l;
      return oneway_keyrate_pair(p, job.g);
    }
    MdiParams p = cfg.mdi;
    p.eps_ac = job.eps;
    p.eps_bc = job.eps;
    ScenarioConfig placed = cfg;
    placed.mdi = p;
    placed.apply_mdi_distance(job.l);
    return mdi_keyrate_pair(placed.mdi, job.g);
  };
  const auto results = evaluate_jobs<Job, KeyRatePair>(jobs, cfg.threads, eval);

  CsvTable table;
  table.header = {"distance_km", "g",        "epsilon",  "K_estimated",
                  "K_practical", "gap",      "feasible", "physical"};
  table.rows.reserve(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& pair = results[i];
    table.rows.push_back({csv::format_rate(jobs[i].l), csv::format_full(jobs[i].g),
                          csv::format_full(jobs[i].eps), csv::format_rate(pair.estimated.k),
                          csv::format_rate(pair.practical.k),
                          csv::format_rate(pair.estimated.k - pair.practical.k),
                          flag(pair.practical.k > 0.0),
                          flag(pair.estimated.physical && pair.practical.physical)});
  }
  return table;
}

CsvTable run_estimation_study(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.mc_n < 100) throw ConfigError("estimation study needs mc n >= 100");
  const MdiParams& params = cfg.mdi;
  const double t_ac = transmittance_from_distance(params.l_ac_km, params.loss_db_per_km);
  const double t_bc = transmittance_from_distance(params.l_bc_km, params.loss_db_per_km);

  CsvTable table;
  table.header = {"g",         "n",        "seed",     "parameter", "truth",
                  "predicted", "estimate", "std_error", "z_score"};
  for (std::size_t gi = 0; gi < cfg.g_list.size(); ++gi) {
    const double g = cfg.g_list[gi];
    const AttackConfig attack{g, g, cfg.u};
    const std::uint64_t seed = cfg.mc_seed + gi;
    const SampleBatch batch =
        simulate_mdi_session(params, attack, cfg.mc_n, seed, cfg.threads);
    const MomentSet moments = compute_moments(batch);
    const ChannelEstimate est = estimate_channel(moments, params.charlie_det, 1.0);
    const EstimateStdErrors se = estimate_standard_errors(batch, params.charlie_det, 1.0);

    struct Entry {
      const char* name;
      double truth, predicted, estimate, stderr_;
    };
    const Entry entries[] = {
        {"T_AC", t_ac, g * t_ac, est.t_ac_hat, se.t_ac},
        {"T_BC", t_bc, g * t_bc, est.t_bc_hat, se.t_bc},
        {"eps_AC", params.eps_ac, (params.eps_ac + 2.0 * cfg.u) / g, est.eps_ac_hat, se.eps_ac},
        {"eps_BC", params.eps_bc, params.eps_bc / g, est.eps_bc_hat, se.eps_bc},
    };
    for (const Entry& e : entries) {
      const double z = e.stderr_ > 0.0 ? (e.estimate - e.predicted) / e.stderr_ : 0.0;
      table.rows.push_back({csv::format_full(g), std::to_string(cfg.mc_n),
                            std::to_string(seed), e.name, csv::format_full(e.truth),
                            csv::format_full(e.predicted), csv::format_full(e.estimate),
                            csv::format_rate(e.stderr_), csv::format_rate(z)});
    }
  }
  return table;
}

CsvTable run_concealment_table(double eps_t, const std::vector<double>& u_grid,
                               double eps_target) {
  CsvTable table;
  table.header = {"u", "g_min"};
  for (const double u : u_grid)
    table.rows.push_back(
        {csv::format_full(u), csv::format_rate(concealment_gain(eps_t, u, eps_target))});
  return table;
}

MonitorRunReport run_monitor(const std::vector<MonitorRecord>& records,
                             const std::map<std::string, double>& refs) {
  MonitorRunReport report;
  report.readings.header = {"timestamp", "source_id", "intensity", "g", "below_reference"};
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const MonitorRecord& rec : records) {
    const auto ref = refs.find(rec.source_id);
    if (ref == refs.end())
      throw ConfigError("no reference intensity configured for source '" + rec.source_id + "'");
    const GainReading gain = monitor_gain({rec.intensity, ref->second});
    report.readings.rows.push_back({rec.timestamp, rec.source_id,
                                    csv::format_full(rec.intensity), csv::format_full(gain.g),
                                    flag(gain.below_reference)});
    auto& [sum, count] = acc[rec.source_id];
    sum += gain.g;
    ++count;
  }
  for (const auto& [source, stats] : acc)
    report.mean_gain[source] = stats.first / static_cast<double>(stats.second);
  return report;
}

CsvTable run_monitor_sensitivity(const ScenarioConfig& cfg, double g_true,
                                 const std::vector<double>& rel_errors) {
  cfg.validate();
  if (!(g_true >= 1.0)) throw ConfigError("sensitivity sweep needs g >= 1");

  CsvTable table;
  table.header = {"delta", "g_used", "K_corrected", "K_practical", "k_error"};
  for (const double delta : rel_errors) {
    const double g_used = g_true * (1.0 + delta);
    if (!(g_used >= 1.0))
      throw ConfigError("sensitivity delta drives the monitored gain below 1");
    double k_corrected = 0.0;
    double k_practical = 0.0;
    if (cfg.protocol == "oneway") {
      const double t =
          transmittance_from_distance(cfg.oneway.l_km, cfg.oneway.loss_db_per_km);
      k_practical =
          oneway_keyrate_pair_from_t(cfg.oneway.v_a0, t, cfg.oneway.eps, cfg.oneway.det,
                                     cfg.oneway.beta, g_true)
              .practical.k;
      k_corrected = corrected_oneway_keyrate(cfg.oneway.v_a0, g_true * t,
                                             cfg.oneway.eps / g_true, cfg.oneway.det,
                                             cfg.oneway.beta, g_used)
                        .k;
    } else {
      const ChannelTruth ac{transmittance_from_distance(cfg.mdi.l_ac_km, cfg.mdi.loss_db_per_km),
                            cfg.mdi.eps_ac};
      const ChannelTruth bc{transmittance_from_distance(cfg.mdi.l_bc_km, cfg.mdi.loss_db_per_km),
                            cfg.mdi.eps_bc};
      k_practical = mdi_keyrate_pair(cfg.mdi, g_true).practical.k;
      const ChannelEstimate naive = attacked_estimates_analytic(ac, bc, g_true);
      k_corrected =
          corrected_mdi_keyrate(naive, cfg.mdi.v_a, cfg.mdi.v_b, cfg.mdi.beta, g_used).k;
    }
    table.rows.push_back({csv::format_full(delta), csv::format_full(g_used),
                          csv::format_rate(k_corrected), csv::format_rate(k_practical),
                          csv::format_rate(k_corrected - k_practical)});
  }
  return table;
}

}  // namespace cvqkd
