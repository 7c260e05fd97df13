// Command line front end: figure sweeps, Monte Carlo estimation studies,
// concealment thresholds, single-point key rates and the intensity monitor.
// Exit codes: 0 success, 2 bad configuration or arguments, 3 numerical
// domain failure, 1 anything unexpected.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvqkd/channel.hpp"
#include "cvqkd/config.hpp"
#include "cvqkd/countermeasure.hpp"
#include "cvqkd/csv.hpp"
#include "cvqkd/estimation.hpp"
#include "cvqkd/experiments.hpp"
#include "cvqkd/kernels.hpp"
#include "cvqkd/keyrate.hpp"
#include "cvqkd/seeding.hpp"

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string kernel;
};

void add_global_options(CLI::App* cmd, GlobalOpts& g) {
  cmd->add_option("--config", g.config_path, "INI configuration file");
  cmd->add_option("--out", g.out_path, "Output file (default: stdout)");
  cmd->add_option("--seed", g.seed, "Monte Carlo seed");
  cmd->add_option("--threads", g.threads, "Worker threads (0 = hardware)");
  cmd->add_option("--kernel", g.kernel, "Force kernel set: scalar | avx2");
}

// defaults <- config file <- command line flags.
void overlay(cvqkd::ScenarioConfig& cfg, const GlobalOpts& g, const CLI::App* cmd) {
  if (!g.config_path.empty())
    cvqkd::apply_config(cfg, cvqkd::ConfigMap::parse_file(g.config_path));
  if (cmd->count("--seed")) cfg.mc_seed = g.seed;
  if (cmd->count("--threads")) cfg.threads = g.threads;
  if (cmd->count("--kernel")) cfg.kernel = g.kernel;
  if (cmd->count("--out")) cfg.out_path = g.out_path;
}

void select_kernel(const cvqkd::ScenarioConfig& cfg) {
  if (cfg.kernel.empty())
    cvqkd::kernels::set_active_kernels(nullptr);
  else
    cvqkd::kernels::set_active_kernels(cvqkd::kernels::kernels_by_name(cfg.kernel));
}

void write_table(const cvqkd::CsvTable& table, const std::string& out_path) {
  if (out_path.empty()) {
    table.write(std::cout);
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw cvqkd::ConfigError("cannot open output file '" + out_path + "'");
  table.write(out);
}

std::map<std::string, double> parse_refs(const std::vector<std::string>& items) {
  std::map<std::string, double> refs;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw cvqkd::ConfigError("--ref expects SOURCE=VALUE, got '" + item + "'");
    refs[item.substr(0, eq)] = cvqkd::csv::parse_double(item.substr(eq + 1), "--ref");
  }
  return refs;
}

void print_report_lines(std::ostream& out, const char* label,
                        const cvqkd::KeyRateReport& r) {
  out << "K_" << label << '=' << cvqkd::csv::format_rate(r.k) << '\n'
      << "I_AB_" << label << '=' << cvqkd::csv::format_rate(r.i_ab) << '\n'
      << "chi_BE_" << label << '=' << cvqkd::csv::format_rate(r.chi_be) << '\n'
      << "physical_" << label << '=' << (r.physical ? 1 : 0) << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Laser seeding attack calculator for one-way and MDI CV-QKD"};
  app.require_subcommand(1);

  // figure
  auto* fig = app.add_subcommand("figure", "Rate-vs-distance sweep tables");
  GlobalOpts fig_glob;
  add_global_options(fig, fig_glob);
  int fig_id = 0;
  std::string fig_g, fig_eps, fig_grid;
  fig->add_option("--id", fig_id, "Sweep preset: 3 (one-way), 5 (MDI symmetric), 6 (MDI asymmetric)")
      ->required();
  fig->add_option("--g", fig_g, "Comma separated seeding gains");
  fig->add_option("--eps", fig_eps, "Comma separated excess noise values");
  fig->add_option("--grid", fig_grid, "Distance grid START:STOP:STEP in km");

  // estimate
  auto* est = app.add_subcommand("estimate", "Monte Carlo parameter estimation study");
  GlobalOpts est_glob;
  add_global_options(est, est_glob);
  std::string est_g;
  std::size_t est_n = 0;
  double est_distance = 0.0, est_u = 0.0;
  est->add_option("--g", est_g, "Comma separated seeding gains");
  est->add_option("--n", est_n, "Samples per gain");
  est->add_option("--distance", est_distance, "Total A-B distance in km (split per topology)");
  est->add_option("--u", est_u, "Intercept-resend fraction on the A-C link");

  // conceal
  auto* con = app.add_subcommand("conceal", "Concealment gain thresholds g_min(u)");
  GlobalOpts con_glob;
  add_global_options(con, con_glob);
  double con_eps_t = 0.1, con_eps_target = -1.0;
  std::string con_u;
  con->add_option("--eps-t", con_eps_t, "True excess noise during the intercept attack");
  con->add_option("--u", con_u, "Comma separated intercepted fractions (default 0..1 step 0.1)");
  con->add_option("--eps-target", con_eps_target,
                  "Estimated noise the attacker wants to present (default: eps-t)");

  // keyrate
  auto* kr = app.add_subcommand("keyrate", "Single point estimated/practical rates");
  GlobalOpts kr_glob;
  add_global_options(kr, kr_glob);
  std::string kr_protocol;
  double kr_distance = -1.0, kr_g = 1.0, kr_eps = -1.0;
  kr->add_option("--protocol", kr_protocol, "oneway | mdi");
  kr->add_option("--distance", kr_distance, "One-way span or total A-B distance in km");
  kr->add_option("--g", kr_g, "Seeding gain");
  kr->add_option("--eps", kr_eps, "Excess noise (both links for MDI)");

  // monitor
  auto* mon = app.add_subcommand("monitor", "Intensity monitor and rate correction");
  GlobalOpts mon_glob;
  add_global_options(mon, mon_glob);
  std::string mon_trace, mon_readings, mon_sens, mon_protocol;
  std::vector<std::string> mon_refs;
  double mon_mu = 0.0, mon_period = 0.0, mon_i0 = 0.0, mon_g = 1.0, mon_distance = -1.0;
  mon->add_option("--trace", mon_trace, "Power trace CSV (t,P) for one pulse train");
  mon->add_option("--mu", mon_mu, "Responsivity scale applied to the trace integral");
  mon->add_option("--period", mon_period, "Pulse period of the trace in the same time unit");
  mon->add_option("--i0", mon_i0, "Reference intensity for the trace gain");
  mon->add_option("--readings", mon_readings,
                  "Monitor stream CSV with columns timestamp,source_id,intensity");
  mon->add_option("--ref", mon_refs, "Reference intensity SOURCE=VALUE (repeatable)");
  mon->add_option("--sensitivity", mon_sens,
                  "Comma separated relative gain-calibration errors");
  mon->add_option("--g", mon_g, "True seeding gain for the sensitivity sweep");
  mon->add_option("--protocol", mon_protocol, "oneway | mdi (sensitivity sweep)");
  mon->add_option("--distance", mon_distance, "Distance in km (sensitivity sweep)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    std::cerr << "cvqkd: usage: " << e.what() << '\n';
    return 2;
  }

  if (fig->parsed()) {
    cvqkd::ScenarioConfig cfg = cvqkd::figure_defaults(fig_id);
    overlay(cfg, fig_glob, fig);
    if (fig->count("--g")) cfg.g_list = cvqkd::parse_double_list(fig_g, "--g");
    if (fig->count("--eps")) cfg.eps_list = cvqkd::parse_double_list(fig_eps, "--eps");
    if (fig->count("--grid")) cfg.sweep = cvqkd::parse_grid(fig_grid);
    select_kernel(cfg);
    write_table(cvqkd::run_figure(fig_id, cfg), cfg.out_path);
    return 0;
  }

  if (est->parsed()) {
    cvqkd::ScenarioConfig cfg;
    cfg.protocol = "mdi";
    cfg.mdi.l_ac_km = 2.0;
    cfg.mdi.l_bc_km = 2.0;
    cfg.g_list = {1.0, 2.0, 3.0};
    overlay(cfg, est_glob, est);
    if (est->count("--g")) cfg.g_list = cvqkd::parse_double_list(est_g, "--g");
    if (est->count("--n")) cfg.mc_n = est_n;
    if (est->count("--u")) cfg.u = est_u;
    if (est->count("--distance")) cfg.apply_mdi_distance(est_distance);
    select_kernel(cfg);
    write_table(cvqkd::run_estimation_study(cfg), cfg.out_path);
    return 0;
  }

  if (con->parsed()) {
    cvqkd::ScenarioConfig cfg;
    overlay(cfg, con_glob, con);
    std::vector<double> u_grid;
    if (con->count("--u")) {
      u_grid = cvqkd::parse_double_list(con_u, "--u");
    } else {
      for (int i = 0; i <= 10; ++i) u_grid.push_back(0.1 * i);
    }
    const double target = con->count("--eps-target") ? con_eps_target : con_eps_t;
    write_table(cvqkd::run_concealment_table(con_eps_t, u_grid, target), cfg.out_path);
    return 0;
  }

  if (kr->parsed()) {
    cvqkd::ScenarioConfig cfg;
    overlay(cfg, kr_glob, kr);
    if (kr->count("--protocol")) cfg.protocol = kr_protocol;
    if (kr->count("--eps")) {
      cfg.oneway.eps = kr_eps;
      cfg.mdi.eps_ac = kr_eps;
      cfg.mdi.eps_bc = kr_eps;
    }
    if (kr->count("--distance")) {
      cfg.oneway.l_km = kr_distance;
      cfg.apply_mdi_distance(kr_distance);
    }
    cfg.validate();
    // The config's [attack] g list seeds the single-point gain; an explicit
    // --g wins. A list in the file keeps only its first entry here.
    double g = cfg.g_list.empty() ? 1.0 : cfg.g_list.front();
    if (kr->count("--g")) g = kr_g;
    cvqkd::KeyRatePair pair;
    double distance_km = 0.0, epsilon = 0.0;
    if (cfg.protocol == "oneway") {
      pair = cvqkd::oneway_keyrate_pair(cfg.oneway, g);
      distance_km = cfg.oneway.l_km;
      epsilon = cfg.oneway.eps;
    } else {
      pair = cvqkd::mdi_keyrate_pair(cfg.mdi, g);
      distance_km = cfg.mdi.l_ac_km + cfg.mdi.l_bc_km;
      epsilon = cfg.mdi.eps_ac;
    }
    std::ostringstream lines;
    lines << "protocol=" << cfg.protocol << '\n'
          << "distance_km=" << cvqkd::csv::format_full(distance_km) << '\n'
          << "g=" << cvqkd::csv::format_full(g) << '\n'
          << "epsilon=" << cvqkd::csv::format_full(epsilon) << '\n';
    print_report_lines(lines, "estimated", pair.estimated);
    print_report_lines(lines, "practical", pair.practical);
    lines << "gap=" << cvqkd::csv::format_rate(pair.estimated.k - pair.practical.k) << '\n'
          << "feasible=" << (pair.practical.k > 0.0 ? 1 : 0) << '\n';
    if (cfg.out_path.empty()) {
      std::cout << lines.str();
    } else {
      std::ofstream out(cfg.out_path);
      if (!out) throw cvqkd::ConfigError("cannot open output file '" + cfg.out_path + "'");
      out << lines.str();
    }
    return 0;
  }

  // monitor
  cvqkd::ScenarioConfig cfg;
  cfg.protocol = "oneway";
  cfg.oneway.l_km = 10.0;
  overlay(cfg, mon_glob, mon);
  if (mon->count("--protocol")) cfg.protocol = mon_protocol;
  if (mon->count("--distance")) {
    cfg.oneway.l_km = mon_distance;
    cfg.apply_mdi_distance(mon_distance);
  }
  const int modes = (mon->count("--trace") ? 1 : 0) + (mon->count("--readings") ? 1 : 0) +
                    (mon->count("--sensitivity") ? 1 : 0);
  if (modes != 1)
    throw cvqkd::ConfigError(
        "monitor needs exactly one of --trace, --readings or --sensitivity");

  if (mon->count("--trace")) {
    if (!mon->count("--mu") || !mon->count("--period"))
      throw cvqkd::ConfigError("--trace needs --mu and --period");
    std::ifstream in(mon_trace);
    if (!in) throw cvqkd::ConfigError("cannot open trace file '" + mon_trace + "'");
    const cvqkd::PowerTrace trace = cvqkd::read_power_trace_csv(in, mon_mu, mon_period);
    const double intensity = cvqkd::intensity_from_power_trace(trace);
    std::ostringstream lines;
    lines << "intensity=" << cvqkd::csv::format_rate(intensity) << '\n';
    if (mon->count("--i0")) {
      const cvqkd::GainReading gain = cvqkd::monitor_gain({intensity, mon_i0});
      lines << "g=" << cvqkd::csv::format_rate(gain.g) << '\n'
            << "below_reference=" << (gain.below_reference ? 1 : 0) << '\n';
    }
    if (cfg.out_path.empty()) {
      std::cout << lines.str();
    } else {
      std::ofstream out(cfg.out_path);
      if (!out) throw cvqkd::ConfigError("cannot open output file '" + cfg.out_path + "'");
      out << lines.str();
    }
    return 0;
  }

  if (mon->count("--readings")) {
    std::ifstream in(mon_readings);
    if (!in) throw cvqkd::ConfigError("cannot open readings file '" + mon_readings + "'");
    const std::vector<cvqkd::MonitorRecord> records = cvqkd::read_monitor_csv(in);
    std::map<std::string, double> refs = cfg.monitor_refs;
    for (const auto& [source, value] : parse_refs(mon_refs)) refs[source] = value;
    const cvqkd::MonitorRunReport report = cvqkd::run_monitor(records, refs);
    write_table(report.readings, cfg.out_path);
    // Per-source means are a side channel, not rows of the table. Appending
    // them to the CSV would break strict parsers, so they go to stderr when
    // the table is on stdout, and to stdout when the table went to a file.
    std::ostream& side = cfg.out_path.empty() ? std::cerr : std::cout;
    for (const auto& [source, mean] : report.mean_gain)
      side << "mean_gain." << source << '=' << cvqkd::csv::format_rate(mean) << '\n';
    return 0;
  }

  const std::vector<double> deltas = cvqkd::parse_double_list(mon_sens, "--sensitivity");
  double g_true = cfg.g_list.empty() ? 1.0 : cfg.g_list.front();
  if (mon->count("--g")) g_true = mon_g;
  write_table(cvqkd::run_monitor_sensitivity(cfg, g_true, deltas), cfg.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cvqkd::ConfigError& e) {
    std::cerr << "cvqkd: config: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "cvqkd: config: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "cvqkd: domain: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "cvqkd: error: " << e.what() << '\n';
    return 1;
  }
}
