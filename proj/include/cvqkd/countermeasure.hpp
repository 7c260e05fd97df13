#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cvqkd/estimation.hpp"
#include "cvqkd/keyrate.hpp"

namespace cvqkd {

/// One tap of the real-time intensity monitor: the measured pre-attenuation
/// sample against the preset nominal value for the same tap ratio.
struct MonitorReading {
  double i_measured = 0.0;
  double i_reference = 0.0;
};

/// g below 1 means the source runs dimmer than calibrated; the attack model
/// cannot produce that, so it is flagged for diagnostics rather than rejected.
struct GainReading {
  double g = 1.0;
  bool below_reference = false;
};

GainReading monitor_gain(const MonitorReading& r);

/// Re-evaluates the one-way rate at (g*V_A0, T'/g, g*eps') where (T', eps')
/// are the naive estimates. By the bias law this equals the practical rate.
KeyRateReport corrected_oneway_keyrate(double v_a0, double t_naive, double eps_naive,
                                       const DetectorModel& det, double beta, double g);

/// Inverts the bias law per link (T = T_hat/g, eps = g*eps_hat), then
/// evaluates the practical branch K(gV_A, gV_B, T'_m, eps_m).
KeyRateReport corrected_mdi_keyrate(const ChannelEstimate& naive, double v_a, double v_b,
                                    double beta, double g);

/// Row of the monitor stream CSV (timestamp, source_id, intensity).
struct MonitorRecord {
  std::string timestamp;
  std::string source_id;
  double intensity = 0.0;
};

std::vector<MonitorRecord> read_monitor_csv(std::istream& in);

}  // namespace cvqkd
