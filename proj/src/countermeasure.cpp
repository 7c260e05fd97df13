#include "cvqkd/countermeasure.hpp"

#include <istream>
#include <stdexcept>

#include "cvqkd/csv.hpp"

namespace cvqkd {

GainReading monitor_gain(const MonitorReading& r) {
  if (!(r.i_reference > 0.0)) throw std::invalid_argument("monitor reference must be > 0");
  if (!(r.i_measured > 0.0)) throw std::invalid_argument("monitor reading must be > 0");
  GainReading out;
  out.g = r.i_measured / r.i_reference;
  out.below_reference = out.g < 1.0;
  return out;
}

KeyRateReport corrected_oneway_keyrate(double v_a0, double t_naive, double eps_naive,
                                       const DetectorModel& det, double beta, double g) {
  if (!(g >= 1.0)) throw std::invalid_argument("monitored gain must be >= 1");
  if (!(t_naive > 0.0)) throw std::invalid_argument("naive transmittance must be > 0");
  return oneway_keyrate_from_t(g * v_a0, t_naive / g, g * eps_naive, det, beta);
}

KeyRateReport corrected_mdi_keyrate(const ChannelEstimate& naive, double v_a, double v_b,
                                    double beta, double g) {
  if (!(g >= 1.0)) throw std::invalid_argument("monitored gain must be >= 1");
  if (!(naive.t_ac_hat > 0.0) || !(naive.t_bc_hat > 0.0))
    throw std::invalid_argument("naive transmittances must be > 0");
  const double t_ac = naive.t_ac_hat / g;
  const double t_bc = naive.t_bc_hat / g;
  const double eps_ac = g * naive.eps_ac_hat;
  const double eps_bc = g * naive.eps_bc_hat;
  const EffectiveOneWayParams eff = mdi_effective_params(t_ac, t_bc, eps_ac, eps_bc, v_b);
  const MdiAttackedParams att = mdi_attacked_params(t_ac, t_bc, eps_ac, eps_bc, v_a, v_b, g);
  return mdi_keyrate_from_effective(att.v_a, att.t_m, eff.eps_m, beta);
}

std::vector<MonitorRecord> read_monitor_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("monitor CSV: empty input");
  csv::strip_bom(line);
  {
    const auto header = csv::split_line(line);
    if (header.size() != 3 || header[0] != "timestamp" || header[1] != "source_id" ||
        header[2] != "intensity")
      throw std::invalid_argument("monitor CSV: expected header timestamp,source_id,intensity");
  }
  std::vector<MonitorRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != 3)
      throw std::invalid_argument("monitor CSV: bad row at line " + std::to_string(lineno));
    MonitorRecord rec;
    rec.timestamp = fields[0];
    rec.source_id = fields[1];
    rec.intensity = csv::parse_double(fields[2], "intensity");
    if (!(rec.intensity > 0.0))
      throw std::invalid_argument("monitor CSV: nonpositive intensity at line " +
                                  std::to_string(lineno));
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace cvqkd
