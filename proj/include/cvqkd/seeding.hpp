#pragma once

#include <iosfwd>
#include <vector>

#include "cvqkd/core.hpp"

namespace cvqkd {

/// Sampled power waveform of one pulse period, with the photodetection
/// coefficient mu. Intensity is I = mu * integral of P over [0, period].
struct PowerTrace {
  std::vector<double> t;
  std::vector<double> p;
  double period = 0.0;
  double mu = 1.0;

  void validate() const;
};

/// Trapezoidal integral of the trace times mu.
double intensity_from_power_trace(const PowerTrace& trace);

/// g = I_attacked / I_nominal. The seeding model only brightens the pulse,
/// so a ratio below 1 is rejected as inconsistent input.
double seeding_gain_from_intensities(double i_attacked, double i_nominal);

/// Quadratures scale by sqrt(g), so intensity x^2 + p^2 scales by g.
QuadraturePair apply_seeding_to_state(const QuadraturePair& q, double g);

/// Modulation variance scales by g.
double apply_seeding_to_variance(double v, double g);

/// Reads a two-column CSV "t,P" (header required); mu and period come from
/// the caller (CLI flags).
PowerTrace read_power_trace_csv(std::istream& in, double mu, double period);

}  // namespace cvqkd
