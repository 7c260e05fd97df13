#include "cvqkd/seeding.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <string>

namespace cvqkd {

void PowerTrace::validate() const {
  if (t.size() != p.size()) throw std::invalid_argument("power trace: t/P length mismatch");
  if (t.size() < 2) throw std::invalid_argument("power trace needs at least 2 samples");
  if (!(period > 0.0)) throw std::invalid_argument("power trace period must be > 0");
  if (!(mu > 0.0)) throw std::invalid_argument("power trace mu must be > 0");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= 0.0) || t[i] > period)
      throw std::invalid_argument("power trace times must lie in [0, period]");
    if (i > 0 && !(t[i] > t[i - 1]))
      throw std::invalid_argument("power trace times must be strictly increasing");
    if (!(p[i] >= 0.0)) throw std::invalid_argument("power trace power must be >= 0");
  }
}

double intensity_from_power_trace(const PowerTrace& trace) {
  trace.validate();
  double area = 0.0;
  for (std::size_t i = 1; i < trace.t.size(); ++i)
    area += 0.5 * (trace.p[i] + trace.p[i - 1]) * (trace.t[i] - trace.t[i - 1]);
  return trace.mu * area;
}

double seeding_gain_from_intensities(double i_attacked, double i_nominal) {
  if (!(i_nominal > 0.0)) throw std::invalid_argument("nominal intensity must be > 0");
  if (!(i_attacked >= i_nominal))
    throw std::invalid_argument("attacked intensity below nominal: inconsistent readings");
  return i_attacked / i_nominal;
}

QuadraturePair apply_seeding_to_state(const QuadraturePair& q, double g) {
  if (!(g >= 1.0)) throw std::invalid_argument("seeding gain must be >= 1");
  const double s = std::sqrt(g);
  return {s * q.x, s * q.p};
}

double apply_seeding_to_variance(double v, double g) {
  if (!(v > 0.0)) throw std::invalid_argument("variance must be > 0");
  if (!(g >= 1.0)) throw std::invalid_argument("seeding gain must be >= 1");
  return g * v;
}

PowerTrace read_power_trace_csv(std::istream& in, double mu, double period) {
  PowerTrace trace;
  trace.mu = mu;
  trace.period = period;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("power trace CSV: empty input");
  // Tolerate a UTF-8 BOM and whitespace around the header tokens.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string t_field, p_field;
    if (!std::getline(row, t_field, ',') || !std::getline(row, p_field))
      throw std::invalid_argument("power trace CSV: bad row at line " + std::to_string(lineno));
    try {
      trace.t.push_back(std::stod(t_field));
      trace.p.push_back(std::stod(p_field));
    } catch (const std::exception&) {
      throw std::invalid_argument("power trace CSV: non-numeric value at line " +
                                  std::to_string(lineno));
    }
  }
  trace.validate();
  return trace;
}

}  // namespace cvqkd
