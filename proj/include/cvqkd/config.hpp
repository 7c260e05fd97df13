#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvqkd/core.hpp"

namespace cvqkd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sections of "key = value" pairs; '#' and ';' start comments. Unknown
/// sections or keys are rejected when applied, so typos fail loudly.
class ConfigMap {
 public:
  static ConfigMap parse(std::istream& in);
  static ConfigMap parse_file(const std::string& path);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct SweepGrid {
  double start_km = 0.0;
  double stop_km = 0.0;
  double step_km = 0.0;

  std::vector<double> points() const;
  void validate() const;
};

/// Fully resolved run recipe: protocol, parameter block, attack block,
/// distance grid, Monte Carlo block and output path.
struct ScenarioConfig {
  std::string protocol = "oneway";   // oneway | mdi
  std::string topology = "symmetric";  // mdi: symmetric | asymmetric (L_BC = 0)
  OneWayParams oneway{};
  MdiParams mdi{};
  std::vector<double> g_list{1.0};
  double u = 0.0;
  std::vector<double> eps_list{};    // empty: use the parameter block's values
  SweepGrid sweep{0.0, 80.0, 0.5};
  std::size_t mc_n = 100000;
  std::uint64_t mc_seed = 1;
  std::string out_path{};
  std::map<std::string, double> monitor_refs;
  unsigned threads = 0;
  std::string kernel{};              // "", "scalar", "avx2"

  void validate() const;

  /// Places an MDI sweep distance L_AB on the two links per the topology.
  void apply_mdi_distance(double l_ab_km);
};

/// Overlays file values onto cfg; complains about unknown keys.
void apply_config(ScenarioConfig& cfg, const ConfigMap& map);

std::vector<double> parse_double_list(const std::string& text, const char* what);
SweepGrid parse_grid(const std::string& text);

}  // namespace cvqkd
