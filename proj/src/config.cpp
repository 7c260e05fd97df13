#include "cvqkd/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "cvqkd/csv.hpp"

namespace cvqkd {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_one_double(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + what + ": '" + text + "'");
  }
}

std::uint64_t parse_one_u64(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + what + ": '" + text + "'");
  }
}

}  // namespace

ConfigMap ConfigMap::parse(std::istream& in) {
  ConfigMap map;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) csv::strip_bom(line);
    // Strip comments introduced by '#' or ';'.
    for (const char marker : {'#', ';'}) {
      const std::size_t pos = line.find(marker);
      if (pos != std::string::npos) line.erase(pos);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      map.sections_[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
    map.sections_[section][key] = value;
  }
  return map;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse(in);
}

std::optional<std::string> ConfigMap::get(const std::string& section,
                                          const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) return std::nullopt;
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) return std::nullopt;
  return it->second;
}

std::vector<double> SweepGrid::points() const {
  validate();
  const double span = stop_km - start_km;
  const auto count = static_cast<std::size_t>(std::llround(span / step_km)) + 1;
  std::vector<double> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = start_km + static_cast<double>(i) * step_km;
    if (v > stop_km + 0.5 * step_km) break;
    pts.push_back(v);
  }
  return pts;
}

void SweepGrid::validate() const {
  if (!(step_km > 0.0)) throw ConfigError("sweep step must be > 0");
  if (!(stop_km >= start_km)) throw ConfigError("sweep stop must be >= start");
  if (!(start_km >= 0.0)) throw ConfigError("sweep start must be >= 0");
}

void ScenarioConfig::validate() const {
  if (protocol != "oneway" && protocol != "mdi")
    throw ConfigError("protocol must be 'oneway' or 'mdi'");
  if (topology != "symmetric" && topology != "asymmetric")
    throw ConfigError("topology must be 'symmetric' or 'asymmetric'");
  try {
    oneway.validate();
    mdi.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (g_list.empty()) throw ConfigError("attack gain list must not be empty");
  for (const double g : g_list)
    if (!(g >= 1.0)) throw ConfigError("attack gains must be >= 1");
  if (!(u >= 0.0) || u > 1.0) throw ConfigError("intercept fraction u must be in [0,1]");
  for (const double e : eps_list)
    if (!(e >= 0.0)) throw ConfigError("excess noise values must be >= 0");
  sweep.validate();
  if (mc_n < 2) throw ConfigError("mc n must be >= 2");
  if (kernel != "" && kernel != "scalar" && kernel != "avx2")
    throw ConfigError("kernel must be 'scalar' or 'avx2'");
}

void ScenarioConfig::apply_mdi_distance(double l_ab_km) {
  if (topology == "asymmetric") {
    mdi.l_ac_km = l_ab_km;
    mdi.l_bc_km = 0.0;
  } else {
    mdi.l_ac_km = 0.5 * l_ab_km;
    mdi.l_bc_km = 0.5 * l_ab_km;
  }
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_one_double(item, what));
  }
  if (out.empty()) throw ConfigError(std::string("empty list for ") + what);
  return out;
}

SweepGrid parse_grid(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
    throw ConfigError("grid must be START:STOP:STEP");
  SweepGrid grid{parse_one_double(trim(a), "grid start"), parse_one_double(trim(b), "grid stop"),
                 parse_one_double(trim(c), "grid step")};
  grid.validate();
  return grid;
}

void apply_config(ScenarioConfig& cfg, const ConfigMap& map) {
  using Setter = std::function<void(const std::string&)>;
  const auto num = [](double& slot) {
    return [&slot](const std::string& v) { slot = parse_one_double(v, "value"); };
  };

  std::map<std::string, std::map<std::string, Setter>> schema;
  schema["scenario"]["protocol"] = [&cfg](const std::string& v) { cfg.protocol = v; };
  schema["scenario"]["topology"] = [&cfg](const std::string& v) { cfg.topology = v; };

  schema["oneway"]["v_a0"] = num(cfg.oneway.v_a0);
  schema["oneway"]["l_km"] = num(cfg.oneway.l_km);
  schema["oneway"]["loss_db_per_km"] = num(cfg.oneway.loss_db_per_km);
  schema["oneway"]["eps"] = num(cfg.oneway.eps);
  schema["oneway"]["eta"] = num(cfg.oneway.det.eta);
  schema["oneway"]["nu_el"] = num(cfg.oneway.det.nu_el);
  schema["oneway"]["beta"] = num(cfg.oneway.beta);

  schema["mdi"]["v_a"] = num(cfg.mdi.v_a);
  schema["mdi"]["v_b"] = num(cfg.mdi.v_b);
  schema["mdi"]["l_ac_km"] = num(cfg.mdi.l_ac_km);
  schema["mdi"]["l_bc_km"] = num(cfg.mdi.l_bc_km);
  schema["mdi"]["loss_db_per_km"] = num(cfg.mdi.loss_db_per_km);
  schema["mdi"]["eps_ac"] = num(cfg.mdi.eps_ac);
  schema["mdi"]["eps_bc"] = num(cfg.mdi.eps_bc);
  schema["mdi"]["eta"] = num(cfg.mdi.charlie_det.eta);
  schema["mdi"]["nu_el"] = num(cfg.mdi.charlie_det.nu_el);
  schema["mdi"]["beta"] = num(cfg.mdi.beta);

  schema["attack"]["g"] = [&cfg](const std::string& v) {
    cfg.g_list = parse_double_list(v, "attack g");
  };
  schema["attack"]["u"] = num(cfg.u);

  schema["sweep"]["start_km"] = num(cfg.sweep.start_km);
  schema["sweep"]["stop_km"] = num(cfg.sweep.stop_km);
  schema["sweep"]["step_km"] = num(cfg.sweep.step_km);
  schema["sweep"]["eps"] = [&cfg](const std::string& v) {
    cfg.eps_list = parse_double_list(v, "sweep eps");
  };

  schema["mc"]["n"] = [&cfg](const std::string& v) {
    cfg.mc_n = static_cast<std::size_t>(parse_one_u64(v, "mc n"));
  };
  schema["mc"]["seed"] = [&cfg](const std::string& v) { cfg.mc_seed = parse_one_u64(v, "mc seed"); };

  schema["output"]["path"] = [&cfg](const std::string& v) { cfg.out_path = v; };

  schema["run"]["threads"] = [&cfg](const std::string& v) {
    cfg.threads = static_cast<unsigned>(parse_one_u64(v, "threads"));
  };
  schema["run"]["kernel"] = [&cfg](const std::string& v) { cfg.kernel = v; };

  for (const auto& [section, entries] : map.sections()) {
    if (section == "monitor") {
      for (const auto& [key, value] : entries) {
        if (key.rfind("ref.", 0) != 0 || key.size() <= 4)
          throw ConfigError("unknown key '" + key + "' in [monitor] (expected ref.<source>)");
        cfg.monitor_refs[key.substr(4)] = parse_one_double(value, key);
      }
      continue;
    }
    const auto sec_schema = schema.find(section);
    if (sec_schema == schema.end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : entries) {
      const auto setter = sec_schema->second.find(key);
      if (setter == sec_schema->second.end())
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      setter->second(value);
    }
  }
}

}  // namespace cvqkd
