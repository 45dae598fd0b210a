#include "bdris/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace bdris {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidConfig("not a number: '" + text + "'");
  return v;
}

template <class Int>
Int to_integer(const std::string& text) {
  Int v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidConfig("not an integer: '" + text + "'");
  return v;
}

Point3 to_point(const std::string& text) {
  std::string flat = text;
  for (char& c : flat) {
    if (c == ',') c = ' ';
  }
  std::istringstream ss(flat);
  Point3 p{};
  std::string tok;
  int n = 0;
  while (ss >> tok) {
    if (n == 3) throw InvalidConfig("ris_position needs exactly three coordinates");
    p[static_cast<std::size_t>(n++)] = to_double(tok);
  }
  if (n != 3) throw InvalidConfig("ris_position needs exactly three coordinates");
  return p;
}

}  // namespace

Architecture parse_architecture(const std::string& text) {
  if (text == "fully") return Architecture::fully;
  if (text == "group") return Architecture::group;
  if (text == "diagonal") return Architecture::diagonal;
  throw InvalidConfig("unknown architecture '" + text + "' (fully|group|diagonal)");
}

ScenarioConfig parse_config(std::istream& in, const std::string& source) {
  ScenarioConfig cfg;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"users", [&](const std::string& v) { cfg.users = to_integer<int>(v); }},
      {"tx_antennas", [&](const std::string& v) { cfg.tx_antennas = to_integer<int>(v); }},
      {"rx_antennas", [&](const std::string& v) { cfg.rx_antennas = to_integer<int>(v); }},
      {"streams", [&](const std::string& v) { cfg.streams = to_integer<int>(v); }},
      {"elements", [&](const std::string& v) { cfg.elements = to_integer<int>(v); }},
      {"architecture", [&](const std::string& v) { cfg.architecture = parse_architecture(v); }},
      {"group_size", [&](const std::string& v) { cfg.group_size = to_integer<int>(v); }},
      {"ris_position", [&](const std::string& v) { cfg.ris_position = to_point(v); }},
      {"square_side", [&](const std::string& v) { cfg.square_side = to_double(v); }},
      {"node_height", [&](const std::string& v) { cfg.node_height = to_double(v); }},
      {"pt_dbm", [&](const std::string& v) { cfg.pt_dbm = to_double(v); }},
      {"bandwidth_hz", [&](const std::string& v) { cfg.bandwidth_hz = to_double(v); }},
      {"noise_figure_db", [&](const std::string& v) { cfg.noise_figure_db = to_double(v); }},
      {"alpha_direct", [&](const std::string& v) { cfg.alpha_direct = to_double(v); }},
      {"alpha_ris", [&](const std::string& v) { cfg.alpha_ris = to_double(v); }},
      {"rician_gamma", [&](const std::string& v) { cfg.rician_gamma = to_double(v); }},
      {"trials", [&](const std::string& v) { cfg.trials = to_integer<int>(v); }},
      {"seed", [&](const std::string& v) { cfg.seed = to_integer<std::uint64_t>(v); }},
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidConfig(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw InvalidConfig(where + "unknown key '" + key + "'");
    if (value.empty()) throw InvalidConfig(where + "missing value for '" + key + "'");
    try {
      it->second(value);
    } catch (const InvalidConfig& e) {
      throw InvalidConfig(where + key + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace bdris
