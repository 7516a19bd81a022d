#include "decoy/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

namespace decoy {

namespace {

using nlohmann::json;

constexpr double kDeg = M_PI / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing '#' comment that is outside a JSON string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

int bracket_depth(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (in_string) continue;
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') --depth;
  }
  return depth;
}

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigParse, what);
}

class Section {
 public:
  Section(const ScenarioConfig& cfg, const std::string& name) : name_(name) {
    auto it = cfg.sections.find(name);
    if (it != cfg.sections.end()) values_ = &it->second;
  }

  bool has(const std::string& key) const {
    return values_ && values_->count(key);
  }

  json get(const std::string& key) const {
    used_.insert(key);
    if (!has(key)) config_error("missing key " + name_ + "." + key);
    try {
      return json::parse(values_->at(key));
    } catch (const json::exception& e) {
      config_error("bad value for " + name_ + "." + key + ": " + e.what());
    }
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    return as_number(get(key), key);
  }

  double as_number(const json& j, const std::string& key) const {
    if (!j.is_number()) config_error(name_ + "." + key + " must be a number");
    return j.get<double>();
  }

  Vec3 vec3(const json& j, const std::string& key) const {
    if (!j.is_array() || j.size() != 3) {
      config_error(name_ + "." + key + " must be a 3-element array");
    }
    Vec3 v;
    for (int i = 0; i < 3; ++i) v(i) = as_number(j[i], key);
    return v;
  }

  std::vector<Vec3> vec3_list(const std::string& key) const {
    const json j = get(key);
    if (!j.is_array()) config_error(name_ + "." + key + " must be an array");
    std::vector<Vec3> out;
    for (const json& e : j) out.push_back(vec3(e, key));
    return out;
  }

  // Scalar broadcast to `count` entries, or an array of exactly `count`.
  std::vector<double> per_entity(const std::string& key, std::size_t count) const {
    const json j = get(key);
    if (j.is_number()) return std::vector<double>(count, j.get<double>());
    if (!j.is_array() || j.size() != count) {
      config_error(name_ + "." + key + " must be a number or an array of " +
                   std::to_string(count));
    }
    std::vector<double> out;
    for (const json& e : j) out.push_back(as_number(e, key));
    return out;
  }

  void reject_unknown() const {
    if (!values_) return;
    for (const auto& [key, value] : *values_) {
      if (!used_.count(key)) config_error("unknown key " + name_ + "." + key);
    }
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>* values_ = nullptr;
  mutable std::set<std::string> used_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt(const Vec3& v) {
  return "[" + fmt(v(0)) + ", " + fmt(v(1)) + ", " + fmt(v(2)) + "]";
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  static const std::set<std::string> known = {"asset", "threats", "decoys", "params",
                                              "run"};
  ScenarioConfig cfg;
  cfg.source = text;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[' && t.back() == ']' && t.find('=') == std::string::npos) {
      section = trim(t.substr(1, t.size() - 2));
      if (!known.count(section)) {
        config_error("line " + std::to_string(line_no) + ": unknown section [" +
                     section + "]");
      }
      cfg.sections[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos || section.empty()) {
      config_error("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    // Arrays may continue over several lines.
    while (bracket_depth(value) > 0 && std::getline(in, line)) {
      ++line_no;
      value += " " + trim(strip_comment(line));
    }
    if (key.empty() || value.empty() || bracket_depth(value) != 0) {
      config_error("line " + std::to_string(line_no) + ": malformed entry");
    }
    if (cfg.sections[section].count(key)) {
      config_error("line " + std::to_string(line_no) + ": duplicate key " + key);
    }
    cfg.sections[section][key] = value;
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Scenario validate_scenario(const ScenarioConfig& config) {
  Scenario s;
  PlanningParams& p = s.params;

  Section params(config, "params");
  p.sampling_time = params.number("sampling_time", p.sampling_time);
  const double horizon = params.number("horizon_steps", p.horizon_steps);
  p.v_max = params.number("v_max", p.v_max);
  p.beta_p = params.number("beta_p", p.beta_p);
  p.beta_v = params.number("beta_v", p.beta_v);
  p.decoy_diameter = params.number("decoy_diameter", p.decoy_diameter);
  p.cone_half_angle = params.number("cone_half_angle_deg", p.cone_half_angle / kDeg) * kDeg;
  p.transmission_frequency =
      params.number("transmission_frequency", p.transmission_frequency);
  p.max_doppler = params.number("max_doppler", p.max_doppler);
  p.speed_of_light = params.number("speed_of_light", p.speed_of_light);
  const double micro = params.number("micro_steps", p.micro_steps);
  params.reject_unknown();
  if (horizon != std::floor(horizon) || micro != std::floor(micro)) {
    config_error("params.horizon_steps and params.micro_steps must be integers");
  }
  if (horizon < 1 || horizon > 10000 || micro < 1 || micro > 100000) {
    throw Error(ErrorCode::InvalidScenario,
                "params.horizon_steps and params.micro_steps must be positive and bounded");
  }
  p.horizon_steps = static_cast<int>(horizon);
  p.micro_steps = static_cast<int>(micro);

  Section asset(config, "asset");
  s.asset.position = asset.vec3(asset.get("position"), "position");
  if (asset.has("velocity")) s.asset.velocity = asset.vec3(asset.get("velocity"), "velocity");
  asset.reject_unknown();

  Section threats(config, "threats");
  const auto tpos = threats.vec3_list("positions");
  const auto speeds = threats.per_entity("speed", tpos.size());
  const auto jam = threats.per_entity("jamming_constant", tpos.size());
  threats.reject_unknown();
  for (std::size_t j = 0; j < tpos.size(); ++j) {
    Threat t;
    t.position = tpos[j];
    t.speed = speeds[j];
    t.jamming_constant = jam[j];
    s.threats.push_back(t);
  }

  Section decoys(config, "decoys");
  const auto dpos = decoys.vec3_list("positions");
  std::vector<Vec3> dvel(dpos.size(), Vec3::Zero());
  if (decoys.has("velocities")) {
    dvel = decoys.vec3_list("velocities");
    if (dvel.size() != dpos.size()) {
      config_error("decoys.velocities must match decoys.positions in length");
    }
  }
  decoys.reject_unknown();
  for (std::size_t i = 0; i < dpos.size(); ++i) s.decoys.push_back({dpos[i], dvel[i]});

  Section run(config, "run");
  const double seed = run.number("seed", static_cast<double>(s.seed));
  s.episode_time = run.number("episode_time", s.episode_time);
  run.reject_unknown();
  if (seed < 0 || seed != std::floor(seed) || seed > 9007199254740992.0) {
    config_error("run.seed must be a nonnegative integer");
  }
  s.seed = static_cast<std::uint64_t>(seed);

  // Semantic checks.
  auto invalid = [](const std::string& what) { throw Error(ErrorCode::InvalidScenario, what); };
  for (double v : {p.sampling_time, p.v_max, p.decoy_diameter, p.cone_half_angle,
                   p.transmission_frequency, p.max_doppler, p.speed_of_light,
                   s.episode_time}) {
    if (!(v > 0.0) || !std::isfinite(v)) invalid("planning constants must be positive");
  }
  if (!(p.beta_p >= 0.0) || !(p.beta_v >= 0.0)) {
    invalid("disturbance bounds must be nonnegative");
  }
  if (!(p.v_ref() > 0.0)) invalid("v_max must exceed beta_v");
  if (!(2.0 * p.cone_half_angle < M_PI / 2.0)) invalid("cone aperture 2*theta must be below 90 deg");
  if (s.asset.position(2) != 0.0) invalid("asset must lie on the ground (z = 0)");
  if (s.threats.empty()) invalid("at least one threat is required");
  if (s.decoys.size() < s.threats.size()) {
    invalid("fewer decoys (" + std::to_string(s.decoys.size()) + ") than threats (" +
            std::to_string(s.threats.size()) + ")");
  }
  for (std::size_t j = 0; j < s.threats.size(); ++j) {
    const Threat& t = s.threats[j];
    if (!(t.speed > 0.0) || !(t.jamming_constant > 0.0)) {
      invalid("threat " + std::to_string(j) + " needs positive speed and jamming constant");
    }
    if (!(t.position(2) > 0.0)) invalid("threat " + std::to_string(j) + " must be airborne");
  }
  for (std::size_t i = 0; i < s.decoys.size(); ++i) {
    const DecoyState& d = s.decoys[i];
    if (d.position(2) < p.decoy_diameter / 2.0) {
      invalid("decoy " + std::to_string(i) + " is below ground clearance d/2");
    }
    if (inf_norm(d.velocity) > p.v_max) {
      invalid("decoy " + std::to_string(i) + " exceeds v_max");
    }
  }
  return s;
}

std::string render_config(const Scenario& s) {
  const PlanningParams& p = s.params;
  std::ostringstream os;
  os << "[asset]\n"
     << "position = " << fmt(s.asset.position) << "\n"
     << "velocity = " << fmt(s.asset.velocity) << "\n\n";
  os << "[threats]\npositions = [\n";
  for (std::size_t j = 0; j < s.threats.size(); ++j) {
    os << "  " << fmt(s.threats[j].position) << (j + 1 < s.threats.size() ? ",\n" : "\n");
  }
  os << "]\nspeed = [";
  for (std::size_t j = 0; j < s.threats.size(); ++j) {
    os << (j ? ", " : "") << fmt(s.threats[j].speed);
  }
  os << "]\njamming_constant = [";
  for (std::size_t j = 0; j < s.threats.size(); ++j) {
    os << (j ? ", " : "") << fmt(s.threats[j].jamming_constant);
  }
  os << "]\n\n[decoys]\npositions = [\n";
  for (std::size_t i = 0; i < s.decoys.size(); ++i) {
    os << "  " << fmt(s.decoys[i].position) << (i + 1 < s.decoys.size() ? ",\n" : "\n");
  }
  os << "]\nvelocities = [\n";
  for (std::size_t i = 0; i < s.decoys.size(); ++i) {
    os << "  " << fmt(s.decoys[i].velocity) << (i + 1 < s.decoys.size() ? ",\n" : "\n");
  }
  os << "]\n\n[params]\n"
     << "sampling_time = " << fmt(p.sampling_time) << "\n"
     << "horizon_steps = " << p.horizon_steps << "\n"
     << "v_max = " << fmt(p.v_max) << "\n"
     << "beta_p = " << fmt(p.beta_p) << "\n"
     << "beta_v = " << fmt(p.beta_v) << "\n"
     << "decoy_diameter = " << fmt(p.decoy_diameter) << "\n"
     << "cone_half_angle_deg = " << fmt(p.cone_half_angle / kDeg) << "\n"
     << "transmission_frequency = " << fmt(p.transmission_frequency) << "\n"
     << "max_doppler = " << fmt(p.max_doppler) << "\n"
     << "speed_of_light = " << fmt(p.speed_of_light) << "\n"
     << "micro_steps = " << p.micro_steps << "\n\n";
  os << "[run]\nseed = " << s.seed << "\n"
     << "episode_time = " << fmt(s.episode_time) << "\n";
  return os.str();
}

}  // namespace decoy
