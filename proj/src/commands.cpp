#include "decoy/commands.hpp"

#include "decoy/ltl.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace decoy {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kVerifyTolerance = 1e-6;

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format("%.17g", v);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Stopwatch {
 public:
  explicit Stopwatch(RunManifest& manifest) : manifest_(manifest) {}
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    manifest_.timings.push_back({stage, std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

 private:
  RunManifest& manifest_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

class RunDir {
 public:
  RunDir(const CommandOptions& options, const std::string& command, const Scenario& scenario)
      : dir_(options.out_dir) {
    if (dir_.empty()) throw Error(ErrorCode::Usage, "--out is required");
    fs::create_directories(dir_);
    manifest.scenario_path = options.scenario_path;
    manifest.command = command;
    manifest.solver = options.solver.kind == SolverKind::External ? "external" : "builtin";
    manifest.seed = scenario.seed;
    manifest.output_dir = dir_.string();
    write("scenario.cfg", render_config(scenario));
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << content;
    manifest.files.push_back(name);
  }

  void close() {
    manifest.files.push_back("manifest.json");
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << manifest.to_json();
  }

  RunManifest manifest;

 private:
  fs::path dir_;
};

std::string margin_text(double margin) {
  return std::isinf(margin) ? std::string("inf") : format("%.1f", margin);
}

std::string lp_file_name(int decoy) { return "mptp_" + std::to_string(decoy) + ".lp"; }

// Plot series: safe-set boxes, tracking-cone pyramids and fake-asset points.
std::string safe_set_series(const SimResult& r, const AllocationReport& alloc) {
  std::ostringstream os;
  os << "step\ttime\tdecoy\tlower_x\tlower_y\tlower_z\tupper_x\tupper_y\tupper_z\n";
  const int last = std::min(r.steps(), r.params.horizon_steps);
  for (int l = 0; l <= last; ++l) {
    for (std::size_t i = 0; i < alloc.safe_sets.decoys.size(); ++i) {
      const Box b = safe_box(alloc.safe_sets.decoys[i], r.times[l]);
      os << l << '\t' << num(r.times[l]) << '\t' << i;
      for (int a = 0; a < 3; ++a) os << '\t' << num(b.lower(a));
      for (int a = 0; a < 3; ++a) os << '\t' << num(b.upper(a));
      os << '\n';
    }
  }
  return os.str();
}

std::string cone_series(const SimResult& r, const Scenario& scenario) {
  std::ostringstream os;
  os << "step\ttime\tthreat\tapex_x\tapex_y\tapex_z";
  for (int v = 0; v < 4; ++v) os << "\tb" << v << "_x\tb" << v << "_y\tb" << v << "_z";
  os << '\n';
  const double theta = r.params.cone_half_angle;
  const double spread = std::tan(inscribed_half_angle(theta));
  for (int l = 0; l <= r.steps(); ++l) {
    for (std::size_t j = 0; j < r.threat_pos.size(); ++j) {
      const Engagement e = r.engagement(scenario, static_cast<int>(j), l);
      if (!(e.threat_velocity.norm() > 0.0)) continue;
      const Vec3 axis = e.threat_velocity.normalized();
      const auto [h1, h2] = perpendicular_axes(axis);
      const double depth = e.range() * std::cos(theta);
      os << l << '\t' << num(r.times[l]) << '\t' << j;
      for (int a = 0; a < 3; ++a) os << '\t' << num(e.threat_position(a));
      for (const auto& [s1, s2] : {std::pair{1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}}) {
        const Vec3 v = e.threat_position + depth * (axis + spread * (s1 * h1 + s2 * h2));
        for (int a = 0; a < 3; ++a) os << '\t' << num(v(a));
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string fake_asset_series(const SimResult& r) {
  std::ostringstream os;
  os << "step\ttime";
  for (std::size_t j = 0; j < r.fake_assets.size(); ++j) {
    os << "\tf" << j << "_x\tf" << j << "_y\tf" << j << "_z";
  }
  os << '\n';
  for (int l = 0; l <= r.steps(); ++l) {
    os << l << '\t' << num(r.times[l]);
    for (const auto& path : r.fake_assets) {
      for (int a = 0; a < 3; ++a) os << '\t' << num(path[l](a));
    }
    os << '\n';
  }
  return os.str();
}

std::string events_report(const SimResult& r) {
  std::ostringstream os;
  for (const SimEvent& e : r.events) os << e.step << '\t' << e.text << '\n';
  return os.str();
}

std::string completion_table(const SimResult& r) {
  std::ostringstream os;
  os << "decoy\tthreat\tplanned_step\tlogged_step\tswitch_step\n";
  for (std::size_t i = 0; i < r.decoys.size(); ++i) {
    if (r.assigned_threat[i] < 0) continue;
    os << i << '\t' << r.assigned_threat[i] << '\t' << r.planned_completion[i] << '\t'
       << (r.completion[i] ? *r.completion[i] : -1) << '\t' << r.switch_step[i] << '\n';
  }
  return os.str();
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_cell(const std::string& tok) {
  if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) throw Error(ErrorCode::Io, "malformed table cell '" + tok + "'");
  return v;
}

}  // namespace

std::string RunManifest::to_json() const {
  json j;
  j["scenario"] = scenario_path;
  j["command"] = command;
  j["solver"] = solver;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  json t = json::array();
  for (const StageTiming& s : timings) t.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
  j["timings"] = t;
  j["files"] = files;
  return j.dump(2) + "\n";
}

Scenario load_scenario(const CommandOptions& options) {
  if (options.scenario_path.empty()) throw Error(ErrorCode::Usage, "--scenario is required");
  Scenario s = validate_scenario(load_config(options.scenario_path));
  if (options.seed) s.seed = *options.seed;
  if (options.horizon_steps) {
    if (*options.horizon_steps < 1) throw Error(ErrorCode::Usage, "--horizon-steps must be positive");
    s.params.horizon_steps = *options.horizon_steps;
  }
  return s;
}

std::string assignment_report(const Scenario& scenario, const AllocationReport& alloc) {
  (void)scenario;
  std::ostringstream os;
  os << "decoy\tthreat\torder\tdistance_m\tmargin_m\tsaturation_m\testimated_s\n";
  for (std::size_t l = 0; l < alloc.assignment.orders.size(); ++l) {
    const OrderRecord& r = alloc.assignment.orders[l];
    os << r.agent << '\t' << r.task << '\t' << r.order << '\t' << format("%.1f", r.weight) << '\t'
       << margin_text(r.margin) << '\t'
       << format("%.1f", alloc.safe_sets.decoys[r.agent].saturation) << '\t'
       << format("%.1f", alloc.estimated_times[l]) << '\n';
  }
  os << "# smallest margin " << margin_text(alloc.safe_sets.mu_min) << " m";
  if (!alloc.assignment.unassigned.empty()) {
    os << "; unassigned decoys";
    for (int i : alloc.assignment.unassigned) os << ' ' << i;
  }
  os << '\n';
  return os.str();
}

std::string plan_report(const Scenario& scenario, const AllocationReport& alloc,
                        const std::vector<DecoyPlan>& plans) {
  const double Ts = scenario.params.sampling_time;
  std::ostringstream os;
  os << "decoy\tthreat\torder\tdistance_m\testimated_s\toptimised_s\tstatus\tbinaries\t"
        "continuous\tnodes\n";
  for (const DecoyPlan& p : plans) {
    const std::size_t l = static_cast<std::size_t>(p.order - 1);
    const OrderRecord& r = alloc.assignment.orders.at(l);
    os << p.decoy << '\t' << p.threat << '\t' << p.order << '\t' << format("%.1f", r.weight) << '\t'
       << format("%.1f", alloc.estimated_times[l]) << '\t'
       << (p.ok() ? format("%.1f", p.planned_time(Ts)) : std::string("-")) << '\t'
       << (p.error.empty() ? milp::to_string(p.solution.status) : "failed") << '\t' << p.binaries
       << '\t' << p.continuous_aux << '\t' << p.solution.nodes << '\n';
  }
  for (const DecoyPlan& p : plans) {
    if (!p.error.empty()) os << "# decoy " << p.decoy << ": " << p.error << '\n';
  }
  return os.str();
}

std::string plans_to_json(const std::vector<DecoyPlan>& plans, const PlanningParams& params) {
  json arr = json::array();
  for (const DecoyPlan& p : plans) {
    json inputs = json::array();
    for (const Vec3& u : p.inputs) inputs.push_back({u(0), u(1), u(2)});
    arr.push_back({{"order", p.order},
                   {"decoy", p.decoy},
                   {"threat", p.threat},
                   {"k", p.k},
                   {"status", milp::to_string(p.solution.status)},
                   {"planned_completion", p.planned_completion},
                   {"planned_time", p.ok() ? p.planned_time(params.sampling_time) : -1.0},
                   {"binaries", p.binaries},
                   {"continuous_aux", p.continuous_aux},
                   {"error", p.error},
                   {"inputs", inputs}});
  }
  json j;
  j["horizon_steps"] = params.horizon_steps;
  j["sampling_time"] = params.sampling_time;
  j["plans"] = arr;
  return j.dump(2) + "\n";
}

std::vector<DecoyPlan> plans_from_json(const std::string& text) {
  std::vector<DecoyPlan> out;
  try {
    const json j = json::parse(text);
    for (const json& p : j.at("plans")) {
      DecoyPlan plan;
      plan.order = p.at("order").get<int>();
      plan.decoy = p.at("decoy").get<int>();
      plan.threat = p.at("threat").get<int>();
      plan.k = p.at("k").get<int>();
      plan.planned_completion = p.at("planned_completion").get<int>();
      plan.binaries = p.at("binaries").get<int>();
      plan.continuous_aux = p.at("continuous_aux").get<int>();
      plan.error = p.at("error").get<std::string>();
      const std::string status = p.at("status").get<std::string>();
      for (const milp::Status st : {milp::Status::Optimal, milp::Status::Infeasible,
                                    milp::Status::Unbounded, milp::Status::LimitHit}) {
        if (status == milp::to_string(st)) plan.solution.status = st;
      }
      for (const json& u : p.at("inputs")) {
        plan.inputs.emplace_back(u.at(0).get<double>(), u.at(1).get<double>(), u.at(2).get<double>());
      }
      out.push_back(std::move(plan));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed plans file: ") + e.what());
  }
  return out;
}

std::string trajectories_tsv(const SimResult& r) {
  std::ostringstream os;
  os << "step\ttime\tasset_x\tasset_y\tasset_z";
  for (std::size_t i = 0; i < r.decoys.size(); ++i) {
    for (const char* c : {"px", "py", "pz", "vx", "vy", "vz"}) os << "\td" << i << '_' << c;
  }
  for (std::size_t j = 0; j < r.threat_pos.size(); ++j) {
    for (const char* c : {"px", "py", "pz", "vx", "vy", "vz", "lock"}) os << "\tt" << j << '_' << c;
  }
  os << '\n';
  for (int l = 0; l <= r.steps(); ++l) {
    os << l << '\t' << num(r.times[l]);
    for (int a = 0; a < 3; ++a) os << '\t' << num(r.asset[l](a));
    for (const auto& d : r.decoys) {
      for (int a = 0; a < 6; ++a) os << '\t' << num(d[l](a));
    }
    for (std::size_t j = 0; j < r.threat_pos.size(); ++j) {
      for (int a = 0; a < 3; ++a) os << '\t' << num(r.threat_pos[j][l](a));
      for (int a = 0; a < 3; ++a) os << '\t' << num(r.threat_vel[j][l](a));
      os << '\t' << r.seducer[j][l];
    }
    os << '\n';
  }
  return os.str();
}

std::string metrics_report(const Scenario& scenario, const AllocationReport& alloc,
                           const SimResult& r) {
  const double Ts = scenario.params.sampling_time;
  std::ostringstream os;
  os << "mode\t" << (r.mode == SimMode::OpenLoop ? "open" : "closed") << '\n';
  os << "steps\t" << r.steps() << '\n';
  os << "\ndecoy\tthreat\torder\testimated_s\tplanned_s\tpositioned_s\tlure_start_s\n";
  for (std::size_t l = 0; l < alloc.assignment.orders.size(); ++l) {
    const OrderRecord& rec = alloc.assignment.orders[l];
    const int i = rec.agent;
    os << i << '\t' << rec.task << '\t' << rec.order << '\t'
       << format("%.1f", alloc.estimated_times[l]) << '\t'
       << (r.planned_completion[i] >= 0 ? format("%.1f", r.planned_completion[i] * Ts) : "-")
       << '\t' << (r.completion[i] ? format("%.1f", *r.completion[i] * Ts) : "-") << '\t'
       << (r.switch_step[i] >= 0 ? format("%.1f", r.switch_step[i] * Ts) : "-") << '\n';
  }
  os << "\nthreat\tdiverted\tfake_asset_offset_m\tcloser_to_fake\n";
  for (std::size_t j = 0; j < r.threat_pos.size(); ++j) {
    const Vec3& end = r.threat_pos[j].back();
    const Vec3& fake = r.fake_assets[j].back();
    const bool has_fake = !std::isnan(fake(0));
    const bool closer = has_fake && (end - r.asset.back()).norm() > (end - fake).norm();
    os << j << '\t' << (r.diverted[j] ? "yes" : "no") << '\t'
       << (has_fake ? format("%.1f", r.fake_asset_distance[j]) : "-") << '\t'
       << (closer ? "yes" : "no") << '\n';
  }
  os << "\nmin_separation_m\t" << format("%.3f", r.min_distance) << '\n';
  os << "monitor_violations\t" << r.violations.size() << '\n';
  for (const MonitorViolation& v : r.violations) {
    os << "# step " << v.step << ": decoy " << v.violation.decoy
       << (v.violation.kind == SafetyViolation::Kind::OutsideSafeSet
               ? " outside its safe set"
               : " too close to decoy " + std::to_string(v.violation.other) + " (" +
                     format("%.3f", v.violation.distance) + " m)")
       << '\n';
  }
  return os.str();
}

int Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return static_cast<int>(c);
  }
  throw Error(ErrorCode::Io, "table has no column '" + name + "'");
}

double Table::at(std::size_t row, const std::string& name) const {
  return rows.at(row).at(column(name));
}

Table parse_table(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_ws(line);
    if (t.columns.empty()) {
      t.columns = std::move(cells);
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw Error(ErrorCode::Io, "table row has " + std::to_string(cells.size()) +
                                     " cells, expected " + std::to_string(t.columns.size()));
    }
    std::vector<double> row;
    for (const std::string& c : cells) row.push_back(parse_cell(c));
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw Error(ErrorCode::Io, "empty table");
  return t;
}

SimResult load_trajectories(const Scenario& scenario, const AllocationReport& alloc,
                            const Table& table) {
  SimResult r;
  r.params = scenario.params;
  r.asset_velocity = scenario.asset.velocity;
  const std::size_t m = scenario.decoys.size();
  const std::size_t n = scenario.threats.size();
  r.decoys.assign(m, {});
  r.threat_pos.assign(n, {});
  r.threat_vel.assign(n, {});
  r.seducer.assign(n, {});
  r.assigned_threat.assign(m, -1);
  for (const OrderRecord& rec : alloc.assignment.orders) r.assigned_threat[rec.agent] = rec.task;
  r.planned_completion.assign(m, -1);
  r.switch_step.assign(m, -1);
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    r.times.push_back(table.at(row, "time"));
    r.asset.emplace_back(table.at(row, "asset_x"), table.at(row, "asset_y"), table.at(row, "asset_z"));
    for (std::size_t i = 0; i < m; ++i) {
      Vec6 x;
      int a = 0;
      for (const char* c : {"px", "py", "pz", "vx", "vy", "vz"}) {
        x(a++) = table.at(row, "d" + std::to_string(i) + "_" + c);
      }
      r.decoys[i].push_back(x);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const std::string p = "t" + std::to_string(j) + "_";
      r.threat_pos[j].emplace_back(table.at(row, p + "px"), table.at(row, p + "py"),
                                   table.at(row, p + "pz"));
      r.threat_vel[j].emplace_back(table.at(row, p + "vx"), table.at(row, p + "vy"),
                                   table.at(row, p + "vz"));
      const int lock = static_cast<int>(table.at(row, p + "lock"));
      r.seducer[j].push_back(lock);
      if (lock >= 0 && lock < static_cast<int>(m) && r.switch_step[lock] < 0) {
        r.switch_step[lock] = static_cast<int>(row);
      }
    }
  }
  return r;
}

VerifyReport verify_run(const std::string& run_dir) {
  const fs::path dir(run_dir);
  VerifyReport rep;
  const Scenario scenario = validate_scenario(parse_config(read_file(dir / "scenario.cfg")));
  const AllocationReport alloc = allocate(scenario);
  const PlanningParams& p = scenario.params;
  const int N = p.horizon_steps;
  const SimResult log =
      load_trajectories(scenario, alloc, parse_table(read_file(dir / "trajectories.tsv")));
  const Table completion = parse_table(read_file(dir / "completion.tsv"));

  // Positioning formula and completion steps from the logged states.
  const auto recomputed = logged_completion(log, scenario);
  for (const OrderRecord& rec : alloc.assignment.orders) {
    const int i = rec.agent;
    const int j = rec.task;
    ltl::AtomTable atoms;
    atoms.tolerance = kVerifyTolerance;
    ltl::add_positioning_atoms(
        atoms, j, [&log, &scenario, j](int l) { return log.engagement(scenario, j, l); }, p);
    const std::string who = "decoy " + std::to_string(i) + " / threat " + std::to_string(j);
    if (ltl::evaluate(*ltl::positioning_formula(j), log.decoys[i], atoms, 0)) {
      rep.passed.push_back("phi_pos holds for " + who);
    } else {
      rep.failed.push_back("phi_pos violated for " + who);
    }
    std::optional<int> recorded;
    for (std::size_t row = 0; row < completion.rows.size(); ++row) {
      if (static_cast<int>(completion.at(row, "decoy")) == i) {
        const int s = static_cast<int>(completion.at(row, "logged_step"));
        if (s >= 0) recorded = s;
      }
    }
    if (recorded == recomputed[i]) {
      rep.passed.push_back("completion step of " + who + " matches the log");
    } else {
      rep.failed.push_back("completion step of " + who + " recorded as " +
                           (recorded ? std::to_string(*recorded) : "none") + " but the log gives " +
                           (recomputed[i] ? std::to_string(*recomputed[i]) : "none"));
    }
  }

  // Safe sets while positioning and pairwise separation at every sample.
  int safe_failures = 0;
  int separation_failures = 0;
  for (int l = 0; l <= log.steps(); ++l) {
    for (std::size_t i = 0; i < log.decoys.size(); ++i) {
      const int sw = log.switch_step[i];
      if (l > N || (sw >= 0 && l > sw)) continue;
      const Vec3 pos = log.decoys[i][l].head<3>();
      if (!safe_box(alloc.safe_sets.decoys[i], log.times[l]).contains(pos, kVerifyTolerance)) {
        rep.failed.push_back("decoy " + std::to_string(i) + " outside its safe set at step " +
                             std::to_string(l));
        ++safe_failures;
      }
    }
    for (std::size_t a = 0; a < log.decoys.size(); ++a) {
      for (std::size_t b = a + 1; b < log.decoys.size(); ++b) {
        if (log.assigned_threat[a] < 0 && log.assigned_threat[b] < 0) continue;
        const double dist = inf_norm(log.decoys[a][l].head<3>() - log.decoys[b][l].head<3>());
        if (!(dist > p.decoy_diameter)) {
          rep.failed.push_back("decoys " + std::to_string(a) + " and " + std::to_string(b) +
                               " closer than the decoy diameter at step " + std::to_string(l));
          ++separation_failures;
        }
      }
    }
  }
  if (safe_failures == 0) rep.passed.push_back("safe sets respected while positioning");
  if (separation_failures == 0) rep.passed.push_back("pairwise separation exceeds the decoy diameter");

  // Auxiliary variable counts of the step-0 problems.
  for (std::size_t l = 0; l < alloc.assignment.orders.size(); ++l) {
    const OrderRecord& rec = alloc.assignment.orders[l];
    const MptpSetup setup = make_setup(scenario, alloc, static_cast<int>(l),
                                       scenario.decoys[rec.agent], 0, scenario.asset,
                                       scenario.threats[rec.task]);
    const MptpEncoding enc = build_mptp(setup);
    const int bins = enc.auxiliary_binaries();
    const int cont = enc.auxiliary_continuous();
    const std::string who = "decoy " + std::to_string(rec.agent);
    if (bins == 8 * N + 8 && cont == 5 * N + 3) {
      rep.passed.push_back("variable counts of " + who + " (" + std::to_string(bins) + " binary, " +
                           std::to_string(cont) + " continuous)");
    } else {
      rep.failed.push_back("variable counts of " + who + " are " + std::to_string(bins) + "/" +
                           std::to_string(cont) + ", expected " + std::to_string(8 * N + 8) + "/" +
                           std::to_string(5 * N + 3));
    }
  }
  if (fs::exists(dir / "plans.json")) {
    for (const DecoyPlan& plan : plans_from_json(read_file(dir / "plans.json"))) {
      const int steps = N - plan.k;
      if (plan.error.empty() &&
          (plan.binaries != 8 * steps + 8 || plan.continuous_aux != 5 * steps + 3)) {
        rep.failed.push_back("plans.json counts of decoy " + std::to_string(plan.decoy) +
                             " disagree with the horizon");
      }
    }
  }
  return rep;
}

int cmd_assign(const CommandOptions& options, std::ostream& out) {
  const Scenario scenario = load_scenario(options);
  RunDir run(options, "assign", scenario);
  Stopwatch watch(run.manifest);
  const AllocationReport alloc = allocate(scenario);
  watch.lap("assign");
  const std::string report = assignment_report(scenario, alloc);
  run.write("assignment.txt", report);
  run.close();
  out << report;
  return 0;
}

int cmd_plan(const CommandOptions& options, std::ostream& out) {
  const Scenario scenario = load_scenario(options);
  RunDir run(options, "plan", scenario);
  Stopwatch watch(run.manifest);
  const AllocationReport alloc = allocate(scenario);
  run.write("assignment.txt", assignment_report(scenario, alloc));
  watch.lap("assign");
  if (options.write_lp) {
    for (std::size_t l = 0; l < alloc.assignment.orders.size(); ++l) {
      const OrderRecord& rec = alloc.assignment.orders[l];
      const MptpSetup setup = make_setup(scenario, alloc, static_cast<int>(l),
                                         scenario.decoys[rec.agent], 0, scenario.asset,
                                         scenario.threats[rec.task]);
      run.write(lp_file_name(rec.agent), milp::write_lp(build_mptp(setup).model));
    }
    watch.lap("write_lp");
  }
  const std::vector<DecoyPlan> plans = plan_all(scenario, alloc, options.solver);
  watch.lap("plan");
  const std::string report = plan_report(scenario, alloc, plans);
  run.write("plan.txt", report);
  run.write("plans.json", plans_to_json(plans, scenario.params));
  run.close();
  out << report;
  for (const DecoyPlan& p : plans) {
    if (!p.ok()) return 1;
  }
  return 0;
}

int cmd_simulate(const CommandOptions& options, std::ostream& out) {
  if (options.mode != "open" && options.mode != "closed") {
    throw Error(ErrorCode::Usage, "--mode must be open or closed");
  }
  if (options.mode == "open" && options.plans_path.empty()) {
    throw Error(ErrorCode::Usage, "open-loop simulation needs --plans (plans.json from 'plan')");
  }
  const Scenario scenario = load_scenario(options);
  std::vector<DecoyPlan> plans;
  if (options.mode == "open") plans = plans_from_json(read_file(options.plans_path));
  RunDir run(options, "simulate", scenario);
  Stopwatch watch(run.manifest);
  const AllocationReport alloc = allocate(scenario);
  watch.lap("assign");
  SimOptions sim;
  sim.disturbances = options.disturbances;
  sim.seed = scenario.seed;
  sim.solver = options.solver;
  const SimResult result = options.mode == "open" ? run_open_loop(scenario, alloc, plans, sim)
                                                  : run_closed_loop(scenario, alloc, sim);
  watch.lap("simulate");
  if (options.mode == "open") run.write("plans.json", plans_to_json(plans, scenario.params));
  run.write("assignment.txt", assignment_report(scenario, alloc));
  run.write("trajectories.tsv", trajectories_tsv(result));
  run.write("completion.tsv", completion_table(result));
  const std::string metrics = metrics_report(scenario, alloc, result);
  run.write("metrics.txt", metrics);
  run.write("events.txt", events_report(result));
  run.write("series/safe_sets.tsv", safe_set_series(result, alloc));
  run.write("series/cones.tsv", cone_series(result, scenario));
  run.write("series/fake_assets.tsv", fake_asset_series(result));
  watch.lap("write");
  run.close();
  out << metrics;
  return result.violations.empty() ? 0 : 1;
}

int cmd_verify(const std::string& run_dir, std::ostream& out) {
  const VerifyReport rep = verify_run(run_dir);
  for (const std::string& s : rep.passed) out << "PASS " << s << '\n';
  for (const std::string& s : rep.failed) out << "FAIL " << s << '\n';
  out << (rep.ok() ? "verify: all checks passed\n" : "verify: " + std::to_string(rep.failed.size()) +
                                                         " check(s) failed\n");
  return rep.ok() ? 0 : 1;
}

}  // namespace decoy
