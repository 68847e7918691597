#include "dyson/cli_runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include "dyson/correlation_kernels.hpp"
#include "dyson/dyson_simulators.hpp"
#include "dyson/errors.hpp"
#include "dyson/suites.hpp"
#include "dyson/verification.hpp"

namespace dyson::cli {

namespace {

const std::map<std::string, Command> kCommands = {
    {"simulate", Command::Simulate},   {"density", Command::Density},
    {"kernel", Command::Kernel},       {"correlate", Command::Correlate},
    {"mgf", Command::Mgf},             {"verify", Command::Verify},
    {"conditions", Command::Conditions}, {"truncation", Command::Truncation}};

std::string command_name(Command c) {
  for (const auto& [name, cmd] : kCommands)
    if (cmd == c) return name;
  return "?";
}

double require_positive(const nlohmann::json& j, const std::string& field, double fallback,
                        bool required = false) {
  if (!j.contains(field)) {
    if (required) throw ConfigError(field, "required");
    return fallback;
  }
  if (!j[field].is_number()) throw ConfigError(field, "must be a number");
  const double v = j[field].get<double>();
  if (!(v > 0.0)) throw ConfigError(field, "must be positive");
  return v;
}

// Deterministic double formatting for CSV artifacts.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct GridField {
  double a;
  double b;
  std::size_t n;
};

GridField parse_grid(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "must be an object {a, b, n}");
  if (!j.contains("a") || !j.contains("b") || !j.contains("n"))
    throw ConfigError(path, "needs fields a, b, n");
  GridField g{j["a"].get<double>(), j["b"].get<double>(), j["n"].get<std::size_t>()};
  if (!(g.a < g.b)) throw ConfigError(path + ".a", "must be below b");
  if (g.n < 2) throw ConfigError(path + ".n", "must be at least 2");
  return g;
}

Configuration config_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "must be a nonempty array of numbers");
  std::vector<double> pts;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(path, "must contain only numbers");
    pts.push_back(v.get<double>());
  }
  try {
    return Configuration(std::move(pts));
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

InfiniteConfigSpec lattice_from_json(const nlohmann::json& j, const std::string& path) {
  const auto& lat = j.at("lattice");
  const double spacing = lat.value("spacing", 1.0);
  const double offset = lat.value("offset", 0.0);
  if (!(spacing > 0.0)) throw ConfigError(path + ".lattice.spacing", "must be positive");
  return InfiniteConfigSpec::lattice(spacing, offset);
}

/// Configuration for kernel-type commands; a lattice spec needs a window "L".
Configuration resolve_xi(const RunConfig& cfg) {
  if (cfg.xi) return *cfg.xi;
  if (cfg.spec) {
    const double L = require_positive(cfg.raw, "L", 0.0, true);
    return restrict(*cfg.spec, L);
  }
  throw ConfigError("config", "required");
}

/// Canonical echo of the resolved run for artifact metadata. The worker count
/// is omitted on purpose: artifacts must be byte-identical across pool sizes.
nlohmann::json resolved_config(const RunConfig& cfg) {
  nlohmann::json j = cfg.raw;
  j["command"] = command_name(cfg.command);
  j["seed"] = cfg.seed;
  j["n_paths"] = cfg.n_paths;
  j["Q"] = cfg.gh_order;
  j["m"] = cfg.nystrom_m;
  j["N_c"] = cfg.contour_nodes;
  j["build_id"] = cfg.build_id;
  j.erase("workers");
  return j;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const RunConfig& cfg, const std::string& header) {
    out_.open(path);
    if (!out_) throw std::runtime_error("cannot open output file " + path);
    out_ << "# config: " << resolved_config(cfg).dump() << "\n" << header << "\n";
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt(values[i]);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << text;
}

std::function<double(double)> make_chi(const nlohmann::json& j, const std::string& path) {
  const std::string type = j.value("type", "");
  if (type == "zero") return [](double) { return 0.0; };
  if (type == "indicator") {
    const double a = j.at("a").get<double>();
    const double b = j.at("b").get<double>();
    const double scale = j.value("scale", 1.0);
    return [a, b, scale](double x) { return (x >= a && x <= b) ? scale : 0.0; };
  }
  if (type == "bump") {
    BumpSpec bump{j.value("center", 0.0), j.value("halfwidth", 1.0), j.value("amplitude", 1.0)};
    return [bump](double x) { return bump_value(bump, x); };
  }
  throw ConfigError(path + ".type", "must be one of zero, indicator, bump");
}

struct CommandResult {
  int status;
  std::string summary;
};

KernelContext make_context(const RunConfig& cfg, double horizon) {
  KernelOptions opt;
  opt.gh_order = cfg.gh_order;
  opt.contour_nodes = cfg.contour_nodes;
  opt.horizon = horizon;
  return KernelContext(resolve_xi(cfg), opt);
}

CommandResult cmd_density(const RunConfig& cfg) {
  const GridField grid = parse_grid(cfg.raw.at("grid"), "grid");
  const double t = require_positive(cfg.raw, "t", cfg.t);
  KernelContext ctx = make_context(cfg, t * 4.0 + 1.0);
  CsvWriter csv(cfg.out_prefix + ".density.csv", cfg, "x,rho");
  double mass = 0.0;
  const double dx = (grid.b - grid.a) / static_cast<double>(grid.n - 1);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.a + dx * static_cast<double>(i);
    const double rho = density(ctx, t, x);
    csv.row({x, rho});
    mass += rho * dx * ((i == 0 || i + 1 == grid.n) ? 0.5 : 1.0);
  }
  return {0, "rows=" + std::to_string(grid.n) + " mass=" + fmt(mass)};
}

CommandResult cmd_kernel(const RunConfig& cfg) {
  const double s = require_positive(cfg.raw, "s", 0.0, true);
  const double t = require_positive(cfg.raw, "t", 0.0, true);
  const GridField xg = parse_grid(cfg.raw.at("x_grid"), "x_grid");
  const GridField yg = parse_grid(cfg.raw.at("y_grid"), "y_grid");
  const std::string method = cfg.raw.value("method", "direct");
  if (method != "direct" && method != "contour")
    throw ConfigError("method", "must be direct or contour");
  KernelContext ctx = make_context(cfg, std::max(s, t) * 4.0 + 1.0);
  CsvWriter csv(cfg.out_prefix + ".kernel.csv", cfg, "s,x,t,y,K");
  double max_abs = 0.0;
  const double dxv = (xg.b - xg.a) / static_cast<double>(xg.n - 1);
  const double dyv = (yg.b - yg.a) / static_cast<double>(yg.n - 1);
  for (std::size_t i = 0; i < xg.n; ++i) {
    const double x = xg.a + dxv * static_cast<double>(i);
    for (std::size_t j = 0; j < yg.n; ++j) {
      const double y = yg.a + dyv * static_cast<double>(j);
      const double k = (method == "contour") ? contour_kernel_K(ctx, s, x, t, y)
                                             : kernel_K(ctx, s, x, t, y);
      csv.row({s, x, t, y, k});
      max_abs = std::max(max_abs, std::abs(k));
    }
  }
  return {0, "rows=" + std::to_string(xg.n * yg.n) + " max|K|=" + fmt(max_abs)};
}

CommandResult cmd_correlate(const RunConfig& cfg) {
  CorrelationRequest req;
  for (const auto& v : cfg.raw.at("times")) req.times.push_back(v.get<double>());
  for (const auto& pts : cfg.raw.at("points")) {
    req.points.emplace_back();
    for (const auto& v : pts) req.points.back().push_back(v.get<double>());
  }
  const double t_max = req.times.empty() ? 1.0 : req.times.back();
  KernelContext ctx = make_context(cfg, t_max * 4.0 + 1.0);
  const double value = multitime_correlation(ctx, req);
  nlohmann::json out;
  out["config"] = resolved_config(cfg);
  out["value"] = value;
  write_text(cfg.out_prefix + ".correlate.json", out.dump(2) + "\n");
  return {0, "value=" + fmt(value)};
}

CommandResult cmd_mgf(const RunConfig& cfg) {
  std::vector<double> times;
  for (const auto& v : cfg.raw.at("times")) times.push_back(v.get<double>());
  const auto& chi_spec = cfg.raw.at("chi");
  if (!chi_spec.is_array() || chi_spec.size() != times.size())
    throw ConfigError("chi", "needs one entry per time");
  std::vector<std::function<double(double)>> chi;
  for (std::size_t i = 0; i < chi_spec.size(); ++i)
    chi.push_back(make_chi(chi_spec[i], "chi[" + std::to_string(i) + "]"));
  const GridField g = parse_grid(cfg.raw.at("grid"), "grid");
  const double t_max = times.empty() ? 1.0 : times.back();
  KernelContext ctx = make_context(cfg, t_max * 4.0 + 1.0);
  const MgfResult res = fredholm_mgf(ctx, times, chi, GridSpec{g.a, g.b, cfg.nystrom_m});
  nlohmann::json out;
  out["config"] = resolved_config(cfg);
  out["times"] = times;
  out["chi_spec"] = chi_spec;
  out["grid"] = {{"a", g.a}, {"b", g.b}, {"m", cfg.nystrom_m}};
  out["value"] = res.value;
  out["refinement_delta"] = res.refinement_delta;
  write_text(cfg.out_prefix + ".mgf.json", out.dump(2) + "\n");
  return {0, "value=" + fmt(res.value) + " refinement_delta=" + fmt(res.refinement_delta)};
}

CommandResult cmd_simulate(const RunConfig& cfg) {
  const Configuration xi = resolve_xi(cfg);
  const double T = require_positive(cfg.raw, "T", cfg.T);
  const double step = require_positive(cfg.raw, "step", cfg.grid_step);
  const std::string method = cfg.raw.value("method", "sde");
  const std::size_t n_traj = cfg.raw.value("n_trajectories", std::size_t{10});
  const TimeGrid grid = TimeGrid::uniform(T, std::max<std::size_t>(1, std::llround(T / step)));

  if (method == "cbm") {
    CsvWriter csv(cfg.out_prefix + ".trajectories.csv", cfg, "path_id,t,re,im");
    for (std::size_t p = 0; p < n_traj; ++p) {
      const auto paths = sample_cbm_system(xi, grid, cfg.seed, 2 * xi.size() * p);
      for (std::size_t i = 0; i < paths.size(); ++i)
        for (std::size_t k = 0; k < grid.size(); ++k)
          csv.row({static_cast<double>(p * xi.size() + i), grid[k], paths[i].re.values[k],
                   paths[i].im.values[k]});
    }
    return {0, "method=cbm trajectories=" + std::to_string(n_traj)};
  }
  if (method != "sde" && method != "gue") throw ConfigError("method", "must be sde, gue or cbm");

  CsvWriter csv(cfg.out_prefix + ".trajectories.csv", cfg, "traj_id,t,i,x_i");
  for (std::size_t p = 0; p < n_traj; ++p) {
    RngStream rng(cfg.seed, p);
    const Trajectory traj =
        (method == "sde") ? simulate_sde(xi, grid, rng) : simulate_gue(xi, grid, rng);
    for (std::size_t k = 0; k < grid.size(); ++k)
      for (std::size_t i = 0; i < traj.states[k].size(); ++i)
        csv.row({static_cast<double>(p), grid[k], static_cast<double>(i), traj.states[k][i]});
  }
  return {0, "method=" + method + " trajectories=" + std::to_string(n_traj)};
}

CommandResult cmd_verify(const RunConfig& cfg) {
  const std::string suite = cfg.raw.value("suite", "all");
  SuiteParams sp;
  sp.n_paths = cfg.n_paths;
  sp.seed = cfg.seed;
  sp.workers = cfg.workers;
  sp.build_id = cfg.build_id;

  std::vector<SuiteResult> results;
  if (suite == "theorem1" || suite == "all") results.push_back(run_theorem1_suite(sp));
  if (suite == "martingale" || suite == "all") results.push_back(run_martingale_suite(sp));
  if (suite == "corollary2" || suite == "all") results.push_back(run_corollary2_suite(sp));
  if (suite == "moment" || suite == "all") results.push_back(run_moment_suite(sp));
  if (suite == "collision" || suite == "all") results.push_back(run_collision_suite(sp));
  if (results.empty())
    throw ConfigError("suite",
                      "must be one of theorem1, martingale, corollary2, moment, collision, all");

  bool pass = true;
  std::string json;
  if (results.size() == 1) {
    pass = results[0].pass;
    json = results[0].json;
  } else {
    std::vector<NamedReport> merged;
    for (const SuiteResult& r : results) {
      pass = pass && r.pass;
      for (const NamedReport& nr : r.reports) merged.push_back({r.suite + "/" + nr.name, nr.report});
    }
    json = report_collection_json("all", sp.seed, 0, sp.n_paths, sp.build_id, merged);
  }
  nlohmann::json doc = nlohmann::json::parse(json);
  doc["config"] = resolved_config(cfg);
  write_text(cfg.out_prefix + ".report.json", doc.dump(2) + "\n");

  // Aligned human-readable companion to the machine report.
  std::string text;
  char line[256];
  std::snprintf(line, sizeof(line), "suite %s  seed %llu  paths %zu  build %s\n%-28s %14s %14s %8s  %s\n",
                suite.c_str(), static_cast<unsigned long long>(sp.seed), sp.n_paths,
                sp.build_id.c_str(), "case", "lhs", "rhs", "z", "pass");
  text += line;
  for (const SuiteResult& r : results) {
    for (const NamedReport& nr : r.reports) {
      std::snprintf(line, sizeof(line), "%-28s %14.6g %14.6g %8.2f  %s\n",
                    (results.size() == 1 ? nr.name : r.suite + "/" + nr.name).c_str(),
                    nr.report.lhs.value, nr.report.rhs.value, nr.report.z_score,
                    nr.report.pass ? "yes" : "NO");
      text += line;
    }
  }
  write_text(cfg.out_prefix + ".report.txt", text);
  return {pass ? 0 : 1, "suite=" + suite + (pass ? " pass" : " FAIL")};
}

CommandResult cmd_conditions(const RunConfig& cfg) {
  const auto& pj = cfg.raw.at("params");
  ConditionParams params{pj.value("C0", 1.0), pj.value("alpha", 1.5), pj.value("C1", 4.0),
                         pj.value("beta", 0.5), pj.value("C2", 10.0)};
  std::vector<double> L_grid;
  for (const auto& v : cfg.raw.at("L_grid")) L_grid.push_back(v.get<double>());

  ConditionReport rep;
  if (cfg.spec) {
    rep = check_conditions(*cfg.spec, params, L_grid);
  } else if (cfg.xi) {
    rep = check_conditions(*cfg.xi, params, L_grid);
  } else {
    throw ConfigError("config", "required");
  }

  nlohmann::json out;
  out["config"] = resolved_config(cfg);
  out["M_values"] = rep.M_values;
  out["M_alpha"] = rep.M_alpha;
  out["alpha"] = rep.alpha;
  out["c2ii_values"] = rep.c2ii_values;
  out["satisfied_C1"] = rep.satisfied_C1;
  out["satisfied_C2"] = rep.satisfied_C2;
  write_text(cfg.out_prefix + ".conditions.json", out.dump(2) + "\n");
  const bool pass = rep.satisfied_C1 && rep.satisfied_C2;
  return {pass ? 0 : 1, std::string("C1=") + (rep.satisfied_C1 ? "ok" : "FAIL") + " C2=" +
                            (rep.satisfied_C2 ? "ok" : "FAIL")};
}

CommandResult cmd_truncation(const RunConfig& cfg) {
  if (!cfg.spec) throw ConfigError("config", "truncation needs a lattice spec");
  std::vector<double> L_list;
  for (const auto& v : cfg.raw.at("L_list")) L_list.push_back(v.get<double>());
  TruncationProbe probe;
  probe.t = require_positive(cfg.raw, "t", 0.2);
  const GridField g = parse_grid(cfg.raw.at("x_grid"), "x_grid");
  for (std::size_t i = 0; i < g.n; ++i)
    probe.x_grid.push_back(g.a + (g.b - g.a) * static_cast<double>(i) /
                                     static_cast<double>(g.n - 1));
  TruncationOptions opt;
  opt.with_mgf = cfg.raw.value("with_mgf", false);
  opt.gh_order = cfg.gh_order;

  const TruncationTable table = truncation_convergence(*cfg.spec, L_list, probe, opt);

  CsvWriter csv(cfg.out_prefix + ".truncation.csv", cfg,
                opt.with_mgf ? "L,density_sup_diff,mgf_diff" : "L,density_sup_diff");
  for (std::size_t k = 1; k < table.L_values.size(); ++k) {
    std::vector<double> row{table.L_values[k], table.density_sup_diffs[k - 1]};
    if (opt.with_mgf) row.push_back(table.mgf_diffs[k - 1]);
    csv.row(row);
  }
  nlohmann::json out;
  out["config"] = resolved_config(cfg);
  out["L_values"] = table.L_values;
  out["density_sup_diffs"] = table.density_sup_diffs;
  if (opt.with_mgf) out["mgf_diffs"] = table.mgf_diffs;
  out["monotone"] = table.monotone;
  out["pass"] = table.pass;
  write_text(cfg.out_prefix + ".truncation.json", out.dump(2) + "\n");
  return {table.pass ? 0 : 1, std::string(table.pass ? "pass" : "FAIL") + " final_diff=" +
                                   fmt(table.density_sup_diffs.back())};
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("document", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("document", "must be a JSON object");
  if (!j.contains("command")) throw ConfigError("command", "required");
  if (!j["command"].is_string()) throw ConfigError("command", "must be a string");
  const auto it = kCommands.find(j["command"].get<std::string>());
  if (it == kCommands.end()) throw ConfigError("command", "unknown command");

  RunConfig cfg;
  cfg.command = it->second;
  cfg.raw = j;

  if (j.contains("config")) {
    const auto& c = j["config"];
    if (c.is_array()) {
      cfg.xi = config_from_json(c, "config");
    } else if (c.is_object() && c.contains("lattice")) {
      cfg.spec = lattice_from_json(c, "config");
    } else {
      throw ConfigError("config", "must be an array of points or {\"lattice\": {...}}");
    }
  }

  cfg.T = require_positive(j, "T", cfg.T);
  cfg.grid_step = require_positive(j, "step", cfg.grid_step);
  cfg.t = require_positive(j, "t", cfg.t);
  if (j.contains("n_paths")) {
    if (!j["n_paths"].is_number_integer() || j["n_paths"].get<long long>() <= 0)
      throw ConfigError("n_paths", "must be positive");
    cfg.n_paths = j["n_paths"].get<std::size_t>();
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer() || j["workers"].get<long long>() < 0)
      throw ConfigError("workers", "must be nonnegative");
    cfg.workers = j["workers"].get<int>();
  } else if (const char* env = std::getenv("DYSON_CBM_WORKERS")) {
    cfg.workers = std::max(0, std::atoi(env));
  }
  cfg.gh_order = static_cast<std::size_t>(require_positive(j, "Q", 64));
  cfg.nystrom_m = static_cast<std::size_t>(require_positive(j, "m", 200));
  cfg.contour_nodes = static_cast<std::size_t>(require_positive(j, "N_c", 256));
  if (j.contains("out")) cfg.out_prefix = j["out"].get<std::string>();
  if (j.contains("build_id")) cfg.build_id = j["build_id"].get<std::string>();
  return cfg;
}

int run(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  CommandResult result{0, ""};
  switch (cfg.command) {
    case Command::Simulate: result = cmd_simulate(cfg); break;
    case Command::Density: result = cmd_density(cfg); break;
    case Command::Kernel: result = cmd_kernel(cfg); break;
    case Command::Correlate: result = cmd_correlate(cfg); break;
    case Command::Mgf: result = cmd_mgf(cfg); break;
    case Command::Verify: result = cmd_verify(cfg); break;
    case Command::Conditions: result = cmd_conditions(cfg); break;
    case Command::Truncation: result = cmd_truncation(cfg); break;
  }
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  std::cout << command_name(cfg.command) << " " << result.summary << " (" << elapsed.count()
            << " ms, exit " << result.status << ")\n";
  return result.status;
}

int run_from_file(const std::string& command, const std::string& config_path,
                  const std::optional<std::uint64_t>& seed_override,
                  const std::optional<int>& workers_override,
                  const std::optional<std::string>& out_override,
                  const std::optional<std::string>& build_id_override) {
  std::string prefix = out_override.value_or("out");
  auto emit_error = [&prefix](const std::string& kind, const std::string& message) {
    nlohmann::json err;
    err["error"] = kind;
    err["message"] = message;
    std::ofstream out(prefix + ".error.json");
    if (out) out << err.dump(2) << "\n";
    std::cerr << kind << ": " << message << "\n";
  };

  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("config-file", "cannot read " + config_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("document", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("document", "must be a JSON object");
    if (doc.contains("command") && doc["command"].get<std::string>() != command)
      throw ConfigError("command", "does not match the command-line command");
    doc["command"] = command;
    if (seed_override) doc["seed"] = *seed_override;
    if (workers_override) doc["workers"] = *workers_override;
    if (out_override) doc["out"] = *out_override;
    if (build_id_override) doc["build_id"] = *build_id_override;

    RunConfig cfg = parse_config(doc.dump());
    prefix = cfg.out_prefix;
    return run(cfg);
  } catch (const ConfigError& e) {
    emit_error("ConfigError", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    // missing or ill-typed command fields surface here
    emit_error("ConfigError", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("NumericalBreakdown", e.what());
    return 3;
  }
}

}  // namespace dyson::cli
