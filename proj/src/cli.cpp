#include "gchsh/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <regex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gchsh/log.hpp"
#include "gchsh/table_io.hpp"

namespace gchsh::cli {

using json = nlohmann::ordered_json;

namespace {

class PathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::string table_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::optional<double> kappa;
  std::string theta_min, theta_max;
  std::optional<int> theta_count;
  bool json_out = false;
  bool quiet = false;
  bool compute_missing = false;
  int jobs = 1;

  std::string theta;
  std::optional<double> score;
  std::optional<double> x, y;
  std::optional<double> delta;
  std::string out_path;
};

void check_writable(const std::filesystem::path& path) {
  std::filesystem::path probe = path;
  probe += ".tmp";
  const bool existed = std::filesystem::exists(probe);
  {
    std::ofstream f(probe, std::ios::app);
    if (!f) throw PathError("cannot write to " + path.string());
  }
  if (!existed) std::filesystem::remove(probe);
}

RunConfig resolve_config(const Options& o) {
  RunConfig cfg;
  std::optional<std::filesystem::path> config_table;
  if (!o.config_path.empty()) {
    load_config(o.config_path, cfg);
    config_table = cfg.table_path;
  }
  if (!o.table_path.empty()) {
    cfg.table_path = o.table_path;
  } else if (const char* env = std::getenv(kTableEnvVar); env && *env) {
    cfg.table_path = env;
  } else if (config_table) {
    cfg.table_path = *config_table;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.restarts) cfg.restarts = *o.restarts;
  if (o.kappa) cfg.kappa = *o.kappa;
  if (!o.theta_min.empty()) cfg.theta_grid.lo = parse_theta(o.theta_min);
  if (!o.theta_max.empty()) cfg.theta_grid.hi = parse_theta(o.theta_max);
  if (o.theta_count) cfg.theta_grid.count = *o.theta_count;
  cfg.validate();
  return cfg;
}

table::TableFile load_or_empty(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  return table::load_table_file(path);
}

class Reporter {
 public:
  Reporter(std::ostream& out, bool as_json) : out_(out), json_(as_json) {
    out_ << std::setprecision(12);
  }

  void emit(const json& record) {
    if (json_) {
      out_ << record.dump() << '\n';
      return;
    }
    for (const auto& [key, value] : record.items()) {
      if (key == "command") continue;
      out_ << key << ": ";
      if (value.is_number_float())
        out_ << value.get<double>();
      else if (value.is_string())
        out_ << value.get<std::string>();
      else
        out_ << value.dump();
      out_ << '\n';
    }
  }

 private:
  std::ostream& out_;
  bool json_;
};

json curve_record(const bounds::BoundCurve& c) {
  return {{"command", "trivial-score"},
          {"theta", c.theta.value()},
          {"beta_local", c.beta_local},
          {"beta_star", c.beta_star},
          {"fidelity_star", c.fidelity_star},
          {"slope_star", c.slope_star},
          {"beta_trivial", c.beta_trivial},
          {"sweep_steps", c.sweep.size()},
          {"seed", c.seed},
          {"restarts", c.restarts}};
}

// Computes the curves for `thetas` that the table lacks, saving after each one.
class CurveBuilder {
 public:
  CurveBuilder(const RunConfig& cfg, table::TableFile& tab, std::ostream& err, bool quiet)
      : cfg_(cfg), tab_(tab), err_(err), quiet_(quiet) {}

  bounds::BoundCurve compute(double theta_value) {
    const bell::Theta theta(theta_value);
    bounds::check_supported(theta);
    const auto sweep_cfg = cfg_.sweep_config();

    std::optional<maps::AliceParamTable> alice;
    {
      std::lock_guard lock(mu_);
      if (const auto* rec = table::find_alice_grid(tab_, theta))
        alice = maps::AliceParamTable::from_grid(theta, rec->grid, sweep_cfg.alice);
    }
    if (!alice) {
      alice = maps::AliceParamTable::build(theta, sweep_cfg.alice);
      std::lock_guard lock(mu_);
      table::upsert(tab_, table::AliceGridRecord{theta, alice->grid()});
    }
    auto progress = [&](int k, const bounds::SweepPoint& p) {
      if (quiet_) return;
      std::lock_guard lock(mu_);
      err_ << "theta " << theta_value << " step " << k << ": score " << p.score << " min fidelity "
           << p.min_fidelity << '\n';
    };
    bounds::BoundCurve curve = bounds::compute_curve(*alice, sweep_cfg, progress);
    std::lock_guard lock(mu_);
    table::upsert(tab_, curve);
    table::save_table(tab_, cfg_.table_path);
    return curve;
  }

  void fill_missing(const std::vector<double>& thetas, int jobs) {
    std::vector<double> missing;
    for (double t : thetas)
      if (!table::find_curve(tab_.curves, bell::Theta(t))) missing.push_back(t);
    if (missing.empty()) return;
    if (!quiet_) err_ << "computing " << missing.size() << " missing bound curves\n";

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto worker = [&] {
      for (std::size_t i = next++; i < missing.size(); i = next++) {
        try {
          compute(missing[i]);
        } catch (...) {
          std::lock_guard lock(mu_);
          if (!failure) failure = std::current_exception();
          next = missing.size();
        }
      }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(missing.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

 private:
  const RunConfig& cfg_;
  table::TableFile& tab_;
  std::ostream& err_;
  bool quiet_;
  std::mutex mu_;
};

int cmd_trivial_score(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  const bell::Theta theta(parse_theta(o.theta));
  bounds::check_supported(theta);
  check_writable(cfg.table_path);
  table::TableFile tab = load_or_empty(cfg.table_path);
  CurveBuilder builder(cfg, tab, err, o.quiet);
  const bounds::BoundCurve c = builder.compute(theta.value());
  Reporter(out, o.json_out).emit(curve_record(c));
  return kOk;
}

int cmd_bound(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  const bell::Theta theta(parse_theta(o.theta));
  bounds::check_supported(theta);
  if (!(*o.score <= kQuantumBound + 1e-12)) throw DomainError("score exceeds the quantum bound 2 sqrt2");
  table::TableFile tab = load_or_empty(cfg.table_path);
  const bounds::BoundCurve* curve = table::find_curve(tab.curves, theta);
  if (!curve) {
    if (!o.compute_missing) {
      std::ostringstream os;
      os << "no bound curve for theta = " << theta.value() << " in " << cfg.table_path.string()
         << " (run trivial-score or pass --compute-missing)";
      throw TableIncompleteError(os.str());
    }
    check_writable(cfg.table_path);
    CurveBuilder(cfg, tab, err, o.quiet).compute(theta.value());
    curve = table::find_curve(tab.curves, theta);
  }
  Reporter(out, o.json_out)
      .emit({{"command", "bound"},
             {"theta", theta.value()},
             {"score", *o.score},
             {"beta_trivial", curve->beta_trivial},
             {"fidelity_bound", bounds::bound_at(*curve, *o.score)}});
  return kOk;
}

const std::vector<bounds::BoundCurve>& curves_for_grid(const RunConfig& cfg, const Options& o, table::TableFile& tab,
                                                       std::ostream& err) {
  if (o.compute_missing) {
    bool missing = false;
    for (double t : cfg.theta_grid.values()) missing = missing || !table::find_curve(tab.curves, bell::Theta(t));
    if (missing) {
      check_writable(cfg.table_path);
      CurveBuilder(cfg, tab, err, o.quiet).fill_missing(cfg.theta_grid.values(), o.jobs);
    }
  }
  return tab.curves;
}

int cmd_select(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  cfg.theta_grid.validate();
  const auto n = selector::normalize(bell::CorrelatorPair::make(*o.x, *o.y));
  switch (selector::region_violation(n)) {
    case selector::RegionViolation::local:
      throw RegionError("outside the self-testing region: |X| + |Y| < 2 (a local model reproduces the correlators)");
    case selector::RegionViolation::quantum:
      throw RegionError("outside the self-testing region: X^2 + Y^2 > 4 (not reachable by quantum correlations)");
    case selector::RegionViolation::none:
      break;
  }
  table::TableFile tab = load_or_empty(cfg.table_path);
  const auto r = selector::select(n, curves_for_grid(cfg, o, tab, err), cfg.theta_grid);
  Reporter(out, o.json_out)
      .emit({{"command", "select"},
             {"x", *o.x},
             {"y", *o.y},
             {"normalized_x", n.x},
             {"normalized_y", n.y},
             {"symmetries", n.transform_log},
             {"theta_best", r.theta_best.value()},
             {"beta_at_best", r.beta_at_best},
             {"fidelity_bound", r.fidelity_bound}});
  return kOk;
}

int cmd_mesh(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  cfg.theta_grid.validate();
  if (!(*o.delta > 0.0)) throw InputError("--delta must be positive");
  check_writable(o.out_path);
  table::TableFile tab = load_or_empty(cfg.table_path);
  const auto records = selector::mesh(*o.delta, curves_for_grid(cfg, o, tab, err), cfg.theta_grid);
  try {
    selector::write_mesh_csv(records, o.out_path);
  } catch (const std::runtime_error& e) {
    throw PathError(e.what());
  }
  Reporter(out, o.json_out)
      .emit({{"command", "mesh"}, {"path", o.out_path}, {"rows", records.size()}, {"delta", *o.delta}});
  return kOk;
}

int cmd_table_list(const Options& o, std::ostream& out) {
  const RunConfig cfg = resolve_config(o);
  const table::TableFile tab = load_or_empty(cfg.table_path);
  Reporter rep(out, o.json_out);
  if (!o.json_out) out << "# " << tab.curves.size() << " curves in " << cfg.table_path.string() << '\n';
  for (const auto& c : tab.curves) rep.emit(curve_record(c));
  return kOk;
}

int cmd_table_build(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  cfg.theta_grid.validate();
  check_writable(cfg.table_path);
  table::TableFile tab = load_or_empty(cfg.table_path);
  CurveBuilder(cfg, tab, err, o.quiet).fill_missing(cfg.theta_grid.values(), o.jobs);
  Reporter(out, o.json_out)
      .emit({{"command", "table-build"},
             {"path", cfg.table_path.string()},
             {"curves", tab.curves.size()},
             {"grid_points", cfg.theta_grid.count}});
  return kOk;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config_path, "JSON configuration file");
  app->add_option("--table", o.table_path, "bound table path (overrides $GCHSH_TABLE and the config)");
  app->add_option("--seed", o.seed, "seed of the angle search");
  app->add_option("--restarts", o.restarts, "restarts of the angle search");
  app->add_option("--kappa", o.kappa, "base sweep step");
  app->add_flag("--json", o.json_out, "one JSON object per result");
  app->add_flag("--quiet", o.quiet, "no progress output");
}

void add_grid(CLI::App* app, Options& o) {
  app->add_option("--theta-min", o.theta_min, "lowest theta of the scan grid");
  app->add_option("--theta-max", o.theta_max, "highest theta of the scan grid");
  app->add_option("--theta-count", o.theta_count, "number of theta values in the scan grid");
  app->add_flag("--compute-missing", o.compute_missing, "compute curves absent from the table");
  app->add_option("--jobs", o.jobs, "worker threads for missing curves")->check(CLI::PositiveNumber);
}

}  // namespace

bounds::SweepConfig RunConfig::sweep_config() const {
  bounds::SweepConfig s;
  s.kappa = kappa;
  s.max_steps = max_steps;
  s.confirm_steps = confirm_steps;
  s.search.seed = seed;
  s.search.restarts = restarts;
  s.search.local_tol = local_tol;
  return s;
}

void RunConfig::validate() const {
  if (restarts < 1) throw InputError("restarts must be >= 1");
  if (!(kappa > 0.0)) throw InputError("kappa must be positive");
  if (!(local_tol > 0.0)) throw InputError("local_tol must be positive");
  if (max_steps < 1) throw InputError("max_steps must be >= 1");
  if (confirm_steps < 0) throw InputError("confirm_steps must be >= 0");
  if (table_path.empty()) throw InputError("table path is empty");
}

double parse_theta(std::string_view text) {
  static const std::regex frac(R"(^\s*([0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)");
  const std::string s(text);
  std::smatch m;
  if (std::regex_match(s, m, frac)) {
    const double num = m[1].length() ? std::stod(m[1].str()) : 1.0;
    const double den = m[2].matched ? std::stod(m[2].str()) : 1.0;
    if (!(den > 0.0)) throw InputError("invalid theta '" + s + "'");
    return num * kPi / den;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw InputError("invalid theta '" + s + "' (expected radians or a fraction such as pi/8)");
}

void load_config(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
    for (const auto& [key, value] : doc.items()) {
      if (key == "seed") config.seed = value.get<std::uint64_t>();
      else if (key == "restarts") config.restarts = value.get<int>();
      else if (key == "kappa") config.kappa = value.get<double>();
      else if (key == "local_tol") config.local_tol = value.get<double>();
      else if (key == "max_steps") config.max_steps = value.get<int>();
      else if (key == "confirm_steps") config.confirm_steps = value.get<int>();
      else if (key == "table") config.table_path = value.get<std::string>();
      else if (key == "theta_grid") {
        if (value.contains("min")) config.theta_grid.lo = parse_theta(value["min"].is_string() ? value["min"].get<std::string>() : value["min"].dump());
        if (value.contains("max")) config.theta_grid.hi = parse_theta(value["max"].is_string() ? value["max"].get<std::string>() : value["max"].dump());
        if (value.contains("count")) config.theta_grid.count = value["count"].get<int>();
      } else {
        throw InputError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InputError("malformed config " + path.string() + ": " + e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::mutex log_mu;
  set_log_sink([&err, &log_mu](LogLevel level, std::string_view msg) {
    std::lock_guard lock(log_mu);
    err << (level == LogLevel::warning ? "warning: " : "") << msg << '\n';
  });
  struct SinkReset {
    ~SinkReset() { reset_log_sink(); }
  } reset;

  Options o;
  CLI::App app{"Device-independent fidelity bounds from generalized CHSH scores", "gchsh"};
  app.require_subcommand(1);

  auto* trivial = app.add_subcommand("trivial-score", "sweep scores at one theta and store its bound curve");
  add_common(trivial, o);
  trivial->add_option("--theta", o.theta, "radians or a fraction of pi, e.g. pi/8")->required();

  auto* bound = app.add_subcommand("bound", "fidelity bound at a score");
  add_common(bound, o);
  bound->add_option("--theta", o.theta, "radians or a fraction of pi")->required();
  bound->add_option("--score", o.score, "generalized CHSH score")->required();
  bound->add_flag("--compute-missing", o.compute_missing, "compute the curve when the table lacks it");

  auto* select = app.add_subcommand("select", "best generalized CHSH test for correlators X, Y");
  add_common(select, o);
  add_grid(select, o);
  select->add_option("--x", o.x, "X = <A0 (B0 + B1)>")->required();
  select->add_option("--y", o.y, "Y = <A1 (B0 - B1)>")->required();

  auto* mesh = app.add_subcommand("mesh", "bound over a square grid of the (X, Y) region, as CSV");
  add_common(mesh, o);
  add_grid(mesh, o);
  mesh->add_option("--delta", o.delta, "grid pitch")->required();
  mesh->add_option("--out", o.out_path, "output CSV path")->required();

  auto* tbl = app.add_subcommand("table", "inspect or fill the bound table");
  tbl->require_subcommand(1);
  auto* list = tbl->add_subcommand("list", "print stored curves");
  add_common(list, o);
  auto* build = tbl->add_subcommand("build", "compute every curve of the theta grid");
  add_common(build, o);
  add_grid(build, o);

  std::vector<const char*> argv{"gchsh"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    if (*trivial) return cmd_trivial_score(o, out, err);
    if (*bound) return cmd_bound(o, out, err);
    if (*select) return cmd_select(o, out, err);
    if (*mesh) return cmd_mesh(o, out, err);
    if (*list) return cmd_table_list(o, out);
    if (*build) return cmd_table_build(o, out, err);
  } catch (const PathError& e) {
    err << "error: " << e.what() << '\n';
    return kUnwritablePath;
  } catch (const TableIncompleteError& e) {
    err << "error: " << e.what() << '\n';
    return kMissingTableEntry;
  } catch (const RegionError& e) {
    err << "error: " << e.what() << '\n';
    return kOutsideRegion;
  } catch (const TableError& e) {
    const bool write_failure = std::string_view(e.what()).starts_with("cannot write") ||
                               std::string_view(e.what()).starts_with("cannot replace");
    err << "error: " << e.what() << '\n';
    return write_failure ? kUnwritablePath : kInvalidInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kInvalidInput;
}

}  // namespace gchsh::cli
