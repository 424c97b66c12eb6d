#include "gchsh/table_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gchsh::table {

using nlohmann::json;

namespace {

constexpr const char* kFormatName = "gchsh-bound-table";

json curve_to_json(const bounds::BoundCurve& c) {
  json sweep = json::array();
  for (const auto& p : c.sweep) sweep.push_back({stored(p.score), stored(p.min_fidelity)});
  return {{"theta", stored(c.theta.value())},
          {"beta_local", stored(c.beta_local)},
          {"beta_star", stored(c.beta_star)},
          {"fidelity_star", stored(c.fidelity_star)},
          {"slope_star", stored(c.slope_star)},
          {"beta_trivial", stored(c.beta_trivial)},
          {"kappa", stored(c.kappa)},
          {"seed", c.seed},
          {"restarts", c.restarts},
          {"sweep", std::move(sweep)}};
}

double finite(const json& j, const char* key) {
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) throw TableError(std::string("non-finite value for ") + key);
  return v;
}

bell::Theta checked_theta(double t) {
  if (t < kThetaSupportedMin - 1e-12 || t > kThetaSupportedMax + 1e-12) {
    std::ostringstream os;
    os << "table entry with theta = " << t << " outside the supported range [pi/64, pi/4]";
    throw TableError(os.str());
  }
  return bell::Theta(t);
}

bounds::BoundCurve curve_from_json(const json& j) {
  bounds::BoundCurve c;
  c.theta = checked_theta(finite(j, "theta"));
  c.beta_local = finite(j, "beta_local");
  c.beta_star = finite(j, "beta_star");
  c.fidelity_star = finite(j, "fidelity_star");
  c.slope_star = finite(j, "slope_star");
  c.beta_trivial = finite(j, "beta_trivial");
  c.kappa = finite(j, "kappa");
  c.seed = j.at("seed").get<std::uint64_t>();
  c.restarts = j.at("restarts").get<int>();
  if (!(c.beta_trivial < kQuantumBound)) throw TableError("beta_trivial must lie below 2 sqrt2");
  if (!(c.slope_star > 0.0)) throw TableError("slope_star must be positive");
  for (const auto& p : j.at("sweep")) {
    if (!p.is_array() || p.size() != 2) throw TableError("sweep entries must be [score, fidelity] pairs");
    const bounds::SweepPoint sp{p[0].get<double>(), p[1].get<double>()};
    if (!(sp.min_fidelity >= 0.0 && sp.min_fidelity <= 1.0)) throw TableError("sweep fidelity outside [0, 1]");
    if (!c.sweep.empty() && !(sp.score < c.sweep.back().score)) throw TableError("sweep scores must decrease");
    c.sweep.push_back(sp);
  }
  return c;
}

void write_atomically(const std::string& text, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw TableError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw TableError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw TableError("cannot replace " + path.string());
  }
}

template <class T>
void sort_by_theta(std::vector<T>& v) {
  std::sort(v.begin(), v.end(), [](const T& x, const T& y) { return x.theta.value() < y.theta.value(); });
}

}  // namespace

double stored(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

void save_table(const TableFile& table, const std::filesystem::path& path) {
  json curves = json::array();
  for (const auto& c : table.curves) curves.push_back(curve_to_json(c));
  json alice = json::array();
  for (const auto& r : table.alice_params) {
    json grid = json::array();
    for (const auto& p : r.grid) grid.push_back({stored(p.a), stored(p.omega), stored(p.d)});
    alice.push_back({{"theta", stored(r.theta.value())}, {"grid", std::move(grid)}});
  }
  const json doc{{"format", kFormatName},
                 {"version", kFormatVersion},
                 {"curves", std::move(curves)},
                 {"alice_params", std::move(alice)}};
  write_atomically(doc.dump(1) + "\n", path);
}

void save_table(const std::vector<bounds::BoundCurve>& curves, const std::filesystem::path& path) {
  save_table(TableFile{curves, {}}, path);
}

TableFile load_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TableError("cannot open table " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw TableError("table file is empty: " + path.string());

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw TableError("corrupt table " + path.string() + ": " + e.what());
  }

  TableFile out;
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormatName) throw TableError("not a bound table: " + path.string());
    const int version = doc.at("version").get<int>();
    if (version != kFormatVersion) {
      std::ostringstream os;
      os << "table schema version " << version << " is not supported (expected " << kFormatVersion << ")";
      throw TableError(os.str());
    }
    for (const auto& c : doc.at("curves")) out.curves.push_back(curve_from_json(c));
    if (doc.contains("alice_params")) {
      for (const auto& r : doc.at("alice_params")) {
        AliceGridRecord rec{checked_theta(finite(r, "theta")), {}};
        for (const auto& p : r.at("grid")) {
          if (!p.is_array() || p.size() != 3) throw TableError("alice grid entries must be [a, omega, d]");
          rec.grid.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
        }
        out.alice_params.push_back(std::move(rec));
      }
    }
  } catch (const json::exception& e) {
    throw TableError("malformed table " + path.string() + ": " + e.what());
  }
  sort_by_theta(out.curves);
  sort_by_theta(out.alice_params);
  return out;
}

std::vector<bounds::BoundCurve> load_table(const std::filesystem::path& path) { return load_table_file(path).curves; }

const bounds::BoundCurve* find_curve(const std::vector<bounds::BoundCurve>& curves, bell::Theta theta, double tol) {
  for (const auto& c : curves)
    if (std::abs(c.theta.value() - theta.value()) <= tol) return &c;
  return nullptr;
}

const AliceGridRecord* find_alice_grid(const TableFile& table, bell::Theta theta, double tol) {
  for (const auto& r : table.alice_params)
    if (std::abs(r.theta.value() - theta.value()) <= tol) return &r;
  return nullptr;
}

void upsert(TableFile& table, const bounds::BoundCurve& curve) {
  auto it = std::find_if(table.curves.begin(), table.curves.end(), [&](const bounds::BoundCurve& c) {
    return std::abs(c.theta.value() - curve.theta.value()) <= 1e-9;
  });
  if (it != table.curves.end())
    *it = curve;
  else
    table.curves.push_back(curve);
  sort_by_theta(table.curves);
}

void upsert(TableFile& table, const AliceGridRecord& record) {
  auto it = std::find_if(table.alice_params.begin(), table.alice_params.end(), [&](const AliceGridRecord& r) {
    return std::abs(r.theta.value() - record.theta.value()) <= 1e-9;
  });
  if (it != table.alice_params.end())
    *it = record;
  else
    table.alice_params.push_back(record);
  sort_by_theta(table.alice_params);
}

}  // namespace gchsh::table
