#include "puncvol/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "puncvol/bounds.hpp"
#include "puncvol/errors.hpp"
#include "puncvol/functionals.hpp"
#include "puncvol/pfaffian.hpp"
#include "puncvol/prober.hpp"
#include "puncvol/topology.hpp"

#ifndef PUNCVOL_VERSION
#define PUNCVOL_VERSION "0.0.0"
#endif

namespace puncvol::cli {

using nlohmann::json;

namespace {

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::uint64_t draw_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int single_n(const Options& o) {
  if (o.n.size() != 1) throw ConfigError("--n takes a single value for " + o.command);
  if (o.n[0] < 1) throw ConfigError("--n must be >= 1");
  return o.n[0];
}

sphere::SpherePoint unit_point(const Vec& v, std::size_t dim, const char* what) {
  if (v.size() != dim)
    throw ConfigError(std::string(what) + " must have " + std::to_string(dim) + " coordinates");
  try {
    return sphere::SpherePoint::normalized(v);
  } catch (const DomainError&) {
    throw ConfigError(std::string(what) + " must be nonzero");
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- options

json Options::to_json() const {
  return {{"command", command}, {"n", n},           {"field", opt_json(field)},   {"pole", opt_json(pole)},
          {"d", d},             {"eps", eps},       {"seed", opt_json(seed)},     {"grid", grid ? *grid : json(nullptr)},
          {"thetas", opt_json(thetas)}, {"point", opt_json(point)}, {"radius", radius}, {"indices", indices},
          {"trials", trials},   {"levels", levels}, {"format", format},           {"out", opt_json(out)}};
}

Options Options::from_json(const json& j) {
  try {
    Options o;
    o.command = j.at("command").get<std::string>();
    o.n = j.at("n").get<std::vector<int>>();
    o.field = opt_from<std::string>(j, "field");
    o.pole = opt_from<Vec>(j, "pole");
    o.d = j.at("d").get<int>();
    o.eps = j.at("eps").get<double>();
    o.seed = opt_from<std::uint64_t>(j, "seed");
    if (j.contains("grid") && !j.at("grid").is_null()) o.grid = j.at("grid");
    o.thetas = opt_from<std::vector<double>>(j, "thetas");
    o.point = opt_from<Vec>(j, "point");
    o.radius = j.at("radius").get<double>();
    o.indices = j.at("indices").get<std::vector<int>>();
    o.trials = j.at("trials").get<std::size_t>();
    o.levels = j.at("levels").get<int>();
    o.format = j.at("format").get<std::string>();
    o.out = opt_from<std::string>(j, "out");
    return o;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

json RunRecord::to_json() const {
  return {{"schema", schema},   {"command", command},     {"config", config},       {"results", results},
          {"version", version}, {"timestamp", timestamp}, {"seeds", seeds},         {"grids", grids},
          {"duration_s", duration_s}, {"exit_code", exit_code}};
}

RunRecord RunRecord::from_json(const json& j) {
  try {
    RunRecord r;
    r.schema = j.at("schema").get<int>();
    if (r.schema != kSchemaVersion) throw ConfigError("record: unsupported schema " + std::to_string(r.schema));
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config");
    r.results = j.at("results");
    r.version = j.at("version").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    r.grids = j.at("grids");
    r.duration_s = j.at("duration_s").get<double>();
    r.exit_code = j.at("exit_code").get<int>();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("record: ") + e.what());
  }
}

fields::VectorFieldSpec field_spec(const Options& o) {
  const int n = single_n(o);
  const auto kind = fields::field_kind_from_string(o.field.value_or("hopf"));
  const std::size_t dim = static_cast<std::size_t>(2 * n + 2);
  const Vec pole = o.pole ? unit_point(*o.pole, dim, "--pole").vec() : fields::default_pole(n);
  switch (kind) {
    case fields::FieldKind::hopf: return fields::VectorFieldSpec::hopf(n);
    case fields::FieldKind::radial: return fields::VectorFieldSpec::radial(n, pole);
    case fields::FieldKind::power:
      if (o.d < 1) throw ConfigError("--d must be >= 1");
      return fields::VectorFieldSpec::power(n, o.d, pole);
    case fields::FieldKind::perturbed_hopf:
      if (!(o.eps >= 0.0 && o.eps < 1.0)) throw ConfigError("--eps must lie in [0, 1)");
      return fields::VectorFieldSpec::perturbed_hopf(n, o.eps, o.seed.value_or(0));
  }
  throw ConfigError("unknown field");
}

// ---------------------------------------------------------------- commands

namespace {

struct Context {
  Options eff;  // options with drawn seeds filled in
  RunRecord rec;
};

sphere::GridSpec grid_or(const Options& o, const sphere::GridSpec& fallback) {
  return o.grid ? sphere::GridSpec::from_json(*o.grid) : fallback;
}

void cmd_volume(Context& c) {
  auto& o = c.eff;
  fields::VectorFieldSpec fs = field_spec(o);
  const fields::VectorField probe_field(fs);
  sphere::GridSpec spec = grid_or(o, functionals::default_volume_grid(probe_field));
  if (spec.kind == sphere::GridKind::monte_carlo) {
    if (probe_field.has_singularities())
      throw ConfigError("monte-carlo refused for " + fields::to_string(fs.kind) +
                        ": the volume integrand is unbounded near the singular points (second moment "
                        "diverges); use a sliced grid");
    if (spec.count < 1) throw ConfigError("monte-carlo grid needs count >= 1");
    if (!spec.seed) {
      if (!o.seed) o.seed = draw_seed();
      spec.seed = o.seed;
    }
  }
  fs = field_spec(o);
  const fields::VectorField f(fs);
  const auto est = functionals::volume(f, spec);
  json res = est.to_json();
  const int n = f.n();
  if (fs.kind == fields::FieldKind::hopf) res["reference_normalized"] = std::pow(2.0, n);
  if (fs.kind == fields::FieldKind::radial)
    res["reference_normalized"] = bounds::radial_normalized_exact(n).convert_to<double>();
  c.rec.results = res;
  c.rec.grids.push_back(est.grid);
  if (est.seed) c.rec.seeds.push_back(*est.seed);
}

void cmd_euler_scan(Context& c) {
  const auto& o = c.eff;
  const fields::VectorField f(field_spec(o));
  // radial and power scan about their own pole, hopf-type fields about --pole
  const sphere::SpherePoint pole =
      !f.spec().pole.empty() ? sphere::SpherePoint(f.spec().pole)
      : o.pole              ? unit_point(*o.pole, f.ambient_dim(), "--pole")
                            : sphere::SpherePoint(fields::default_pole(f.n()));
  const std::vector<double> thetas = o.thetas.value_or(std::vector<double>{-1.2, -0.8, -0.4, 0.0, 0.4, 0.8, 1.2});
  const auto spec = grid_or(o, functionals::default_parallel_grid(f.n()));
  if (spec.kind != sphere::GridKind::parallel) throw ConfigError("euler-scan needs a parallel grid");
  const auto scan = functionals::stokes_scan(f, pole, thetas, spec);
  json res = scan.to_json();
  res["field"] = f.spec().to_json();
  c.rec.results = res;
  c.rec.grids.push_back(spec.to_json());
}

void cmd_index(Context& c) {
  const auto& o = c.eff;
  const fields::VectorField f(field_spec(o));
  sphere::SpherePoint p = f.has_singularities() ? f.singular_points().front()
                                                 : sphere::SpherePoint(fields::default_pole(f.n()));
  if (o.point) p = unit_point(*o.point, f.ambient_dim(), "--point");
  const auto spec = grid_or(o, topology::default_degree_grid(2 * f.n()));
  const auto rep = topology::field_index(f, p, o.radius, spec);
  json res = rep.to_json();
  res["field"] = f.spec().to_json();
  res["accepted"] = rep.residual <= topology::kIndexResidualTolerance;
  c.rec.results = res;
  c.rec.grids.push_back(rep.grid);
  if (rep.residual > topology::kIndexResidualTolerance) c.rec.exit_code = kNumericFailure;
}

void cmd_bounds(Context& c) {
  const auto& o = c.eff;
  const int n = single_n(o);
  std::vector<int> indices = o.indices;
  std::optional<functionals::VolumeEstimate> computed;
  json certified = nullptr;
  if (o.field) {
    const fields::VectorField f(field_spec(o));
    if (indices.empty() && f.has_singularities()) {
      certified = json::array();
      for (const auto& s : f.singular_points()) {
        const auto rep = topology::field_index(f, s, 0.1, topology::default_degree_grid(2 * n));
        if (rep.residual > topology::kIndexResidualTolerance)
          throw NumericError("bounds: index certification failed (residual " + fmt(rep.residual) + ")");
        indices.push_back(rep.index);
        certified.push_back(rep.to_json());
      }
    }
    computed = functionals::volume(f, grid_or(o, functionals::default_volume_grid(f)));
    c.rec.grids.push_back(computed->grid);
  }
  json res = bounds::bound_report(n, indices, computed).to_json();
  res["certified_indices"] = certified;
  c.rec.results = res;
}

void cmd_chain_table(Context& c) {
  json rows = json::array();
  for (const auto& r : bounds::chain_table(c.eff.n)) rows.push_back(r.to_json());
  c.rec.results = {{"rows", rows}};
}

void cmd_verify_lemma(Context& c) {
  const int n = single_n(c.eff);
  const auto rep = pfaffian::verify_lemma(n);
  json res = pfaffian::to_json(rep);
  // fault injection: +1 on the first tuple of the closed representative
  const auto& first = rep.lemma.form.coefficients().begin()->first;
  const auto bad = pfaffian::compare(n, rep.euler, pfaffian::perturb(rep.lemma, first));
  json loc = json::array();
  for (const auto& d : bad.nonzero) loc.push_back(pfaffian::tuple_name(d.tuple));
  res["self_test"] = {{"perturbed_tuple", pfaffian::tuple_name(first)},
                      {"reported_tuples", loc},
                      {"localized", bad.nonzero.size() == 1 && bad.nonzero[0].tuple == first}};
  res["text"] = pfaffian::to_text(rep);
  c.rec.results = res;
  if (!rep.verified) c.rec.exit_code = kNumericFailure;
}

void cmd_probe_lemma(Context& c) {
  auto& o = c.eff;
  const int n = single_n(o);
  if (!o.seed) o.seed = draw_seed();
  c.rec.results = matrixkit::probe_lemma(n, o.trials, *o.seed).to_json();
  c.rec.seeds.push_back(*o.seed);
}

void cmd_convergence(Context& c) {
  auto& o = c.eff;
  if (o.levels < 1) throw ConfigError("--levels must be >= 1");
  const fields::VectorField f(field_spec(o));
  const auto finest = grid_or(o, functionals::default_volume_grid(f));
  if (finest.kind == sphere::GridKind::monte_carlo) throw ConfigError("convergence needs a deterministic grid");
  std::vector<sphere::GridSpec> specs{finest};
  for (int i = 1; i < o.levels; ++i) specs.insert(specs.begin(), specs.front().halved());
  json rows = json::array();
  double prev = std::nan("");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto grid = sphere::make_grid(2 * f.n() + 1, specs[i],
                                        specs[i].kind == sphere::GridKind::sliced && f.has_singularities()
                                            ? std::optional(f.singular_points().front())
                                            : std::optional(sphere::SpherePoint(fields::default_pole(f.n()))));
    const double v = functionals::integrate_volume(f, specs[i]);
    rows.push_back({{"level", i},
                    {"grid", specs[i].to_json()},
                    {"nodes", grid.size()},
                    {"value", v},
                    {"normalized", v / sphere::sphere_volume(2 * f.n() + 1)},
                    {"delta", std::isnan(prev) ? json(nullptr) : json(std::abs(v - prev))}});
    prev = v;
    c.rec.grids.push_back(specs[i].to_json());
  }
  c.rec.results = {{"field", f.spec().to_json()}, {"levels", rows}};
}

}  // namespace

RunRecord execute(const Options& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  Context c;
  c.eff = opts;
  c.rec.command = opts.command;
  c.rec.version = PUNCVOL_VERSION;
  c.rec.timestamp = now_utc();
  if (opts.format != "json" && opts.format != "csv") throw ConfigError("--format must be json or csv");
  if (opts.command == "volume") cmd_volume(c);
  else if (opts.command == "euler-scan") cmd_euler_scan(c);
  else if (opts.command == "index") cmd_index(c);
  else if (opts.command == "bounds") cmd_bounds(c);
  else if (opts.command == "chain-table") cmd_chain_table(c);
  else if (opts.command == "verify-lemma") cmd_verify_lemma(c);
  else if (opts.command == "probe-lemma") cmd_probe_lemma(c);
  else if (opts.command == "convergence") cmd_convergence(c);
  else throw ConfigError("unknown command '" + opts.command + "'");
  c.rec.config = c.eff.to_json();
  c.rec.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c.rec;
}

// ---------------------------------------------------------------- output

std::string to_csv(const RunRecord& r) {
  std::ostringstream os;
  const json& res = r.results;
  const auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  if (r.command == "volume") {
    os << "value,error,normalized,nodes\n"
       << fmt(res["value"]) << ',' << fmt(res["error"]) << ',' << fmt(res["normalized"]) << ','
       << res["nodes"].get<std::size_t>() << '\n';
  } else if (r.command == "euler-scan") {
    os << "theta,flux\n";
    for (std::size_t i = 0; i < res["thetas"].size(); ++i)
      os << fmt(res["thetas"][i]) << ',' << fmt(res["fluxes"][i]) << '\n';
  } else if (r.command == "index") {
    os << "radius,raw_degree,index,residual\n"
       << fmt(res["radius"]) << ',' << fmt(res["raw_degree"]) << ',' << res["index"].get<int>() << ','
       << fmt(res["residual"]) << '\n';
  } else if (r.command == "bounds") {
    os << "name,value,normalized,satisfied\n";
    for (const auto& b : res["bounds"])
      os << b["name"].get<std::string>() << ',' << fmt(b["value"]) << ',' << fmt(b["normalized"]) << ','
         << (b["satisfied"].is_null() ? "" : (b["satisfied"].get<bool>() ? "true" : "false")) << '\n';
  } else if (r.command == "chain-table") {
    os << "n,volM,radial,pedersen,hopf,bcn_a\n";
    for (const auto& row : res["rows"])
      os << row["n"].get<int>() << ',' << fmt(row["volM"]) << ',' << fmt(row["radial"]) << ','
         << fmt(row["pedersen"]) << ',' << fmt(row["hopf"]) << ',' << fmt(row["bcn_a"]) << '\n';
  } else if (r.command == "verify-lemma") {
    os << "tuple,euler,lemma\n";
    for (const auto& row : res["coefficients"])
      os << row["tuple"].get<std::string>() << ',' << quote(row["euler"].get<std::string>()) << ','
         << quote(row["lemma"].get<std::string>()) << '\n';
  } else if (r.command == "probe-lemma") {
    os << "form,violations,trials\n"
       << "abs," << res["abs_form"]["violations"].get<std::size_t>() << ',' << res["trials"].get<std::size_t>() << '\n'
       << "angle," << res["angle_form"]["violations"].get<std::size_t>() << ',' << res["trials"].get<std::size_t>()
       << '\n';
  } else if (r.command == "convergence") {
    os << "level,nodes,value,delta\n";
    for (const auto& row : res["levels"])
      os << row["level"].get<std::size_t>() << ',' << row["nodes"].get<std::size_t>() << ',' << fmt(row["value"])
         << ',' << (row["delta"].is_null() ? "" : fmt(row["delta"])) << '\n';
  } else {
    throw ConfigError("no CSV rendering for '" + r.command + "'");
  }
  return os.str();
}

void write_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + tmp.string() + "'");
    f << contents;
    f.flush();
    if (!f) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot rename onto '" + path + "': " + ec.message());
  }
}

namespace {

template <class T>
std::vector<T> parse_csv(const std::string& s, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, int>) out.push_back(std::stoi(item, &used));
      else out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": cannot parse '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Volume, Euler-form flux and index toolkit for unit vector fields on odd spheres", "puncvol"};
  app.set_version_flag("--version", std::string(PUNCVOL_VERSION));
  app.require_subcommand(1);

  std::string n_s = "1", pole_s, thetas_s, point_s, indices_s, grid_s, field_s, format = "json", out_path;
  int d = 1, levels = 4;
  double eps = 0.2, radius = 0.1;
  std::uint64_t seed = 0;
  std::size_t trials = 1000000;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"volume", "volume of a catalog field by quadrature"},
      {"euler-scan", "Euler-form flux through parallels, with pole limits"},
      {"index", "Poincare index at a point via the Kronecker integral"},
      {"bounds", "closed-form lower bounds, optionally against a computed volume"},
      {"chain-table", "normalized closed-form volumes per n"},
      {"verify-lemma", "exact Pfaffian check of the closed Euler representative"},
      {"probe-lemma", "seeded search for pointwise inequality violations"},
      {"convergence", "volume estimates over successive grid refinements"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, desc] : commands) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("--n", n_s, "sphere parameter (chain-table: comma list)");
    s->add_option("--field", field_s, "hopf | radial | power | perturbed-hopf");
    s->add_option("--pole", pole_s, "pole as comma list of 2n+2 coordinates");
    s->add_option("--d", d, "power-field exponent");
    s->add_option("--eps", eps, "perturbed-hopf amplitude");
    s->add_option("--seed", seed, "64-bit seed");
    s->add_option("--grid", grid_s, "grid spec as JSON");
    s->add_option("--thetas", thetas_s, "latitudes, comma list");
    s->add_option("--point", point_s, "point as comma list");
    s->add_option("--radius", radius, "geodesic radius for index");
    s->add_option("--indices", indices_s, "index list, comma separated");
    s->add_option("--trials", trials, "probe trials");
    s->add_option("--levels", levels, "refinement levels for convergence");
    s->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--out", out_path, "output path (atomic write)");
    subs.push_back(s);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  Options o;
  for (auto* s : subs)
    if (s->parsed()) {
      o.command = s->get_name();
      try {
        o.n = parse_csv<int>(n_s, "--n");
        if (o.n.empty()) throw ConfigError("--n: empty list");
        if (s->count("--field")) o.field = field_s;
        if (s->count("--pole")) o.pole = parse_csv<double>(pole_s, "--pole");
        if (s->count("--point")) o.point = parse_csv<double>(point_s, "--point");
        if (s->count("--thetas")) o.thetas = parse_csv<double>(thetas_s, "--thetas");
        if (s->count("--indices")) o.indices = parse_csv<int>(indices_s, "--indices");
        if (s->count("--seed")) o.seed = seed;
        if (s->count("--grid")) {
          try {
            o.grid = json::parse(grid_s);
          } catch (const json::exception& e) {
            throw ConfigError(std::string("--grid: invalid JSON: ") + e.what());
          }
        }
        if (s->count("--out")) o.out = out_path;
      } catch (const ConfigError& e) {
        err << "puncvol: " << e.what() << '\n';
        return kConfigError;
      }
    }
  o.d = d;
  o.eps = eps;
  o.radius = radius;
  o.trials = trials;
  o.levels = levels;
  o.format = format;

  try {
    const RunRecord rec = execute(o);
    const std::string body = o.format == "csv" ? to_csv(rec) : rec.to_json().dump(2) + "\n";
    if (o.out) write_atomic(*o.out, body);
    else out << body;
    return rec.exit_code;
  } catch (const ConfigError& e) {
    err << "puncvol: configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "puncvol: configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ResourceError& e) {
    err << "puncvol: configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "puncvol: numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }
}

}  // namespace puncvol::cli
