#include "osclab/config.hpp"

#include "osclab/error.hpp"
#include "osclab/field_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace osclab {

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ConfigObject::ConfigObject(const Json& j, std::string where) : json_(j), where_(std::move(where)) {
  if (!json_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
}

void ConfigObject::fail(const std::string& key, const std::string& what) const {
  throw ConfigError(where_ + "." + key + ": " + what);
}

bool ConfigObject::has(const std::string& key) const { return json_.contains(key); }

const Json& ConfigObject::get(const std::string& key) {
  seen_.insert(key);
  if (!json_.contains(key)) fail(key, "missing");
  return json_.at(key);
}

const Json& ConfigObject::raw(const std::string& key) { return get(key); }

double ConfigObject::number(const std::string& key) {
  const Json& v = get(key);
  if (!v.is_number()) fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

double ConfigObject::number(const std::string& key, double fallback) {
  seen_.insert(key);
  return has(key) ? number(key) : fallback;
}

long long ConfigObject::integer(const std::string& key, long long fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const Json& v = get(key);
  if (!v.is_number_integer()) fail(key, "expected an integer");
  return v.get<long long>();
}

std::uint64_t ConfigObject::unsigned_integer(const std::string& key, std::uint64_t fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const Json& v = get(key);
  if (!v.is_number_unsigned()) fail(key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool ConfigObject::boolean(const std::string& key, bool fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const Json& v = get(key);
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string ConfigObject::string(const std::string& key) {
  const Json& v = get(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::string ConfigObject::string(const std::string& key, const std::string& fallback) {
  seen_.insert(key);
  return has(key) ? string(key) : fallback;
}

std::vector<double> ConfigObject::numbers(const std::string& key, std::vector<double> fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const Json& v = get(key);
  if (!v.is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) fail(key, "expected finite numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> ConfigObject::strings(const std::string& key, std::vector<std::string> fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const Json& v = get(key);
  if (!v.is_array()) fail(key, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) fail(key, "expected strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

ConfigObject ConfigObject::object(const std::string& key) { return ConfigObject(get(key), where_ + "." + key); }

void ConfigObject::finish() const {
  for (const auto& [key, value] : json_.items())
    if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
}

namespace {

std::vector<double> split_numbers(const std::string& text, const std::string& tag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in Dirichlet tag '" + tag + "'");
    }
  }
  return out;
}

}  // namespace

std::function<Vector(const Point3&)> parse_dirichlet(const std::string& tag, int dim) {
  const auto colon = tag.find(':');
  const std::string kind = tag.substr(0, colon);
  const std::vector<double> args =
      colon == std::string::npos ? std::vector<double>{} : split_numbers(tag.substr(colon + 1), tag);

  Matrix a = identity(dim);
  if (kind == "identity") {
    if (!args.empty()) throw ConfigError("Dirichlet tag 'identity' takes no arguments");
  } else if (kind == "scale") {
    if (args.size() != 1) throw ConfigError("Dirichlet tag 'scale' takes one number");
    a *= args[0];
  } else if (kind == "diag") {
    if (static_cast<int>(args.size()) != dim) throw ConfigError("Dirichlet tag 'diag' takes one number per axis");
    for (int i = 0; i < dim; ++i) a(i, i) = args[i];
  } else if (kind == "rotation") {
    if (args.size() != 1) throw ConfigError("Dirichlet tag 'rotation' takes one angle");
    const double c = std::cos(args[0]);
    const double s = std::sin(args[0]);
    a(0, 0) = c;
    a(0, 1) = -s;
    a(1, 0) = s;
    a(1, 1) = c;
  } else {
    throw ConfigError("unknown Dirichlet tag '" + tag + "'");
  }
  return [a, dim](const Point3& x) {
    Vector p(dim);
    for (int i = 0; i < dim; ++i) p(i) = x[i];
    return Vector(a * p);
  };
}

BoxFace parse_box_face(const std::string& name, int dim) {
  if (name.size() == 2 && name[0] >= 'x' && name[0] <= 'z' && (name[1] == '-' || name[1] == '+')) {
    const int axis = name[0] - 'x';
    if (axis < dim) return {axis, name[1] == '+' ? 1 : 0};
  }
  throw ConfigError("unknown boundary face '" + name + "'");
}

namespace {

Domain parse_domain(ConfigObject& obj, int dim, int resolution) {
  Domain d;
  d.dim = dim;
  d.resolution = resolution;
  d.kind = parse_domain_kind(obj.string("kind"));
  if (d.kind == DomainKind::RoomsAndPassages) {
    d.rooms = static_cast<int>(obj.integer("rooms", d.rooms));
    d.width = obj.number("width", d.width);
    d.passage_length = static_cast<int>(obj.integer("passage_length", d.passage_length));
  }
  obj.finish();
  try {
    d.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(obj.where() + ": " + e.what());
  }
  return d;
}

ParameterSource parse_parameter(ConfigObject& obj, const std::string& key, double fallback) {
  ParameterSource p;
  p.value = fallback;
  if (!obj.has(key)) {
    obj.number(key, fallback);
    return p;
  }
  const Json& v = obj.raw(key);
  if (v.is_string()) {
    p.path = v.get<std::string>();
  } else if (v.is_number() && std::isfinite(v.get<double>())) {
    p.value = v.get<double>();
  } else {
    throw ConfigError(obj.where() + "." + key + ": expected a number or a field file path");
  }
  return p;
}

std::vector<double> load_parameter(const ParameterSource& p, const std::shared_ptr<const Grid>& grid) {
  if (p.path.empty()) return {p.value};
  const Field f = read_field(p.path, grid);
  if (f.placement() != Placement::Cell || f.shape() != Shape::Scalar)
    throw FileFormatError(p.path + ": parameter fields must be cell scalars");
  return {f.values().begin(), f.values().end()};
}

}  // namespace

ProblemConfig parse_problem(ConfigObject& obj) {
  ProblemConfig c;
  const int dim = static_cast<int>(obj.integer("dim", 2));
  const int resolution = static_cast<int>(obj.integer("resolution", 16));
  if (dim != 2 && dim != 3) throw ConfigError(obj.where() + ".dim: must be 2 or 3");
  if (resolution < 2) throw ConfigError(obj.where() + ".resolution: must be at least 2");
  if (obj.has("domain")) {
    auto d = obj.object("domain");
    c.domain = parse_domain(d, dim, resolution);
  } else {
    c.domain.dim = dim;
    c.domain.resolution = resolution;
  }
  c.model = obj.string("model", c.model);
  if (c.model != "svk" && c.model != "neo-hookean") throw ConfigError(obj.where() + ".model: unknown model '" + c.model + "'");
  c.lambda = parse_parameter(obj, "lambda", 1.0);
  c.mu = parse_parameter(obj, "mu", 1.0);
  if (obj.has("bc")) {
    auto bc = obj.object("bc");
    c.dirichlet = bc.string("dirichlet", c.dirichlet);
    if (bc.has("traction")) {
      auto t = bc.object("traction");
      c.traction_faces = t.strings("faces", {});
      c.traction = t.numbers("value", std::vector<double>(dim, 0.0));
      t.finish();
      for (const auto& f : c.traction_faces) parse_box_face(f, dim);
      if (static_cast<int>(c.traction.size()) != dim) throw ConfigError(t.where() + ".value: needs one entry per axis");
    }
    bc.finish();
  }
  parse_dirichlet(c.dirichlet, dim);
  c.body_force = obj.numbers("b", std::vector<double>(dim, 0.0));
  if (static_cast<int>(c.body_force.size()) != dim) throw ConfigError(obj.where() + ".b: needs one entry per axis");
  c.epsilon = obj.number("epsilon", c.epsilon);
  c.cap = obj.number("X", c.cap);
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ConfigError(obj.where() + ".epsilon: must lie in (0, 1)");
  if (!(c.cap > 1.0)) throw ConfigError(obj.where() + ".X: must exceed 1");
  obj.finish();
  return c;
}

EnergyProblem build_problem(const ProblemConfig& config) {
  const int n = config.domain.dim;
  Grid base = generate_domain(config.domain);
  std::vector<BoxFace> faces;
  for (const auto& f : config.traction_faces) faces.push_back(parse_box_face(f, n));
  const Point3 lo = base.origin();
  Point3 hi = lo;
  for (int a = 0; a < n; ++a) hi[a] += base.cells()[a] * base.spacing();
  const double tol = 1e-9 * base.spacing();
  auto on_box_face = [&](const Face& f, const Point3& c) {
    for (const auto& b : faces)
      if (f.axis == b.axis && f.side == b.side && std::abs(c[b.axis] - (b.side ? hi[b.axis] : lo[b.axis])) < tol)
        return true;
    return false;
  };
  auto grid = std::make_shared<const Grid>(base.with_labels([&](const Face& f, const Point3& c) {
    return on_box_face(f, c) ? BoundaryLabel::Traction : BoundaryLabel::Dirichlet;
  }));
  if (!grid->has_dirichlet()) throw ConfigError("problem.bc: every face is a traction face; a Dirichlet part is required");

  auto material = make_material(config.model, load_parameter(config.lambda, grid), load_parameter(config.mu, grid));
  EnergyProblem p = EnergyProblem::make(grid, material, parse_dirichlet(config.dirichlet, n), config.epsilon, config.cap);
  Vector b(n);
  for (int i = 0; i < n; ++i) b(i) = config.body_force[i];
  for (std::size_t cell = 0; cell < grid->cell_count(); ++cell)
    if (grid->is_active(cell)) p.body_force.set_vector(cell, b);
  if (!faces.empty()) {
    Vector s(n);
    for (int i = 0; i < n; ++i) s(i) = config.traction[i];
    for (std::size_t f = 0; f < grid->boundary_faces().size(); ++f)
      if (grid->face_label(f) == BoundaryLabel::Traction) p.traction[f] = s;
  }
  p.validate();
  return p;
}

UniquenessConfig parse_uniqueness_config(const Json& j) {
  ConfigObject root(j, "config");
  UniquenessConfig c;
  auto problem = root.object("problem");
  c.problem = parse_problem(problem);
  if (root.has("experiment")) {
    auto e = root.object("experiment");
    auto& x = c.experiment;
    x.deltas = e.numbers("delta_grid", x.deltas);
    if (x.deltas.empty()) throw ConfigError(e.where() + ".delta_grid: must not be empty");
    for (double d : x.deltas)
      if (!(d > 0.0)) throw ConfigError(e.where() + ".delta_grid: entries must be positive");
    x.trials = static_cast<std::size_t>(e.unsigned_integer("trials", x.trials));
    x.seed = e.unsigned_integer("seed", x.seed);
    x.tol = e.number("tol", x.tol);
    x.tension_tol = e.number("tension_tol", x.tension_tol);
    x.inject_self = e.boolean("inject_self", x.inject_self);
    x.positivity_radius = e.number("positivity_radius", x.positivity_radius);
    x.cubes.kind = parse_family(e.string("family", to_string(x.cubes.kind)));
    if (e.has("perturbation")) {
      auto p = e.object("perturbation");
      x.family.modes = static_cast<int>(p.integer("modes", x.family.modes));
      x.family.decay = p.number("decay", x.family.decay);
      p.finish();
      if (x.family.modes < 1) throw ConfigError(p.where() + ".modes: must be at least 1");
    }
    c.solver.tol = x.tol;
    c.solver.max_iterations = static_cast<std::size_t>(e.unsigned_integer("max_iterations", c.solver.max_iterations));
    if (!(x.tol > 0.0)) throw ConfigError(e.where() + ".tol: must be positive");
    e.finish();
  }
  root.finish();
  return c;
}

namespace {

KornMode parse_mode(const std::string& s) {
  if (s == "bmo") return KornMode::Bmo;
  if (s == "lp") return KornMode::Lp;
  throw ConfigError("unknown Korn mode '" + s + "' (bmo or lp)");
}

}  // namespace

KornConfig parse_korn_config(const Json& j) {
  ConfigObject root(j, "config");
  KornConfig c;
  const int dim = static_cast<int>(root.integer("dim", 2));
  const int resolution = static_cast<int>(root.integer("resolution", 16));
  if (dim != 2 && dim != 3) throw ConfigError("config.dim: must be 2 or 3");
  if (resolution < 2) throw ConfigError("config.resolution: must be at least 2");
  if (root.has("domains")) {
    const Json& list = root.raw("domains");
    if (!list.is_array()) throw ConfigError("config.domains: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      ConfigObject d(list[i], "config.domains[" + std::to_string(i) + "]");
      c.domains.push_back(parse_domain(d, dim, resolution));
    }
  }
  c.modes.clear();
  for (const auto& m : root.strings("modes", {"bmo", "lp"})) c.modes.push_back(parse_mode(m));
  c.generators.clear();
  try {
    for (const auto& g : root.strings("generators", {"fourier"})) c.generators.push_back(parse_generator(g));
    c.search.family.kind = parse_family(root.string("family", "all"));
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.search.p = root.number("p", c.search.p);
  if (!(c.search.p >= 1.0)) throw ConfigError("config.p: must be at least 1");
  c.search.budget = static_cast<std::size_t>(root.unsigned_integer("budget", c.search.budget));
  if (c.search.budget < 1) throw ConfigError("config.budget: must be at least 1");
  c.search.seed = root.unsigned_integer("seed", c.search.seed);
  c.search.random_fraction = root.number("random_fraction", c.search.random_fraction);
  c.search.nodal_fraction = root.number("nodal_fraction", c.search.nodal_fraction);
  if (!(c.search.random_fraction > 0.0 && c.search.random_fraction <= 1.0))
    throw ConfigError("config.random_fraction: must lie in (0, 1]");
  if (!(c.search.nodal_fraction >= 0.0 && c.search.nodal_fraction < 1.0))
    throw ConfigError("config.nodal_fraction: must lie in [0, 1)");
  c.fields = root.strings("fields", {});
  root.finish();
  if (c.domains.empty() && c.fields.empty()) throw ConfigError("config: give at least one domain or field file");
  return c;
}

MaterialConfig parse_material_config(const Json& j) {
  ConfigObject root(j, "config");
  MaterialConfig c;
  c.model = root.string("model", c.model);
  if (c.model != "svk" && c.model != "neo-hookean") throw ConfigError("config.model: unknown model '" + c.model + "'");
  c.lambda = root.number("lambda", c.lambda);
  c.mu = root.number("mu", c.mu);
  c.dim = static_cast<int>(root.integer("dim", c.dim));
  if (c.dim != 2 && c.dim != 3) throw ConfigError("config.dim: must be 2 or 3");
  c.samples = static_cast<std::size_t>(root.unsigned_integer("samples", c.samples));
  c.taylor_trials = static_cast<std::size_t>(root.unsigned_integer("taylor_trials", c.taylor_trials));
  c.seed = root.unsigned_integer("seed", c.seed);
  if (root.has("box")) {
    auto b = root.object("box");
    c.box.lo = b.number("lo", c.box.lo);
    c.box.hi = b.number("hi", c.box.hi);
    b.finish();
    if (!(c.box.lo > 0.0 && c.box.hi > c.box.lo)) throw ConfigError("config.box: need 0 < lo < hi");
  }
  c.rtol = root.number("rtol", c.rtol);
  c.spatial_rtol = root.number("spatial_rtol", c.spatial_rtol);
  root.finish();
  return c;
}

}  // namespace osclab
