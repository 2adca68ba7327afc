#pragma once

#include "osclab/energy.hpp"
#include "osclab/korn.hpp"
#include "osclab/material.hpp"
#include "osclab/uniqueness.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace osclab {

using Json = nlohmann::json;

/// Reads and parses a JSON file; ConfigError on I/O or syntax errors.
Json load_json(const std::string& path);

/// View of one JSON object that remembers which keys were read.
/// finish() throws ConfigError naming any key never asked for.
class ConfigObject {
 public:
  ConfigObject(const Json& j, std::string where);

  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  long long integer(const std::string& key, long long fallback);
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback);
  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback);
  ConfigObject object(const std::string& key);

  void finish() const;
  const std::string& where() const { return where_; }

 private:
  const Json& get(const std::string& key);
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

  const Json& json_;
  std::string where_;
  std::set<std::string> seen_;
};

/// Dirichlet data by tag: "identity", "scale:a", "diag:a,b[,c]",
/// "rotation:theta" (radians, about the last axis in 3-D). Maps are
/// applied to node positions.
std::function<Vector(const Point3&)> parse_dirichlet(const std::string& tag, int dim);

/// Bounding-box faces by name: "x-", "x+", "y-", "y+", "z-", "z+".
struct BoxFace {
  int axis = 0;
  int side = 0;
};
BoxFace parse_box_face(const std::string& name, int dim);

/// Parameter given as a number or as an OLF1 cell scalar field path.
struct ParameterSource {
  double value = 1.0;
  std::string path;
};

struct ProblemConfig {
  Domain domain;
  std::string model = "svk";
  ParameterSource lambda;
  ParameterSource mu;
  std::string dirichlet = "identity";
  std::vector<std::string> traction_faces;
  std::vector<double> traction;  ///< constant traction on those faces
  std::vector<double> body_force;
  double epsilon = 0.5;
  double cap = 4.0;
};

ProblemConfig parse_problem(ConfigObject& obj);
EnergyProblem build_problem(const ProblemConfig& config);

struct UniquenessConfig {
  ProblemConfig problem;
  UniquenessOptions experiment;
  SolverOptions solver;
};

UniquenessConfig parse_uniqueness_config(const Json& j);

struct KornConfig {
  std::vector<Domain> domains;
  std::vector<KornMode> modes{KornMode::Bmo, KornMode::Lp};
  std::vector<Generator> generators{Generator::Fourier};
  SearchOptions search;
  std::vector<std::string> fields;  ///< OLF1 node displacement files evaluated directly
};

KornConfig parse_korn_config(const Json& j);

struct MaterialConfig {
  std::string model = "svk";
  double lambda = 1.0;
  double mu = 1.0;
  int dim = 2;
  std::size_t samples = 100;
  std::size_t taylor_trials = 1000;
  std::uint64_t seed = 1;
  SpdBox box;
  double rtol = 1e-6;
  double spatial_rtol = 1e-5;
};

MaterialConfig parse_material_config(const Json& j);

}  // namespace osclab
