// osclab: command-line driver for the BMO, Korn, material and
// uniqueness experiments.

#include "osclab/bmo.hpp"
#include "osclab/config.hpp"
#include "osclab/csv.hpp"
#include "osclab/error.hpp"
#include "osclab/field_io.hpp"
#include "osclab/kinematics.hpp"
#include "osclab/korn.hpp"
#include "osclab/material.hpp"
#include "osclab/parallel.hpp"
#include "osclab/uniqueness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>

namespace fs = std::filesystem;
using namespace osclab;

namespace {

enum Exit { kOk = 0, kConfig = 2, kInput = 3, kGate = 4, kNumerical = 5 };

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  unsigned threads = 1;
};

fs::path out_path(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  return fs::path(c.out) / name;
}

void emit(const Common& c, const CsvTable& table, const std::string& name) {
  table.write(out_path(c, name).string());
}

// bmo ----------------------------------------------------------------

struct BmoArgs {
  std::string field;
  std::string mask;
  std::string family = "all";
  double q = 1.0;
  std::string report = "csv";
};

int cmd_bmo(const Common& c, const BmoArgs& a) {
  std::shared_ptr<const Grid> mask;
  if (!a.mask.empty()) mask = read_mask(a.mask);
  const Field f = read_field(a.field, mask);
  if (f.placement() != Placement::Cell) throw FileFormatError(a.field + ": BMO needs a cell field");
  CubeFamily fam;
  fam.kind = parse_family(a.family);
  const SeminormReport r = bmo_seminorm(f, fam, a.q);

  const std::string name = fs::path(a.field).filename().string();
  if (a.report == "json") {
    Json j = {{"field", name},
              {"family", to_string(r.family.kind)},
              {"q", r.q},
              {"value", format_number(r.value)},
              {"anchor", {r.argmax.anchor[0], r.argmax.anchor[1], r.argmax.anchor[2]}},
              {"side", r.argmax.side},
              {"cubes", r.cube_count}};
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    std::ofstream(out_path(c, "bmo_report.json"), std::ios::binary) << text;
    return kOk;
  }
  CsvTable t({"field", "family", "q", "value", "anchor0", "anchor1", "anchor2", "side", "cubes"});
  t.row() << name << to_string(r.family.kind) << r.q << r.value << r.argmax.anchor[0] << r.argmax.anchor[1]
          << r.argmax.anchor[2] << r.argmax.side << r.cube_count;
  std::cout << t.str();
  emit(c, t, "bmo_report.csv");
  return kOk;
}

// korn ---------------------------------------------------------------

int cmd_korn(const Common& c) {
  KornConfig k = parse_korn_config(load_json(c.config));
  if (c.seed) k.search.seed = *c.seed;

  CsvTable rows({"mode", "domain", "resolution", "family", "ratio", "seed", "trial", "generator", "degenerate",
                 "evaluations", "field"});
  CsvTable trace({"mode", "domain", "generator", "evaluation", "ratio"});
  const std::string family = to_string(k.search.family.kind);

  for (const auto& d : k.domains)
    for (KornMode mode : k.modes)
      for (Generator g : k.generators) {
        SearchOptions o = k.search;
        o.mode = mode;
        o.generator = g;
        const SearchResult r = korn_search(d, o);
        const double ratio = r.best.degenerate ? std::numeric_limits<double>::quiet_NaN() : r.best.ratio;
        rows.row() << r.best.mode_label() << d.label() << d.resolution << (mode == KornMode::Bmo ? family : "-")
                   << ratio << o.seed << r.best_trial << to_string(g) << r.best.degenerate << r.evaluations
                   << r.best.field;
        for (const auto& p : r.trace)
          trace.row() << r.best.mode_label() << d.label() << to_string(g) << p.evaluation << p.ratio;
        std::cerr << r.best.mode_label() << " " << d.label() << " " << to_string(g) << ": " << format_number(ratio)
                  << "\n";
      }

  for (const auto& path : k.fields) {
    const Field w = read_field(path);
    if (w.placement() != Placement::Node || w.shape() != Shape::Vector)
      throw FileFormatError(path + ": Korn ratios need a node displacement field");
    const std::string label = "file:" + fs::path(path).filename().string();
    for (KornMode mode : k.modes) {
      const KornReport r = mode == KornMode::Bmo ? korn_ratio_bmo(w, k.search.family) : korn_ratio_lp(w, k.search.p);
      const double ratio = r.degenerate ? std::numeric_limits<double>::quiet_NaN() : r.ratio;
      rows.row() << r.mode_label() << label << w.grid().cells()[0] << (mode == KornMode::Bmo ? family : "-") << ratio
                 << k.search.seed << 0 << "-" << r.degenerate << 1
                 << (r.counterexample_candidate ? "counterexample candidate" : "");
    }
  }
  std::cout << rows.str();
  emit(c, rows, "korn.csv");
  emit(c, trace, "korn_trace.csv");
  return kOk;
}

// material -----------------------------------------------------------

Matrix random_rotation(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

Matrix spd_sqrt(const Matrix& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

int cmd_material(const Common& c) {
  MaterialConfig m = parse_material_config(load_json(c.config));
  if (c.seed) m.seed = *c.seed;
  auto model = make_material(m.model, {m.lambda}, {m.mu});
  const int n = m.dim;

  std::mt19937_64 rng(m.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_matrix = [&] {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
    return a;
  };
  double stress = 0.0, tensor = 0.0, symmetry = 0.0, spatial = 0.0;
  std::size_t rejected = 0;
  std::vector<StrainSample> samples;
  for (std::size_t s = 0; s < m.samples; ++s) {
    const Matrix cm = sample_spd(rng, n, m.box, rejected);
    const DerivativeCheck d = derivative_check(*model, 0, cm, random_matrix(), random_matrix());
    stress = std::max(stress, d.stress_error);
    tensor = std::max(tensor, d.tensor_error);
    symmetry = std::max(symmetry, d.symmetry_error);
    const Matrix f = random_rotation(rng, n) * spd_sqrt(cm);
    spatial = std::max(spatial, spatial_tensor_quadratic(*model, 0, f, random_matrix()).relative_gap);
    samples.push_back({0, cm});
  }
  const double beta = positivity_margin(*model, samples);
  const StrainSample at_identity{0, identity(n)};
  const double beta_identity = positivity_margin(*model, std::span(&at_identity, 1));
  const TaylorConstants tc = taylor_constants(*model, n, m.box, m.taylor_trials, m.seed);

  CsvTable t({"model", "check", "value", "threshold", "pass"});
  bool ok = true;
  auto check = [&](const std::string& name, double v, double thr, bool pass) {
    ok = ok && pass;
    t.row() << m.model << name << v << thr << pass;
  };
  check("stress_fd_max_error", stress, m.rtol, stress <= m.rtol);
  check("tensor_fd_max_error", tensor, m.rtol, tensor <= m.rtol);
  check("major_symmetry_max_error", symmetry, 1e-12, symmetry <= 1e-12);
  check("spatial_identity_max_relative_gap", spatial, m.spatial_rtol, spatial <= m.spatial_rtol);
  check("beta_samples", beta, 0.0, beta > 0.0);
  check("beta_identity", beta_identity, 0.0, beta_identity > 0.0);
  check("taylor_c", tc.c, 0.0, std::isfinite(tc.c));
  check("taylor_c_hat", tc.c_hat, 0.0, std::isfinite(tc.c_hat));
  check("taylor_accepted", static_cast<double>(tc.accepted), 0.0, true);
  check("taylor_rejected", static_cast<double>(tc.rejected), 0.0, true);
  std::cout << t.str();
  emit(c, t, "material.csv");
  return ok ? kOk : kNumerical;
}

// uniqueness ---------------------------------------------------------

int cmd_uniqueness(const Common& c) {
  UniquenessConfig u = parse_uniqueness_config(load_json(c.config));
  if (c.seed) u.experiment.seed = *c.seed;
  EnergyProblem problem = build_problem(u.problem);

  const SolveResult sol = solve_equilibrium(problem, problem.dirichlet, u.solver);
  write_field(out_path(c, "u_e.olf").string(), sol.u);
  std::cerr << "equilibrium: residual " << format_number(sol.residual) << " after " << sol.iterations
            << " iterations\n";

  const UniquenessResult r = uniqueness_experiment(problem, sol.u, u.experiment);
  const auto& g = r.gates;
  CsvTable gates({"gate", "value", "threshold", "pass"});
  gates.row() << "equilibrium_residual" << g.residual << u.experiment.tol << g.residual_ok;
  gates.row() << "positivity_beta" << g.beta << 0.0 << g.positivity_ok;
  gates.row() << "tension_min_principal" << g.min_principal
              << -u.experiment.tension_tol * problem.material->modulus_scale() << g.tension_ok;
  gates.row() << "min_jacobian" << g.min_jacobian << problem.epsilon << g.jacobian_ok;
  gates.row() << "sup_strain" << g.sup_strain << problem.cap << g.cap_ok;
  gates.row() << "inverse_cap" << 1.0 / problem.cap << problem.epsilon << g.cap_epsilon_ok;
  emit(c, gates, "uniqueness_gates.csv");
  if (!g.all()) {
    std::cout << gates.str();
    for (const auto& f : g.failures()) std::cerr << "hypothesis gate failed: " << f << "\n";
    return kGate;
  }

  CsvTable summary({"delta", "competitors", "admissible", "rejected", "holds", "hold_rate", "near_equilibrium",
                    "contradictions", "k", "worst_gap"});
  CsvTable ledger({"delta", "trial", "scale", "distance", "admissible", "rejection", "energy_gap", "k_term",
                   "stress_term", "gap", "tolerance", "holds", "residual", "near_equilibrium", "reverse_holds",
                   "contradiction", "positivity_applicable", "positivity_pass", "positivity_margin"});
  std::optional<double> delta_star;
  bool all_hold = true;
  for (const auto& rep : r.reports) {
    std::size_t contradictions = 0;
    for (const auto& e : rep.ledger) {
      if (e.contradiction) ++contradictions;
      ledger.row() << rep.delta << e.trial << e.scale << e.distance << e.admissible << e.rejection << e.energy_gap
                   << e.k_term << e.stress_term << e.gap << e.tolerance << e.holds << e.residual << e.near_equilibrium
                   << e.reverse_holds << e.contradiction << e.positivity.applicable << e.positivity.pass
                   << e.positivity.margin;
    }
    summary.row() << rep.delta << rep.competitors << rep.admissible << rep.rejected << rep.holds << rep.hold_rate()
                  << rep.near_equilibrium << contradictions << rep.k << rep.worst_gap;
    all_hold = all_hold && rep.holds == rep.admissible;
    if (all_hold) delta_star = rep.delta;
  }
  std::cout << summary.str();
  if (delta_star) std::cerr << "empirical delta*: " << format_number(*delta_star) << "\n";
  emit(c, summary, "uniqueness_summary.csv");
  emit(c, ledger, "uniqueness_ledger.csv");
  if (r.worst_competitor) write_field(out_path(c, "worst_competitor.olf").string(), *r.worst_competitor);
  return kOk;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const FileFormatError& e) {
    std::cerr << "input file error: " << e.what() << "\n";
    return kInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const InadmissibleError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

void add_common(CLI::App* sub, Common& c, bool needs_config) {
  auto* opt = sub->add_option("--config", c.config, "JSON configuration file");
  if (needs_config) opt->required();
  sub->add_option("--seed", c.seed, "master seed (overrides the config)");
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--threads", c.threads, "worker threads, 0 = hardware count")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osclab: oscillation, Korn and energy-gap experiments"};
  app.require_subcommand(1);

  Common common;
  BmoArgs bmo;
  auto* s_bmo = app.add_subcommand("bmo", "BMO seminorm of a cell field file");
  s_bmo->add_option("field", bmo.field, "OLF1 cell field")->required();
  s_bmo->add_option("--mask", bmo.mask, "OLM1 mask for the field's grid");
  s_bmo->add_option("--family", bmo.family, "all, dyadic or shifted-dyadic")
      ->check(CLI::IsMember({"all", "dyadic", "shifted-dyadic"}))
      ->capture_default_str();
  s_bmo->add_option("--q", bmo.q, "oscillation exponent, q >= 1")->capture_default_str();
  s_bmo->add_option("--report", bmo.report, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_common(s_bmo, common, false);

  auto* s_korn = app.add_subcommand("korn", "Korn ratio search");
  add_common(s_korn, common, true);
  auto* s_mat = app.add_subcommand("material", "constitutive checks and positivity");
  add_common(s_mat, common, true);
  auto* s_uni = app.add_subcommand("uniqueness", "energy-gap experiment around an equilibrium");
  add_common(s_uni, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  set_thread_count(common.threads);
  if (*s_bmo) return guarded([&] { return cmd_bmo(common, bmo); });
  if (*s_korn) return guarded([&] { return cmd_korn(common); });
  if (*s_mat) return guarded([&] { return cmd_material(common); });
  return guarded([&] { return cmd_uniqueness(common); });
}
