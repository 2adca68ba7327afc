#include "osclab/uniqueness.hpp"

#include "osclab/error.hpp"
#include "osclab/kinematics.hpp"
#include "osclab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace osclab {

Field random_perturbation(const EnergyProblem& problem, const PerturbationFamily& family, std::mt19937_64& rng) {
  const Grid& g = *problem.grid;
  const int n = g.dim();
  const int m = std::max(family.modes, 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::array<int, 3>> modes;
  for (int a = 1; a <= m; ++a)
    for (int b = 1; b <= m; ++b)
      for (int c = 1; c <= (n == 3 ? m : 1); ++c) modes.push_back({a, b, n == 3 ? c : 0});
  std::vector<double> coeff(modes.size() * n);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const double damp = std::pow(static_cast<double>(modes[k][0] + modes[k][1] + modes[k][2]), -family.decay);
    for (int i = 0; i < n; ++i) coeff[k * n + i] = damp * normal(rng);
  }

  Field p(problem.grid, Placement::Node, Shape::Vector);
  const auto free = free_nodes(problem);
  for (std::size_t node = 0; node < p.sites(); ++node) {
    if (!free[node]) continue;
    const auto x = g.node_position(node);
    std::array<double, 3> xi{};
    for (int a = 0; a < n; ++a) xi[a] = (x[a] - g.origin()[a]) / (g.cells()[a] * g.spacing());
    auto v = p.at(node);
    for (std::size_t k = 0; k < modes.size(); ++k) {
      double phi = 1.0;
      for (int a = 0; a < n; ++a) phi *= std::sin(std::numbers::pi * modes[k][a] * xi[a]);
      for (int i = 0; i < n; ++i) v[i] += coeff[k * n + i] * phi;
    }
  }
  return p;
}

std::vector<std::string> HypothesisGates::failures() const {
  std::vector<std::string> out;
  if (!residual_ok) out.emplace_back("equilibrium residual");
  if (!positivity_ok) out.emplace_back("elasticity tensor positivity");
  if (!tension_ok) out.emplace_back("tension");
  if (!jacobian_ok) out.emplace_back("jacobian above epsilon");
  if (!cap_ok) out.emplace_back("strain below cap X");
  if (!cap_epsilon_ok) out.emplace_back("1/X below epsilon");
  return out;
}

HypothesisGates check_hypotheses(const EnergyProblem& problem, const Field& u_e, const UniquenessOptions& options) {
  const Grid& g = *problem.grid;
  HypothesisGates gates;
  const Field f = gradient(u_e);
  gates.min_jacobian = min_jacobian(f);
  gates.jacobian_ok = gates.min_jacobian > problem.epsilon;
  gates.cap_epsilon_ok = 1.0 / problem.cap < problem.epsilon;
  if (!(gates.min_jacobian > 0.0)) return gates;

  gates.residual = equilibrium_residual(problem, u_e);
  gates.residual_ok = gates.residual < options.tol;

  std::vector<StrainSample> samples;
  gates.min_principal = std::numeric_limits<double>::infinity();
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    if (!g.is_active(cell)) continue;
    const Matrix F = f.matrix_at(cell);
    const Matrix C = F.transpose() * F;
    samples.push_back({cell, C});
    gates.sup_strain = std::max(gates.sup_strain, C.norm());
    gates.min_principal = std::min(gates.min_principal, principal_stresses(*problem.material, cell, F).values(0));
  }
  gates.beta = positivity_margin(*problem.material, samples);
  gates.k = gates.beta / 8.0;
  gates.positivity_ok = gates.beta > 0.0;
  gates.tension_ok = gates.min_principal >= -options.tension_tol * problem.material->modulus_scale();
  gates.cap_ok = gates.sup_strain < problem.cap;
  return gates;
}

CompetitorRecord evaluate_competitor(const EnergyProblem& problem, const Field& u_e, const Field& v, double k,
                                     double residual_e, double tol) {
  const Grid& g = *problem.grid;
  const Field fe = gradient(u_e);
  const Field fv = gradient(v);
  CompetitorRecord r;
  r.admissible = true;
  r.distance = 0.0;
  const double e_v = total_energy(problem, v);
  const double e_e = total_energy(problem, u_e);
  r.energy_gap = e_v - e_e;
  double k_sum = 0.0;
  double stress_sum = 0.0;
  double reverse_stress = 0.0;
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    if (!g.is_active(cell)) continue;
    const Matrix Fe = fe.matrix_at(cell);
    const Matrix Fv = fv.matrix_at(cell);
    const Matrix Ce = Fe.transpose() * Fe;
    const Matrix Cv = Fv.transpose() * Fv;
    const Matrix H = Fv - Fe;
    const Matrix dC = Cv - Ce;
    const Matrix HtH = H.transpose() * H;
    k_sum += contract(dC, dC);
    stress_sum += contract(second_pk(*problem.material, cell, Ce), HtH);
    reverse_stress += contract(second_pk(*problem.material, cell, Cv), HtH);
  }
  const double vol = g.cell_volume();
  r.k_term = k * k_sum * vol;
  r.stress_term = 0.5 * stress_sum * vol;
  r.gap = r.energy_gap - r.k_term - r.stress_term;
  const double scale = std::abs(e_v) + std::abs(e_e) + std::abs(r.k_term) + std::abs(r.stress_term);
  const Field w = axpy(v, -1.0, u_e);
  r.tolerance = 1e-10 * scale + 10.0 * residual_e * variation_norm(problem, w);
  r.holds = r.gap >= -r.tolerance;

  r.residual = equilibrium_residual(problem, v);
  r.near_equilibrium = r.residual < tol && variation_norm(problem, w) > 0.0;
  if (r.near_equilibrium) {
    const double reverse = -r.energy_gap - 0.5 * k * k_sum * vol - 0.5 * reverse_stress * vol;
    r.reverse_holds = reverse >= -r.tolerance;
    r.contradiction = r.holds && r.reverse_holds;
  }
  return r;
}

namespace {

struct Scaled {
  double scale = 0.0;
  double distance = 0.0;
  bool ok = false;
};

Scaled scale_to_band(const Field& u_e, const Field& p, double delta, const CubeFamily& cubes) {
  auto distance = [&](double t) { return strain_bmo_l1_distance(u_e, axpy(u_e, t, p), cubes); };
  Scaled s;
  const double d1 = distance(1.0);
  if (!(d1 > 0.0)) return s;
  double t = 0.95 * delta / d1;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 80; ++it) {
    const double d = distance(t);
    if (d > 0.9 * delta && d < delta) return {t, d, true};
    if (d >= delta) hi = t;
    else lo = t;
    t = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * t;
  }
  return s;
}

}  // namespace

UniquenessResult uniqueness_experiment(const EnergyProblem& problem, const Field& u_e,
                                       const UniquenessOptions& options) {
  problem.validate();
  UniquenessResult result;
  result.gates = check_hypotheses(problem, u_e, options);
  if (!result.gates.all()) return result;
  const double k = result.gates.k;
  const double residual_e = result.gates.residual;

  // Perturbation directions are shared across the delta grid.
  std::vector<Field> directions;
  directions.reserve(options.trials);
  for (std::size_t t = 0; t < options.trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(options.seed >> 32), static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    directions.push_back(random_perturbation(problem, options.family, rng));
  }

  double worst = std::numeric_limits<double>::infinity();
  for (double delta : options.deltas) {
    UniquenessReport report;
    report.delta = delta;
    report.k = k;
    std::vector<CompetitorRecord> records(options.trials);
    std::vector<std::optional<Field>> competitors(options.trials);
    parallel_chunks(options.trials, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t t = begin; t < end; ++t) {
        CompetitorRecord rec;
        const Scaled s = scale_to_band(u_e, directions[t], delta, options.cubes);
        if (!s.ok) {
          rec.rejection = "scaling";
        } else {
          Field v = axpy(u_e, s.scale, directions[t]);
          const Field fv = gradient(v);
          const double sup_c = sup_norm(cauchy_green_from_gradient(fv));
          const double det = min_jacobian(fv);
          if (!(sup_c < problem.cap)) {
            rec.rejection = "strain cap";
          } else if (!(det > 1.0 / problem.cap)) {
            rec.rejection = "jacobian floor";
          } else {
            rec = evaluate_competitor(problem, u_e, v, k, residual_e, options.tol);
            rec.positivity = perturbation_positivity_check(u_e, v, *problem.material, result.gates.beta,
                                                           options.positivity_radius);
            competitors[t] = std::move(v);
          }
        }
        rec.trial = t + 1;
        rec.scale = s.scale;
        rec.distance = s.distance;
        records[t] = std::move(rec);
      }
    });

    if (options.inject_self) {
      CompetitorRecord self = evaluate_competitor(problem, u_e, u_e, k, residual_e, options.tol);
      self.trial = 0;
      report.ledger.push_back(self);
    }
    for (auto& r : records) report.ledger.push_back(std::move(r));

    report.worst_gap = std::numeric_limits<double>::infinity();
    for (const auto& r : report.ledger) {
      ++report.competitors;
      if (!r.admissible) {
        ++report.rejected;
        continue;
      }
      ++report.admissible;
      if (r.holds) ++report.holds;
      if (r.near_equilibrium) ++report.near_equilibrium;
      report.worst_gap = std::min(report.worst_gap, r.gap);
    }
    for (std::size_t t = 0; t < options.trials; ++t)
      if (competitors[t]) {
        const double gap = report.ledger[t + (options.inject_self ? 1 : 0)].gap;
        if (gap < worst) {
          worst = gap;
          result.worst_competitor = competitors[t];
        }
      }
    result.reports.push_back(std::move(report));
  }
  return result;
}

}  // namespace osclab
