#pragma once

#include "osclab/energy.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace osclab {

/// Band-limited random displacements: products of sines over the grid's
/// bounding box with `modes` frequencies per axis and Gaussian
/// coefficients damped by (k1 + ... + kn)^-decay. Values on Dirichlet
/// nodes are zeroed afterwards.
struct PerturbationFamily {
  int modes = 4;
  double decay = 1.0;
};

Field random_perturbation(const EnergyProblem& problem, const PerturbationFamily& family, std::mt19937_64& rng);

struct UniquenessOptions {
  std::vector<double> deltas{0.05};
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  double tol = 1e-10;           ///< equilibrium residual tolerance
  double tension_tol = 1e-10;   ///< relative to the material modulus scale
  bool inject_self = false;     ///< add v = u_e as a competitor
  /// Strain distance below which the perturbed positivity bound is
  /// checked for each competitor (a user-set probe radius).
  double positivity_radius = 0.1;
  PerturbationFamily family;
  CubeFamily cubes = CubeFamily::all();
};

/// Hypotheses checked on u_e before any competitor is generated.
struct HypothesisGates {
  double residual = 0.0;
  double beta = 0.0;            ///< positivity margin over the C_e samples
  double k = 0.0;               ///< beta / 8
  double min_principal = 0.0;   ///< smallest principal stress over cells
  double min_jacobian = 0.0;
  double sup_strain = 0.0;      ///< ||C_e||_inf
  bool residual_ok = false;
  bool positivity_ok = false;
  bool tension_ok = false;
  bool jacobian_ok = false;
  bool cap_ok = false;          ///< ||C_e||_inf < X
  bool cap_epsilon_ok = false;  ///< 1/X < epsilon

  bool all() const {
    return residual_ok && positivity_ok && tension_ok && jacobian_ok && cap_ok && cap_epsilon_ok;
  }
  std::vector<std::string> failures() const;
};

HypothesisGates check_hypotheses(const EnergyProblem& problem, const Field& u_e, const UniquenessOptions& options);

/// One competitor v = u_e + t p.
struct CompetitorRecord {
  std::size_t trial = 0;
  double scale = 0.0;        ///< t
  double distance = 0.0;     ///< strain BMO + L^1 distance to u_e
  bool admissible = false;
  std::string rejection;     ///< empty when admissible
  double energy_gap = 0.0;   ///< E(v) - E(u_e)
  double k_term = 0.0;       ///< k sum |C_v - C_e|^2 h^n
  double stress_term = 0.0;  ///< 1/2 sum K(C_e) : H^T H h^n
  double gap = 0.0;          ///< energy_gap - k_term - stress_term
  double tolerance = 0.0;
  bool holds = false;
  double residual = 0.0;     ///< equilibrium residual of v
  bool near_equilibrium = false;
  /// For near-equilibrium v only: the reversed inequality with k/2 and
  /// K(C_v), and whether both inequalities hold at once.
  bool reverse_holds = false;
  bool contradiction = false;
  PositivityCheck positivity;  ///< sum E : C(C_v)[E] >= beta sum |E|^2
};

struct UniquenessReport {
  double delta = 0.0;
  std::size_t competitors = 0;
  std::size_t admissible = 0;
  std::size_t holds = 0;
  std::size_t rejected = 0;
  std::size_t near_equilibrium = 0;
  double k = 0.0;
  double worst_gap = 0.0;
  std::vector<CompetitorRecord> ledger;

  double hold_rate() const { return admissible == 0 ? 0.0 : static_cast<double>(holds) / admissible; }
};

struct UniquenessResult {
  HypothesisGates gates;
  std::vector<UniquenessReport> reports;  ///< empty when a gate failed
  std::optional<Field> worst_competitor;
};

/// Energy-gap test around an equilibrium u_e. For each delta and trial
/// a perturbation is scaled by bisection until the strain distance lies
/// in (0.9 delta, delta), screened by ||C_v||_inf < X and det grad v > 1/X,
/// and the gap E(v) - E(u_e) - k-term - stress-term is recorded.
UniquenessResult uniqueness_experiment(const EnergyProblem& problem, const Field& u_e,
                                       const UniquenessOptions& options);

/// The gap terms for a given competitor (no admissibility screening).
CompetitorRecord evaluate_competitor(const EnergyProblem& problem, const Field& u_e, const Field& v, double k,
                                     double residual_e, double tol);

}  // namespace osclab
