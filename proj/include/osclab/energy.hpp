#pragma once

#include "osclab/cubes.hpp"
#include "osclab/field.hpp"
#include "osclab/material.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace osclab {

/// Dead-load boundary value problem on a grid.
///
/// Deformations are node vector fields holding u itself (not u - id).
/// Quadrature is the cell midpoint rule: u at a cell center is the
/// average of the cell's nodes, u on a face the average of its nodes.
struct EnergyProblem {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const MaterialModel> material;
  Field body_force;             ///< cell vector field b
  std::vector<Vector> traction;  ///< one vector per grid boundary face; used on Traction faces
  Field dirichlet;              ///< node vector field; prescribes u on Dirichlet nodes
  double epsilon = 0.5;         ///< det grad u_e > epsilon
  double cap = 4.0;             ///< X: ||C||_inf < X, det grad v > 1/X

  /// Zero loads, Dirichlet data sampled from `boundary`.
  static EnergyProblem make(std::shared_ptr<const Grid> grid, std::shared_ptr<const MaterialModel> material,
                            const std::function<Vector(const Point3&)>& boundary, double epsilon = 0.5,
                            double cap = 4.0);

  /// Throws ParameterError when the problem violates its invariants
  /// (no Dirichlet face, epsilon outside (0, 1), cap <= 1, ...).
  void validate() const;
};

/// Nodes whose values are free unknowns: active and not on a Dirichlet face.
std::vector<std::uint8_t> free_nodes(const EnergyProblem& problem);

/// Throws InadmissibleError unless u equals the Dirichlet data on
/// Dirichlet nodes.
void require_dirichlet(const EnergyProblem& problem, const Field& u);
/// Throws ParameterError unless w vanishes on Dirichlet nodes.
void require_variation(const EnergyProblem& problem, const Field& w);

/// sum_cells [sigma(C_u) - b . u] h^n - sum_traction s . u h^(n-1).
/// Throws InadmissibleError for det grad u <= 0 or Dirichlet mismatch.
double total_energy(const EnergyProblem& problem, const Field& u);

/// Derivative of total_energy with respect to every nodal value, as a
/// node vector field (Dirichlet and inactive nodes included).
Field energy_gradient(const EnergyProblem& problem, const Field& u);

/// sum D sigma(C_u) : (F^T G + G^T F) h^n - loads applied to w.
double first_variation(const EnergyProblem& problem, const Field& u, const Field& w);

/// sum [K(C_u) : G^T G + 1/4 (F^T G + G^T F) : C(C_u)[F^T G + G^T F]] h^n.
double second_variation(const EnergyProblem& problem, const Field& u, const Field& w);

/// sum (G^T G) : L h^n for a cell field L of positive semidefinite
/// symmetric matrices. Throws ParameterError if some L is not psd.
double psd_quadratic_check(const Field& l, const Field& w);

/// max over free nodal basis functions e of |first_variation(u, e)| / ||e||,
/// with ||e|| = h^n (the L^1 norm of a nodal hat function).
double equilibrium_residual(const EnergyProblem& problem, const Field& u);

/// sum over free nodal values of |w_i| h^n: the norm dual to the residual,
/// so |first_variation(u, w)| <= residual * variation_norm(w).
double variation_norm(const EnergyProblem& problem, const Field& w);

struct SolverOptions {
  double tol = 1e-10;
  std::size_t max_iterations = 50000;
};

struct SolveResult {
  Field u;
  double residual = 0.0;
  double energy = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Minimizes total_energy over the free nodal values by gradient descent
/// with Barzilai-Borwein trial steps and backtracking. Steps that leave
/// det grad u <= epsilon at some cell are rejected. Throws NumericalError
/// when no admissible step can be found.
SolveResult solve_equilibrium(const EnergyProblem& problem, const Field& init, const SolverOptions& options = {});

/// |(E(v) - E(u_e)) - sum [sigma(C_v) - sigma(C_e) - S(grad u_e) : grad w] h^n|
/// with w = v - u_e. Equals |first_variation(u_e, w)|.
double equilibrium_identity_check(const EnergyProblem& problem, const Field& u_e, const Field& v);

/// ||C_v - C_u||_BMO + |<C_v - C_u>| (Frobenius), seminorm over `family`.
double strain_bmo_l1_distance(const Field& u, const Field& v, const CubeFamily& family = CubeFamily::all());

struct PositivityCheck {
  bool applicable = false;  ///< strain distance below the probe radius
  bool pass = false;
  double margin = 0.0;      ///< lhs - rhs
};

/// With E = C_v - C_u: sum E : C(C_v)[E] h^n >= beta sum |E|^2 h^n,
/// checked when strain_bmo_l1_distance(u, v) < radius.
PositivityCheck perturbation_positivity_check(const Field& u, const Field& v, const MaterialModel& model,
                                              double beta, double radius);

}  // namespace osclab
