#include "osclab/energy.hpp"

#include "osclab/bmo.hpp"
#include "osclab/error.hpp"
#include "osclab/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace osclab {

EnergyProblem EnergyProblem::make(std::shared_ptr<const Grid> grid, std::shared_ptr<const MaterialModel> material,
                                  const std::function<Vector(const Point3&)>& boundary, double epsilon, double cap) {
  EnergyProblem p{grid,
                  std::move(material),
                  Field(grid, Placement::Cell, Shape::Vector),
                  std::vector<Vector>(grid->boundary_faces().size(), Vector::Zero(grid->dim())),
                  Field::sample_vector(grid, Placement::Node, boundary),
                  epsilon,
                  cap};
  p.validate();
  return p;
}

void EnergyProblem::validate() const {
  if (!grid || !material) throw ParameterError("energy problem needs a grid and a material");
  if (!grid->has_dirichlet()) throw ParameterError("energy problem needs a nonempty Dirichlet boundary");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (!(cap > 1.0)) throw ParameterError("cap X must exceed 1");
  body_force.require_placement(Placement::Cell, "body force");
  if (body_force.shape() != Shape::Vector) throw ParameterError("body force must be a vector field");
  dirichlet.require_placement(Placement::Node, "Dirichlet data");
  if (traction.size() != grid->boundary_faces().size()) throw ParameterError("one traction vector per boundary face");
  for (const auto& t : traction)
    if (t.size() != grid->dim() || !t.allFinite()) throw ParameterError("traction vectors must be finite n-vectors");
}

std::vector<std::uint8_t> free_nodes(const EnergyProblem& problem) {
  auto active = problem.grid->active_nodes();
  const auto fixed = problem.grid->dirichlet_nodes();
  for (std::size_t i = 0; i < active.size(); ++i)
    if (fixed[i]) active[i] = 0;
  return active;
}

void require_dirichlet(const EnergyProblem& problem, const Field& u) {
  const auto fixed = problem.grid->dirichlet_nodes();
  for (std::size_t node = 0; node < fixed.size(); ++node) {
    if (!fixed[node]) continue;
    auto a = u.at(node);
    auto d = problem.dirichlet.at(node);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - d[i]) > 1e-12 * std::max(1.0, std::abs(d[i])))
        throw InadmissibleError("deformation does not match the Dirichlet data at node " + std::to_string(node));
  }
}

void require_variation(const EnergyProblem& problem, const Field& w) {
  const auto fixed = problem.grid->dirichlet_nodes();
  for (std::size_t node = 0; node < fixed.size(); ++node)
    if (fixed[node])
      for (double x : w.at(node))
        if (x != 0.0) throw ParameterError("variation must vanish on Dirichlet nodes");
}

namespace {

Vector cell_average(const Field& u, std::size_t cell) {
  const Grid& g = u.grid();
  Vector avg = Vector::Zero(g.dim());
  for (int c = 0; c < g.corner_count(); ++c) avg += u.vector_at(g.cell_node(cell, c));
  return avg / static_cast<double>(g.corner_count());
}

Vector face_average(const Field& u, const Face& f) {
  const auto nodes = u.grid().face_nodes(f);
  Vector avg = Vector::Zero(u.dim());
  for (auto n : nodes) avg += u.vector_at(n);
  return avg / static_cast<double>(nodes.size());
}

double load_work(const EnergyProblem& p, const Field& u) {
  const Grid& g = *p.grid;
  double body = 0.0;
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell)
    if (g.is_active(cell)) body += p.body_force.vector_at(cell).dot(cell_average(u, cell));
  double surface = 0.0;
  const auto& faces = g.boundary_faces();
  for (std::size_t i = 0; i < faces.size(); ++i)
    if (g.face_label(i) == BoundaryLabel::Traction) surface += p.traction[i].dot(face_average(u, faces[i]));
  return body * g.cell_volume() + surface * g.face_area();
}

void check_node_vector(const Field& f, const Grid& g, const char* what) {
  f.require_placement(Placement::Node, what);
  if (f.shape() != Shape::Vector || f.dim() != g.dim() || f.sites() != g.node_count())
    throw ParameterError(std::string(what) + " must be a node vector field on the problem grid");
}

}  // namespace

double total_energy(const EnergyProblem& problem, const Field& u) {
  check_node_vector(u, *problem.grid, "deformation");
  require_dirichlet(problem, u);
  const Field f = gradient(u);
  require_positive_jacobian(f, 0.0);
  const Grid& g = *problem.grid;
  double stored = 0.0;
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    if (!g.is_active(cell)) continue;
    const Matrix F = f.matrix_at(cell);
    stored += problem.material->energy(cell, F.transpose() * F);
  }
  return stored * g.cell_volume() - load_work(problem, u);
}

Field energy_gradient(const EnergyProblem& problem, const Field& u) {
  check_node_vector(u, *problem.grid, "deformation");
  const Grid& g = *problem.grid;
  const int n = g.dim();
  const int corners = g.corner_count();
  const Field f = gradient(u);
  require_positive_jacobian(f, 0.0);
  Field out(problem.grid, Placement::Node, Shape::Vector);
  const double vol = g.cell_volume();
  const double weight = 1.0 / (g.spacing() * static_cast<double>(corners / 2));
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    if (!g.is_active(cell)) continue;
    const Matrix s = first_pk(*problem.material, cell, f.matrix_at(cell));
    const Vector b = problem.body_force.vector_at(cell);
    for (int corner = 0; corner < corners; ++corner) {
      auto gv = out.at(g.cell_node(cell, corner));
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a) acc += s(i, a) * (((corner >> a) & 1) ? weight : -weight);
        gv[i] += vol * (acc - b(i) / corners);
      }
    }
  }
  const auto& faces = g.boundary_faces();
  for (std::size_t i = 0; i < faces.size(); ++i) {
    if (g.face_label(i) != BoundaryLabel::Traction) continue;
    const auto nodes = g.face_nodes(faces[i]);
    for (auto node : nodes) {
      auto gv = out.at(node);
      for (int c = 0; c < n; ++c) gv[c] -= g.face_area() * problem.traction[i](c) / static_cast<double>(nodes.size());
    }
  }
  return out;
}

double first_variation(const EnergyProblem& problem, const Field& u, const Field& w) {
  check_node_vector(u, *problem.grid, "deformation");
  check_node_vector(w, *problem.grid, "variation");
  require_variation(problem, w);
  const Grid& g = *problem.grid;
  const Field f = gradient(u);
  require_positive_jacobian(f, 0.0);
  const Field gw = gradient(w);
  double acc = 0.0;
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    if (!g.is_active(cell)) continue;
    const Matrix F = f.matrix_at(cell);
    const Matrix G = gw.matrix_at(cell);
    acc += contract(problem.material->energy_gradient(cell, F.transpose() * F), F.transpose() * G + G.transpose() * F);
  }
  return acc * g.cell_volume() - load_work(problem, w);
}

double second_variation(const EnergyProblem& problem, const Field& u, const Field& w) {
  check_node_vector(u, *problem.grid, "deformation");
  check_node_vector(w, *problem.grid, "variation");
  require_variation(problem, w);
  const Grid& g = *problem.grid;
  const Field f = gradient(u);
  require_positive_jacobian(f, 0.0);
  const Field gw = gradient(w);
  double acc = 0.0;
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    if (!g.is_active(cell)) continue;
    const Matrix F = f.matrix_at(cell);
    const Matrix G = gw.matrix_at(cell);
    const Matrix C = F.transpose() * F;
    const Matrix B = F.transpose() * G + G.transpose() * F;
    acc += contract(second_pk(*problem.material, cell, C), G.transpose() * G) +
           0.25 * contract(B, elasticity_tensor_apply(*problem.material, cell, C, B));
  }
  return acc * g.cell_volume();
}

double psd_quadratic_check(const Field& l, const Field& w) {
  l.require_placement(Placement::Cell, "psd quadratic form");
  const Grid& g = l.grid();
  const Field gw = gradient(w);
  double acc = 0.0;
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    if (!g.is_active(cell)) continue;
    const Matrix L = l.matrix_at(cell);
    const double scale = std::max(L.norm(), 1e-300);
    if ((L - L.transpose()).norm() > 1e-12 * scale || min_eigenvalue(L) < -1e-12 * scale)
      throw ParameterError("L must be symmetric positive semidefinite at every cell");
    const Matrix G = gw.matrix_at(cell);
    acc += contract(G.transpose() * G, L);
  }
  return acc * g.cell_volume();
}

double equilibrium_residual(const EnergyProblem& problem, const Field& u) {
  const Field grad = energy_gradient(problem, u);
  const auto free = free_nodes(problem);
  double r = 0.0;
  for (std::size_t node = 0; node < free.size(); ++node)
    if (free[node])
      for (double x : grad.at(node)) r = std::max(r, std::abs(x));
  return r / problem.grid->cell_volume();
}

double variation_norm(const EnergyProblem& problem, const Field& w) {
  const auto free = free_nodes(problem);
  double acc = 0.0;
  for (std::size_t node = 0; node < free.size(); ++node)
    if (free[node])
      for (double x : w.at(node)) acc += std::abs(x);
  return acc * problem.grid->cell_volume();
}

SolveResult solve_equilibrium(const EnergyProblem& problem, const Field& init, const SolverOptions& options) {
  problem.validate();
  check_node_vector(init, *problem.grid, "initial deformation");
  require_dirichlet(problem, init);
  require_positive_jacobian(gradient(init), problem.epsilon);

  const auto free = free_nodes(problem);
  const double vol = problem.grid->cell_volume();
  auto project = [&](Field& g) {
    for (std::size_t node = 0; node < free.size(); ++node)
      if (!free[node])
        for (double& x : g.at(node)) x = 0.0;
  };
  auto residual_of = [&](const Field& g) {
    double r = 0.0;
    for (double x : g.values()) r = std::max(r, std::abs(x));
    return r / vol;
  };
  auto dot = [](const Field& a, const Field& b) {
    double s = 0.0;
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
    return s;
  };

  SolveResult result{init, 0.0, total_energy(problem, init), 0, false};
  Field g = energy_gradient(problem, result.u);
  project(g);
  result.residual = residual_of(g);
  // Initial trial step: a displacement of one percent of a cell.
  double step = 0.0;
  {
    const double gmax = result.residual * vol;
    step = gmax > 0.0 ? 1e-2 * problem.grid->spacing() / gmax : 1.0;
  }

  while (result.residual >= options.tol && result.iterations < options.max_iterations) {
    const double g2 = dot(g, g);
    const double slack = 1e-14 * (std::abs(result.energy) + 1.0);
    double alpha = step;
    bool accepted = false;
    Field trial = result.u;
    double trial_energy = 0.0;
    double min_det = 0.0;
    for (int backtrack = 0; backtrack < 80; ++backtrack) {
      trial = axpy(result.u, -alpha, g);
      min_det = min_jacobian(gradient(trial));
      if (min_det > problem.epsilon) {
        trial_energy = total_energy(problem, trial);
        if (trial_energy <= result.energy - 1e-4 * alpha * g2 + slack) {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "barrier stall: no admissible descent step after " << result.iterations << " iterations (residual "
          << result.residual << ", last min det " << min_det << ", epsilon " << problem.epsilon << ")";
      throw NumericalError(msg.str());
    }
    Field g_new = energy_gradient(problem, trial);
    project(g_new);
    // Barzilai-Borwein step for the next iteration
    const Field s = axpy(trial, -1.0, result.u);
    const Field y = axpy(g_new, -1.0, g);
    const double sy = dot(s, y);
    step = sy > 0.0 ? dot(s, s) / sy : alpha * 2.0;
    result.u = std::move(trial);
    result.energy = trial_energy;
    g = std::move(g_new);
    result.residual = residual_of(g);
    ++result.iterations;
  }
  result.converged = result.residual < options.tol;
  return result;
}

double equilibrium_identity_check(const EnergyProblem& problem, const Field& u_e, const Field& v) {
  const Grid& g = *problem.grid;
  const Field fe = gradient(u_e);
  const Field fv = gradient(v);
  const Field w = axpy(v, -1.0, u_e);
  const Field gw = gradient(w);
  const double lhs = total_energy(problem, v) - total_energy(problem, u_e);
  double rhs = 0.0;
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    if (!g.is_active(cell)) continue;
    const Matrix Fe = fe.matrix_at(cell);
    const Matrix Fv = fv.matrix_at(cell);
    rhs += problem.material->energy(cell, Fv.transpose() * Fv) - problem.material->energy(cell, Fe.transpose() * Fe) -
           contract(first_pk(*problem.material, cell, Fe), gw.matrix_at(cell));
  }
  return std::abs(lhs - rhs * g.cell_volume());
}

double strain_bmo_l1_distance(const Field& u, const Field& v, const CubeFamily& family) {
  const Field diff = axpy(cauchy_green_from_gradient(gradient(v)), -1.0, cauchy_green_from_gradient(gradient(u)));
  const auto mean = active_mean(diff);
  double m2 = 0.0;
  for (double m : mean) m2 += m * m;
  return bmo_seminorm(diff, family, 1.0).value + std::sqrt(m2);
}

PositivityCheck perturbation_positivity_check(const Field& u, const Field& v, const MaterialModel& model,
                                              double beta, double radius) {
  PositivityCheck out;
  const double distance = strain_bmo_l1_distance(u, v);
  if (!(distance < radius)) return out;
  out.applicable = true;
  const Grid& g = u.grid();
  const Field cu = cauchy_green_from_gradient(gradient(u));
  const Field cv = cauchy_green_from_gradient(gradient(v));
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    if (!g.is_active(cell)) continue;
    const Matrix e = cv.matrix_at(cell) - cu.matrix_at(cell);
    lhs += contract(e, elasticity_tensor_apply(model, cell, cv.matrix_at(cell), e));
    rhs += beta * contract(e, e);
  }
  out.margin = (lhs - rhs) * g.cell_volume();
  out.pass = lhs >= rhs - 1e-12 * std::max(std::abs(lhs), 1e-300);
  return out;
}

}  // namespace osclab
