#include "oracles.hpp"

#include "osclab/error.hpp"
#include "osclab/energy.hpp"
#include "osclab/kinematics.hpp"

#include <doctest.h>

#include <cmath>

using namespace osclab;

namespace {

auto affine(double a, double b) {
  return [a, b](const Point3& x) {
    Vector v(2);
    v << a * x[0], b * x[1];
    return v;
  };
}

std::shared_ptr<const Grid> unit_square(int cells) {
  return std::make_shared<Grid>(Grid::box(2, cells, 1.0 / cells));
}

// Traction on x = 1, Dirichlet elsewhere, with body force.
EnergyProblem loaded_problem(const std::string& model) {
  auto base = Grid::box(2, 6, 1.0 / 6);
  auto g = std::make_shared<Grid>(base.with_labels([](const Face& f, const Point3&) {
    return f.axis == 0 && f.side == 1 ? BoundaryLabel::Traction : BoundaryLabel::Dirichlet;
  }));
  auto p = EnergyProblem::make(g, make_material(model, {1.0}, {1.0}), affine(1.0, 1.0));
  p.body_force = Field::sample_vector(g, Placement::Cell, [](const Point3& x) {
    Vector v(2);
    v << 0.02 * x[1], -0.03;
    return v;
  });
  for (auto& t : p.traction) t = (Vector(2) << 0.04, 0.01).finished();
  return p;
}

Field random_variation(const EnergyProblem& p, std::mt19937_64& rng, double scale) {
  auto free = free_nodes(p);
  Field w(p.grid, Placement::Node, Shape::Vector, oracle::normals(rng, p.grid->node_count() * 2, scale));
  for (std::size_t node = 0; node < free.size(); ++node)
    if (!free[node])
      for (double& x : w.at(node)) x = 0.0;
  return w;
}

}  // namespace

TEST_CASE("total energy closed forms") {
  auto g = unit_square(8);
  auto svk = make_material("svk", {1.0}, {1.0});
  auto p = EnergyProblem::make(g, svk, affine(1.1, 1.0));
  CHECK(total_energy(p, p.dirichlet) == doctest::Approx(0.0165375).epsilon(1e-13));

  auto id = EnergyProblem::make(g, svk, affine(1.0, 1.0));
  CHECK(total_energy(id, id.dirichlet) == 0.0);

  const double t = 0.6;
  auto rot = EnergyProblem::make(g, svk, [t](const Point3& x) {
    Vector v(2);
    v << std::cos(t) * x[0] - std::sin(t) * x[1], std::sin(t) * x[0] + std::cos(t) * x[1];
    return v;
  });
  CHECK(std::abs(total_energy(rot, rot.dirichlet)) < 1e-14);

  Field wrong = p.dirichlet;
  wrong.at(0)[0] += 0.1;
  CHECK_THROWS_AS(total_energy(p, wrong), InadmissibleError);
  auto flip = EnergyProblem::make(g, svk, affine(-1.0, 1.0));
  CHECK_THROWS_AS(total_energy(flip, flip.dirichlet), InadmissibleError);
}

TEST_CASE("problem invariants") {
  auto g = unit_square(4);
  auto svk = make_material("svk", {1.0}, {1.0});
  auto p = EnergyProblem::make(g, svk, affine(1.0, 1.0));
  CHECK_NOTHROW(p.validate());
  p.epsilon = 1.5;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  auto all_traction = std::make_shared<Grid>(
      Grid::box(2, 4, 0.25).with_labels([](const Face&, const Point3&) { return BoundaryLabel::Traction; }));
  CHECK_THROWS_AS(EnergyProblem::make(all_traction, svk, affine(1.0, 1.0)), ParameterError);

  std::mt19937_64 rng(1);
  Field w(g, Placement::Node, Shape::Vector, oracle::normals(rng, g->node_count() * 2));
  CHECK_THROWS_AS(require_variation(p, w), ParameterError);
}

TEST_CASE("variations match finite differences of the energy") {
  std::mt19937_64 rng(31);
  for (const char* model : {"svk", "neo-hookean"}) {
    auto p = loaded_problem(model);
    for (int state = 0; state < 3; ++state) {
      Field u = axpy(p.dirichlet, 1.0, random_variation(p, rng, 0.02));
      for (int dir = 0; dir < 5; ++dir) {
        Field w = random_variation(p, rng, 1.0);
        const double t = 1e-5;
        double ep = total_energy(p, axpy(u, t, w));
        double em = total_energy(p, axpy(u, -t, w));
        double e0 = total_energy(p, u);
        double fd1 = (ep - em) / (2 * t);
        CHECK(oracle::close(first_variation(p, u, w), fd1, 1e-6, 1e-9));

        const double s = 1e-3;
        double fd2 = (total_energy(p, axpy(u, s, w)) - 2 * e0 + total_energy(p, axpy(u, -s, w))) / (s * s);
        CHECK(oracle::close(second_variation(p, u, w), fd2, 1e-4, 1e-8));

        // the nodal gradient is the same linear functional
        Field grad = energy_gradient(p, u);
        double dot = 0.0;
        for (std::size_t i = 0; i < grad.values().size(); ++i) dot += grad.values()[i] * w.values()[i];
        CHECK(oracle::close(dot, fd1, 1e-6, 1e-9));
      }
    }
  }
}

TEST_CASE("variations at the stress-free state") {
  auto g = unit_square(5);
  auto svk = make_material("svk", {1.0}, {1.0});
  auto p = EnergyProblem::make(g, svk, affine(1.0, 1.0));
  std::mt19937_64 rng(2);
  Field w = random_variation(p, rng, 1.0);
  CHECK(std::abs(first_variation(p, p.dirichlet, w)) < 1e-14);

  auto s = sym_gradient(w);
  double expect = 0.0;
  for (std::size_t c = 0; c < s.sites(); ++c) {
    Matrix e = s.matrix_at(c);
    expect += contract(e, elasticity_tensor_apply(*svk, c, identity(2), e));
  }
  expect *= g->cell_volume();
  CHECK(second_variation(p, p.dirichlet, w) == doctest::Approx(expect).epsilon(1e-12));

  Field zero(g, Placement::Node, Shape::Vector);
  CHECK(first_variation(p, p.dirichlet, zero) == 0.0);
  CHECK(second_variation(p, p.dirichlet, zero) == 0.0);
}

TEST_CASE("psd quadratic check") {
  auto g = unit_square(4);
  std::mt19937_64 rng(3);
  Field w(g, Placement::Node, Shape::Vector, oracle::normals(rng, g->node_count() * 2));
  Field zero(g, Placement::Cell, Shape::SymMatrix);
  CHECK(psd_quadratic_check(zero, w) == 0.0);
  Field eye = Field::sample_matrix(g, Placement::Cell, [](const Point3&) { return identity(2); });
  auto gw = gradient(w);
  double expect = 0.0;
  for (std::size_t c = 0; c < gw.sites(); ++c) expect += gw.matrix_at(c).squaredNorm();
  CHECK(psd_quadratic_check(eye, w) == doctest::Approx(expect * g->cell_volume()));
  for (int t = 0; t < 20; ++t) {
    Field l = Field::sample_matrix(g, Placement::Cell, [&](const Point3&) {
      Matrix a = oracle::random_matrix(rng, 2);
      return Matrix(a * a.transpose());
    });
    CHECK(psd_quadratic_check(l, w) >= 0.0);
  }
  Field neg = Field::sample_matrix(g, Placement::Cell, [](const Point3&) { return Matrix(-identity(2)); });
  CHECK_THROWS_AS(psd_quadratic_check(neg, w), ParameterError);
}

TEST_CASE("equilibrium solves") {
  auto g = unit_square(8);
  auto svk = make_material("svk", {1.0}, {1.0});
  auto id = EnergyProblem::make(g, svk, affine(1.0, 1.0));
  auto r = solve_equilibrium(id, id.dirichlet);
  CHECK(r.converged);
  CHECK(r.residual < 1e-10);

  auto st = EnergyProblem::make(g, svk, affine(1.05, 1.05));
  CHECK(equilibrium_residual(st, st.dirichlet) < 1e-10);

  auto loaded = loaded_problem("svk");
  CHECK(equilibrium_residual(loaded, loaded.dirichlet) > 1e-4);
  auto sol = solve_equilibrium(loaded, loaded.dirichlet);
  REQUIRE(sol.converged);
  CHECK(sol.residual < 1e-10);
  CHECK(sol.energy < total_energy(loaded, loaded.dirichlet));
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    Field w = random_variation(loaded, rng, 1.0);
    CHECK(std::abs(first_variation(loaded, sol.u, w)) <= sol.residual * variation_norm(loaded, w) * (1 + 1e-9));
  }

  // the identity check is bounded by residual times norm
  for (int t = 0; t < 20; ++t) {
    Field v = axpy(sol.u, 1.0, random_variation(loaded, rng, 0.01));
    Field w = axpy(v, -1.0, sol.u);
    CHECK(equilibrium_identity_check(loaded, sol.u, v) <= 1e-10 + 10 * sol.residual * variation_norm(loaded, w));
  }
  CHECK(equilibrium_identity_check(loaded, sol.u, sol.u) == 0.0);
}

TEST_CASE("strain distance") {
  auto g = unit_square(5);
  std::mt19937_64 rng(5);
  auto id = DeformationField::identity(g).values;
  Field u = axpy(id, 1.0, Field(g, Placement::Node, Shape::Vector, oracle::normals(rng, g->node_count() * 2, 0.03)));
  CHECK(strain_bmo_l1_distance(u, u) == 0.0);

  Field qu = u;
  const double t = 0.8;
  for (std::size_t s = 0; s < qu.sites(); ++s) {
    Vector x = u.vector_at(s);
    Vector y(2);
    y << std::cos(t) * x[0] - std::sin(t) * x[1] + 3.0, std::sin(t) * x[0] + std::cos(t) * x[1];
    qu.set_vector(s, y);
  }
  CHECK(strain_bmo_l1_distance(u, qu) < 1e-13);

  Field v = axpy(id, 1.0, Field(g, Placement::Node, Shape::Vector, oracle::normals(rng, g->node_count() * 2, 0.03)));
  auto cu = cauchy_green(DeformationField{u, false});
  auto cv = cauchy_green(DeformationField{v, false});
  Field diff = axpy(cv, -1.0, cu);
  double mean2 = 0.0;
  for (double m : active_mean(diff)) mean2 += m * m;
  double expect = oracle::brute_bmo(diff, 1.0) + std::sqrt(mean2);
  CHECK(strain_bmo_l1_distance(u, v) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("perturbed positivity") {
  auto g = unit_square(6);
  auto id = DeformationField::identity(g).values;
  std::mt19937_64 rng(6);
  auto svk = make_material("svk", {1.0}, {1.0});
  CHECK(perturbation_positivity_check(id, id, *svk, 1.0, 0.1).pass);
  for (int t = 0; t < 10; ++t) {
    Field v = axpy(id, 1.0, Field(g, Placement::Node, Shape::Vector, oracle::normals(rng, g->node_count() * 2, 0.002)));
    auto s = perturbation_positivity_check(id, v, *svk, 2.0, 1.0);
    CHECK(s.applicable);
    CHECK(s.pass);
    auto neo = perturbation_positivity_check(id, v, *make_material("neo-hookean", {1.0}, {1.0}), 1.0, 1.0);
    CHECK(neo.pass);
  }
}
