#include "oracles.hpp"

#include "osclab/error.hpp"
#include "osclab/kinematics.hpp"

#include <doctest.h>

#include <cmath>

using namespace osclab;

namespace {

std::shared_ptr<const Grid> grid(int n, int cells = 4, double h = 0.25) {
  return std::make_shared<Grid>(Grid::box(n, cells, h, Point3{0.1, -0.2, 0.3}));
}

Matrix rot2(double t) {
  Matrix q(2, 2);
  q << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return q;
}

double max_diff(const Field& f, const Matrix& m) {
  double d = 0.0;
  for (std::size_t s = 0; s < f.sites(); ++s) d = std::max(d, (f.matrix_at(s) - m).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

TEST_CASE("gradient is exact on affine maps") {
  std::mt19937_64 rng(1);
  for (int n : {2, 3}) {
    auto g = grid(n);
    Matrix a = oracle::random_matrix(rng, n);
    Vector b = Vector::Random(n);
    auto u = DeformationField::deformation(g, [&](const Point3& x) {
      Vector p(n);
      for (int i = 0; i < n; ++i) p[i] = x[i];
      return Vector(a * p + b);
    });
    CHECK(max_diff(gradient(u), a) < 1e-14);
  }
}

TEST_CASE("gradient of (x^2, y) at cell centers") {
  auto g = grid(2, 5, 0.2);
  auto u = DeformationField::deformation(g, [](const Point3& x) {
    Vector v(2);
    v << x[0] * x[0], x[1];
    return v;
  });
  auto f = gradient(u);
  for (std::size_t c = 0; c < f.sites(); ++c) {
    auto m = f.matrix_at(c);
    CHECK(m(0, 0) == doctest::Approx(2 * g->cell_center(c)[0]).epsilon(1e-13));
    CHECK(std::abs(m(0, 1)) < 1e-13);
    CHECK(m(1, 1) == doctest::Approx(1.0));
  }
}

TEST_CASE("gradient matches the element-stencil oracle on random fields") {
  std::mt19937_64 rng(2);
  for (int n : {2, 3}) {
    auto g = grid(n, 3, 0.3);
    Field u(g, Placement::Node, Shape::Vector, oracle::normals(rng, g->node_count() * n));
    auto f = gradient(u);
    auto s = sym_gradient(u);
    for (std::size_t c = 0; c < g->cell_count(); ++c) {
      Matrix ref = oracle::element_gradient(u, c);
      CHECK((f.matrix_at(c) - ref).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, ref.norm()));
      CHECK((s.matrix_at(c) - 0.5 * (ref + ref.transpose())).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, ref.norm()));
    }
  }
}

TEST_CASE("symmetric gradient of skew and symmetric linear maps") {
  auto g = grid(3);
  Matrix w(3, 3);
  w << 0, 1, -2, -1, 0, 0.5, 2, -0.5, 0;
  Matrix s(3, 3);
  s << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  auto lin = [&](const Matrix& m) {
    return [m](const Point3& x) { return Vector(m * Eigen::Vector3d(x[0], x[1], x[2])); };
  };
  CHECK(max_diff(sym_gradient(DeformationField::deformation(g, lin(w))), Matrix::Zero(3, 3)) < 1e-14);
  CHECK(max_diff(sym_gradient(DeformationField::deformation(g, lin(s))), s) < 1e-13);
}

TEST_CASE("Cauchy-Green and Green-St. Venant strains") {
  auto g = grid(2);
  auto id = DeformationField::identity(g);
  CHECK(max_diff(cauchy_green(id), identity(2)) < 1e-14);
  CHECK(max_diff(green_st_venant(id), Matrix::Zero(2, 2)) < 1e-14);

  auto stretch = DeformationField::deformation(g, [](const Point3& x) {
    Vector v(2);
    v << 1.1 * x[0], 1.1 * x[1];
    return v;
  });
  CHECK(max_diff(cauchy_green(stretch), 1.21 * identity(2)) < 1e-14);
  CHECK(max_diff(green_st_venant(stretch), 0.105 * identity(2)) < 1e-14);

  Matrix q = rot2(0.7);
  auto rigid = DeformationField::deformation(g, [&](const Point3& x) { return Vector(q * Eigen::Vector2d(x[0], x[1])); });
  CHECK(max_diff(cauchy_green(rigid), identity(2)) < 1e-14);
  CHECK(max_diff(green_st_venant(rigid), Matrix::Zero(2, 2)) < 1e-14);

  auto disp = DeformationField::displacement(g, [](const Point3& x) {
    Vector v(2);
    v << 0.1 * x[0], 0.1 * x[1];
    return v;
  });
  CHECK(max_diff(cauchy_green(disp), 1.21 * identity(2)) < 1e-14);
}

TEST_CASE("Cauchy-Green is frame indifferent") {
  std::mt19937_64 rng(4);
  auto g = grid(2);
  Field u(g, Placement::Node, Shape::Vector, oracle::normals(rng, g->node_count() * 2, 0.1));
  Field ud = DeformationField{u, true}.as_deformation();
  Matrix q = rot2(1.3);
  Field moved = ud;
  for (std::size_t s = 0; s < moved.sites(); ++s) {
    Vector v = q * ud.vector_at(s);
    v[0] += 2.0;
    v[1] -= 0.5;
    moved.set_vector(s, v);
  }
  auto c0 = cauchy_green(DeformationField{ud, false});
  auto c1 = cauchy_green(DeformationField{moved, false});
  for (std::size_t c = 0; c < c0.sites(); ++c) CHECK((c0.matrix_at(c) - c1.matrix_at(c)).norm() < 1e-13);
}

TEST_CASE("jacobian") {
  auto g = grid(2);
  Matrix d(2, 2);
  d << 2, 0, 0, 3;
  auto j = jacobian(Field::sample_matrix(g, Placement::Cell, [&](const Point3&) { return d; }));
  CHECK(j.at(0)[0] == doctest::Approx(6.0));
  CHECK(jacobian(gradient(DeformationField::identity(g))).at(5)[0] == doctest::Approx(1.0));

  std::mt19937_64 rng(6);
  for (int n : {2, 3})
    for (int t = 0; t < 20; ++t) {
      Matrix m = oracle::random_matrix(rng, n);
      auto jf = jacobian(Field::sample_matrix(grid(n, 2), Placement::Cell, [&](const Point3&) { return m; }));
      CHECK(jf.at(0)[0] == doctest::Approx(oracle::cofactor_det(m)).epsilon(1e-12));
    }

  Matrix flip(2, 2);
  flip << -1, 0, 0, 1;
  auto bad = Field::sample_matrix(g, Placement::Cell, [&](const Point3&) { return flip; });
  CHECK_THROWS_AS(require_positive_jacobian(bad, 0.0), InadmissibleError);
  CHECK(min_jacobian(bad) == doctest::Approx(-1.0));
}

TEST_CASE("distance to rotations") {
  CHECK(distance_to_rotations(identity(2)) == doctest::Approx(0.0));
  CHECK(distance_to_rotations(2.0 * identity(2)) == doctest::Approx(std::sqrt(2.0)));
  Matrix flip(2, 2);
  flip << -1, 0, 0, 1;
  CHECK_THROWS_AS(distance_to_rotations(flip), InadmissibleError);

  std::mt19937_64 rng(10);
  int tested = 0;
  while (tested < 30) {
    Matrix f = oracle::random_matrix(rng, 2);
    if (f.determinant() <= 0.05) continue;
    ++tested;
    CHECK(distance_to_rotations(f) == doctest::Approx(oracle::angle_scan_distance(f)).epsilon(1e-9));
  }
}

TEST_CASE("best fit rotation") {
  auto g = grid(2);
  Matrix q = rot2(-0.4);
  auto fit = best_fit_rotation(Field::sample_matrix(g, Placement::Cell, [&](const Point3&) { return q; }));
  CHECK((fit.rotation - q).norm() < 1e-13);
  CHECK(fit.residual < 1e-13);

  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    Matrix r = rot2(0.3 * t);
    Field f(g, Placement::Cell, Shape::Matrix, oracle::normals(rng, g->cell_count() * 4, 0.02));
    for (std::size_t c = 0; c < f.sites(); ++c) f.set_matrix(c, r + f.matrix_at(c));
    auto fr = best_fit_rotation(f);
    Matrix mean = Matrix::Zero(2, 2);
    for (std::size_t c = 0; c < f.sites(); ++c) mean += f.matrix_at(c) / f.sites();
    double angle = 0.0;
    oracle::angle_scan_distance(mean, &angle);
    CHECK((fr.rotation - rot2(angle)).norm() < 1e-6);
  }
}

TEST_CASE("rigidity probe") {
  auto g = grid(2, 8, 0.125);
  auto scaled = DeformationField::deformation(g, [](const Point3& x) {
    Vector v(2);
    v << 1.05 * x[0], 1.05 * x[1];
    return v;
  });
  auto r = rigidity_probe(scaled);
  REQUIRE(r);
  CHECK(*r == doctest::Approx(0.05 / 0.1025).epsilon(1e-12));
  CHECK(*r == doctest::Approx(0.4878048780487805));

  Matrix q = rot2(0.9);
  auto rigid = DeformationField::deformation(g, [&](const Point3& x) { return Vector(q * Eigen::Vector2d(x[0], x[1])); });
  CHECK(!rigidity_probe(rigid).has_value());
}
