#include "osclab/kinematics.hpp"

#include "osclab/error.hpp"

#include <cmath>
#include <limits>

namespace osclab {

DeformationField DeformationField::deformation(std::shared_ptr<const Grid> grid,
                                               const std::function<Vector(const Point3&)>& fn) {
  return {Field::sample_vector(std::move(grid), Placement::Node, fn), false};
}

DeformationField DeformationField::displacement(std::shared_ptr<const Grid> grid,
                                                const std::function<Vector(const Point3&)>& fn) {
  return {Field::sample_vector(std::move(grid), Placement::Node, fn), true};
}

DeformationField DeformationField::identity(std::shared_ptr<const Grid> grid) {
  const int n = grid->dim();
  return deformation(std::move(grid), [n](const Point3& x) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = x[i];
    return v;
  });
}

namespace {

Field shifted_by_positions(const Field& f, double sign) {
  Field out = f;
  const Grid& g = f.grid();
  for (std::size_t node = 0; node < out.sites(); ++node) {
    const auto x = g.node_position(node);
    auto v = out.at(node);
    for (int i = 0; i < g.dim(); ++i) v[i] += sign * x[i];
  }
  return out;
}

}  // namespace

Field DeformationField::as_deformation() const {
  return is_displacement ? shifted_by_positions(values, 1.0) : values;
}

Field DeformationField::as_displacement() const {
  return is_displacement ? values : shifted_by_positions(values, -1.0);
}

Field gradient(const Field& u) {
  u.require_placement(Placement::Node, "gradient");
  if (u.shape() != Shape::Vector) throw ParameterError("gradient needs a vector field");
  const Grid& g = u.grid();
  const int n = g.dim();
  const int corners = g.corner_count();
  const double weight = 1.0 / (g.spacing() * static_cast<double>(corners / 2));
  Field out(u.grid_ptr(), Placement::Cell, Shape::Matrix);
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    Matrix f = Matrix::Zero(n, n);
    for (int corner = 0; corner < corners; ++corner) {
      const auto v = u.at(g.cell_node(cell, corner));
      for (int a = 0; a < n; ++a) {
        const double s = ((corner >> a) & 1) ? weight : -weight;
        for (int i = 0; i < n; ++i) f(i, a) += s * v[i];
      }
    }
    out.set_matrix(cell, f);
  }
  return out;
}

Field gradient(const DeformationField& u) {
  Field f = gradient(u.values);
  if (u.is_displacement) {
    const int n = f.dim();
    for (std::size_t cell = 0; cell < f.sites(); ++cell) {
      auto v = f.at(cell);
      for (int i = 0; i < n; ++i) v[i * n + i] += 1.0;
    }
  }
  return f;
}

Field symmetric_part(const Field& m) {
  Field out(m.grid_ptr(), m.placement(), Shape::SymMatrix);
  for (std::size_t s = 0; s < m.sites(); ++s) out.set_matrix(s, sym(m.matrix_at(s)));
  return out;
}

Field sym_gradient(const Field& u) { return symmetric_part(gradient(u)); }
Field sym_gradient(const DeformationField& u) { return symmetric_part(gradient(u)); }

Field cauchy_green_from_gradient(const Field& f) {
  Field out(f.grid_ptr(), Placement::Cell, Shape::SymMatrix);
  for (std::size_t s = 0; s < f.sites(); ++s) {
    const Matrix F = f.matrix_at(s);
    out.set_matrix(s, F.transpose() * F);
  }
  return out;
}

Field cauchy_green(const DeformationField& u) { return cauchy_green_from_gradient(gradient(u)); }

Field green_st_venant(const DeformationField& u) {
  Field c = cauchy_green(u);
  const int n = c.dim();
  for (std::size_t s = 0; s < c.sites(); ++s) {
    auto v = c.at(s);
    for (int i = 0; i < n; ++i) v[i * n + i] -= 1.0;
    for (double& x : v) x *= 0.5;
  }
  return c;
}

Field jacobian(const Field& f) {
  Field out(f.grid_ptr(), Placement::Cell, Shape::Scalar);
  for (std::size_t s = 0; s < f.sites(); ++s) out.at(s)[0] = f.matrix_at(s).determinant();
  return out;
}

double min_jacobian(const Field& f) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < f.sites(); ++s)
    if (f.site_active(s)) m = std::min(m, f.matrix_at(s).determinant());
  return m;
}

void require_positive_jacobian(const Field& f, double threshold) {
  for (std::size_t s = 0; s < f.sites(); ++s) {
    if (!f.site_active(s)) continue;
    const double det = f.matrix_at(s).determinant();
    if (!(det > threshold))
      throw InadmissibleError("det grad u = " + std::to_string(det) + " <= " + std::to_string(threshold) + " at cell " +
                              std::to_string(s));
  }
}

double distance_to_rotations(const Matrix& f) {
  if (!(f.determinant() > 0.0)) throw InadmissibleError("distance to rotations needs det F > 0");
  return (f - closest_rotation(f)).norm();
}

RotationFit best_fit_rotation(const Field& f) {
  const auto mean = active_mean(f);
  const int n = f.dim();
  Matrix avg(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) avg(i, j) = mean[i * n + j];
  RotationFit fit;
  fit.rotation = closest_rotation(avg);
  fit.residual = (avg - fit.rotation).norm();
  return fit;
}

double sup_distance_to_identity(const Field& m) {
  const int n = m.dim();
  double sup = 0.0;
  for (std::size_t s = 0; s < m.sites(); ++s)
    if (m.site_active(s)) sup = std::max(sup, (m.matrix_at(s) - identity(n)).norm());
  return sup;
}

std::optional<double> rigidity_probe(const DeformationField& u, const CubeFamily& family) {
  const Field f = gradient(u);
  const double strain = sup_distance_to_identity(cauchy_green_from_gradient(f));
  if (strain <= 1e-14) return std::nullopt;
  const double oscillation = bmo_seminorm(f, family, 1.0).value;
  const RotationFit fit = best_fit_rotation(f);
  return (oscillation + fit.residual) / strain;
}

}  // namespace osclab
