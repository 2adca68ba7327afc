#pragma once

#include "osclab/grid.hpp"
#include "osclab/linalg.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace osclab {

enum class Placement { Node, Cell };
enum class Shape { Scalar, Vector, Matrix, SymMatrix };

/// Number of stored components of a shape in dimension n. Symmetric
/// matrices are stored in full n x n form.
int component_count(Shape shape, int dim);

/// Values sampled on the nodes or cells of a grid, row-major over site
/// index then component. Matrix components are row-major (i * n + j).
class Field {
 public:
  Field(std::shared_ptr<const Grid> grid, Placement placement, Shape shape, std::vector<double> values = {});

  /// Scalar field from per-site values.
  static Field scalar(std::shared_ptr<const Grid> grid, Placement placement, std::vector<double> values);

  /// Samples fn at cell centers or node positions.
  static Field sample_scalar(std::shared_ptr<const Grid> grid, Placement placement,
                             const std::function<double(const Point3&)>& fn);
  static Field sample_vector(std::shared_ptr<const Grid> grid, Placement placement,
                             const std::function<Vector(const Point3&)>& fn);
  static Field sample_matrix(std::shared_ptr<const Grid> grid, Placement placement,
                             const std::function<Matrix(const Point3&)>& fn);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  Placement placement() const { return placement_; }
  Shape shape() const { return shape_; }
  int dim() const { return grid_->dim(); }
  int components() const { return components_; }
  std::size_t sites() const { return values_.size() / components_; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<const double> at(std::size_t site) const { return {values_.data() + site * components_, static_cast<std::size_t>(components_)}; }
  std::span<double> at(std::size_t site) { return {values_.data() + site * components_, static_cast<std::size_t>(components_)}; }

  Matrix matrix_at(std::size_t site) const;
  void set_matrix(std::size_t site, const Matrix& m);
  Vector vector_at(std::size_t site) const;
  void set_vector(std::size_t site, const Vector& v);

  /// Same values attached to another grid with identical cell layout
  /// (used for rescaled or relabelled grids).
  Field on_grid(std::shared_ptr<const Grid> grid) const;

  /// Euclidean (Frobenius for matrices) norm of the value at a site.
  double magnitude(std::size_t site) const;

  /// Whether the site is active: cells by mask, nodes by touching an
  /// active cell.
  bool site_active(std::size_t site) const;

  /// Throws ParameterError when the placement differs.
  void require_placement(Placement p, const char* what) const;

 private:
  std::shared_ptr<const Grid> grid_;
  Placement placement_;
  Shape shape_;
  int components_;
  std::vector<double> values_;
  std::vector<std::uint8_t> active_nodes_;
};

/// Pointwise a + s * b (same grid, placement and shape).
Field axpy(const Field& a, double s, const Field& b);

/// Component-wise average over active sites.
std::vector<double> active_mean(const Field& f);

/// max over active sites of the pointwise magnitude.
double sup_norm(const Field& f);

}  // namespace osclab
