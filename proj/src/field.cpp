#include "osclab/field.hpp"

#include "osclab/error.hpp"

#include <algorithm>
#include <cmath>

namespace osclab {

int component_count(Shape shape, int dim) {
  switch (shape) {
    case Shape::Scalar: return 1;
    case Shape::Vector: return dim;
    case Shape::Matrix:
    case Shape::SymMatrix: return dim * dim;
  }
  return 1;
}

Field::Field(std::shared_ptr<const Grid> grid, Placement placement, Shape shape, std::vector<double> values)
    : grid_(std::move(grid)), placement_(placement), shape_(shape), values_(std::move(values)) {
  if (!grid_) throw ParameterError("field needs a grid");
  components_ = component_count(shape_, grid_->dim());
  const std::size_t sites = placement_ == Placement::Cell ? grid_->cell_count() : grid_->node_count();
  if (values_.empty()) values_.assign(sites * components_, 0.0);
  if (values_.size() != sites * components_) throw ParameterError("field value count does not match grid sites");
  for (double v : values_)
    if (!std::isfinite(v)) throw ParameterError("field values must be finite");
  if (placement_ == Placement::Node) active_nodes_ = grid_->active_nodes();
}

Field Field::scalar(std::shared_ptr<const Grid> grid, Placement placement, std::vector<double> values) {
  return Field(std::move(grid), placement, Shape::Scalar, std::move(values));
}

Field Field::sample_scalar(std::shared_ptr<const Grid> grid, Placement placement,
                           const std::function<double(const Point3&)>& fn) {
  Field f(grid, placement, Shape::Scalar);
  for (std::size_t s = 0; s < f.sites(); ++s)
    f.values_[s] = fn(placement == Placement::Cell ? grid->cell_center(s) : grid->node_position(s));
  return f;
}

Field Field::sample_vector(std::shared_ptr<const Grid> grid, Placement placement,
                           const std::function<Vector(const Point3&)>& fn) {
  Field f(grid, placement, Shape::Vector);
  for (std::size_t s = 0; s < f.sites(); ++s)
    f.set_vector(s, fn(placement == Placement::Cell ? grid->cell_center(s) : grid->node_position(s)));
  return f;
}

Field Field::sample_matrix(std::shared_ptr<const Grid> grid, Placement placement,
                           const std::function<Matrix(const Point3&)>& fn) {
  Field f(grid, placement, Shape::Matrix);
  for (std::size_t s = 0; s < f.sites(); ++s)
    f.set_matrix(s, fn(placement == Placement::Cell ? grid->cell_center(s) : grid->node_position(s)));
  return f;
}

Matrix Field::matrix_at(std::size_t site) const {
  const int n = dim();
  Matrix m(n, n);
  const double* p = values_.data() + site * components_;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = p[i * n + j];
  return m;
}

void Field::set_matrix(std::size_t site, const Matrix& m) {
  const int n = dim();
  double* p = values_.data() + site * components_;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p[i * n + j] = m(i, j);
}

Vector Field::vector_at(std::size_t site) const {
  const int n = dim();
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = values_[site * components_ + i];
  return v;
}

void Field::set_vector(std::size_t site, const Vector& v) {
  for (int i = 0; i < dim(); ++i) values_[site * components_ + i] = v(i);
}

Field Field::on_grid(std::shared_ptr<const Grid> grid) const {
  if (grid->cells() != grid_->cells() || grid->dim() != grid_->dim() || grid->mask() != grid_->mask())
    throw ParameterError("target grid layout differs");
  return Field(std::move(grid), placement_, shape_, values_);
}

double Field::magnitude(std::size_t site) const {
  double s = 0.0;
  for (double v : at(site)) s += v * v;
  return std::sqrt(s);
}

bool Field::site_active(std::size_t site) const {
  return placement_ == Placement::Cell ? grid_->is_active(site) : active_nodes_[site] != 0;
}

void Field::require_placement(Placement p, const char* what) const {
  if (placement_ != p)
    throw ParameterError(std::string(what) + (p == Placement::Cell ? " needs a cell field" : " needs a node field"));
}

Field axpy(const Field& a, double s, const Field& b) {
  if (a.placement() != b.placement() || a.components() != b.components() || a.sites() != b.sites())
    throw ParameterError("fields are not compatible");
  std::vector<double> out(a.values().begin(), a.values().end());
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * bv[i];
  return Field(a.grid_ptr(), a.placement(), a.shape(), std::move(out));
}

std::vector<double> active_mean(const Field& f) {
  std::vector<double> mean(f.components(), 0.0);
  std::size_t count = 0;
  for (std::size_t s = 0; s < f.sites(); ++s) {
    if (!f.site_active(s)) continue;
    ++count;
    auto v = f.at(s);
    for (int c = 0; c < f.components(); ++c) mean[c] += v[c];
  }
  for (auto& m : mean) m /= static_cast<double>(count);
  return mean;
}

double sup_norm(const Field& f) {
  double m = 0.0;
  for (std::size_t s = 0; s < f.sites(); ++s)
    if (f.site_active(s)) m = std::max(m, f.magnitude(s));
  return m;
}

}  // namespace osclab
