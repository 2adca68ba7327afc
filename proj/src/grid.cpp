#include "osclab/grid.hpp"

#include "osclab/error.hpp"

#include <cmath>
#include <queue>
#include <string>

namespace osclab {

namespace {

std::size_t prefix_index(const Index3& ext, int i, int j, int k) {
  return (static_cast<std::size_t>(i) * (ext[1] + 1) + j) * (ext[2] + 1) + k;
}

}  // namespace

Grid::Grid(int dim, Index3 cells, double spacing, Point3 origin, std::vector<std::uint8_t> active)
    : dim_(dim), cells_(cells), h_(spacing), origin_(origin), active_(std::move(active)) {
  if (dim_ != 2 && dim_ != 3) throw ParameterError("grid dimension must be 2 or 3");
  if (dim_ == 2) {
    cells_[2] = 1;
    origin_[2] = 0.0;
  }
  for (int a = 0; a < dim_; ++a)
    if (cells_[a] < 1) throw ParameterError("grid needs at least one cell per axis");
  if (!(h_ > 0.0) || !std::isfinite(h_)) throw ParameterError("grid spacing must be positive");
  const std::size_t total = static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2];
  if (active_.empty()) active_.assign(total, 1);
  if (active_.size() != total) throw ParameterError("mask size does not match cell count");
  for (auto& a : active_) a = a ? 1 : 0;

  active_prefix_.assign(static_cast<std::size_t>(cells_[0] + 1) * (cells_[1] + 1) * (cells_[2] + 1), 0);
  for (int i = 0; i < cells_[0]; ++i)
    for (int j = 0; j < cells_[1]; ++j)
      for (int k = 0; k < cells_[2]; ++k) {
        const std::uint32_t v = active_[cell_index({i, j, k})];
        active_count_ += v;
        active_prefix_[prefix_index(cells_, i + 1, j + 1, k + 1)] =
            v + active_prefix_[prefix_index(cells_, i, j + 1, k + 1)] +
            active_prefix_[prefix_index(cells_, i + 1, j, k + 1)] +
            active_prefix_[prefix_index(cells_, i + 1, j + 1, k)] -
            active_prefix_[prefix_index(cells_, i, j, k + 1)] -
            active_prefix_[prefix_index(cells_, i, j + 1, k)] -
            active_prefix_[prefix_index(cells_, i + 1, j, k)] + active_prefix_[prefix_index(cells_, i, j, k)];
      }
  if (active_count_ == 0) throw ParameterError("grid has no active cells");
  check_connected();
  build_boundary();
}

Grid Grid::box(int dim, int cells_per_axis, double spacing, Point3 origin) {
  return Grid(dim, {cells_per_axis, cells_per_axis, dim == 3 ? cells_per_axis : 1}, spacing, origin);
}

Index3 Grid::node_extent() const {
  return {cells_[0] + 1, cells_[1] + 1, dim_ == 3 ? cells_[2] + 1 : 1};
}

std::size_t Grid::node_count() const {
  const auto e = node_extent();
  return static_cast<std::size_t>(e[0]) * e[1] * e[2];
}

std::size_t Grid::cell_index(const Index3& c) const {
  return (static_cast<std::size_t>(c[0]) * cells_[1] + c[1]) * cells_[2] + c[2];
}

Index3 Grid::cell_coords(std::size_t cell) const {
  Index3 c{};
  c[2] = static_cast<int>(cell % cells_[2]);
  cell /= cells_[2];
  c[1] = static_cast<int>(cell % cells_[1]);
  c[0] = static_cast<int>(cell / cells_[1]);
  return c;
}

std::size_t Grid::node_index(const Index3& c) const {
  const auto e = node_extent();
  return (static_cast<std::size_t>(c[0]) * e[1] + c[1]) * e[2] + c[2];
}

Index3 Grid::node_coords(std::size_t node) const {
  const auto e = node_extent();
  Index3 c{};
  c[2] = static_cast<int>(node % e[2]);
  node /= e[2];
  c[1] = static_cast<int>(node % e[1]);
  c[0] = static_cast<int>(node / e[1]);
  return c;
}

Point3 Grid::cell_center(std::size_t cell) const {
  const auto c = cell_coords(cell);
  Point3 p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) p[a] = origin_[a] + (c[a] + 0.5) * h_;
  return p;
}

Point3 Grid::node_position(std::size_t node) const {
  const auto c = node_coords(node);
  Point3 p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) p[a] = origin_[a] + c[a] * h_;
  return p;
}

std::size_t Grid::cell_node(std::size_t cell, int corner) const {
  auto c = cell_coords(cell);
  for (int a = 0; a < dim_; ++a) c[a] += (corner >> a) & 1;
  return node_index(c);
}

double Grid::cell_volume() const { return std::pow(h_, dim_); }
double Grid::face_area() const { return std::pow(h_, dim_ - 1); }

bool Grid::box_inside(const Index3& anchor, int side) const {
  if (side < 1) return false;
  for (int a = 0; a < dim_; ++a)
    if (anchor[a] < 0 || anchor[a] + side > cells_[a]) return false;
  return true;
}

std::size_t Grid::active_in_box(const Index3& anchor, int side) const {
  if (!box_inside(anchor, side)) return 0;
  Index3 lo{anchor[0], anchor[1], dim_ == 3 ? anchor[2] : 0};
  Index3 hi{anchor[0] + side, anchor[1] + side, dim_ == 3 ? anchor[2] + side : 1};
  std::int64_t s = 0;
  for (int corner = 0; corner < 8; ++corner) {
    const int i = (corner & 1) ? hi[0] : lo[0];
    const int j = (corner & 2) ? hi[1] : lo[1];
    const int k = (corner & 4) ? hi[2] : lo[2];
    const int lows = !(corner & 1) + !(corner & 2) + !(corner & 4);
    const std::int64_t v = active_prefix_[prefix_index(cells_, i, j, k)];
    s += (lows % 2 == 0) ? v : -v;
  }
  return static_cast<std::size_t>(s);
}

void Grid::check_connected() const {
  std::vector<std::uint8_t> seen(active_.size(), 0);
  std::size_t start = 0;
  while (!active_[start]) ++start;
  std::queue<std::size_t> todo;
  todo.push(start);
  seen[start] = 1;
  std::size_t reached = 0;
  while (!todo.empty()) {
    const std::size_t cell = todo.front();
    todo.pop();
    ++reached;
    const auto c = cell_coords(cell);
    for (int a = 0; a < dim_; ++a)
      for (int d : {-1, 1}) {
        Index3 nb = c;
        nb[a] += d;
        if (nb[a] < 0 || nb[a] >= cells_[a]) continue;
        const std::size_t idx = cell_index(nb);
        if (active_[idx] && !seen[idx]) {
          seen[idx] = 1;
          todo.push(idx);
        }
      }
  }
  if (reached != active_count_)
    throw ParameterError("active cells are not connected (" + std::to_string(reached) + " of " +
                         std::to_string(active_count_) + " reachable)");
}

void Grid::build_boundary() {
  faces_.clear();
  for (std::size_t cell = 0; cell < active_.size(); ++cell) {
    if (!active_[cell]) continue;
    const auto c = cell_coords(cell);
    for (int a = 0; a < dim_; ++a)
      for (int side = 0; side < 2; ++side) {
        Index3 nb = c;
        nb[a] += side == 0 ? -1 : 1;
        const bool outside = nb[a] < 0 || nb[a] >= cells_[a];
        if (outside || !active_[cell_index(nb)]) faces_.push_back({cell, a, side});
      }
  }
  labels_.assign(faces_.size(), BoundaryLabel::Dirichlet);
}

Point3 Grid::face_center(const Face& f) const {
  Point3 p = cell_center(f.cell);
  p[f.axis] += (f.side == 0 ? -0.5 : 0.5) * h_;
  return p;
}

std::vector<std::size_t> Grid::face_nodes(const Face& f) const {
  std::vector<std::size_t> nodes;
  for (int corner = 0; corner < corner_count(); ++corner)
    if (((corner >> f.axis) & 1) == f.side) nodes.push_back(cell_node(f.cell, corner));
  return nodes;
}

Grid Grid::with_labels(const std::function<BoundaryLabel(const Face&, const Point3&)>& fn) const {
  Grid g = *this;
  for (std::size_t i = 0; i < g.faces_.size(); ++i) g.labels_[i] = fn(g.faces_[i], g.face_center(g.faces_[i]));
  return g;
}

Grid Grid::rescaled(double lambda, const Point3& shift) const {
  if (!(lambda > 0.0)) throw ParameterError("rescaling factor must be positive");
  Grid g = *this;
  g.h_ = h_ * lambda;
  for (int a = 0; a < dim_; ++a) g.origin_[a] = lambda * origin_[a] + shift[a];
  return g;
}

std::vector<std::uint8_t> Grid::active_nodes() const {
  std::vector<std::uint8_t> flags(node_count(), 0);
  for (std::size_t cell = 0; cell < active_.size(); ++cell)
    if (active_[cell])
      for (int corner = 0; corner < corner_count(); ++corner) flags[cell_node(cell, corner)] = 1;
  return flags;
}

std::vector<std::uint8_t> Grid::dirichlet_nodes() const {
  std::vector<std::uint8_t> flags(node_count(), 0);
  for (std::size_t i = 0; i < faces_.size(); ++i)
    if (labels_[i] == BoundaryLabel::Dirichlet)
      for (auto node : face_nodes(faces_[i])) flags[node] = 1;
  return flags;
}

bool Grid::has_dirichlet() const {
  for (auto l : labels_)
    if (l == BoundaryLabel::Dirichlet) return true;
  return false;
}

}  // namespace osclab
