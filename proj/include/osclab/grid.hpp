#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace osclab {

using Index3 = std::array<int, 3>;
using Point3 = std::array<double, 3>;

enum class BoundaryLabel : std::uint8_t { Dirichlet = 1, Traction = 2 };

/// Exterior face of the active region: the `side` (0 = low, 1 = high)
/// face of `cell` normal to `axis`.
struct Face {
  std::size_t cell;
  int axis;
  int side;
};

/// Uniform Cartesian grid of 2-D or 3-D cells with an active-cell mask.
///
/// Cells and nodes are indexed row-major with axis 0 slowest. Unused
/// axes (axis 2 when n = 2) have extent 1 for cells and nodes alike.
/// The active cells must form one face-connected component. Every
/// exterior face of the active region carries one boundary label; the
/// default is Dirichlet everywhere.
class Grid {
 public:
  Grid(int dim, Index3 cells, double spacing, Point3 origin = {0.0, 0.0, 0.0},
       std::vector<std::uint8_t> active = {});

  /// Fully active n-dimensional box with `cells` per axis.
  static Grid box(int dim, int cells_per_axis, double spacing, Point3 origin = {0.0, 0.0, 0.0});

  int dim() const { return dim_; }
  const Index3& cells() const { return cells_; }
  Index3 node_extent() const;
  double spacing() const { return h_; }
  const Point3& origin() const { return origin_; }

  std::size_t cell_count() const { return active_.size(); }
  std::size_t node_count() const;
  std::size_t active_cell_count() const { return active_count_; }
  bool is_active(std::size_t cell) const { return active_[cell] != 0; }
  const std::vector<std::uint8_t>& mask() const { return active_; }

  std::size_t cell_index(const Index3& c) const;
  Index3 cell_coords(std::size_t cell) const;
  std::size_t node_index(const Index3& c) const;
  Index3 node_coords(std::size_t node) const;

  Point3 cell_center(std::size_t cell) const;
  Point3 node_position(std::size_t node) const;

  /// Number of cell corners, 2^n.
  int corner_count() const { return 1 << dim_; }
  /// Corner node of `cell`; bit a of `corner` is the offset along axis a.
  std::size_t cell_node(std::size_t cell, int corner) const;

  double cell_volume() const;
  double face_area() const;

  /// Number of active cells in the box [anchor, anchor + side)^n; boxes
  /// leaving the grid count as partially inactive.
  std::size_t active_in_box(const Index3& anchor, int side) const;
  bool box_inside(const Index3& anchor, int side) const;

  const std::vector<Face>& boundary_faces() const { return faces_; }
  BoundaryLabel face_label(std::size_t face) const { return labels_[face]; }
  Point3 face_center(const Face& f) const;
  /// The 2^(n-1) nodes of a face.
  std::vector<std::size_t> face_nodes(const Face& f) const;
  /// Unit outward normal direction is +/- e_axis; returned as a sign.
  static int outward_sign(const Face& f) { return f.side == 0 ? -1 : 1; }

  /// Copy with labels chosen by `fn` for every exterior face.
  Grid with_labels(const std::function<BoundaryLabel(const Face&, const Point3&)>& fn) const;

  /// Copy with spacing scaled by `lambda` and origin mapped to
  /// lambda * origin + shift. Cell values of fields carry over unchanged.
  Grid rescaled(double lambda, const Point3& shift) const;

  /// Nodes touched by at least one active cell.
  std::vector<std::uint8_t> active_nodes() const;
  /// Nodes lying on a Dirichlet-labelled face.
  std::vector<std::uint8_t> dirichlet_nodes() const;
  bool has_dirichlet() const;

 private:
  void build_boundary();
  void check_connected() const;

  int dim_;
  Index3 cells_;
  double h_;
  Point3 origin_;
  std::vector<std::uint8_t> active_;
  std::size_t active_count_ = 0;
  std::vector<std::uint32_t> active_prefix_;
  std::vector<Face> faces_;
  std::vector<BoundaryLabel> labels_;
};

}  // namespace osclab
