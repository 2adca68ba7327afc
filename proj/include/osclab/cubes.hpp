#pragma once

#include "osclab/field.hpp"
#include "osclab/grid.hpp"

#include <string>
#include <vector>

namespace osclab {

/// Axis-aligned cube of `side` cells anchored at integer cell coordinates.
struct Cube {
  Index3 anchor{0, 0, 0};
  int side = 1;

  friend bool operator==(const Cube&, const Cube&) = default;
};

enum class FamilyKind { All, Dyadic, ShiftedDyadic };

/// Which cubes a seminorm supremum ranges over.
///
/// Dyadic cubes have sides 2^k and anchors at multiples of 2^k. The
/// shifted family adds anchors offset by floor(2^k / 3) and
/// floor(2 * 2^k / 3) per axis.
struct CubeFamily {
  FamilyKind kind = FamilyKind::All;
  int max_side = 0;  ///< 0: unbounded
  /// Require a one-cell ring of active cells around each cube.
  bool margin = false;

  static CubeFamily all() { return {FamilyKind::All}; }
  static CubeFamily dyadic() { return {FamilyKind::Dyadic}; }
  static CubeFamily shifted_dyadic() { return {FamilyKind::ShiftedDyadic}; }
};

std::string to_string(FamilyKind kind);
/// Parses "all", "dyadic", "shifted-dyadic".
FamilyKind parse_family(const std::string& name);

/// Whether every cell of the cube (plus the margin ring, if requested)
/// is an active grid cell.
bool cube_valid(const Grid& grid, const Cube& cube, bool margin = false);

/// Valid cubes of the family in ascending side, then lexicographic anchor
/// order.
std::vector<Cube> enumerate_cubes(const Grid& grid, const CubeFamily& family);

/// Calls fn(cell) for every cell of the cube in row-major order.
template <class Fn>
void for_each_cell(const Grid& grid, const Cube& cube, Fn&& fn) {
  const int s = cube.side;
  const int kside = grid.dim() == 3 ? s : 1;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      for (int k = 0; k < kside; ++k)
        fn(grid.cell_index({cube.anchor[0] + i, cube.anchor[1] + j, grid.dim() == 3 ? cube.anchor[2] + k : 0}));
}

inline std::size_t cube_cell_count(const Grid& grid, const Cube& cube) {
  std::size_t c = 1;
  for (int a = 0; a < grid.dim(); ++a) c *= static_cast<std::size_t>(cube.side);
  return c;
}

/// Per-component cumulative sums and sums of squares over cells, for
/// O(1) cube sums and cube variances. Values are stored shifted by the
/// active-cell mean of each component, which keeps the variance identity
/// well conditioned.
class PrefixSums {
 public:
  explicit PrefixSums(const Field& field);

  int components() const { return components_; }
  /// Sum of component c over the cube's cells.
  double cube_sum(const Cube& cube, int c) const;
  /// Sum of squares of component c over the cube's cells.
  double cube_sum_squares(const Cube& cube, int c) const;
  /// Mean over the cube of |psi - <psi>_Q|^2 (Frobenius for matrices).
  double cube_variance(const Cube& cube) const;

 private:
  double box(const std::vector<double>& table, const Cube& cube, int c) const;

  const Grid* grid_;
  int components_;
  Index3 ext_;
  std::vector<double> shift_;
  std::vector<double> sums_;
  std::vector<double> squares_;
};

/// Average of each component over the cube; throws InvalidCubeError
/// when the cube is not valid for the field's grid.
std::vector<double> cube_average(const Field& field, const Cube& cube);

/// (mean over Q of |psi - <psi>_Q|^q)^(1/q); q >= 1.
double mean_oscillation(const Field& field, const Cube& cube, double q);

}  // namespace osclab
