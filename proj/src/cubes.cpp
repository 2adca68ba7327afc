#include "osclab/cubes.hpp"

#include "osclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace osclab {

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::All: return "all";
    case FamilyKind::Dyadic: return "dyadic";
    case FamilyKind::ShiftedDyadic: return "shifted-dyadic";
  }
  return "all";
}

FamilyKind parse_family(const std::string& name) {
  if (name == "all") return FamilyKind::All;
  if (name == "dyadic") return FamilyKind::Dyadic;
  if (name == "shifted-dyadic" || name == "shifted_dyadic") return FamilyKind::ShiftedDyadic;
  throw ParameterError("unknown cube family '" + name + "'");
}

bool cube_valid(const Grid& grid, const Cube& cube, bool margin) {
  if (margin) {
    Index3 a = cube.anchor;
    for (int d = 0; d < grid.dim(); ++d) a[d] -= 1;
    const Cube ring{a, cube.side + 2};
    return grid.active_in_box(ring.anchor, ring.side) == cube_cell_count(grid, ring);
  }
  return grid.active_in_box(cube.anchor, cube.side) == cube_cell_count(grid, cube);
}

namespace {

// Per-axis anchor candidates for one side length.
std::vector<int> axis_anchors(FamilyKind kind, int side, int extent) {
  std::set<int> out;
  if (kind == FamilyKind::All) {
    for (int a = 0; a + side <= extent; ++a) out.insert(a);
  } else {
    std::vector<int> offsets{0};
    if (kind == FamilyKind::ShiftedDyadic) {
      offsets.push_back(side / 3);
      offsets.push_back(2 * side / 3);
    }
    for (int off : offsets)
      for (int a = off; a + side <= extent; a += side) out.insert(a);
  }
  return {out.begin(), out.end()};
}

}  // namespace

std::vector<Cube> enumerate_cubes(const Grid& grid, const CubeFamily& family) {
  const int n = grid.dim();
  int max_side = grid.cells()[0];
  for (int a = 1; a < n; ++a) max_side = std::min(max_side, grid.cells()[a]);
  if (family.max_side > 0) max_side = std::min(max_side, family.max_side);

  std::vector<int> sides;
  if (family.kind == FamilyKind::All) {
    for (int s = 1; s <= max_side; ++s) sides.push_back(s);
  } else {
    for (int s = 1; s <= max_side; s *= 2) sides.push_back(s);
  }

  std::vector<Cube> cubes;
  for (int s : sides) {
    std::array<std::vector<int>, 3> anchors;
    for (int a = 0; a < 3; ++a) anchors[a] = a < n ? axis_anchors(family.kind, s, grid.cells()[a]) : std::vector<int>{0};
    for (int i : anchors[0])
      for (int j : anchors[1])
        for (int k : anchors[2]) {
          Cube c{{i, j, k}, s};
          if (cube_valid(grid, c, family.margin)) cubes.push_back(c);
        }
  }
  return cubes;
}

PrefixSums::PrefixSums(const Field& field)
    : grid_(&field.grid()), components_(field.components()), ext_(field.grid().cells()) {
  field.require_placement(Placement::Cell, "prefix sums");
  shift_ = active_mean(field);
  const std::size_t size = static_cast<std::size_t>(ext_[0] + 1) * (ext_[1] + 1) * (ext_[2] + 1) * components_;
  sums_.assign(size, 0.0);
  squares_.assign(size, 0.0);
  auto idx = [&](int i, int j, int k, int c) {
    return ((static_cast<std::size_t>(i) * (ext_[1] + 1) + j) * (ext_[2] + 1) + k) * components_ + c;
  };
  for (int i = 0; i < ext_[0]; ++i)
    for (int j = 0; j < ext_[1]; ++j)
      for (int k = 0; k < ext_[2]; ++k) {
        const std::size_t cell = grid_->cell_index({i, j, k});
        const bool active = grid_->is_active(cell);
        auto v = field.at(cell);
        for (int c = 0; c < components_; ++c) {
          const double x = active ? v[c] - shift_[c] : 0.0;
          for (auto* table : {&sums_, &squares_}) {
            auto& t = *table;
            const double val = table == &sums_ ? x : x * x;
            t[idx(i + 1, j + 1, k + 1, c)] = val + t[idx(i, j + 1, k + 1, c)] + t[idx(i + 1, j, k + 1, c)] +
                                              t[idx(i + 1, j + 1, k, c)] - t[idx(i, j, k + 1, c)] -
                                              t[idx(i, j + 1, k, c)] - t[idx(i + 1, j, k, c)] + t[idx(i, j, k, c)];
          }
        }
      }
}

double PrefixSums::box(const std::vector<double>& table, const Cube& cube, int c) const {
  const bool three = grid_->dim() == 3;
  const Index3 lo{cube.anchor[0], cube.anchor[1], three ? cube.anchor[2] : 0};
  const Index3 hi{lo[0] + cube.side, lo[1] + cube.side, three ? lo[2] + cube.side : 1};
  auto at = [&](int i, int j, int k) {
    return table[((static_cast<std::size_t>(i) * (ext_[1] + 1) + j) * (ext_[2] + 1) + k) * components_ + c];
  };
  return at(hi[0], hi[1], hi[2]) - at(lo[0], hi[1], hi[2]) - at(hi[0], lo[1], hi[2]) - at(hi[0], hi[1], lo[2]) +
         at(lo[0], lo[1], hi[2]) + at(lo[0], hi[1], lo[2]) + at(hi[0], lo[1], lo[2]) - at(lo[0], lo[1], lo[2]);
}

double PrefixSums::cube_sum(const Cube& cube, int c) const {
  return box(sums_, cube, c) + static_cast<double>(cube_cell_count(*grid_, cube)) * shift_[c];
}

double PrefixSums::cube_sum_squares(const Cube& cube, int c) const {
  // sum (x + m)^2 = sum x^2 + 2 m sum x + N m^2, x the shifted values
  const double count = static_cast<double>(cube_cell_count(*grid_, cube));
  return box(squares_, cube, c) + 2.0 * shift_[c] * box(sums_, cube, c) + count * shift_[c] * shift_[c];
}

double PrefixSums::cube_variance(const Cube& cube) const {
  const double count = static_cast<double>(cube_cell_count(*grid_, cube));
  double var = 0.0;
  for (int c = 0; c < components_; ++c) {
    const double mean = box(sums_, cube, c) / count;
    var += box(squares_, cube, c) / count - mean * mean;
  }
  return std::max(var, 0.0);
}

std::vector<double> cube_average(const Field& field, const Cube& cube) {
  field.require_placement(Placement::Cell, "cube average");
  if (!cube_valid(field.grid(), cube)) throw InvalidCubeError("cube leaves the active region");
  std::vector<double> mean(field.components(), 0.0);
  for_each_cell(field.grid(), cube, [&](std::size_t cell) {
    auto v = field.at(cell);
    for (int c = 0; c < field.components(); ++c) mean[c] += v[c];
  });
  const double count = static_cast<double>(cube_cell_count(field.grid(), cube));
  for (auto& m : mean) m /= count;
  return mean;
}

double mean_oscillation(const Field& field, const Cube& cube, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw ParameterError("oscillation exponent q must be >= 1");
  const auto mean = cube_average(field, cube);
  const int comps = field.components();
  double acc = 0.0;
  for_each_cell(field.grid(), cube, [&](std::size_t cell) {
    auto v = field.at(cell);
    double d2 = 0.0;
    for (int c = 0; c < comps; ++c) d2 += (v[c] - mean[c]) * (v[c] - mean[c]);
    acc += q == 2.0 ? d2 : std::pow(std::sqrt(d2), q);
  });
  acc /= static_cast<double>(cube_cell_count(field.grid(), cube));
  return q == 1.0 ? acc : std::pow(acc, 1.0 / q);
}

}  // namespace osclab
