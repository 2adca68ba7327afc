#include "osclab/bmo.hpp"

#include "osclab/error.hpp"
#include "osclab/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace osclab {

CubeFamily default_family(const Grid& grid) {
  const int limit = grid.dim() == 2 ? kExhaustiveLimit2d : kExhaustiveLimit3d;
  for (int a = 0; a < grid.dim(); ++a)
    if (grid.cells()[a] > limit) return CubeFamily::shifted_dyadic();
  return CubeFamily::all();
}

namespace {

struct Best {
  double value = -1.0;
  std::size_t index = 0;
};

template <class Eval>
SeminormReport supremum(const std::vector<Cube>& cubes, const CubeFamily& family, double q, Eval&& eval) {
  if (cubes.empty()) throw ParameterError("cube family is empty for this grid");
  std::vector<Best> partial(chunk_count(cubes.size()));
  parallel_chunks(cubes.size(), [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    Best best;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = eval(cubes[i]);
      if (v > best.value) best = {v, i};
    }
    partial[chunk] = best;
  });
  Best best;
  for (const auto& p : partial)
    if (p.value > best.value) best = p;
  SeminormReport r;
  r.value = best.value;
  r.argmax = cubes[best.index];
  r.family = family;
  r.q = q;
  r.cube_count = cubes.size();
  return r;
}

void check_q(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw ParameterError("oscillation exponent q must be >= 1");
}

// Degenerate when the oscillation is rounding noise relative to the values.
bool negligible(double seminorm, const Field& field) { return seminorm <= 1e-13 * std::max(sup_norm(field), 1e-300); }

}  // namespace

SeminormReport bmo_seminorm(const Field& field, const std::vector<Cube>& cubes, const CubeFamily& family, double q) {
  check_q(q);
  field.require_placement(Placement::Cell, "BMO seminorm");
  const PrefixSums prefix(field);
  const Grid& grid = field.grid();
  const int comps = field.components();
  if (q == 2.0) return supremum(cubes, family, q, [&](const Cube& c) { return std::sqrt(prefix.cube_variance(c)); });
  return supremum(cubes, family, q, [&](const Cube& cube) {
    const double count = static_cast<double>(cube_cell_count(grid, cube));
    double mean[9];
    for (int c = 0; c < comps; ++c) mean[c] = prefix.cube_sum(cube, c) / count;
    double acc = 0.0;
    for_each_cell(grid, cube, [&](std::size_t cell) {
      const double* v = field.at(cell).data();
      double d2 = 0.0;
      for (int c = 0; c < comps; ++c) d2 += (v[c] - mean[c]) * (v[c] - mean[c]);
      acc += q == 1.0 ? std::sqrt(d2) : std::pow(d2, 0.5 * q);
    });
    acc /= count;
    return q == 1.0 ? acc : std::pow(acc, 1.0 / q);
  });
}

SeminormReport bmo_seminorm(const Field& field, const CubeFamily& family, double q) {
  return bmo_seminorm(field, enumerate_cubes(field.grid(), family), family, q);
}

SeminormReport bmo_seminorm_direct(const Field& field, const CubeFamily& family, double q) {
  check_q(q);
  field.require_placement(Placement::Cell, "BMO seminorm");
  return supremum(enumerate_cubes(field.grid(), family), family, q,
                  [&](const Cube& c) { return mean_oscillation(field, c, q); });
}

double bmo_norm(const Field& field) {
  const auto mean = active_mean(field);
  double m2 = 0.0;
  for (double m : mean) m2 += m * m;
  return bmo_seminorm(field, CubeFamily::all(), 1.0).value + std::sqrt(m2);
}

double star_seminorm(const Field& field, const CubeFamily& family) {
  field.require_placement(Placement::Cell, "star seminorm");
  const Grid& grid = field.grid();
  const int comps = field.components();
  const auto cubes = enumerate_cubes(grid, family);
  if (cubes.empty()) throw ParameterError("cube family is empty for this grid");
  return supremum(cubes, family, 1.0, [&](const Cube& cube) {
    std::vector<std::size_t> cells;
    for_each_cell(grid, cube, [&](std::size_t cell) { cells.push_back(cell); });
    double acc = 0.0;
    for (std::size_t a = 0; a < cells.size(); ++a) {
      const double* x = field.at(cells[a]).data();
      for (std::size_t b = 0; b < cells.size(); ++b) {
        const double* z = field.at(cells[b]).data();
        double d2 = 0.0;
        for (int c = 0; c < comps; ++c) d2 += (z[c] - x[c]) * (z[c] - x[c]);
        acc += std::sqrt(d2);
      }
    }
    const double n = static_cast<double>(cells.size());
    return acc / (n * n);
  }).value;
}

std::optional<double> jn_equivalence_ratio(const Field& field, double q) {
  check_q(q);
  const auto cubes = enumerate_cubes(field.grid(), CubeFamily::all());
  const double base = bmo_seminorm(field, cubes, CubeFamily::all(), 1.0).value;
  if (negligible(base, field)) return std::nullopt;
  if (q == 1.0) return 1.0;
  return bmo_seminorm(field, cubes, CubeFamily::all(), q).value / base;
}

double lp_norm(const Field& field, double r) {
  if (!(r >= 1.0)) throw ParameterError("L^r norm needs r >= 1");
  field.require_placement(Placement::Cell, "L^r norm");
  double acc = 0.0;
  for (std::size_t s = 0; s < field.sites(); ++s)
    if (field.site_active(s)) acc += std::pow(field.magnitude(s), r);
  return std::pow(acc * field.grid().cell_volume(), 1.0 / r);
}

std::optional<double> interpolation_ratio(const Field& field, double p, double q) {
  if (!(p >= 1.0 && p < q && std::isfinite(q))) throw ParameterError("interpolation ratio needs 1 <= p < q < inf");
  const double norm_q = lp_norm(field, q);
  const double norm_p = lp_norm(field, p);
  const double bmo = bmo_norm(field);
  const double theta = p / q;
  const double denom = std::pow(bmo, 1.0 - theta) * std::pow(norm_p, theta);
  if (!(denom > 0.0)) return std::nullopt;
  return norm_q / denom;
}

DominationCheck linfty_domination_check(const Field& field) {
  const double seminorm = bmo_seminorm(field, CubeFamily::all(), 1.0).value;
  const double bound = 2.0 * sup_norm(field);
  return {seminorm <= bound, bound - seminorm};
}

void ConstantEstimate::add(std::optional<double> ratio) {
  ++samples;
  if (!ratio) {
    ++degenerate;
    return;
  }
  value = std::max(value, *ratio);
}

void ConstantEstimate::merge(const ConstantEstimate& other) {
  value = std::max(value, other.value);
  samples += other.samples;
  degenerate += other.degenerate;
  for (int r : other.resolutions)
    if (std::find(resolutions.begin(), resolutions.end(), r) == resolutions.end()) resolutions.push_back(r);
}

}  // namespace osclab
