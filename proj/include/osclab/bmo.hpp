#pragma once

#include "osclab/cubes.hpp"
#include "osclab/field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace osclab {

/// Result of a seminorm supremum and the cube attaining it.
struct SeminormReport {
  double value = 0.0;
  Cube argmax;
  CubeFamily family;
  double q = 1.0;
  std::size_t cube_count = 0;
};

/// Exhaustive ALL enumeration is used up to these sizes; larger grids
/// fall back to the shifted dyadic family.
inline constexpr int kExhaustiveLimit2d = 64;
inline constexpr int kExhaustiveLimit3d = 16;

/// ALL when the grid is small enough for exhaustive search, else
/// SHIFTED_DYADIC.
CubeFamily default_family(const Grid& grid);

/// sup over the family of mean_oscillation(field, Q, q). q = 2 uses the
/// prefix-sum variance identity, other q a direct loop per cube. Ties
/// go to the first cube in enumeration order.
SeminormReport bmo_seminorm(const Field& field, const CubeFamily& family, double q = 1.0);
SeminormReport bmo_seminorm(const Field& field, const std::vector<Cube>& cubes, const CubeFamily& family, double q);

/// Reference q = 2 seminorm by direct per-cube loops (no prefix sums).
SeminormReport bmo_seminorm_direct(const Field& field, const CubeFamily& family, double q);

/// seminorm(ALL, 1) + |mean over active cells|.
double bmo_norm(const Field& field);

/// sup over the family of the double average of |psi(z) - psi(x)|.
/// O(side^(2n)) per cube; meant for small grids.
double star_seminorm(const Field& field, const CubeFamily& family);

/// seminorm(ALL, q) / seminorm(ALL, 1); nullopt for fields with zero
/// q = 1 seminorm.
std::optional<double> jn_equivalence_ratio(const Field& field, double q);

/// L^r norm with cell quadrature: (sum |psi|^r h^n)^(1/r).
double lp_norm(const Field& field, double r);

/// ||psi||_q / (||psi||_BMO^(1-p/q) ||psi||_p^(p/q)) with 1 <= p < q;
/// nullopt when the denominator vanishes.
std::optional<double> interpolation_ratio(const Field& field, double p, double q);

struct DominationCheck {
  bool pass = false;
  double slack = 0.0;  ///< 2 max|psi| - seminorm
};

/// seminorm(ALL, 1) <= 2 max|psi|.
DominationCheck linfty_domination_check(const Field& field);

/// Running maximum of ratios sampled for one of the inequality constants.
struct ConstantEstimate {
  std::string name;
  double value = 0.0;
  std::size_t samples = 0;
  std::size_t degenerate = 0;
  std::string description;
  std::vector<int> resolutions;

  void add(std::optional<double> ratio);
  void merge(const ConstantEstimate& other);
};

}  // namespace osclab
