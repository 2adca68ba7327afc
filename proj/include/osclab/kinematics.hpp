#pragma once

#include "osclab/bmo.hpp"
#include "osclab/field.hpp"
#include "osclab/linalg.hpp"

#include <optional>

namespace osclab {

/// Node-placed vector field read either as a deformation u or as a
/// displacement w with u = id + w.
struct DeformationField {
  Field values;
  bool is_displacement = false;

  /// Samples fn at the nodes.
  static DeformationField deformation(std::shared_ptr<const Grid> grid, const std::function<Vector(const Point3&)>& fn);
  static DeformationField displacement(std::shared_ptr<const Grid> grid, const std::function<Vector(const Point3&)>& fn);
  /// u = id.
  static DeformationField identity(std::shared_ptr<const Grid> grid);

  const Grid& grid() const { return values.grid(); }
  /// The deformation u (adds the node positions for displacements).
  Field as_deformation() const;
  /// The displacement u - id.
  Field as_displacement() const;
};

/// Cell gradient of a node vector field: the multilinear element gradient
/// evaluated at the cell center (average of the 2^(n-1) one-sided node
/// differences along each axis). Exact for affine fields.
Field gradient(const Field& node_vector);
/// Gradient of the deformation (identity added for displacements).
Field gradient(const DeformationField& u);

/// (grad + grad^T) / 2 per cell.
Field sym_gradient(const Field& node_vector);
Field sym_gradient(const DeformationField& u);

/// Pointwise symmetric part of a cell matrix field.
Field symmetric_part(const Field& matrix_field);

/// C = F^T F per cell, F = grad u.
Field cauchy_green(const DeformationField& u);
Field cauchy_green_from_gradient(const Field& f);

/// E = (C - I) / 2 per cell.
Field green_st_venant(const DeformationField& u);

/// det F per cell.
Field jacobian(const Field& gradient_field);

/// Smallest det grad u over active cells.
double min_jacobian(const Field& gradient_field);

/// Throws InadmissibleError unless det grad u > threshold on every
/// active cell.
void require_positive_jacobian(const Field& gradient_field, double threshold);

/// |F - R| with R the rotation factor of the polar decomposition F = R U.
/// Throws InadmissibleError when det F <= 0.
double distance_to_rotations(const Matrix& f);

struct RotationFit {
  Matrix rotation;
  double residual = 0.0;  ///< |<grad u - Q>_Omega|
};

/// Rotation Q minimizing the sum over cells of |F - Q|^2: the closest
/// rotation to the cell average of F. Throws NumericalError when that
/// average is singular.
RotationFit best_fit_rotation(const Field& gradient_field);

/// max over active cells of |field - I|.
double sup_distance_to_identity(const Field& matrix_field);

/// (||grad u||_BMO + |<grad u - Q_u>|) / ||C_u - I||_inf, or nullopt when
/// C_u = I up to rounding. The seminorm uses `family`.
std::optional<double> rigidity_probe(const DeformationField& u, const CubeFamily& family = CubeFamily::all());

}  // namespace osclab
