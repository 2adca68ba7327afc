#pragma once

#include "osclab/linalg.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace osclab {

struct LameParameters {
  double lambda = 1.0;
  double mu = 1.0;
};

/// Stored energy sigma(x, C) in strain form, with its first and second
/// derivatives in C. The material point x is a cell index; parameter
/// fields with one entry are constant over the grid.
///
/// Derivatives are taken on Sym(n): D sigma(C) : B and D^2 sigma(C)[B]
/// are the first and second directional derivatives along symmetric B.
/// Every evaluator rejects C that is not symmetric positive definite.
class MaterialModel {
 public:
  MaterialModel(std::string name, std::vector<double> lambda, std::vector<double> mu);
  virtual ~MaterialModel() = default;

  const std::string& name() const { return name_; }
  /// False when the derivatives come from the finite-difference fallback.
  virtual bool analytic_derivatives() const { return false; }
  LameParameters parameters(std::size_t cell) const;
  /// Largest Lame modulus over the parameter fields; a stress scale.
  double modulus_scale() const;

  double energy(std::size_t cell, const Matrix& c) const;
  Matrix energy_gradient(std::size_t cell, const Matrix& c) const;
  Matrix energy_hessian_apply(std::size_t cell, const Matrix& c, const Matrix& b) const;

  /// Throws InadmissibleError unless c is symmetric with smallest
  /// eigenvalue above kSpdThreshold.
  static void require_spd(const Matrix& c);
  static constexpr double kSpdThreshold = 1e-10;

 protected:
  virtual double stored_energy(const LameParameters& p, const Matrix& c) const = 0;
  /// Defaults: central differences of stored_energy along an
  /// orthonormal basis of Sym(n).
  virtual Matrix stored_energy_gradient(const LameParameters& p, const Matrix& c) const;
  virtual Matrix stored_energy_hessian_apply(const LameParameters& p, const Matrix& c, const Matrix& b) const;

 private:
  std::string name_;
  std::vector<double> lambda_;
  std::vector<double> mu_;
};

/// sigma = (lambda/2)(tr E)^2 + mu tr(E^2), E = (C - I)/2.
class StVenantKirchhoff final : public MaterialModel {
 public:
  StVenantKirchhoff(std::vector<double> lambda, std::vector<double> mu);
  StVenantKirchhoff(double lambda, double mu) : StVenantKirchhoff(std::vector{lambda}, std::vector{mu}) {}
  bool analytic_derivatives() const override { return true; }

 protected:
  double stored_energy(const LameParameters& p, const Matrix& c) const override;
  Matrix stored_energy_gradient(const LameParameters& p, const Matrix& c) const override;
  Matrix stored_energy_hessian_apply(const LameParameters& p, const Matrix& c, const Matrix& b) const override;
};

/// sigma = (mu/2)(tr C - n) - mu ln J + (lambda/2)(ln J)^2, J = sqrt(det C).
class NeoHookean final : public MaterialModel {
 public:
  NeoHookean(std::vector<double> lambda, std::vector<double> mu);
  NeoHookean(double lambda, double mu) : NeoHookean(std::vector{lambda}, std::vector{mu}) {}
  bool analytic_derivatives() const override { return true; }

 protected:
  double stored_energy(const LameParameters& p, const Matrix& c) const override;
  Matrix stored_energy_gradient(const LameParameters& p, const Matrix& c) const override;
  Matrix stored_energy_hessian_apply(const LameParameters& p, const Matrix& c, const Matrix& b) const override;
};

/// Wraps another model's stored energy but differentiates it by finite
/// differences. Used to audit the fallback path.
class FiniteDifferenceModel final : public MaterialModel {
 public:
  explicit FiniteDifferenceModel(std::shared_ptr<const MaterialModel> inner);

 protected:
  double stored_energy(const LameParameters& p, const Matrix& c) const override;

 private:
  std::shared_ptr<const MaterialModel> inner_;
};

/// "svk" or "neo-hookean".
std::shared_ptr<const MaterialModel> make_material(const std::string& name, std::vector<double> lambda,
                                                   std::vector<double> mu);

/// W(F) = sigma(F^T F).
double stored_energy_of_gradient(const MaterialModel& model, std::size_t cell, const Matrix& f);

/// K = 2 D sigma(C).
Matrix second_pk(const MaterialModel& model, std::size_t cell, const Matrix& c);
/// S = F K(F^T F); det F > 0.
Matrix first_pk(const MaterialModel& model, std::size_t cell, const Matrix& f);
/// T = F K F^T / det F; det F > 0.
Matrix cauchy_stress(const MaterialModel& model, std::size_t cell, const Matrix& f);
/// C[B] = 4 D^2 sigma(C)[B].
Matrix elasticity_tensor_apply(const MaterialModel& model, std::size_t cell, const Matrix& c, const Matrix& b);

/// The elasticity tensor as a symmetric d x d matrix on the orthonormal
/// basis of Sym(n), d = n(n+1)/2.
Eigen::MatrixXd elasticity_matrix(const MaterialModel& model, std::size_t cell, const Matrix& c);

/// Analytic derivatives against central differences at one strain.
/// Errors are relative to max(|analytic|, modulus scale); the step is
/// 1e-5 max(|C|, 1) along unit directions.
struct DerivativeCheck {
  double stress_error = 0.0;    ///< K against central differences of 2 sigma
  double tensor_error = 0.0;    ///< C[B] against central differences of K along B
  double symmetry_error = 0.0;  ///< |B : C[E] - E : C[B]| / (modulus scale |B| |E|)
};

DerivativeCheck derivative_check(const MaterialModel& model, std::size_t cell, const Matrix& c, const Matrix& b,
                                 const Matrix& e);

struct SpatialQuadratic {
  double analytic = 0.0;           ///< C-term on sym(H^T F) plus K : H^T H
  double finite_difference = 0.0;  ///< second difference of W along H
  double gap = 0.0;                ///< |analytic - finite_difference|
  double relative_gap = 0.0;       ///< gap / (|C-term| + |K-term|)
};

/// H : A(F)[H] two ways, A the second derivative of W(F) = sigma(F^T F).
SpatialQuadratic spatial_tensor_quadratic(const MaterialModel& model, std::size_t cell, const Matrix& f,
                                          const Matrix& h);

struct PrincipalStresses {
  Vector values;  ///< ascending
  bool tension = false;
};

/// Eigenvalues of the Cauchy stress; tension when the smallest is >= -tol.
PrincipalStresses principal_stresses(const MaterialModel& model, std::size_t cell, const Matrix& f,
                                     double tol = 1e-12);

struct StrainSample {
  std::size_t cell = 0;
  Matrix c;
};

/// Half the smallest eigenvalue of M -> M : C(x, C)[M] on Sym(n) over
/// the samples, i.e. the largest beta with M : C[M] >= 2 beta |M|^2.
double positivity_margin(const MaterialModel& model, std::span<const StrainSample> samples);

/// Eigenvalue interval bounding the sampling region for SPD strains.
struct SpdBox {
  double lo = 0.5;
  double hi = 2.0;
};

/// Draws a symmetric matrix in the box by rejection: center (lo+hi)/2 I
/// plus entries uniform in +/-(hi-lo)/2; rejects draws with an
/// eigenvalue outside [lo, hi]. `rejected` counts the discarded draws.
Matrix sample_spd(std::mt19937_64& rng, int dim, const SpdBox& box, std::size_t& rejected);

struct TaylorConstants {
  double c = 0.0;      ///< third-order remainder constant
  double c_hat = 0.0;  ///< Lipschitz constant of D^2 sigma
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::string description;
};

/// Running maxima of
///   max(0, sigma(U) + E:D sigma(U) + 1/2 E:D^2 sigma(U)[E] - sigma(V)) / |E|^3
/// and (L:D^2 sigma(U)[L] - L:D^2 sigma(V)[L]) / (|V - U| |L|^2), E = V - U,
/// over `trials` accepted samples from the box.
TaylorConstants taylor_constants(const MaterialModel& model, int dim, const SpdBox& box, std::size_t trials,
                                 std::uint64_t seed, std::size_t cell = 0);

}  // namespace osclab
