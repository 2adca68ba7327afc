#include "osclab/material.hpp"

#include "osclab/error.hpp"
#include "osclab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace osclab {

MaterialModel::MaterialModel(std::string name, std::vector<double> lambda, std::vector<double> mu)
    : name_(std::move(name)), lambda_(std::move(lambda)), mu_(std::move(mu)) {
  if (lambda_.empty() || mu_.empty()) throw ParameterError("material parameters must not be empty");
  for (double v : lambda_)
    if (!std::isfinite(v)) throw ParameterError("lambda must be finite");
  for (double v : mu_)
    if (!std::isfinite(v)) throw ParameterError("mu must be finite");
}

LameParameters MaterialModel::parameters(std::size_t cell) const {
  auto pick = [cell](const std::vector<double>& v) {
    if (v.size() == 1) return v[0];
    if (cell >= v.size()) throw ParameterError("material parameter field is shorter than the grid");
    return v[cell];
  };
  return {pick(lambda_), pick(mu_)};
}

double MaterialModel::modulus_scale() const {
  double s = 0.0;
  for (double v : lambda_) s = std::max(s, std::abs(v));
  for (double v : mu_) s = std::max(s, std::abs(v));
  return s;
}

void MaterialModel::require_spd(const Matrix& c) {
  const double scale = std::max(c.norm(), 1.0);
  if ((c - c.transpose()).norm() > 1e-10 * scale) throw InadmissibleError("strain tensor is not symmetric");
  if (!(min_eigenvalue(c) > kSpdThreshold)) throw InadmissibleError("strain tensor is not positive definite");
}

double MaterialModel::energy(std::size_t cell, const Matrix& c) const {
  require_spd(c);
  return stored_energy(parameters(cell), c);
}

Matrix MaterialModel::energy_gradient(std::size_t cell, const Matrix& c) const {
  require_spd(c);
  return stored_energy_gradient(parameters(cell), c);
}

Matrix MaterialModel::energy_hessian_apply(std::size_t cell, const Matrix& c, const Matrix& b) const {
  require_spd(c);
  return stored_energy_hessian_apply(parameters(cell), c, b);
}

namespace {

double fd_step(const Matrix& c) { return 1e-5 * std::max(c.norm(), 1.0); }

}  // namespace

Matrix MaterialModel::stored_energy_gradient(const LameParameters& p, const Matrix& c) const {
  const int n = static_cast<int>(c.rows());
  const double t = fd_step(c);
  Matrix g = Matrix::Zero(n, n);
  for (const Matrix& e : symmetric_basis(n)) {
    const double d = (stored_energy(p, c + t * e) - stored_energy(p, c - t * e)) / (2.0 * t);
    g += d * e;
  }
  return g;
}

Matrix MaterialModel::stored_energy_hessian_apply(const LameParameters& p, const Matrix& c, const Matrix& b) const {
  const double bn = b.norm();
  if (bn == 0.0) return Matrix::Zero(c.rows(), c.cols());
  const double t = fd_step(c) / bn;
  const Matrix bs = sym(b);
  return (stored_energy_gradient(p, c + t * bs) - stored_energy_gradient(p, c - t * bs)) / (2.0 * t);
}

// St. Venant-Kirchhoff

StVenantKirchhoff::StVenantKirchhoff(std::vector<double> lambda, std::vector<double> mu)
    : MaterialModel("svk", std::move(lambda), std::move(mu)) {}

double StVenantKirchhoff::stored_energy(const LameParameters& p, const Matrix& c) const {
  const Matrix e = 0.5 * (c - identity(static_cast<int>(c.rows())));
  const double tr = e.trace();
  return 0.5 * p.lambda * tr * tr + p.mu * contract(e, e);
}

Matrix StVenantKirchhoff::stored_energy_gradient(const LameParameters& p, const Matrix& c) const {
  const int n = static_cast<int>(c.rows());
  const Matrix e = 0.5 * (c - identity(n));
  return 0.5 * (p.lambda * e.trace() * identity(n) + 2.0 * p.mu * e);
}

Matrix StVenantKirchhoff::stored_energy_hessian_apply(const LameParameters& p, const Matrix& c,
                                                      const Matrix& b) const {
  const int n = static_cast<int>(c.rows());
  return 0.25 * (p.lambda * b.trace() * identity(n) + 2.0 * p.mu * b);
}

// Neo-Hookean

NeoHookean::NeoHookean(std::vector<double> lambda, std::vector<double> mu)
    : MaterialModel("neo-hookean", std::move(lambda), std::move(mu)) {}

double NeoHookean::stored_energy(const LameParameters& p, const Matrix& c) const {
  const double log_j = 0.5 * std::log(c.determinant());
  return 0.5 * p.mu * (c.trace() - static_cast<double>(c.rows())) - p.mu * log_j + 0.5 * p.lambda * log_j * log_j;
}

Matrix NeoHookean::stored_energy_gradient(const LameParameters& p, const Matrix& c) const {
  const int n = static_cast<int>(c.rows());
  const double log_j = 0.5 * std::log(c.determinant());
  const Matrix inv = c.inverse();
  return 0.5 * p.mu * (identity(n) - inv) + 0.5 * p.lambda * log_j * inv;
}

Matrix NeoHookean::stored_energy_hessian_apply(const LameParameters& p, const Matrix& c, const Matrix& b) const {
  const double log_j = 0.5 * std::log(c.determinant());
  const Matrix inv = c.inverse();
  const Matrix ibi = inv * b * inv;
  return (0.5 * p.mu - 0.5 * p.lambda * log_j) * ibi + 0.25 * p.lambda * (inv * b).trace() * inv;
}

FiniteDifferenceModel::FiniteDifferenceModel(std::shared_ptr<const MaterialModel> inner)
    : MaterialModel(inner->name() + "+fd", {1.0}, {1.0}), inner_(std::move(inner)) {}

double FiniteDifferenceModel::stored_energy(const LameParameters&, const Matrix& c) const {
  return inner_->energy(0, c);
}

std::shared_ptr<const MaterialModel> make_material(const std::string& name, std::vector<double> lambda,
                                                   std::vector<double> mu) {
  if (name == "svk") return std::make_shared<StVenantKirchhoff>(std::move(lambda), std::move(mu));
  if (name == "neo-hookean") return std::make_shared<NeoHookean>(std::move(lambda), std::move(mu));
  throw ParameterError("unknown material model '" + name + "'");
}

double stored_energy_of_gradient(const MaterialModel& model, std::size_t cell, const Matrix& f) {
  return model.energy(cell, f.transpose() * f);
}

Matrix second_pk(const MaterialModel& model, std::size_t cell, const Matrix& c) {
  return 2.0 * model.energy_gradient(cell, c);
}

Matrix first_pk(const MaterialModel& model, std::size_t cell, const Matrix& f) {
  if (!(f.determinant() > 0.0)) throw InadmissibleError("first Piola-Kirchhoff stress needs det F > 0");
  return f * second_pk(model, cell, f.transpose() * f);
}

Matrix cauchy_stress(const MaterialModel& model, std::size_t cell, const Matrix& f) {
  const double det = f.determinant();
  if (!(det > 0.0)) throw InadmissibleError("Cauchy stress needs det F > 0");
  const Matrix t = f * second_pk(model, cell, f.transpose() * f) * f.transpose() / det;
  return sym(t);
}

Matrix elasticity_tensor_apply(const MaterialModel& model, std::size_t cell, const Matrix& c, const Matrix& b) {
  return 4.0 * model.energy_hessian_apply(cell, c, b);
}

Eigen::MatrixXd elasticity_matrix(const MaterialModel& model, std::size_t cell, const Matrix& c) {
  const auto basis = symmetric_basis(static_cast<int>(c.rows()));
  const int d = static_cast<int>(basis.size());
  Eigen::MatrixXd m(d, d);
  for (int b = 0; b < d; ++b) {
    const Matrix cb = elasticity_tensor_apply(model, cell, c, basis[b]);
    for (int a = 0; a < d; ++a) m(a, b) = contract(basis[a], cb);
  }
  return 0.5 * (m + m.transpose());
}

DerivativeCheck derivative_check(const MaterialModel& model, std::size_t cell, const Matrix& c, const Matrix& b,
                                 const Matrix& e) {
  const int n = static_cast<int>(c.rows());
  const double scale = model.modulus_scale();
  const double t = 1e-5 * std::max(c.norm(), 1.0);
  DerivativeCheck out;

  const Matrix k = second_pk(model, cell, c);
  Matrix k_fd = Matrix::Zero(n, n);
  for (const Matrix& basis : symmetric_basis(n))
    k_fd += (model.energy(cell, c + t * basis) - model.energy(cell, c - t * basis)) / t * basis;
  out.stress_error = (k - k_fd).norm() / std::max(k.norm(), scale);

  const Matrix bs = sym(b) / sym(b).norm();
  const Matrix cb = elasticity_tensor_apply(model, cell, c, bs);
  const Matrix cb_fd = (second_pk(model, cell, c + t * bs) - second_pk(model, cell, c - t * bs)) / t;
  out.tensor_error = (cb - cb_fd).norm() / std::max(cb.norm(), scale);

  const Matrix es = sym(e);
  const double lhs = contract(b, elasticity_tensor_apply(model, cell, c, es));
  const double rhs = contract(es, elasticity_tensor_apply(model, cell, c, sym(b)));
  out.symmetry_error = std::abs(lhs - rhs) / (scale * std::max(b.norm() * e.norm(), 1e-300));
  return out;
}

SpatialQuadratic spatial_tensor_quadratic(const MaterialModel& model, std::size_t cell, const Matrix& f,
                                          const Matrix& h) {
  if (!(f.determinant() > 0.0)) throw InadmissibleError("spatial elasticity tensor needs det F > 0");
  const Matrix c = f.transpose() * f;
  const Matrix b = 0.5 * (h.transpose() * f + f.transpose() * h);
  const double c_term = contract(b, elasticity_tensor_apply(model, cell, c, b));
  const double k_term = contract(second_pk(model, cell, c), h.transpose() * h);

  SpatialQuadratic out;
  out.analytic = c_term + k_term;
  const double hn = h.norm();
  if (hn > 0.0) {
    const double t = 1e-4 * std::max(f.norm(), 1.0) / hn;
    const double w0 = stored_energy_of_gradient(model, cell, f);
    const double wp = stored_energy_of_gradient(model, cell, f + t * h);
    const double wm = stored_energy_of_gradient(model, cell, f - t * h);
    out.finite_difference = (wp - 2.0 * w0 + wm) / (t * t);
  }
  out.gap = std::abs(out.analytic - out.finite_difference);
  const double scale = std::abs(c_term) + std::abs(k_term);
  out.relative_gap = scale > 0.0 ? out.gap / scale : out.gap;
  return out;
}

PrincipalStresses principal_stresses(const MaterialModel& model, std::size_t cell, const Matrix& f, double tol) {
  PrincipalStresses out;
  out.values = symmetric_eigenvalues(cauchy_stress(model, cell, f));
  out.tension = out.values(0) >= -tol;
  return out;
}

double positivity_margin(const MaterialModel& model, std::span<const StrainSample> samples) {
  if (samples.empty()) throw ParameterError("positivity margin needs at least one sample");
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(elasticity_matrix(model, s.cell, s.c), Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, es.eigenvalues()(0));
  }
  return 0.5 * lowest;
}

Matrix sample_spd(std::mt19937_64& rng, int dim, const SpdBox& box, std::size_t& rejected) {
  if (!(box.lo > 0.0 && box.hi > box.lo)) throw ParameterError("SPD box needs 0 < lo < hi");
  const double center = 0.5 * (box.lo + box.hi);
  const double radius = 0.5 * (box.hi - box.lo);
  std::uniform_real_distribution<double> u(-radius, radius);
  for (;;) {
    Matrix c = center * identity(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        const double v = u(rng);
        c(i, j) += v;
        if (i != j) c(j, i) += v;
      }
    const Vector eig = symmetric_eigenvalues(c);
    if (eig(0) >= box.lo && eig(dim - 1) <= box.hi) return c;
    ++rejected;
  }
}

TaylorConstants taylor_constants(const MaterialModel& model, int dim, const SpdBox& box, std::size_t trials,
                                 std::uint64_t seed, std::size_t cell) {
  // One generator per trial so the result does not depend on the chunking.
  std::vector<TaylorConstants> partial(chunk_count(trials));
  parallel_chunks(trials, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    TaylorConstants& out = partial[chunk];
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t t = begin; t < end; ++t) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
      std::mt19937_64 rng(seq);
      const Matrix u = sample_spd(rng, dim, box, out.rejected);
      const Matrix v = sample_spd(rng, dim, box, out.rejected);
      Matrix l(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) l(i, j) = l(j, i) = normal(rng);
      ++out.accepted;

      const Matrix e = v - u;
      const double en = e.norm();
      if (en == 0.0) continue;
      const Matrix d2e = model.energy_hessian_apply(cell, u, e);
      const double taylor = model.energy(cell, u) + contract(e, model.energy_gradient(cell, u)) + 0.5 * contract(e, d2e);
      const double remainder = std::max(0.0, taylor - model.energy(cell, v));
      out.c = std::max(out.c, remainder / (en * en * en));

      const double ln2 = contract(l, l);
      if (ln2 == 0.0) continue;
      const double diff =
          contract(l, model.energy_hessian_apply(cell, u, l)) - contract(l, model.energy_hessian_apply(cell, v, l));
      out.c_hat = std::max(out.c_hat, diff / (en * ln2));
    }
  });
  TaylorConstants out;
  for (const auto& p : partial) {
    out.c = std::max(out.c, p.c);
    out.c_hat = std::max(out.c_hat, p.c_hat);
    out.accepted += p.accepted;
    out.rejected += p.rejected;
  }
  std::ostringstream desc;
  desc << "eigenvalues in [" << box.lo << ", " << box.hi << "], " << out.accepted << " pairs, seed " << seed;
  out.description = desc.str();
  return out;
}

}  // namespace osclab
