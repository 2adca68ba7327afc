#pragma once

// Reference computations written directly on flat arrays. They share no
// code with the library beyond the Grid/Field accessors used to feed them.

#include "osclab/field.hpp"
#include "osclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

namespace oracle {

struct Box {
  int n = 2;
  int ex[3] = {1, 1, 1};
  std::vector<std::uint8_t> active;
  int comps = 1;
  std::vector<double> v;  // cell-major, comps per cell

  int idx(int i, int j, int k) const { return (i * ex[1] + j) * ex[2] + k; }
};

inline Box from_field(const osclab::Field& f) {
  Box b;
  const auto& g = f.grid();
  b.n = g.dim();
  for (int a = 0; a < 3; ++a) b.ex[a] = g.cells()[a];
  b.active = g.mask();
  b.comps = f.components();
  b.v.assign(f.values().begin(), f.values().end());
  return b;
}

struct CubeResult {
  double value = 0.0;
  int count = 0;
};

// sup over all active cubes of (mean |psi - avg|^q)^(1/q), direct loops.
inline CubeResult brute_bmo(const Box& b, double q) {
  CubeResult r;
  int smax = b.ex[0];
  for (int a = 1; a < b.n; ++a) smax = std::min(smax, b.ex[a]);
  for (int s = 1; s <= smax; ++s) {
    const int ks = b.n == 3 ? s : 1;
    for (int i0 = 0; i0 + s <= b.ex[0]; ++i0)
      for (int j0 = 0; j0 + s <= b.ex[1]; ++j0)
        for (int k0 = 0; k0 + ks <= b.ex[2]; ++k0) {
          std::vector<int> cells;
          bool ok = true;
          for (int i = i0; i < i0 + s; ++i)
            for (int j = j0; j < j0 + s; ++j)
              for (int k = k0; k < k0 + ks; ++k) {
                int c = b.idx(i, j, k);
                if (!b.active[c]) ok = false;
                cells.push_back(c);
              }
          if (!ok) continue;
          ++r.count;
          std::vector<double> mean(b.comps, 0.0);
          for (int c : cells)
            for (int m = 0; m < b.comps; ++m) mean[m] += b.v[c * b.comps + m];
          for (double& m : mean) m /= cells.size();
          double acc = 0.0;
          for (int c : cells) {
            double d2 = 0.0;
            for (int m = 0; m < b.comps; ++m) {
              double d = b.v[c * b.comps + m] - mean[m];
              d2 += d * d;
            }
            acc += std::pow(std::sqrt(d2), q);
          }
          r.value = std::max(r.value, std::pow(acc / cells.size(), 1.0 / q));
        }
  }
  return r;
}

inline double brute_bmo(const osclab::Field& f, double q) { return brute_bmo(from_field(f), q).value; }

// 3x3 or 2x2 determinant by cofactor expansion along the first row.
inline double cofactor_det(const osclab::Matrix& m) {
  if (m.rows() == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  double d = 0.0;
  for (int j = 0; j < 3; ++j) {
    int a = (j + 1) % 3, b = (j + 2) % 3;
    d += m(0, j) * (m(1, a) * m(2, b) - m(1, b) * m(2, a));
  }
  return d;
}

// min over SO(2) of |F - Q(t)| by an angle scan refined by golden section.
inline double angle_scan_distance(const osclab::Matrix& f, double* best_angle = nullptr) {
  auto dist = [&](double t) {
    osclab::Matrix q(2, 2);
    q << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return (f - q).norm();
  };
  const int steps = 3600;
  double bt = 0.0, bd = 1e300;
  for (int i = 0; i < steps; ++i) {
    double t = 2 * M_PI * i / steps;
    double d = dist(t);
    if (d < bd) bd = d, bt = t;
  }
  double lo = bt - 2 * M_PI / steps, hi = bt + 2 * M_PI / steps;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    double a = hi - g * (hi - lo), c = lo + g * (hi - lo);
    if (dist(a) < dist(c)) hi = c; else lo = a;
  }
  if (best_angle) *best_angle = 0.5 * (lo + hi);
  return dist(0.5 * (lo + hi));
}

// Cell gradient of a node vector field by the bilinear/trilinear element
// formula written out corner by corner.
inline osclab::Matrix element_gradient(const osclab::Field& u, std::size_t cell) {
  const auto& g = u.grid();
  const int n = g.dim();
  const double h = g.spacing();
  auto c = g.cell_coords(cell);
  osclab::Matrix out = osclab::Matrix::Zero(n, n);
  const int corners = 1 << n;
  for (int corner = 0; corner < corners; ++corner) {
    osclab::Index3 nc = c;
    int off[3] = {0, 0, 0};
    for (int a = 0; a < n; ++a) {
      off[a] = (corner >> a) & 1;
      nc[a] += off[a];
    }
    auto val = u.at(g.node_index(nc));
    for (int a = 0; a < n; ++a) {
      // d/dx_a of the multilinear shape function at the center
      double w = (off[a] ? 1.0 : -1.0) / h;
      for (int b = 0; b < n; ++b)
        if (b != a) w *= 0.5;
      for (int i = 0; i < n; ++i) out(i, a) += w * val[i];
    }
  }
  return out;
}

inline std::vector<double> normals(std::mt19937_64& rng, std::size_t count, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> v(count);
  for (double& x : v) x = nd(rng);
  return v;
}

inline osclab::Field random_cell_scalar(std::shared_ptr<const osclab::Grid> g, std::mt19937_64& rng) {
  return osclab::Field::scalar(g, osclab::Placement::Cell, normals(rng, g->cell_count()));
}

// Symmetric positive definite matrix with eigenvalues in [lo, hi].
inline osclab::Matrix random_spd(std::mt19937_64& rng, int n, double lo = 0.6, double hi = 1.8) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(lo, hi);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = ud(rng);
  osclab::Matrix out = q * d.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

inline osclab::Matrix random_sym(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  osclab::Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
  return 0.5 * (m + m.transpose());
}

inline osclab::Matrix random_matrix(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  osclab::Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
  return m;
}

inline bool close(double a, double b, double rtol, double atol = 0.0) {
  return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

}  // namespace oracle
