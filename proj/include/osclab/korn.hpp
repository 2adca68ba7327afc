#pragma once

#include "osclab/bmo.hpp"
#include "osclab/field.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace osclab {

enum class DomainKind { Square, LShape, RoomsAndPassages };

/// Cell-mask domains on the unit-room scale h = 1 / resolution.
///
/// ROOMS_AND_PASSAGES places `rooms` cubes of resolution^n cells in a
/// row along axis 0, joined by passages round(width * resolution) cells
/// wide (at least one) and `passage_length` cells long, centered on the
/// room cross-section. A negative passage length means resolution / 2.
struct Domain {
  DomainKind kind = DomainKind::Square;
  int dim = 2;
  int resolution = 16;
  int rooms = 4;
  double width = 0.25;
  int passage_length = -1;

  int passage_cells() const;
  int passage_span() const;
  std::string label() const;
  void validate() const;
};

std::string to_string(DomainKind kind);
DomainKind parse_domain_kind(const std::string& name);

Grid generate_domain(const Domain& domain);

enum class KornMode { Bmo, Lp };

struct KornReport {
  KornMode mode = KornMode::Bmo;
  double p = 2.0;
  double ratio = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  std::optional<SeminormReport> numerator_report;
  std::optional<SeminormReport> denominator_report;
  bool degenerate = true;
  /// Zero denominator with a nonzero numerator.
  bool counterexample_candidate = false;
  std::string field;
  std::string domain;

  std::string mode_label() const;
};

/// ||grad w||_BMO / ||sym grad w||_BMO over one cube family (q = 1).
KornReport korn_ratio_bmo(const Field& w, const CubeFamily& family);
KornReport korn_ratio_bmo(const Field& w, const std::vector<Cube>& cubes, const CubeFamily& family);

/// (sum |G - <G>|^p / sum |S - <S>|^p)^(1/p), G = grad w, S its
/// symmetric part, sums over active cells.
KornReport korn_ratio_lp(const Field& w, double p);

/// Relative size below which a seminorm counts as zero.
inline constexpr double kKornDegenerate = 1e-12;

enum class Generator { Fourier, Legendre, Hinge };

std::string to_string(Generator g);
Generator parse_generator(const std::string& name);

/// Displacements sum_k a_{k,i} phi_k(x) e_i with phi_k a tensor product
/// of cosines cos(pi k_a t_a) or Legendre polynomials P_{k_a}(2 t_a - 1),
/// t the position scaled to the bounding box. The constant mode is left
/// out. Per-axis mode counts follow the box aspect so that the total
/// coefficient count stays within kMaxCoefficients.
///
/// Hinge fields are bending modes: for axes a != b,
///   w_a = -theta(x_a) (x_b - c_b),  w_b = integral of theta along a,
/// with theta a ramp between two neighbouring knots of a uniform knot row
/// along axis a and c the box center. Their cell shear vanishes, so only
/// d theta / dx_a strains.
class FieldGenerator {
 public:
  FieldGenerator(std::shared_ptr<const Grid> grid, Generator kind);

  static constexpr std::size_t kMaxCoefficients = 32;

  std::size_t size() const { return basis_.size(); }
  const std::array<int, 3>& modes_per_axis() const { return per_axis_; }
  Field displacement(const std::vector<double>& coeff) const;
  /// Random coefficients: independent standard normals, or for hinge
  /// fields sparse ones (each ramp nonzero with probability 0.2).
  std::vector<double> draw(std::mt19937_64& rng) const;
  std::string describe() const;

 private:
  std::shared_ptr<const Grid> grid_;
  Generator kind_;
  std::array<int, 3> per_axis_{1, 1, 1};
  std::vector<std::vector<double>> basis_;  ///< per coefficient, a node vector field
};

struct SearchOptions {
  KornMode mode = KornMode::Bmo;
  double p = 2.0;
  CubeFamily family = CubeFamily::all();
  Generator generator = Generator::Fourier;
  std::size_t budget = 500;
  std::uint64_t seed = 1;
  double random_fraction = 0.5;  ///< share of the budget spent on random draws
  double nodal_fraction = 0.0;   ///< share spent on nodal hill-climbing at the end
};

struct TracePoint {
  std::size_t evaluation = 0;
  double ratio = 0.0;
};

struct SearchResult {
  KornReport best;
  std::size_t best_trial = 0;  ///< evaluation index (1-based) of the best report
  std::vector<TracePoint> trace;
  std::size_t evaluations = 0;
  std::size_t degenerate = 0;
};

/// Random draws of generator coefficients, then coordinate-wise
/// hill-climbing on the coefficients of the best draw and optionally on
/// single nodal values. Degenerate fields are skipped. Deterministic in
/// the seed for any thread count.
SearchResult korn_search(const Domain& domain, const SearchOptions& options);

}  // namespace osclab
