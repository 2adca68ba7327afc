#include "osclab/korn.hpp"

#include "osclab/error.hpp"
#include "osclab/kinematics.hpp"
#include "osclab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace osclab {

int Domain::passage_cells() const {
  return std::max(1, static_cast<int>(std::lround(width * resolution)));
}

int Domain::passage_span() const { return passage_length < 0 ? std::max(1, resolution / 2) : passage_length; }

std::string Domain::label() const {
  if (kind != DomainKind::RoomsAndPassages) return to_string(kind);
  char buf[96];
  std::snprintf(buf, sizeof buf, "rooms-and-passages[k=%d w=%g len=%d]", rooms, width, passage_span());
  return buf;
}

void Domain::validate() const {
  if (dim != 2 && dim != 3) throw ParameterError("domain dimension must be 2 or 3");
  if (resolution < 2) throw ParameterError("domain resolution must be at least 2");
  if (kind == DomainKind::RoomsAndPassages) {
    if (rooms < 1) throw ParameterError("room count must be at least 1");
    if (!(width > 0.0 && width <= 0.5)) throw ParameterError("passage width fraction must lie in (0, 1/2]");
    if (passage_length == 0 || passage_length < -1) throw ParameterError("passage length must be positive");
  }
}

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Square: return "square";
    case DomainKind::LShape: return "lshape";
    case DomainKind::RoomsAndPassages: return "rooms-and-passages";
  }
  return "?";
}

DomainKind parse_domain_kind(const std::string& name) {
  if (name == "square") return DomainKind::Square;
  if (name == "lshape") return DomainKind::LShape;
  if (name == "rooms-and-passages") return DomainKind::RoomsAndPassages;
  throw ParameterError("unknown domain kind '" + name + "'");
}

Grid generate_domain(const Domain& domain) {
  domain.validate();
  const int n = domain.dim;
  const int r = domain.resolution;
  const double h = 1.0 / r;
  if (domain.kind == DomainKind::Square) return Grid::box(n, r, h);

  Index3 cells{r, r, n == 3 ? r : 1};
  if (domain.kind == DomainKind::RoomsAndPassages) cells[0] = domain.rooms * r + (domain.rooms - 1) * domain.passage_span();
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(cells[0]) * cells[1] * cells[2], 0);
  const int pw = std::min(domain.passage_cells(), r);
  const int lo = (r - pw) / 2;
  const int period = r + domain.passage_span();

  std::size_t idx = 0;
  for (int i = 0; i < cells[0]; ++i)
    for (int j = 0; j < cells[1]; ++j)
      for (int k = 0; k < cells[2]; ++k, ++idx) {
        bool on = true;
        if (domain.kind == DomainKind::LShape) {
          on = !(i >= r / 2 && j >= r / 2);
        } else if (i % period >= r) {
          on = j >= lo && j < lo + pw && (n == 2 || (k >= lo && k < lo + pw));
        }
        mask[idx] = on ? 1 : 0;
      }
  return Grid(n, cells, h, {0.0, 0.0, 0.0}, std::move(mask));
}

std::string KornReport::mode_label() const {
  if (mode == KornMode::Bmo) return "BMO";
  char buf[32];
  std::snprintf(buf, sizeof buf, "LP(%g)", p);
  return buf;
}

KornReport korn_ratio_bmo(const Field& w, const std::vector<Cube>& cubes, const CubeFamily& family) {
  w.require_placement(Placement::Node, "korn_ratio_bmo");
  const Field g = gradient(w);
  const Field s = symmetric_part(g);
  KornReport r;
  r.mode = KornMode::Bmo;
  r.numerator_report = bmo_seminorm(g, cubes, family, 1.0);
  r.denominator_report = bmo_seminorm(s, cubes, family, 1.0);
  r.numerator = r.numerator_report->value;
  r.denominator = r.denominator_report->value;
  const double scale = sup_norm(g);
  r.degenerate = !(r.denominator > kKornDegenerate * scale);
  r.counterexample_candidate = r.degenerate && r.numerator > kKornDegenerate * scale;
  r.ratio = r.degenerate ? 0.0 : r.numerator / r.denominator;
  return r;
}

KornReport korn_ratio_bmo(const Field& w, const CubeFamily& family) {
  return korn_ratio_bmo(w, enumerate_cubes(w.grid(), family), family);
}

namespace {

double centered_lp(const Field& f, double p) {
  const auto mean = active_mean(f);
  double sum = 0.0;
  for (std::size_t c = 0; c < f.sites(); ++c) {
    if (!f.site_active(c)) continue;
    double s2 = 0.0;
    const auto v = f.at(c);
    for (std::size_t i = 0; i < v.size(); ++i) s2 += (v[i] - mean[i]) * (v[i] - mean[i]);
    sum += std::pow(s2, p / 2.0);
  }
  return std::pow(sum * f.grid().cell_volume(), 1.0 / p);
}

}  // namespace

KornReport korn_ratio_lp(const Field& w, double p) {
  w.require_placement(Placement::Node, "korn_ratio_lp");
  if (!(p >= 1.0)) throw ParameterError("korn_ratio_lp needs p >= 1");
  const Field g = gradient(w);
  const Field s = symmetric_part(g);
  KornReport r;
  r.mode = KornMode::Lp;
  r.p = p;
  r.numerator = centered_lp(g, p);
  r.denominator = centered_lp(s, p);
  const double measure = static_cast<double>(w.grid().active_cell_count()) * w.grid().cell_volume();
  const double scale = sup_norm(g) * std::pow(measure, 1.0 / p);
  r.degenerate = !(r.denominator > kKornDegenerate * scale);
  r.counterexample_candidate = r.degenerate && r.numerator > kKornDegenerate * scale;
  r.ratio = r.degenerate ? 0.0 : r.numerator / r.denominator;
  return r;
}

std::string to_string(Generator g) {
  switch (g) {
    case Generator::Fourier: return "fourier";
    case Generator::Legendre: return "legendre";
    case Generator::Hinge: return "hinge";
  }
  return "?";
}

Generator parse_generator(const std::string& name) {
  if (name == "fourier") return Generator::Fourier;
  if (name == "legendre") return Generator::Legendre;
  if (name == "hinge") return Generator::Hinge;
  throw ParameterError("unknown generator '" + name + "'");
}

namespace {

double legendre(int k, double x) {
  if (k == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int j = 2; j <= k; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace

FieldGenerator::FieldGenerator(std::shared_ptr<const Grid> grid, Generator kind)
    : grid_(std::move(grid)), kind_(kind) {
  const Grid& g = *grid_;
  const int n = g.dim();
  const std::size_t nodes = g.node_count();
  const auto active = g.active_nodes();
  double geo = 1.0;
  for (int a = 0; a < n; ++a) geo *= g.cells()[a];
  geo = std::pow(geo, 1.0 / n);

  if (kind_ == Generator::Hinge) {
    // n (n - 1) bending planes; ramps shared out by axis extent.
    double total = 0.0;
    for (int a = 0; a < n; ++a) total += g.cells()[a];
    for (int a = 0; a < n; ++a) {
      const int cells_a = g.cells()[a];
      const int ramps = static_cast<int>(std::floor(kMaxCoefficients * cells_a / (total * (n - 1))));
      per_axis_[a] = std::clamp(ramps, 1, cells_a);
      const int knots = per_axis_[a] + 1;
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        const double center = g.origin()[b] + 0.5 * g.cells()[b] * g.spacing();
        for (int k = 1; k < knots; ++k) {
          // theta: ramp from 0 to 1 between knots k - 1 and k.
          std::vector<double> theta(cells_a + 1, 0.0);
          for (int i = 0; i <= cells_a; ++i) {
            const double t = static_cast<double>(i) / cells_a * (knots - 1);
            theta[i] = std::clamp(t - (k - 1), 0.0, 1.0);
          }
          // Trapezoid sums make the cell-center shear cancel exactly.
          std::vector<double> big(cells_a + 1, 0.0);
          for (int i = 0; i < cells_a; ++i) big[i + 1] = big[i] + 0.5 * g.spacing() * (theta[i] + theta[i + 1]);
          std::vector<double> field(nodes * n, 0.0);
          for (std::size_t node = 0; node < nodes; ++node) {
            if (!active[node]) continue;
            const auto c = g.node_coords(node);
            const auto x = g.node_position(node);
            field[node * n + a] = -theta[c[a]] * (x[b] - center);
            field[node * n + b] = big[c[a]];
          }
          basis_.push_back(std::move(field));
        }
      }
    }
    return;
  }

  const int per_component = static_cast<int>(kMaxCoefficients) / n;
  // Mode counts proportional to the box extents, product <= per_component + 1.
  const double base = std::pow(per_component + 1.0, 1.0 / n);
  for (int a = 0; a < n; ++a) per_axis_[a] = std::max(1, static_cast<int>(std::lround(base * g.cells()[a] / geo)));
  auto product = [&] {
    int p = 1;
    for (int a = 0; a < n; ++a) p *= per_axis_[a];
    return p;
  };
  while (product() > per_component + 1) {
    auto it = std::max_element(per_axis_.begin(), per_axis_.begin() + n);
    --*it;
  }

  std::vector<std::array<int, 3>> modes;
  for (int a = 0; a < per_axis_[0]; ++a)
    for (int b = 0; b < per_axis_[1]; ++b)
      for (int c = 0; c < (n == 3 ? per_axis_[2] : 1); ++c)
        if (a + b + c > 0) modes.push_back({a, b, c});

  std::vector<std::vector<double>> phi(modes.size(), std::vector<double>(nodes, 0.0));
  for (std::size_t node = 0; node < nodes; ++node) {
    if (!active[node]) continue;
    const auto x = g.node_position(node);
    std::array<double, 3> t{};
    for (int a = 0; a < n; ++a) t[a] = (x[a] - g.origin()[a]) / (g.cells()[a] * g.spacing());
    for (std::size_t m = 0; m < modes.size(); ++m) {
      double v = 1.0;
      for (int a = 0; a < n; ++a)
        v *= kind_ == Generator::Fourier ? std::cos(std::numbers::pi * modes[m][a] * t[a])
                                         : legendre(modes[m][a], 2.0 * t[a] - 1.0);
      phi[m][node] = v;
    }
  }
  for (std::size_t m = 0; m < modes.size(); ++m)
    for (int i = 0; i < n; ++i) {
      std::vector<double> field(nodes * n, 0.0);
      for (std::size_t node = 0; node < nodes; ++node) field[node * n + i] = phi[m][node];
      basis_.push_back(std::move(field));
    }
}

Field FieldGenerator::displacement(const std::vector<double>& coeff) const {
  if (coeff.size() != size()) throw ParameterError("coefficient count does not match the generator");
  Field w(grid_, Placement::Node, Shape::Vector);
  auto v = w.values();
  for (std::size_t c = 0; c < basis_.size(); ++c) {
    if (coeff[c] == 0.0) continue;
    const auto& b = basis_[c];
    for (std::size_t k = 0; k < b.size(); ++k) v[k] += coeff[c] * b[k];
  }
  return w;
}

std::vector<double> FieldGenerator::draw(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(size());
  if (kind_ != Generator::Hinge) {
    for (double& x : a) x = normal(rng);
    return a;
  }
  // Sparse jumps: most ramps stay flat.
  std::bernoulli_distribution jump(0.2);
  bool any = false;
  for (double& x : a) {
    if (jump(rng)) {
      x = normal(rng);
      any = true;
    }
  }
  if (!any) a[std::uniform_int_distribution<std::size_t>(0, a.size() - 1)(rng)] = normal(rng);
  return a;
}

std::string FieldGenerator::describe() const {
  std::string s = to_string(kind_) + " ";
  for (int a = 0; a < grid_->dim(); ++a) s += (a ? "x" : "") + std::to_string(per_axis_[a]);
  return s;
}

namespace {

struct Evaluator {
  KornMode mode;
  double p;
  CubeFamily family;
  std::vector<Cube> cubes;

  KornReport operator()(const Field& w) const {
    return mode == KornMode::Bmo ? korn_ratio_bmo(w, cubes, family) : korn_ratio_lp(w, p);
  }
};

bool better(const KornReport& a, const KornReport& b) {
  if (a.degenerate) return false;
  return b.degenerate || a.ratio > b.ratio;
}

}  // namespace

SearchResult korn_search(const Domain& domain, const SearchOptions& options) {
  if (options.budget < 1) throw ParameterError("search budget must be at least 1");
  auto grid = std::make_shared<const Grid>(generate_domain(domain));
  const FieldGenerator gen(grid, options.generator);
  Evaluator eval{options.mode, options.p, options.family, {}};
  if (options.mode == KornMode::Bmo) eval.cubes = enumerate_cubes(*grid, options.family);

  const std::size_t budget = options.budget;
  const std::size_t nodal =
      std::min(budget - 1, static_cast<std::size_t>(std::floor(options.nodal_fraction * budget)));
  const std::size_t random = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(options.random_fraction * budget)), 1, budget - nodal);

  // Random phase: every draw has its own seed stream.
  std::vector<std::vector<double>> draws(random);
  std::vector<KornReport> reports(random);
  parallel_chunks(random, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t t = begin; t < end; ++t) {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed & 0xffffffffu),
                        static_cast<std::uint32_t>(options.seed >> 32), static_cast<std::uint32_t>(t)};
      std::mt19937_64 rng(seq);
      draws[t] = gen.draw(rng);
      reports[t] = eval(gen.displacement(draws[t]));
    }
  });

  SearchResult out;
  std::size_t best_draw = 0;
  auto record = [&](KornReport r, std::size_t index) {
    ++out.evaluations;
    if (r.degenerate) {
      ++out.degenerate;
      if (index == 1) {
        out.best = std::move(r);
        out.best_trial = 1;
      }
      return false;
    }
    if (!better(r, out.best)) return false;
    out.best = std::move(r);
    out.best_trial = index;
    out.trace.push_back({index, out.best.ratio});
    return true;
  };
  for (std::size_t t = 0; t < random; ++t)
    if (record(reports[t], t + 1)) best_draw = t;

  // Coordinate-wise climb on the generator coefficients.
  std::vector<double> a = draws[best_draw];
  std::size_t used = random;
  const std::size_t climb_end = budget - nodal;
  double norm = 0.0;
  for (double x : a) norm += x * x;
  norm = std::sqrt(norm / static_cast<double>(a.size()));
  double step = 0.25 * norm;
  std::string origin = gen.describe() + " draw " + std::to_string(best_draw + 1);
  bool climbed = false;
  while (used < climb_end && step > 1e-6 * norm) {
    bool moved = false;
    for (std::size_t i = 0; i < a.size() && used < climb_end; ++i) {
      for (double dir : {1.0, -1.0}) {
        if (used >= climb_end) break;
        // Keep going while the move pays, doubling the step.
        double s = dir * step;
        bool improved = false;
        while (used < climb_end) {
          std::vector<double> trial = a;
          trial[i] += s;
          ++used;
          if (!record(eval(gen.displacement(trial)), used)) break;
          a = std::move(trial);
          improved = true;
          s *= 2.0;
        }
        if (improved) {
          moved = climbed = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  if (climbed) origin += " climbed";

  // Optional nodal refinement from the best coefficient field.
  if (nodal > 0) {
    Field w = gen.displacement(a);
    const int n = grid->dim();
    const auto active = grid->active_nodes();
    const double node_step = 0.05 * std::max(sup_norm(w), 1e-300);
    std::size_t node = 0;
    bool refined = false;
    while (used < budget) {
      if (active[node]) {
        for (int i = 0; i < n && used < budget; ++i) {
          for (double dir : {1.0, -1.0}) {
            if (used >= budget) break;
            Field trial = w;
            trial.at(node)[i] += dir * node_step;
            ++used;
            if (record(eval(trial), used)) {
              w = std::move(trial);
              refined = true;
              break;
            }
          }
        }
      }
      node = (node + 1) % grid->node_count();
    }
    if (refined) origin += " nodal";
  }

  out.best.field = origin;
  out.best.domain = domain.label();
  return out;
}

}  // namespace osclab
