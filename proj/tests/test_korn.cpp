#include "oracles.hpp"

#include "osclab/error.hpp"
#include "osclab/korn.hpp"
#include "osclab/parallel.hpp"

#include <doctest.h>

#include <cmath>

using namespace osclab;

namespace {

Domain rooms(double width, int res = 16) {
  Domain d;
  d.kind = DomainKind::RoomsAndPassages;
  d.resolution = res;
  d.width = width;
  return d;
}

}  // namespace

TEST_CASE("domain generators") {
  Domain sq;
  sq.resolution = 8;
  CHECK(generate_domain(sq).active_cell_count() == 64);
  Domain l = sq;
  l.kind = DomainKind::LShape;
  CHECK(generate_domain(l).active_cell_count() == 48);

  Domain r = rooms(0.25, 8);
  r.rooms = 2;
  CHECK(r.passage_cells() == 2);
  CHECK(r.passage_span() == 4);
  Grid g = generate_domain(r);
  CHECK(g.active_cell_count() == 2 * 64 + 4 * 2);
  CHECK(g.cells()[0] == 2 * 8 + 4);

  // a passage never collapses below one cell
  CHECK(rooms(1.0 / 16, 8).passage_cells() == 1);

  Domain cube = sq;
  cube.dim = 3;
  cube.resolution = 4;
  CHECK(generate_domain(cube).active_cell_count() == 64);

  Domain bad = rooms(0.9);
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  CHECK(parse_domain_kind(to_string(DomainKind::LShape)) == DomainKind::LShape);
  CHECK(rooms(0.125).label().find(',') == std::string::npos);
}

TEST_CASE("Korn ratios of a bilinear shear against closed forms") {
  auto g = std::make_shared<Grid>(Grid::box(2, 6, 1.0 / 6));
  Field w = Field::sample_vector(g, Placement::Node, [](const Point3& x) {
    Vector v(2);
    v << x[0] * x[1], 0.0;
    return v;
  });
  auto lp = korn_ratio_lp(w, 2.0);
  CHECK(!lp.degenerate);
  CHECK(lp.ratio == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-12));

  // grad w = [[y, x], [0, 0]] at cell centers
  Field grad(g, Placement::Cell, Shape::Matrix);
  Field sym(g, Placement::Cell, Shape::Matrix);
  for (std::size_t c = 0; c < g->cell_count(); ++c) {
    auto x = g->cell_center(c);
    Matrix m(2, 2);
    m << x[1], x[0], 0, 0;
    grad.set_matrix(c, m);
    sym.set_matrix(c, 0.5 * (m + m.transpose()));
  }
  auto bmo = korn_ratio_bmo(w, CubeFamily::all());
  CHECK(bmo.ratio == doctest::Approx(oracle::brute_bmo(grad, 1.0) / oracle::brute_bmo(sym, 1.0)).epsilon(1e-12));
  CHECK(bmo.mode_label() == "BMO");
  CHECK(lp.mode_label() == "LP(2)");
}

TEST_CASE("rigid and affine fields are degenerate") {
  auto g = std::make_shared<Grid>(Grid::box(2, 5, 0.2));
  Field skew = Field::sample_vector(g, Placement::Node, [](const Point3& x) {
    Vector v(2);
    v << -x[1], x[0];
    return v;
  });
  auto r = korn_ratio_bmo(skew, CubeFamily::all());
  CHECK(r.degenerate);
  CHECK(!r.counterexample_candidate);
  CHECK(korn_ratio_lp(skew, 2.0).degenerate);
}

TEST_CASE("generators respect the coefficient cap") {
  for (auto dom : {Domain{}, rooms(0.25), rooms(0.0625)}) {
    auto g = std::make_shared<Grid>(generate_domain(dom));
    for (auto kind : {Generator::Fourier, Generator::Legendre, Generator::Hinge}) {
      FieldGenerator gen(g, kind);
      CHECK(gen.size() > 0);
      CHECK(gen.size() <= FieldGenerator::kMaxCoefficients);
      std::mt19937_64 rng(1);
      auto coeff = gen.draw(rng);
      CHECK(coeff.size() == gen.size());
      CHECK(std::any_of(coeff.begin(), coeff.end(), [](double c) { return c != 0.0; }));
      CHECK(gen.displacement(coeff).sites() == g->node_count());
    }
  }
}

TEST_CASE("a single hinge mode is not rigid") {
  auto g = std::make_shared<Grid>(generate_domain(rooms(0.25)));
  FieldGenerator gen(g, Generator::Hinge);
  std::vector<double> coeff(gen.size(), 0.0);
  coeff[0] = 1.0;
  auto s = korn_ratio_lp(gen.displacement(coeff), 2.0);
  CHECK(!s.degenerate);
}

TEST_CASE("search is deterministic across thread counts") {
  SearchOptions opt;
  opt.generator = Generator::Hinge;
  opt.mode = KornMode::Lp;
  opt.budget = 40;
  opt.seed = 3;
  auto dom = rooms(0.25, 8);
  set_thread_count(1);
  auto a = korn_search(dom, opt);
  set_thread_count(3);
  auto b = korn_search(dom, opt);
  set_thread_count(1);
  CHECK(a.best.ratio == b.best.ratio);
  CHECK(a.best_trial == b.best_trial);
  CHECK(a.evaluations == 40);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i].ratio >= a.trace[i - 1].ratio);
}

TEST_CASE("thin passages raise the LP ratio") {
  SearchOptions opt;
  opt.generator = Generator::Hinge;
  opt.mode = KornMode::Lp;
  opt.budget = 120;
  Domain sq;
  auto square = korn_search(sq, opt).best.ratio;
  auto thin = korn_search(rooms(0.125), opt).best.ratio;
  CHECK(thin > square);
}
