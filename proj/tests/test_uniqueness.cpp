#include "oracles.hpp"

#include "osclab/parallel.hpp"
#include "osclab/uniqueness.hpp"

#include <doctest.h>

using namespace osclab;

namespace {

EnergyProblem stretched(double a, int cells = 8) {
  auto g = std::make_shared<Grid>(Grid::box(2, cells, 1.0 / cells));
  return EnergyProblem::make(g, make_material("svk", {1.0}, {1.0}), [a](const Point3& x) {
    Vector v(2);
    v << a * x[0], a * x[1];
    return v;
  });
}

}  // namespace

TEST_CASE("perturbations vanish on the Dirichlet boundary") {
  auto p = stretched(1.0);
  std::mt19937_64 rng(1);
  Field w = random_perturbation(p, {}, rng);
  CHECK_NOTHROW(require_variation(p, w));
  double mx = 0.0;
  for (double x : w.values()) mx = std::max(mx, std::abs(x));
  CHECK(mx > 0.0);
}

TEST_CASE("hypothesis gates") {
  UniquenessOptions opt;
  auto ref = stretched(1.0);
  auto gates = check_hypotheses(ref, ref.dirichlet, opt);
  CHECK(gates.all());
  CHECK(gates.beta == doctest::Approx(1.0));
  CHECK(gates.k == doctest::Approx(0.125));

  auto st = stretched(1.1);
  auto gs = check_hypotheses(st, st.dirichlet, opt);
  CHECK(gs.tension_ok);
  CHECK(gs.min_principal == doctest::Approx(0.42));

  auto co = stretched(0.9);
  auto gc = check_hypotheses(co, co.dirichlet, opt);
  CHECK(!gc.tension_ok);
  CHECK(!gc.all());
  CHECK(!gc.failures().empty());
  auto res = uniqueness_experiment(co, co.dirichlet, opt);
  CHECK(res.reports.empty());
}

TEST_CASE("the equilibrium itself has a zero gap") {
  auto p = stretched(1.1);
  auto c = evaluate_competitor(p, p.dirichlet, p.dirichlet, 0.125, 0.0, 1e-10);
  CHECK(c.energy_gap == 0.0);
  CHECK(c.k_term == 0.0);
  CHECK(c.stress_term == 0.0);
  CHECK(c.holds);
}

TEST_CASE("small reference sweep holds everywhere") {
  auto p = stretched(1.0);
  UniquenessOptions opt;
  opt.trials = 20;
  opt.deltas = {0.02, 0.05};
  opt.inject_self = true;
  auto res = uniqueness_experiment(p, p.dirichlet, opt);
  REQUIRE(res.reports.size() == 2);
  for (const auto& r : res.reports) {
    CHECK(r.admissible > 0);
    CHECK(r.holds == r.admissible);
    for (const auto& c : r.ledger)
      if (c.admissible && c.trial > 0) {
        CHECK(c.distance < r.delta);
        CHECK(c.distance > 0.9 * r.delta);
        CHECK(!c.near_equilibrium);
      }
  }
}

TEST_CASE("experiment is deterministic across thread counts") {
  auto p = stretched(1.1, 6);
  UniquenessOptions opt;
  opt.trials = 8;
  set_thread_count(1);
  auto a = uniqueness_experiment(p, p.dirichlet, opt);
  set_thread_count(4);
  auto b = uniqueness_experiment(p, p.dirichlet, opt);
  set_thread_count(1);
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t i = 0; i < a.reports[0].ledger.size(); ++i) {
    CHECK(a.reports[0].ledger[i].gap == b.reports[0].ledger[i].gap);
    CHECK(a.reports[0].ledger[i].scale == b.reports[0].ledger[i].scale);
  }
}
