#include <doctest.h>

#include <cmath>
#include <set>

#include "czlab/geometry.hpp"

using namespace czlab;

namespace {
Vec pt(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}
}  // namespace

TEST_CASE("cantor_measure structure") {
  auto c0 = cantor_measure(0);
  CHECK(c0.size() == 1);
  CHECK(c0.atom(0)(0) == doctest::Approx(0.5));
  CHECK(c0.weight(0) == Complex(1.0));

  for (int stage : {1, 2, 3, 4}) {
    auto c = cantor_measure(stage);
    CHECK(c.size() == Eigen::Index(std::pow(4.0, stage)));
    CHECK(total_variation(c) == doctest::Approx(1.0).epsilon(1e-13));
    // all weights equal 4^-stage
    for (Eigen::Index i = 0; i < c.size(); ++i)
      CHECK(c.weight(i) == Complex(std::pow(4.0, -stage)));
    // atoms inside the unit square
    CHECK(c.atoms().minCoeff() >= 0.0);
    CHECK(c.atoms().maxCoeff() <= 1.0);
  }

  CHECK_THROWS_AS(cantor_measure(-1), std::invalid_argument);
  CHECK_THROWS_AS(cantor_measure(11), std::invalid_argument);
}

TEST_CASE("cantor stage-1 atoms are corner-quarter centers") {
  auto c1 = cantor_measure(1);
  std::set<std::pair<double, double>> got;
  for (int i = 0; i < 4; ++i) got.insert({c1.atom(i)(0), c1.atom(i)(1)});
  std::set<std::pair<double, double>> want = {
      {0.125, 0.125}, {0.125, 0.875}, {0.875, 0.125}, {0.875, 0.875}};
  CHECK(got == want);
}

TEST_CASE("cantor ancestor-square mass invariant") {
  // each stage-k corner square of side 4^-k carries mass 4^-k at every
  // deeper stage
  auto c3 = cantor_measure(3);
  for (int k : {1, 2}) {
    auto ck = cantor_measure(k);
    double half_side = 0.5 * std::pow(4.0, -k);
    for (Eigen::Index i = 0; i < ck.size(); ++i) {
      Vec c = ck.atom(i);
      double mass = 0.0;
      for (Eigen::Index j = 0; j < c3.size(); ++j) {
        Vec a = c3.atom(j);
        if (std::abs(a(0) - c(0)) <= half_side && std::abs(a(1) - c(1)) <= half_side)
          mass += c3.weight(j).real();
      }
      CHECK(mass == doctest::Approx(std::pow(4.0, -k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cantor_measure reps split mass uniformly") {
  auto c = cantor_measure(2, 3);
  CHECK(c.size() == 16 * 3);
  CHECK(total_variation(c) == doctest::Approx(1.0).epsilon(1e-13));
  for (Eigen::Index i = 0; i < c.size(); ++i)
    CHECK(c.weight(i) == Complex(1.0 / 16.0 / 3.0));
}

TEST_CASE("section5_measures") {
  auto s5 = section5_measures(4, 50.0);
  CHECK(s5.stages == 4);
  CHECK(int(s5.sigma.size()) == 4);
  double tv_nu = 0.0, tv_mu = 0.0;
  for (int n = 1; n <= 4; ++n) {
    CHECK(s5.lambda[n - 1] == doctest::Approx(1.0 / std::sqrt(double(n))));
    CHECK(s5.sigma[n - 1].size() == Eigen::Index(std::pow(4.0, n)));
    CHECK(s5.z[n - 1](0) == doctest::Approx(n * 50.0));
    tv_nu += 1.0;
    tv_mu += s5.lambda[n - 1];
  }
  CHECK(total_variation(s5.nu) == doctest::Approx(tv_nu).epsilon(1e-12));
  CHECK(total_variation(s5.mu) == doctest::Approx(tv_mu).epsilon(1e-12));
  // blocks stay disjoint: spacing swamps the unit-square diameters
  CHECK(s5.mu.size() == s5.nu.size());

  CHECK_THROWS_AS(section5_measures(3, 5.0), std::invalid_argument);
}

TEST_CASE("renormalize_growth enforces the target") {
  // a heavy cluster violating 1-growth
  Eigen::MatrixXd a(5, 2);
  a << 0, 0, 1e-3, 0, 2e-3, 0, 3e-3, 0, 1, 0;
  Eigen::VectorXcd w = Eigen::VectorXcd::Constant(5, 1.0);
  DiscreteMeasure m(a, w);
  CHECK(growth_constant(m, 1) > 2.0);
  auto r = renormalize_growth(m, 1, 2.0);
  CHECK(growth_constant(r, 1) <= 2.0 * (1.0 + 1e-9));
  CHECK(r.size() == m.size());
  CHECK(r.is_positive());
}

TEST_CASE("halfplane_scenario invariants") {
  auto sc = halfplane_scenario(60, 40, 40, 17);
  CHECK(sc.domain == DomainKind::HalfPlane);
  CHECK(sc.boundary_measure.size() == 60);
  CHECK(sc.mu.size() == 40);
  CHECK(sc.nu.size() == 40);
  CHECK(sc.boundary_height(0.3) == 0.0);
  for (Eigen::Index i = 0; i < sc.boundary_measure.size(); ++i)
    CHECK(sc.boundary_measure.atom(i)(1) == 0.0);
  for (Eigen::Index i = 0; i < sc.mu.size(); ++i)
    CHECK(sc.mu.atom(i)(1) >= 0.0);
  for (Eigen::Index i = 0; i < sc.nu.size(); ++i)
    CHECK(sc.nu.atom(i)(1) < 0.0);
  CHECK(growth_constant(sc.mu, 1) <= 2.0 * (1.0 + 1e-9));
  CHECK(growth_constant(sc.nu, 1) <= 2.0 * (1.0 + 1e-9));
  // seeded determinism
  auto sc2 = halfplane_scenario(60, 40, 40, 17);
  CHECK((sc2.mu.atoms() - sc.mu.atoms()).norm() == 0.0);
  CHECK((sc2.nu.weights() - sc.nu.weights()).norm() == 0.0);
}

TEST_CASE("lipschitz_scenario invariants") {
  std::vector<double> slopes = {0.5, -0.8, 0.3};
  auto sc = lipschitz_scenario(slopes, 90, 50, 50, 3);
  CHECK(sc.domain == DomainKind::SubgraphPiecewiseLinear);
  CHECK(int(sc.break_x.size()) == 4);
  CHECK(sc.break_x.front() == 0.0);
  CHECK(sc.break_x.back() == doctest::Approx(1.0));
  // boundary_height interpolates the breakpoints
  for (size_t i = 0; i < sc.break_x.size(); ++i)
    CHECK(sc.boundary_height(sc.break_x[i]) == doctest::Approx(sc.break_y[i]));
  // Lipschitz bound along the graph
  for (double x : {0.05, 0.2, 0.41, 0.77}) {
    double h = 1e-4;
    double slope = (sc.boundary_height(x + h) - sc.boundary_height(x)) / h;
    CHECK(std::abs(slope) <= 1.0 + 1e-9);
  }
  // boundary atoms sit on the graph, mu above (closed), nu strictly below
  for (Eigen::Index i = 0; i < sc.boundary_measure.size(); ++i) {
    Vec a = sc.boundary_measure.atom(i);
    CHECK(a(1) == doctest::Approx(sc.boundary_height(a(0))).epsilon(1e-12));
  }
  for (Eigen::Index i = 0; i < sc.mu.size(); ++i)
    CHECK(sc.mu.atom(i)(1) >= sc.boundary_height(sc.mu.atom(i)(0)) - 1e-12);
  for (Eigen::Index i = 0; i < sc.nu.size(); ++i)
    CHECK(sc.nu.atom(i)(1) < sc.boundary_height(sc.nu.atom(i)(0)));

  CHECK_THROWS_AS(lipschitz_scenario({1.5}, 30, 10, 10, 1), std::invalid_argument);
}

TEST_CASE("boundary measure carries arc length") {
  // slope s over equal-width segments: each segment of width L contributes
  // L sqrt(1 + s^2) of length
  std::vector<double> slopes = {0.6, -0.6};
  auto sc = lipschitz_scenario(slopes, 80, 10, 10, 5);
  double expected = 1.0 * std::sqrt(1.0 + 0.36);
  CHECK(total_variation(sc.boundary_measure) == doctest::Approx(expected).epsilon(1e-12));

  auto flat = halfplane_scenario(64, 10, 10, 2);
  CHECK(total_variation(flat.boundary_measure) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("boundary_height clamps outside the graph") {
  auto sc = lipschitz_scenario({0.5}, 20, 5, 5, 9);
  CHECK(sc.boundary_height(-1.0) == doctest::Approx(sc.break_y.front()));
  CHECK(sc.boundary_height(2.0) == doctest::Approx(sc.break_y.back()));
}

TEST_CASE("section5 with one stage reduces to a single Cantor measure") {
  auto s5 = section5_measures(1);
  REQUIRE(s5.stages == 1);
  CHECK(s5.lambda[0] == 1.0);
  CHECK(s5.mu.size() == s5.nu.size());
  // lambda_1 = 1, so mu and nu coincide atom by atom
  CHECK((s5.mu.atoms() - s5.nu.atoms()).norm() == 0.0);
  CHECK((s5.mu.weights() - s5.nu.weights()).norm() == 0.0);
  CHECK(s5.mu.size() == cantor_measure(1).size());
}

TEST_CASE("lipschitz scenario with zero slopes matches the half-plane geometry") {
  auto sc = lipschitz_scenario({0.0, 0.0}, 60, 25, 25, 314);
  CHECK(sc.domain == DomainKind::SubgraphPiecewiseLinear);
  for (Eigen::Index g = 0; g < sc.boundary_measure.size(); ++g)
    CHECK(sc.boundary_measure.atom(g)(1) == doctest::Approx(0.0).epsilon(1e-12));
  for (double x : {0.0, 0.3, 0.77, 1.0})
    CHECK(sc.boundary_height(x) == doctest::Approx(0.0).epsilon(1e-12));
  for (Eigen::Index j = 0; j < sc.mu.size(); ++j)
    CHECK(sc.mu.atom(j)(1) >= 0.0);
  for (Eigen::Index j = 0; j < sc.nu.size(); ++j)
    CHECK(sc.nu.atom(j)(1) < 0.0);
}
