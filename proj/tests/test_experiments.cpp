#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "czlab/experiments.hpp"

using namespace czlab;

TEST_CASE("norm_growth fits a positive power law") {
  auto rec = norm_growth(1, 4, 1, 1e-6, 7);
  CHECK(rec.ok);
  double slope = rec.results["slope"];
  // the self-norm grows like n^(1/2); small stages run a bit above the
  // asymptotic exponent
  CHECK(slope > 0.3);
  CHECK(slope < 1.0);
  auto table = rec.results["table"];
  REQUIRE(table.size() == 4);
  double prev = 0.0;
  for (const auto& row : table) {
    double norm = row["norm"];
    CHECK(norm > prev);
    prev = norm;
  }
  CHECK(table[0]["atoms"] == 4);
  CHECK(table[3]["atoms"] == 256);

  CHECK_THROWS_AS(norm_growth(1, 8, 1), std::invalid_argument);
}

TEST_CASE("scaling_identities holds to near machine precision") {
  auto sigma = cantor_measure(2);
  auto rec = scaling_identities(sigma, {0.25, 2.0, 9.0}, 1e-11, 3);
  CHECK(rec.ok);
  CHECK(rec.results["max_relative_deviation"].get<double>() <= 1e-9);
  CHECK(rec.results["dev_translate"].get<double>() <= 1e-9);
  for (const auto& row : rec.results["table"]) {
    CHECK(row["dev_self"].get<double>() <= 1e-9);
    CHECK(row["dev_cross"].get<double>() <= 1e-9);
  }
}

TEST_CASE("cross_norm_failure respects the block lower bound") {
  auto rec = cross_norm_failure({1, 2, 3}, 100.0, 1, 1e-9, 5);
  CHECK(rec.ok);
  for (const auto& row : rec.results["table"]) {
    CHECK(row["lower_bound_ok"].get<bool>());
    CHECK(row["monotone_ok"].get<bool>());
    CHECK(row["cross_norm"].get<double>() >= row["lower_bound"].get<double>() - 1e-6);
  }
  CHECK_THROWS_AS(cross_norm_failure({12}), std::invalid_argument);
}

TEST_CASE("scenario_eps_grid halves from the separation anchor") {
  auto sc = halfplane_scenario(40, 25, 25, 11);
  auto grid = scenario_eps_grid(sc, 3, 16.0);
  REQUIRE(grid.size() == 4);
  for (size_t i = 1; i < grid.size(); ++i)
    CHECK(grid[i] == doctest::Approx(grid[i - 1] / 2.0));
  // anchor is 16x the min mu-nu separation
  double sep = grid[0] / 16.0;
  for (Eigen::Index i = 0; i < sc.mu.size(); ++i)
    for (Eigen::Index j = 0; j < sc.nu.size(); ++j)
      CHECK((sc.mu.atoms().row(i) - sc.nu.atoms().row(j)).norm() >= sep * (1.0 - 1e-12));
}

TEST_CASE("weak_type_scan produces finite stable ratios") {
  auto sc = halfplane_scenario(50, 30, 30, 13);
  auto f = FunctionOnMeasure::constant(sc.nu, Complex(1.0, 0.0));
  auto grid = scenario_eps_grid(sc, 4);
  auto rec = weak_type_scan(sc, KernelSpec::cauchy(), f, grid, 1.0);
  CHECK(rec.ok);
  CHECK(rec.results["sup_W"].get<double>() > 0.0);
  CHECK(rec.results["table"].size() == grid.size());
  // the separated geometry keeps W(1, eps) bounded as eps shrinks
  CHECK(rec.results["max_over_min"].get<double>() <= 100.0);
}

TEST_CASE("maximal_bound_check") {
  auto sc = halfplane_scenario(40, 30, 30, 19);
  auto f = FunctionOnMeasure::constant(sc.mu, Complex(1.0, 0.0));
  auto rec = maximal_bound_check(sc.mu, sc.nu, f, 2.0, 2.0);
  CHECK(rec.ok);
  CHECK(rec.results["ratio"].get<double>() > 0.0);
  CHECK(rec.results["ratio_q"].get<double>() > 0.0);
  // q-variant dominates the plain radial maximal for q > 1 (Jensen)
  CHECK(rec.results["ratio_q"].get<double>() >=
        rec.results["ratio"].get<double>() * (1.0 - 1e-12));

  CHECK_THROWS_AS(maximal_bound_check(sc.mu, sc.nu, f, 1.0, 2.0),
                  std::invalid_argument);
}

TEST_CASE("experiment records serialize with replay parameters") {
  auto rec = scaling_identities(cantor_measure(1), {2.0});
  auto j = rec.to_json();
  CHECK(j["name"] == "section5-scaling");
  CHECK(j.contains("parameters"));
  CHECK(j["parameters"].contains("seed"));
  CHECK(j["parameters"].contains("lambdas"));
  CHECK(j.contains("results"));
  CHECK(j.contains("ok"));
}

TEST_CASE("norm_growth stage entries match a dense SVD oracle") {
  auto rec = norm_growth(1, 2, 1, 1e-8, 11);
  auto table = rec.results["table"];
  REQUIRE(table.size() == 2);
  for (const auto& row : table) {
    int stage = row["stage"];
    double eps = row["eps"];
    double norm = row["norm"];
    CHECK(norm > 0.0);
    DiscreteMeasure sigma = cantor_measure(stage);
    OperatorMatrix b = assemble_matrix(KernelSpec::cauchy(), sigma, sigma, eps);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(b.entries());
    CHECK(norm == doctest::Approx(svd.singularValues()(0)).epsilon(1e-6));
  }
}
