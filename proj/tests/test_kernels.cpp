#include <doctest.h>

#include <cmath>
#include <random>

#include "czlab/kernels.hpp"

using namespace czlab;

namespace {
Vec pt(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}
}  // namespace

TEST_CASE("cauchy kernel values") {
  auto k = KernelSpec::cauchy();
  CHECK(eval(k, pt(1, 0), pt(0, 0)) == Complex(1.0, 0.0));
  CHECK(eval(k, pt(0, 1), pt(0, 0)) == Complex(0.0, -1.0));
  CHECK_THROWS_AS(static_cast<void>(eval(k, pt(1, 1), pt(1, 1))), std::domain_error);
}

TEST_CASE("cmpt kernel values") {
  auto k = KernelSpec::cmpt(1);
  // x - y = (1,1): Re(z)/|z|^2 = 1/2
  CHECK(eval(k, pt(1, 1), pt(0, 0)).real() == doctest::Approx(0.5));
  CHECK(eval(k, pt(1, 1), pt(0, 0)).imag() == 0.0);
}

TEST_CASE("antisymmetry on 1000 seeded pairs") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-5, 5);
  for (const auto& k : {KernelSpec::cauchy(), KernelSpec::riesz(), KernelSpec::cmpt(2)}) {
    for (int i = 0; i < 1000; ++i) {
      Vec x = pt(u(rng), u(rng)), y = pt(u(rng), u(rng));
      if ((x - y).norm() < 1e-9) continue;
      Complex a = eval(k, x, y), b = eval(k, y, x);
      CHECK(std::abs(a + b) <= 1e-12 * std::abs(a));
    }
  }
}

TEST_CASE("homogeneity under dilation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (const auto& k : {KernelSpec::cauchy(), KernelSpec::riesz(), KernelSpec::cmpt(1),
                        KernelSpec::cmpt(3)}) {
    for (int i = 0; i < 200; ++i) {
      Vec z = pt(u(rng), u(rng));
      if (z.norm() < 1e-6) continue;
      double t = std::pow(10.0, u(rng));
      Complex a = eval(k, t * z, pt(0, 0));
      Complex b = eval(k, z, pt(0, 0)) / t;
      CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
    }
  }
}

TEST_CASE("cz_constants for the cauchy kernel") {
  auto k = KernelSpec::cauchy();
  auto c = cz_constants(k, 20000, 123);
  // |1/z| = 1/|z| exactly
  CHECK(c.c_size_observed == doctest::Approx(1.0).epsilon(1e-12));
  // analytic bound under the half-distance constraint, both terms
  CHECK(c.c_hoelder_observed <= 4.0);
  CHECK(c.c_hoelder_observed > 0.5);
}

TEST_CASE("cz_constants stay within declared bounds") {
  for (const auto& name : {"cauchy", "riesz"}) {
    auto k = KernelSpec::parse(name);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      auto c = cz_constants(k, 5000, seed);
      CHECK(c.c_size_observed <= k.size_constant * (1.0 + 1e-12));
      CHECK(c.c_hoelder_observed <= 4.0 * k.size_constant);
    }
  }
}

TEST_CASE("kernel parsing") {
  CHECK(KernelSpec::parse("cauchy").kind == KernelKind::Cauchy);
  CHECK(KernelSpec::parse("cmpt:3").cmpt_m == 3);
  CHECK(KernelSpec::parse("cmpt:2").name() == "cmpt:2");
  CHECK_THROWS(KernelSpec::parse("nope"));
}
