#include "czlab/kernels.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace czlab {

KernelSpec KernelSpec::cauchy() { return {KernelKind::Cauchy, 1, 1, 1.0, 1.0}; }
KernelSpec KernelSpec::riesz() { return {KernelKind::Riesz, 1, 1, 1.0, 1.0}; }

KernelSpec KernelSpec::cmpt(int m) {
  if (m < 1) throw std::invalid_argument("cmpt kernel: m >= 1 required");
  return {KernelKind::Cmpt, m, 1, 1.0, 1.0};
}

KernelSpec KernelSpec::parse(const std::string& name) {
  if (name == "cauchy") return cauchy();
  if (name == "riesz") return riesz();
  if (name.rfind("cmpt:", 0) == 0) return cmpt(std::stoi(name.substr(5)));
  throw std::invalid_argument("unknown kernel '" + name + "'");
}

std::string KernelSpec::name() const {
  switch (kind) {
    case KernelKind::Cauchy: return "cauchy";
    case KernelKind::Riesz: return "riesz";
    case KernelKind::Cmpt: return "cmpt:" + std::to_string(cmpt_m);
  }
  return "?";
}

Complex eval(const KernelSpec& k, const Vec& x, const Vec& y) {
  const double zx = x(0) - y(0);
  const double zy = x(1) - y(1);
  const double r2 = zx * zx + zy * zy;
  if (r2 == 0.0) throw std::domain_error("kernel: diagonal evaluation");
  switch (k.kind) {
    case KernelKind::Cauchy:
      // 1/z = conj(z)/|z|^2
      return Complex(zx / r2, -zy / r2);
    case KernelKind::Riesz:
      return Complex(zx / r2, zy / r2);
    case KernelKind::Cmpt: {
      const int m = k.cmpt_m;
      return std::pow(zx, 2 * m - 1) / std::pow(r2, m);
    }
  }
  throw std::logic_error("kernel: bad kind");
}

CZConstants cz_constants(const KernelSpec& k, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("cz_constants: samples >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  CZConstants out;
  const int n = k.homogeneity;
  const double eta = k.hoelder_exponent;
  for (int s = 0; s < samples; ++s) {
    Vec y(2), x(2), xp(2);
    y << unit(rng), unit(rng);
    Vec dir(2);
    dir << unit(rng), unit(rng);
    if (dir.norm() < 1e-12) dir << 1.0, 0.0;
    dir.normalize();
    const double r = std::pow(10.0, scale(rng));
    x = y + r * dir;
    // perturbation within the half-distance constraint
    Vec pdir(2);
    pdir << unit(rng), unit(rng);
    if (pdir.norm() < 1e-12) pdir << 0.0, 1.0;
    pdir.normalize();
    std::uniform_real_distribution<double> frac(1e-6, 0.5);
    const double h = frac(rng) * r;
    xp = x + h * pdir;

    const double kxy = std::abs(eval(k, x, y));
    out.c_size_observed = std::max(out.c_size_observed, kxy * std::pow(r, n));

    const double dk = std::abs(eval(k, x, y) - eval(k, xp, y)) +
                      std::abs(eval(k, y, x) - eval(k, y, xp));
    out.c_hoelder_observed = std::max(
        out.c_hoelder_observed, dk * std::pow(r, n + eta) / std::pow(h, eta));
  }
  return out;
}

}  // namespace czlab
