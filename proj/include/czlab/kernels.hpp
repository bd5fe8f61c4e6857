#pragma once

#include <cstdint>
#include <string>

#include "czlab/measure.hpp"

namespace czlab {

enum class KernelKind { Cauchy, Riesz, Cmpt };

/// Convolution CZ kernel with declared size constant c and Hoelder exponent eta.
/// All three kinds are complex-scalar valued in the plane:
///   cauchy   1/z
///   riesz    z/|z|^2          (the planar Riesz kernel packed as one complex number)
///   cmpt(m)  Re(z)^(2m-1)/|z|^(2m)
struct KernelSpec {
  KernelKind kind = KernelKind::Cauchy;
  int cmpt_m = 1;          // parameter m for the cmpt family
  int homogeneity = 1;     // n: |k| ~ |x-y|^-n
  double size_constant = 1.0;
  double hoelder_exponent = 1.0;

  static KernelSpec cauchy();
  static KernelSpec riesz();
  static KernelSpec cmpt(int m);

  /// Parses "cauchy", "riesz" or "cmpt:m".
  static KernelSpec parse(const std::string& name);
  std::string name() const;
};

/// Kernel value at (x, y), x != y. Throws on diagonal evaluation.
Complex eval(const KernelSpec& k, const Vec& x, const Vec& y);

struct CZConstants {
  double c_size_observed = 0.0;
  double c_hoelder_observed = 0.0;
};

/// Sampled falsifier for the size and Hoelder bounds: max over seeded random
/// triples (x, x', y) with |x-x'| <= |x-y|/2 of the normalized quantities.
CZConstants cz_constants(const KernelSpec& k, int samples, std::uint64_t seed);

}  // namespace czlab
