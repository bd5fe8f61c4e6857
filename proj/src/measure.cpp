#include "czlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace czlab {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd atoms, Eigen::VectorXcd weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.rows() != weights_.size())
    throw std::invalid_argument("DiscreteMeasure: atom/weight length mismatch");
  if (atoms_.rows() > 0 && atoms_.cols() < 2)
    throw std::invalid_argument("DiscreteMeasure: dimension must be >= 2");
  if (!all_finite(atoms_) || !weights_.allFinite())
    throw std::invalid_argument("DiscreteMeasure: non-finite entry");
}

bool DiscreteMeasure::is_positive(double tol) const {
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (std::abs(weights_(i).imag()) > tol) return false;
    if (weights_(i).real() < -tol) return false;
  }
  return true;
}

double DiscreteMeasure::diameter() const {
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < atoms_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < atoms_.rows(); ++j)
      d2 = std::max(d2, (atoms_.row(i) - atoms_.row(j)).squaredNorm());
  return std::sqrt(d2);
}

double DiscreteMeasure::bounding_box_diameter() const {
  if (atoms_.rows() == 0) return 0.0;
  Eigen::VectorXd lo = atoms_.colwise().minCoeff();
  Eigen::VectorXd hi = atoms_.colwise().maxCoeff();
  return (hi - lo).norm();
}

double DiscreteMeasure::nearest_neighbor_spacing() const {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < atoms_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < atoms_.rows(); ++j)
      best = std::min(best, (atoms_.row(i) - atoms_.row(j)).squaredNorm());
  return std::sqrt(best);
}

DiscreteMeasure DiscreteMeasure::translated(const Vec& v) const {
  Eigen::MatrixXd a = atoms_;
  a.rowwise() += v.transpose();
  return DiscreteMeasure(std::move(a), weights_);
}

DiscreteMeasure DiscreteMeasure::with_weights(Eigen::VectorXcd w) const {
  return DiscreteMeasure(atoms_, std::move(w));
}

DiscreteMeasure DiscreteMeasure::abs() const {
  Eigen::VectorXcd w(weights_.size());
  for (Eigen::Index i = 0; i < weights_.size(); ++i) w(i) = std::abs(weights_(i));
  return DiscreteMeasure(atoms_, std::move(w));
}

double total_variation(const DiscreteMeasure& m) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) s += std::abs(m.weight(i));
  return s;
}

Complex ball_mass(const DiscreteMeasure& m, const Ball& b) {
  Complex s = 0.0;
  const double r2 = b.radius * b.radius;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if ((m.atoms().row(i).transpose() - b.center).squaredNorm() <= r2)
      s += m.weight(i);
  }
  return s;
}

std::vector<double> dyadic_radius_grid(const DiscreteMeasure& m, double r_max) {
  if (m.empty()) throw std::invalid_argument("dyadic_radius_grid: empty support");
  double r = m.size() > 1 ? m.nearest_neighbor_spacing() : r_max / 1024.0;
  if (!(r > 0.0)) throw std::invalid_argument("dyadic_radius_grid: degenerate spacing");
  // keep grid radii off the exact interatomic distances: a closed ball of
  // radius exactly the spacing would swallow ties on both sides
  r *= 1.0 - 1e-9;
  std::vector<double> grid;
  for (; r < r_max; r *= 2.0) grid.push_back(r);
  grid.push_back(r_max);
  return grid;
}

double growth_constant(const DiscreteMeasure& m, int n) {
  if (m.empty()) throw std::invalid_argument("growth_constant: empty support");
  if (!m.is_positive()) throw std::invalid_argument("growth_constant: measure not positive");
  const double diam = m.size() > 1 ? m.diameter() : 1.0;
  auto grid = dyadic_radius_grid(m, 2.0 * std::max(diam, 1e-300));
  double sup = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    for (double r : grid) {
      double mass = ball_mass(m, Ball(m.atom(i), r)).real();
      sup = std::max(sup, mass / std::pow(r, n));
    }
  }
  return sup;
}

ADRegularityConstants ad_regularity_constants(const DiscreteMeasure& m, int n) {
  if (m.size() < 2)
    throw std::invalid_argument("ad_regularity_constants: need at least 2 atoms");
  if (!m.is_positive())
    throw std::invalid_argument("ad_regularity_constants: measure not positive");
  const double diam = m.diameter();
  auto grid = dyadic_radius_grid(m, 2.0 * diam);
  ADRegularityConstants out;
  out.c_lower = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    for (double r : grid) {
      double mass = ball_mass(m, Ball(m.atom(i), r)).real();
      double ratio = mass / std::pow(r, n);
      out.c_upper = std::max(out.c_upper, ratio);
      if (r <= diam) out.c_lower = std::min(out.c_lower, ratio);
    }
  }
  return out;
}

DiscreteMeasure restrict(const DiscreteMeasure& m,
                         const std::function<bool(const Vec&)>& pred) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (pred(m.atom(i))) keep.push_back(i);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(keep.size()), m.dimension());
  Eigen::VectorXcd w(static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) {
    a.row(static_cast<Eigen::Index>(k)) = m.atoms().row(keep[k]);
    w(static_cast<Eigen::Index>(k)) = m.weight(keep[k]);
  }
  return DiscreteMeasure(std::move(a), std::move(w));
}

bool neighborhood_contains(const std::vector<Vec>& a, double eps, const Vec& x) {
  if (a.empty()) throw std::invalid_argument("neighborhood_contains: empty set");
  for (const Vec& p : a)
    if ((p - x).norm() <= eps) return true;
  return false;
}

DiscreteMeasure merge(const std::vector<DiscreteMeasure>& parts) {
  Eigen::Index d = 0;
  for (const auto& p : parts)
    if (!p.empty()) { d = p.dimension(); break; }
  std::map<std::vector<double>, Complex> acc;
  for (const auto& p : parts) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      std::vector<double> key(p.atoms().row(i).begin(), p.atoms().row(i).end());
      acc[key] += p.weight(i);
    }
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(acc.size()), d);
  Eigen::VectorXcd w(static_cast<Eigen::Index>(acc.size()));
  Eigen::Index r = 0;
  for (const auto& [key, val] : acc) {
    for (Eigen::Index c = 0; c < d; ++c) a(r, c) = key[static_cast<size_t>(c)];
    w(r) = val;
    ++r;
  }
  return DiscreteMeasure(std::move(a), std::move(w));
}

DiscreteMeasure read_measure_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

  // header x1,...,xd,w_re,w_im
  int fields = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
  int d = fields - 2;
  if (d < 2) throw std::runtime_error(path + ": header must be x1,..,xd,w_re,w_im");

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> row;
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != fields)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(fields) + " fields");
    for (double v : row)
      if (!std::isfinite(v))
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-finite value");
    rows.push_back(std::move(row));
  }

  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), d);
  Eigen::VectorXcd w(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int c = 0; c < d; ++c) a(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<size_t>(c)];
    w(static_cast<Eigen::Index>(i)) = Complex(rows[i][static_cast<size_t>(d)],
                                              rows[i][static_cast<size_t>(d) + 1]);
  }
  // duplicate-point check with line numbers
  std::map<std::vector<double>, int> seen;
  for (size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> key(rows[i].begin(), rows[i].begin() + d);
    auto [it, fresh] = seen.emplace(std::move(key), static_cast<int>(i) + 2);
    if (!fresh)
      throw std::runtime_error(path + ":" + std::to_string(i + 2) +
                               ": duplicate point (first at line " +
                               std::to_string(it->second) + ")");
  }
  return DiscreteMeasure(std::move(a), std::move(w));
}

void write_measure_csv(const DiscreteMeasure& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);
  for (Eigen::Index c = 0; c < m.dimension(); ++c) out << "x" << (c + 1) << ",";
  out << "w_re,w_im\n";
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    for (Eigen::Index c = 0; c < m.dimension(); ++c) out << m.atoms()(i, c) << ",";
    out << m.weight(i).real() << "," << m.weight(i).imag() << "\n";
  }
}

}  // namespace czlab
