#include "czlab/cz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace czlab {

namespace {

double pow_p(double v, double p) { return p == 1.0 ? v : std::pow(v, p); }

// int_{B(x,r)} |f|^p dnu for positive nu
double tau_mass(const FunctionOnMeasure& f, const DiscreteMeasure& nu, const Vec& x,
                double r, double p) {
  double s = 0.0;
  const double r2 = r * r;
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    if ((nu.atoms().row(j).transpose() - x).squaredNorm() <= r2)
      s += pow_p(std::abs(f.values(j)), p) * nu.weight(j).real();
  }
  return s;
}

double mu_mass(const DiscreteMeasure& mu, const Vec& x, double r) {
  return ball_mass(mu, Ball(x, r)).real();
}

double lp_norm_p(const FunctionOnMeasure& f, const DiscreteMeasure& nu, double p) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < nu.size(); ++j)
    s += pow_p(std::abs(f.values(j)), p) * nu.weight(j).real();
  return s;
}

void check_admissible(const FunctionOnMeasure& f, const DiscreteMeasure& nu,
                      const DiscreteMeasure& mu, const DecompositionParams& params) {
  const double fp = lp_norm_p(f, nu, params.p);
  const double mu_total = total_variation(mu);
  if (mu_total <= 0.0) throw std::invalid_argument("decompose: mu is empty");
  const double bar = std::pow(2.0, params.d + 1) * fp / mu_total;
  if (!(std::pow(params.lambda, params.p) > bar))
    throw std::invalid_argument("decompose: lambda below admissibility threshold");
}

}  // namespace

std::vector<StoppingBall> find_stopping_balls(const FunctionOnMeasure& f,
                                              const DiscreteMeasure& nu,
                                              const DiscreteMeasure& mu,
                                              const DecompositionParams& params) {
  if (f.values.size() != nu.size())
    throw std::invalid_argument("find_stopping_balls: f not aligned with nu");
  if (!nu.is_positive() || !mu.is_positive())
    throw std::invalid_argument("find_stopping_balls: nu, mu must be positive");
  check_admissible(f, nu, mu, params);

  std::vector<double> grid = params.radius_grid;
  if (grid.empty())
    grid = dyadic_radius_grid(nu, 3.0 * std::max(nu.diameter(), mu.diameter()));

  const double bar =
      std::pow(params.lambda, params.p) / std::pow(2.0, params.d + 1);

  // radii at which dilations must stay below the bar: grid radii above 2r,
  // the sampled eta r with eta in {3,4,8}, and doublings until both supports
  // are swallowed (beyond that, admissibility closes the check)
  auto dilations_ok = [&](const Vec& x, double r) {
    double cover_nu = 0.0, cover_mu = 0.0;
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      cover_nu = std::max(cover_nu, (nu.atoms().row(j).transpose() - x).norm());
    for (Eigen::Index j = 0; j < mu.size(); ++j)
      cover_mu = std::max(cover_mu, (mu.atoms().row(j).transpose() - x).norm());
    std::vector<double> radii;
    for (double s : grid)
      if (s > 2.0 * r) radii.push_back(s);
    for (double eta : {3.0, 4.0, 8.0}) radii.push_back(eta * r);
    for (double s = 4.0 * r;; s *= 2.0) {
      radii.push_back(s);
      if (s >= cover_nu && 2.0 * s >= cover_mu) break;
    }
    for (double s : radii)
      if (tau_mass(f, nu, x, s, params.p) > bar * mu_mass(mu, x, 2.0 * s))
        return false;
    return true;
  };

  std::vector<StoppingBall> out;
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    const Vec x = nu.atom(i);
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
      const double r = *it;
      if (!(tau_mass(f, nu, x, r, params.p) > bar * mu_mass(mu, x, 2.0 * r)))
        continue;  // cc1 fails at r
      if (!dilations_ok(x, r)) continue;
      out.push_back({i, Ball(x, r)});
      break;
    }
  }
  return out;
}

std::vector<StoppingBall> besicovitch_select(const std::vector<StoppingBall>& candidates) {
  std::vector<StoppingBall> sorted = candidates;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const StoppingBall& a, const StoppingBall& b) {
                     if (a.ball.radius != b.ball.radius) return a.ball.radius > b.ball.radius;
                     return a.atom < b.atom;
                   });
  std::vector<StoppingBall> kept;
  for (const auto& c : sorted) {
    bool covered = false;
    for (const auto& k : kept)
      if (k.ball.contains(c.ball.center)) { covered = true; break; }
    if (!covered) kept.push_back(c);
  }
  return kept;
}

std::vector<PhiFunction> build_phi(const std::vector<StoppingBall>& selected,
                                   const DiscreteMeasure& gamma,
                                   const FunctionOnMeasure& f,
                                   const DiscreteMeasure& nu,
                                   const DecompositionParams& params) {
  const size_t n = selected.size();
  std::vector<PhiFunction> phis(n);

  // sum_k chi_{B_k} per nu atom, for the partition weights w_i
  Eigen::VectorXi count = Eigen::VectorXi::Zero(nu.size());
  for (const auto& s : selected)
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      if (s.ball.contains(nu.atom(j))) count(j)++;

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return selected[a].ball.radius < selected[b].ball.radius;
  });

  Eigen::VectorXd sum_phi = Eigen::VectorXd::Zero(gamma.size());
  for (size_t k : order) {
    const Ball r_ball = selected[k].ball.scaled(10.0);
    std::vector<Eigen::Index> inside;
    double gmass_s = 0.0;
    for (Eigen::Index g = 0; g < gamma.size(); ++g) {
      if (r_ball.contains(gamma.atom(g))) {
        inside.push_back(g);
        gmass_s += gamma.weight(g).real();
      }
    }
    if (inside.empty())
      throw std::runtime_error("build_phi: R_" + std::to_string(k) +
                               " does not meet the boundary discretization");

    // smallest doubling threshold 2^m lambda whose sublevel set carries
    // at least half the boundary mass of R_k
    double threshold = 0.0, gmass_a = 0.0;
    std::vector<Eigen::Index> a_set;
    for (int m = 1; m <= 64; ++m) {
      threshold = std::ldexp(params.lambda, m);  // 2^m lambda
      a_set.clear();
      gmass_a = 0.0;
      for (Eigen::Index g : inside) {
        if (sum_phi(g) <= threshold) {
          a_set.push_back(g);
          gmass_a += gamma.weight(g).real();
        }
      }
      if (gmass_a >= gmass_s / 2.0) break;
      if (m == 64) throw std::runtime_error("build_phi: threshold search diverged");
    }

    Complex integral = 0.0;
    for (Eigen::Index j = 0; j < nu.size(); ++j) {
      if (selected[k].ball.contains(nu.atom(j)))
        integral += f.values(j) * nu.weight(j) / static_cast<double>(count(j));
    }
    PhiFunction& phi = phis[k];
    phi.alpha = integral / gmass_a;
    phi.support_indices = a_set;
    phi.ball_index = static_cast<int>(k);
    phi.threshold = threshold;
    for (Eigen::Index g : a_set) sum_phi(g) += std::abs(phi.alpha);
  }
  return phis;
}

CZDecomposition decompose(const FunctionOnMeasure& f, const DiscreteMeasure& nu,
                          const DiscreteMeasure& mu, const DiscreteMeasure& gamma,
                          DecompositionParams params) {
  if (gamma.empty()) throw std::invalid_argument("decompose: empty boundary measure");
  if (f.values.size() != nu.size())
    throw std::invalid_argument("decompose: f not aligned with nu");
  const double diam_gamma = gamma.size() > 1 ? gamma.diameter() : 1.0;
  if (params.radius_grid.empty())
    params.radius_grid = dyadic_radius_grid(nu, 3.0 * diam_gamma);

  // spt nu within N(Gamma, diam Gamma)
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index g = 0; g < gamma.size(); ++g)
      dist = std::min(dist, (nu.atoms().row(j) - gamma.atoms().row(g)).norm());
    if (dist > diam_gamma)
      throw std::invalid_argument("decompose: nu atom outside N(Gamma, diam Gamma)");
  }

  CZDecomposition dec;
  dec.lambda = params.lambda;
  dec.p = params.p;
  dec.d = params.d;

  auto candidates = find_stopping_balls(f, nu, mu, params);
  auto selected = besicovitch_select(candidates);
  dec.phis = build_phi(selected, gamma, f, nu, params);
  for (const auto& s : selected) {
    dec.balls_B.push_back(s.ball);
    dec.balls_R.push_back(s.ball.scaled(10.0));
    dec.ball_centers.push_back(s.atom);
  }

  dec.cover_count = Eigen::VectorXi::Zero(nu.size());
  for (const auto& b : dec.balls_B)
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      if (b.contains(nu.atom(j))) dec.cover_count(j)++;

  // good density: nu atoms outside every B_i, projected to the nearest
  // boundary atom (ties to the lowest index)
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(gamma.size());
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    if (dec.cover_count(j) > 0) continue;
    dec.good_atoms.push_back(j);
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index g = 0; g < gamma.size(); ++g) {
      double dist = (nu.atoms().row(j) - gamma.atoms().row(g)).norm();
      if (dist < best_d) { best_d = dist; best = g; }
    }
    acc(best) += f.values(j) * nu.weight(j);
  }
  dec.h.resize(gamma.size());
  for (Eigen::Index g = 0; g < gamma.size(); ++g)
    dec.h(g) = acc(g) / gamma.weight(g).real();

  dec.h_tilde = dec.h;
  for (const auto& phi : dec.phis)
    for (Eigen::Index g : phi.support_indices) dec.h_tilde(g) += phi.alpha;

  Eigen::VectorXcd kw(gamma.size());
  for (Eigen::Index g = 0; g < gamma.size(); ++g)
    kw(g) = dec.h_tilde(g) * gamma.weight(g).real();
  dec.kappa = DiscreteMeasure(gamma.atoms(), std::move(kw));

  // beta_i = w_i f nu|B_i - phi_i Gamma
  for (size_t i = 0; i < dec.balls_B.size(); ++i) {
    std::vector<Eigen::Index> in_b;
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      if (dec.balls_B[i].contains(nu.atom(j))) in_b.push_back(j);
    const auto& phi = dec.phis[i];
    Eigen::MatrixXd a(static_cast<Eigen::Index>(in_b.size() + phi.support_indices.size()), 2);
    Eigen::VectorXcd w(a.rows());
    Eigen::Index r = 0;
    for (Eigen::Index j : in_b) {
      a.row(r) = nu.atoms().row(j);
      w(r) = f.values(j) * nu.weight(j) / static_cast<double>(dec.cover_count(j));
      ++r;
    }
    for (Eigen::Index g : phi.support_indices) {
      a.row(r) = gamma.atoms().row(g);
      w(r) = -phi.alpha * gamma.weight(g).real();
      ++r;
    }
    dec.betas.push_back(merge({DiscreteMeasure(std::move(a), std::move(w))}));
  }
  return dec;
}

double percentile_lambda(const FunctionOnMeasure& f, const DiscreteMeasure& nu,
                         const DiscreteMeasure& mu, const DiscreteMeasure& gamma,
                         double p, int d, double percentile) {
  const double diam_gamma = gamma.size() > 1 ? gamma.diameter() : 1.0;
  auto grid = dyadic_radius_grid(nu, 3.0 * diam_gamma);
  std::vector<double> levels;
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    const Vec x = nu.atom(i);
    double best = 0.0;
    for (double r : grid) {
      double m2 = mu_mass(mu, x, 2.0 * r);
      if (m2 <= 0.0) continue;
      double ratio = std::pow(2.0, d + 1) * tau_mass(f, nu, x, r, p) / m2;
      best = std::max(best, std::pow(ratio, 1.0 / p));
    }
    if (best > 0.0) levels.push_back(best);
  }
  const double admissible = std::pow(
      std::pow(2.0, d + 1) * lp_norm_p(f, nu, p) / total_variation(mu), 1.0 / p);
  if (levels.empty()) return 1.001 * admissible + 1.0;
  std::sort(levels.begin(), levels.end());
  double idx = percentile / 100.0 * (levels.size() - 1);
  double lvl = levels[static_cast<size_t>(idx)];
  return std::max(lvl, 1.001 * admissible);
}

std::pair<FunctionOnMeasure, DiscreteMeasure> phase_split(const DiscreteMeasure& nu) {
  FunctionOnMeasure f;
  f.values.resize(nu.size());
  Eigen::VectorXcd absw(nu.size());
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    double m = std::abs(nu.weight(j));
    absw(j) = m;
    f.values(j) = m > 0.0 ? nu.weight(j) / m : Complex(0.0);
  }
  return {std::move(f), nu.with_weights(std::move(absw))};
}

CZDecomposition decompose_measure(const DiscreteMeasure& nu_complex,
                                  const DiscreteMeasure& mu,
                                  const DiscreteMeasure& gamma, double lambda) {
  auto [f, nu_abs] = phase_split(nu_complex);
  DecompositionParams params;
  params.lambda = lambda;
  params.p = 1.0;
  params.d = static_cast<int>(nu_complex.dimension());
  return decompose(f, nu_abs, mu, gamma, std::move(params));
}

CZDecomposition decompose_adregular(const FunctionOnMeasure& f,
                                    const DiscreteMeasure& nu,
                                    const DiscreteMeasure& mu_adreg,
                                    DecompositionParams params) {
  auto ad = ad_regularity_constants(mu_adreg, params.d - 1);
  if (!ad.regular())
    throw std::invalid_argument("decompose_adregular: mu is not AD-regular");
  CZDecomposition dec = decompose(f, nu, mu_adreg, mu_adreg, std::move(params));
  dec.adregular_mode = true;
  return dec;
}

bool InvariantReport::all_pass() const {
  return cc1.pass && cc2.pass && cc3.pass && cc4.pass && cc5.pass && cc6.pass &&
         overlap.pass && beta_zero.pass && beta_support.pass && reassembly.pass &&
         radius_cap.pass;
}

InvariantReport verify_decomposition(const CZDecomposition& dec,
                                     const FunctionOnMeasure& f,
                                     const DiscreteMeasure& nu,
                                     const DiscreteMeasure& mu,
                                     const DiscreteMeasure& gamma) {
  InvariantReport rep;
  const double lambda = dec.lambda;
  const double p = dec.p;
  const double bar = std::pow(lambda, p) / std::pow(2.0, dec.d + 1);
  const size_t nb = dec.balls_B.size();

  // cc1: strict stopping inequality, recomputed by direct summation
  rep.cc1.observed = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < nb; ++i) {
    double lhs = 0.0;
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      if (dec.balls_B[i].contains(nu.atom(j)))
        lhs += pow_p(std::abs(f.values(j)), p) * nu.weight(j).real();
    double rhs = ball_mass(mu, dec.balls_B[i].scaled(2.0)).real() * bar;
    if (rhs == 0.0) {
      if (!(lhs > 0.0)) rep.cc1.pass = false;
      continue;
    }
    rep.cc1.observed = std::min(rep.cc1.observed, lhs / rhs);
    if (!(lhs > rhs * (1.0 - 1e-12))) rep.cc1.pass = false;
  }

  // cc2 at the sampled dilations
  for (size_t i = 0; i < nb; ++i) {
    for (double eta : {3.0, 4.0, 8.0}) {
      const Ball eb = dec.balls_B[i].scaled(eta);
      double lhs = 0.0;
      for (Eigen::Index j = 0; j < nu.size(); ++j)
        if (eb.contains(nu.atom(j)))
          lhs += pow_p(std::abs(f.values(j)), p) * nu.weight(j).real();
      double rhs = ball_mass(mu, dec.balls_B[i].scaled(2.0 * eta)).real() * bar;
      if (rhs > 0.0) rep.cc2.observed = std::max(rep.cc2.observed, lhs / rhs);
      if (lhs > rhs * (1.0 + 1e-12)) rep.cc2.pass = false;
    }
  }

  // cover counts recomputed from the balls
  Eigen::VectorXi count = Eigen::VectorXi::Zero(nu.size());
  for (const auto& b : dec.balls_B)
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      if (b.contains(nu.atom(j))) count(j)++;

  // cc3: good part equals h Gamma under nearest-atom projection
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(gamma.size());
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    if (count(j) > 0) continue;
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index g = 0; g < gamma.size(); ++g) {
      double dist = (nu.atoms().row(j) - gamma.atoms().row(g)).norm();
      if (dist < best_d) { best_d = dist; best = g; }
    }
    acc(best) += f.values(j) * nu.weight(j);
  }
  for (Eigen::Index g = 0; g < gamma.size(); ++g) {
    Complex hg = acc(g) / gamma.weight(g).real();
    if (std::abs(hg - dec.h(g)) > 1e-12 * std::max(1.0, std::abs(hg)))
      rep.cc3.pass = false;
    rep.cc3.observed = std::max(rep.cc3.observed, std::abs(hg) / lambda);
  }

  // cc4: exact matching of the phi integral with the weighted ball integral
  for (size_t i = 0; i < nb; ++i) {
    const auto& phi = dec.phis[i];
    Complex lhs = 0.0;
    for (Eigen::Index g : phi.support_indices)
      lhs += phi.alpha * gamma.weight(g).real();
    Complex rhs = 0.0;
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      if (dec.balls_B[i].contains(nu.atom(j)))
        rhs += f.values(j) * nu.weight(j) / static_cast<double>(count(j));
    double defect = std::abs(lhs - rhs);
    rep.cc4.observed = std::max(rep.cc4.observed, defect);
    if (defect > 1e-12 * std::max(1.0, std::abs(rhs))) rep.cc4.pass = false;
  }

  // cc5: c1 = sup over boundary atoms of sum_i |phi_i| / lambda; support in R_i
  Eigen::VectorXd sum_phi = Eigen::VectorXd::Zero(gamma.size());
  for (size_t i = 0; i < nb; ++i) {
    const auto& phi = dec.phis[i];
    for (Eigen::Index g : phi.support_indices) {
      sum_phi(g) += std::abs(phi.alpha);
      double dist = (gamma.atoms().row(g).transpose() - dec.balls_R[i].center).norm();
      if (dist > dec.balls_R[i].radius * (1.0 + 1e-12)) rep.cc5.pass = false;
    }
  }
  if (gamma.size() > 0) rep.cc5.observed = sum_phi.maxCoeff() / lambda;

  // cc6: ||phi_i||_inf r(R_i)^{d-1} (or mu(R_i) in AD-regular mode) vs int_{B_i}|f|dnu
  for (size_t i = 0; i < nb; ++i) {
    double size = dec.adregular_mode
                      ? ball_mass(mu, dec.balls_R[i]).real()
                      : std::pow(dec.balls_R[i].radius, dec.d - 1);
    double denom = 0.0;
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      if (dec.balls_B[i].contains(nu.atom(j)))
        denom += std::abs(f.values(j)) * nu.weight(j).real();
    if (denom <= 0.0) {
      if (std::abs(dec.phis[i].alpha) > 0.0) rep.cc6.pass = false;
      continue;
    }
    rep.cc6.observed =
        std::max(rep.cc6.observed, std::abs(dec.phis[i].alpha) * size / denom);
  }

  // almost-disjointness
  if (nu.size() > 0) rep.overlap.observed = count.maxCoeff();
  rep.overlap.pass = rep.overlap.observed <= 20.0;

  // beta_i: zero total integral and support inside R_i
  const double tv_f = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      s += std::abs(f.values(j)) * nu.weight(j).real();
    return s;
  }();
  for (size_t i = 0; i < nb; ++i) {
    Complex total = 0.0;
    for (Eigen::Index r = 0; r < dec.betas[i].size(); ++r) {
      total += dec.betas[i].weight(r);
      double dist = (dec.betas[i].atoms().row(r).transpose() - dec.balls_R[i].center).norm();
      if (dist > dec.balls_R[i].radius * (1.0 + 1e-12)) rep.beta_support.pass = false;
    }
    rep.beta_zero.observed = std::max(rep.beta_zero.observed, std::abs(total));
    if (std::abs(total) > 1e-12 * std::max(1.0, tv_f)) rep.beta_zero.pass = false;
  }

  // reassembly: kappa + sum beta_i against projected-good + in-ball parts
  {
    std::vector<DiscreteMeasure> ref_parts;
    Eigen::VectorXcd ref_gamma_w(gamma.size());
    for (Eigen::Index g = 0; g < gamma.size(); ++g) ref_gamma_w(g) = acc(g);
    ref_parts.push_back(DiscreteMeasure(gamma.atoms(), std::move(ref_gamma_w)));
    {
      Eigen::VectorXcd bad_w = Eigen::VectorXcd::Zero(nu.size());
      for (Eigen::Index j = 0; j < nu.size(); ++j)
        if (count(j) > 0) bad_w(j) = f.values(j) * nu.weight(j);
      ref_parts.push_back(DiscreteMeasure(nu.atoms(), std::move(bad_w)));
    }
    DiscreteMeasure reference = merge(ref_parts);

    std::vector<DiscreteMeasure> actual_parts = dec.betas;
    actual_parts.push_back(dec.kappa);
    actual_parts.push_back(reference.with_weights(-reference.weights()));
    double residual = total_variation(merge(actual_parts));
    rep.reassembly.observed = tv_f > 0.0 ? residual / tv_f : residual;
    if (rep.reassembly.observed > 1e-10) rep.reassembly.pass = false;
  }

  // radius cap from the theorem
  const double diam_gamma = gamma.size() > 1 ? gamma.diameter() : 1.0;
  for (const auto& b : dec.balls_B) {
    rep.radius_cap.observed = std::max(rep.radius_cap.observed, b.radius / diam_gamma);
    if (b.radius > 3.0 * diam_gamma * (1.0 + 1e-12)) rep.radius_cap.pass = false;
  }
  return rep;
}

}  // namespace czlab
