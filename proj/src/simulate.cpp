#include "inhibdesign/simulate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "inhibdesign/oracle.hpp"
#include "inhibdesign/transform.hpp"

namespace inhibdesign {

Design complete_singular_design(const Design& design, const Theta& theta,
                                const DesignSpace& space, double eps,
                                SupportPoint* added) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("complete_singular_design: eps must lie in (0, 1)");
  }
  const Design td = pushforward_design(design, theta);
  const Matrix3 m = transformed_info(td);
  const Matrix3 proj = m * pseudo_inverse(m);
  const TransformedSpace xs = transformed_space(space, theta);
  double best = -1.0;
  XY best_pt{xs.x_max(), xs.y_max()};
  for (const auto& p : lattice(xs, 51)) {
    const Vec3 f = f_vector(p.x, p.y);
    const double r = (f - proj * f).squaredNorm() / std::max(f.squaredNorm(), 1e-300);
    if (r > best) {
      best = r;
      best_pt = p;
    }
  }
  const SI o = inverse(best_pt.x, best_pt.y, theta);
  std::vector<SupportPoint> pts;
  for (const auto& p : design.points()) pts.push_back({p.first, p.second, (1.0 - eps) * p.weight});
  pts.push_back({o.s, o.i, eps});
  if (added != nullptr) *added = pts.back();
  return Design::merged(Frame::original, std::move(pts));
}

MonteCarloResult monte_carlo_covariance(const Design& design,
                                        const Theta& theta, double sigma,
                                        int n, int reps, std::uint64_t seed,
                                        const DesignSpace& space,
                                        const MonteCarloOptions& opt) {
  if (design.frame() != Frame::original) {
    throw std::invalid_argument("monte_carlo_covariance: design must be in the original frame");
  }
  if (n < 1 || reps < 2) throw std::invalid_argument("monte_carlo_covariance: need n >= 1 and reps >= 2");
  if (!(sigma >= 0.0)) throw std::invalid_argument("monte_carlo_covariance: sigma must be >= 0");

  MonteCarloResult res;
  const double scale = sigma * sigma / n;
  const Matrix3 m0 = information_matrix(design, theta);
  for (int j = 0; j < 3; ++j) {
    const Vec3 e = Vec3::Unit(j);
    res.unperturbed_variance(j) = range_inclusion(m0, e)
                                      ? scale * c_variance(m0, e)
                                      : std::numeric_limits<double>::quiet_NaN();
  }

  Design fit_design = design;
  if (numerical_rank(m0) < 3) {
    SupportPoint extra{0.0, 0.0, 0.0};
    fit_design = complete_singular_design(design, theta, space, opt.perturbation, &extra);
    res.perturbed = true;
    res.added_point = extra;
  }
  res.predicted_cov = scale * pseudo_inverse(information_matrix(fit_design, theta));

  for (int r = 0; r < reps; ++r) {
    const Dataset data = simulate_observations(fit_design, n, theta, sigma, seed,
                                               static_cast<std::uint64_t>(r));
    const FitResult fit = fit_nls(data, theta, opt.fit);
    if (fit.converged) {
      res.fits.push_back(fit.theta);
    } else {
      ++res.nonconverged;
    }
  }
  res.valid = res.nonconverged <= 0.01 * reps;

  const auto m = static_cast<double>(res.fits.size());
  if (res.fits.size() >= 2) {
    for (const auto& t : res.fits) res.mean += t.as_vector();
    res.mean /= m;
    for (const auto& t : res.fits) {
      const Vec3 d = t.as_vector() - res.mean;
      res.empirical_cov.noalias() += d * d.transpose();
    }
    res.empirical_cov /= (m - 1.0);
  }
  for (int j = 0; j < 3; ++j) {
    const double p = res.predicted_cov(j, j);
    res.ratio(j) = p > 0.0 ? res.empirical_cov(j, j) / p
                           : std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

}  // namespace inhibdesign
