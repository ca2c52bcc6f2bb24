#pragma once

// Monte-Carlo check of the asymptotic covariance sigma^2/n M^-1.

#include <cstdint>
#include <optional>
#include <vector>

#include "inhibdesign/design.hpp"
#include "inhibdesign/kinetics.hpp"

namespace inhibdesign {

inline constexpr double kSingularPerturbation = 0.02;

struct MonteCarloResult {
  Matrix3 empirical_cov = Matrix3::Zero();
  Matrix3 predicted_cov = Matrix3::Zero();
  /// empirical_cov(j, j) / predicted_cov(j, j); NaN where the prediction
  /// is zero.
  Vec3 ratio = Vec3::Zero();
  Vec3 mean = Vec3::Zero();
  std::vector<Theta> fits;
  int nonconverged = 0;
  /// False when more than 1% of the fits did not converge.
  bool valid = true;
  /// Set when a singular design was mixed with a third point so that the
  /// full parameter can be fitted.
  bool perturbed = false;
  std::optional<SupportPoint> added_point;
  /// Asymptotic variance sigma^2/n c^T M^- c of each estimable coordinate
  /// under the unperturbed design (NaN if not estimable).
  Vec3 unperturbed_variance = Vec3::Zero();
};

struct MonteCarloOptions {
  double perturbation = kSingularPerturbation;
  FitOptions fit;
};

/// Fits `reps` datasets of size n drawn at theta under an original-frame
/// design. Replicate r uses random stream r of `seed`, so results do not
/// depend on evaluation order.
MonteCarloResult monte_carlo_covariance(const Design& design,
                                        const Theta& theta, double sigma,
                                        int n, int reps, std::uint64_t seed,
                                        const DesignSpace& space,
                                        const MonteCarloOptions& opt = {});

/// Rank-3 completion of a singular original-frame design: adds mass eps at
/// the lattice point of `space` whose transformed regression vector is
/// farthest from the span of the current support.
Design complete_singular_design(const Design& design, const Theta& theta,
                                const DesignSpace& space, double eps,
                                SupportPoint* added = nullptr);

}  // namespace inhibdesign
