#pragma once

// Optimality certificates: Kiefer-Wolfowitz equivalence checks on a grid,
// the generalised inverse used for the V-optimal design, and Elfving
// supporting-hyperplane certificates for K_m / K_ic.
//
// All checks are grid checks: a failing report refutes optimality, a
// passing one certifies up to the grid resolution.

#include <array>
#include <string>
#include <vector>

#include "inhibdesign/design.hpp"
#include "inhibdesign/transform.hpp"

namespace inhibdesign {

inline constexpr int kDefaultGrid = 201;
inline constexpr double kDefaultSlackTol = 1e-8;

/// How the generalised inverse of a c-check was obtained.
enum class GInverseRoute { inverse, v_candidate, kernel_search, none };

std::string_view route_name(GInverseRoute route);

struct CertificateReport {
  std::string check;
  /// D: max kappa. c: max (c^T G f)^2 / (c^T M^- c) - 1.
  double max_slack = 0.0;
  XY argmax{0.0, 0.0};
  std::vector<double> support_slacks;
  bool pass = false;
  GInverseRoute route = GInverseRoute::none;
  /// c^T M^- c for c-checks.
  double variance = 0.0;
  std::string note;
};

/// kappa(x, y) = f^T M~^{-1} f - 3 on a grid_n^2 lattice plus the support
/// points. Throws std::domain_error when M~ is singular.
CertificateReport d_equivalence_check(const Design& design,
                                      const TransformedSpace& xs,
                                      int grid_n = kDefaultGrid,
                                      double tol = kDefaultSlackTol);

/// kappa of an arbitrary nonsingular transformed design.
double kappa(const Design& design, double x, double y);

/// Expanded kappa of the normalised D-optimal design
/// {(1/2,1), (1,1/2), (1,1)}: 3x^2y^2(20x^2-44x+8xy+20y^2-44y+41) - 3.
double kappa_normalized(double x, double y);
Eigen::Vector2d kappa_normalized_gradient(double x, double y);
Eigen::Matrix2d kappa_normalized_hessian(double x, double y);

/// The two interior stationary points ((55 -+ sqrt73)/72, same) of the
/// normalised kappa: a saddle and a minimum, the roots of
/// 72t^2 - 110t + 41. The gradient is nonzero at (55 -+ sqrt73)/172.
std::array<XY, 2> kappa_stationary_points();

/// Generalised inverse G = P^{-T} H P^{-1} of M~ for the two-point V
/// candidate on the line y = g(x, q*) (branch x_max <= y_max). Throws
/// std::domain_error when the design is not such a candidate.
Matrix3 v_candidate_ginverse(const Design& design, const TransformedSpace& xs);

/// (c^T G f)^2 <= c^T M^- c on the grid with equality at the support.
/// G = M~^{-1} for nonsingular M~, the V-candidate inverse for c ~ (1,1,1),
/// otherwise the kernel direction of G c is optimised. Throws NotEstimable
/// when c is outside the range of M~, and std::domain_error when the
/// generalised inverse fails M G M = M.
CertificateReport c_equivalence_check(const Design& design, const Vec3& c,
                                      const TransformedSpace& xs,
                                      int grid_n = kDefaultGrid,
                                      double tol = kDefaultSlackTol);

/// tau(x, y) = y (x/x_bar)(y + x/x_bar - 3) for y_max = 1 and q* = 0.
double tau_special(double x, double y, double xbar);

/// General tau of the V certificate: (c1^T G f)^2 = kappa tau^2.
double tau_general(double x, double y, double q, double xbar, double psi);

/// h(x) = x^2 (1 + x_bar) - x (x_bar^2 + 1) + x_bar (1 - x_bar).
double elfving_h(double x, double xbar);

struct ElfvingReport {
  double xbar = 0.0;
  double gamma = 0.0;
  Vec3 hyperplane = Vec3::Zero();
  double representation_residual = 0.0;
  /// (gamma e_2)^T n, should equal 1.
  double normalization = 0.0;
  double max_abs = 0.0;
  XY argmax{0.0, 0.0};
  bool pass = false;
  std::string note;
};

/// Elfving certificate for a two-point e2 candidate, computed in the
/// normalised frame (x / x_max, y / y_max).
ElfvingReport elfving_certificate_e2(const Design& design,
                                     const TransformedSpace& xs,
                                     int grid_n = kDefaultGrid);

/// e3 certificate through the permutation exchanging x and y.
ElfvingReport elfving_certificate_e3(const Design& design,
                                     const TransformedSpace& xs,
                                     int grid_n = kDefaultGrid);

/// Certificate for a transformed-frame design. c-criteria use the
/// directions c_1 = (1,1,1), c_2 ~ e_2, c_3 ~ e_3. Criterion failures
/// (singular matrix, non-estimable c) yield a failed report, not an
/// exception.
CertificateReport certify_transformed(const Design& design,
                                      Criterion criterion,
                                      const TransformedSpace& xs,
                                      int grid_n = kDefaultGrid,
                                      double tol = kDefaultSlackTol);

/// Same as certify_transformed after moving an original-frame design to
/// the transformed frame.
CertificateReport certify(const Design& design, Criterion criterion,
                          const DesignSpace& space, const Theta& theta,
                          int grid_n = kDefaultGrid,
                          double tol = kDefaultSlackTol);

}  // namespace inhibdesign
