#pragma once

// Finitely supported designs, information matrices and the D / e_j
// optimality criteria.

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "inhibdesign/kinetics.hpp"

namespace inhibdesign {

/// Coordinate system a design lives in: (S, I) or (x, y).
enum class Frame { original, transformed };

std::string_view frame_name(Frame frame);

/// One support point. In the original frame `first` is S and `second` is I;
/// in the transformed frame they are x and y.
struct SupportPoint {
  double first;
  double second;
  double weight;
};

inline constexpr double kWeightSumTol = 1e-12;
inline constexpr double kMergeTol = 1e-10;
inline constexpr double kRankTol = 1e-10;

/// Probability measure with finite support. Weights are strictly positive
/// and sum to one; points are pairwise distinct.
class Design {
 public:
  Design(Frame frame, std::vector<SupportPoint> points);

  /// Merges points closer than `merge_tol` (summing weights) before
  /// validating.
  static Design merged(Frame frame, std::vector<SupportPoint> points,
                       double merge_tol = kMergeTol);

  Frame frame() const { return frame_; }
  std::span<const SupportPoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const SupportPoint& operator[](std::size_t k) const { return points_[k]; }

 private:
  Frame frame_;
  std::vector<SupportPoint> points_;
};

/// Thrown when a functional c^T theta is not estimable under a design
/// (c outside the range of the information matrix).
class NotEstimable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Criterion { D, V, Km, Kic };

/// Names used on the command line: D, eV, eKm, eKic.
std::string_view criterion_name(Criterion criterion);
Criterion parse_criterion(std::string_view name);

/// Index j (1..3) of the parameter targeted by an e_j criterion.
int criterion_index(Criterion criterion);

/// Sum_i w_i g(S_i, I_i) g(S_i, I_i)^T for an original-frame design.
Matrix3 information_matrix(const Design& design, const Theta& theta);

/// Information matrix in the original parametrisation for a design in
/// either frame (transformed designs go through A M~ A^T, so points with
/// x = 1 are allowed).
Matrix3 information_matrix_any(const Design& design, const Theta& theta);

double d_criterion(const Matrix3& m);

/// Moore-Penrose inverse by symmetric eigendecomposition; eigenvalues below
/// rank_tol * lambda_max count as zero.
Matrix3 pseudo_inverse(const Matrix3& m, double rank_tol = kRankTol);

int numerical_rank(const Matrix3& m, double rank_tol = kRankTol);

/// ||(I - M M^+) c|| <= tol * ||c||.
bool range_inclusion(const Matrix3& m, const Vec3& c, double tol = 1e-10);

/// c^T M^- c; throws NotEstimable unless c lies in the range of M.
double c_variance(const Matrix3& m, const Vec3& c, double tol = 1e-10);

/// (e_j^T M^- e_j)^{-1} for j in 1..3; throws NotEstimable.
double ej_criterion(const Design& design, const Theta& theta, int j);

/// D: det M. e_j: the e_j criterion, or 0 when the parameter is not
/// estimable.
double criterion_value(const Design& design, const Theta& theta,
                       Criterion criterion);

/// Phi(a)/Phi(b) for e_j, (det M_a / det M_b)^{1/3} for D. Throws
/// std::domain_error when Phi(b) is zero.
double efficiency(const Design& a, const Design& b, const Theta& theta,
                  Criterion criterion);

}  // namespace inhibdesign
