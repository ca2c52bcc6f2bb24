#pragma once

// Coordinate change (S, I) -> (x, y) = (S/(K_m+S), 1/(1+I/K_ic)) under which
// the gradient factors as A(theta) f(x, y) with f(x, y) = xy (1, x, y).

#include <utility>

#include "inhibdesign/design.hpp"
#include "inhibdesign/kinetics.hpp"

namespace inhibdesign {

/// Rectangle [x_min, x_max] x [y_min, y_max] in the transformed frame.
/// 0 <= x_min < x_max <= 1 and 0 <= y_min < y_max <= 1; the closed upper
/// bound admits the normalised frame.
class TransformedSpace {
 public:
  TransformedSpace(double x_min, double x_max, double y_min, double y_max);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }

  bool contains(double x, double y, double rel_tol = 1e-12) const;

  /// Same rectangle with the axes exchanged.
  TransformedSpace swapped() const {
    return TransformedSpace(y_min_, y_max_, x_min_, x_max_);
  }

 private:
  double x_min_;
  double x_max_;
  double y_min_;
  double y_max_;
};

struct XY {
  double x;
  double y;
};

struct SI {
  double s;
  double i;
};

XY forward(double s, double i, const Theta& theta);

/// Throws std::domain_error unless 0 <= x < 1 and 0 < y <= 1.
SI inverse(double x, double y, const Theta& theta);

TransformedSpace transformed_space(const DesignSpace& space,
                                   const Theta& theta);

Matrix3 a_matrix(const Theta& theta);
Matrix3 b_matrix(const Theta& theta);

Vec3 f_vector(double x, double y);

/// c_j = B(theta) e_j, the transformed-frame vector of an e_j criterion.
Vec3 c_vector(int j, const Theta& theta);

/// Maps support points through forward(); weights are copied unchanged.
/// Throws std::domain_error for points outside `space`.
Design pushforward_design(const Design& design, const Theta& theta,
                          const DesignSpace& space);
Design pushforward_design(const Design& design, const Theta& theta);

Design pullback_design(const Design& design, const Theta& theta,
                       const TransformedSpace& space);
Design pullback_design(const Design& design, const Theta& theta);

/// Sum_i w_i f(x_i, y_i) f(x_i, y_i)^T.
Matrix3 transformed_info(const Design& design);

/// Exchanges the two coordinates of every support point.
Design swap_axes(const Design& design);

}  // namespace inhibdesign
