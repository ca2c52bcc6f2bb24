#pragma once

// Closed-form locally optimal designs, in the transformed frame and pulled
// back to (S, I).

#include <stdexcept>

#include "inhibdesign/design.hpp"
#include "inhibdesign/transform.hpp"

namespace inhibdesign {

/// The requested space lies outside the hypotheses under which a closed
/// form yields a feasible design.
class OutOfTheory : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Equal weights on (max{x_min, x_max/2}, y_max), (x_max, max{y_max/2,
/// y_min}) and (x_max, y_max).
Design d_optimal_transformed(const TransformedSpace& xs);
Design d_optimal(const DesignSpace& space, const Theta& theta);

/// K_m: (x_max, y_max) and (x_bar, y_max), x_bar = max{x_min, (sqrt2-1)
/// x_max}, weights x_bar/(x_max+x_bar) and x_max/(x_max+x_bar).
Design e2_optimal_transformed(const TransformedSpace& xs);

/// K_ic: the e2 design with the roles of x and y exchanged.
Design e3_optimal_transformed(const TransformedSpace& xs);

Design km_optimal(const DesignSpace& space, const Theta& theta);
Design kic_optimal(const DesignSpace& space, const Theta& theta);

/// Mixing parameter q* = (1 - y_max)/(1 - x_max) for x_max <= y_max.
double q_star(const TransformedSpace& xs);

/// V: two points on the line y = g(x, q*) through (x_max, y_max). For
/// x_max > y_max the construction runs on the axis-swapped rectangle.
/// Throws OutOfTheory when x_max = y_max = 1 or the interior support point
/// leaves the rectangle.
Design v_optimal_transformed(const TransformedSpace& xs);
Design v_optimal(const DesignSpace& space, const Theta& theta);

/// Printed closed form for I_min = 0 (points (S_bar, 0), (S_max, 0)).
Design v_optimal_imin0(const DesignSpace& space, const Theta& theta);

Design optimal_design_transformed(Criterion criterion,
                                  const TransformedSpace& xs);
Design optimal_design(Criterion criterion, const DesignSpace& space,
                      const Theta& theta);

}  // namespace inhibdesign
