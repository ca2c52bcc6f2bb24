#pragma once

// Equi-oscillating element Psi(x, q) = x g(x, q) (psi1 + psi2 x) of the
// Chebyshev system {x g, x^2 g} on [x_min, x_max], g(x, q) = q x + 1 - q.
// Its extremal points x_bar(q) and x_max carry the c = (1, 1) optimal
// extrapolation design of the weighted model x g(x, q) (theta1 + theta2 x).

#include <array>
#include <stdexcept>

namespace inhibdesign {

inline double g_fun(double x, double q) { return q * x + (1.0 - q); }

struct EquiOscPoly {
  double q = 0.0;
  double psi1 = 0.0;
  double psi2 = 0.0;
  double xbar = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  /// True when x_bar sits on x_min (no interior stationary point).
  bool boundary = false;

  double operator()(double x) const;
  double derivative(double x) const;
};

class EquiOscError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requires 0 <= x_min < x_max < 1 and q in [0, 1]. The result is checked
/// against the invariants below; a violation throws EquiOscError.
EquiOscPoly solve_equioscillation(double x_min, double x_max, double q);

/// Grid checks: |Psi| <= 1 + 1e-9 on `grid` points, Psi(x_max) = 1 and
/// Psi(x_bar) = -1 to 1e-10, and x_bar the only point where -1 is reached.
bool satisfies_invariants(const EquiOscPoly& poly, int grid = 10001);

/// Weight of x_bar in the c-optimal two-point design.
double omega_weight(double q, double xbar, double x_max);

/// Two-point design {x_bar: omega, x_max: 1 - omega} of the weighted model.
struct TwoPointDesign {
  double xbar;
  double x_max;
  double omega;
};

/// Psi evaluated through the information matrix of the c-optimal design:
/// (1,1) M^-1 (1,x)^T x g / sqrt((1,1) M^-1 (1,1)^T). Throws
/// std::domain_error when M is singular.
double psi_from_design(double x, double q, const TwoPointDesign& design);

}  // namespace inhibdesign
