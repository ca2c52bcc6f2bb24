#include "inhibdesign/equiosc.hpp"

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace inhibdesign {

double EquiOscPoly::operator()(double x) const {
  return x * g_fun(x, q) * (psi1 + psi2 * x);
}

double EquiOscPoly::derivative(double x) const {
  const double g = g_fun(x, q);
  return psi1 * (g + x * q) + psi2 * (2.0 * x * g + x * x * q);
}

namespace {

// Coefficients with Psi(x_max) = 1 and Psi(xbar) = -1.
EquiOscPoly interpolate(double x_min, double x_max, double q, double xbar) {
  const double a = 1.0 / (x_max * g_fun(x_max, q));
  const double b = -1.0 / (xbar * g_fun(xbar, q));
  EquiOscPoly p;
  p.q = q;
  p.x_min = x_min;
  p.x_max = x_max;
  p.xbar = xbar;
  p.psi2 = (a - b) / (x_max - xbar);
  p.psi1 = a - p.psi2 * x_max;
  return p;
}

double residual(double x_min, double x_max, double q, double xbar) {
  return interpolate(x_min, x_max, q, xbar).derivative(xbar);
}

constexpr int kSubdivisions = 64;
constexpr double kRootTol = 1e-13;

std::optional<double> interior_root(double x_min, double x_max, double q) {
  const double h = (x_max - x_min) / kSubdivisions;
  // x = 0 cannot carry the value -1, so the scan starts one step in.
  const int first = x_min > 0.0 ? 0 : 1;
  double lo = x_min + first * h;
  double r_lo = residual(x_min, x_max, q, lo);
  if (r_lo == 0.0) return lo;
  for (int k = first + 1; k < kSubdivisions; ++k) {
    const double hi = x_min + k * h;
    const double r_hi = residual(x_min, x_max, q, hi);
    if (r_hi == 0.0) return hi;
    if (r_lo < 0.0 && r_hi > 0.0) {
      double a = lo;
      double b = hi;
      while (b - a > kRootTol) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        (residual(x_min, x_max, q, mid) < 0.0 ? a : b) = mid;
      }
      // Newton polish with a central-difference slope, kept inside [a, b].
      double x = 0.5 * (a + b);
      const double r = residual(x_min, x_max, q, x);
      const double d = 1e-7 * std::max(1.0, x);
      const double slope = (residual(x_min, x_max, q, x + d) -
                            residual(x_min, x_max, q, x - d)) / (2.0 * d);
      if (slope > 0.0) {
        const double polished = x - r / slope;
        if (polished >= a && polished <= b &&
            std::abs(residual(x_min, x_max, q, polished)) <= std::abs(r)) {
          x = polished;
        }
      }
      return x;
    }
    lo = hi;
    r_lo = r_hi;
  }
  return std::nullopt;
}

}  // namespace

EquiOscPoly solve_equioscillation(double x_min, double x_max, double q) {
  if (!(0.0 <= x_min && x_min < x_max && x_max < 1.0)) {
    throw std::invalid_argument("equioscillation: need 0 <= x_min < x_max < 1");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("equioscillation: q must lie in [0, 1]");
  }
  EquiOscPoly poly;
  if (const auto root = interior_root(x_min, x_max, q)) {
    poly = interpolate(x_min, x_max, q, *root);
  } else {
    if (x_min <= 0.0) {
      throw EquiOscError("equioscillation: no extremal point on (0, x_max)");
    }
    poly = interpolate(x_min, x_max, q, x_min);
    poly.boundary = true;
  }
  if (!satisfies_invariants(poly)) {
    throw EquiOscError("equioscillation: solution violates |Psi| <= 1 or the "
                       "extremal-point conditions (q = " + std::to_string(q) + ")");
  }
  return poly;
}

bool satisfies_invariants(const EquiOscPoly& poly, int grid) {
  if (std::abs(poly(poly.x_max) - 1.0) > 1e-10) return false;
  if (std::abs(poly(poly.xbar) + 1.0) > 1e-10) return false;
  if (poly.xbar < poly.x_min || poly.xbar >= poly.x_max) return false;
  const double h = (poly.x_max - poly.x_min) / (grid - 1);
  int run_begin = -1;
  int run_end = -1;
  for (int k = 0; k < grid; ++k) {
    const double x = poly.x_min + k * h;
    const double v = poly(x);
    if (std::abs(v) > 1.0 + 1e-9) return false;
    if (v <= -1.0 + 1e-6) {
      if (run_begin < 0) {
        run_begin = k;
      } else if (run_end != k - 1) {
        return false;  // a second, separate -1 region
      }
      run_end = k;
    }
  }
  if (run_begin < 0) {
    // x_bar between grid nodes with a sharp minimum; the node check above
    // still bounds |Psi|.
    return true;
  }
  const double lo = poly.x_min + (run_begin - 1) * h;
  const double hi = poly.x_min + (run_end + 1) * h;
  return poly.xbar >= lo && poly.xbar <= hi;
}

double omega_weight(double q, double xbar, double x_max) {
  const double top = x_max * g_fun(x_max, q) * (1.0 - x_max);
  const double other = xbar * g_fun(xbar, q) * (1.0 - xbar);
  return top / (top + other);
}

double psi_from_design(double x, double q, const TwoPointDesign& design) {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  const auto add = [&](double t, double w) {
    const double s = t * g_fun(t, q);
    const Eigen::Vector2d f(s, s * t);
    m.noalias() += w * f * f.transpose();
  };
  add(design.xbar, design.omega);
  add(design.x_max, 1.0 - design.omega);
  Eigen::FullPivLU<Eigen::Matrix2d> lu(m);
  if (!lu.isInvertible()) {
    throw std::domain_error("psi_from_design: singular information matrix");
  }
  const Eigen::Matrix2d inv = lu.inverse();
  const Eigen::Vector2d ones(1.0, 1.0);
  const Eigen::Vector2d ux(1.0, x);
  return ones.dot(inv * ux) * x * g_fun(x, q) / std::sqrt(ones.dot(inv * ones));
}

}  // namespace inhibdesign
