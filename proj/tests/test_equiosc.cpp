#include <doctest.h>

#include <Eigen/Dense>
#include <numbers>
#include <vector>

#include "inhibdesign/equiosc.hpp"

using namespace inhibdesign;

namespace {

constexpr double kS2 = std::numbers::sqrt2;

double max_abs_psi(const EquiOscPoly& p, double psi1, double psi2, int grid = 20001) {
  double m = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double x = p.x_min + (p.x_max - p.x_min) * k / (grid - 1);
    m = std::max(m, std::abs(x * g_fun(x, p.q) * (psi1 + psi2 * x)));
  }
  return m;
}

// Weight at x_bar from Lagrange interpolation on the two support points:
// l_i(x) = a_i + b_i x with x_j g(x_j) l_i(x_j) = delta_ij, weight
// |l_1(1)| / (|l_1(1)| + |l_2(1)|).
double lagrange_weight(double q, double xbar, double x_max) {
  Eigen::Matrix2d h;
  h << xbar * g_fun(xbar, q), xbar * xbar * g_fun(xbar, q),
      x_max * g_fun(x_max, q), x_max * x_max * g_fun(x_max, q);
  const Eigen::Matrix2d coeffs = h.inverse();  // column i: (a_i, b_i)
  const double l1 = coeffs(0, 0) + coeffs(1, 0);
  const double l2 = coeffs(0, 1) + coeffs(1, 1);
  return std::abs(l1) / (std::abs(l1) + std::abs(l2));
}

std::vector<double> q_grid() {
  std::vector<double> qs;
  for (int k = 0; k <= 20; ++k) qs.push_back(k / 20.0);
  return qs;
}

}  // namespace

TEST_SUITE("equioscillation") {

TEST_CASE("g function") {
  CHECK(g_fun(0.3, 0.0) == 1.0);
  CHECK(g_fun(0.3, 1.0) == 0.3);
  CHECK(g_fun(0.5, 0.5) == 0.75);
}

TEST_CASE("q = 0, interior branch") {
  for (double x_max : {0.5, 0.9, 10.0 / 11}) {
    const EquiOscPoly p = solve_equioscillation(0.0, x_max, 0.0);
    const double xb = (kS2 - 1) * x_max;
    CHECK_FALSE(p.boundary);
    CHECK(std::abs(p.xbar - xb) < 1e-12);
    for (int k = 0; k <= 200; ++k) {
      const double x = x_max * k / 200.0;
      // The printed interior-branch polynomial -r^2 + 2r is +1 at x_bar and
      // -1 at x_max, the opposite sign to the boundary branch; compare
      // against its negative.
      const double r = x / xb;
      CHECK(std::abs(p(x) - (r * r - 2 * r)) < 1e-10);
    }
  }
}

TEST_CASE("q = 0, boundary branch") {
  const double lo = 0.5;
  const double hi = 0.9;
  const EquiOscPoly p = solve_equioscillation(lo, hi, 0.0);
  CHECK(p.boundary);
  CHECK(p.xbar == lo);
  for (int k = 0; k <= 200; ++k) {
    const double x = lo + (hi - lo) * k / 200.0;
    const double expect = ((lo + hi) * x * x - (lo * lo + hi * hi) * x) / (lo * hi * (hi - lo));
    CHECK(std::abs(p(x) - expect) < 1e-10);
  }
}

TEST_CASE("q = 1 on [0.1, 0.9] is a minimax solution") {
  const EquiOscPoly p = solve_equioscillation(0.1, 0.9, 1.0);
  CHECK(p.xbar > 0.37);
  CHECK(p.xbar < 0.9);
  CHECK(satisfies_invariants(p));
  // Perturbations that keep psi1 + psi2 fixed cannot lower max |Psi|.
  const double base = max_abs_psi(p, p.psi1, p.psi2);
  for (double eps : {1e-6, -1e-6}) {
    CHECK(max_abs_psi(p, p.psi1 + eps, p.psi2 - eps) >= base);
  }
}

TEST_CASE("invariants, monotonicity and Lagrange weights over q") {
  double prev_x = 0.0;
  double prev_w = 0.0;
  for (double q : q_grid()) {
    const EquiOscPoly p = solve_equioscillation(0.1, 0.9, q);
    INFO("q = ", q);
    CHECK(satisfies_invariants(p));
    CHECK(std::abs(p(0.9) - 1.0) <= 1e-10);
    CHECK(std::abs(p(p.xbar) + 1.0) <= 1e-10);
    CHECK(std::abs(p.derivative(p.xbar)) < 1e-8);
    const double w = omega_weight(q, p.xbar, 0.9);
    CHECK(w > 0.0);
    CHECK(w < 1.0);
    CHECK(std::abs(w - lagrange_weight(q, p.xbar, 0.9)) < 1e-10);
    CHECK(p.xbar >= prev_x);
    CHECK(w >= prev_w);
    prev_x = p.xbar;
    prev_w = w;
  }
}

TEST_CASE("q = 0 weight for x_max = 10/11") {
  const double x_max = 10.0 / 11;
  const EquiOscPoly p = solve_equioscillation(0.0, x_max, 0.0);
  const double xb = p.xbar;
  const double expect = x_max * (1 - x_max) / (x_max * (1 - x_max) + xb * (1 - xb));
  CHECK(std::abs(omega_weight(0.0, xb, x_max) - expect) < 1e-15);
}

TEST_CASE("design route reproduces the direct solution") {
  for (double q : q_grid()) {
    const EquiOscPoly p = solve_equioscillation(0.1, 0.9, q);
    const TwoPointDesign d{p.xbar, 0.9, omega_weight(q, p.xbar, 0.9)};
    INFO("q = ", q);
    CHECK(std::abs(psi_from_design(0.9, q, d) - 1.0) < 1e-9);
    CHECK(std::abs(psi_from_design(p.xbar, q, d) + 1.0) < 1e-9);
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double x = 0.1 + 0.8 * k / 1000.0;
      worst = std::max(worst, std::abs(psi_from_design(x, q, d) - p(x)));
    }
    CHECK(worst < 1e-9);
  }
  CHECK_THROWS_AS(psi_from_design(0.5, 0.0, TwoPointDesign{0.9, 0.9, 0.5}), std::domain_error);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(solve_equioscillation(0.5, 0.4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_equioscillation(0.1, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_equioscillation(0.1, 0.9, 1.5), std::invalid_argument);
}

}  // TEST_SUITE
