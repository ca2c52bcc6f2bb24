#include "inhibdesign/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "inhibdesign/equiosc.hpp"

namespace inhibdesign {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

}  // namespace

Design d_optimal_transformed(const TransformedSpace& xs) {
  const double third = 1.0 / 3.0;
  return Design(Frame::transformed,
                {{std::max(xs.x_min(), xs.x_max() / 2.0), xs.y_max(), third},
                 {xs.x_max(), std::max(xs.y_max() / 2.0, xs.y_min()), third},
                 {xs.x_max(), xs.y_max(), third}});
}

Design d_optimal(const DesignSpace& space, const Theta& theta) {
  const double km = theta.km();
  const double third = 1.0 / 3.0;
  const double s_low =
      std::max(space.s_min(), space.s_max() * km / (space.s_max() + 2.0 * km));
  const double i_high = std::min(theta.kic() + 2.0 * space.i_min(), space.i_max());
  return Design(Frame::original, {{s_low, space.i_min(), third},
                                  {space.s_max(), i_high, third},
                                  {space.s_max(), space.i_min(), third}});
}

Design e2_optimal_transformed(const TransformedSpace& xs) {
  const double xbar = std::max(xs.x_min(), (kSqrt2 - 1.0) * xs.x_max());
  const double total = xs.x_max() + xbar;
  return Design(Frame::transformed, {{xs.x_max(), xs.y_max(), xbar / total},
                                     {xbar, xs.y_max(), xs.x_max() / total}});
}

Design e3_optimal_transformed(const TransformedSpace& xs) {
  return swap_axes(e2_optimal_transformed(xs.swapped()));
}

Design km_optimal(const DesignSpace& space, const Theta& theta) {
  const double km = theta.km();
  const double s_max = space.s_max();
  const double s_bar = std::max(
      space.s_min(), km * s_max * (kSqrt2 - 1.0) / (km + (2.0 - kSqrt2) * s_max));
  // x_bar / x_max in transformed coordinates.
  const double ratio = std::max(space.s_min() / (km + space.s_min()),
                                (kSqrt2 - 1.0) * s_max / (km + s_max)) /
                       (s_max / (km + s_max));
  const double omega = 1.0 / (1.0 + ratio);
  return Design(Frame::original, {{s_max, space.i_min(), 1.0 - omega},
                                  {s_bar, space.i_min(), omega}});
}

Design kic_optimal(const DesignSpace& space, const Theta& theta) {
  const double kic = theta.kic();
  const double i_bar = std::min(
      space.i_max(), space.i_min() * (kSqrt2 + 1.0) + kic * kSqrt2);
  // y_bar / y_max in transformed coordinates.
  const double ratio = std::max((kic + space.i_min()) / (kic + space.i_max()),
                                kSqrt2 - 1.0);
  const double omega = 1.0 / (1.0 + ratio);
  return Design(Frame::original, {{space.s_max(), space.i_min(), 1.0 - omega},
                                  {space.s_max(), i_bar, omega}});
}

double q_star(const TransformedSpace& xs) {
  if (xs.x_max() > xs.y_max()) {
    throw std::invalid_argument("q_star: requires x_max <= y_max");
  }
  if (xs.x_max() >= 1.0) {
    throw OutOfTheory("q_star: undefined for x_max = y_max = 1");
  }
  return (1.0 - xs.y_max()) / (1.0 - xs.x_max());
}

namespace {

// Branch x_max <= y_max.
Design v_optimal_lower(const TransformedSpace& xs) {
  const double q = q_star(xs);
  const EquiOscPoly poly = solve_equioscillation(xs.x_min(), xs.x_max(), q);
  const double y_bar = g_fun(poly.xbar, q);
  if (y_bar < xs.y_min() * (1.0 - 1e-12)) {
    throw OutOfTheory(
        "v_optimal: support point (x_bar, g(x_bar, q*)) lies below y_min");
  }
  const double omega = omega_weight(q, poly.xbar, xs.x_max());
  return Design(Frame::transformed, {{poly.xbar, std::max(y_bar, xs.y_min()), omega},
                                     {xs.x_max(), xs.y_max(), 1.0 - omega}});
}

}  // namespace

Design v_optimal_transformed(const TransformedSpace& xs) {
  if (xs.x_max() <= xs.y_max()) return v_optimal_lower(xs);
  return swap_axes(v_optimal_lower(xs.swapped()));
}

Design v_optimal(const DesignSpace& space, const Theta& theta) {
  return pullback_design(v_optimal_transformed(transformed_space(space, theta)),
                         theta);
}

Design v_optimal_imin0(const DesignSpace& space, const Theta& theta) {
  if (space.i_min() != 0.0) {
    throw std::invalid_argument("v_optimal_imin0: requires I_min = 0");
  }
  const double km = theta.km();
  const double s_max = space.s_max();
  const double s_bar = std::max(
      space.s_min(), km * s_max * (kSqrt2 - 1.0) / (km + (2.0 - kSqrt2) * s_max));
  const double a = s_max * (km + s_bar) * (km + s_bar);
  const double b = s_bar * (km + s_max) * (km + s_max);
  const double omega = a / (a + b);
  return Design(Frame::original, {{s_bar, 0.0, omega}, {s_max, 0.0, 1.0 - omega}});
}

Design optimal_design_transformed(Criterion criterion,
                                  const TransformedSpace& xs) {
  switch (criterion) {
    case Criterion::D: return d_optimal_transformed(xs);
    case Criterion::V: return v_optimal_transformed(xs);
    case Criterion::Km: return e2_optimal_transformed(xs);
    case Criterion::Kic: return e3_optimal_transformed(xs);
  }
  throw std::invalid_argument("unknown criterion");
}

Design optimal_design(Criterion criterion, const DesignSpace& space,
                      const Theta& theta) {
  switch (criterion) {
    case Criterion::D: return d_optimal(space, theta);
    case Criterion::V: return v_optimal(space, theta);
    case Criterion::Km: return km_optimal(space, theta);
    case Criterion::Kic: return kic_optimal(space, theta);
  }
  throw std::invalid_argument("unknown criterion");
}

}  // namespace inhibdesign
