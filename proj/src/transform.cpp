#include "inhibdesign/transform.hpp"

#include <cmath>
#include <stdexcept>

namespace inhibdesign {

TransformedSpace::TransformedSpace(double x_min, double x_max, double y_min,
                                   double y_max)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
  const bool ok = std::isfinite(x_min) && std::isfinite(x_max) &&
                  std::isfinite(y_min) && std::isfinite(y_max) &&
                  0.0 <= x_min && x_min < x_max && x_max <= 1.0 &&
                  0.0 <= y_min && y_min < y_max && y_max <= 1.0;
  if (!ok) {
    throw std::invalid_argument(
        "transformed space: need 0 <= x_min < x_max <= 1 and 0 <= y_min < y_max <= 1");
  }
}

bool TransformedSpace::contains(double x, double y, double rel_tol) const {
  return x >= x_min_ - rel_tol && x <= x_max_ + rel_tol &&
         y >= y_min_ - rel_tol && y <= y_max_ + rel_tol;
}

XY forward(double s, double i, const Theta& theta) {
  if (!(s >= 0.0) || !(i >= 0.0)) {
    throw std::domain_error("forward: concentrations must be non-negative");
  }
  return {s / (theta.km() + s), 1.0 / (1.0 + i / theta.kic())};
}

SI inverse(double x, double y, const Theta& theta) {
  if (!(x >= 0.0 && x < 1.0) || !(y > 0.0 && y <= 1.0)) {
    throw std::domain_error("inverse: need 0 <= x < 1 and 0 < y <= 1");
  }
  return {x * theta.km() / (1.0 - x), theta.kic() * (1.0 - y) / y};
}

TransformedSpace transformed_space(const DesignSpace& space,
                                   const Theta& theta) {
  const XY lo = forward(space.s_min(), space.i_max(), theta);
  const XY hi = forward(space.s_max(), space.i_min(), theta);
  return TransformedSpace(lo.x, hi.x, lo.y, hi.y);
}

Matrix3 a_matrix(const Theta& theta) {
  const double v = theta.v();
  Matrix3 a;
  a << 1.0, 0.0, 0.0,
       -v / theta.km(), v / theta.km(), 0.0,
       v / theta.kic(), 0.0, -v / theta.kic();
  return a;
}

Matrix3 b_matrix(const Theta& theta) {
  const double v = theta.v();
  Matrix3 b;
  b << 1.0, 0.0, 0.0,
       1.0, theta.km() / v, 0.0,
       1.0, 0.0, -theta.kic() / v;
  return b;
}

Vec3 f_vector(double x, double y) {
  const double xy = x * y;
  return Vec3(xy, xy * x, xy * y);
}

Vec3 c_vector(int j, const Theta& theta) {
  if (j < 1 || j > 3) throw std::invalid_argument("c_vector: j must be 1, 2 or 3");
  return b_matrix(theta).col(j - 1);
}

Design pushforward_design(const Design& design, const Theta& theta) {
  if (design.frame() != Frame::original) {
    throw std::invalid_argument("pushforward: design must be in the original frame");
  }
  std::vector<SupportPoint> out;
  out.reserve(design.size());
  for (const auto& p : design.points()) {
    const XY t = forward(p.first, p.second, theta);
    out.push_back({t.x, t.y, p.weight});
  }
  return Design(Frame::transformed, std::move(out));
}

Design pushforward_design(const Design& design, const Theta& theta,
                          const DesignSpace& space) {
  for (const auto& p : design.points()) {
    if (!space.contains(p.first, p.second)) {
      throw std::domain_error("pushforward: support point outside the design space");
    }
  }
  return pushforward_design(design, theta);
}

Design pullback_design(const Design& design, const Theta& theta) {
  if (design.frame() != Frame::transformed) {
    throw std::invalid_argument("pullback: design must be in the transformed frame");
  }
  std::vector<SupportPoint> out;
  out.reserve(design.size());
  for (const auto& p : design.points()) {
    const SI o = inverse(p.first, p.second, theta);
    out.push_back({o.s, o.i, p.weight});
  }
  return Design(Frame::original, std::move(out));
}

Design pullback_design(const Design& design, const Theta& theta,
                       const TransformedSpace& space) {
  for (const auto& p : design.points()) {
    if (!space.contains(p.first, p.second)) {
      throw std::domain_error("pullback: support point outside the transformed space");
    }
  }
  return pullback_design(design, theta);
}

Matrix3 transformed_info(const Design& design) {
  if (design.frame() != Frame::transformed) {
    throw std::invalid_argument("transformed_info: design must be in the transformed frame");
  }
  Matrix3 m = Matrix3::Zero();
  for (const auto& p : design.points()) {
    const Vec3 f = f_vector(p.first, p.second);
    m.noalias() += p.weight * f * f.transpose();
  }
  return m;
}

Design swap_axes(const Design& design) {
  std::vector<SupportPoint> out;
  out.reserve(design.size());
  for (const auto& p : design.points()) out.push_back({p.second, p.first, p.weight});
  return Design(design.frame(), std::move(out));
}

}  // namespace inhibdesign
