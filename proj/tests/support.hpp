#pragma once

// Shared generators for the property tests. All randomness is seeded.

#include <cmath>
#include <random>
#include <vector>

#include "inhibdesign/closed_form.hpp"
#include "inhibdesign/design.hpp"
#include "inhibdesign/kinetics.hpp"
#include "inhibdesign/transform.hpp"

namespace testsupport {

using namespace inhibdesign;

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double mat_rel_err(const Matrix3& a, const Matrix3& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Theta theta() { return Theta(log_uniform(0.2, 5.0), log_uniform(0.2, 5.0), log_uniform(0.2, 5.0)); }

  DesignSpace space(const Theta& t) {
    const double s_max = t.km() * log_uniform(0.5, 20.0);
    const double s_min = uniform(0.0, 1.0) < 0.3 ? 0.0 : s_max * uniform(0.0, 0.6);
    const double i_max = t.kic() * log_uniform(0.5, 20.0);
    const double i_min = uniform(0.0, 1.0) < 0.3 ? 0.0 : i_max * uniform(0.0, 0.6);
    return DesignSpace(s_min, s_max, i_min, i_max);
  }

  /// Random design with k support points inside the space.
  Design design(const DesignSpace& sp, int k) {
    std::vector<SupportPoint> pts;
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      const double w = uniform(0.05, 1.0);
      pts.push_back({uniform(sp.s_min(), sp.s_max()), uniform(sp.i_min(), sp.i_max()), w});
      total += w;
    }
    for (auto& p : pts) p.weight /= total;
    double partial = 0.0;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) partial += pts[j].weight;
    pts.back().weight = 1.0 - partial;
    return Design(Frame::original, pts);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// The closed forms are claimed for (theta, space) pairs where
///  - neither lower bound of the D design binds (x_min <= x_max / 2 and
///    y_min <= y_max / 2); otherwise the equivalence check finds a positive
///    slack and the multiplicative algorithm a fourth support point, and
///  - the e_1 support point (x_bar, g(x_bar, q*)) lies inside the rectangle.
/// Fuzz cases for "closed form is optimal" properties are drawn from this
/// region only.
inline bool in_valid_region(const DesignSpace& sp, const Theta& t) {
  const TransformedSpace xs = transformed_space(sp, t);
  if (xs.x_min() > xs.x_max() / 2.0 || xs.y_min() > xs.y_max() / 2.0) return false;
  try {
    (void)v_optimal_transformed(xs);
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

struct Instance {
  Theta theta;
  DesignSpace space;
};

inline Instance valid_instance(Gen& gen) {
  for (;;) {
    const Theta t = gen.theta();
    const DesignSpace sp = gen.space(t);
    if (in_valid_region(sp, t)) return {t, sp};
  }
}

}  // namespace testsupport
