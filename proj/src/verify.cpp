#include "inhibdesign/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "inhibdesign/closed_form.hpp"
#include "inhibdesign/equiosc.hpp"

namespace inhibdesign {

std::string_view route_name(GInverseRoute route) {
  switch (route) {
    case GInverseRoute::inverse: return "inverse";
    case GInverseRoute::v_candidate: return "v-candidate";
    case GInverseRoute::kernel_search: return "kernel-search";
    case GInverseRoute::none: break;
  }
  return "none";
}

namespace {

// Rescaling x -> x / x_max, y -> y / y_max maps f to C^{-1} f with
// C = x_max y_max diag(1, x_max, y_max); all checks below are invariant
// under it and better conditioned in the unit frame.
struct Normalizer {
  double sx;
  double sy;

  explicit Normalizer(const TransformedSpace& xs) : sx(xs.x_max()), sy(xs.y_max()) {}

  Vec3 c_scale() const { return Vec3(sx * sy, sx * sx * sy, sx * sy * sy); }
  TransformedSpace space(const TransformedSpace& xs) const {
    return TransformedSpace(xs.x_min() / sx, 1.0, xs.y_min() / sy, 1.0);
  }
  Design design(const Design& d) const {
    std::vector<SupportPoint> pts;
    for (const auto& p : d.points()) pts.push_back({p.first / sx, p.second / sy, p.weight});
    return Design(Frame::transformed, std::move(pts));
  }
};

template <typename Fn>
void for_each_lattice_point(const TransformedSpace& xs, int grid_n, Fn&& fn) {
  const double hx = (xs.x_max() - xs.x_min()) / (grid_n - 1);
  const double hy = (xs.y_max() - xs.y_min()) / (grid_n - 1);
  for (int i = 0; i < grid_n; ++i) {
    const double x = i + 1 == grid_n ? xs.x_max() : xs.x_min() + i * hx;
    for (int j = 0; j < grid_n; ++j) {
      const double y = j + 1 == grid_n ? xs.y_max() : xs.y_min() + j * hy;
      fn(x, y);
    }
  }
}

void require_grid(int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("verification grid needs at least 2 points per axis");
}

// Max of value(x, y) over the lattice and the support, first index wins ties.
struct MaxSearch {
  double best = -std::numeric_limits<double>::infinity();
  XY at{0.0, 0.0};
  void offer(double v, double x, double y) {
    if (v > best) {
      best = v;
      at = {x, y};
    }
  }
};

constexpr double kSqrt2 = std::numbers::sqrt2;

}  // namespace

double kappa(const Design& design, double x, double y) {
  const Matrix3 m = transformed_info(design);
  const Vec3 f = f_vector(x, y);
  return f.dot(m.ldlt().solve(f)) - 3.0;
}

CertificateReport d_equivalence_check(const Design& design,
                                      const TransformedSpace& xs, int grid_n,
                                      double tol) {
  require_grid(grid_n);
  const Normalizer norm(xs);
  const Design unit = norm.design(design);
  const Matrix3 m = transformed_info(unit);
  if (numerical_rank(m) < 3) {
    throw std::domain_error("d_equivalence_check: singular information matrix");
  }
  const Matrix3 minv = m.inverse();
  const auto kap = [&](double x, double y) {
    const Vec3 f = f_vector(x, y);
    return f.dot(minv * f) - 3.0;
  };

  CertificateReport report;
  report.check = "d-equivalence";
  MaxSearch search;
  for_each_lattice_point(norm.space(xs), grid_n, [&](double x, double y) {
    search.offer(kap(x, y), x * norm.sx, y * norm.sy);
  });
  bool support_ok = true;
  for (const auto& p : unit.points()) {
    const double k = kap(p.first, p.second);
    report.support_slacks.push_back(k);
    support_ok = support_ok && std::abs(k) <= tol;
    search.offer(k, p.first * norm.sx, p.second * norm.sy);
  }
  report.max_slack = search.best;
  report.argmax = search.at;
  report.pass = search.best <= tol && support_ok;
  return report;
}

double kappa_normalized(double x, double y) {
  const double p = 20 * x * x - 44 * x + 8 * x * y + 20 * y * y - 44 * y + 41;
  return 3 * x * x * y * y * p - 3;
}

Eigen::Vector2d kappa_normalized_gradient(double x, double y) {
  const double p = 20 * x * x - 44 * x + 8 * x * y + 20 * y * y - 44 * y + 41;
  const double px = 40 * x - 44 + 8 * y;
  const double py = 8 * x + 40 * y - 44;
  return {3 * (2 * x * y * y * p + x * x * y * y * px),
          3 * (2 * x * x * y * p + x * x * y * y * py)};
}

Eigen::Matrix2d kappa_normalized_hessian(double x, double y) {
  const double p = 20 * x * x - 44 * x + 8 * x * y + 20 * y * y - 44 * y + 41;
  const double px = 40 * x - 44 + 8 * y;
  const double py = 8 * x + 40 * y - 44;
  const double xx = 3 * (2 * y * y * p + 4 * x * y * y * px + 40 * x * x * y * y);
  const double yy = 3 * (2 * x * x * p + 4 * x * x * y * py + 40 * x * x * y * y);
  const double xy = 3 * (4 * x * y * p + 2 * x * y * y * py + 2 * x * x * y * px +
                         8 * x * x * y * y);
  Eigen::Matrix2d h;
  h << xx, xy, xy, yy;
  return h;
}

std::array<XY, 2> kappa_stationary_points() {
  const double r = std::sqrt(73.0);
  const double a = (55.0 - r) / 72.0;
  const double b = (55.0 + r) / 72.0;
  return {XY{a, a}, XY{b, b}};
}

namespace {

Matrix3 swap_23() {
  Matrix3 p;
  p << 1, 0, 0, 0, 0, 1, 0, 1, 0;
  return p;
}

Matrix3 v_candidate_ginverse_lower(const Design& design,
                                   const TransformedSpace& xs) {
  if (design.frame() != Frame::transformed || design.size() != 2) {
    throw std::domain_error("not a two-point transformed design");
  }
  const double q = q_star(xs);
  const auto is_corner = [&](const SupportPoint& p) {
    return std::abs(p.first - xs.x_max()) <= 1e-12 &&
           std::abs(p.second - xs.y_max()) <= 1e-12;
  };
  const SupportPoint* top = nullptr;
  const SupportPoint* inner = nullptr;
  if (is_corner(design[0])) {
    top = &design[0];
    inner = &design[1];
  } else if (is_corner(design[1])) {
    top = &design[1];
    inner = &design[0];
  } else {
    throw std::domain_error("no support point at (x_max, y_max)");
  }
  const double xbar = inner->first;
  if (std::abs(inner->second - g_fun(xbar, q)) > 1e-10) {
    throw std::domain_error("support point off the line y = g(x, q*)");
  }

  Eigen::Matrix2d mhat = Eigen::Matrix2d::Zero();
  for (const SupportPoint* p : {top, inner}) {
    const double s = p->first * g_fun(p->first, q);
    const Eigen::Vector2d f(s, s * p->first);
    mhat.noalias() += p->weight * f * f.transpose();
  }
  const Eigen::Matrix2d mhat_inv = mhat.inverse();
  const double kap = Eigen::Vector2d(1, 1).dot(mhat_inv * Eigen::Vector2d(1, 1));
  const double gb = g_fun(xbar, q);

  Matrix3 h = Matrix3::Zero();
  h.topLeftCorner<2, 2>() = mhat_inv;
  h(0, 2) = std::sqrt(kap) / (xbar * gb * gb);
  Matrix3 p_inv;
  p_inv << 1, 0, 0, 0, 1, 0, -(1.0 - q), -q, 1;
  return p_inv.transpose() * h * p_inv;
}

// Minimises a convex function of one variable by golden-section search
// after expanding a symmetric bracket around zero.
double golden_minimize(const std::function<double(double)>& fn, double scale) {
  const double f0 = fn(0.0);
  double t = std::max(scale, 1e-300);
  for (int k = 0; k < 200 && (fn(t) <= f0 || fn(-t) <= f0); ++k) t *= 2.0;
  double a = -t;
  double b = t;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int k = 0; k < 300 && b - a > 1e-16 * t; ++k) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = fn(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace

Matrix3 v_candidate_ginverse(const Design& design, const TransformedSpace& xs) {
  if (xs.x_max() <= xs.y_max()) return v_candidate_ginverse_lower(design, xs);
  const Matrix3 p = swap_23();
  return p * v_candidate_ginverse_lower(swap_axes(design), xs.swapped()) * p;
}

CertificateReport c_equivalence_check(const Design& design, const Vec3& c,
                                      const TransformedSpace& xs, int grid_n,
                                      double tol) {
  require_grid(grid_n);
  if (!(c.norm() > 0.0)) throw std::invalid_argument("c_equivalence_check: c = 0");
  const Normalizer norm(xs);
  const Design unit = norm.design(design);
  const TransformedSpace unit_space = norm.space(xs);
  const Matrix3 m = transformed_info(unit);
  const Vec3 cu = c.cwiseQuotient(norm.c_scale());
  if (!range_inclusion(m, cu)) {
    throw NotEstimable("c_equivalence_check: c is not in the range of M~");
  }

  CertificateReport report;
  report.check = "c-equivalence";
  const Matrix3 mp = pseudo_inverse(m);
  const Vec3 u0 = mp * cu;
  const double kap = cu.dot(u0);
  report.variance = kap;

  std::vector<Vec3> fs;
  fs.reserve(static_cast<std::size_t>(grid_n) * grid_n + design.size());
  std::vector<XY> at;
  at.reserve(fs.capacity());
  for_each_lattice_point(unit_space, grid_n, [&](double x, double y) {
    fs.push_back(f_vector(x, y));
    at.push_back({x, y});
  });
  for (const auto& p : unit.points()) {
    fs.push_back(f_vector(p.first, p.second));
    at.push_back({p.first, p.second});
  }

  // u = G^T c for the chosen generalised inverse.
  Vec3 u = u0;
  const int rank = numerical_rank(m);
  const bool along_c1 = c.normalized().isApprox(Vec3::Ones().normalized(), 1e-12);
  if (rank == 3) {
    u = m.ldlt().solve(cu);
    report.route = GInverseRoute::inverse;
  } else {
    std::optional<Matrix3> g;
    if (along_c1) {
      try {
        g = v_candidate_ginverse(design, xs);
      } catch (const std::domain_error&) {
      } catch (const std::invalid_argument&) {
      }
    }
    const bool have_g = g.has_value();
    if (have_g) {
      const Matrix3 mo = transformed_info(design);
      const double err = (mo * *g * mo - mo).norm();
      if (err > 1e-10 * mo.norm()) {
        throw std::domain_error("c_equivalence_check: M G M != M (relative residual " +
                                std::to_string(err / mo.norm()) + ")");
      }
      // Back to unit coordinates: G_unit = C G C.
      const Vec3 s = norm.c_scale();
      const Matrix3 gu = s.asDiagonal() * *g * s.asDiagonal();
      u = gu.transpose() * cu;
      report.route = GInverseRoute::v_candidate;
    }
    if (!have_g) {
      // Any solution of M u = c: u0 plus a kernel component. Optimise the
      // kernel component to minimise the certificate's maximum.
      Eigen::SelfAdjointEigenSolver<Matrix3> eig(0.5 * (m + m.transpose()));
      std::vector<Vec3> kernel;
      const double cutoff = kRankTol * eig.eigenvalues().cwiseAbs().maxCoeff();
      for (int k = 0; k < 3; ++k) {
        if (std::abs(eig.eigenvalues()(k)) <= cutoff) kernel.push_back(eig.eigenvectors().col(k));
      }
      const auto worst = [&](const Vec3& cand) {
        double w = 0.0;
        for (const auto& f : fs) w = std::max(w, std::abs(cand.dot(f)));
        return w;
      };
      const double scale = u0.norm();
      if (kernel.size() == 1) {
        const double t = golden_minimize(
            [&](double s) { return worst(u0 + s * kernel[0]); }, scale);
        u = u0 + t * kernel[0];
      } else if (kernel.size() == 2) {
        const auto inner = [&](double s1) {
          return golden_minimize(
              [&](double s2) { return worst(u0 + s1 * kernel[0] + s2 * kernel[1]); },
              scale);
        };
        const double s1 = golden_minimize(
            [&](double s) { return worst(u0 + s * kernel[0] + inner(s) * kernel[1]); },
            scale);
        u = u0 + s1 * kernel[0] + inner(s1) * kernel[1];
      }
      report.route = GInverseRoute::kernel_search;
    }
  }

  MaxSearch search;
  const std::size_t lattice_size = fs.size() - design.size();
  bool support_ok = true;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const double v = u.dot(fs[k]);
    const double slack = v * v / kap - 1.0;
    search.offer(slack, at[k].x * norm.sx, at[k].y * norm.sy);
    if (k >= lattice_size) {
      report.support_slacks.push_back(slack);
      support_ok = support_ok && std::abs(slack) <= tol;
    }
  }
  report.max_slack = search.best;
  report.argmax = search.at;
  report.pass = search.best <= tol && support_ok;
  return report;
}

double tau_special(double x, double y, double xbar) {
  const double r = x / xbar;
  return y * r * (y + r - 3.0);
}

double tau_general(double x, double y, double q, double xbar, double psi) {
  const double g = g_fun(x, q);
  const double gb = g_fun(xbar, q);
  const double ratio = y / g;
  return psi * ratio + (g * g) / (gb * gb) * (ratio - 1.0) * (x / xbar) * ratio;
}

double elfving_h(double x, double xbar) {
  return x * x * (1.0 + xbar) - x * (xbar * xbar + 1.0) + xbar * (1.0 - xbar);
}

ElfvingReport elfving_certificate_e2(const Design& design,
                                     const TransformedSpace& xs, int grid_n) {
  require_grid(grid_n);
  ElfvingReport report;
  const Normalizer norm(xs);
  const Design unit = norm.design(design);
  if (unit.size() != 2) {
    report.note = "not a two-point design";
    return report;
  }
  const auto on_top = [](const SupportPoint& p) { return std::abs(p.second - 1.0) <= 1e-12; };
  const auto at_corner = [&](const SupportPoint& p) {
    return on_top(p) && std::abs(p.first - 1.0) <= 1e-12;
  };
  if (!on_top(unit[0]) || !on_top(unit[1]) || !(at_corner(unit[0]) || at_corner(unit[1]))) {
    report.note = "support is not {(x_bar, y_max), (x_max, y_max)}";
    return report;
  }
  const SupportPoint& corner = at_corner(unit[0]) ? unit[0] : unit[1];
  const SupportPoint& inner = at_corner(unit[0]) ? unit[1] : unit[0];
  const double xb = inner.first;
  if (!(xb > 0.0 && xb < 1.0)) {
    report.note = "inner support point must satisfy 0 < x_bar < x_max";
    return report;
  }
  report.xbar = xb;
  report.gamma = xb * (1.0 - xb) / (1.0 + xb);
  const Vec3 representation = corner.weight * f_vector(1.0, 1.0) -
                              inner.weight * f_vector(xb, 1.0);
  report.representation_residual =
      (representation - report.gamma * Vec3::UnitY()).norm();
  const double k = (1.0 + xb) / (xb * (1.0 - xb));
  report.hyperplane = Vec3(1.0 - k, k, 0.0);
  report.normalization = report.gamma * report.hyperplane(1);

  MaxSearch search;
  for_each_lattice_point(norm.space(xs), grid_n, [&](double x, double y) {
    search.offer(std::abs(f_vector(x, y).dot(report.hyperplane)), x * norm.sx,
                 y * norm.sy);
  });
  for (const auto& p : unit.points()) {
    search.offer(std::abs(f_vector(p.first, p.second).dot(report.hyperplane)),
                 p.first * norm.sx, p.second * norm.sy);
  }
  report.max_abs = search.best;
  report.argmax = search.at;
  report.pass = report.representation_residual <= 1e-10 &&
                std::abs(report.normalization - 1.0) <= 1e-12 &&
                report.max_abs <= 1.0 + 1e-9;
  if (!report.pass) report.note = "Elfving representation or hyperplane bound fails";
  return report;
}

ElfvingReport elfving_certificate_e3(const Design& design,
                                     const TransformedSpace& xs, int grid_n) {
  ElfvingReport r = elfving_certificate_e2(swap_axes(design), xs.swapped(), grid_n);
  std::swap(r.argmax.x, r.argmax.y);
  std::swap(r.hyperplane(1), r.hyperplane(2));
  return r;
}

namespace {

CertificateReport failed(std::string check, std::string note) {
  CertificateReport r;
  r.check = std::move(check);
  r.max_slack = std::numeric_limits<double>::infinity();
  r.pass = false;
  r.note = std::move(note);
  return r;
}

}  // namespace

CertificateReport certify_transformed(const Design& design,
                                      Criterion criterion,
                                      const TransformedSpace& xs, int grid_n,
                                      double tol) {
  if (design.frame() != Frame::transformed) {
    throw std::invalid_argument("certify_transformed: design must be in the transformed frame");
  }
  for (const auto& p : design.points()) {
    if (!xs.contains(p.first, p.second)) {
      return failed("support", "support point outside the design space");
    }
  }
  if (criterion == Criterion::D) {
    try {
      return d_equivalence_check(design, xs, grid_n, tol);
    } catch (const std::domain_error& e) {
      return failed("d-equivalence", e.what());
    }
  }
  Vec3 c = Vec3::Ones();
  if (criterion == Criterion::Km) c = Vec3::UnitY();
  if (criterion == Criterion::Kic) c = Vec3::UnitZ();
  CertificateReport report;
  try {
    report = c_equivalence_check(design, c, xs, grid_n, tol);
  } catch (const std::domain_error& e) {
    return failed("c-equivalence", e.what());
  }
  if (criterion == Criterion::Km || criterion == Criterion::Kic) {
    const ElfvingReport elf = criterion == Criterion::Km
                                  ? elfving_certificate_e2(design, xs, grid_n)
                                  : elfving_certificate_e3(design, xs, grid_n);
    // Only two-point candidates on the top edge carry an Elfving certificate.
    if (elf.xbar > 0.0) {
      report.note = "elfving: " + (elf.pass ? std::string("pass") : elf.note);
      report.pass = report.pass && elf.pass;
    }
  }
  return report;
}

CertificateReport certify(const Design& design, Criterion criterion,
                          const DesignSpace& space, const Theta& theta,
                          int grid_n, double tol) {
  const TransformedSpace xs = transformed_space(space, theta);
  if (design.frame() == Frame::transformed) {
    return certify_transformed(design, criterion, xs, grid_n, tol);
  }
  for (const auto& p : design.points()) {
    if (!space.contains(p.first, p.second)) {
      return failed("support", "support point outside the design space");
    }
  }
  return certify_transformed(pushforward_design(design, theta), criterion, xs,
                             grid_n, tol);
}

}  // namespace inhibdesign
