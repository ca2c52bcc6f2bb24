#include "inhibdesign/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace inhibdesign {

std::vector<XY> lattice(const TransformedSpace& xs, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("lattice: grid_n must be >= 2");
  std::vector<XY> pts;
  pts.reserve(static_cast<std::size_t>(grid_n) * grid_n);
  const double hx = (xs.x_max() - xs.x_min()) / (grid_n - 1);
  const double hy = (xs.y_max() - xs.y_min()) / (grid_n - 1);
  for (int i = 0; i < grid_n; ++i) {
    const double x = i + 1 == grid_n ? xs.x_max() : xs.x_min() + i * hx;
    for (int j = 0; j < grid_n; ++j) {
      const double y = j + 1 == grid_n ? xs.y_max() : xs.y_min() + j * hy;
      pts.push_back({x, y});
    }
  }
  return pts;
}

namespace {

// Unit frame x / x_max, y / y_max; f scales by C = diag(c_scale).
struct UnitFrame {
  double sx;
  double sy;
  explicit UnitFrame(const TransformedSpace& xs) : sx(xs.x_max()), sy(xs.y_max()) {}
  TransformedSpace space(const TransformedSpace& xs) const {
    return TransformedSpace(xs.x_min() / sx, 1.0, xs.y_min() / sy, 1.0);
  }
  Vec3 c_scale() const { return Vec3(sx * sy, sx * sx * sy, sx * sy * sy); }
};

std::vector<Vec3> regression_vectors(const std::vector<XY>& pts) {
  std::vector<Vec3> fs;
  fs.reserve(pts.size());
  for (const auto& p : pts) fs.push_back(f_vector(p.x, p.y));
  return fs;
}

}  // namespace

Design design_cleanup(const Design& design, double merge_tol,
                      double weight_floor) {
  std::vector<SupportPoint> kept;
  for (const auto& p : design.points()) {
    if (p.weight >= weight_floor) kept.push_back(p);
  }
  if (kept.empty()) throw std::invalid_argument("design_cleanup: every weight is below the floor");
  // Heaviest points seed clusters; ties keep input order.
  std::stable_sort(kept.begin(), kept.end(),
                   [](const SupportPoint& a, const SupportPoint& b) { return a.weight > b.weight; });
  struct Cluster {
    double seed_x, seed_y;
    double wx = 0.0, wy = 0.0, w = 0.0;
  };
  std::vector<Cluster> clusters;
  for (const auto& p : kept) {
    auto it = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
      return std::hypot(p.first - c.seed_x, p.second - c.seed_y) <= merge_tol;
    });
    if (it == clusters.end()) {
      clusters.push_back({p.first, p.second});
      it = std::prev(clusters.end());
    }
    it->wx += p.weight * p.first;
    it->wy += p.weight * p.second;
    it->w += p.weight;
  }
  double total = 0.0;
  for (const auto& c : clusters) total += c.w;
  std::vector<SupportPoint> out;
  for (const auto& c : clusters) out.push_back({c.wx / c.w, c.wy / c.w, c.w / total});
  // Renormalise exactly; the last weight absorbs rounding.
  double partial = 0.0;
  for (std::size_t k = 0; k + 1 < out.size(); ++k) partial += out[k].weight;
  out.back().weight = 1.0 - partial;
  return Design::merged(design.frame(), std::move(out));
}

MultiplicativeResult multiplicative_d(const TransformedSpace& xs,
                                      const MultiplicativeOptions& opt) {
  if (opt.grid_n < 11) throw std::invalid_argument("multiplicative_d: grid_n must be >= 11");
  const UnitFrame unit(xs);
  const auto pts = lattice(unit.space(xs), opt.grid_n);
  const std::size_t n = pts.size();
  // Structure of arrays: f = (f1, f2, f3) and the six products f_a f_b.
  std::vector<double> f1(n), f2(n), f3(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 f = f_vector(pts[k].x, pts[k].y);
    f1[k] = f(0);
    f2[k] = f(1);
    f3[k] = f(2);
  }
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> d(n, 0.0);

  const Design placeholder(Frame::transformed, {{xs.x_max(), xs.y_max(), 1.0}});
  MultiplicativeResult result{placeholder, placeholder, 0, 0.0, false, {}};
  const auto compute_d = [&](const Matrix3& minv) {
    const double q11 = minv(0, 0), q22 = minv(1, 1), q33 = minv(2, 2);
    const double q12 = 2.0 * minv(0, 1), q13 = 2.0 * minv(0, 2), q23 = 2.0 * minv(1, 2);
    for (std::size_t k = 0; k < n; ++k) {
      const double a = f1[k], b = f2[k], c = f3[k];
      d[k] = a * (q11 * a + q12 * b + q13 * c) + b * (q22 * b + q23 * c) + q33 * c * c;
    }
  };
  int iter = 0;
  double max_d = 0.0;
  for (;; ++iter) {
    double m11 = 0, m12 = 0, m13 = 0, m22 = 0, m23 = 0, m33 = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = w[k] * f1[k], b = w[k] * f2[k], c = w[k] * f3[k];
      m11 += a * f1[k];
      m12 += a * f2[k];
      m13 += a * f3[k];
      m22 += b * f2[k];
      m23 += b * f3[k];
      m33 += c * f3[k];
    }
    Matrix3 m;
    m << m11, m12, m13, m12, m22, m23, m13, m23, m33;
    if (opt.record_history) result.log_det_history.push_back(std::log(m.determinant()));
    compute_d(m.inverse());
    max_d = *std::max_element(d.begin(), d.end());
    if (max_d <= 3.0 * (1.0 + opt.tol)) {
      result.converged = true;
      break;
    }
    if (iter >= opt.max_iter) break;

    // Vertex-exchange step: move mass from the support point with the
    // smallest d to the grid point with the largest, with the step that
    // maximises det M (Boehning). Plain multiplicative updates stall when
    // the optimum falls between lattice nodes.
    {
      const Matrix3 minv = m.inverse();
      const std::size_t j = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
      std::size_t k = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i] > 0.0 && (k == n || d[i] < d[k])) k = i;
      }
      if (k != n && k != j) {
        const Vec3 fj(f1[j], f2[j], f3[j]);
        const Vec3 fk(f1[k], f2[k], f3[k]);
        const double djk = fj.dot(minv * fk);
        const double denom = 2.0 * (d[j] * d[k] - djk * djk);
        double step = denom > 0.0 ? (d[j] - d[k]) / denom : w[k];
        step = std::clamp(step, 0.0, w[k]);
        w[j] += step;
        w[k] -= step;
        m += step * (fj * fj.transpose() - fk * fk.transpose());
        if (opt.record_history) result.log_det_history.push_back(std::log(m.determinant()));
        compute_d(m.inverse());
        max_d = *std::max_element(d.begin(), d.end());
      }
    }

    // Harman-Pronzato bound: points with d below h cannot carry mass in a
    // D-optimal design (m = 3). Zeroing them also keeps weights from
    // decaying into subnormal range.
    const double delta = max_d / 3.0 - 1.0;
    const double h = 3.0 * (1.0 + delta / 2.0 - std::sqrt(delta * (4.0 + delta - 4.0 / 3.0)) / 2.0);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      w[k] = d[k] < h ? 0.0 : w[k] * d[k] * (1.0 / 3.0);
      sum += w[k];
    }
    const double inv_sum = 1.0 / sum;
    for (auto& v : w) v *= inv_sum;
  }
  result.iterations = iter;
  result.max_d = max_d;

  std::vector<SupportPoint> raw;
  double kept = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (w[k] >= opt.weight_floor) {
      raw.push_back({pts[k].x * unit.sx, pts[k].y * unit.sy, w[k]});
      kept += w[k];
    }
  }
  for (auto& p : raw) p.weight /= kept;
  double partial = 0.0;
  for (std::size_t k = 0; k + 1 < raw.size(); ++k) partial += raw[k].weight;
  raw.back().weight = 1.0 - partial;
  result.raw = Design(Frame::transformed, raw);

  const double cell = std::max((xs.x_max() - xs.x_min()), (xs.y_max() - xs.y_min())) /
                      (opt.grid_n - 1);
  Design cleaned = design_cleanup(result.raw, opt.merge_cells * cell, opt.weight_floor);
  // Keep the merged design only if it does not lose D-efficiency.
  const double det_raw = transformed_info(result.raw).determinant();
  const double det_clean = transformed_info(cleaned).determinant();
  result.design = det_clean >= det_raw * (1.0 - 1e-6) ? cleaned : result.raw;
  return result;
}

MultiplicativeResult multiplicative_d(const DesignSpace& space,
                                      const Theta& theta,
                                      const MultiplicativeOptions& opt) {
  MultiplicativeResult r = multiplicative_d(transformed_space(space, theta), opt);
  r.design = pullback_design(r.design, theta);
  r.raw = pullback_design(r.raw, theta);
  return r;
}

ElfvingLp elfving_lp(const std::vector<XY>& candidates, const Vec3& c) {
  const auto fs = regression_vectors(candidates);
  const int n_real = 2 * static_cast<int>(fs.size());
  const int n_total = n_real + 3;
  Vec3 b = c;
  Vec3 row_sign = Vec3::Ones();
  for (int i = 0; i < 3; ++i) {
    if (b(i) < 0.0) {
      row_sign(i) = -1.0;
      b(i) = -b(i);
    }
  }
  const auto column = [&](int j) -> Vec3 {
    if (j >= n_real) return Vec3::Unit(j - n_real);
    const Vec3& f = fs[static_cast<std::size_t>(j / 2)];
    return (j % 2 == 0 ? 1.0 : -1.0) * f.cwiseProduct(row_sign);
  };

  std::array<int, 3> basis{n_real, n_real + 1, n_real + 2};
  Matrix3 binv = Matrix3::Identity();
  Vec3 xb = b;
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());

  const auto run_phase = [&](bool phase_one) {
    const auto cost = [&](int j) { return phase_one ? (j >= n_real ? 1.0 : 0.0)
                                                    : (j >= n_real ? 0.0 : 1.0); };
    int degenerate_run = 0;
    for (int iter = 0; iter < 20000; ++iter) {
      Vec3 cb;
      for (int i = 0; i < 3; ++i) cb(i) = cost(basis[static_cast<std::size_t>(i)]);
      const Vec3 y = binv.transpose() * cb;
      const bool bland = degenerate_run > 50;
      int enter = -1;
      double best = -1e-12;
      const int limit = phase_one ? n_total : n_real;
      for (int j = 0; j < limit; ++j) {
        if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
        const double rc = cost(j) - y.dot(column(j));
        if (rc < best) {
          best = rc;
          enter = j;
          if (bland) break;
        }
      }
      if (enter < 0) return;
      const Vec3 dir = binv * column(enter);
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 3; ++i) {
        if (dir(i) > 1e-12) {
          const double r = xb(i) / dir(i);
          if (r < ratio - 1e-15 ||
              (leave >= 0 && std::abs(r - ratio) <= 1e-15 &&
               basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
            ratio = r;
            leave = i;
          }
        }
      }
      if (leave < 0) throw std::runtime_error("elfving_lp: unbounded direction");
      degenerate_run = ratio <= 1e-15 * scale ? degenerate_run + 1 : 0;
      basis[static_cast<std::size_t>(leave)] = enter;
      Matrix3 bmat;
      for (int i = 0; i < 3; ++i) bmat.col(i) = column(basis[static_cast<std::size_t>(i)]);
      binv = bmat.inverse();
      xb = binv * b;
      for (int i = 0; i < 3; ++i) xb(i) = std::max(xb(i), 0.0);
    }
    throw std::runtime_error("elfving_lp: iteration limit");
  };

  run_phase(true);
  double infeasibility = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (basis[static_cast<std::size_t>(i)] >= n_real) infeasibility += xb(i);
  }
  if (infeasibility > 1e-10 * scale) {
    throw std::runtime_error("elfving_lp: c is not reachable from the candidates");
  }
  // Drive zero-level artificials out of the basis.
  for (int i = 0; i < 3; ++i) {
    if (basis[static_cast<std::size_t>(i)] < n_real) continue;
    for (int j = 0; j < n_real; ++j) {
      if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
      if (std::abs((binv * column(j))(i)) > 1e-9) {
        basis[static_cast<std::size_t>(i)] = j;
        Matrix3 bmat;
        for (int k = 0; k < 3; ++k) bmat.col(k) = column(basis[static_cast<std::size_t>(k)]);
        binv = bmat.inverse();
        xb = binv * b;
        break;
      }
    }
  }
  run_phase(false);

  ElfvingLp out;
  for (int i = 0; i < 3; ++i) {
    const int j = basis[static_cast<std::size_t>(i)];
    if (j >= n_real || xb(i) <= 0.0) continue;
    out.points.push_back(candidates[static_cast<std::size_t>(j / 2)]);
    out.coefficients.push_back(j % 2 == 0 ? xb(i) : -xb(i));
    out.l1 += xb(i);
  }
  return out;
}

namespace {

struct Candidate {
  std::vector<XY> points;
  std::vector<double> coefficients;
  double l1 = std::numeric_limits<double>::infinity();
};

void enumerate_pairs(const std::vector<XY>& pts, const std::vector<Vec3>& fs,
                     const Vec3& c, Candidate& best) {
  const double cn = c.norm();
  for (std::size_t a = 0; a < fs.size(); ++a) {
    if (fs[a].isZero()) continue;
    for (std::size_t b = a + 1; b < fs.size(); ++b) {
      const Vec3 nrm = fs[a].cross(fs[b]);
      const double nn = nrm.norm();
      if (nn == 0.0 || std::abs(c.dot(nrm)) > 1e-12 * cn * nn) continue;
      Eigen::Matrix<double, 3, 2> f2;
      f2 << fs[a], fs[b];
      const Eigen::Vector2d coef = (f2.transpose() * f2).ldlt().solve(f2.transpose() * c);
      if ((f2 * coef - c).norm() > 1e-10 * cn) continue;
      const double l1 = std::abs(coef(0)) + std::abs(coef(1));
      if (l1 < best.l1) best = {{pts[a], pts[b]}, {coef(0), coef(1)}, l1};
    }
  }
}

void enumerate_edge_triples(const std::vector<XY>& pts,
                            const std::vector<Vec3>& fs,
                            const TransformedSpace& unit_space, const Vec3& c,
                            Candidate& best) {
  std::vector<std::size_t> edge;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& p = pts[k];
    if (p.x == unit_space.x_min() || p.x == unit_space.x_max() ||
        p.y == unit_space.y_min() || p.y == unit_space.y_max()) {
      edge.push_back(k);
    }
  }
  for (std::size_t a = 0; a < edge.size(); ++a) {
    const Vec3& fa = fs[edge[a]];
    for (std::size_t b = a + 1; b < edge.size(); ++b) {
      const Vec3& fb = fs[edge[b]];
      const Vec3 ab = fa.cross(fb);
      for (std::size_t k = b + 1; k < edge.size(); ++k) {
        const Vec3& fk = fs[edge[k]];
        const double det = ab.dot(fk);
        if (std::abs(det) <= 1e-14 * fa.norm() * fb.norm() * fk.norm()) continue;
        // Cramer's rule for [fa fb fk] a = c.
        const double ca = c.dot(fb.cross(fk)) / det;
        const double cb = fa.dot(c.cross(fk)) / det;
        const double ck = c.dot(ab) / det;
        const double l1 = std::abs(ca) + std::abs(cb) + std::abs(ck);
        if (l1 < best.l1) {
          best = {{pts[edge[a]], pts[edge[b]], pts[edge[k]]}, {ca, cb, ck}, l1};
        }
      }
    }
  }
}

}  // namespace

CSearchResult c_optimal_search(const TransformedSpace& xs, const Vec3& c,
                               const CSearchOptions& opt) {
  if (opt.grid_n < 11) throw std::invalid_argument("c_optimal_search: grid_n must be >= 11");
  const UnitFrame unit(xs);
  const TransformedSpace unit_space = unit.space(xs);
  const Vec3 cu = c.cwiseQuotient(unit.c_scale());
  const auto pts = lattice(unit_space, opt.grid_n);

  Candidate best;
  if (opt.edges_only) {
    const auto fs = regression_vectors(pts);
    enumerate_pairs(pts, fs, cu, best);
    enumerate_edge_triples(pts, fs, unit_space, cu, best);
  } else {
    const ElfvingLp lp = elfving_lp(pts, cu);
    best = {lp.points, lp.coefficients, lp.l1};
  }
  if (!std::isfinite(best.l1) || best.points.empty()) {
    throw std::runtime_error("c_optimal_search: no feasible support on the grid");
  }
  std::vector<SupportPoint> support;
  for (std::size_t k = 0; k < best.points.size(); ++k) {
    const double w = std::abs(best.coefficients[k]) / best.l1;
    if (w > 0.0) support.push_back({best.points[k].x * unit.sx, best.points[k].y * unit.sy, w});
  }
  double partial = 0.0;
  for (std::size_t k = 0; k + 1 < support.size(); ++k) partial += support[k].weight;
  support.back().weight = 1.0 - partial;
  return {Design::merged(Frame::transformed, std::move(support)), best.l1 * best.l1};
}

Design c_optimal_search(const DesignSpace& space, const Theta& theta, int j,
                        const CSearchOptions& opt) {
  const TransformedSpace xs = transformed_space(space, theta);
  return pullback_design(c_optimal_search(xs, c_vector(j, theta), opt).design, theta);
}

}  // namespace inhibdesign
