#include "inhibdesign/design.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "inhibdesign/transform.hpp"

namespace inhibdesign {

std::string_view frame_name(Frame frame) {
  return frame == Frame::original ? "original" : "transformed";
}

Design::Design(Frame frame, std::vector<SupportPoint> points)
    : frame_(frame), points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("design: no support points");
  double sum = 0.0;
  for (const auto& p : points_) {
    if (!std::isfinite(p.first) || !std::isfinite(p.second) ||
        !std::isfinite(p.weight)) {
      throw std::invalid_argument("design: non-finite entry");
    }
    if (!(p.weight > 0.0)) {
      throw std::invalid_argument("design: weights must be strictly positive");
    }
    sum += p.weight;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw std::invalid_argument("design: weights must sum to one");
  }
  for (std::size_t a = 0; a < points_.size(); ++a) {
    for (std::size_t b = a + 1; b < points_.size(); ++b) {
      const double d = std::hypot(points_[a].first - points_[b].first,
                                  points_[a].second - points_[b].second);
      if (d <= kMergeTol) {
        throw std::invalid_argument("design: support points must be distinct");
      }
    }
  }
}

Design Design::merged(Frame frame, std::vector<SupportPoint> points,
                      double merge_tol) {
  std::vector<SupportPoint> out;
  for (const auto& p : points) {
    bool absorbed = false;
    for (auto& q : out) {
      if (std::hypot(p.first - q.first, p.second - q.second) <= merge_tol) {
        q.weight += p.weight;
        absorbed = true;
        break;
      }
    }
    if (!absorbed) out.push_back(p);
  }
  return Design(frame, std::move(out));
}

std::string_view criterion_name(Criterion criterion) {
  switch (criterion) {
    case Criterion::D: return "D";
    case Criterion::V: return "eV";
    case Criterion::Km: return "eKm";
    case Criterion::Kic: return "eKic";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  if (name == "D") return Criterion::D;
  if (name == "eV") return Criterion::V;
  if (name == "eKm") return Criterion::Km;
  if (name == "eKic") return Criterion::Kic;
  throw std::invalid_argument("unknown criterion '" + std::string(name) +
                              "' (expected D, eV, eKm or eKic)");
}

int criterion_index(Criterion criterion) {
  switch (criterion) {
    case Criterion::V: return 1;
    case Criterion::Km: return 2;
    case Criterion::Kic: return 3;
    case Criterion::D: break;
  }
  throw std::invalid_argument("D criterion has no parameter index");
}

Matrix3 information_matrix(const Design& design, const Theta& theta) {
  if (design.frame() != Frame::original) {
    throw std::invalid_argument("information_matrix: design must be in the original frame");
  }
  Matrix3 m = Matrix3::Zero();
  for (const auto& p : design.points()) {
    const Vec3 g = gradient(p.first, p.second, theta);
    m.noalias() += p.weight * g * g.transpose();
  }
  return m;
}

Matrix3 information_matrix_any(const Design& design, const Theta& theta) {
  if (design.frame() == Frame::original) return information_matrix(design, theta);
  const Matrix3 a = a_matrix(theta);
  return a * transformed_info(design) * a.transpose();
}

double d_criterion(const Matrix3& m) { return m.determinant(); }

namespace {

Eigen::SelfAdjointEigenSolver<Matrix3> symmetric_eigen(const Matrix3& m) {
  const Matrix3 sym = 0.5 * (m + m.transpose());
  return Eigen::SelfAdjointEigenSolver<Matrix3>(sym);
}

}  // namespace

Matrix3 pseudo_inverse(const Matrix3& m, double rank_tol) {
  const auto eig = symmetric_eigen(m);
  const Vec3& lambda = eig.eigenvalues();
  const double cutoff = rank_tol * lambda.cwiseAbs().maxCoeff();
  Vec3 inv = Vec3::Zero();
  for (int k = 0; k < 3; ++k) {
    if (std::abs(lambda(k)) > cutoff && lambda(k) != 0.0) inv(k) = 1.0 / lambda(k);
  }
  const Matrix3& v = eig.eigenvectors();
  return v * inv.asDiagonal() * v.transpose();
}

int numerical_rank(const Matrix3& m, double rank_tol) {
  const Vec3 lambda = symmetric_eigen(m).eigenvalues();
  const double cutoff = rank_tol * lambda.cwiseAbs().maxCoeff();
  int rank = 0;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(lambda(k)) > cutoff && lambda(k) != 0.0) ++rank;
  }
  return rank;
}

bool range_inclusion(const Matrix3& m, const Vec3& c, double tol) {
  const Vec3 residual = c - m * (pseudo_inverse(m) * c);
  return residual.norm() <= tol * c.norm();
}

double c_variance(const Matrix3& m, const Vec3& c, double tol) {
  if (!range_inclusion(m, c, tol)) {
    throw NotEstimable("c is not in the range of the information matrix");
  }
  return c.dot(pseudo_inverse(m) * c);
}

double ej_criterion(const Design& design, const Theta& theta, int j) {
  if (j < 1 || j > 3) throw std::invalid_argument("ej_criterion: j must be 1, 2 or 3");
  const Matrix3 m = information_matrix_any(design, theta);
  return 1.0 / c_variance(m, Vec3::Unit(j - 1));
}

double criterion_value(const Design& design, const Theta& theta,
                       Criterion criterion) {
  if (criterion == Criterion::D) {
    return d_criterion(information_matrix_any(design, theta));
  }
  try {
    return ej_criterion(design, theta, criterion_index(criterion));
  } catch (const NotEstimable&) {
    return 0.0;
  }
}

double efficiency(const Design& a, const Design& b, const Theta& theta,
                  Criterion criterion) {
  const double va = criterion_value(a, theta, criterion);
  const double vb = criterion_value(b, theta, criterion);
  if (!(vb > 0.0)) {
    throw std::domain_error("efficiency: reference design has criterion value zero");
  }
  if (criterion == Criterion::D) return std::cbrt(std::max(va, 0.0) / vb);
  return va / vb;
}

}  // namespace inhibdesign
