#include "inhibdesign/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "inhibdesign/design.hpp"
#include "inhibdesign/rng.hpp"

namespace inhibdesign {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void require_concentrations(double s, double i) {
  if (!(s >= 0.0) || !(i >= 0.0) || !std::isfinite(s) || !std::isfinite(i)) {
    throw std::domain_error("concentrations must be finite and non-negative");
  }
}

}  // namespace

Theta::Theta(double v, double km, double kic) : v_(v), km_(km), kic_(kic) {
  if (!finite_positive(v) || !finite_positive(km) || !finite_positive(kic)) {
    throw std::invalid_argument("theta: V, K_m and K_ic must be positive");
  }
}

DesignSpace::DesignSpace(double s_min, double s_max, double i_min,
                         double i_max)
    : s_min_(s_min), s_max_(s_max), i_min_(i_min), i_max_(i_max) {
  const bool ok = std::isfinite(s_min) && std::isfinite(s_max) &&
                  std::isfinite(i_min) && std::isfinite(i_max) &&
                  0.0 <= s_min && s_min < s_max && 0.0 <= i_min &&
                  i_min < i_max;
  if (!ok) {
    throw std::invalid_argument(
        "design space: need 0 <= S_min < S_max and 0 <= I_min < I_max");
  }
}

bool DesignSpace::contains(double s, double i, double rel_tol) const {
  const double ts = rel_tol * std::max(1.0, s_max_);
  const double ti = rel_tol * std::max(1.0, i_max_);
  return s >= s_min_ - ts && s <= s_max_ + ts && i >= i_min_ - ti &&
         i <= i_max_ + ti;
}

double velocity(double s, double i, const Theta& theta) {
  require_concentrations(s, i);
  return theta.v() * s / ((theta.km() + s) * (1.0 + i / theta.kic()));
}

Vec3 gradient(double s, double i, const Theta& theta) {
  require_concentrations(s, i);
  const double inhib = 1.0 + i / theta.kic();
  const double pre = s / ((theta.km() + s) * inhib);
  return pre * Vec3(1.0, -theta.v() / (theta.km() + s),
                    theta.v() * (i / (theta.kic() * theta.kic())) / inhib);
}

std::vector<int> allocate_replicates(std::span<const double> weights, int n) {
  if (weights.empty()) throw std::invalid_argument("allocate: empty design");
  if (n < static_cast<int>(weights.size())) {
    throw std::invalid_argument("allocate: n is smaller than the support size");
  }
  const std::size_t k = weights.size();
  std::vector<int> counts(k);
  std::vector<double> remainder(k);
  int total = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const double exact = weights[j] * n;
    counts[j] = static_cast<int>(std::floor(exact));
    remainder[j] = exact - counts[j];
    total += counts[j];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t r = 0; total < n; ++r, ++total) ++counts[order[r % k]];
  for (std::size_t r = k; total > n; --total) {
    // Only reachable through rounding of weights summing slightly above 1.
    --counts[order[--r]];
  }
  if (std::any_of(counts.begin(), counts.end(), [](int c) { return c <= 0; })) {
    throw std::invalid_argument(
        "allocate: a support point receives no observations after rounding");
  }
  return counts;
}

Dataset simulate_observations(const Design& design, int n, const Theta& theta,
                              double sigma, std::uint64_t seed,
                              std::uint64_t stream) {
  if (design.frame() != Frame::original) {
    throw std::invalid_argument("simulate: design must be in the original frame");
  }
  if (!(sigma >= 0.0)) throw std::invalid_argument("simulate: sigma < 0");
  std::vector<double> w;
  for (const auto& p : design.points()) w.push_back(p.weight);
  const auto counts = allocate_replicates(w, n);

  NormalStream noise(seed, stream);
  Dataset data;
  data.reserve(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < design.size(); ++j) {
    const auto& p = design[j];
    const double mean = velocity(p.first, p.second, theta);
    for (int r = 0; r < counts[j]; ++r) {
      data.push_back({p.first, p.second, mean + sigma * noise.next()});
    }
  }
  return data;
}

FitResult fit_nls(const Dataset& data, const Theta& init,
                  const FitOptions& options) {
  FitResult result{init, false, 0, 0.0, {}};
  if (data.size() < 3) {
    result.message = "fewer than three observations";
    return result;
  }

  auto rss_at = [&](const Vec3& p) {
    const Theta t = Theta::from_vector(p);
    double sum = 0.0;
    for (const auto& o : data) {
      const double r = o.y - velocity(o.s, o.i, t);
      sum += r * r;
    }
    return sum;
  };

  Vec3 p = init.as_vector();
  double rss = rss_at(p);
  double lambda = 1e-3;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    result.iterations = iter;
    const Theta t = Theta::from_vector(p);
    Matrix3 jtj = Matrix3::Zero();
    Vec3 jtr = Vec3::Zero();
    for (const auto& o : data) {
      const Vec3 g = gradient(o.s, o.i, t);
      jtj.noalias() += g * g.transpose();
      jtr += g * (o.y - velocity(o.s, o.i, t));
    }

    Eigen::SelfAdjointEigenSolver<Matrix3> eig(jtj);
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmax > 0.0) || eig.eigenvalues().minCoeff() <= 1e-14 * lmax) {
      result.message = "singular Jacobian";
      result.rss = rss;
      result.theta = t;
      return result;
    }

    bool accepted = false;
    while (!accepted) {
      Matrix3 lhs = jtj;
      lhs.diagonal() *= (1.0 + lambda);
      const Vec3 step = lhs.ldlt().solve(jtr);
      if (step.norm() <= options.step_tol * p.norm()) {
        result.theta = t;
        result.rss = rss;
        result.converged = true;
        return result;
      }
      const Vec3 trial = p + step;
      if ((trial.array() > 0.0).all()) {
        const double trial_rss = rss_at(trial);
        if (trial_rss <= rss) {
          p = trial;
          rss = trial_rss;
          lambda = std::max(lambda / 10.0, 1e-12);
          accepted = true;
          continue;
        }
      }
      lambda *= 10.0;
      if (lambda > 1e16) {
        result.message = "no descent step found";
        result.theta = t;
        result.rss = rss;
        return result;
      }
    }
  }
  result.theta = Theta::from_vector(p);
  result.rss = rss;
  result.message = "iteration limit reached";
  return result;
}

void write_dataset_csv(std::ostream& os, const Dataset& data) {
  os << "S,I,Y\n";
  char buf[96];
  for (const auto& o : data) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", o.s, o.i, o.y);
    os << buf;
  }
}

Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "S,I,Y") {
    throw std::invalid_argument("dataset: expected header S,I,Y");
  }
  Dataset data;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    Observation o{};
    char c1 = 0;
    char c2 = 0;
    if (!(row >> o.s >> c1 >> o.i >> c2 >> o.y) || c1 != ',' || c2 != ',') {
      throw std::invalid_argument("dataset: malformed row '" + line + "'");
    }
    data.push_back(o);
  }
  return data;
}

}  // namespace inhibdesign
