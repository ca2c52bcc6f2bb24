#pragma once

// Non-competitive inhibition kinetics: regression function, parameter
// gradient, simulated observations and a nonlinear least-squares fit.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace inhibdesign {

using Vec3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

class Design;

/// Kinetic parameters (V, K_m, K_ic); all strictly positive.
class Theta {
 public:
  Theta(double v, double km, double kic);

  double v() const { return v_; }
  double km() const { return km_; }
  double kic() const { return kic_; }

  Vec3 as_vector() const { return Vec3(v_, km_, kic_); }
  static Theta from_vector(const Vec3& p) { return Theta(p(0), p(1), p(2)); }

 private:
  double v_;
  double km_;
  double kic_;
};

/// Rectangle [S_min, S_max] x [I_min, I_max] of substrate and inhibitor
/// concentrations.
class DesignSpace {
 public:
  DesignSpace(double s_min, double s_max, double i_min, double i_max);

  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }
  double i_min() const { return i_min_; }
  double i_max() const { return i_max_; }

  bool contains(double s, double i, double rel_tol = 1e-12) const;

 private:
  double s_min_;
  double s_max_;
  double i_min_;
  double i_max_;
};

double velocity(double s, double i, const Theta& theta);

/// d velocity / d theta, ordered (V, K_m, K_ic).
Vec3 gradient(double s, double i, const Theta& theta);

struct Observation {
  double s;
  double i;
  double y;
};

using Dataset = std::vector<Observation>;

/// Integer replicate counts n_i with sum n, from round(w_i * n) with a
/// largest-remainder correction. Ties go to the lower index.
std::vector<int> allocate_replicates(std::span<const double> weights, int n);

/// Draws n noisy responses on an original-frame design. `stream` selects an
/// independent random stream for the same seed.
Dataset simulate_observations(const Design& design, int n, const Theta& theta,
                              double sigma, std::uint64_t seed,
                              std::uint64_t stream = 0);

struct FitOptions {
  double step_tol = 1e-10;
  int max_iter = 200;
};

struct FitResult {
  Theta theta;
  bool converged = false;
  int iterations = 0;
  double rss = 0.0;
  std::string message;
};

/// Levenberg-Marquardt minimizer of sum (Y - eta)^2. Never throws on
/// numerical failure; check `converged`.
FitResult fit_nls(const Dataset& data, const Theta& init,
                  const FitOptions& options = {});

void write_dataset_csv(std::ostream& os, const Dataset& data);
Dataset read_dataset_csv(std::istream& is);

}  // namespace inhibdesign
