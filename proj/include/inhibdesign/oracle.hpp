#pragma once

// Grid-based numerical optimal-design solvers, independent of the closed
// forms they are used to check.

#include <vector>

#include "inhibdesign/design.hpp"
#include "inhibdesign/transform.hpp"

namespace inhibdesign {

/// Regular grid_n x grid_n lattice over a transformed rectangle.
std::vector<XY> lattice(const TransformedSpace& xs, int grid_n);

struct MultiplicativeOptions {
  int grid_n = 101;
  int max_iter = 50000;
  double tol = 1e-6;
  double weight_floor = 1e-6;
  /// Merge distance in grid cells.
  double merge_cells = 1.5;
  bool record_history = false;
};

struct MultiplicativeResult {
  Design design;
  /// Grid measure before cleanup.
  Design raw;
  int iterations = 0;
  /// max_u f^T M^-1 f at the last iterate, compared against 3 (1 + tol).
  double max_d = 0.0;
  bool converged = false;
  std::vector<double> log_det_history;
};

/// w(u) <- w(u) d(u, xi) / 3 from the uniform measure on the lattice.
MultiplicativeResult multiplicative_d(const TransformedSpace& xs,
                                      const MultiplicativeOptions& opt = {});
MultiplicativeResult multiplicative_d(const DesignSpace& space,
                                      const Theta& theta,
                                      const MultiplicativeOptions& opt = {});

struct CSearchOptions {
  int grid_n = 101;
  /// true: exhaustive pairs on the full lattice plus triples of edge
  /// points. false: exact Elfving linear program over the full lattice.
  bool edges_only = false;
};

struct CSearchResult {
  Design design;
  /// c^T M~^- c of the returned design.
  double variance = 0.0;
};

/// Best design for c^T M~^- c on the lattice. Support weights come from the
/// Elfving representation c = sum a_j f_j: w_j = |a_j| / sum |a|, variance
/// (sum |a|)^2. Throws std::runtime_error when no support reaches c.
CSearchResult c_optimal_search(const TransformedSpace& xs, const Vec3& c,
                               const CSearchOptions& opt = {});

/// Original-frame wrapper for an e_j criterion (c = B(theta) e_j).
Design c_optimal_search(const DesignSpace& space, const Theta& theta, int j,
                        const CSearchOptions& opt = {});

/// Minimal sum |a_j| subject to sum a_j f(p_j) = c over the given
/// candidate points (two-phase simplex on the 3-row linear program).
/// Returns the support with its coefficients a_j.
struct ElfvingLp {
  std::vector<XY> points;
  std::vector<double> coefficients;
  double l1 = 0.0;
};
ElfvingLp elfving_lp(const std::vector<XY>& candidates, const Vec3& c);

/// Merges points within merge_tol (weighted centroid, summed weight),
/// drops weights below weight_floor and renormalises.
Design design_cleanup(const Design& design, double merge_tol,
                      double weight_floor);

}  // namespace inhibdesign
