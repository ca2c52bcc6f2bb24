#include "inhibdesign/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "inhibdesign/closed_form.hpp"
#include "inhibdesign/equiosc.hpp"
#include "inhibdesign/oracle.hpp"
#include "inhibdesign/serialize.hpp"
#include "inhibdesign/simulate.hpp"
#include "inhibdesign/verify.hpp"

namespace inhibdesign {

namespace {

// Raised for user-facing input problems; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every option lives on the top-level app so that one flat config file can
// hold any of them. Subcommands ignore options they do not use.
struct Options {
  std::optional<double> v, km, kic;
  std::optional<double> s_min, s_max, i_min, i_max;
  std::optional<std::string> criterion;
  std::string frame = "original";
  std::string out;
  std::string design_file;
  std::string reference_file;
  std::optional<int> grid;
  double tol = kDefaultSlackTol;
  std::string edges_only = "false";
  int max_iter = MultiplicativeOptions{}.max_iter;
  std::optional<int> n, reps;
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
  std::string summary;
  std::string what;
  std::vector<double> q;
  std::optional<double> x_min, x_max;
  int samples = 201;
};

double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw InputError(std::string("missing required flag ") + flag);
  return *v;
}

std::optional<Theta> theta_from(const Options& o, const DesignMetadata* meta) {
  const int given = (o.v ? 1 : 0) + (o.km ? 1 : 0) + (o.kic ? 1 : 0);
  if (given == 0 && meta != nullptr && meta->theta) return meta->theta;
  if (given == 0) return std::nullopt;
  return Theta(need(o.v, "--V"), need(o.km, "--Km"), need(o.kic, "--Kic"));
}

std::optional<DesignSpace> space_from(const Options& o, const DesignMetadata* meta) {
  const int given = (o.s_min ? 1 : 0) + (o.s_max ? 1 : 0) + (o.i_min ? 1 : 0) +
                    (o.i_max ? 1 : 0);
  if (given == 0 && meta != nullptr && meta->space) return meta->space;
  if (given == 0) return std::nullopt;
  return DesignSpace(need(o.s_min, "--Smin"), need(o.s_max, "--Smax"),
                     need(o.i_min, "--Imin"), need(o.i_max, "--Imax"));
}

Theta require_theta(const Options& o, const DesignMetadata* meta = nullptr) {
  if (auto t = theta_from(o, meta)) return *t;
  throw InputError("missing required flags --V --Km --Kic");
}

DesignSpace require_space(const Options& o, const DesignMetadata* meta = nullptr) {
  if (auto s = space_from(o, meta)) return *s;
  throw InputError("missing required flags --Smin --Smax --Imin --Imax");
}

Criterion require_criterion(const Options& o, const DesignMetadata* meta = nullptr) {
  if (o.criterion) {
    try {
      return parse_criterion(*o.criterion);
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("--criterion: ") + e.what());
    }
  }
  if (meta != nullptr && meta->criterion) return *meta->criterion;
  throw InputError("missing required flag --criterion");
}

Frame require_frame(const Options& o) {
  if (o.frame == "original") return Frame::original;
  if (o.frame == "transformed") return Frame::transformed;
  throw InputError("--frame: expected original or transformed, got '" + o.frame + "'");
}

DesignDocument load_design(const std::string& path, const char* flag) {
  if (path.empty()) throw InputError(std::string("missing required flag ") + flag);
  std::ifstream in(path);
  if (!in) throw InputError(std::string(flag) + ": cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return design_from_json(buf.str());
  } catch (const std::exception& e) {
    throw InputError(std::string(flag) + ": " + e.what());
  }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("--out: cannot write '" + path + "'");
  f << text;
}

int run_design(const Options& o, std::ostream& out) {
  const Criterion criterion = require_criterion(o);
  const Theta theta = require_theta(o);
  const DesignSpace space = require_space(o);
  const Frame frame = require_frame(o);
  const TransformedSpace xs = transformed_space(space, theta);
  DesignMetadata meta{theta, space, std::nullopt, criterion};
  std::optional<Design> design;
  if (frame == Frame::original) {
    design = optimal_design(criterion, space, theta);
  } else {
    design = optimal_design_transformed(criterion, xs);
    meta.transformed_space = xs;
  }
  emit(o.out, design_to_json(*design, meta), out);
  return kExitOk;
}

int run_verify(const Options& o, std::ostream& out) {
  const DesignDocument doc = load_design(o.design_file, "--design");
  const Criterion criterion = require_criterion(o, &doc.meta);
  const int grid = o.grid.value_or(kDefaultGrid);
  if (grid < 2) throw InputError("--grid: must be at least 2");
  CertificateReport report;
  const auto theta = theta_from(o, &doc.meta);
  const auto space = space_from(o, &doc.meta);
  if (doc.design.frame() == Frame::transformed && doc.meta.transformed_space &&
      !(theta && space)) {
    report = certify_transformed(doc.design, criterion, *doc.meta.transformed_space, grid, o.tol);
  } else {
    if (!theta) throw InputError("missing required flags --V --Km --Kic");
    if (!space) throw InputError("missing required flags --Smin --Smax --Imin --Imax");
    const TransformedSpace xs = transformed_space(*space, *theta);
    report = doc.design.frame() == Frame::original
                 ? certify(doc.design, criterion, *space, *theta, grid, o.tol)
                 : certify_transformed(doc.design, criterion, xs, grid, o.tol);
  }
  emit(o.out, report_to_json(report), out);
  return report.pass ? kExitOk : kExitCertificateFail;
}

int run_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  const Criterion criterion = require_criterion(o);
  const Theta theta = require_theta(o);
  const DesignSpace space = require_space(o);
  const Frame frame = require_frame(o);
  const int grid = o.grid.value_or(MultiplicativeOptions{}.grid_n);
  if (grid < 11) throw InputError("--grid: must be at least 11");
  if (o.edges_only != "true" && o.edges_only != "false") {
    throw InputError("--edges-only: expected true or false, got '" + o.edges_only + "'");
  }
  const TransformedSpace xs = transformed_space(space, theta);
  std::optional<Design> design;
  if (criterion == Criterion::D) {
    MultiplicativeOptions mo;
    mo.grid_n = grid;
    mo.max_iter = o.max_iter;
    const MultiplicativeResult r = multiplicative_d(xs, mo);
    if (!r.converged) {
      err << "warning: multiplicative algorithm stopped after " << r.iterations
          << " iterations with max d = " << format_number(r.max_d) << "\n";
    }
    design = r.design;
  } else {
    CSearchOptions co;
    co.grid_n = grid;
    co.edges_only = o.edges_only == "true";
    design = c_optimal_search(xs, c_vector(criterion_index(criterion), theta), co).design;
  }
  DesignMetadata meta{theta, space, std::nullopt, criterion};
  if (frame == Frame::original) {
    design = pullback_design(*design, theta);
  } else {
    meta.transformed_space = xs;
  }
  emit(o.out, design_to_json(*design, meta), out);
  return kExitOk;
}

int run_efficiency(const Options& o, std::ostream& out) {
  const DesignDocument a = load_design(o.design_file, "--design");
  const DesignDocument b = load_design(o.reference_file, "--reference");
  const Criterion criterion = require_criterion(o, &a.meta);
  const Theta theta = require_theta(o, &a.meta);
  emit(o.out, format_number(efficiency(a.design, b.design, theta, criterion)) + "\n", out);
  return kExitOk;
}

std::string matrix_json(const Matrix3& m) {
  std::string s = "[";
  for (int r = 0; r < 3; ++r) {
    s += r ? ", [" : "[";
    for (int c = 0; c < 3; ++c) s += (c ? ", " : "") + format_number(m(r, c));
    s += "]";
  }
  return s + "]";
}

std::string vector_json(const Vec3& v) {
  std::string s = "[";
  for (int k = 0; k < 3; ++k) {
    s += (k ? ", " : "") + (std::isfinite(v(k)) ? format_number(v(k)) : std::string("null"));
  }
  return s + "]";
}

int run_simulate(const Options& o, std::ostream& out) {
  const DesignDocument doc = load_design(o.design_file, "--design");
  const Theta theta = require_theta(o, &doc.meta);
  const DesignSpace space = require_space(o, &doc.meta);
  if (!o.n) throw InputError("missing required flag --n");
  if (!o.reps) throw InputError("missing required flag --reps");
  if (!o.sigma) throw InputError("missing required flag --sigma");
  if (!o.seed) throw InputError("missing required flag --seed");
  if (*o.n < 1) throw InputError("--n: must be positive");
  if (*o.reps < 2) throw InputError("--reps: must be at least 2");
  if (!(*o.sigma >= 0.0)) throw InputError("--sigma: must be non-negative");
  const Design design = doc.design.frame() == Frame::original
                            ? doc.design
                            : pullback_design(doc.design, theta);
  const MonteCarloResult r =
      monte_carlo_covariance(design, theta, *o.sigma, *o.n, *o.reps, *o.seed, space);

  if (!o.out.empty()) {
    std::ostringstream csv;
    csv << "replicate,V,Km,Kic\n";
    for (std::size_t k = 0; k < r.fits.size(); ++k) {
      csv << k << "," << format_number(r.fits[k].v()) << "," << format_number(r.fits[k].km())
          << "," << format_number(r.fits[k].kic()) << "\n";
    }
    emit(o.out, csv.str(), out);
  }
  std::ostringstream js;
  js << "{\n  \"n\": " << *o.n << ",\n  \"reps\": " << *o.reps
     << ",\n  \"sigma\": " << format_number(*o.sigma) << ",\n  \"seed\": " << *o.seed
     << ",\n  \"rng\": \"philox4x32-10\""
     << ",\n  \"mean\": " << vector_json(r.mean)
     << ",\n  \"empirical_cov\": " << matrix_json(r.empirical_cov)
     << ",\n  \"predicted_cov\": " << matrix_json(r.predicted_cov)
     << ",\n  \"ratio\": " << vector_json(r.ratio)
     << ",\n  \"nonconverged\": " << r.nonconverged
     << ",\n  \"valid\": " << (r.valid ? "true" : "false")
     << ",\n  \"perturbed\": " << (r.perturbed ? "true" : "false");
  if (r.added_point) {
    js << ",\n  \"added_point\": {\"S\": " << format_number(r.added_point->first)
       << ", \"I\": " << format_number(r.added_point->second)
       << ", \"w\": " << format_number(r.added_point->weight) << "}";
  }
  js << ",\n  \"unperturbed_variance\": " << vector_json(r.unperturbed_variance) << "\n}\n";
  emit(o.summary, js.str(), out);
  return kExitOk;
}

int run_plotdata(const Options& o, std::ostream& out) {
  const double x_min = need(o.x_min, "--xmin");
  const double x_max = need(o.x_max, "--xmax");
  if (!(0.0 <= x_min && x_min < x_max && x_max < 1.0)) {
    throw InputError("--xmin/--xmax: need 0 <= xmin < xmax < 1");
  }
  std::vector<double> qs = o.q;
  if (qs.empty()) {
    for (int k = 0; k <= 20; ++k) qs.push_back(k / 20.0);
  }
  for (double q : qs) {
    if (!(q >= 0.0 && q <= 1.0)) throw InputError("--q: values must lie in [0, 1]");
  }
  std::ostringstream csv;
  if (o.what == "equiosc") {
    if (o.samples < 2) throw InputError("--samples: must be at least 2");
    csv << "q,x,psi\n";
    for (double q : qs) {
      const EquiOscPoly poly = solve_equioscillation(x_min, x_max, q);
      std::vector<double> xs;
      for (int k = 0; k < o.samples; ++k) {
        xs.push_back(k + 1 == o.samples ? x_max
                                        : x_min + k * (x_max - x_min) / (o.samples - 1));
      }
      // The extremal point is emitted exactly, in order.
      xs.insert(std::upper_bound(xs.begin(), xs.end(), poly.xbar), poly.xbar);
      xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
      for (double x : xs) {
        csv << format_number(q) << "," << format_number(x) << "," << format_number(poly(x)) << "\n";
      }
    }
  } else if (o.what == "xbar-omega") {
    csv << "q,xbar,omega\n";
    for (double q : qs) {
      const EquiOscPoly poly = solve_equioscillation(x_min, x_max, q);
      csv << format_number(q) << "," << format_number(poly.xbar) << ","
          << format_number(omega_weight(q, poly.xbar, x_max)) << "\n";
    }
  } else {
    throw InputError("--what: expected equiosc or xbar-omega, got '" + o.what + "'");
  }
  emit(o.out, csv.str(), out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Locally optimal designs for non-competitive inhibition kinetics"};
  app.set_config("--config", "", "Flat TOML/INI file with option values; flags win");
  app.require_subcommand(1);
  Options o;

  app.add_option("--V", o.v, "Maximal velocity V");
  app.add_option("--Km", o.km, "Michaelis constant K_m");
  app.add_option("--Kic", o.kic, "Inhibition constant K_ic");
  app.add_option("--Smin", o.s_min, "Lower substrate concentration");
  app.add_option("--Smax", o.s_max, "Upper substrate concentration");
  app.add_option("--Imin", o.i_min, "Lower inhibitor concentration");
  app.add_option("--Imax", o.i_max, "Upper inhibitor concentration");
  app.add_option("--criterion", o.criterion, "D, eV, eKm or eKic");
  app.add_option("--frame", o.frame, "original or transformed")->capture_default_str();
  app.add_option("--out", o.out, "Output file (default: standard output)");
  app.add_option("--design", o.design_file, "Design JSON file");
  app.add_option("--reference", o.reference_file, "Reference design JSON file");
  app.add_option("--grid", o.grid, "Lattice points per axis (verify 201, oracle 101)");
  app.add_option("--tol", o.tol, "Certificate slack tolerance")->capture_default_str();
  app.add_option("--edges-only", o.edges_only, "Oracle c-search over pairs and edge triples")
      ->capture_default_str();
  app.add_option("--max-iter", o.max_iter, "Multiplicative algorithm iteration cap")
      ->capture_default_str();
  app.add_option("--n", o.n, "Observations per dataset");
  app.add_option("--reps", o.reps, "Monte-Carlo replicates");
  app.add_option("--sigma", o.sigma, "Noise standard deviation");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--summary", o.summary, "Simulation summary file (default: standard output)");
  app.add_option("--what", o.what, "equiosc or xbar-omega");
  app.add_option("--q", o.q, "Comma-separated q values")->delimiter(',');
  app.add_option("--xmin", o.x_min, "Lower end of the x interval");
  app.add_option("--xmax", o.x_max, "Upper end of the x interval");
  app.add_option("--samples", o.samples, "Samples per curve")->capture_default_str();

  auto* design = app.add_subcommand("design", "Closed-form optimal design");
  auto* verify = app.add_subcommand("verify", "Equivalence-theorem certificate");
  auto* oracle = app.add_subcommand("oracle", "Grid-based numerical optimum");
  auto* eff = app.add_subcommand("efficiency", "Criterion efficiency of one design against another");
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo covariance check");
  auto* plot = app.add_subcommand("plotdata", "CSV data for the equi-oscillation figures");
  for (auto* sub : {design, verify, oracle, eff, simulate, plot}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*design) return run_design(o, out);
    if (*verify) return run_verify(o, out);
    if (*oracle) return run_oracle(o, out, err);
    if (*eff) return run_efficiency(o, out);
    if (*simulate) return run_simulate(o, out);
    if (*plot) return run_plotdata(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace inhibdesign
