#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "inhibdesign/closed_form.hpp"
#include "inhibdesign/kinetics.hpp"
#include "inhibdesign/rng.hpp"
#include "support.hpp"

using namespace inhibdesign;
using testsupport::Gen;

namespace {

// Central differences of velocity in theta.
Vec3 fd_gradient(double s, double i, const Theta& t, double h = 1e-6) {
  Vec3 g;
  for (int k = 0; k < 3; ++k) {
    Vec3 up = t.as_vector();
    Vec3 dn = t.as_vector();
    up(k) += h;
    dn(k) -= h;
    g(k) = (velocity(s, i, Theta::from_vector(up)) - velocity(s, i, Theta::from_vector(dn))) /
           (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_SUITE("kinetics") {

TEST_CASE("theta and design space validation") {
  CHECK_THROWS_AS(Theta(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Theta(1.0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Theta(1.0, 1.0, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(DesignSpace(1.0, 1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(DesignSpace(-1.0, 1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(DesignSpace(0.0, 1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_NOTHROW(DesignSpace(0.0, 10.0, 0.0, 10.0));
}

TEST_CASE("velocity examples") {
  const Theta t(1, 1, 1);
  CHECK(velocity(0, 5, t) == 0.0);
  CHECK(velocity(10, 0, t) == doctest::Approx(10.0 / 11.0).epsilon(1e-15));
  CHECK(velocity(1, 1, t) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(velocity(-1, 0, t), std::domain_error);
  CHECK_THROWS_AS(velocity(1, -1e-9, t), std::domain_error);
}

TEST_CASE("velocity reduces to Michaelis-Menten at I = 0 exactly") {
  Gen gen(11);
  for (int k = 0; k < 1000; ++k) {
    const Theta t = gen.theta();
    const double s = gen.uniform(0.0, 50.0);
    CHECK(velocity(s, 0.0, t) == t.v() * s / (t.km() + s));
  }
}

TEST_CASE("velocity is increasing in S and decreasing in I") {
  Gen gen(12);
  for (int k = 0; k < 1000; ++k) {
    const Theta t = gen.theta();
    const double s = gen.uniform(0.0, 20.0);
    const double i = gen.uniform(0.0, 20.0);
    const double ds = gen.uniform(1e-3, 5.0);
    CHECK(velocity(s + ds, i, t) > velocity(s, i, t));
    if (s > 0.0) CHECK(velocity(s, i + ds, t) < velocity(s, i, t));
    CHECK(velocity(s, i, t) < t.v());
  }
}

TEST_CASE("gradient examples") {
  const Theta t(1, 1, 1);
  CHECK(gradient(0, 3, Theta(2, 3, 4)).isZero(0.0));
  const Vec3 g1 = gradient(1, 0, t);
  CHECK((g1 - Vec3(0.5, -0.25, 0.0)).cwiseAbs().maxCoeff() < 1e-15);
  const Vec3 g2 = gradient(1, 1, t);
  CHECK((g2 - Vec3(0.25, -0.125, 0.125)).cwiseAbs().maxCoeff() < 1e-15);
  // Finite-difference oracle on the same points.
  CHECK((fd_gradient(1, 0, t) - g1).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((fd_gradient(1, 1, t) - g2).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("gradient matches central differences on random inputs") {
  Gen gen(13);
  for (int k = 0; k < 1000; ++k) {
    const Theta t = gen.theta();
    const double s = gen.uniform(0.0, 20.0);
    const double i = gen.uniform(0.0, 20.0);
    const Vec3 g = gradient(s, i, t);
    const Vec3 fd = fd_gradient(s, i, t);
    CHECK((g - fd).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, g.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("largest-remainder allocation") {
  const std::vector<double> half{0.5, 0.5};
  CHECK(allocate_replicates(half, 10) == std::vector<int>{5, 5});
  const std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const auto a = allocate_replicates(thirds, 10);
  CHECK(a == std::vector<int>{4, 3, 3});
  const std::vector<double> w{0.26, 0.26, 0.48};
  const auto b = allocate_replicates(w, 7);
  CHECK(b[0] + b[1] + b[2] == 7);
  CHECK(b == std::vector<int>{2, 2, 3});
  CHECK_THROWS(allocate_replicates(thirds, 2));

  Gen gen(14);
  for (int k = 0; k < 200; ++k) {
    const int m = gen.integer(1, 6);
    std::vector<double> ws;
    double tot = 0.0;
    for (int j = 0; j < m; ++j) {
      ws.push_back(gen.uniform(0.05, 1.0));
      tot += ws.back();
    }
    for (auto& v : ws) v /= tot;
    // Every point gets at least its floor once n * w_min >= 1.
    const int lo = static_cast<int>(std::ceil(1.0 / *std::min_element(ws.begin(), ws.end())));
    const int n = gen.integer(lo, lo + 500);
    const auto alloc = allocate_replicates(ws, n);
    int sum = 0;
    for (std::size_t j = 0; j < alloc.size(); ++j) {
      sum += alloc[j];
      CHECK(std::abs(alloc[j] - ws[j] * n) < 1.0);
    }
    CHECK(sum == n);
  }
}

TEST_CASE("Philox4x32-10 known-answer vectors") {
  const auto zero = Philox4x32(0, 0).block(0);
  CHECK(zero == Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const auto ones = Philox4x32(~0ull, ~0ull).block(~0ull);
  CHECK(ones == Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  const auto pi = Philox4x32(0x299f31d0a4093822ull, 0x0370734413198a2eull).block(0x85a308d3243f6a88ull);
  CHECK(pi == Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal stream moments") {
  NormalStream ns(2024, 3);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double z = ns.next();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.015);
}

TEST_CASE("simulate_observations examples") {
  const Theta t(1, 1, 1);
  const Design two(Frame::original, {{1.0, 0.0, 0.5}, {4.0, 2.0, 0.5}});
  const Dataset d = simulate_observations(two, 10, t, 0.0, 7);
  REQUIRE(d.size() == 10);
  int at_first = 0;
  for (const auto& o : d) {
    CHECK(o.y == velocity(o.s, o.i, t));
    if (o.s == 1.0) ++at_first;
  }
  CHECK(at_first == 5);

  const Design three(Frame::original, {{1, 0, 1.0 / 3}, {2, 1, 1.0 / 3}, {3, 2, 1.0 / 3}});
  const Dataset e = simulate_observations(three, 10, t, 0.1, 7);
  CHECK(e.size() == 10);

  const Dataset again = simulate_observations(three, 10, t, 0.1, 7);
  for (std::size_t k = 0; k < e.size(); ++k) CHECK(e[k].y == again[k].y);
  const Dataset other_stream = simulate_observations(three, 10, t, 0.1, 7, 1);
  CHECK(other_stream[0].y != e[0].y);
  CHECK_THROWS(simulate_observations(three, 2, t, 0.1, 7));
}

TEST_CASE("fit_nls on noiseless data") {
  const Theta t0(1.5, 2.0, 0.7);
  const DesignSpace sp(0, 10, 0, 5);
  const Design d = d_optimal(sp, t0);
  const Dataset data = simulate_observations(d, 30, t0, 0.0, 1);

  const FitResult exact = fit_nls(data, t0);
  CHECK(exact.converged);
  CHECK((exact.theta.as_vector() - t0.as_vector()).cwiseAbs().maxCoeff() == 0.0);

  const FitResult from_off = fit_nls(data, Theta::from_vector(1.2 * t0.as_vector()));
  CHECK(from_off.converged);
  CHECK((from_off.theta.as_vector() - t0.as_vector()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("fit_nls reports a singular Jacobian as non-convergence") {
  const Theta t0(1, 1, 1);
  // All rows at I = 0: K_ic is not identifiable.
  const Design d(Frame::original, {{0.5, 0.0, 0.5}, {5.0, 0.0, 0.5}});
  const Dataset data = simulate_observations(d, 20, t0, 0.0, 1);
  const FitResult r = fit_nls(data, Theta(1.1, 0.9, 1.3));
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("fit_nls under noise stays within a few asymptotic sd") {
  const Theta t0(1, 1, 1);
  const DesignSpace sp(0, 10, 0, 10);
  const Design d = d_optimal(sp, t0);
  const double sigma = 0.05;
  const int n = 500;
  const Matrix3 cov = sigma * sigma / n * information_matrix(d, t0).inverse();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FitResult r = fit_nls(simulate_observations(d, n, t0, sigma, seed), t0);
    REQUIRE(r.converged);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(r.theta.as_vector()(j) - t0.as_vector()(j)) < 5.0 * std::sqrt(cov(j, j)));
    }
  }
}

TEST_CASE("dataset CSV round trip") {
  const Theta t(1, 1, 1);
  const Design d(Frame::original, {{1.0 / 3, 0.1, 0.5}, {7.0, 2.0 / 3, 0.5}});
  const Dataset data = simulate_observations(d, 6, t, 0.3, 99);
  std::stringstream ss;
  write_dataset_csv(ss, data);
  CHECK(ss.str().rfind("S,I,Y\n", 0) == 0);
  const Dataset back = read_dataset_csv(ss);
  REQUIRE(back.size() == data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    CHECK(back[k].s == data[k].s);
    CHECK(back[k].i == data[k].i);
    CHECK(back[k].y == data[k].y);
  }
}

}  // TEST_SUITE
