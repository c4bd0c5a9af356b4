#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qpm/metrics.hpp"
#include "support/oracles.hpp"

using namespace qpm;
namespace ts = qpm::testing;

namespace {

State random_normalized(int nq, std::uint64_t seed) {
  State s = random_phase_state(nq, seed);
  normalize(s);
  return s;
}

double max_diff(const State& a, const State& b) {
  double m = 0.0;
  for (std::size_t x = 0; x < a.dim(); ++x) m = std::max(m, std::abs(a.amps[x] - b.amps[x]));
  return m;
}

}  // namespace

TEST_CASE("base case m=1 is the S2 palindrome") {
  const auto sch = suzuki_coefficients(1, 3, 2);
  REQUIRE(sch.depth() == 3);
  CHECK(sch.s == std::vector<double>{0.5, 1.0, 0.5});
  CHECK(sch.part_index == std::vector<int>{0, 1, 0});

  const auto sch3 = suzuki_coefficients(1, 5, 3);
  REQUIRE(sch3.depth() == 5);
  CHECK(sch3.s == std::vector<double>{0.5, 0.5, 1.0, 0.5, 0.5});
  CHECK(sch3.part_index == std::vector<int>{0, 1, 2, 1, 0});
}

TEST_CASE("m=2 p=5 coefficients match the printed values") {
  const auto sch = suzuki_coefficients(2, 5, 2);
  REQUIRE(sch.depth() == 11);
  const std::vector<double> expect = {
      0.20724538589718786, 0.4144907717943757,  0.4144907717943757, 0.4144907717943757,
      -0.12173615769156357, -0.6579630871775028, -0.12173615769156357,
      0.4144907717943757,  0.4144907717943757,  0.4144907717943757, 0.20724538589718786};
  for (int i = 0; i < 11; ++i) CHECK(sch.s[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("depth closed form") {
  CHECK(trotter_depth(1, 3, 2) == 3);
  CHECK(trotter_depth(2, 3, 2) == 7);
  CHECK(trotter_depth(2, 5, 2) == 11);
  CHECK(trotter_depth(2, 7, 2) == 15);
  CHECK(trotter_depth(3, 3, 2) == 19);
  CHECK(trotter_depth(3, 5, 2) == 51);
  for (int p : {3, 5, 7}) CHECK(trotter_depth(1, p, 4) == 7);
  CHECK_THROWS_AS(trotter_depth(0, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(trotter_depth(1, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(trotter_depth(1, 3, 1), std::invalid_argument);
}

TEST_CASE("sum rule and palindromy for all m<=4, p in {3,5,7}, N_Gamma in {2,3,4}") {
  for (int m = 1; m <= 4; ++m) {
    for (int p : {3, 5, 7}) {
      for (int ng : {2, 3, 4}) {
        const auto sch = suzuki_coefficients(m, p, ng);
        REQUIRE(sch.depth() == trotter_depth(m, p, ng));
        double sum = 0.0;
        for (double v : sch.s) sum += v;
        CHECK(std::abs(sum - double(ng)) < 1e-12);
        const int D = sch.depth();
        for (int i = 0; i < D; ++i) {
          CHECK(std::abs(sch.s[i] - sch.s[D - 1 - i]) < 1e-14);
          CHECK(sch.part_index[i] == sch.part_index[D - 1 - i]);
        }
      }
    }
  }
}

TEST_CASE("apply_trotter: zero dtau, inverse, unitarity") {
  const auto H = heisenberg_ring(6, 1.0);
  const auto sch = suzuki_coefficients(2, 3, 2);
  const State psi = random_normalized(6, 31);
  CHECK(max_diff(apply_trotter(sch, H, 0.0, psi), psi) < 1e-15);
  const State fwd = apply_trotter(sch, H, 0.21, psi);
  CHECK(std::abs(norm(fwd) - 1.0) < 1e-12);
  const State back = apply_trotter(sch, H, -0.21, fwd);
  CHECK(max_diff(back, psi) < 1e-12);

  const auto bad = suzuki_coefficients(1, 3, 4);
  CHECK_THROWS_AS(apply_trotter(bad, H, 0.1, psi), std::invalid_argument);
}

TEST_CASE("order verification: error vs dense exponential ~ dtau^(2m+1)") {
  const auto H = heisenberg_ring(4, 1.0);
  const Eigen::MatrixXcd Hd = ts::dense_hamiltonian(H);
  const State psi = random_normalized(4, 67);
  const Eigen::VectorXcd v = ts::to_eigen(psi);
  const std::vector<double> dtaus = {0.05, 0.07, 0.1, 0.14, 0.2};
  for (const auto& [m, p] : std::vector<std::pair<int, int>>{{1, 3}, {2, 3}, {2, 5}}) {
    const auto sch = suzuki_coefficients(m, p, 2);
    std::vector<double> errs;
    for (double dt : dtaus) {
      const Eigen::MatrixXcd U = (cplx(0, -dt) * Hd).exp();
      const State approx = apply_trotter(sch, H, dt, psi);
      errs.push_back((ts::to_eigen(approx) - U * v).norm());
    }
    const double slope = loglog_slope(dtaus, errs);
    CHECK(slope == doctest::Approx(2 * m + 1).epsilon(0.15 / (2.0 * m + 1)));
  }
}

TEST_CASE("propagator deviation: collapse in (dtau)^2m and p dependence") {
  const auto H = heisenberg_ring(10, 1.0);
  const auto gs = exact_ground_state(H, 1e-10);

  // deltaK(0) = 0 by construction; check first step is small
  {
    const auto sch = suzuki_coefficients(1, 3, 2);
    const auto dev = propagator_deviation(H, sch, 0.1, 3, gs.psi, gs.energy);
    CHECK(std::abs(dev[0]) < 1e-3);
  }

  // Re deltaK(t)/(dtau J)^{2m} collapses across dtau in {0.07, 0.1} on the
  // common grid t = 0.7 k, within 10% pointwise for t J <= 5
  for (const auto& [m, p] : std::vector<std::pair<int, int>>{{1, 3}, {2, 3}}) {
    const auto sch = suzuki_coefficients(m, p, 2);
    const auto dev1 = propagator_deviation(H, sch, 0.07, 71, gs.psi, gs.energy);
    const auto dev2 = propagator_deviation(H, sch, 0.1, 50, gs.psi, gs.energy);
    int checked = 0;
    for (int k = 2; k <= 7; ++k) {  // t = 1.4 .. 4.9
      const double t = 0.7 * k;
      const int l1 = int(std::lround(t / 0.07));
      const int l2 = int(std::lround(t / 0.1));
      const double r1 = dev1[l1 - 1].real() / std::pow(0.07, 2 * m);
      const double r2 = dev2[l2 - 1].real() / std::pow(0.1, 2 * m);
      if (std::abs(r1) < 1e-4) continue;  // skip near-zero crossings
      CHECK(std::abs(r2 - r1) <= 0.1 * std::max(std::abs(r1), std::abs(r2)));
      ++checked;
    }
    CHECK(checked >= 3);
  }

  // increasing p at fixed m=2 reduces |Re deltaK| by >= one order of
  // magnitude at tJ = 5
  {
    const auto p3 = suzuki_coefficients(2, 3, 2);
    const auto p5 = suzuki_coefficients(2, 5, 2);
    const auto d3 = propagator_deviation(H, p3, 0.1, 50, gs.psi, gs.energy);
    const auto d5 = propagator_deviation(H, p5, 0.1, 50, gs.psi, gs.energy);
    CHECK(std::abs(d5[49].real()) * 10.0 <= std::abs(d3[49].real()));
  }
}
