#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qpm/metrics.hpp"
#include <bit>
#include <tuple>

#include "support/oracles.hpp"

using namespace qpm;
namespace ts = qpm::testing;

namespace {

State random_normalized(int nq, std::uint64_t seed) {
  State s = random_phase_state(nq, seed);
  normalize(s);
  return s;
}

double max_rel_diff(const State& a, const State& b) {
  double m = 0.0, scale = 0.0;
  for (std::size_t x = 0; x < a.dim(); ++x) scale = std::max(scale, std::abs(a.amps[x]));
  for (std::size_t x = 0; x < a.dim(); ++x)
    m = std::max(m, std::abs(a.amps[x] - b.amps[x]));
  return m / std::max(scale, 1e-300);
}

PowerConfig config(int n, double dtau, int r = 0, int m = 1, int p = 3, int ng = 2,
                   Formalism f = Formalism::ProductForm) {
  PowerConfig cfg;
  cfg.n = n;
  cfg.dtau = dtau;
  cfg.r = r;
  cfg.scheme = suzuki_coefficients(m, p, ng);
  cfg.formalism = f;
  return cfg;
}

double sz_expectation(const State& s) {
  State z(s.n_qubits);
  for (int q = 1; q <= s.n_qubits; ++q)
    accumulate_pauli_string(compile_pauli(make_pauli({{q, Axis::Z}}, 1.0), s.n_qubits), s, z);
  return std::real(inner(s, z)) / std::real(inner(s, s));
}

}  // namespace

TEST_CASE("central-difference coefficients") {
  const double dtau = 0.37;
  CHECK(std::abs(cnk(1, 0, dtau) - cplx(0.0, 1.0 / dtau)) < 1e-15);
  CHECK(std::abs(cnk(1, 1, dtau) - cplx(0.0, -1.0 / dtau)) < 1e-15);
  CHECK(std::abs(cnk(2, 1, dtau) - cplx(2.0 / (dtau * dtau), 0.0)) < 1e-14);
  for (int n = 1; n <= 8; ++n) {
    cplx sum{};
    for (int k = 0; k <= n; ++k) sum += cnk(n, k, dtau);
    CHECK(std::abs(sum) < 1e-10 / std::pow(dtau, n));
  }
  CHECK_THROWS_AS(cnk(2, 3, dtau), std::invalid_argument);
  // c_{n,k}(dtau) = (-1)^n c_{n,k}(-dtau) = conj(c_{n,k}(-dtau))
  for (int n : {1, 2, 3}) {
    for (int k = 0; k <= n; ++k) {
      const cplx pos = cnk(n, k, dtau), neg = cnk(n, k, -dtau);
      const double sgn = n % 2 ? -1.0 : 1.0;
      CHECK(std::abs(pos - sgn * neg) < 1e-12 * std::abs(pos));
      CHECK(std::abs(pos - std::conj(neg)) < 1e-12 * std::abs(pos));
    }
  }
}

TEST_CASE("richardson weights") {
  const auto w0 = richardson_weights(0, 2.0);
  REQUIRE(w0.size() == 1);
  CHECK(w0[0] == 1.0);
  const auto w1 = richardson_weights(1, 2.0);
  REQUIRE(w1.size() == 2);
  CHECK(w1[0] == doctest::Approx(-1.0 / 3.0));
  CHECK(w1[1] == doctest::Approx(4.0 / 3.0));
  for (int r : {1, 2, 3}) {
    double sum = 0.0;
    for (double w : richardson_weights(r, 2.0)) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("apply_power: n=0 identity and first-power convergence order") {
  const auto H = heisenberg_ring(4, 1.0);
  const State psi = random_normalized(4, 5);
  const State id = apply_power(config(0, 0.1), H, psi);
  CHECK(max_rel_diff(id, psi) == 0.0);

  const State exact = apply_hamiltonian(H, psi);
  const double scale = norm(exact);
  std::vector<double> dtaus = {0.01, 0.02, 0.04, 0.07, 0.1};
  std::vector<double> errs;
  for (double dt : dtaus) {
    const State approx = apply_power(config(1, dt), H, psi);
    double e2 = 0.0;
    for (std::size_t x = 0; x < psi.dim(); ++x)
      e2 += std::norm(approx.amps[x] - exact.amps[x]);
    errs.push_back(std::sqrt(e2) / scale);
  }
  CHECK(loglog_slope(dtaus, errs) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("law of exponents at r=0 (ProductForm)") {
  const auto H = heisenberg_ring(6, 1.0);
  const State psi = random_normalized(6, 6);
  const double dtau = 0.08;
  for (int n : {2, 3, 8}) {
    const State direct = apply_power(config(n, dtau), H, psi);
    State iter = psi;
    for (int k = 0; k < n; ++k) iter = apply_power(config(1, dtau), H, iter);
    CHECK(max_rel_diff(direct, iter) < 1e-10);
  }
}

TEST_CASE("hermiticity and evenness residuals for both formalisms") {
  const auto H = heisenberg_ring(8, 1.0);
  const State psi = random_normalized(8, 7), phi = random_normalized(8, 8);
  for (int n : {1, 2, 3, 6}) {
    for (int r : {0, 1}) {
      const auto res = hermiticity_check(config(n, 0.1, r), H, psi, phi);
      CHECK(res.hermiticity < 1e-10);
      CHECK(res.evenness < 1e-10);
    }
  }
  for (int n : {1, 2}) {
    const auto res =
        hermiticity_check(config(n, 0.1, 0, 1, 3, 2, Formalism::AlternativeForm), H, psi, phi);
    CHECK(res.hermiticity < 1e-10);
    CHECK(res.evenness < 1e-10);
  }
}

TEST_CASE("asymmetric decomposition violates Hermiticity or evenness") {
  const auto H = heisenberg_ring(8, 1.0);
  const State psi = random_normalized(8, 9), phi = random_normalized(8, 10);
  const double dtau = 0.1;
  // H_E = i [F(dtau) - F(-dtau)] / dtau: even but not Hermitian
  auto h_e = [&](const State& s) {
    const State f1 = ts::apply_asymmetric(H, dtau, s);
    const State f2 = ts::apply_asymmetric(H, -dtau, s);
    State out(s.n_qubits);
    for (std::size_t x = 0; x < s.dim(); ++x)
      out.amps[x] = cplx(0.0, 1.0 / dtau) * (f1.amps[x] - f2.amps[x]);
    return out;
  };
  const double herm = std::abs(inner(phi, h_e(psi)) - std::conj(inner(psi, h_e(phi))));
  CHECK(herm > 1e-4);

  // H_H = i [F(dtau) - F(dtau)^dag] / dtau: Hermitian but not even.
  // F^dag applies the part exponentials in reversed order with negated time.
  auto f_dag = [&](const State& s, double dt) {
    State out = s;
    for (int g = 0; g < H.n_parts(); ++g) H.exp_part_inplace(g, out, -dt);
    return out;
  };
  auto h_h = [&](const State& s, double dt) {
    const State f1 = ts::apply_asymmetric(H, dt, s);
    const State f2 = f_dag(s, dt);
    State out(s.n_qubits);
    for (std::size_t x = 0; x < s.dim(); ++x)
      out.amps[x] = cplx(0.0, 1.0 / dt) * (f1.amps[x] - f2.amps[x]);
    return out;
  };
  const double herm2 =
      std::abs(inner(phi, h_h(psi, dtau)) - std::conj(inner(psi, h_h(phi, dtau))));
  CHECK(herm2 < 1e-10);
  double even = 0.0;
  {
    const State a = h_h(psi, dtau), b = h_h(psi, -dtau);
    even = std::abs(inner(phi, a) - inner(phi, b));
  }
  CHECK(even > 1e-4);
}

TEST_CASE("even powers give nonnegative expectations at r=0") {
  const auto H = heisenberg_ring(6, 1.0);
  const State psi = random_normalized(6, 11);
  for (int n : {2, 4}) {
    const State b = apply_power(config(n, 0.1), H, psi);
    CHECK(std::real(inner(psi, b)) > 0.0);
  }
}

TEST_CASE("richardson: expectation error order and non-factorization") {
  const auto H = heisenberg_ring(6, 1.0);
  const State psi = random_normalized(6, 12);
  const double exact = std::real(inner(psi, apply_hamiltonian(H, psi)));
  std::vector<double> dtaus = {0.05, 0.07, 0.1, 0.14, 0.2};
  std::vector<double> errs;
  for (double dt : dtaus) {
    const State b = apply_power(config(1, dt, 1), H, psi);
    errs.push_back(std::abs(std::real(inner(psi, b)) - exact) / std::abs(exact));
  }
  CHECK(loglog_slope(dtaus, errs) == doctest::Approx(4.0).epsilon(0.05));

  // r >= 1: H^2_ST(r) differs from [H^1_ST(r)]^2 by O(dtau^{2+2r})
  std::vector<double> diffs;
  for (double dt : dtaus) {
    const State two = apply_power(config(2, dt, 1), H, psi);
    State sq = apply_power(config(1, dt, 1), H, psi);
    sq = apply_power(config(1, dt, 1), H, sq);
    double e2 = 0.0;
    for (std::size_t x = 0; x < psi.dim(); ++x) e2 += std::norm(two.amps[x] - sq.amps[x]);
    diffs.push_back(std::sqrt(e2));
  }
  CHECK(loglog_slope(dtaus, diffs) == doctest::Approx(4.0).epsilon(0.08));
}

namespace {

// same Heisenberg ring regrouped by Pauli axis; these parts do not commute
// with total Sz, so symmetry preservation is nontrivial
PartitionedHamiltonian heisenberg_axis_partition(int n, double J) {
  std::vector<PauliString> xs, ys, zs;
  for (int i = 1; i <= n; ++i) {
    const int j = i % n + 1;
    const int a = std::min(i, j), b = std::max(i, j);
    xs.push_back(make_pauli({{a, Axis::X}, {b, Axis::X}}, J / 4.0));
    ys.push_back(make_pauli({{a, Axis::Y}, {b, Axis::Y}}, J / 4.0));
    zs.push_back(make_pauli({{a, Axis::Z}, {b, Axis::Z}}, J / 4.0));
    zs.push_back(make_pauli({}, J / 4.0));
  }
  return PartitionedHamiltonian(n, {xs, ys, zs}, ModelTag::Custom);
}

}  // namespace

TEST_CASE("symmetry preservation: total-Sz drift and [H, H_ST] order") {
  // with the even/odd bond partition every part commutes with total Sz, so
  // a sector eigenstate stays in its sector exactly
  {
    const auto H = heisenberg_ring(6, 1.0);
    State neel(6);
    neel.amps[0b010101] = 1.0;
    const double sz_in = sz_expectation(neel);
    const State b = apply_power(config(2, 0.2), H, neel);
    CHECK(std::abs(sz_expectation(b) - sz_in) < 1e-12);
  }

  // axis-partitioned ring, random Sz = +2 sector input: the sector leakage
  // is O(dtau^{2m+2r}) and the drift it induces is quadratic in the
  // leakage, so the fitted order clears 2m+2r
  const auto Hx = heisenberg_axis_partition(6, 1.0);
  State sector = random_phase_state(6, 21);
  for (std::size_t x = 0; x < sector.dim(); ++x)
    if (std::popcount(x) != 2) sector.amps[x] = 0.0;
  normalize(sector);
  const double sz_in = sz_expectation(sector);
  for (const auto& [m, r, dtaus] : std::vector<std::tuple<int, int, std::vector<double>>>{
           {1, 0, {0.1, 0.14, 0.2, 0.28, 0.4}}, {1, 1, {0.14, 0.2, 0.28, 0.4, 0.55}}}) {
    std::vector<double> drifts;
    for (double dt : dtaus) {
      PowerConfig cfg = config(2, dt, r, m, 3, 3);
      const State b = apply_power(cfg, Hx, sector);
      drifts.push_back(std::abs(sz_expectation(b) - sz_in));
    }
    const double slope = loglog_slope(dtaus, drifts);
    CHECK(slope >= 2 * m + 2 * r - 0.3);
  }

  // the commutator [H, H^1_ST(r)] itself shrinks at order 2m+2r
  const auto H = heisenberg_ring(6, 1.0);
  const State psi = random_normalized(6, 13);
  const State hpsi = apply_hamiltonian(H, psi);
  for (int r : {0, 1}) {
    std::vector<double> dtaus = {0.1, 0.14, 0.2, 0.28, 0.4}, resid;
    for (double dt : dtaus) {
      const State a = apply_hamiltonian(H, apply_power(config(1, dt, r), H, psi));
      const State b = apply_power(config(1, dt, r), H, hpsi);
      double e2 = 0.0;
      for (std::size_t x = 0; x < psi.dim(); ++x) e2 += std::norm(a.amps[x] - b.amps[x]);
      resid.push_back(std::sqrt(e2));
    }
    CHECK(loglog_slope(dtaus, resid) == doctest::Approx(2.0 + 2.0 * r).epsilon(0.1));
  }
}

TEST_CASE("alternative formalism: n=1 identical, constraint, m=2 convergence") {
  const auto H = heisenberg_ring(6, 1.0);
  const State psi = random_normalized(6, 14);
  const double dtau = 0.1;

  const State prod = apply_power(config(1, dtau), H, psi);
  const State alt = apply_power(config(1, dtau, 0, 1, 3, 2, Formalism::AlternativeForm), H, psi);
  CHECK(max_rel_diff(prod, alt) < 1e-12);

  CHECK_THROWS_AS(apply_power(config(3, dtau, 0, 1, 3, 2, Formalism::AlternativeForm), H, psi),
                  std::invalid_argument);

  // n=3 with m=2 converges to <H^3> at O(dtau^2)
  State h3 = psi;
  for (int k = 0; k < 3; ++k) h3 = apply_hamiltonian(H, h3);
  const double mu3 = std::real(inner(psi, h3));
  std::vector<double> dtaus = {0.04, 0.06, 0.08, 0.12}, errs;
  for (double dt : dtaus) {
    const State b = apply_power(config(3, dt, 0, 2, 3, 2, Formalism::AlternativeForm), H, psi);
    errs.push_back(std::abs(std::real(inner(psi, b)) - mu3));
  }
  CHECK(loglog_slope(dtaus, errs) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("alternative formalism: m=1 n=3 limit picks up the 3! R3 residual") {
  const auto H = heisenberg_ring(6, 1.0);
  const State psi = random_normalized(6, 15);
  const auto sch = suzuki_coefficients(1, 3, 2);

  State h3 = psi;
  for (int k = 0; k < 3; ++k) h3 = apply_hamiltonian(H, h3);
  const double mu3 = std::real(inner(psi, h3));

  // R3 = -(1/24) [A,[A,B]] + (1/12) [B,[B,A]], parts A = 0, B = 1
  auto part = [&](int g, const State& s) { return ts::apply_part(H, g, s); };
  auto nested = [&](int u, int v, const State& s) {
    // [u,[u,v]] s = uuv - 2 uvu + vuu applied to s
    const State uuv = part(u, part(u, part(v, s)));
    const State uvu = part(u, part(v, part(u, s)));
    const State vuu = part(v, part(u, part(u, s)));
    State out(s.n_qubits);
    for (std::size_t x = 0; x < s.dim(); ++x)
      out.amps[x] = uuv.amps[x] - 2.0 * uvu.amps[x] + vuu.amps[x];
    return out;
  };
  const double r3 = std::real(inner(psi, nested(0, 1, psi))) * (-1.0 / 24.0) +
                    std::real(inner(psi, nested(1, 0, psi))) * (1.0 / 12.0);
  const double target = mu3 + 6.0 * r3;

  // the constrained applier rejects 2m < n, so expand the sum directly
  std::vector<double> dtaus = {0.04, 0.06, 0.08, 0.1}, vals;
  for (double dt : dtaus) {
    std::vector<State> terms;
    for (int k = 0; k <= 3; ++k) terms.push_back(apply_trotter(sch, H, (1.5 - k) * dt, psi));
    std::vector<std::pair<cplx, const State*>> lc;
    for (int k = 0; k <= 3; ++k) lc.emplace_back(cnk(3, k, dt), &terms[k]);
    const State b = linear_combine(lc);
    vals.push_back(std::real(inner(psi, b)));
  }
  const auto fit = polyfit_even_powers(dtaus, vals, {2});
  CHECK(fit.coeff[0] == doctest::Approx(target).epsilon(0.005));
  CHECK(std::abs(fit.coeff[0] - mu3) > 10.0 * std::abs(fit.coeff[0] - target));
}

TEST_CASE("lcu success probability") {
  const auto H = heisenberg_ring(4, 1.0);
  const auto sch = suzuki_coefficients(1, 3, 2);
  const double dtau = 0.3;

  // eigenstate of S(dtau/2): P = sin(lambda)^{2n}
  const Eigen::MatrixXcd S = ts::dense_trotter(sch, H, 0.5 * dtau);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(S);
  const Eigen::VectorXcd v = es.eigenvectors().col(3).normalized();
  const double lambda = std::arg(es.eigenvalues()(3));
  const State psi = ts::from_eigen(v, 4);
  for (int n : {1, 2}) {
    const double p = lcu_success_probability(H, sch, dtau, n, psi);
    CHECK(p == doctest::Approx(std::pow(std::sin(lambda), 2 * n)).epsilon(1e-9));
  }

  const State r = random_normalized(6, 16);
  const auto H6 = heisenberg_ring(6, 1.0);
  CHECK(lcu_success_probability(H6, sch, 0.0, 2, r) == 0.0);

  // binomial-expansion oracle at n=2
  {
    const int n = 2;
    std::vector<State> ladder(4 * n + 1);  // [S(dtau/2)]^j r, j = -2n..2n
    ladder[2 * n] = r;
    State cur = r;
    for (int j = 1; j <= 2 * n; ++j) {
      cur = apply_trotter(sch, H6, 0.5 * dtau, cur);
      ladder[2 * n + j] = cur;
    }
    cur = r;
    for (int j = 1; j <= 2 * n; ++j) {
      cur = apply_trotter(sch, H6, -0.5 * dtau, cur);
      ladder[2 * n - j] = cur;
    }
    cplx acc{};
    for (int k = 0; k <= 2 * n; ++k) {
      double c = 1.0;
      for (int i = 1; i <= k; ++i) c *= double(2 * n - k + i) / double(i);
      const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
      acc += sgn * c * inner(r, ladder[2 * n + (2 * n - 2 * k)]);
    }
    const double oracle = std::real(acc) / std::pow(4.0, n) * ((n % 2 == 0) ? 1.0 : -1.0);
    const double p = lcu_success_probability(H6, sch, dtau, n, r);
    CHECK(p == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("cancellation flag stays quiet at moderate dtau, raises when pathological") {
  const auto H = heisenberg_ring(8, 1.0);
  const State psi = random_normalized(8, 17);
  CancellationInfo ok;
  apply_power(config(20, 0.05), H, psi, &ok);
  CHECK_FALSE(ok.flagged);
  CHECK(ok.digits_lost < 10.0);

  CancellationInfo bad;
  apply_power(config(4, 1e-10), H, psi, &bad);
  CHECK(bad.flagged);
}
