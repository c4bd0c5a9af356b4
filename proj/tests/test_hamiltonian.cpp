#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qpm/refstates.hpp"
#include "support/oracles.hpp"

using namespace qpm;
namespace ts = qpm::testing;

namespace {

double max_diff(const State& a, const State& b) {
  double m = 0.0;
  for (std::size_t x = 0; x < a.dim(); ++x) m = std::max(m, std::abs(a.amps[x] - b.amps[x]));
  return m;
}

State random_normalized(int nq, std::uint64_t seed) {
  State s = random_phase_state(nq, seed);
  normalize(s);
  return s;
}

}  // namespace

TEST_CASE("heisenberg construction counts") {
  const auto H = heisenberg_ring(4, 1.0);
  REQUIRE(H.n_parts() == 2);
  CHECK(H.part(0).size() == 8);  // 2 bonds x 4 strings
  CHECK(H.part(1).size() == 8);
  CHECK(H.locality() == 2);
  CHECK_THROWS_AS(heisenberg_ring(5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(heisenberg_ring(2, 1.0), std::invalid_argument);
}

TEST_CASE("part-wise symbolic commutation holds for both models") {
  for (const auto& H : {heisenberg_ring(8, 1.0), hubbard_ladder_4x2(1.0, 4.0)}) {
    for (const auto& part : H.parts())
      for (std::size_t i = 0; i < part.size(); ++i)
        for (std::size_t j = i + 1; j < part.size(); ++j)
          CHECK(pauli_strings_commute(part[i], part[j]));
  }
}

TEST_CASE("sum of parts equals full apply") {
  const auto H = heisenberg_ring(8, 1.0);
  const State psi = random_normalized(8, 1);
  const State full = apply_hamiltonian(H, psi);
  State acc(8);
  for (int g = 0; g < H.n_parts(); ++g) H.apply_part_into(g, psi, acc);
  CHECK(max_diff(full, acc) < 1e-13);
}

TEST_CASE("hermiticity of expectation on random states") {
  const auto H = heisenberg_ring(8, 1.0);
  const State psi = random_normalized(8, 2);
  const cplx v = inner(psi, apply_hamiltonian(H, psi));
  CHECK(std::abs(v.imag()) < 1e-12);
  CHECK(expectation(H, psi) == doctest::Approx(v.real()).epsilon(1e-12));
  State big = psi;
  for (auto& a : big.amps) a *= 2.0;
  CHECK_THROWS_AS(expectation(H, big), std::invalid_argument);
}

TEST_CASE("heisenberg commutes with total Sz") {
  const auto H = heisenberg_ring(8, 1.0);
  const State psi = random_normalized(8, 3);
  std::vector<PauliString> sz;
  for (int q = 1; q <= 8; ++q) sz.push_back(make_pauli({{q, Axis::Z}}, 1.0));
  State zpsi(8);
  for (const auto& p : sz) {
    const auto cp = compile_pauli(p, 8);
    accumulate_pauli_string(cp, psi, zpsi);
  }
  const State hz = apply_hamiltonian(H, zpsi);
  State zh(8);
  {
    const State hpsi = apply_hamiltonian(H, psi);
    for (const auto& p : sz) {
      const auto cp = compile_pauli(p, 8);
      accumulate_pauli_string(cp, hpsi, zh);
    }
  }
  const cplx comm = inner(psi, hz) - inner(psi, zh);
  CHECK(std::abs(comm) < 1e-10);
}

TEST_CASE("small-N ground state matches dense diagonalization") {
  for (int n : {4, 6}) {
    const auto H = heisenberg_ring(n, 1.0);
    const Eigen::MatrixXcd M = ts::dense_hamiltonian(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    const auto res = exact_ground_state(H, 1e-11);
    CHECK(res.energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
    State hp = apply_hamiltonian(H, res.psi);
    double rn = 0.0;
    for (std::size_t x = 0; x < hp.dim(); ++x)
      rn += std::norm(hp.amps[x] - res.energy * res.psi.amps[x]);
    CHECK(std::sqrt(rn) < 1e-8);
  }
}

TEST_CASE("two-qubit heisenberg ground state is the singlet") {
  // single bond, both parts coincide on the same pair: use N=4 part A bond
  // restricted test via the SWAP eigenvalue instead
  std::vector<PauliString> bond;
  bond.push_back(make_pauli({}, 0.5));
  bond.push_back(make_pauli({{1, Axis::X}, {2, Axis::X}}, 0.5));
  bond.push_back(make_pauli({{1, Axis::Y}, {2, Axis::Y}}, 0.5));
  bond.push_back(make_pauli({{1, Axis::Z}, {2, Axis::Z}}, 0.5));
  const Eigen::MatrixXcd P = ts::dense_matrix(bond, 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0).epsilon(1e-12));
  const Eigen::VectorXcd v = es.eigenvectors().col(0);
  CHECK(std::abs(v(0)) < 1e-12);
  CHECK(std::abs(v(3)) < 1e-12);
  CHECK(std::abs(std::abs(v(1)) - std::sqrt(0.5)) < 1e-12);
}

TEST_CASE("jordan-wigner hop matches a dense fermion oracle on a 4-site chain") {
  // spinless 4-site open chain: H = -J sum (c^dag_i c_{i+1} + h.c.)
  // occupation-number oracle with explicit antisymmetric signs
  const int n = 4;
  const double J = 1.0;
  const std::size_t dim = 16;
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(dim, dim);
  auto sign_before = [&](std::size_t occ, int site) {  // site 1-based
    int cnt = 0;
    for (int k = 1; k < site; ++k) cnt += int((occ >> (k - 1)) & 1);
    return (cnt % 2) ? -1.0 : 1.0;
  };
  for (std::size_t occ = 0; occ < dim; ++occ) {
    for (int i = 1; i < n; ++i) {
      const int j = i + 1;
      // c^dag_i c_j
      if (((occ >> (j - 1)) & 1) && !((occ >> (i - 1)) & 1)) {
        const double s1 = sign_before(occ, j);
        const std::size_t mid = occ ^ (1ull << (j - 1));
        const double s2 = sign_before(mid, i);
        F(mid ^ (1ull << (i - 1)), occ) += -J * s1 * s2;
      }
      // c^dag_j c_i
      if (((occ >> (i - 1)) & 1) && !((occ >> (j - 1)) & 1)) {
        const double s1 = sign_before(occ, i);
        const std::size_t mid = occ ^ (1ull << (i - 1));
        const double s2 = sign_before(mid, j);
        F(mid ^ (1ull << (j - 1)), occ) += -J * s1 * s2;
      }
    }
  }
  // JW image built by the library helper: -(J/2)(XX+YY) with Z path
  std::vector<PauliString> jw;
  for (int i = 1; i < n; ++i) {
    jw.push_back(make_pauli({{i, Axis::X}, {i + 1, Axis::X}}, -0.5 * J));
    jw.push_back(make_pauli({{i, Axis::Y}, {i + 1, Axis::Y}}, -0.5 * J));
  }
  const Eigen::MatrixXcd Q = ts::dense_matrix(jw, n);
  CHECK((F - Q).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("hubbard interaction part has 8 ZZ terms with coefficient U/4") {
  const auto H = hubbard_ladder_4x2(1.0, 4.0);
  REQUIRE(H.n_parts() == 4);
  const auto& D = H.part(3);
  REQUIRE(D.size() == 8);
  for (const auto& p : D) {
    CHECK(p.ops.size() == 2);
    CHECK(p.ops[0].axis == Axis::Z);
    CHECK(p.ops[1].axis == Axis::Z);
    CHECK(p.ops[1].qubit == p.ops[0].qubit + 8);
    CHECK(p.coeff.real() == doctest::Approx(1.0));
  }
  // rung hops adjacent (empty JW string), leg hops carry a Z of length 1
  for (const auto& p : H.part(0)) CHECK(p.ops.size() == 2);
  for (const auto& p : H.part(1)) CHECK(p.ops.size() == 3);
  for (const auto& p : H.part(2)) CHECK(p.ops.size() == 3);
}

TEST_CASE("hubbard conserves particle number along Krylov steps") {
  const auto H = hubbard_ladder_4x2(1.0, 4.0);
  State psi = hubbard_reference("zafm1");
  std::vector<PauliString> ntot;  // sum_i (1 - Z_i)/2
  for (int q = 1; q <= 16; ++q) {
    ntot.push_back(make_pauli({}, 0.5));
    ntot.push_back(make_pauli({{q, Axis::Z}}, -0.5));
  }
  auto number = [&](const State& s) {
    State ns(16);
    for (const auto& p : ntot) accumulate_pauli_string(compile_pauli(p, 16), s, ns);
    return std::real(inner(s, ns)) / std::real(inner(s, s));
  };
  CHECK(number(psi) == doctest::Approx(8.0).epsilon(1e-12));
  State k1 = apply_hamiltonian(H, psi);
  CHECK(number(k1) == doctest::Approx(8.0).epsilon(1e-10));
  State k2 = apply_hamiltonian(H, k1);
  CHECK(number(k2) == doctest::Approx(8.0).epsilon(1e-10));
}

TEST_CASE("custom JSON round trip and commutation verification") {
  const auto H = heisenberg_ring(4, 1.0);
  const std::string js = hamiltonian_to_json(H);
  const auto H2 = hamiltonian_from_json(js);
  CHECK(H2.n_qubits() == 4);
  CHECK(H2.n_parts() == 2);
  const State psi = random_normalized(4, 9);
  CHECK(max_diff(apply_hamiltonian(H, psi), apply_hamiltonian(H2, psi)) < 1e-14);

  // a part with non-commuting terms must be rejected
  const std::string bad = R"({"n_qubits": 2, "parts": [[
    {"coeff": 1.0, "ops": [[1, "X"]]},
    {"coeff": 1.0, "ops": [[1, "Z"]]}
  ]]})";
  CHECK_THROWS_AS(hamiltonian_from_json(bad), std::invalid_argument);
}

TEST_CASE("paper energies: heisenberg N=16 and hubbard 4x2"
          * doctest::skip(false)) {
  {
    const auto H = heisenberg_ring(16, 1.0);
    const auto res = exact_ground_state(H, 1e-10);
    CHECK(res.energy / 16.0 == doctest::Approx(-0.196393522).epsilon(5e-8));
    // <phiA|H|phiA>/NJ = -0.125
    const State phiA = heisenberg_reference(16, "phiA");
    CHECK(expectation(H, phiA) / 16.0 == doctest::Approx(-0.125).epsilon(1e-10));
  }
  {
    const auto H = hubbard_ladder_4x2(1.0, 4.0);
    const auto res = exact_ground_state(H, 1e-10);
    CHECK(res.energy / 8.0 == doctest::Approx(-1.626562894).epsilon(5e-8));
  }
}
