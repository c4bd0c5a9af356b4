#include "qpm/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "json.hpp"

namespace qpm {

namespace {

PauliString two_site(int i, int j, Axis a, double coeff) {
  if (i > j) std::swap(i, j);
  return make_pauli({{i, a}, {j, a}}, coeff);
}

// -(J/2)(X_a X_b + Y_a Y_b) Z_{a+1}..Z_{b-1}, the JW image of
// -J (c^dag_a c_b + h.c.) for a < b.
void append_jw_hop(std::vector<PauliString>& out, int a, int b, double J) {
  if (a > b) std::swap(a, b);
  for (Axis ax : {Axis::X, Axis::Y}) {
    PauliString p;
    p.coeff = -0.5 * J;
    p.ops.push_back({a, ax});
    for (int k = a + 1; k < b; ++k) p.ops.push_back({k, Axis::Z});
    p.ops.push_back({b, ax});
    std::sort(p.ops.begin(), p.ops.end(),
              [](const PauliOp& l, const PauliOp& r) { return l.qubit < r.qubit; });
    out.push_back(std::move(p));
  }
}

void check_part_commutes(const std::vector<PauliString>& part, int n_qubits, int g) {
  for (std::size_t i = 0; i < part.size(); ++i)
    for (std::size_t j = i + 1; j < part.size(); ++j)
      if (!pauli_strings_commute(part[i], part[j]))
        throw std::invalid_argument("Hamiltonian part " + std::to_string(g) +
                                    ": terms " + std::to_string(i) + " and " +
                                    std::to_string(j) + " do not commute");
  (void)n_qubits;
}

}  // namespace

PartitionedHamiltonian::PartitionedHamiltonian(int n_qubits,
                                               std::vector<std::vector<PauliString>> parts,
                                               ModelTag tag)
    : n_qubits_(n_qubits), tag_(tag), parts_(std::move(parts)) {
  if (n_qubits_ < 1 || n_qubits_ > 30)
    throw std::invalid_argument("PartitionedHamiltonian: n_qubits out of range");
  if (parts_.empty()) throw std::invalid_argument("PartitionedHamiltonian: no parts");
  compiled_.resize(parts_.size());
  coeffs_.resize(parts_.size());
  for (std::size_t g = 0; g < parts_.size(); ++g) {
    check_part_commutes(parts_[g], n_qubits_, int(g));
    for (const auto& p : parts_[g]) {
      validate_pauli(p, n_qubits_);
      if (std::abs(p.coeff.imag()) > 1e-14)
        throw std::invalid_argument("PartitionedHamiltonian: complex coefficient");
      locality_ = std::max(locality_, int(p.ops.size()));
      PauliString unit = p;
      unit.coeff = 1.0;
      compiled_[g].push_back(compile_pauli(unit, n_qubits_));
      coeffs_[g].push_back(p.coeff.real());
    }
  }
  if (n_qubits_ <= 12) {
    // cross-check the symbolic commutation rule on a random state
    const State psi = random_phase_state(n_qubits_, 0x9e3779b97f4a7c15ULL);
    for (std::size_t g = 0; g < parts_.size(); ++g) {
      for (std::size_t i = 0; i < parts_[g].size(); ++i) {
        for (std::size_t j = i + 1; j < parts_[g].size(); ++j) {
          State ab = apply_pauli_string(apply_pauli_string(psi, parts_[g][j]), parts_[g][i]);
          State ba = apply_pauli_string(apply_pauli_string(psi, parts_[g][i]), parts_[g][j]);
          double dev = 0.0;
          for (std::size_t x = 0; x < psi.dim(); ++x)
            dev = std::max(dev, std::abs(ab.amps[x] - ba.amps[x]));
          if (dev > 1e-10 * norm(psi))
            throw std::logic_error("commuting-group verification failed");
        }
      }
    }
  }
}

void PartitionedHamiltonian::apply_part_into(int g, const State& in, State& out) const {
  const auto& cps = compiled_[g];
  const auto& cs = coeffs_[g];
  for (std::size_t t = 0; t < cps.size(); ++t) {
    CompiledPauli cp = cps[t];
    cp.base *= cs[t];
    accumulate_pauli_string(cp, in, out);
  }
}

void PartitionedHamiltonian::exp_part_inplace(int g, State& s, double angle) const {
  apply_group_exponential_inplace(s, compiled_[g], coeffs_[g], angle);
}

void PartitionedHamiltonian::exp_part_imag_inplace(int g, State& s, double theta) const {
  apply_group_exponential_imag_inplace(s, compiled_[g], coeffs_[g], theta);
}

PartitionedHamiltonian heisenberg_ring(int n_qubits, double J) {
  if (n_qubits < 4 || n_qubits % 2 != 0)
    throw std::invalid_argument("heisenberg_ring: n_qubits must be even and >= 4");
  const double c = J / 4.0;
  auto bond = [&](std::vector<PauliString>& part, int i, int j) {
    if (i > j) std::swap(i, j);
    part.push_back(make_pauli({}, c));  // identity term of the SWAP convention
    part.push_back(two_site(i, j, Axis::X, c));
    part.push_back(two_site(i, j, Axis::Y, c));
    part.push_back(two_site(i, j, Axis::Z, c));
  };
  std::vector<PauliString> even, odd;
  for (int i = 1; i <= n_qubits / 2; ++i) {
    bond(even, 2 * i, 2 * i % n_qubits + 1);  // (2i, 2i+1) with periodic wrap
    bond(odd, 2 * i - 1, 2 * i);
  }
  return PartitionedHamiltonian(n_qubits, {even, odd}, ModelTag::HeisenbergRing);
}

PartitionedHamiltonian hubbard_ladder_4x2(double J, double U_H) {
  const int nq = 16;
  const int n_sites = 8;
  // column-major sites: rungs are adjacent pairs, leg bonds skip one index
  const std::vector<std::pair<int, int>> rungs = {{1, 2}, {3, 4}, {5, 6}, {7, 8}};
  const std::vector<std::pair<int, int>> odd_legs = {{1, 3}, {2, 4}, {5, 7}, {6, 8}};
  const std::vector<std::pair<int, int>> even_legs = {{3, 5}, {4, 6}};
  std::vector<PauliString> A, B, C, D;
  for (int off : {0, n_sites}) {
    for (auto [a, b] : rungs) append_jw_hop(A, a + off, b + off, J);
    for (auto [a, b] : odd_legs) append_jw_hop(B, a + off, b + off, J);
    for (auto [a, b] : even_legs) append_jw_hop(C, a + off, b + off, J);
  }
  for (int i = 1; i <= n_sites; ++i) {
    PauliString p;
    p.coeff = 0.25 * U_H;
    p.ops = {{i, Axis::Z}, {i + n_sites, Axis::Z}};
    D.push_back(std::move(p));
  }
  return PartitionedHamiltonian(nq, {A, B, C, D}, ModelTag::HubbardLadder4x2);
}

PartitionedHamiltonian hamiltonian_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  const int nq = j.at("n_qubits").get<int>();
  std::vector<std::vector<PauliString>> parts;
  for (const auto& jpart : j.at("parts")) {
    std::vector<PauliString> part;
    for (const auto& jterm : jpart) {
      PauliString p;
      p.coeff = jterm.at("coeff").get<double>();
      for (const auto& jop : jterm.at("ops")) {
        const int q = jop.at(0).get<int>();
        const std::string a = jop.at(1).get<std::string>();
        if (a.size() != 1) throw std::invalid_argument("bad axis in JSON term");
        p.ops.push_back({q, axis_from_char(a[0])});
      }
      std::sort(p.ops.begin(), p.ops.end(),
                [](const PauliOp& l, const PauliOp& r) { return l.qubit < r.qubit; });
      part.push_back(std::move(p));
    }
    parts.push_back(std::move(part));
  }
  return PartitionedHamiltonian(nq, std::move(parts), ModelTag::Custom);
}

std::string hamiltonian_to_json(const PartitionedHamiltonian& H) {
  nlohmann::json j;
  j["n_qubits"] = H.n_qubits();
  auto& jparts = j["parts"] = nlohmann::json::array();
  for (const auto& part : H.parts()) {
    nlohmann::json jpart = nlohmann::json::array();
    for (const auto& p : part) {
      nlohmann::json jterm;
      jterm["coeff"] = p.coeff.real();
      auto& jops = jterm["ops"] = nlohmann::json::array();
      for (const auto& op : p.ops)
        jops.push_back({op.qubit, std::string(1, axis_char(op.axis))});
      jpart.push_back(std::move(jterm));
    }
    jparts.push_back(std::move(jpart));
  }
  return j.dump();
}

State apply_hamiltonian(const PartitionedHamiltonian& H, const State& s) {
  if (s.n_qubits != H.n_qubits())
    throw std::invalid_argument("apply_hamiltonian: dimension mismatch");
  State out(s.n_qubits);
  for (int g = 0; g < H.n_parts(); ++g) H.apply_part_into(g, s, out);
  return out;
}

double expectation(const PartitionedHamiltonian& H, const State& s) {
  const double n = norm(s);
  if (std::abs(n - 1.0) > 1e-8)
    throw std::invalid_argument("expectation: state is not normalized");
  const cplx v = inner(s, apply_hamiltonian(H, s));
  if (std::abs(v.imag()) > 1e-10)
    throw NumericalBreakdown("expectation: imaginary part above tolerance");
  return v.real();
}

GroundStateResult exact_ground_state(const PartitionedHamiltonian& H, double tol,
                                     std::uint64_t seed, const State* sector_start) {
  const int nq = H.n_qubits();
  if (nq > 24) throw std::invalid_argument("exact_ground_state: n_qubits > 24");

  State q1(nq);
  if (sector_start) {
    q1 = *sector_start;
  } else {
    std::mt19937_64 gen(seed);
    constexpr double scale = 1.0 / 9007199254740992.0;
    for (auto& a : q1.amps) a = double(gen() >> 11) * scale - 0.5;
  }
  normalize(q1);

  const int max_iter = std::min<std::size_t>(400, q1.dim());
  std::vector<State> basis;
  basis.reserve(max_iter);
  basis.push_back(q1);
  std::vector<double> alpha, beta;
  double prev_e = 1e300;
  double h_scale = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  int it = 0;

  auto tridiag = [&](int k) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    return T;
  };

  for (it = 0; it < max_iter; ++it) {
    State w = apply_hamiltonian(H, basis[it]);
    const cplx a = inner(basis[it], w);
    alpha.push_back(a.real());
    // full reorthogonalization, two passes
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const cplx ov = inner(b, w);
        for (std::size_t x = 0; x < w.dim(); ++x) w.amps[x] -= ov * b.amps[x];
      }
    }
    const double b = norm(w);
    h_scale = std::max({h_scale, std::abs(alpha.back()), b});

    es.compute(tridiag(it + 1));
    const double e = es.eigenvalues()(0);
    const double resid = (it > 0) ? b * std::abs(es.eigenvectors()(it, 0)) : b;
    if (resid <= tol * std::max(h_scale, 1e-300) ||
        (it > 5 && std::abs(e - prev_e) < 1e-15 * std::max(1.0, std::abs(e)) && b < 1e-12)) {
      prev_e = e;
      break;
    }
    prev_e = e;
    if (b < 1e-14 * h_scale) break;  // invariant subspace found
    for (auto& x : w.amps) x /= b;
    beta.push_back(b);
    basis.push_back(std::move(w));
  }

  const int k = int(alpha.size());
  es.compute(tridiag(k));
  GroundStateResult res;
  res.energy = es.eigenvalues()(0);
  res.iterations = k;
  res.psi = State(nq);
  for (int i = 0; i < k; ++i) {
    const double vi = es.eigenvectors()(i, 0);
    for (std::size_t x = 0; x < res.psi.dim(); ++x) res.psi.amps[x] += vi * basis[i].amps[x];
  }
  normalize(res.psi);

  // deterministic phase: largest-|amplitude| entry real positive
  std::size_t imax = 0;
  double amax = 0.0;
  for (std::size_t x = 0; x < res.psi.dim(); ++x) {
    const double m = std::abs(res.psi.amps[x]);
    if (m > amax) { amax = m; imax = x; }
  }
  const cplx ph = res.psi.amps[imax] / amax;
  for (auto& a : res.psi.amps) a /= ph;

  State hp = apply_hamiltonian(H, res.psi);
  double rn = 0.0;
  for (std::size_t x = 0; x < hp.dim(); ++x)
    rn += std::norm(hp.amps[x] - res.energy * res.psi.amps[x]);
  if (std::sqrt(rn) > std::max(10.0 * tol, 1e-7) * std::max(h_scale, 1.0))
    throw NumericalBreakdown("exact_ground_state: Lanczos did not converge");
  return res;
}

}  // namespace qpm
