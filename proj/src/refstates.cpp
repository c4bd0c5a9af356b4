#include "qpm/refstates.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qpm {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;

// product of single-qubit factors f_q(bit); f[q-1][b] is the amplitude of
// bit value b at qubit q
State product_state(int n_qubits, const std::vector<std::array<cplx, 2>>& f) {
  State s(n_qubits);
  for (std::size_t x = 0; x < s.dim(); ++x) {
    cplx a{1.0, 0.0};
    for (int q = 0; q < n_qubits; ++q) {
      a *= f[q][(x >> q) & 1];
      if (a == cplx{}) break;
    }
    s.amps[x] = a;
  }
  return s;
}

// pair_amp(b_i, b_j) on each listed (i, j) pair, product over pairs
State paired_state(int n_qubits, const std::vector<std::pair<int, int>>& pairs,
                   const std::array<cplx, 4>& pair_amp) {
  State s(n_qubits);
  for (std::size_t x = 0; x < s.dim(); ++x) {
    cplx a{1.0, 0.0};
    for (const auto& [i, j] : pairs) {
      const int bi = int((x >> (i - 1)) & 1);
      const int bj = int((x >> (j - 1)) & 1);
      a *= pair_amp[bi * 2 + bj];
      if (a == cplx{}) break;
    }
    s.amps[x] = a;
  }
  return s;
}

const std::array<cplx, 4> singlet_amp = {cplx{0.0, 0.0}, cplx{inv_sqrt2, 0.0},
                                         cplx{-inv_sqrt2, 0.0}, cplx{0.0, 0.0}};
const std::array<cplx, 4> triplet_amp = {cplx{0.0, 0.0}, cplx{inv_sqrt2, 0.0},
                                         cplx{inv_sqrt2, 0.0}, cplx{0.0, 0.0}};

const std::array<cplx, 2> ket_plus = {cplx{inv_sqrt2, 0.0}, cplx{inv_sqrt2, 0.0}};
const std::array<cplx, 2> ket_minus = {cplx{inv_sqrt2, 0.0}, cplx{-inv_sqrt2, 0.0}};
const std::array<cplx, 2> ket_right = {cplx{inv_sqrt2, 0.0}, cplx{0.0, inv_sqrt2}};
const std::array<cplx, 2> ket_left = {cplx{inv_sqrt2, 0.0}, cplx{0.0, -inv_sqrt2}};
const std::array<cplx, 2> ket_zero = {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
const std::array<cplx, 2> ket_one = {cplx{0.0, 0.0}, cplx{1.0, 0.0}};

std::vector<std::pair<int, int>> even_bonds(int n) {
  std::vector<std::pair<int, int>> v;
  for (int i = 1; i <= n / 2; ++i) v.emplace_back(2 * i, 2 * i % n + 1);
  return v;
}

std::vector<std::pair<int, int>> odd_bonds(int n) {
  std::vector<std::pair<int, int>> v;
  for (int i = 1; i <= n / 2; ++i) v.emplace_back(2 * i - 1, 2 * i);
  return v;
}

// single-qubit pattern a on odd qubits, b on even qubits
State alternating(int n, const std::array<cplx, 2>& odd_ket, const std::array<cplx, 2>& even_ket) {
  std::vector<std::array<cplx, 2>> f(n);
  for (int q = 1; q <= n; ++q) f[q - 1] = (q % 2 == 1) ? odd_ket : even_ket;
  return product_state(n, f);
}

}  // namespace

State heisenberg_reference(int n_qubits, const std::string& label) {
  if (n_qubits % 2 != 0) throw std::invalid_argument("heisenberg references need even N");
  const int n = n_qubits;
  if (label == "phiA") {
    // singlets on the even bonds, keeping the (2i, 2i+1) orientation of the
    // wrap bond (N, 1)
    return paired_state(n, even_bonds(n), singlet_amp);
  }
  if (label == "phiB") return paired_state(n, odd_bonds(n), singlet_amp);
  if (label == "xafm1") return alternating(n, ket_plus, ket_minus);
  if (label == "xafm2") return alternating(n, ket_minus, ket_plus);
  if (label == "yafm1") return alternating(n, ket_right, ket_left);
  if (label == "yafm2") return alternating(n, ket_left, ket_right);
  if (label == "zafm1") return alternating(n, ket_zero, ket_one);
  if (label == "zafm2") return alternating(n, ket_one, ket_zero);
  throw std::invalid_argument("unknown Heisenberg reference label: " + label);
}

ReferenceSet heisenberg_references(int n_qubits) {
  ReferenceSet rs;
  for (const char* lbl : {"phiA", "phiB", "xafm1", "xafm2", "yafm1", "yafm2", "zafm1", "zafm2"}) {
    rs.states.push_back(heisenberg_reference(n_qubits, lbl));
    rs.labels.emplace_back(lbl);
  }
  return rs;
}

State hubbard_reference(const std::string& label) {
  const int n = 16;
  if (label == "phiA") {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= n / 2; ++i) pairs.emplace_back(2 * i - 1, 2 * i);
    return paired_state(n, pairs, triplet_amp);
  }
  if (label == "zafm1" || label == "zafm2") {
    const bool first = label == "zafm1";
    std::vector<std::array<cplx, 2>> f(n);
    for (int i = 1; i <= n / 4; ++i) {
      f[2 * i - 2] = first ? ket_zero : ket_one;          // up register, odd site
      f[2 * i - 1] = first ? ket_one : ket_zero;          // up register, even site
      f[2 * i - 2 + n / 2] = first ? ket_one : ket_zero;  // down register, odd site
      f[2 * i - 1 + n / 2] = first ? ket_zero : ket_one;  // down register, even site
    }
    return product_state(n, f);
  }
  throw std::invalid_argument("unknown Hubbard reference label: " + label);
}

ReferenceSet hubbard_references() {
  ReferenceSet rs;
  for (const char* lbl : {"phiA", "zafm1", "zafm2"}) {
    rs.states.push_back(hubbard_reference(lbl));
    rs.labels.emplace_back(lbl);
  }
  return rs;
}

State hubbard_u0_ground_state(double J) {
  const auto H = hubbard_ladder_4x2(J, 0.0);
  // start vector confined to the half-filled Sz=0 sector: 4 occupied qubits
  // in each spin register
  State start(16);
  std::uint64_t lcg = 0x243f6a8885a308d3ULL;
  for (std::size_t x = 0; x < start.dim(); ++x) {
    const int n_up = std::popcount(std::uint64_t(x) & 0xffULL);
    const int n_dn = std::popcount(std::uint64_t(x) & 0xff00ULL);
    if (n_up == 4 && n_dn == 4) {
      lcg = lcg * 6364136223846793005ULL + 1442695040888963407ULL;
      start.amps[x] = double(lcg >> 11) * (1.0 / 9007199254740992.0) - 0.5;
    }
  }
  normalize(start);
  auto res = exact_ground_state(H, 1e-12, 7, &start);

  // degeneracy probe: a second sector start must reproduce the same ray
  State start2 = start;
  for (std::size_t x = 0; x < start2.dim(); ++x)
    if (start2.amps[x] != cplx{}) {
      lcg = lcg * 6364136223846793005ULL + 1442695040888963407ULL;
      start2.amps[x] += cplx(double(lcg >> 11) * (1.0 / 9007199254740992.0) - 0.5);
    }
  normalize(start2);
  auto res2 = exact_ground_state(H, 1e-12, 7, &start2);
  if (std::abs(std::abs(inner(res.psi, res2.psi)) - 1.0) > 1e-6)
    throw NumericalBreakdown(
        "hubbard_u0_ground_state: sector ground state appears degenerate; "
        "fidelity against it is basis dependent");
  return res.psi;
}

State load_state(const std::string& path, double* input_norm) {
  State s = load_state_raw(path);
  const double n = norm(s);
  if (input_norm) *input_norm = n;
  if (n == 0.0) throw std::runtime_error("load_state: zero-norm state in " + path);
  normalize(s);
  return s;
}

}  // namespace qpm
