#include "qpm/state.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qpm {

namespace {

inline int parity(std::uint64_t v) { return std::popcount(v) & 1; }

inline cplx pair_sum(const std::vector<std::pair<cplx, const State*>>& terms,
                     std::size_t lo, std::size_t hi, std::size_t x) {
  if (hi - lo == 1) return terms[lo].first * terms[lo].second->amps[x];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pair_sum(terms, lo, mid, x) + pair_sum(terms, mid, hi, x);
}

}  // namespace

State zero_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 30)
    throw std::invalid_argument("zero_state: n_qubits must be in 1..30");
  State s(n_qubits);
  s.amps[0] = 1.0;
  return s;
}

State random_phase_state(int n_qubits, std::uint64_t seed) {
  State s(n_qubits);
  std::mt19937_64 gen(seed);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  for (auto& a : s.amps) {
    const double u = double(gen() >> 11) * scale;
    a = std::polar(1.0, two_pi * u);
  }
  return s;
}

double norm(const State& s) {
  double acc = 0.0;
  for (const auto& a : s.amps) acc += std::norm(a);
  return std::sqrt(acc);
}

void normalize(State& s) {
  const double n = norm(s);
  if (n == 0.0) throw std::runtime_error("normalize: zero state");
  const double inv = 1.0 / n;
  for (auto& a : s.amps) a *= inv;
}

cplx inner(const State& a, const State& b) {
  if (a.n_qubits != b.n_qubits)
    throw std::invalid_argument("inner: dimension mismatch");
  cplx acc{0.0, 0.0};
  for (std::size_t x = 0; x < a.dim(); ++x) acc += std::conj(a.amps[x]) * b.amps[x];
  return acc;
}

State apply_pauli_string(const State& s, const PauliString& p) {
  const CompiledPauli cp = compile_pauli(p, s.n_qubits);
  State out(s.n_qubits);
  for (std::size_t x = 0; x < s.dim(); ++x) {
    const std::size_t y = x ^ cp.flip_mask;
    const double sign = parity(y & cp.phase_mask) ? -1.0 : 1.0;
    out.amps[x] = cp.base * sign * s.amps[y];
  }
  return out;
}

void accumulate_pauli_string(const CompiledPauli& cp, const State& in, State& out) {
  for (std::size_t x = 0; x < in.dim(); ++x) {
    const std::size_t y = x ^ cp.flip_mask;
    const double sign = parity(y & cp.phase_mask) ? -1.0 : 1.0;
    out.amps[x] += cp.base * sign * in.amps[y];
  }
}

State linear_combine(const std::vector<std::pair<cplx, const State*>>& terms) {
  if (terms.empty()) throw std::invalid_argument("linear_combine: no terms");
  const int nq = terms.front().second->n_qubits;
  for (const auto& [c, st] : terms)
    if (st->n_qubits != nq) throw std::invalid_argument("linear_combine: dimension mismatch");
  State out(nq);
  for (std::size_t x = 0; x < out.dim(); ++x)
    out.amps[x] = pair_sum(terms, 0, terms.size(), x);
  return out;
}

namespace {

// exp(-i a sigma) with sigma^2 = I: cos(a) I - i sin(a) sigma, pairwise in place.
void rotate_by_string(State& s, const CompiledPauli& cp, double a) {
  const double c = std::cos(a);
  const cplx mis{0.0, -std::sin(a)};
  if (cp.diagonal()) {
    // base is +-1 here (real string); fold it into the sign per basis state.
    const double b = cp.base.real();
    const cplx ph_even = c + mis * b;
    const cplx ph_odd = c - mis * b;
    for (std::size_t x = 0; x < s.dim(); ++x)
      s.amps[x] *= parity(x & cp.phase_mask) ? ph_odd : ph_even;
    return;
  }
  for (std::size_t x = 0; x < s.dim(); ++x) {
    const std::size_t y = x ^ cp.flip_mask;
    if (y < x) continue;
    const double sx = parity(x & cp.phase_mask) ? -1.0 : 1.0;
    const double sy = parity(y & cp.phase_mask) ? -1.0 : 1.0;
    const cplx ax = s.amps[x], ay = s.amps[y];
    s.amps[x] = c * ax + mis * cp.base * sy * ay;
    s.amps[y] = c * ay + mis * cp.base * sx * ax;
  }
}

// exp(-a sigma): cosh(a) I - sinh(a) sigma.
void stretch_by_string(State& s, const CompiledPauli& cp, double a) {
  const double ch = std::cosh(a);
  const double sh = std::sinh(a);
  if (cp.diagonal()) {
    const double b = cp.base.real();
    const double f_even = ch - sh * b;
    const double f_odd = ch + sh * b;
    for (std::size_t x = 0; x < s.dim(); ++x)
      s.amps[x] *= parity(x & cp.phase_mask) ? f_odd : f_even;
    return;
  }
  for (std::size_t x = 0; x < s.dim(); ++x) {
    const std::size_t y = x ^ cp.flip_mask;
    if (y < x) continue;
    const double sx = parity(x & cp.phase_mask) ? -1.0 : 1.0;
    const double sy = parity(y & cp.phase_mask) ? -1.0 : 1.0;
    const cplx ax = s.amps[x], ay = s.amps[y];
    s.amps[x] = ch * ax - sh * cp.base * sy * ay;
    s.amps[y] = ch * ay - sh * cp.base * sx * ax;
  }
}

}  // namespace

void apply_group_exponential_inplace(State& s, const std::vector<CompiledPauli>& group,
                                     const std::vector<double>& coeffs, double angle) {
  for (std::size_t t = 0; t < group.size(); ++t) {
    const auto& cp = group[t];
    if (cp.flip_mask == 0 && cp.phase_mask == 0) {
      // identity term: global phase
      const cplx ph = std::polar(1.0, -angle * coeffs[t]);
      for (auto& a : s.amps) a *= ph;
      continue;
    }
    rotate_by_string(s, cp, angle * coeffs[t]);
  }
}

void apply_group_exponential_imag_inplace(State& s, const std::vector<CompiledPauli>& group,
                                          const std::vector<double>& coeffs, double theta) {
  for (std::size_t t = 0; t < group.size(); ++t) {
    const auto& cp = group[t];
    if (cp.flip_mask == 0 && cp.phase_mask == 0) {
      const double f = std::exp(-theta * coeffs[t]);
      for (auto& a : s.amps) a *= f;
      continue;
    }
    stretch_by_string(s, cp, theta * coeffs[t]);
  }
}

State apply_group_exponential(const State& s, const std::vector<PauliString>& group,
                              double angle) {
  std::vector<CompiledPauli> cps;
  std::vector<double> coeffs;
  cps.reserve(group.size());
  coeffs.reserve(group.size());
  for (const auto& p : group) {
    if (std::abs(p.coeff.imag()) > 1e-14)
      throw std::invalid_argument("apply_group_exponential: coefficients must be real");
    PauliString unit = p;
    unit.coeff = 1.0;
    cps.push_back(compile_pauli(unit, s.n_qubits));
    coeffs.push_back(p.coeff.real());
  }
  State out = s;
  apply_group_exponential_inplace(out, cps, coeffs, angle);
  return out;
}

void save_state(const State& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_state: cannot open " + path);
  f.write("QPSV", 4);
  const char version = 1;
  f.write(&version, 1);
  const std::uint32_t nq = std::uint32_t(s.n_qubits);
  f.write(reinterpret_cast<const char*>(&nq), 4);
  f.write(reinterpret_cast<const char*>(s.amps.data()),
          std::streamsize(s.amps.size() * sizeof(cplx)));
  if (!f) throw std::runtime_error("save_state: write failed for " + path);
}

State load_state_raw(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_state: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "QPSV", 4) != 0)
    throw std::runtime_error("load_state: bad magic in " + path);
  char version = 0;
  f.read(&version, 1);
  if (!f || version != 1)
    throw std::runtime_error("load_state: unsupported QPSV version in " + path);
  std::uint32_t nq = 0;
  f.read(reinterpret_cast<char*>(&nq), 4);
  if (!f || nq < 1 || nq > 30)
    throw std::runtime_error("load_state: bad qubit count in " + path);
  State s(static_cast<int>(nq));
  f.read(reinterpret_cast<char*>(s.amps.data()),
         std::streamsize(s.amps.size() * sizeof(cplx)));
  if (!f) throw std::runtime_error("load_state: truncated amplitude block in " + path);
  return s;
}

State translate_state(const State& s, int shift) {
  const int n = s.n_qubits;
  int k = ((shift % n) + n) % n;
  if (k == 0) return s;
  State out(n);
  const std::size_t mask = s.dim() - 1;
  for (std::size_t x = 0; x < s.dim(); ++x) {
    const std::size_t y = ((x << k) | (x >> (n - k))) & mask;
    out.amps[y] = s.amps[x];
  }
  return out;
}

}  // namespace qpm
