#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qpm/pauli.hpp"

namespace qpm {

// Dense complex statevector over n_qubits. Basis index convention: bit k of
// the index encodes qubit k+1, so qubit 1 is the least significant bit.
struct State {
  int n_qubits = 0;
  std::vector<cplx> amps;

  State() = default;
  explicit State(int nq) : n_qubits(nq), amps(std::size_t(1) << nq) {}

  std::size_t dim() const { return amps.size(); }
};

State zero_state(int n_qubits);

// amplitudes e^{i phi(x)}, phi uniform on [0, 2pi); <phi|phi> = 2^N exactly.
// Phases come from mt19937_64 with the 53-bit mantissa mapping, so the same
// seed reproduces the state bit for bit.
State random_phase_state(int n_qubits, std::uint64_t seed);

double norm(const State& s);
void normalize(State& s);

// <a|b> with conjugation on a.
cplx inner(const State& a, const State& b);

State apply_pauli_string(const State& s, const PauliString& p);
void accumulate_pauli_string(const CompiledPauli& cp, const State& in, State& out);

// sum_i coeff_i |psi_i>, pairwise-summed per amplitude.
State linear_combine(const std::vector<std::pair<cplx, const State*>>& terms);

// Applies exp(-i * angle * H_gamma) exactly for a group of mutually commuting
// Pauli strings with real coefficients: the exponential factorizes into
// single-string rotations exp(-i * angle * c * sigma) = cos(angle*c)
// - i sin(angle*c) sigma, each applied pairwise in place.
State apply_group_exponential(const State& s, const std::vector<PauliString>& group,
                              double angle);
void apply_group_exponential_inplace(State& s, const std::vector<CompiledPauli>& group,
                                     const std::vector<double>& coeffs, double angle);

// Non-unitary imaginary-time variant: applies exp(-theta * H_gamma) via
// cosh/sinh factors. Used by the imaginary-time Krylov comparison.
void apply_group_exponential_imag_inplace(State& s, const std::vector<CompiledPauli>& group,
                                          const std::vector<double>& coeffs, double theta);

// QPSV state file: magic "QPSV", u8 version=1, u32 LE n_qubits, then 2^N
// little-endian (f64 re, f64 im) records in basis-index order.
void save_state(const State& s, const std::string& path);
State load_state_raw(const std::string& path);

// Cyclic qubit-label shift: qubit q of the input becomes qubit q+shift (mod N).
State translate_state(const State& s, int shift);

}  // namespace qpm
