#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace qpm {

using cplx = std::complex<double>;

enum class Axis : std::uint8_t { X, Y, Z };

char axis_char(Axis a);
Axis axis_from_char(char c);

struct PauliOp {
  int qubit = 1;  // 1-based; qubit 1 is the least significant bit
  Axis axis = Axis::Z;
};

// coeff * sigma_{q1} sigma_{q2} ... with strictly increasing qubit indices.
// An empty op list is the identity string.
struct PauliString {
  std::vector<PauliOp> ops;
  cplx coeff{1.0, 0.0};
};

PauliString make_pauli(std::vector<PauliOp> ops, cplx coeff);

// Validates index range and strict ordering; throws std::invalid_argument.
void validate_pauli(const PauliString& p, int n_qubits);

// Two Pauli strings commute iff they collide on an even number of qubits
// (positions where both act with different non-identity axes).
bool pauli_strings_commute(const PauliString& a, const PauliString& b);

// Precomputed action of a Pauli string on basis states:
//   sigma |x> = base * (-1)^popcount(x & phase_mask) |x ^ flip_mask>
// where base folds the coefficient, the i^(#Y) factor and the Y bit signs.
struct CompiledPauli {
  std::uint64_t flip_mask = 0;
  std::uint64_t phase_mask = 0;
  cplx base{1.0, 0.0};
  bool diagonal() const { return flip_mask == 0; }
};

CompiledPauli compile_pauli(const PauliString& p, int n_qubits);

}  // namespace qpm
