#include "qpm/pauli.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace qpm {

char axis_char(Axis a) {
  switch (a) {
    case Axis::X: return 'X';
    case Axis::Y: return 'Y';
    case Axis::Z: return 'Z';
  }
  return '?';
}

Axis axis_from_char(char c) {
  switch (c) {
    case 'X': case 'x': return Axis::X;
    case 'Y': case 'y': return Axis::Y;
    case 'Z': case 'z': return Axis::Z;
  }
  throw std::invalid_argument(std::string("unknown Pauli axis: ") + c);
}

PauliString make_pauli(std::vector<PauliOp> ops, cplx coeff) {
  PauliString p;
  p.ops = std::move(ops);
  p.coeff = coeff;
  return p;
}

void validate_pauli(const PauliString& p, int n_qubits) {
  int prev = 0;
  for (const auto& op : p.ops) {
    if (op.qubit < 1 || op.qubit > n_qubits)
      throw std::invalid_argument("Pauli qubit index " + std::to_string(op.qubit) +
                                  " out of range for " + std::to_string(n_qubits) + " qubits");
    if (op.qubit <= prev)
      throw std::invalid_argument("Pauli qubit indices must be strictly increasing");
    prev = op.qubit;
  }
}

bool pauli_strings_commute(const PauliString& a, const PauliString& b) {
  std::size_t i = 0, j = 0;
  int collisions = 0;
  while (i < a.ops.size() && j < b.ops.size()) {
    if (a.ops[i].qubit < b.ops[j].qubit) {
      ++i;
    } else if (a.ops[i].qubit > b.ops[j].qubit) {
      ++j;
    } else {
      if (a.ops[i].axis != b.ops[j].axis) ++collisions;
      ++i;
      ++j;
    }
  }
  return collisions % 2 == 0;
}

CompiledPauli compile_pauli(const PauliString& p, int n_qubits) {
  validate_pauli(p, n_qubits);
  CompiledPauli cp;
  int n_y = 0;
  for (const auto& op : p.ops) {
    const std::uint64_t bit = std::uint64_t(1) << (op.qubit - 1);
    switch (op.axis) {
      case Axis::X:
        cp.flip_mask |= bit;
        break;
      case Axis::Y:
        cp.flip_mask |= bit;
        cp.phase_mask |= bit;
        ++n_y;
        break;
      case Axis::Z:
        cp.phase_mask |= bit;
        break;
    }
  }
  static const cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  cp.base = p.coeff * i_pow[n_y % 4];
  return cp;
}

}  // namespace qpm
