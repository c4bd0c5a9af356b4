#pragma once

#include <string>
#include <vector>

#include "qpm/hamiltonian.hpp"

namespace qpm {

struct ReferenceSet {
  std::vector<State> states;  // normalized
  std::vector<std::string> labels;
  int block_size() const { return int(states.size()); }
};

// The eight Heisenberg product references: singlet coverings of the even
// (phiA) and odd (phiB) bonds plus the X/Y/Z Neel states with both
// sublattice offsets.
ReferenceSet heisenberg_references(int n_qubits);
State heisenberg_reference(int n_qubits, const std::string& label);

// Hubbard 4x2 references: the rung bonding-pair product phiA and the two
// Z Neel occupation states, all in the half-filled Sz = 0 sector.
ReferenceSet hubbard_references();
State hubbard_reference(const std::string& label);

// Exact ground state of hubbard_ladder_4x2(J, 0) in the half-filled Sz = 0
// sector. Flags (throws NumericalBreakdown) if the sector ground state is
// degenerate within 1e-8.
State hubbard_u0_ground_state(double J);

// QPSV load with validation; normalizes the state and reports (via the
// optional out-parameter) the input norm so callers can warn when it
// deviates from one by more than 1e-6.
State load_state(const std::string& path, double* input_norm = nullptr);

}  // namespace qpm
