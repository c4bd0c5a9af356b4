#pragma once

#include <string>
#include <vector>

#include "qpm/state.hpp"

namespace qpm {

// Thrown when a numerical invariant breaks down (maps to CLI exit code 2).
struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ModelTag { HeisenbergRing, HubbardLadder4x2, Custom };

// Pauli-sum Hamiltonian split into internally commuting groups. All
// coefficients are real; commutation within each part is verified on
// construction by the symbolic Pauli rule (and cross-checked on random
// states for n_qubits <= 12).
class PartitionedHamiltonian {
 public:
  PartitionedHamiltonian(int n_qubits, std::vector<std::vector<PauliString>> parts,
                         ModelTag tag);

  int n_qubits() const { return n_qubits_; }
  ModelTag tag() const { return tag_; }
  int n_parts() const { return int(parts_.size()); }
  int locality() const { return locality_; }
  const std::vector<std::vector<PauliString>>& parts() const { return parts_; }
  const std::vector<PauliString>& part(int g) const { return parts_.at(g); }

  // compiled unit strings and real coefficients, grouped per part
  const std::vector<CompiledPauli>& compiled_part(int g) const { return compiled_[g]; }
  const std::vector<double>& part_coeffs(int g) const { return coeffs_[g]; }

  void apply_part_into(int g, const State& in, State& out) const;   // out += H_g in
  void exp_part_inplace(int g, State& s, double angle) const;       // e^{-i angle H_g}
  void exp_part_imag_inplace(int g, State& s, double theta) const;  // e^{-theta H_g}

 private:
  int n_qubits_;
  ModelTag tag_;
  int locality_ = 0;
  std::vector<std::vector<PauliString>> parts_;
  std::vector<std::vector<CompiledPauli>> compiled_;
  std::vector<std::vector<double>> coeffs_;
};

// H = (J/4) sum_<i,i+1> (II + XX + YY + ZZ) = (J/2) sum P_{i,i+1} on the
// periodic ring; identity terms kept, so the spectrum is shifted by +J*N/4
// relative to the bare Heisenberg model. Two parts: even bonds (2i,2i+1)
// and odd bonds (2i-1,2i).
PartitionedHamiltonian heisenberg_ring(int n_qubits, double J);

// Jordan-Wigner mapped Fermi-Hubbard model on the 4x2 open ladder
// (16 qubits). Sites are numbered column-major so that each rung is the
// adjacent pair (2j-1, 2j); spin-up occupies qubits 1..8 and spin-down
// qubits 9..16 (site s maps to qubits s and s+8). Four parts: rung hops,
// odd-leg hops, even-leg hops, on-site interactions (U_H/4) Z_i Z_{i+8}.
PartitionedHamiltonian hubbard_ladder_4x2(double J, double U_H);

// { "n_qubits": int, "parts": [ [ {"coeff": f, "ops": [[q,"X"],...]}, ...] ] }
PartitionedHamiltonian hamiltonian_from_json(const std::string& json_text);
std::string hamiltonian_to_json(const PartitionedHamiltonian& H);

State apply_hamiltonian(const PartitionedHamiltonian& H, const State& s);

// Re <psi|H|psi>; requires a normalized state and asserts the imaginary
// part is below 1e-10.
double expectation(const PartitionedHamiltonian& H, const State& s);

struct GroundStateResult {
  double energy = 0.0;
  State psi;
  int iterations = 0;
};

// Classical Lanczos with full reorthogonalization on the 2^N space.
// Deterministic given the seed of the start vector. When `sector_start`
// is supplied it is used as the (already sector-projected) start vector.
GroundStateResult exact_ground_state(const PartitionedHamiltonian& H, double tol,
                                     std::uint64_t seed = 7,
                                     const State* sector_start = nullptr);

}  // namespace qpm
