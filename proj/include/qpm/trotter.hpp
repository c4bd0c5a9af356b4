#pragma once

#include <vector>

#include "qpm/hamiltonian.hpp"

namespace qpm {

// Symmetric Suzuki-Trotter scheme S_2m^(p): a palindromic product of
// D = 2(N_Gamma - 1) p^(m-1) + 1 exponentials exp(-i dtau s_i H_{gamma_i}),
// stored fully contracted (adjacent commuting exponentials merged).
struct TrotterScheme {
  int m = 1;
  int p = 3;
  int n_gamma = 2;
  std::vector<double> s;        // coefficient per exponential
  std::vector<int> part_index;  // 0-based part per exponential, ABC..Z..CBA pattern
  int depth() const { return int(s.size()); }
};

int trotter_depth(int m, int p, int n_gamma);

// Recursive construction: base case m=1 is the S_2 palindrome, the step
// m-1 -> m uses k_m^(p) = [(p-1) - (p-1)^(1/(2m-1))]^(-1), ktilde = 1-(p-1)k,
// contracting the adjacent commuting exponentials between consecutive blocks.
TrotterScheme suzuki_coefficients(int m, int p, int n_gamma);

// Applies prod_i exp(-i dtau s_i H_{part(i)}) right to left.
void apply_trotter_inplace(const TrotterScheme& sch, const PartitionedHamiltonian& H,
                           double dtau, State& psi);
State apply_trotter(const TrotterScheme& sch, const PartitionedHamiltonian& H,
                    double dtau, const State& psi);

// delta K(l dtau) = <psi0|[S(dtau)]^l|psi0> - e^{-i E0 l dtau}, l = 1..steps.
std::vector<cplx> propagator_deviation(const PartitionedHamiltonian& H,
                                       const TrotterScheme& sch, double dtau, int steps,
                                       const State& psi0, double E0);

}  // namespace qpm
