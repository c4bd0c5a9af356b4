#pragma once

#include <optional>
#include <vector>

#include "qpm/trotter.hpp"

namespace qpm {

enum class Formalism { ProductForm, AlternativeForm };

// H^n_ST(r)(dtau): central-finite-difference Hamiltonian power built from
// symmetric Suzuki-Trotter evolutions, with r-th order Richardson
// extrapolation (ratio h, default 2).
struct PowerConfig {
  int n = 1;
  double dtau = 0.1;
  int r = 0;
  double h = 2.0;
  TrotterScheme scheme;
  Formalism formalism = Formalism::ProductForm;
};

// Conditioning report for an approximated power application. digits_lost
// estimates the decimal digits cancelled while forming the result;
// flagged is set once the estimate reaches 10 digits.
struct CancellationInfo {
  double digits_lost = 0.0;
  bool flagged = false;

  void absorb(const CancellationInfo& other) {
    digits_lost = std::max(digits_lost, other.digits_lost);
    flagged = flagged || other.flagged;
  }
};

// c_{n,k} = (i^n / dtau^n) (-1)^k binom(n,k).
cplx cnk(int n, int k, double dtau);

// Weights w_l with H^n_ST(r)(dtau) = sum_l w_l H^n_ST(0)(dtau / h^l).
std::vector<double> richardson_weights(int r, double h);

// Applies the approximated Hamiltonian power to a state.
//
// ProductForm evaluates the law-of-exponents form [i/dtau (S(dtau/2) -
// S(-dtau/2))]^n iteratively, which is algebraically identical to the
// ladder linear combination sum_k c_{n,k} [S(dtau/2)]^{n-2k} but does not
// amplify the binomial cancellation; the remaining cancellation per step is
// tracked in `info`. AlternativeForm evaluates
// sum_k c_{n,k} S_2m^(p)((n/2-k) dtau) and requires 2m >= n.
State apply_power(const PowerConfig& cfg, const PartitionedHamiltonian& H,
                  const State& psi, CancellationInfo* info = nullptr);

// |<phi|X psi> - conj(<psi|X phi>)| and |<phi|X(dtau) psi> - <phi|X(-dtau) psi>|
// for X = H^n_ST(r).
struct HermiticityResidual {
  double hermiticity = 0.0;
  double evenness = 0.0;
};
HermiticityResidual hermiticity_check(const PowerConfig& cfg, const PartitionedHamiltonian& H,
                                      const State& psi, const State& phi);

// P_{11..1} = (-1)^n / 4^n <psi| [S(dtau/2) - S(-dtau/2)]^{2n} |psi>
//           = (dtau/2)^{2n} || H^n_ST psi ||^2  for a normalized psi.
double lcu_success_probability(const PartitionedHamiltonian& H, const TrotterScheme& scheme,
                               double dtau, int n, const State& psi);

// Cross overlaps G[l](j; k,k') = <q_k | [S(dtau/(2 h^l))]^j | q_k'> for
// j = 0..max_power, shared by the direct-scheme Krylov matrices, the moment
// estimators and the LCU probability. Negative powers follow from
// G(-j; k,k') = conj(G(j; k',k)).
class LadderOverlaps {
 public:
  LadderOverlaps(const PartitionedHamiltonian& H, const TrotterScheme& scheme, double dtau,
                 int max_power, int r, double h, const std::vector<State>& refs);

  cplx overlap(int level, int power, int k, int kprime) const;
  int max_power() const { return max_power_; }
  int levels() const { return int(table_.size()); }

  // <q_k| H^n_ST(r) |q_k'>: sum_k c_{n,k} G(n-2k) per Richardson level,
  // then the level combination with richardson_weights. Tracks scalar
  // cancellation.
  cplx power_overlap(int n, int r, int k, int kprime,
                     CancellationInfo* info = nullptr) const;

 private:
  int max_power_;
  int n_refs_;
  double dtau_;
  double h_;
  // table_[level][power * n_refs^2 + k * n_refs + k']
  std::vector<std::vector<cplx>> table_;
};

}  // namespace qpm
