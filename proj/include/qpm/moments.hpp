#pragma once

#include <vector>

#include "qpm/qpower.hpp"

namespace qpm {

// K_l = <psi|[S(dtau/2)]^l|psi>, i.e. the propagator on the grid t = l dtau/2,
// together with the branch-corrected continuous phase arg K anchored at
// Phi(0) = 0. K(-t) follows by conjugation.
struct PropagatorSeries {
  double dtau = 0.0;
  std::vector<cplx> values;          // l = 0..L
  std::vector<double> phase;         // unwrapped arg K_l
  bool unwrap_ambiguous = false;     // some |delta arg| exceeded pi/2
};

PropagatorSeries propagator_series(const PartitionedHamiltonian& H, const TrotterScheme& scheme,
                                   double dtau, int L, const State& psi);

enum class MomentProvenance { FiniteDifference, ExactSparse };

struct MomentSet {
  std::vector<double> mu;     // mu_0 = 1
  std::vector<double> kappa;  // kappa_0 = 0
  MomentProvenance provenance = MomentProvenance::FiniteDifference;
};

// Central-difference moment mu_n from the propagator series; Richardson
// order r requires series.size() == r+1 with series[l] at dtau/h^l.
double moments_from_propagator(const std::vector<PropagatorSeries>& series, int n, int r,
                               double h = 2.0);

// Central-difference cumulant kappa_n from Phi = ln|K| + i arg K.
double cumulants_from_propagator(const std::vector<PropagatorSeries>& series, int n, int r,
                                 double h = 2.0);

// Exact mutually inverse conversions with binomial weights; arrays start at
// index 0 with mu_0 = 1, kappa_0 = 0.
std::vector<double> cumulants_from_moments(const std::vector<double>& mu);
std::vector<double> moments_from_cumulants(const std::vector<double>& kappa);

// mu_n = <psi|H^n|psi> by repeated sparse apply; the in-repo oracle path.
std::vector<double> exact_sparse_moments(const PartitionedHamiltonian& H, const State& psi,
                                         int n_max);

// E_{n_max}(tau) = sum_{n=0}^{n_max-1} (-tau)^n kappa_{n+1} / n!.
std::vector<double> cmx_energy(const std::vector<double>& kappa, int n_max,
                               const std::vector<double>& tau_grid);

// Classical reference E(tau) = <H e^{-tau H}> / <e^{-tau H}> by dense
// imaginary-time propagation with a renormalized Taylor stepper.
std::vector<double> exact_ite_energy(const PartitionedHamiltonian& H, const State& psi,
                                     const std::vector<double>& tau_grid);

struct LanczosCoefficients {
  std::vector<double> alpha;  // alpha_1..alpha_n
  std::vector<double> beta;   // beta_1..beta_{n-1}
};

// alpha_i, beta_i from Hankel determinant ratios with O(n^2) rank-1 inverse
// updates; throws NumericalBreakdown (with the failing index in the message)
// when positivity of the Hankel ratio is lost.
LanczosCoefficients lanczos_from_moments(const std::vector<double>& mu);

}  // namespace qpm
