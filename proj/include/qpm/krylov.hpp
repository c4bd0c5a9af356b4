#pragma once

#include <Eigen/Dense>

#include "qpm/metrics.hpp"
#include "qpm/qpower.hpp"
#include "qpm/refstates.hpp"

namespace qpm {

enum class MatrixScheme { Variational, Direct };

struct KrylovOptions {
  int n_max = 8;
  PowerConfig power;  // n is a template field; l-1 is substituted per basis state
  MatrixScheme scheme = MatrixScheme::Variational;
  double s_cut = 1e-12;
};

struct SubspaceSolution {
  double e_ks = 0.0;
  Eigen::VectorXcd v;  // back-transformed, deterministic phase
  double cond_s = 0.0;
  int kept_dim = 0;
};

// Equilibrate by diag(1/sqrt(S_ii)), eigendecompose S, filter relative
// singular values below s_cut, solve the reduced standard problem, and
// back-transform. cond_s is reported pre-filter on the equilibrated matrix.
SubspaceSolution solve_subspace(const Eigen::MatrixXcd& Hm, const Eigen::MatrixXcd& Sm,
                                double s_cut);

// u_{k + (l-1) M_B} = H^{l-1}_ST(r) |q_k>, l = 1..n_max.
std::vector<State> build_basis(const ReferenceSet& refs, int n_max, const PowerConfig& tpl,
                               const PartitionedHamiltonian& H,
                               CancellationInfo* info = nullptr);

// H_ij = <u_i|H|u_j>, S_ij = <u_i|u_j> on explicitly built basis states.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> subspace_matrices_variational(
    const std::vector<State>& basis, const PartitionedHamiltonian& H);

// H'_ij = <q_k|H^{l+l'-1}_ST(r)|q_k'>, S'_ij = <q_k|H^{l+l'-2}_ST(r)|q_k'>
// assembled from ladder overlaps.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> subspace_matrices_direct(
    const ReferenceSet& refs, int n_max, const PowerConfig& tpl,
    const PartitionedHamiltonian& H, CancellationInfo* info = nullptr);

// |<psi0 | sum_i v_i u_i>|^2 with the subspace state normalized.
double krylov_fidelity(const Eigen::VectorXcd& v, const std::vector<State>& basis,
                       const State& psi0);

struct KrylovPoint {
  int n = 0;
  double e_ks = 0.0;
  double fidelity = -1.0;  // -1 when no exact state was supplied
  double cond_s = 0.0;
  int kept_dim = 0;
};

struct KrylovResult {
  std::vector<KrylovPoint> trace;  // n = 1..n_max
  CancellationInfo cancellation;
};

// Runs the full per-n convergence trace. psi0 (when given) enables the
// fidelity column; it requires the Variational basis states, which are
// built in either scheme for that purpose.
KrylovResult krylov_run(const PartitionedHamiltonian& H, const ReferenceSet& refs,
                        const KrylovOptions& opt, const State* psi0 = nullptr);

struct DtauFit {
  PolyFit fit;
  double e_extrapolated = 0.0;
  double stderr_e = 0.0;
  std::vector<double> e_ks;  // per dtau, at the requested n
};

// E_KS(dtau) at fixed (M_B, n), least-squares fit in even powers of dtau up
// to 2*fit_order, extrapolated to dtau = 0.
DtauFit dtau_sweep_and_fit(const PartitionedHamiltonian& H, const ReferenceSet& refs,
                           const KrylovOptions& opt, const std::vector<double>& dtau_list,
                           int fit_order);

enum class ComparisonKind { ITE, RTE, QPM };

struct ComparisonPoint {
  int n = 0;
  double e_ks = 0.0;
  double cond_s = 0.0;
  bool truncated = false;  // cond(S) exceeded 1e13; trace stops here
};

// Krylov subspaces from ITE / RTE / approximated powers with a single
// reference, S2-type decompositions throughout, normalized basis states.
std::vector<ComparisonPoint> comparison_subspaces(const PartitionedHamiltonian& H,
                                                  const State& ref, int n_max, double dtau,
                                                  ComparisonKind kind,
                                                  const TrotterScheme& scheme, int r = 0,
                                                  double s_cut = 1e-12);

}  // namespace qpm
