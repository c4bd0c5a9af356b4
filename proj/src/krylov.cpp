#include "qpm/krylov.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace qpm {

namespace {

void fix_phase(Eigen::VectorXcd& v) {
  int imax = 0;
  double amax = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > amax) { amax = m; imax = i; }
  }
  if (amax <= 0.0) return;
  const cplx ph = v(imax) / amax;
  v /= ph;
}

Eigen::MatrixXcd principal(const Eigen::MatrixXcd& M, int d) { return M.topLeftCorner(d, d); }

}  // namespace

SubspaceSolution solve_subspace(const Eigen::MatrixXcd& Hm, const Eigen::MatrixXcd& Sm,
                                double s_cut) {
  const int d = int(Sm.rows());
  if (Hm.rows() != d || Hm.cols() != d || Sm.cols() != d)
    throw std::invalid_argument("solve_subspace: shape mismatch");
  if (s_cut <= 0.0 || s_cut >= 1.0)
    throw std::invalid_argument("solve_subspace: s_cut must be in (0,1)");

  // equilibration delta = diag(1/sqrt(S_ii))
  Eigen::VectorXd delta(d);
  for (int i = 0; i < d; ++i) {
    const double sii = Sm(i, i).real();
    if (!(sii > 0.0))
      throw NumericalBreakdown("solve_subspace: nonpositive overlap diagonal");
    delta(i) = 1.0 / std::sqrt(sii);
  }
  const Eigen::MatrixXcd Seq = delta.asDiagonal() * Sm * delta.asDiagonal();
  const Eigen::MatrixXcd Heq = delta.asDiagonal() * Hm * delta.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (Seq + Seq.adjoint()));
  const Eigen::VectorXd s = es.eigenvalues();
  const double s_max = s(d - 1);
  if (!(s_max > 0.0)) throw NumericalBreakdown("solve_subspace: overlap matrix not positive");
  if (s(0) < -1e-10)
    throw NumericalBreakdown("solve_subspace: overlap matrix indefinite beyond tolerance");
  const double s_min_clamped = std::max(s(0), 0.0);
  const double cond = s_min_clamped > 0.0 ? s_max / s_min_clamped
                                          : std::numeric_limits<double>::infinity();

  const double cut = s_cut * s_max;
  int first_kept = 0;
  while (first_kept < d && s(first_kept) < cut) ++first_kept;
  const int kept = d - first_kept;
  if (kept == 0) throw NumericalBreakdown("solve_subspace: all overlap eigenvalues filtered");

  Eigen::MatrixXcd W(d, kept);
  for (int j = 0; j < kept; ++j)
    W.col(j) = es.eigenvectors().col(first_kept + j) / std::sqrt(s(first_kept + j));

  const Eigen::MatrixXcd T = W.adjoint() * Heq * W;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> et(0.5 * (T + T.adjoint()));

  SubspaceSolution sol;
  sol.e_ks = et.eigenvalues()(0);
  sol.cond_s = cond;
  sol.kept_dim = kept;
  Eigen::VectorXcd v = W * et.eigenvectors().col(0);
  v = delta.asDiagonal() * v;  // undo equilibration
  fix_phase(v);
  sol.v = std::move(v);
  return sol;
}

std::vector<State> build_basis(const ReferenceSet& refs, int n_max, const PowerConfig& tpl,
                               const PartitionedHamiltonian& H, CancellationInfo* info) {
  std::vector<State> basis;
  basis.reserve(std::size_t(n_max) * refs.states.size());
  for (int l = 1; l <= n_max; ++l) {
    for (const auto& q : refs.states) {
      if (l == 1) {
        basis.push_back(q);
        continue;
      }
      PowerConfig cfg = tpl;
      cfg.n = l - 1;
      basis.push_back(apply_power(cfg, H, q, info));
    }
  }
  return basis;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> subspace_matrices_variational(
    const std::vector<State>& basis, const PartitionedHamiltonian& H) {
  const int d = int(basis.size());
  Eigen::MatrixXcd Hm(d, d), Sm(d, d);
  for (int j = 0; j < d; ++j) {
    const State hj = apply_hamiltonian(H, basis[j]);
    for (int i = 0; i < d; ++i) {
      Hm(i, j) = inner(basis[i], hj);
      Sm(i, j) = inner(basis[i], basis[j]);
    }
  }
  // symmetrize away round-off
  Hm = 0.5 * (Hm + Hm.adjoint()).eval();
  Sm = 0.5 * (Sm + Sm.adjoint()).eval();
  return {Hm, Sm};
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> subspace_matrices_direct(
    const ReferenceSet& refs, int n_max, const PowerConfig& tpl,
    const PartitionedHamiltonian& H, CancellationInfo* info) {
  const int mb = refs.block_size();
  const int d = n_max * mb;
  const LadderOverlaps lad(H, tpl.scheme, tpl.dtau, 2 * n_max - 1, tpl.r, tpl.h, refs.states);
  Eigen::MatrixXcd Hm(d, d), Sm(d, d);
  for (int l = 1; l <= n_max; ++l) {
    for (int lp = 1; lp <= n_max; ++lp) {
      for (int k = 0; k < mb; ++k) {
        for (int kp = 0; kp < mb; ++kp) {
          const int i = k + (l - 1) * mb;
          const int j = kp + (lp - 1) * mb;
          Hm(i, j) = lad.power_overlap(l + lp - 1, tpl.r, k, kp, info);
          Sm(i, j) = lad.power_overlap(l + lp - 2, tpl.r, k, kp, info);
        }
      }
    }
  }
  Hm = 0.5 * (Hm + Hm.adjoint()).eval();
  Sm = 0.5 * (Sm + Sm.adjoint()).eval();
  return {Hm, Sm};
}

double krylov_fidelity(const Eigen::VectorXcd& v, const std::vector<State>& basis,
                       const State& psi0) {
  if (v.size() != Eigen::Index(basis.size()))
    throw std::invalid_argument("krylov_fidelity: dimension mismatch");
  std::vector<std::pair<cplx, const State*>> lc;
  for (int i = 0; i < v.size(); ++i) lc.emplace_back(v(i), &basis[i]);
  State psi_ks = linear_combine(lc);
  normalize(psi_ks);
  return std::norm(inner(psi0, psi_ks));
}

KrylovResult krylov_run(const PartitionedHamiltonian& H, const ReferenceSet& refs,
                        const KrylovOptions& opt, const State* psi0) {
  if (opt.n_max * refs.block_size() > 512)
    throw std::invalid_argument("krylov_run: n_max * M_B exceeds the dense-solver budget");
  KrylovResult out;
  const bool need_states = (opt.scheme == MatrixScheme::Variational) || psi0 != nullptr;
  std::vector<State> basis;
  Eigen::MatrixXcd Hm, Sm;
  if (need_states) basis = build_basis(refs, opt.n_max, opt.power, H, &out.cancellation);
  if (opt.scheme == MatrixScheme::Variational) {
    std::tie(Hm, Sm) = subspace_matrices_variational(basis, H);
  } else {
    std::tie(Hm, Sm) = subspace_matrices_direct(refs, opt.n_max, opt.power, H,
                                                &out.cancellation);
  }
  const int mb = refs.block_size();
  for (int n = 1; n <= opt.n_max; ++n) {
    const int d = n * mb;
    const auto sol = solve_subspace(principal(Hm, d), principal(Sm, d), opt.s_cut);
    KrylovPoint pt;
    pt.n = n;
    pt.e_ks = sol.e_ks;
    pt.cond_s = sol.cond_s;
    pt.kept_dim = sol.kept_dim;
    if (psi0 != nullptr) {
      std::vector<State> sub(basis.begin(), basis.begin() + d);
      pt.fidelity = krylov_fidelity(sol.v, sub, *psi0);
    }
    out.trace.push_back(pt);
  }
  return out;
}

DtauFit dtau_sweep_and_fit(const PartitionedHamiltonian& H, const ReferenceSet& refs,
                           const KrylovOptions& opt, const std::vector<double>& dtau_list,
                           int fit_order) {
  if (fit_order < 1) throw std::invalid_argument("dtau_sweep_and_fit: fit_order >= 1");
  DtauFit out;
  for (double dtau : dtau_list) {
    KrylovOptions o = opt;
    o.power.dtau = dtau;
    const auto res = krylov_run(H, refs, o);
    out.e_ks.push_back(res.trace.back().e_ks);
  }
  std::vector<int> orders;
  for (int k = 1; k <= fit_order; ++k) orders.push_back(2 * k);
  out.fit = polyfit_even_powers(dtau_list, out.e_ks, orders);
  out.e_extrapolated = out.fit.coeff[0];
  out.stderr_e = out.fit.stderrs[0];
  return out;
}

std::vector<ComparisonPoint> comparison_subspaces(const PartitionedHamiltonian& H,
                                                  const State& ref, int n_max, double dtau,
                                                  ComparisonKind kind,
                                                  const TrotterScheme& scheme, int r,
                                                  double s_cut) {
  // basis states normalized after construction; E_KS is invariant under
  // that rescaling (equilibration identity)
  std::vector<State> basis;
  basis.reserve(n_max);
  State cur = ref;
  normalize(cur);
  basis.push_back(cur);
  for (int l = 1; l < n_max; ++l) {
    switch (kind) {
      case ComparisonKind::ITE: {
        // advance imaginary time by 2 dtau with two S2-type substeps,
        // renormalizing after each to avoid underflow
        State next = basis.back();
        for (int sub = 0; sub < 2; ++sub) {
          for (int i = scheme.depth() - 1; i >= 0; --i)
            H.exp_part_imag_inplace(scheme.part_index[i], next, dtau * scheme.s[i]);
          normalize(next);
        }
        basis.push_back(std::move(next));
        break;
      }
      case ComparisonKind::RTE: {
        State next = apply_trotter(scheme, H, dtau, basis.back());
        normalize(next);
        basis.push_back(std::move(next));
        break;
      }
      case ComparisonKind::QPM: {
        PowerConfig cfg;
        cfg.n = l;
        cfg.dtau = dtau;
        cfg.r = r;
        cfg.scheme = scheme;
        State next = apply_power(cfg, H, ref);
        normalize(next);
        basis.push_back(std::move(next));
        break;
      }
    }
  }
  auto [Hm, Sm] = subspace_matrices_variational(basis, H);
  std::vector<ComparisonPoint> out;
  for (int n = 1; n <= n_max; ++n) {
    ComparisonPoint pt;
    pt.n = n;
    const auto sol = solve_subspace(principal(Hm, n), principal(Sm, n), s_cut);
    pt.e_ks = sol.e_ks;
    pt.cond_s = sol.cond_s;
    if (sol.cond_s > 1e13) {
      pt.truncated = true;
      out.push_back(pt);
      break;
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace qpm
