#include "qpm/moments.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qpm {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v *= double(n - k + i) / double(i);
  return v;
}

// Phi(l dtau/2) from the series; negative l by conjugation.
cplx phi_at(const PropagatorSeries& s, int l) {
  const int a = std::abs(l);
  const cplx v{std::log(std::abs(s.values[a])), s.phase[a]};
  return l >= 0 ? v : std::conj(v);
}

cplx k_at(const PropagatorSeries& s, int l) {
  const int a = std::abs(l);
  return l >= 0 ? s.values[a] : std::conj(s.values[a]);
}

// sum_i c_{n,i} F((n/2-i) dtau): pairs (i, n-i) are complex conjugates, so
// the sum is assembled as 2 Re(term) plus the real center term; this is the
// odd/even central-difference split in one form.
template <typename F>
double central_difference(const PropagatorSeries& s, int n, F&& value) {
  if (int(s.values.size()) <= n)
    throw std::invalid_argument("central difference: series shorter than the power");
  double acc = 0.0;
  for (int i = 0; i * 2 < n; ++i) {
    const cplx c = cnk(n, i, s.dtau);
    acc += 2.0 * std::real(c * value(s, n - 2 * i));
  }
  if (n % 2 == 0) acc += std::real(cnk(n, n / 2, s.dtau) * value(s, 0));
  return acc;
}

double richardson_scalar(const std::vector<PropagatorSeries>& series, int n, int r, double h,
                         double (*eval)(const PropagatorSeries&, int)) {
  if (int(series.size()) < r + 1)
    throw std::invalid_argument("moments: Richardson order exceeds available series");
  const auto w = richardson_weights(r, h);
  double acc = 0.0;
  for (int l = 0; l <= r; ++l) acc += w[l] * eval(series[l], n);
  return acc;
}

double mu_eval(const PropagatorSeries& s, int n) { return central_difference(s, n, k_at); }
double kappa_eval(const PropagatorSeries& s, int n) { return central_difference(s, n, phi_at); }

}  // namespace

PropagatorSeries propagator_series(const PartitionedHamiltonian& H, const TrotterScheme& scheme,
                                   double dtau, int L, const State& psi) {
  if (std::abs(norm(psi) - 1.0) > 1e-8)
    throw std::invalid_argument("propagator_series: state must be normalized");
  PropagatorSeries out;
  out.dtau = dtau;
  out.values.reserve(L + 1);
  out.phase.reserve(L + 1);
  out.values.push_back({1.0, 0.0});
  out.phase.push_back(0.0);
  State cur = psi;
  for (int l = 1; l <= L; ++l) {
    apply_trotter_inplace(scheme, H, 0.5 * dtau, cur);
    const cplx K = inner(psi, cur);
    const double step = std::arg(K * std::conj(out.values.back()));
    if (std::abs(step) > 0.5 * std::numbers::pi) out.unwrap_ambiguous = true;
    out.phase.push_back(out.phase.back() + step);
    out.values.push_back(K);
  }
  return out;
}

double moments_from_propagator(const std::vector<PropagatorSeries>& series, int n, int r,
                               double h) {
  return richardson_scalar(series, n, r, h, &mu_eval);
}

double cumulants_from_propagator(const std::vector<PropagatorSeries>& series, int n, int r,
                                 double h) {
  for (const auto& s : series)
    if (s.unwrap_ambiguous)
      throw NumericalBreakdown("cumulants_from_propagator: phase unwrap ambiguous "
                               "(some |delta arg| exceeded pi/2)");
  return richardson_scalar(series, n, r, h, &kappa_eval);
}

std::vector<double> cumulants_from_moments(const std::vector<double>& mu) {
  if (mu.empty() || std::abs(mu[0] - 1.0) > 1e-12)
    throw std::invalid_argument("cumulants_from_moments: mu_0 must be 1");
  std::vector<double> kappa(mu.size(), 0.0);
  for (std::size_t n = 1; n < mu.size(); ++n) {
    double acc = mu[n];
    for (std::size_t k = 1; k < n; ++k)
      acc -= binom(int(n) - 1, int(k) - 1) * kappa[k] * mu[n - k];
    kappa[n] = acc;
  }
  return kappa;
}

std::vector<double> moments_from_cumulants(const std::vector<double>& kappa) {
  if (kappa.empty() || std::abs(kappa[0]) > 1e-12)
    throw std::invalid_argument("moments_from_cumulants: kappa_0 must be 0");
  std::vector<double> mu(kappa.size(), 0.0);
  mu[0] = 1.0;
  for (std::size_t n = 1; n < kappa.size(); ++n) {
    double acc = kappa[n];
    for (std::size_t k = 1; k < n; ++k)
      acc += binom(int(n) - 1, int(k) - 1) * kappa[k] * mu[n - k];
    mu[n] = acc;
  }
  return mu;
}

std::vector<double> exact_sparse_moments(const PartitionedHamiltonian& H, const State& psi,
                                         int n_max) {
  // mu_{2k} = <H^k psi|H^k psi>, mu_{2k+1} = <H^k psi|H|H^k psi>: the Gram
  // pairing keeps even moments positive by construction
  std::vector<double> mu(n_max + 1, 0.0);
  mu[0] = 1.0;
  State cur = psi;
  for (int k = 0; 2 * k <= n_max; ++k) {
    if (k > 0) {
      if (2 * k <= n_max) mu[2 * k] = std::real(inner(cur, cur));
    }
    if (2 * k + 1 <= n_max) {
      State next = apply_hamiltonian(H, cur);
      mu[2 * k + 1] = std::real(inner(cur, next));
      cur = std::move(next);
    }
  }
  return mu;
}

std::vector<double> cmx_energy(const std::vector<double>& kappa, int n_max,
                               const std::vector<double>& tau_grid) {
  if (int(kappa.size()) <= n_max)
    throw std::invalid_argument("cmx_energy: need kappa up to n_max");
  std::vector<double> out;
  out.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    double acc = 0.0;
    double term = 1.0;  // (-tau)^n / n!
    for (int n = 0; n < n_max; ++n) {
      if (n > 0) term *= -tau / double(n);
      acc += term * kappa[n + 1];
    }
    out.push_back(acc);
  }
  return out;
}

std::vector<double> exact_ite_energy(const PartitionedHamiltonian& H, const State& psi,
                                     const std::vector<double>& tau_grid) {
  if (H.n_qubits() > 20) throw std::invalid_argument("exact_ite_energy: n_qubits > 20");
  double h_bound = 0.0;
  for (int g = 0; g < H.n_parts(); ++g)
    for (double c : H.part_coeffs(g)) h_bound += std::abs(c);
  const double max_sub = 0.5 / std::max(h_bound, 1e-12);

  State cur = psi;
  normalize(cur);
  std::vector<double> out;
  out.reserve(tau_grid.size());
  double tau_now = 0.0;
  for (double tau : tau_grid) {
    if (tau < tau_now) throw std::invalid_argument("exact_ite_energy: grid must be increasing");
    double remaining = tau - tau_now;
    while (remaining > 1e-15) {
      const double sub = std::min(remaining, max_sub);
      // e^{-sub H / 2} cur by a Taylor series, renormalized
      State term = cur;
      State acc = cur;
      for (int k = 1; k <= 60; ++k) {
        State ht = apply_hamiltonian(H, term);
        const double f = -0.5 * sub / double(k);
        for (std::size_t x = 0; x < ht.dim(); ++x) ht.amps[x] *= f;
        term = std::move(ht);
        for (std::size_t x = 0; x < acc.dim(); ++x) acc.amps[x] += term.amps[x];
        if (norm(term) < 1e-18 * norm(acc)) break;
      }
      cur = std::move(acc);
      normalize(cur);
      remaining -= sub;
    }
    tau_now = tau;
    out.push_back(std::real(inner(cur, apply_hamiltonian(H, cur))));
  }
  return out;
}

LanczosCoefficients lanczos_from_moments(const std::vector<double>& mu) {
  if (mu.size() < 2 || mu[0] <= 0.0)
    throw std::invalid_argument("lanczos_from_moments: need mu_0 > 0 and at least mu_1");
  const int L = int(mu.size()) - 1;  // highest available moment index
  const int n_alpha = (L + 1) / 2;
  const int n_beta = L / 2;

  // ratio sequences rL_n = det L_n / det L_{n-1}, rM_n = det M_n / det M_{n-1}
  // via r_n = mu_edge - m^T A^{-1} m and rank-1 inverse updates
  auto ratio_sequence = [&](int offset, int count, std::vector<double>& r) {
    // A_n has entries mu_{i+j-2+offset}; offset 0 -> L, offset 1 -> M
    Eigen::MatrixXd inv(1, 1);
    inv(0, 0) = 1.0 / mu[offset];
    r.push_back(mu[offset]);
    for (int n = 1; n < count; ++n) {
      if (2 * n + offset > L) break;
      Eigen::VectorXd m(n);
      for (int i = 0; i < n; ++i) m(i) = mu[n + i + offset];
      const Eigen::VectorXd im = inv * m;
      const double rn = mu[2 * n + offset] - m.dot(im);
      r.push_back(rn);
      if (2 * (n + 1) + offset > L) break;  // inverse not needed further
      Eigen::MatrixXd next(n + 1, n + 1);
      next.topLeftCorner(n, n) = inv + (im * im.transpose()) / rn;
      next.topRightCorner(n, 1) = -im / rn;
      next.bottomLeftCorner(1, n) = -im.transpose() / rn;
      next(n, n) = 1.0 / rn;
      inv = std::move(next);
    }
  };

  std::vector<double> rL, rM;
  ratio_sequence(0, n_beta + 1, rL);
  ratio_sequence(1, n_alpha, rM);

  LanczosCoefficients out;
  for (int i = 1; i <= n_alpha; ++i) {
    if (i - 1 >= int(rL.size()) || i - 1 >= int(rM.size())) break;
    if (rL[i - 1] <= 0.0)
      throw NumericalBreakdown("lanczos_from_moments: Hankel ratio r_" +
                               std::to_string(i - 1) + " lost positivity");
    double a = rM[i - 1] / rL[i - 1];
    if (i >= 2) {
      if (rM[i - 2] == 0.0)
        throw NumericalBreakdown("lanczos_from_moments: zero Hankel ratio at index " +
                                 std::to_string(i - 2));
      a += rL[i - 1] / rM[i - 2];
    }
    out.alpha.push_back(a);
  }
  for (int i = 1; i <= n_beta; ++i) {
    if (i >= int(rL.size())) break;
    if (rL[i] <= 0.0)
      throw NumericalBreakdown("lanczos_from_moments: Hankel ratio r_" + std::to_string(i) +
                               " lost positivity");
    out.beta.push_back(std::sqrt(rL[i] / rL[i - 1]));
  }
  return out;
}

}  // namespace qpm
