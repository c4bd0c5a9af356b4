#include "qpm/qpower.hpp"

#include <cmath>
#include <stdexcept>

namespace qpm {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v *= double(n - k + i) / double(i);
  return v;
}

cplx i_pow(int n) {
  static const cplx tbl[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return tbl[((n % 4) + 4) % 4];
}

void validate(const PowerConfig& cfg) {
  if (cfg.n < 0) throw std::invalid_argument("apply_power: n must be >= 0");
  if (cfg.dtau <= 0.0) throw std::invalid_argument("apply_power: dtau must be > 0");
  if (cfg.r < 0) throw std::invalid_argument("apply_power: r must be >= 0");
  if (cfg.h <= 0.0 || cfg.h == 1.0)
    throw std::invalid_argument("apply_power: h must be positive and != 1");
  if (cfg.formalism == Formalism::AlternativeForm && 2 * cfg.scheme.m < cfg.n)
    throw std::invalid_argument("apply_power: AlternativeForm requires 2m >= n");
}

// one step of (i/dtau) [S(dtau/2) - S(-dtau/2)], returning the norm ratio
// entering the cancellation estimate
void power_step(const TrotterScheme& sch, const PartitionedHamiltonian& H, double dtau,
                State& psi, double& loss_accum) {
  State fwd = psi;
  apply_trotter_inplace(sch, H, 0.5 * dtau, fwd);
  apply_trotter_inplace(sch, H, -0.5 * dtau, psi);
  const double in_norm = norm(psi);
  const cplx pref{0.0, 1.0 / dtau};
  for (std::size_t x = 0; x < psi.dim(); ++x)
    psi.amps[x] = pref * (fwd.amps[x] - psi.amps[x]);
  const double out_norm = norm(psi);
  if (out_norm > 0.0) loss_accum += 2.0 * in_norm / (dtau * out_norm);
}

State apply_power_product_r0(const TrotterScheme& sch, const PartitionedHamiltonian& H,
                             int n, double dtau, const State& psi, CancellationInfo* info) {
  State cur = psi;
  double loss = 0.0;
  for (int k = 0; k < n; ++k) power_step(sch, H, dtau, cur, loss);
  if (info && n > 0) {
    CancellationInfo ci;
    ci.digits_lost = std::log10(std::max(loss, 1.0));
    ci.flagged = ci.digits_lost >= 10.0;
    info->absorb(ci);
  }
  return cur;
}

State apply_power_alternative_r0(const TrotterScheme& sch, const PartitionedHamiltonian& H,
                                 int n, double dtau, const State& psi,
                                 CancellationInfo* info) {
  if (n == 0) return psi;
  std::vector<State> terms;
  terms.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = (0.5 * n - k) * dtau;
    terms.push_back(apply_trotter(sch, H, t, psi));
  }
  std::vector<std::pair<cplx, const State*>> lc;
  double abs_sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const cplx c = cnk(n, k, dtau);
    abs_sum += std::abs(c) * norm(terms[k]);
    lc.emplace_back(c, &terms[k]);
  }
  State out = linear_combine(lc);
  if (info) {
    CancellationInfo ci;
    const double out_norm = norm(out);
    if (out_norm > 0.0) ci.digits_lost = std::log10(std::max(abs_sum / out_norm, 1.0));
    ci.flagged = ci.digits_lost >= 10.0;
    info->absorb(ci);
  }
  return out;
}

}  // namespace

cplx cnk(int n, int k, double dtau) {
  if (k < 0 || k > n) throw std::invalid_argument("cnk: k out of range");
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return i_pow(n) * (sign * binom(n, k) / std::pow(dtau, n));
}

std::vector<double> richardson_weights(int r, double h) {
  std::vector<double> w{1.0};
  for (int j = 1; j <= r; ++j) {
    const double hj = std::pow(h, 2 * j);
    std::vector<double> next(j + 1, 0.0);
    for (int l = 0; l < j; ++l) {
      next[l + 1] += hj * w[l] / (hj - 1.0);  // evaluation points shift to dtau/h^(l+1)
      next[l] -= w[l] / (hj - 1.0);
    }
    w = std::move(next);
  }
  return w;
}

State apply_power(const PowerConfig& cfg, const PartitionedHamiltonian& H, const State& psi,
                  CancellationInfo* info) {
  validate(cfg);
  if (psi.n_qubits != H.n_qubits())
    throw std::invalid_argument("apply_power: dimension mismatch");
  if (cfg.n == 0) return psi;

  const auto w = richardson_weights(cfg.r, cfg.h);
  std::vector<State> levels;
  levels.reserve(w.size());
  for (int l = 0; l < int(w.size()); ++l) {
    const double dt = cfg.dtau / std::pow(cfg.h, l);
    levels.push_back(cfg.formalism == Formalism::ProductForm
                         ? apply_power_product_r0(cfg.scheme, H, cfg.n, dt, psi, info)
                         : apply_power_alternative_r0(cfg.scheme, H, cfg.n, dt, psi, info));
  }
  if (w.size() == 1) return std::move(levels.front());
  std::vector<std::pair<cplx, const State*>> lc;
  for (std::size_t l = 0; l < w.size(); ++l) lc.emplace_back(w[l], &levels[l]);
  return linear_combine(lc);
}

HermiticityResidual hermiticity_check(const PowerConfig& cfg, const PartitionedHamiltonian& H,
                                      const State& psi, const State& phi) {
  const State x_psi = apply_power(cfg, H, psi);
  const State x_phi = apply_power(cfg, H, phi);
  // H^n_ST(-dtau) psi: flip the time direction by negating the scheme
  // coefficients, then fold back the (-1)^n from c_{n,k}(-dtau).
  PowerConfig flipped = cfg;
  for (auto& s : flipped.scheme.s) s = -s;
  State x_psi_neg = apply_power(flipped, H, psi);
  if (cfg.n % 2 == 1)
    for (auto& a : x_psi_neg.amps) a = -a;
  HermiticityResidual res;
  res.hermiticity = std::abs(inner(phi, x_psi) - std::conj(inner(psi, x_phi)));
  res.evenness = std::abs(inner(phi, x_psi) - inner(phi, x_psi_neg));
  return res;
}

double lcu_success_probability(const PartitionedHamiltonian& H, const TrotterScheme& scheme,
                               double dtau, int n, const State& psi) {
  if (n < 0) throw std::invalid_argument("lcu_success_probability: n must be >= 0");
  if (std::abs(norm(psi) - 1.0) > 1e-8)
    throw std::invalid_argument("lcu_success_probability: state must be normalized");
  if (n == 0) return 1.0;
  if (dtau == 0.0) return 0.0;
  PowerConfig cfg;
  cfg.n = n;
  cfg.dtau = dtau;
  cfg.r = 0;
  cfg.scheme = scheme;
  const State b = apply_power(cfg, H, psi);
  double p = 0.0;
  for (const auto& a : b.amps) p += std::norm(a);
  p *= std::pow(0.5 * dtau, 2 * n);
  return std::min(std::max(p, 0.0), 1.0);
}

LadderOverlaps::LadderOverlaps(const PartitionedHamiltonian& H, const TrotterScheme& scheme,
                               double dtau, int max_power, int r, double h,
                               const std::vector<State>& refs)
    : max_power_(max_power), n_refs_(int(refs.size())), dtau_(dtau), h_(h) {
  table_.resize(r + 1);
  for (int level = 0; level <= r; ++level) {
    const double dt = dtau / std::pow(h, level);
    auto& tab = table_[level];
    tab.assign(std::size_t(max_power + 1) * n_refs_ * n_refs_, cplx{});
    for (int kp = 0; kp < n_refs_; ++kp) {
      State cur = refs[kp];
      for (int j = 0; j <= max_power; ++j) {
        if (j > 0) apply_trotter_inplace(scheme, H, 0.5 * dt, cur);
        for (int k = 0; k < n_refs_; ++k)
          tab[(std::size_t(j) * n_refs_ + k) * n_refs_ + kp] = inner(refs[k], cur);
      }
    }
  }
}

cplx LadderOverlaps::overlap(int level, int power, int k, int kprime) const {
  if (power < 0) return std::conj(overlap(level, -power, kprime, k));
  if (power > max_power_) throw std::invalid_argument("LadderOverlaps: power too large");
  return table_[level][(std::size_t(power) * n_refs_ + k) * n_refs_ + kprime];
}

cplx LadderOverlaps::power_overlap(int n, int r, int k, int kprime,
                                   CancellationInfo* info) const {
  if (r + 1 > levels()) throw std::invalid_argument("LadderOverlaps: r exceeds built levels");
  if (n == 0) return overlap(0, 0, k, kprime);
  const auto w = richardson_weights(r, h_);
  cplx acc{};
  double abs_sum = 0.0;
  for (int level = 0; level <= r; ++level) {
    const double dt = dtau_ / std::pow(h_, level);
    cplx lvl{};
    for (int kk = 0; kk <= n; ++kk) {
      const cplx c = cnk(n, kk, dt);
      const cplx g = overlap(level, n - 2 * kk, k, kprime);
      lvl += c * g;
      abs_sum += std::abs(w[level]) * std::abs(c) * std::abs(g);
    }
    acc += w[level] * lvl;
  }
  if (info) {
    CancellationInfo ci;
    const double mag = std::abs(acc);
    if (mag > 0.0) ci.digits_lost = std::log10(std::max(abs_sum / mag, 1.0));
    ci.flagged = ci.digits_lost >= 10.0;
    info->absorb(ci);
  }
  return acc;
}

}  // namespace qpm
