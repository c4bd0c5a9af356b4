#include "qpm/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace qpm {

std::uint64_t splitmix64(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

double distance_from_sums(double aa, double bb, const cplx& ab) {
  const double denom = std::sqrt(aa * bb);
  if (denom == 0.0) throw NumericalBreakdown("power_distance: zero-norm operator sample");
  const double ratio = std::min(std::abs(ab) / denom, 1.0);
  return std::sqrt(std::max(1.0 - ratio, 0.0));
}

}  // namespace

DistanceEstimate power_distance(const PartitionedHamiltonian& H, const PowerConfig& power,
                                int R, std::uint64_t seed) {
  if (R < 2) throw std::invalid_argument("power_distance: need at least 2 samples");
  DistanceEstimate est;
  est.samples = R;
  est.aa.reserve(R);
  est.bb.reserve(R);
  est.ab.reserve(R);
  double scale_a = 1.0, scale_b = 1.0;
  for (int zeta = 0; zeta < R; ++zeta) {
    const State phi = random_phase_state(H.n_qubits(), splitmix64(seed, zeta));
    State a = phi;
    for (int k = 0; k < power.n; ++k) a = apply_hamiltonian(H, a);
    const State b = apply_power(power, H, phi, &est.cancellation);
    if (zeta == 0) {
      scale_a = std::max(norm(a), 1e-300);
      scale_b = std::max(norm(b), 1e-300);
    }
    const double inv_a = 1.0 / scale_a, inv_b = 1.0 / scale_b;
    double saa = 0.0, sbb = 0.0;
    cplx sab{};
    for (std::size_t x = 0; x < a.dim(); ++x) {
      saa += std::norm(a.amps[x] * inv_a);
      sbb += std::norm(b.amps[x] * inv_b);
      sab += std::conj(a.amps[x] * inv_a) * (b.amps[x] * inv_b);
    }
    est.aa.push_back(saa);
    est.bb.push_back(sbb);
    est.ab.push_back(sab);
  }
  double taa = 0.0, tbb = 0.0;
  cplx tab{};
  for (int z = 0; z < R; ++z) {
    taa += est.aa[z];
    tbb += est.bb[z];
    tab += est.ab[z];
  }
  est.d = distance_from_sums(taa, tbb, tab);
  // delete-one jackknife
  std::vector<double> dj(R);
  double mean = 0.0;
  for (int z = 0; z < R; ++z) {
    dj[z] = distance_from_sums(taa - est.aa[z], tbb - est.bb[z], tab - est.ab[z]);
    mean += dj[z];
  }
  mean /= R;
  double var = 0.0;
  for (int z = 0; z < R; ++z) var += (dj[z] - mean) * (dj[z] - mean);
  est.stderr_d = std::sqrt(var * double(R - 1) / double(R));
  return est;
}

std::vector<DistanceRow> distance_order_scan(const PartitionedHamiltonian& H,
                                             const std::vector<int>& n_list,
                                             const std::vector<double>& dtau_list,
                                             const TrotterScheme& scheme, int r, double h,
                                             int R, std::uint64_t seed) {
  std::vector<DistanceRow> rows;
  for (int n : n_list) {
    for (double dtau : dtau_list) {
      PowerConfig cfg;
      cfg.n = n;
      cfg.dtau = dtau;
      cfg.r = r;
      cfg.h = h;
      cfg.scheme = scheme;
      const auto est = power_distance(H, cfg, R, seed);
      rows.push_back({n, dtau, est.d, est.stderr_d, est.cancellation.flagged});
    }
  }
  return rows;
}

PolyFit polyfit_even_powers(const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<int>& orders) {
  if (x.size() != y.size()) throw std::invalid_argument("polyfit: size mismatch");
  const int mrows = int(x.size());
  const int ncols = int(orders.size()) + 1;
  if (mrows < ncols) throw std::invalid_argument("polyfit: fewer points than coefficients");
  for (int o : orders)
    if (o <= 0 || o % 2 != 0) throw std::invalid_argument("polyfit: orders must be positive even");
  Eigen::MatrixXd X(mrows, ncols);
  Eigen::VectorXd Y(mrows);
  for (int i = 0; i < mrows; ++i) {
    X(i, 0) = 1.0;
    for (int j = 0; j < int(orders.size()); ++j) X(i, j + 1) = std::pow(x[i], orders[j]);
    Y(i) = y[i];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < ncols) throw NumericalBreakdown("polyfit: rank-deficient design matrix");
  const Eigen::VectorXd beta = qr.solve(Y);
  const Eigen::VectorXd resid = Y - X * beta;
  PolyFit fit;
  fit.coeff.assign(beta.data(), beta.data() + ncols);
  fit.residuals.assign(resid.data(), resid.data() + mrows);
  fit.rss = resid.squaredNorm();
  const int dof = mrows - ncols;
  const double sigma2 = dof > 0 ? fit.rss / dof : 0.0;
  const Eigen::MatrixXd cov = sigma2 * (X.transpose() * X).inverse();
  fit.stderrs.resize(ncols);
  for (int j = 0; j < ncols; ++j) fit.stderrs[j] = std::sqrt(std::max(cov(j, j), 0.0));
  return fit;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need matching arrays of size >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = int(x.size());
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qpm
