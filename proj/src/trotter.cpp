#include "qpm/trotter.hpp"

#include <cmath>
#include <stdexcept>

namespace qpm {

namespace {

void validate_mp(int m, int p, int n_gamma) {
  if (m < 1) throw std::invalid_argument("suzuki: m must be >= 1");
  if (p < 3 || p % 2 == 0) throw std::invalid_argument("suzuki: p must be odd and >= 3");
  if (n_gamma < 2) throw std::invalid_argument("suzuki: n_gamma must be >= 2");
}

}  // namespace

int trotter_depth(int m, int p, int n_gamma) {
  validate_mp(m, p, n_gamma);
  int pw = 1;
  for (int i = 1; i < m; ++i) pw *= p;
  return 2 * (n_gamma - 1) * pw + 1;
}

TrotterScheme suzuki_coefficients(int m, int p, int n_gamma) {
  validate_mp(m, p, n_gamma);
  std::vector<double> s(2 * n_gamma - 1, 0.5);
  s[n_gamma - 1] = 1.0;
  const int pl = (p - 1) / 2;
  for (int mm = 0; mm < m - 1; ++mm) {
    const double k0 = 1.0 / ((p - 1) - std::pow(double(p - 1), 1.0 / double(2 * mm + 3)));
    const double k1 = 1.0 - (p - 1) * k0;
    // one repeated block with the block-boundary exponential contracted
    std::vector<double> sl(s.begin(), s.end() - 1);
    for (auto& v : sl) v *= k0;
    sl[0] *= 2.0;
    const std::vector<double> unit_block = sl;
    sl.reserve(unit_block.size() * pl);
    for (int r = 1; r < pl; ++r) sl.insert(sl.end(), unit_block.begin(), unit_block.end());
    sl[0] /= 2.0;
    std::vector<double> mid = s;
    for (auto& v : mid) v *= k1;
    mid.front() += sl[0];
    mid.back() = mid.front();
    std::vector<double> next;
    next.reserve(sl.size() * 2 + mid.size());
    next.insert(next.end(), sl.begin(), sl.end());
    next.insert(next.end(), mid.begin(), mid.end());
    next.insert(next.end(), sl.rbegin(), sl.rend());
    s = std::move(next);
  }

  TrotterScheme sch;
  sch.m = m;
  sch.p = p;
  sch.n_gamma = n_gamma;
  sch.s = std::move(s);
  const int D = int(sch.s.size());
  if (D != trotter_depth(m, p, n_gamma))
    throw std::logic_error("suzuki: depth mismatch against closed form");
  sch.part_index.resize(D);
  const int period = 2 * (n_gamma - 1);
  for (int i = 0; i < D; ++i) {
    const int j = i % period;
    sch.part_index[i] = (j < n_gamma) ? j : period - j;
  }
  return sch;
}

void apply_trotter_inplace(const TrotterScheme& sch, const PartitionedHamiltonian& H,
                           double dtau, State& psi) {
  if (sch.n_gamma != H.n_parts())
    throw std::invalid_argument("apply_trotter: scheme/Hamiltonian part-count mismatch");
  for (int i = sch.depth() - 1; i >= 0; --i)
    H.exp_part_inplace(sch.part_index[i], psi, dtau * sch.s[i]);
}

State apply_trotter(const TrotterScheme& sch, const PartitionedHamiltonian& H,
                    double dtau, const State& psi) {
  State out = psi;
  apply_trotter_inplace(sch, H, dtau, out);
  return out;
}

std::vector<cplx> propagator_deviation(const PartitionedHamiltonian& H,
                                       const TrotterScheme& sch, double dtau, int steps,
                                       const State& psi0, double E0) {
  std::vector<cplx> out;
  out.reserve(steps);
  State cur = psi0;
  for (int l = 1; l <= steps; ++l) {
    apply_trotter_inplace(sch, H, dtau, cur);
    const cplx K = inner(psi0, cur);
    const cplx exact = std::polar(1.0, -E0 * dtau * double(l));
    out.push_back(K - exact);
  }
  return out;
}

}  // namespace qpm
