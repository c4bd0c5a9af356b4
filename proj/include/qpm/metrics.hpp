#pragma once

#include <cstdint>
#include <vector>

#include "qpm/qpower.hpp"

namespace qpm {

// Normalized operator distance d(A,B) = sqrt(1 - |<A,B>_F| / (||A||_F ||B||_F))
// estimated stochastically over random-phase states, with delete-one
// jackknife error bars.
struct DistanceEstimate {
  double d = 0.0;
  double stderr_d = 0.0;
  int samples = 0;
  // per-zeta accumulators <A phi|A phi>, <B phi|B phi>, <A phi|B phi>,
  // rescaled by the first sample to avoid overflow at large powers
  std::vector<double> aa;
  std::vector<double> bb;
  std::vector<cplx> ab;
  CancellationInfo cancellation;
};

// d(H^n, H^n_ST(r)) with A|phi> from n exact sparse applies and B|phi> from
// apply_power; R random-phase samples derived from `seed` via SplitMix64.
DistanceEstimate power_distance(const PartitionedHamiltonian& H, const PowerConfig& power,
                                int R, std::uint64_t seed);

struct DistanceRow {
  int n = 0;
  double dtau = 0.0;
  double d = 0.0;
  double stderr_d = 0.0;
  bool cancellation_flag = false;
};

std::vector<DistanceRow> distance_order_scan(const PartitionedHamiltonian& H,
                                             const std::vector<int>& n_list,
                                             const std::vector<double>& dtau_list,
                                             const TrotterScheme& scheme, int r, double h,
                                             int R, std::uint64_t seed);

// Ordinary least squares on a constant plus the chosen even powers of x.
struct PolyFit {
  std::vector<double> coeff;    // [c0, c_{orders[0]}, ...]
  std::vector<double> stderrs;  // same layout
  std::vector<double> residuals;
  double rss = 0.0;
};

PolyFit polyfit_even_powers(const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<int>& orders);

// log-log slope fit helper used by the order-verification tests
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::uint64_t splitmix64(std::uint64_t base, std::uint64_t index);

}  // namespace qpm
