#pragma once

// The free additive convolution mu1 [+] mu2 seen through its subordination
// functions: Stieltjes transform, density by Stieltjes-Perron inversion,
// atoms, regular-bulk detection and the continuity diagnostics.

#include <cstddef>
#include <span>
#include <vector>

#include "freeconv/measures.hpp"
#include "freeconv/subordination.hpp"

namespace freeconv {

struct DensityOptions {
  double eta_eval = 1e-9;
  double eta_start = 1.0;
  int sweep_steps = 48;
  SolverOptions solver{};
};

enum class PointStatus { ok = 0, edge = 1, error = 2 };

struct DensityPoint {
  double x = 0.0;
  double f = 0.0;
  double eta = 0.0;       // smallest eta actually reached
  double residual = 0.0;
  PointStatus status = PointStatus::ok;
};

struct DensityGrid {
  std::vector<DensityPoint> points;
  double eta_used = 0.0;
  double residual_max = 0.0;
};

struct AtomEntry {
  double location;
  double mass;
};
using AtomList = std::vector<AtomEntry>;

struct Interval {
  double lo;
  double hi;
};

struct BulkIntervals {
  std::vector<Interval> intervals;
  double threshold = 0.0;
};

/// m_{mu1 [+] mu2}(z) = -1 / F1(omega2(z)). Im z == 0 is evaluated by an eta
/// sweep down to opts.solver.eta_floor.
Complex convolve_stieltjes(const Measure& mu1, const Measure& mu2, Complex z,
                           const DensityOptions& opts = {});

/// Both expressions -1/F1(omega2) and -1/F2(omega1) at a solved pair.
std::pair<Complex, Complex> stieltjes_from_pair(const Measure& mu1, const Measure& mu2,
                                                const SubordinationPair& p);

/// Density of the absolutely continuous part: Im m / pi at x + i eta_eval with
/// the Poisson kernels of the atoms of mu1 [+] mu2 removed, clamped at 0.
DensityPoint density_point(const Measure& mu1, const Measure& mu2, double x,
                           const DensityOptions& opts = {});
double density(const Measure& mu1, const Measure& mu2, double x, const DensityOptions& opts = {});

/// n uniform points on [x_lo, x_hi]. Failed points within two cells of a
/// density sign change are marked edge, others error.
DensityGrid density_grid(const Measure& mu1, const Measure& mu2, double x_lo, double x_hi, int n,
                         const DensityOptions& opts = {});

/// Trapezoid integral of the grid density.
double integrate(const DensityGrid& grid);

/// Atoms a + b with mu1({a}) + mu2({b}) > 1, mass mu1({a}) + mu2({b}) - 1.
AtomList atoms(const Measure& mu1, const Measure& mu2);

/// Maximal runs of grid points with density > threshold, reported as open
/// intervals whose ends sit halfway to the first excluded neighbour.
BulkIntervals find_bulk(const Measure& mu1, const Measure& mu2, double x_lo, double x_hi, int n,
                        double threshold = 1e-3, const DensityOptions& opts = {});
BulkIntervals bulk_from_grid(const DensityGrid& grid, double threshold);

struct StabilityEntry {
  double E;
  double eta;
  Complex omega1;
  Complex omega2;
  double gamma;
  double residual;
};

struct StabilityReport {
  std::vector<StabilityEntry> entries;
  double min_im_omega = 0.0;
  double max_gamma = 0.0;
  bool gamma_finite = true;
  BulkIntervals bulk;
};

/// Gamma and Im omega over an (E, eta) grid; each E is swept from the largest
/// eta down so every solve is warm-started.
StabilityReport stability_map(const Measure& mu1, const Measure& mu2, std::span<const double> E_grid,
                              std::span<const double> eta_grid, const DensityOptions& opts = {});

struct ContinuityReport {
  double max_lhs = 0.0;   // max |m_{A [+] B} - m_{alpha [+] beta}| over the grid
  double dL_sum = 0.0;    // d_L(A, alpha) + d_L(B, beta)
  double empirical_Z = 0.0;
};

ContinuityReport continuity_check(const Measure& muA, const Measure& muB, const Measure& mu_alpha,
                                  const Measure& mu_beta, std::span<const double> E_grid,
                                  std::span<const double> eta_grid, const DensityOptions& opts = {});

}  // namespace freeconv
