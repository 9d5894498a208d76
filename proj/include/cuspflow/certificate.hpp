#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cuspflow/barrier.hpp"
#include "cuspflow/geometry.hpp"
#include "cuspflow/potential.hpp"

namespace cuspflow {

/// Equispaced points on a curve, starting at arclength 0.
std::vector<Vec2> curve_samples(const ClosedCurve& curve, int count);
/// Cell centers of a square grid inside the curve, refined until at least
/// `count` points are inside.  `extent` bounds the curve: [lo, hi].
std::vector<Vec2> interior_samples(const ClosedCurve& curve, Vec2 lo, Vec2 hi, int count);

struct KappaResult {
    double kappa{0.0};
    Vec2 x;  // minimizing pair
    Vec2 y;
    int x_samples{0};
    int y_samples{0};
};

/// min G_D(x, y) over the product of two sample sets.  Throws
/// CertificateFailure on a non-positive value.
KappaResult kappa_over(const LaplaceSolver& solver, std::span<const Vec2> xs, std::span<const Vec2> ys);

/// κ on the stadium: x on ∂D_{1-δ} (boundary_samples points), y in the closed
/// region D̄_{1-2δ} (half of interior_samples on its boundary, half on a grid).
KappaResult compute_kappa(const LaplaceSolver& solver, const DomainSpec& dom, double delta, int boundary_samples,
                          int interior_samples);

struct EpsilonResult {
    double epsilon{0.0};  // min over outer nodes of -∂v/∂n
    double maximum{0.0};
    Vec2 argmin;
    std::vector<double> slopes;  // one per outer barrier node
};

/// -∂v/∂n at every outer node of the barrier by second-order one-sided
/// differences along the inward normal.  Throws CertificateFailure if any
/// slope is not positive.
EpsilonResult compute_epsilon(const HopfBarrier& barrier);

struct ComparisonReport {
    int pairs{0};
    double worst_margin{0.0};  // min of G_D(x,y) - v(x)
    Vec2 x;
    Vec2 y;
    double tolerance{1e-6};
    bool passed() const { return worst_margin >= -tolerance; }
};

/// G_D(x,y) >= v(x) for random x in the collar D \ D̄_{1-δ} and y in D̄_{1-2δ}.
ComparisonReport verify_comparison(const LaplaceSolver& solver, const DomainSpec& dom, const HopfBarrier& barrier,
                                   int samples, std::uint64_t seed);

struct KernelReport {
    int pairs{0};
    double worst_ratio{0.0};  // min of |K_D(x,y)| / ε
    Vec2 x;
    Vec2 y;
    double centroid_ratio{0.0};  // min over sampled x of |K_D(x, c)| / ε, c the domain center
    double max_normal_fraction{0.0};  // max of |K_D·n| / |K_D|
    double tolerance{1e-3};
    bool passed() const { return worst_ratio >= 1.0 - tolerance; }
};

/// |K_D(x,y)| >= ε for random x on ∂D and y in D̄_{1-2δ}.
KernelReport kernel_lower_bound(const LaplaceSolver& solver, const DomainSpec& dom, double delta, double epsilon,
                                int samples, std::uint64_t seed);

struct CertificateGrids {
    int kappa_boundary{256};
    int kappa_interior{512};
    int comparison_samples{400};
    int barrier_nodes{2048};
};

struct BlowupCertificate {
    double delta{0.0};
    double kappa{0.0};
    double epsilon{0.0};
    double epsilon_max{0.0};
    double speed_bound{0.0};
    double transit_arclength{0.0};
    double transit_bound{0.0};
    double r{0.0};
    double beta{0.0};
    int M{0};
    int N{0};
    CertificateGrids grids;
    Vec2 kappa_x;
    Vec2 kappa_y;
    double kappa_refined{0.0};
    double epsilon_coarse{0.0};
    double comparison_margin{0.0};
    double kernel_ratio{0.0};
    double kernel_centroid_ratio{0.0};
};

/// Checks every sub-result and combines them.  speed_bound = ε δ² and
/// transit_bound = (clockwise arclength from the top midpoint to the origin) /
/// speed_bound.  Throws CertificateFailure if any check failed or any
/// constant is not positive.
BlowupCertificate assemble_certificate(const DomainSpec& dom, double delta, int N, const CertificateGrids& grids,
                                       const KappaResult& kappa, const KappaResult& kappa_refined,
                                       const EpsilonResult& eps, const EpsilonResult& eps_coarse,
                                       const ComparisonReport& comparison, const KernelReport& kernel);

/// Relative change tolerated between a constant and its 2x refinement.
inline constexpr double kRefinementTolerance = 0.02;

/// Full pipeline: solver, κ (and its 2x grid refinement), barrier (and a
/// half-resolution barrier), ε, comparison and kernel checks.
BlowupCertificate certify(const DomainSpec& dom, const LaplaceSolver& solver, double delta,
                          const CertificateGrids& grids, std::uint64_t seed);

/// Throws CertificateFailure if a loaded certificate is inconsistent
/// (non-positive constants, speed or transit bound not matching).
void check_certificate(const BlowupCertificate& c);

void write_certificate(std::ostream& out, const BlowupCertificate& c);
BlowupCertificate read_certificate(std::istream& in);

}  // namespace cuspflow
