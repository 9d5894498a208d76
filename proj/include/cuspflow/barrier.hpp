#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cuspflow/geometry.hpp"
#include "cuspflow/kernels.hpp"
#include "cuspflow/periodic.hpp"
#include "cuspflow/potential.hpp"

namespace cuspflow {

/// Densities of the doubly connected Dirichlet solve plus the hole charge.
struct AnnulusDensity {
    std::vector<double> mu_outer;
    std::vector<double> mu_inner;
    double charge{0.0};
    TrigInterpolant interp_outer;
    TrigInterpolant interp_inner;
    LayerSources fine_outer;  // upsampled layers, normals pointing out of the region
    LayerSources fine_inner;
};

/// Dirichlet problem on the region between two nested smooth curves.  The
/// solution is represented as double layers on both curves (normals pointing
/// out of the region) plus A·G0(x - c) with c inside the hole; the mean of the
/// inner density is pinned to zero to close the system.  Interactions between
/// the two curves and all evaluations use trigonometrically upsampled
/// densities with the density value at the nearest boundary point subtracted
/// (and the exact layer of a constant added back), since the curves may be
/// far closer than the node spacing.
class AnnulusSolver {
  public:
    AnnulusSolver(std::shared_ptr<const ClosedCurve> outer, std::shared_ptr<const ClosedCurve> inner, int n, Vec2 hole,
                  int matrix_upsample = 8, int eval_upsample = 32);

    int size() const { return n_; }
    const ClosedCurve& outer() const { return *outer_; }
    const ClosedCurve& inner() const { return *inner_; }
    std::span<const QuadratureNode> outer_nodes() const { return outer_nodes_; }
    std::span<const QuadratureNode> inner_nodes() const { return inner_nodes_; }
    double condition_number() const { return condition_; }

    AnnulusDensity solve(std::span<const double> outer_data, std::span<const double> inner_data) const;
    double evaluate(const AnnulusDensity& d, Vec2 x) const;
    void evaluate(const AnnulusDensity& d, std::span<const Vec2> xs, std::span<double> out) const;

  private:
    std::shared_ptr<const ClosedCurve> outer_;
    std::shared_ptr<const ClosedCurve> inner_;
    int n_;
    Vec2 hole_;
    int eval_upsample_;
    std::vector<QuadratureNode> outer_nodes_;
    std::vector<QuadratureNode> inner_nodes_;
    LayerSources unit_outer_;  // fine layers of unit density
    LayerSources unit_inner_;
    Eigen::MatrixXd matrix_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double condition_{0.0};
};

/// The Hopf barrier v: harmonic between ∂D and ∂D_{1-δ}, zero on ∂D and κ
/// on the inner curve.  Stored as κ times the unit-data solution w.
struct HopfBarrier {
    double delta{0.0};
    double kappa{0.0};
    std::shared_ptr<const AnnulusSolver> solver;
    AnnulusDensity unit;

    double value(Vec2 x) const { return kappa * solver->evaluate(unit, x); }
    void values(std::span<const Vec2> xs, std::span<double> out) const;
};

HopfBarrier solve_barrier(const DomainSpec& dom, double delta, double kappa, int n);
/// Same construction on arbitrary nested curves (used by the concentric-disk check).
HopfBarrier solve_barrier(std::shared_ptr<const ClosedCurve> outer, std::shared_ptr<const ClosedCurve> inner,
                          Vec2 hole, double delta, double kappa, int n);

/// Points of the open region between the two barrier curves: x = p + t (q - p)
/// with p on the outer curve, q = c + ρ (p - c) its homothetic image and t ∈ (0,1).
Vec2 annulus_point(const ClosedCurve& outer, Vec2 center, double rho, double s, double t);

}  // namespace cuspflow
