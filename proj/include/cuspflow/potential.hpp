#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cuspflow/geometry.hpp"
#include "cuspflow/kernels.hpp"
#include "cuspflow/periodic.hpp"
#include "cuspflow/vec2.hpp"

namespace cuspflow {

/// Free-space Green's function G0(z) = -(1/2π) ln|z| and its gradient.
double free_green(Vec2 z);
Vec2 free_green_gradient(Vec2 z);

struct QuadratureNode {
    double s{0.0};
    Vec2 point;
    Vec2 tangent;
    Vec2 normal;
    double curvature{0.0};
    double weight{0.0};
};

/// Boundary value and its derivative along τ_cw at a boundary point.
struct TraceValue {
    double value{0.0};
    double tangential{0.0};
};
using BoundaryTrace = std::function<TraceValue(double s, const BoundaryFrame& frame)>;

/// Double-layer density together with the Dirichlet data it represents.
struct Density {
    std::vector<double> mu;
    std::vector<double> data;
    TrigInterpolant trace;
    LayerSources layer;
    LayerSources fine;  // trigonometrically upsampled layer for targets in the near band
    double residual{0.0};

    std::size_t size() const { return mu.size(); }
};

/// Which targets an evaluation accepts.  Targets within the near band of the
/// curve use the upsampled layer; the thin strip below fine_band() is filled
/// by a degree-4 polynomial in the distance through the boundary trace and
/// four points further in.  `interior` rejects points on or
/// outside the curve; `closure` admits boundary points (boundary limits);
/// `band` additionally admits points up to one near-band width outside,
/// handled by extending the near-boundary polynomial.
enum class TargetPolicy { interior, closure, band };

/// Nyström discretization of the interior Dirichlet problem through the
/// double-layer equation (-½ I + D) μ = g on a smooth closed curve.
class LaplaceSolver {
  public:
    LaplaceSolver(std::shared_ptr<const ClosedCurve> curve, int n);

    const ClosedCurve& curve() const { return *curve_; }
    std::shared_ptr<const ClosedCurve> curve_ptr() const { return curve_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    std::span<const QuadratureNode> nodes() const { return nodes_; }
    double node_spacing() const { return spacing_; }
    double near_band() const { return near_band_; }
    /// Band below which even the upsampled quadrature needs the extrapolation scheme.
    double fine_band() const { return near_band_ / kUpsample; }
    static constexpr int kUpsample = 8;
    double condition_number() const { return condition_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

    Density solve_dirichlet(std::span<const double> g) const;
    /// Solves for every column of G at once (one factorization, many data).
    std::vector<Density> solve_dirichlet(const Eigen::MatrixXd& g) const;

    /// Value and gradient of the double-layer potential at x.
    FieldValue evaluate(const Density& mu, Vec2 x, TargetPolicy policy = TargetPolicy::interior,
                        const BoundaryTrace& trace = {}) const;
    void evaluate(const Density& mu, std::span<const Vec2> targets, std::span<FieldValue> out,
                  TargetPolicy policy = TargetPolicy::interior, const BoundaryTrace& trace = {}) const;
    /// Direct quadrature only, no near-boundary treatment.
    FieldValue evaluate_direct(const Density& mu, Vec2 x) const;
    /// Boundary limit at arclength s (value reproduces the data).
    FieldValue boundary_limit(const Density& mu, double s, const BoundaryTrace& trace = {}) const;

  private:
    Density make_density(std::vector<double> mu, std::vector<double> g) const;

    std::shared_ptr<const ClosedCurve> curve_;
    std::vector<QuadratureNode> nodes_;
    double spacing_{0.0};
    double near_band_{0.0};
    LayerSources fine_nodes_;  // upsampled geometry with unit density
    Eigen::MatrixXd matrix_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double condition_{0.0};
};

/// Assembles and factorizes.  Requires n >= 128 and even; throws
/// AssemblyError when the condition number exceeds 1e12.
LaplaceSolver assemble(const DomainSpec& dom, int n);
LaplaceSolver assemble(const Circle& circle, int n);

FieldValue eval_harmonic(const LaplaceSolver& solver, const Density& mu, Vec2 x);

/// Kelvin image of a source in the osculating circle at its boundary foot
/// (a mirror image where the curve is flat).  G0(x - y) - G0(x - y*) + c
/// vanishes on that circle.
struct ImageCharge {
    bool active{false};
    Vec2 point;
    double constant{0.0};
};

/// `plain` solves for the full harmonic remainder -G0(· - y) on the curve;
/// `image_near_wall` first subtracts the image charge of sources close to it.
enum class SourceTreatment { image_near_wall, plain };

/// G_D(·, y) for one source point: G0(x - y) + h_y(x).  Sources near the
/// curve subtract their image charge explicitly so that the harmonic
/// remainder stays smooth.
class GreenSource {
  public:
    GreenSource(const LaplaceSolver& solver, Vec2 y, SourceTreatment treatment = SourceTreatment::image_near_wall);

    Vec2 source() const { return y_; }
    bool uses_image() const { return image_.active; }
    /// G_D(x, y) and ∇_x G_D(x, y); x may lie on the curve.
    FieldValue field(Vec2 x) const;
    double value(Vec2 x) const { return field(x).value; }
    /// K_D(x, y) = ∇⊥_x G_D(x, y).
    Vec2 kernel(Vec2 x) const { return perp(field(x).gradient); }
    void field(std::span<const Vec2> xs, std::span<FieldValue> out) const;

    /// Dirichlet data of the harmonic remainder at the quadrature nodes.
    static std::vector<double> remainder_data(const LaplaceSolver& solver, Vec2 y, const ImageCharge& image);

  private:
    friend std::vector<GreenSource> green_sources(const LaplaceSolver&, std::span<const Vec2>);
    GreenSource(const LaplaceSolver& solver, Vec2 y, ImageCharge image, Density h);
    TraceValue remainder_trace(const BoundaryFrame& f) const;
    FieldValue singular_part(Vec2 x) const;

    const LaplaceSolver* solver_;
    Vec2 y_;
    ImageCharge image_;
    Density h_;
};

/// Sources for many points sharing one multi-column solve.
std::vector<GreenSource> green_sources(const LaplaceSolver& solver, std::span<const Vec2> ys);

double green_function(const LaplaceSolver& solver, Vec2 x, Vec2 y,
                      SourceTreatment treatment = SourceTreatment::image_near_wall);
Vec2 green_kernel(const LaplaceSolver& solver, Vec2 x, Vec2 y,
                  SourceTreatment treatment = SourceTreatment::image_near_wall);

}  // namespace cuspflow
