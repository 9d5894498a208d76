#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "cuspflow/vec2.hpp"

namespace cuspflow {

/// Geometric frame of a boundary point.  The tangent is the clockwise unit
/// tangent and always equals (normal.y, -normal.x); curvature is dθ/ds of the
/// tangent angle along the clockwise parametrization (negative on convex arcs).
struct BoundaryFrame {
    Vec2 point;
    Vec2 tangent;
    Vec2 normal;
    double curvature{0.0};
};

struct BoundaryNode {
    double s{0.0};
    BoundaryFrame frame;
};

enum class Location { inside, boundary, outside };

/// Closest-point query result.  `distance` is signed, positive inside.
/// When `near` is false the point is farther than the requested radius and
/// only the sign of `distance` is meaningful.
struct CurveProjection {
    double s{0.0};
    double distance{0.0};
    BoundaryFrame frame;
    bool near{false};
};

/// A smooth closed Jordan curve parametrized clockwise by arclength.
class ClosedCurve {
  public:
    virtual ~ClosedCurve() = default;

    virtual double perimeter() const = 0;
    /// Full-accuracy frame at arclength s (taken modulo the perimeter).
    virtual BoundaryFrame frame(double s) const = 0;
    virtual CurveProjection project(Vec2 x, double max_distance) const = 0;
    virtual Location locate(Vec2 x) const = 0;
    /// A point well inside the curve.
    virtual Vec2 center() const = 0;
};

/// Circle of radius R, arclength origin at the bottom point, clockwise.
class Circle final : public ClosedCurve {
  public:
    Circle(Vec2 center, double radius);

    double radius() const { return radius_; }
    double perimeter() const override;
    BoundaryFrame frame(double s) const override;
    CurveProjection project(Vec2 x, double max_distance) const override;
    Location locate(Vec2 x) const override;
    Vec2 center() const override { return center_; }

  private:
    Vec2 center_;
    double radius_;
};

/// Smoothed stadium boundary: the width-r stadium whose straight/arc
/// junctions are made C^∞ by mollifying the curvature profile.
///
/// Arclength s = 0 sits at the bottom-edge midpoint and increases clockwise,
/// so s = P/2 is the top midpoint.  Nodes are equispaced in arclength.
/// Instances are immutable and cheap to copy.
class DomainSpec final : public ClosedCurve {
  public:
    double r() const;
    double beta() const;
    Vec2 center() const override;
    double perimeter() const override;
    /// Length scale of the construction: the curve is origin + scale * p(s / scale)
    /// for the unit-width profile p.
    double scale() const;

    std::span<const BoundaryNode> nodes() const;
    double node_spacing() const;

    /// Frame evaluated from the construction itself (machine precision).
    BoundaryFrame frame(double s) const override;
    /// Frame interpolated from the node table by periodic quintic splines.
    BoundaryFrame boundary_point(double s) const;

    CurveProjection project(Vec2 x, double max_distance) const override;
    /// Tri-state winding-number test on the node polygon (boundary band 1e-9).
    Location locate(Vec2 x) const override;

    double shoelace_area() const;
    /// ∮ x1 dx2 evaluated with the trapezoid rule on the exact frames.
    double area() const;

    DomainSpec rescaled(double rho) const;

    /// Node table as CSV: s,x1,x2,t1,t2,n1,n2,kappa.
    void write_csv(std::ostream& out) const;

    struct Impl;

  private:
    explicit DomainSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    friend DomainSpec build_domain(double r, double beta, int node_count);
    std::shared_ptr<const Impl> impl_;
};

/// Builds the smoothed stadium of width r with its bottom midpoint at the
/// origin and center (0, r).  Throws DomainError for bad parameters and
/// ResolutionError when the nodes cannot resolve the smoothing window.
DomainSpec build_domain(double r, double beta, int node_count);

/// Homothetic copy x -> c + rho (x - c) about the domain center c.
DomainSpec rescaled(const DomainSpec& dom, double rho);

bool contains(const ClosedCurve& curve, Vec2 x);
inline Location locate(const ClosedCurve& curve, Vec2 x) { return curve.locate(x); }
inline BoundaryFrame boundary_point(const DomainSpec& dom, double s) { return dom.boundary_point(s); }

/// Distance from x to the boundary of the unsmoothed C^{1,1} unit stadium
/// centered at (0,1); x is assumed to lie inside it.
double stadium_wall_distance(Vec2 x);

}  // namespace cuspflow
