#include "cuspflow/barrier.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "cuspflow/error.hpp"
#include "cuspflow/periodic.hpp"

namespace cuspflow {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

std::vector<QuadratureNode> sample_curve(const ClosedCurve& c, int count) {
    std::vector<QuadratureNode> nodes(static_cast<std::size_t>(count));
    const double h = c.perimeter() / count;
    for (int j = 0; j < count; ++j) {
        const BoundaryFrame f = c.frame(j * h);
        nodes[static_cast<std::size_t>(j)] = {j * h, f.point, f.tangent, f.normal, f.curvature, h};
    }
    return nodes;
}

// Double-layer kernel with the layer normal multiplied by `sign`.
inline double dl_kernel(Vec2 x, const QuadratureNode& y, double sign) {
    const Vec2 r = x - y.point;
    return sign * kInvTwoPi * dot(r, y.normal) / norm2(r);
}

LayerSources layer_of(const std::vector<QuadratureNode>& nodes, double sign) {
    LayerSources l;
    for (const auto& q : nodes) {
        l.x.push_back(q.point.x);
        l.y.push_back(q.point.y);
        l.nx.push_back(sign * q.normal.x);
        l.ny.push_back(sign * q.normal.y);
        l.wmu.push_back(q.weight);
    }
    return l;
}

// (1/2π) Σ (wμ_p − c w_p) (x − y_p)·ν_p / |x − y_p|², skipping a coincident node
// (where the subtracted density vanishes).
double subtracted_layer(const LayerSources& dens, const LayerSources& unit, Vec2 x, double c) {
    double sum = 0.0;
    const std::size_t n = dens.size();
    for (std::size_t p = 0; p < n; ++p) {
        const double rx = x.x - dens.x[p];
        const double ry = x.y - dens.y[p];
        const double r2 = rx * rx + ry * ry;
        const double k = r2 > 0.0 ? (rx * dens.nx[p] + ry * dens.ny[p]) / r2 : 0.0;
        sum += (dens.wmu[p] - c * unit.wmu[p]) * k;
    }
    return kInvTwoPi * sum;
}

// Projection radius used to decide whether a point is close enough to a curve
// to need density subtraction.
double subtraction_radius(const ClosedCurve& c) { return 0.02 * c.perimeter(); }

}  // namespace

AnnulusSolver::AnnulusSolver(std::shared_ptr<const ClosedCurve> outer, std::shared_ptr<const ClosedCurve> inner, int n,
                             Vec2 hole, int matrix_upsample, int eval_upsample)
    : outer_(std::move(outer)), inner_(std::move(inner)), n_(n), hole_(hole), eval_upsample_(eval_upsample) {
    if (n < 64 || n % 2 != 0) throw DomainError("annulus node count must be even and at least 64");
    if (inner_->locate(hole) != Location::inside) throw DomainError("hole charge must lie inside the inner curve");
    outer_nodes_ = sample_curve(*outer_, n);
    inner_nodes_ = sample_curve(*inner_, n);
    unit_outer_ = layer_of(sample_curve(*outer_, n * eval_upsample), 1.0);
    unit_inner_ = layer_of(sample_curve(*inner_, n * eval_upsample), -1.0);
    const std::array<std::vector<QuadratureNode>, 2> mid = {sample_curve(*outer_, n * matrix_upsample),
                                                           sample_curve(*inner_, n * matrix_upsample)};

    const int dim = 2 * n + 1;
    matrix_ = Eigen::MatrixXd::Zero(dim, dim);
    // Layer normals point out of the region: outward on the outer curve,
    // into the hole on the inner one.  The layer of a constant density is
    // -1 inside the outer curve and 0 outside the inner one.
    const std::array<const std::vector<QuadratureNode>*, 2> coarse = {&outer_nodes_, &inner_nodes_};
    const std::array<const ClosedCurve*, 2> curves = {outer_.get(), inner_.get()};
    const std::array<double, 2> sign = {1.0, -1.0};
    const std::array<double, 2> constant_layer = {-1.0, 0.0};

    for (int a = 0; a < 2; ++a) {      // target curve
        for (int b = 0; b < 2; ++b) {  // source curve
            const auto& tgt = *coarse[static_cast<std::size_t>(a)];
            const auto& src = *coarse[static_cast<std::size_t>(b)];
            const double sg = sign[static_cast<std::size_t>(b)];
            if (a == b) {
#pragma omp parallel for schedule(static)
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        const double v = i == j ? -0.5 + sg * src[j].weight * src[j].curvature * 0.5 * kInvTwoPi
                                                : src[j].weight * dl_kernel(tgt[i].point, src[j], sg);
                        matrix_(a * n + i, b * n + j) = v;
                    }
                }
                continue;
            }
            const auto& fine = mid[static_cast<std::size_t>(b)];
            const ClosedCurve& curve = *curves[static_cast<std::size_t>(b)];
            const double spacing = curve.perimeter() / n;
            const double radius = subtraction_radius(curve);
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i) {
                std::vector<double> row(fine.size());
                double total = 0.0;
                for (std::size_t p = 0; p < fine.size(); ++p) {
                    row[p] = fine[p].weight * dl_kernel(tgt[i].point, fine[p], sg);
                    total += row[p];
                }
                const auto folded = trig_upsample_adjoint(row, matrix_upsample);
                const CurveProjection pr = curve.project(tgt[i].point, radius);
                for (int j = 0; j < n; ++j) {
                    double v = folded[static_cast<std::size_t>(j)];
                    if (pr.near) {
                        const double e = dirichlet_kernel(pr.s / spacing - j, static_cast<std::size_t>(n));
                        v += (constant_layer[static_cast<std::size_t>(b)] - total) * e;
                    }
                    matrix_(a * n + i, b * n + j) = v;
                }
            }
        }
        for (int i = 0; i < n; ++i) matrix_(a * n + i, 2 * n) = free_green((*coarse[static_cast<std::size_t>(a)])[i].point - hole_);
    }
    for (int j = 0; j < n; ++j) matrix_(2 * n, n + j) = inner_nodes_[static_cast<std::size_t>(j)].weight;

    lu_.compute(matrix_);
    const double rc = lu_.rcond();
    condition_ = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(condition_ <= 1e12)) {
        throw AssemblyError("annulus system is near singular (condition number " + std::to_string(condition_) + ")");
    }
}

AnnulusDensity AnnulusSolver::solve(std::span<const double> outer_data, std::span<const double> inner_data) const {
    if (outer_data.size() != static_cast<std::size_t>(n_) || inner_data.size() != static_cast<std::size_t>(n_)) {
        throw DomainError("annulus boundary data has the wrong length");
    }
    Eigen::VectorXd rhs(2 * n_ + 1);
    for (int i = 0; i < n_; ++i) {
        rhs(i) = outer_data[static_cast<std::size_t>(i)];
        rhs(n_ + i) = inner_data[static_cast<std::size_t>(i)];
    }
    rhs(2 * n_) = 0.0;
    if (!rhs.allFinite()) throw NumericalError("non-finite annulus boundary data");
    const Eigen::VectorXd x = lu_.solve(rhs);
    if ((matrix_ * x - rhs).norm() > 1e-10 * rhs.norm() + 1e-300) throw NumericalError("annulus solve residual too large");

    AnnulusDensity d;
    d.mu_outer.assign(x.data(), x.data() + n_);
    d.mu_inner.assign(x.data() + n_, x.data() + 2 * n_);
    d.charge = x(2 * n_);
    d.interp_outer = TrigInterpolant(d.mu_outer, outer_->perimeter());
    d.interp_inner = TrigInterpolant(d.mu_inner, inner_->perimeter());
    d.fine_outer = unit_outer_;
    d.fine_inner = unit_inner_;
    const auto fo = trig_upsample(d.mu_outer, eval_upsample_);
    const auto fi = trig_upsample(d.mu_inner, eval_upsample_);
    for (std::size_t p = 0; p < fo.size(); ++p) d.fine_outer.wmu[p] *= fo[p];
    for (std::size_t p = 0; p < fi.size(); ++p) d.fine_inner.wmu[p] *= fi[p];
    return d;
}

void AnnulusSolver::evaluate(const AnnulusDensity& d, std::span<const Vec2> xs, std::span<double> out) const {
    const long m = static_cast<long>(xs.size());
    const double ro = subtraction_radius(*outer_);
    const double ri = subtraction_radius(*inner_);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < m; ++i) {
        const Vec2 x = xs[static_cast<std::size_t>(i)];
        const CurveProjection po = outer_->project(x, ro);
        const CurveProjection pi = inner_->project(x, ri);
        const double co = po.near ? d.interp_outer.value(po.s) : 0.0;
        const double ci = pi.near ? d.interp_inner.value(pi.s) : 0.0;
        double v = subtracted_layer(d.fine_outer, unit_outer_, x, co) - co;
        v += subtracted_layer(d.fine_inner, unit_inner_, x, ci);
        out[static_cast<std::size_t>(i)] = v + d.charge * free_green(x - hole_);
    }
}

double AnnulusSolver::evaluate(const AnnulusDensity& d, Vec2 x) const {
    double v = 0.0;
    evaluate(d, std::span<const Vec2>(&x, 1), std::span<double>(&v, 1));
    return v;
}

void HopfBarrier::values(std::span<const Vec2> xs, std::span<double> out) const {
    solver->evaluate(unit, xs, out);
    for (auto& v : out) v *= kappa;
}

HopfBarrier solve_barrier(std::shared_ptr<const ClosedCurve> outer, std::shared_ptr<const ClosedCurve> inner, Vec2 hole,
                          double delta, double kappa, int n) {
    if (!(kappa > 0.0)) throw DomainError("barrier level kappa must be positive");
    HopfBarrier b;
    b.delta = delta;
    b.kappa = kappa;
    b.solver = std::make_shared<const AnnulusSolver>(std::move(outer), std::move(inner), n, hole);
    b.unit = b.solver->solve(std::vector<double>(static_cast<std::size_t>(n), 0.0),
                             std::vector<double>(static_cast<std::size_t>(n), 1.0));
    return b;
}

HopfBarrier solve_barrier(const DomainSpec& dom, double delta, double kappa, int n) {
    if (!(delta > 0.0 && delta < 0.5)) throw DomainError("barrier delta must lie in (0, 0.5)");
    return solve_barrier(std::make_shared<DomainSpec>(dom), std::make_shared<DomainSpec>(dom.rescaled(1.0 - delta)),
                         dom.center(), delta, kappa, n);
}

Vec2 annulus_point(const ClosedCurve& outer, Vec2 center, double rho, double s, double t) {
    const Vec2 p = outer.frame(s).point;
    const Vec2 q = center + rho * (p - center);
    return p + t * (q - p);
}

}  // namespace cuspflow
