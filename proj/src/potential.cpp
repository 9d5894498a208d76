#include "cuspflow/potential.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "cuspflow/error.hpp"
#include "cuspflow/periodic.hpp"

namespace cuspflow {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

// Auxiliary distances of the near-boundary scheme in units of the band width;
// the boundary itself (t = 0) is the fifth interpolation node.
constexpr std::array<double, 4> kAux = {1.0, 4.0 / 3.0, 5.0 / 3.0, 2.0};

struct Lagrange {
    std::array<double, 5> value;
    std::array<double, 5> slope;
};

// Weights of the degree-4 interpolant through t = 0, kAux * band at t = d.
Lagrange lagrange_weights(double d, double band) {
    std::array<double, 5> t{0.0, kAux[0] * band, kAux[1] * band, kAux[2] * band, kAux[3] * band};
    Lagrange w{};
    for (int k = 0; k < 5; ++k) {
        double num = 1.0;
        double den = 1.0;
        double dsum = 0.0;
        for (int j = 0; j < 5; ++j) {
            if (j == k) continue;
            den *= t[k] - t[j];
            num *= d - t[j];
        }
        for (int j = 0; j < 5; ++j) {
            if (j == k) continue;
            double prod = 1.0;
            for (int m = 0; m < 5; ++m) {
                if (m != k && m != j) prod *= d - t[m];
            }
            dsum += prod;
        }
        w.value[k] = num / den;
        w.slope[k] = dsum / den;
    }
    return w;
}

struct TargetPlan {
    enum Kind : unsigned char { direct, fine, near, coarse_near, outside, on_boundary } kind{direct};
    double d{0.0};
    double s{0.0};
    BoundaryFrame foot;
};

}  // namespace

double free_green(Vec2 z) { return -0.5 * kInvTwoPi * std::log(norm2(z)); }

Vec2 free_green_gradient(Vec2 z) { return (-kInvTwoPi / norm2(z)) * z; }

LaplaceSolver::LaplaceSolver(std::shared_ptr<const ClosedCurve> curve, int n) : curve_(std::move(curve)) {
    if (n < 128 || n % 2 != 0) throw DomainError("quadrature size must be even and at least 128, got " + std::to_string(n));
    const double perimeter = curve_->perimeter();
    spacing_ = perimeter / n;
    near_band_ = 5.0 * spacing_;
    nodes_.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double s = j * spacing_;
        const BoundaryFrame f = curve_->frame(s);
        nodes_[static_cast<std::size_t>(j)] = {s, f.point, f.tangent, f.normal, f.curvature, spacing_};
    }

    const int nf = n * kUpsample;
    const double hf = perimeter / nf;
    for (auto* v : {&fine_nodes_.x, &fine_nodes_.y, &fine_nodes_.nx, &fine_nodes_.ny, &fine_nodes_.wmu}) {
        v->resize(static_cast<std::size_t>(nf));
    }
    for (int j = 0; j < nf; ++j) {
        const BoundaryFrame f = curve_->frame(j * hf);
        const auto k = static_cast<std::size_t>(j);
        fine_nodes_.x[k] = f.point.x;
        fine_nodes_.y[k] = f.point.y;
        fine_nodes_.nx[k] = f.normal.x;
        fine_nodes_.ny[k] = f.normal.y;
        fine_nodes_.wmu[k] = hf;
    }

    matrix_.resize(n, n);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        const QuadratureNode& y = nodes_[static_cast<std::size_t>(j)];
        for (int i = 0; i < n; ++i) {
            if (i == j) {
                matrix_(i, j) = -0.5 + y.weight * y.curvature * 0.5 * kInvTwoPi;
            } else {
                const Vec2 r = nodes_[static_cast<std::size_t>(i)].point - y.point;
                matrix_(i, j) = y.weight * kInvTwoPi * dot(r, y.normal) / norm2(r);
            }
        }
    }
    lu_.compute(matrix_);
    const double rc = lu_.rcond();
    condition_ = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(condition_ <= 1e12)) {
        throw AssemblyError("double-layer matrix is near singular (condition number " + std::to_string(condition_) + ")");
    }
}

Density LaplaceSolver::make_density(std::vector<double> mu, std::vector<double> g) const {
    Density d;
    d.trace = TrigInterpolant(g, curve_->perimeter());
    d.layer.x.resize(nodes_.size());
    d.layer.y.resize(nodes_.size());
    d.layer.nx.resize(nodes_.size());
    d.layer.ny.resize(nodes_.size());
    d.layer.wmu.resize(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        d.layer.x[j] = nodes_[j].point.x;
        d.layer.y[j] = nodes_[j].point.y;
        d.layer.nx[j] = nodes_[j].normal.x;
        d.layer.ny[j] = nodes_[j].normal.y;
        d.layer.wmu[j] = nodes_[j].weight * mu[j];
    }
    d.fine = fine_nodes_;
    const std::vector<double> mf = trig_upsample(mu, kUpsample);
    for (std::size_t j = 0; j < mf.size(); ++j) d.fine.wmu[j] *= mf[j];
    d.mu = std::move(mu);
    d.data = std::move(g);
    return d;
}

Density LaplaceSolver::solve_dirichlet(std::span<const double> g) const {
    if (g.size() != nodes_.size()) {
        throw DomainError("boundary data has " + std::to_string(g.size()) + " entries, expected " +
                          std::to_string(nodes_.size()));
    }
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (!std::isfinite(g[j])) throw NumericalError("non-finite boundary datum at node " + std::to_string(j));
    }
    const Eigen::Map<const Eigen::VectorXd> rhs(g.data(), static_cast<Eigen::Index>(g.size()));
    Eigen::VectorXd mu = lu_.solve(rhs);
    const double res = (matrix_ * mu - rhs).norm();
    std::vector<double> m(mu.data(), mu.data() + mu.size());
    Density d = make_density(std::move(m), std::vector<double>(g.begin(), g.end()));
    d.residual = res;
    if (res > 1e-10 * rhs.norm() + 1e-300) {
        throw NumericalError("double-layer solve residual " + std::to_string(res) + " exceeds tolerance");
    }
    return d;
}

std::vector<Density> LaplaceSolver::solve_dirichlet(const Eigen::MatrixXd& g) const {
    if (g.rows() != static_cast<Eigen::Index>(nodes_.size())) throw DomainError("boundary data has wrong row count");
    if (!g.allFinite()) throw NumericalError("non-finite boundary data");
    const Eigen::MatrixXd mu = lu_.solve(g);
    const Eigen::VectorXd res = (matrix_ * mu - g).colwise().norm();
    std::vector<Density> out;
    out.reserve(static_cast<std::size_t>(g.cols()));
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
        std::vector<double> m(mu.col(c).data(), mu.col(c).data() + mu.rows());
        std::vector<double> d(g.col(c).data(), g.col(c).data() + g.rows());
        out.push_back(make_density(std::move(m), std::move(d)));
        out.back().residual = res(c);
        if (res(c) > 1e-10 * g.col(c).norm() + 1e-300) {
            throw NumericalError("double-layer solve residual exceeds tolerance in column " + std::to_string(c));
        }
    }
    return out;
}

FieldValue LaplaceSolver::evaluate_direct(const Density& mu, Vec2 x) const { return double_layer_serial(mu.layer, x); }

void LaplaceSolver::evaluate(const Density& mu, std::span<const Vec2> targets, std::span<FieldValue> out,
                             TargetPolicy policy, const BoundaryTrace& trace) const {
    const long nt = static_cast<long>(targets.size());
    std::vector<TargetPlan> plan(targets.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < nt; ++i) {
        const CurveProjection pr = curve_->project(targets[i], near_band_);
        TargetPlan& p = plan[static_cast<std::size_t>(i)];
        if (!pr.near) {
            p.kind = pr.distance > 0.0 ? TargetPlan::direct : TargetPlan::outside;
            continue;
        }
        p.d = pr.distance;
        p.s = pr.s;
        p.foot = pr.frame;
        p.kind = TargetPlan::near;
        switch (policy) {
            case TargetPolicy::interior:
                if (p.d <= 0.0) p.kind = p.d < -1e-9 ? TargetPlan::outside : TargetPlan::on_boundary;
                break;
            case TargetPolicy::closure:
                if (p.d < -1e-9) p.kind = TargetPlan::outside;
                p.d = std::max(p.d, 0.0);
                break;
            case TargetPolicy::band:
                break;
        }
        if (p.kind == TargetPlan::near) {
            if (p.d >= fine_band()) {
                p.kind = TargetPlan::fine;
            } else if (p.d < -fine_band()) {
                p.kind = TargetPlan::coarse_near;
            }
        }
    }

    // Coarse points are evaluated with the node layer, fine points with the upsampled one.
    std::vector<Vec2> coarse, fine;
    std::vector<std::size_t> first(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const TargetPlan& p = plan[i];
        if (p.kind == TargetPlan::outside || p.kind == TargetPlan::on_boundary) {
            throw DomainError("evaluation point (" + std::to_string(targets[i].x) + ", " + std::to_string(targets[i].y) +
                              ") is " + (p.kind == TargetPlan::outside ? "outside the domain" : "on the boundary"));
        }
        switch (p.kind) {
            case TargetPlan::direct:
                first[i] = coarse.size();
                coarse.push_back(targets[i]);
                break;
            case TargetPlan::coarse_near:
                first[i] = coarse.size();
                for (double a : kAux) coarse.push_back(p.foot.point - (a * near_band_) * p.foot.normal);
                break;
            case TargetPlan::fine:
                first[i] = fine.size();
                fine.push_back(targets[i]);
                break;
            default:
                first[i] = fine.size();
                for (double a : kAux) fine.push_back(p.foot.point - (a * fine_band()) * p.foot.normal);
                break;
        }
    }
    std::vector<FieldValue> coarse_val(coarse.size());
    std::vector<FieldValue> fine_val(fine.size());
    if (!coarse.empty()) double_layer_parallel(mu.layer, coarse, coarse_val);
    if (!fine.empty()) double_layer_parallel(mu.fine, fine, fine_val);

    const double period = curve_->perimeter();
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const TargetPlan& p = plan[i];
        if (p.kind == TargetPlan::direct) {
            out[i] = coarse_val[first[i]];
            continue;
        }
        if (p.kind == TargetPlan::fine) {
            out[i] = fine_val[first[i]];
            continue;
        }
        const bool coarse_aux = p.kind == TargetPlan::coarse_near;
        const FieldValue* aux = coarse_aux ? &coarse_val[first[i]] : &fine_val[first[i]];
        const TraceValue anchor = trace ? trace(p.s, p.foot)
                                        : TraceValue{mu.trace.value(std::fmod(p.s, period)),
                                                     mu.trace.derivative(std::fmod(p.s, period))};
        const Lagrange w = lagrange_weights(p.d, coarse_aux ? near_band_ : fine_band());
        double value = w.value[0] * anchor.value;
        double slope = w.slope[0] * anchor.value;
        double tangential = w.value[0] * anchor.tangential;
        for (std::size_t k = 0; k < kAux.size(); ++k) {
            value += w.value[k + 1] * aux[k].value;
            slope += w.slope[k + 1] * aux[k].value;
            tangential += w.value[k + 1] * dot(aux[k].gradient, p.foot.tangent);
        }
        out[i] = FieldValue{value, tangential * p.foot.tangent - slope * p.foot.normal};
    }
}

FieldValue LaplaceSolver::evaluate(const Density& mu, Vec2 x, TargetPolicy policy, const BoundaryTrace& trace) const {
    FieldValue f;
    evaluate(mu, std::span<const Vec2>(&x, 1), std::span<FieldValue>(&f, 1), policy, trace);
    return f;
}

FieldValue LaplaceSolver::boundary_limit(const Density& mu, double s, const BoundaryTrace& trace) const {
    const BoundaryFrame foot = curve_->frame(s);
    const double period = curve_->perimeter();
    double sm = std::fmod(s, period);
    if (sm < 0.0) sm += period;
    const TraceValue anchor = trace ? trace(sm, foot) : TraceValue{mu.trace.value(sm), mu.trace.derivative(sm)};
    std::array<Vec2, 4> aux;
    for (std::size_t k = 0; k < kAux.size(); ++k) aux[k] = foot.point - (kAux[k] * fine_band()) * foot.normal;
    std::array<FieldValue, 4> f;
    double_layer_parallel(mu.fine, aux, f);
    const Lagrange w = lagrange_weights(0.0, fine_band());
    double slope = w.slope[0] * anchor.value;
    for (std::size_t k = 0; k < kAux.size(); ++k) slope += w.slope[k + 1] * f[k].value;
    return FieldValue{anchor.value, anchor.tangential * foot.tangent - slope * foot.normal};
}

LaplaceSolver assemble(const DomainSpec& dom, int n) { return LaplaceSolver(std::make_shared<DomainSpec>(dom), n); }

LaplaceSolver assemble(const Circle& circle, int n) { return LaplaceSolver(std::make_shared<Circle>(circle), n); }

FieldValue eval_harmonic(const LaplaceSolver& solver, const Density& mu, Vec2 x) {
    return solver.evaluate(mu, x, TargetPolicy::interior);
}

// ---------------------------------------------------------------------------

namespace {

ImageCharge place_source(const LaplaceSolver& solver, Vec2 y, SourceTreatment treatment) {
    const double band = 10.0 * solver.near_band();
    const CurveProjection pr = solver.curve().project(y, band);
    if (pr.distance <= 0.0 || (pr.near && pr.distance <= 1e-12)) {
        throw DomainError("source point (" + std::to_string(y.x) + ", " + std::to_string(y.y) + ") is not inside the domain");
    }
    if (!pr.near || treatment == SourceTreatment::plain) return {};
    const double bend = -pr.frame.curvature;
    if (bend < 1e-6) return {true, y + (2.0 * pr.distance) * pr.frame.normal, 0.0};
    const double radius = 1.0 / bend;
    const Vec2 c = pr.frame.point - radius * pr.frame.normal;
    const double rho = norm(y - c);
    return {true, c + (radius * radius / (rho * rho)) * (y - c), kInvTwoPi * std::log(rho / radius)};
}

}  // namespace

std::vector<double> GreenSource::remainder_data(const LaplaceSolver& solver, Vec2 y, const ImageCharge& image) {
    std::vector<double> g(static_cast<std::size_t>(solver.size()));
    const auto nodes = solver.nodes();
    for (std::size_t j = 0; j < g.size(); ++j) {
        g[j] = -free_green(nodes[j].point - y);
        if (image.active) g[j] += free_green(nodes[j].point - image.point) - image.constant;
    }
    return g;
}

GreenSource::GreenSource(const LaplaceSolver& solver, Vec2 y, SourceTreatment treatment)
    : solver_(&solver), y_(y) {
    image_ = place_source(solver, y, treatment);
    h_ = solver.solve_dirichlet(remainder_data(solver, y, image_));
}

GreenSource::GreenSource(const LaplaceSolver& solver, Vec2 y, ImageCharge image, Density h)
    : solver_(&solver), y_(y), image_(image), h_(std::move(h)) {}

TraceValue GreenSource::remainder_trace(const BoundaryFrame& f) const {
    double v = -free_green(f.point - y_);
    Vec2 g = -free_green_gradient(f.point - y_);
    if (image_.active) {
        v += free_green(f.point - image_.point) - image_.constant;
        g += free_green_gradient(f.point - image_.point);
    }
    return {v, dot(g, f.tangent)};
}

FieldValue GreenSource::singular_part(Vec2 x) const {
    const Vec2 z = x - y_;
    if (norm(z) < 1e-12) throw SingularityError("Green's function evaluated at its source");
    FieldValue f{free_green(z), free_green_gradient(z)};
    if (image_.active) {
        f.value += image_.constant - free_green(x - image_.point);
        f.gradient -= free_green_gradient(x - image_.point);
    }
    return f;
}

void GreenSource::field(std::span<const Vec2> xs, std::span<FieldValue> out) const {
    const BoundaryTrace trace = [this](double, const BoundaryFrame& f) { return remainder_trace(f); };
    solver_->evaluate(h_, xs, out, TargetPolicy::closure, trace);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const FieldValue s = singular_part(xs[i]);
        out[i].value += s.value;
        out[i].gradient += s.gradient;
    }
}

FieldValue GreenSource::field(Vec2 x) const {
    FieldValue f;
    field(std::span<const Vec2>(&x, 1), std::span<FieldValue>(&f, 1));
    return f;
}

std::vector<GreenSource> green_sources(const LaplaceSolver& solver, std::span<const Vec2> ys) {
    std::vector<ImageCharge> images(ys.size());
    Eigen::MatrixXd g(solver.size(), static_cast<Eigen::Index>(ys.size()));
    for (std::size_t c = 0; c < ys.size(); ++c) {
        images[c] = place_source(solver, ys[c], SourceTreatment::image_near_wall);
        const auto col = GreenSource::remainder_data(solver, ys[c], images[c]);
        g.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::VectorXd>(col.data(), solver.size());
    }
    auto dens = solver.solve_dirichlet(g);
    std::vector<GreenSource> out;
    out.reserve(ys.size());
    for (std::size_t c = 0; c < ys.size(); ++c) out.push_back(GreenSource(solver, ys[c], images[c], std::move(dens[c])));
    return out;
}

double green_function(const LaplaceSolver& solver, Vec2 x, Vec2 y, SourceTreatment treatment) {
    if (solver.curve().locate(x) != Location::inside) throw DomainError("green_function: target is not inside the domain");
    return GreenSource(solver, y, treatment).value(x);
}

Vec2 green_kernel(const LaplaceSolver& solver, Vec2 x, Vec2 y, SourceTreatment treatment) {
    return GreenSource(solver, y, treatment).kernel(x);
}

}  // namespace cuspflow
