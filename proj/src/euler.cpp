#include "cuspflow/euler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cuspflow/error.hpp"

namespace cuspflow {

namespace {

double ramp_tail(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Axis-aligned box containing the curve, padded by `pad`.
std::pair<Vec2, Vec2> bounding_box(const ClosedCurve& curve, double pad) {
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    constexpr int samples = 2048;
    for (int i = 0; i < samples; ++i) {
        const Vec2 p = curve.frame(curve.perimeter() * i / samples).point;
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    return {{lo.x - pad, lo.y - pad}, {hi.x + pad, hi.y + pad}};
}

// Grid {(i h, (j + ½) h)} restricted to the box.
template <class F>
void for_each_grid_point(Vec2 lo, Vec2 hi, double h, F&& f) {
    const long i0 = static_cast<long>(std::floor(lo.x / h));
    const long i1 = static_cast<long>(std::ceil(hi.x / h));
    const long j0 = static_cast<long>(std::floor(lo.y / h - 0.5));
    const long j1 = static_cast<long>(std::ceil(hi.y / h - 0.5));
    for (long j = j0; j <= j1; ++j) {
        for (long i = i0; i <= i1; ++i) f(Vec2{static_cast<double>(i) * h, (static_cast<double>(j) + 0.5) * h});
    }
}

void check_finite(std::span<const Vec2> u) {
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (!std::isfinite(u[j].x) || !std::isfinite(u[j].y)) {
            throw NumericalError("non-finite velocity at particle " + std::to_string(j));
        }
    }
}

}  // namespace

double smooth_ramp(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = ramp_tail(t);
    return a / (a + ramp_tail(1.0 - t));
}

double InitialData::operator()(Vec2 x) const {
    double w = smooth_ramp((x.y - a0) / (a1 - a0));
    if (profile == Profile::interior && w > 0.0) w *= smooth_ramp((stadium_wall_distance(x) - 0.3) / 0.2);
    return w;
}

double superlevel_measure(const ClosedCurve& curve, const InitialData& data, double level, double h) {
    const auto [lo, hi] = bounding_box(curve, h);
    double area = 0.0;
    for_each_grid_point(lo, hi, h, [&](Vec2 p) {
        if (curve.locate(p) != Location::outside && data(p) >= level) area += h * h;
    });
    return area;
}

void validate_initial_data(const DomainSpec& dom, const InitialData& data) {
    if (!(data.a0 >= 0.0 && data.a1 > data.a0)) throw ConfigError("initial data needs 0 <= a0 < a1");
    if (!(data.delta > 0.0 && data.delta <= 0.1)) throw ConfigError("initial data delta must lie in (0, 0.1]");
    const double m = superlevel_measure(dom, data, data.delta, 0.01);
    if (!(m >= 30.0 * data.delta)) {
        throw ConfigError("superlevel set {w0 >= delta} has area " + std::to_string(m) + " < 30 delta");
    }
}

std::vector<Vec2> FlowState::positions() const {
    std::vector<Vec2> p(size());
    for (std::size_t j = 0; j < size(); ++j) p[j] = position(j);
    return p;
}

double FlowState::circulation() const {
    double c = 0.0;
    for (std::size_t j = 0; j < size(); ++j) c += area[j] * w[j];
    return c;
}

BlobSources FlowState::sources() const {
    BlobSources s;
    s.x = x;
    s.y = y;
    s.q.resize(size());
    for (std::size_t j = 0; j < size(); ++j) s.q[j] = area[j] * w[j];
    return s;
}

FlowState init_particles(const ClosedCurve& curve, const std::function<double(Vec2)>& omega, double h,
                         double blob_eps, Vec2 marker_point) {
    if (!(h > 0.0 && h <= 0.05)) throw ConfigError("particle spacing h must lie in (0, 0.05]");
    if (!(blob_eps > 0.0)) throw ConfigError("blob radius must be positive");
    FlowState s;
    s.blob_eps = blob_eps;
    const auto [lo, hi] = bounding_box(curve, h);
    for_each_grid_point(lo, hi, h, [&](Vec2 p) {
        if (curve.locate(p) != Location::inside) return;
        const double w = omega(p);
        if (w == 0.0) return;
        s.x.push_back(p.x);
        s.y.push_back(p.y);
        s.w.push_back(w);
        s.area.push_back(h * h);
    });
    if (s.size() == 0) throw ConfigError("initial vorticity has no particles");
    s.marker_s = curve.project(marker_point, 0.1 * curve.perimeter()).s;
    return s;
}

FlowState init_particles(const DomainSpec& dom, const InitialData& data, double h, double blob_eps_factor) {
    return init_particles(dom, [&data](Vec2 p) { return data(p); }, h, blob_eps_factor * h, {0.0, 2.0 * dom.r()});
}

StreamField::StreamField(const LaplaceSolver& solver, BlobSources src, double blob_eps)
    : solver_(&solver), src_(std::move(src)), eps_(blob_eps) {
    const auto nodes = solver.nodes();
    std::vector<Vec2> pts(nodes.size());
    for (std::size_t j = 0; j < pts.size(); ++j) pts[j] = nodes[j].point;
    std::vector<double> g(pts.size());
    blob_stream_parallel(src_, eps_, pts, g);
    for (auto& v : g) v = -v;
    correction_ = solver.solve_dirichlet(g);
}

void StreamField::stream(std::span<const Vec2> targets, std::span<double> out) const {
    blob_stream_parallel(src_, eps_, targets, out);
    std::vector<FieldValue> hc(targets.size());
    solver_->evaluate(correction_, targets, hc, TargetPolicy::band);
    for (std::size_t i = 0; i < targets.size(); ++i) out[i] += hc[i].value;
}

void StreamField::velocity(std::span<const Vec2> targets, std::span<Vec2> out) const {
    blob_velocity_parallel(src_, eps_, targets, out);
    std::vector<FieldValue> hc(targets.size());
    solver_->evaluate(correction_, targets, hc, TargetPolicy::band);
    for (std::size_t i = 0; i < targets.size(); ++i) out[i] += perp(hc[i].gradient);
    check_finite(out);
}

double StreamField::boundary_speed(double s) const {
    double a = 0.0;
    boundary_speed(std::span<const double>(&s, 1), std::span<double>(&a, 1));
    return a;
}

void StreamField::boundary_speed(std::span<const double> s, std::span<double> out) const {
    const double hn = solver_->near_band();
    std::vector<Vec2> p(2 * s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        const BoundaryFrame f = solver_->curve().frame(s[k]);
        p[2 * k] = f.point - hn * f.normal;
        p[2 * k + 1] = f.point - 2.0 * hn * f.normal;
    }
    std::vector<double> psi(p.size());
    stream(p, psi);
    for (std::size_t k = 0; k < s.size(); ++k) out[k] = (4.0 * psi[2 * k] - psi[2 * k + 1]) / (2.0 * hn);
}

std::vector<Vec2> velocity(const LaplaceSolver& solver, const FlowState& state, std::span<const Vec2> targets) {
    const StreamField field(solver, state.sources(), state.blob_eps);
    std::vector<Vec2> u(targets.size());
    field.velocity(targets, u);
    return u;
}

double boundary_speed(const LaplaceSolver& solver, const FlowState& state, double s) {
    return StreamField(solver, state.sources(), state.blob_eps).boundary_speed(s);
}

VelocityProvider biot_savart(const LaplaceSolver& solver, const FlowState& state) {
    const BlobSources base = state.sources();
    const double eps = state.blob_eps;
    return [&solver, q = base.q, eps](std::span<const Vec2> pos, double marker_s, double) {
        BlobSources src;
        src.q = q;
        src.x.resize(pos.size());
        src.y.resize(pos.size());
        for (std::size_t j = 0; j < pos.size(); ++j) {
            src.x[j] = pos[j].x;
            src.y[j] = pos[j].y;
        }
        const StreamField field(solver, std::move(src), eps);
        StageVelocity v;
        v.u.resize(pos.size());
        field.velocity(pos, v.u);
        v.marker_speed = field.boundary_speed(marker_s);
        return v;
    };
}

FlowState step(const VelocityProvider& velocity, const ClosedCurve& curve, const FlowState& state, double dt, double h,
               StepInfo* info) {
    if (!(dt > 0.0)) throw StepSizeError("time step must be positive");
    const std::size_t n = state.size();
    const std::vector<Vec2> x0 = state.positions();

    const StageVelocity k1 = velocity(x0, state.marker_s, state.t);
    double umax = 0.0;
    for (const Vec2& u : k1.u) umax = std::max(umax, norm(u));
    if (dt * umax > 0.5 * h) {
        throw StepSizeError("CFL guard violated at t = " + std::to_string(state.t) + ": dt max|u| = " +
                            std::to_string(dt * umax) + " > h/2");
    }

    std::vector<Vec2> xs(n);
    auto stage = [&](const StageVelocity& k, double c) {
        for (std::size_t j = 0; j < n; ++j) xs[j] = x0[j] + (c * dt) * k.u[j];
    };
    stage(k1, 0.5);
    const StageVelocity k2 = velocity(xs, state.marker_s + 0.5 * dt * k1.marker_speed, state.t + 0.5 * dt);
    stage(k2, 0.5);
    const StageVelocity k3 = velocity(xs, state.marker_s + 0.5 * dt * k2.marker_speed, state.t + 0.5 * dt);
    stage(k3, 1.0);
    const StageVelocity k4 = velocity(xs, state.marker_s + dt * k3.marker_speed, state.t + dt);

    FlowState next = state;
    next.t = state.t + dt;
    next.marker_s = state.marker_s + dt / 6.0 *
                                         (k1.marker_speed + 2.0 * k2.marker_speed + 2.0 * k3.marker_speed +
                                          k4.marker_speed);
    int projected = 0;
    for (std::size_t j = 0; j < n; ++j) {
        Vec2 p = x0[j] + (dt / 6.0) * (k1.u[j] + 2.0 * k2.u[j] + 2.0 * k3.u[j] + k4.u[j]);
        if (curve.locate(p) == Location::outside) {
            const CurveProjection pr = curve.project(p, 0.05);
            if (!pr.near || pr.distance < -1e-3) {
                throw AccuracyAbort("particle " + std::to_string(j) + " left the domain by more than 1e-3 at t = " +
                                    std::to_string(next.t));
            }
            p = pr.frame.point;
            ++projected;
        }
        next.x[j] = p.x;
        next.y[j] = p.y;
    }
    next.projections += projected;
    if (static_cast<double>(next.projections) > 1e-3 * static_cast<double>(n) * std::max(next.t, 1.0)) {
        throw AccuracyAbort("boundary projections (" + std::to_string(next.projections) +
                            ") exceed 0.1% of the particles per unit time at t = " + std::to_string(next.t));
    }
    if (info) *info = {umax, k1.marker_speed, projected};
    return next;
}

Reconstruction reconstruct_omega(const FlowState& state, Vec2 x, double radius) {
    const double r2 = radius * radius;
    double num = 0.0, den = 0.0;
    Reconstruction rec;
    bool nearby = false;
    for (std::size_t j = 0; j < state.size(); ++j) {
        const double dx = state.x[j] - x.x;
        const double dy = state.y[j] - x.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 > 4.0 * r2) continue;
        nearby = true;
        if (d2 > r2) continue;
        if (d2 == 0.0) return {state.w[j], true, 1};
        num += state.w[j] / d2;
        den += 1.0 / d2;
        ++rec.neighbors;
    }
    if (rec.neighbors > 0) {
        rec.value = num / den;
    } else {
        rec.resolved = !nearby;
    }
    return rec;
}

}  // namespace cuspflow
