#include "cuspflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "cuspflow/error.hpp"
#include "cuspflow/periodic.hpp"

namespace cuspflow {

namespace {

constexpr double kPi = std::numbers::pi;

using Gauss = boost::math::quadrature::gauss<double, 20>;

template <class F>
auto gauss_integrate(const F& f, double a, double b) {
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    auto sum = (f(c + h * x[0]) + f(c - h * x[0])) * w[0];
    for (std::size_t i = 1; i < x.size(); ++i) sum += (f(c + h * x[i]) + f(c - h * x[i])) * w[i];
    return sum * h;
}

double bump(double t) {
    if (t <= -1.0 || t >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

/// One quarter of the unit-width stadium (r = 1, unsmoothed center (0,1)):
/// from the bottom midpoint (0,0), heading in -x1, to the left-arc midpoint.
/// The curvature profile 0 / -1 is mollified with a C^∞ bump of half-width w.
class MollifiedProfile {
  public:
    explicit MollifiedProfile(double w) : w_(w) {
        const int nt = 256;
        dt_ = 2.0 / nt;
        cdf_.resize(nt + 1);
        mom_.resize(nt + 1);
        cdf_[0] = mom_[0] = 0.0;
        for (int k = 0; k < nt; ++k) {
            const double a = -1.0 + k * dt_;
            const double b = a + dt_;
            cdf_[k + 1] = cdf_[k] + gauss_integrate(bump, a, b);
            mom_[k + 1] = mom_[k] + gauss_integrate([](double t) { return t * bump(t); }, a, b);
        }
        mass_ = cdf_.back();

        quarter_ = 1.0 + 0.5 * kPi;
        const int nu = 1024;
        du_ = quarter_ / nu;
        pos_.resize(nu + 1);
        pos_[0] = Vec2{0.0, 0.0};
        for (int k = 0; k < nu; ++k) pos_[k + 1] = pos_[k] + integrate_tangent(k * du_, (k + 1) * du_);
        end_ = position(quarter_);
    }

    double half_width() const { return w_; }
    double quarter() const { return quarter_; }
    Vec2 quarter_end() const { return end_; }

    double theta(double u) const {
        const double y = u - 1.0;
        if (y <= -w_) return kPi;
        if (y >= w_) return kPi - y;
        const double t = y / w_;
        const double psi = cdf(t) / mass_;
        const double m = w_ * moment(t) / mass_;
        return kPi - (y * psi - m);
    }

    double curvature(double u) const {
        const double y = u - 1.0;
        if (y <= -w_) return 0.0;
        if (y >= w_) return -1.0;
        return -cdf(y / w_) / mass_;
    }

    Vec2 position(double u) const {
        u = std::clamp(u, 0.0, quarter_);
        std::size_t k = static_cast<std::size_t>(u / du_);
        if (k >= pos_.size() - 1) k = pos_.size() - 2;
        const double a = static_cast<double>(k) * du_;
        return pos_[k] + integrate_tangent(a, u);
    }

  private:
    Vec2 integrate_tangent(double a, double b) const {
        if (b <= a) return Vec2{};
        return gauss_integrate(
            [this](double u) {
                const double th = theta(u);
                return Vec2{std::cos(th), std::sin(th)};
            },
            a, b);
    }

    double cdf(double t) const { return table_integral(cdf_, t, bump); }
    double moment(double t) const {
        return table_integral(mom_, t, [](double x) { return x * bump(x); });
    }

    template <class F>
    double table_integral(const std::vector<double>& table, double t, const F& f) const {
        t = std::clamp(t, -1.0, 1.0);
        std::size_t k = static_cast<std::size_t>((t + 1.0) / dt_);
        if (k >= table.size() - 1) k = table.size() - 2;
        const double a = -1.0 + static_cast<double>(k) * dt_;
        return table[k] + (t > a ? gauss_integrate(f, a, t) : 0.0);
    }

    double w_;
    double dt_{0.0};
    double mass_{1.0};
    std::vector<double> cdf_;
    std::vector<double> mom_;
    double quarter_{0.0};
    double du_{0.0};
    std::vector<Vec2> pos_;
    Vec2 end_;
};

struct UnitFrame {
    Vec2 p;
    Vec2 tau;
    double kappa;
};

UnitFrame quarter_frame(const MollifiedProfile& prof, double u) {
    const double th = prof.theta(u);
    return {prof.position(u), {std::cos(th), std::sin(th)}, prof.curvature(u)};
}

// Full closed unit curve by reflecting the quarter across x2 = y_q and x1 = 0.
UnitFrame unit_frame(const MollifiedProfile& prof, double u) {
    const double q = prof.quarter();
    const double period = 4.0 * q;
    u = std::fmod(u, period);
    if (u < 0.0) u += period;
    auto half = [&](double v) -> UnitFrame {
        if (v <= q) return quarter_frame(prof, v);
        const UnitFrame f = quarter_frame(prof, 2.0 * q - v);
        const double yq = prof.quarter_end().y;
        return {{f.p.x, 2.0 * yq - f.p.y}, {-f.tau.x, f.tau.y}, f.kappa};
    };
    if (u <= 2.0 * q) return half(u);
    const UnitFrame f = half(period - u);
    return {{-f.p.x, f.p.y}, {f.tau.x, -f.tau.y}, f.kappa};
}

Vec2 normal_of(Vec2 tangent) { return {-tangent.y, tangent.x}; }

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = norm2(ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

// Nonzero winding number of the closed polygon around p.
int winding_number(std::span<const BoundaryNode> nodes, Vec2 p) {
    int wn = 0;
    const std::size_t m = nodes.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2 a = nodes[i].frame.point;
        const Vec2 b = nodes[(i + 1) % m].frame.point;
        const double c = cross(b - a, p - a);
        if (a.y <= p.y) {
            if (b.y > p.y && c > 0.0) ++wn;
        } else {
            if (b.y <= p.y && c < 0.0) --wn;
        }
    }
    return wn;
}

}  // namespace

// ---------------------------------------------------------------------------

Circle::Circle(Vec2 center, double radius) : center_(center), radius_(radius) {
    if (!(radius > 0.0)) throw DomainError("circle radius must be positive");
}

double Circle::perimeter() const { return 2.0 * kPi * radius_; }

BoundaryFrame Circle::frame(double s) const {
    const double th = s / radius_;
    const Vec2 n{-std::sin(th), -std::cos(th)};
    return {center_ + radius_ * n, {n.y, -n.x}, n, -1.0 / radius_};
}

CurveProjection Circle::project(Vec2 x, double max_distance) const {
    const Vec2 v = x - center_;
    const double rr = norm(v);
    double th = rr > 0.0 ? std::atan2(-v.x, -v.y) : 0.0;
    if (th < 0.0) th += 2.0 * kPi;
    CurveProjection out;
    out.s = th * radius_;
    out.frame = frame(out.s);
    out.distance = radius_ - rr;
    out.near = std::abs(out.distance) <= max_distance;
    return out;
}

Location Circle::locate(Vec2 x) const {
    const double d = radius_ - norm(x - center_);
    if (std::abs(d) <= 1e-9) return Location::boundary;
    return d > 0.0 ? Location::inside : Location::outside;
}

// ---------------------------------------------------------------------------

namespace {

struct Locator {
    Vec2 lo;
    double cell{1.0};
    int nx{0};
    int ny{0};
    double candidate_radius{0.0};
    std::vector<double> lower_bound;
    std::vector<std::uint8_t> inside;
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> candidates;

    long index(Vec2 x) const {
        const double fx = (x.x - lo.x) / cell;
        const double fy = (x.y - lo.y) / cell;
        if (fx < 0.0 || fy < 0.0 || fx >= nx || fy >= ny) return -1;
        return static_cast<long>(fy) * nx + static_cast<long>(fx);
    }
};

}  // namespace

struct DomainSpec::Impl {
    std::shared_ptr<const MollifiedProfile> profile;
    double r{1.0};
    double beta{0.1};
    Vec2 origin;
    double scale{1.0};
    Vec2 center;
    double perimeter{0.0};
    std::vector<BoundaryNode> nodes;
    PeriodicQuinticSpline sx, sy, snx, sny, sk;
    Locator locator;

    BoundaryFrame exact(double s) const {
        const UnitFrame f = unit_frame(*profile, s / scale);
        return {origin + scale * f.p, f.tau, normal_of(f.tau), f.kappa / scale};
    }

    void finish();
    BoundaryFrame spline_frame(double s) const;
    CurveProjection newton(Vec2 x, std::size_t start, double max_distance) const;
};

BoundaryFrame DomainSpec::Impl::spline_frame(double s) const {
    const double spacing = perimeter / static_cast<double>(nodes.size());
    s = std::fmod(s, perimeter);
    if (s < 0.0) s += perimeter;
    const double u = s / spacing;
    const Vec2 n = normalized(Vec2{snx(u), sny(u)});
    return {{sx(u), sy(u)}, {n.y, -n.x}, n, sk(u)};
}

void DomainSpec::Impl::finish() {
    const std::size_t m = nodes.size();
    std::vector<double> cx(m), cy(m), cnx(m), cny(m), ck(m);
    for (std::size_t i = 0; i < m; ++i) {
        cx[i] = nodes[i].frame.point.x;
        cy[i] = nodes[i].frame.point.y;
        cnx[i] = nodes[i].frame.normal.x;
        cny[i] = nodes[i].frame.normal.y;
        ck[i] = nodes[i].frame.curvature;
    }
    sx = PeriodicQuinticSpline(cx);
    sy = PeriodicQuinticSpline(cy);
    snx = PeriodicQuinticSpline(cnx);
    sny = PeriodicQuinticSpline(cny);
    sk = PeriodicQuinticSpline(ck);

    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi = -lo;
    for (const auto& nd : nodes) {
        lo.x = std::min(lo.x, nd.frame.point.x);
        lo.y = std::min(lo.y, nd.frame.point.y);
        hi.x = std::max(hi.x, nd.frame.point.x);
        hi.y = std::max(hi.y, nd.frame.point.y);
    }
    Locator& L = locator;
    L.cell = 0.05 * scale;
    L.candidate_radius = 0.3 * scale;
    const double pad = L.candidate_radius + 2.0 * L.cell;
    L.lo = lo - Vec2{pad, pad};
    L.nx = static_cast<int>(std::ceil((hi.x - lo.x + 2.0 * pad) / L.cell));
    L.ny = static_cast<int>(std::ceil((hi.y - lo.y + 2.0 * pad) / L.cell));
    const std::size_t cells = static_cast<std::size_t>(L.nx) * static_cast<std::size_t>(L.ny);
    L.lower_bound.assign(cells, 0.0);
    L.inside.assign(cells, 0);
    L.offsets.assign(cells + 1, 0);
    const double half_diag = std::sqrt(0.5) * L.cell;
    const double spacing = perimeter / static_cast<double>(m);
    std::vector<std::uint32_t> cand;
    for (int j = 0; j < L.ny; ++j) {
        for (int i = 0; i < L.nx; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * L.nx + i;
            const Vec2 cc = L.lo + Vec2{(i + 0.5) * L.cell, (j + 0.5) * L.cell};
            double dmin = std::numeric_limits<double>::infinity();
            for (const auto& nd : nodes) dmin = std::min(dmin, distance(cc, nd.frame.point));
            L.lower_bound[c] = dmin - half_diag - 0.5 * spacing;
            L.inside[c] = winding_number(nodes, cc) != 0 ? 1 : 0;
            if (L.lower_bound[c] < L.candidate_radius) {
                const double keep = dmin + 2.0 * half_diag + spacing;
                for (std::size_t k = 0; k < m; ++k) {
                    if (distance(cc, nodes[k].frame.point) <= keep) cand.push_back(static_cast<std::uint32_t>(k));
                }
            }
            L.offsets[c + 1] = static_cast<std::uint32_t>(cand.size());
        }
    }
    L.candidates = std::move(cand);
}

CurveProjection DomainSpec::Impl::newton(Vec2 x, std::size_t start, double max_distance) const {
    double s = nodes[start].s;
    BoundaryFrame f = spline_frame(s);
    for (int it = 0; it < 30; ++it) {
        const Vec2 diff = f.point - x;
        const double g = dot(diff, f.tangent);
        const double gp = 1.0 + f.curvature * dot(diff, f.normal);
        double step = g / (gp > 0.2 ? gp : 0.2);
        const double spacing = perimeter / static_cast<double>(nodes.size());
        step = std::clamp(step, -spacing, spacing);
        s -= step;
        f = spline_frame(s);
        if (std::abs(step) < 1e-15 * perimeter) break;
    }
    s = std::fmod(s, perimeter);
    if (s < 0.0) s += perimeter;
    CurveProjection out;
    out.s = s;
    out.frame = f;
    out.distance = dot(f.point - x, f.normal);
    out.near = std::abs(out.distance) <= max_distance;
    return out;
}

double DomainSpec::r() const { return impl_->r; }
double DomainSpec::beta() const { return impl_->beta; }
Vec2 DomainSpec::center() const { return impl_->center; }
double DomainSpec::perimeter() const { return impl_->perimeter; }
double DomainSpec::scale() const { return impl_->scale; }
std::span<const BoundaryNode> DomainSpec::nodes() const { return impl_->nodes; }
double DomainSpec::node_spacing() const { return impl_->perimeter / static_cast<double>(impl_->nodes.size()); }

BoundaryFrame DomainSpec::frame(double s) const { return impl_->exact(s); }
BoundaryFrame DomainSpec::boundary_point(double s) const { return impl_->spline_frame(s); }

CurveProjection DomainSpec::project(Vec2 x, double max_distance) const {
    const Impl& im = *impl_;
    const Locator& L = im.locator;
    const long c = L.index(x);
    std::size_t best = 0;
    if (c >= 0 && max_distance <= L.candidate_radius) {
        const auto cell = static_cast<std::size_t>(c);
        if (L.lower_bound[cell] > max_distance || L.offsets[cell] == L.offsets[cell + 1]) {
            CurveProjection far;
            far.distance = L.inside[cell] ? L.lower_bound[cell] : -L.lower_bound[cell];
            far.near = false;
            return far;
        }
        double dmin = std::numeric_limits<double>::infinity();
        for (std::uint32_t k = L.offsets[cell]; k < L.offsets[cell + 1]; ++k) {
            const std::uint32_t idx = L.candidates[k];
            const double d = norm2(im.nodes[idx].frame.point - x);
            if (d < dmin) {
                dmin = d;
                best = idx;
            }
        }
    } else {
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < im.nodes.size(); ++k) {
            const double d = norm2(im.nodes[k].frame.point - x);
            if (d < dmin) {
                dmin = d;
                best = k;
            }
        }
    }
    return im.newton(x, best, max_distance);
}

Location DomainSpec::locate(Vec2 x) const {
    const Impl& im = *impl_;
    const Locator& L = im.locator;
    const long c = L.index(x);
    if (c < 0) return Location::outside;
    const auto cell = static_cast<std::size_t>(c);
    if (L.lower_bound[cell] > 1e-6) return L.inside[cell] ? Location::inside : Location::outside;
    const std::size_t m = im.nodes.size();
    double dmin = std::numeric_limits<double>::infinity();
    for (std::uint32_t k = L.offsets[cell]; k < L.offsets[cell + 1]; ++k) {
        const std::size_t i = L.candidates[k];
        const Vec2 p = im.nodes[i].frame.point;
        dmin = std::min(dmin, segment_distance(x, im.nodes[(i + m - 1) % m].frame.point, p));
        dmin = std::min(dmin, segment_distance(x, p, im.nodes[(i + 1) % m].frame.point));
    }
    if (dmin <= 1e-9) return Location::boundary;
    return winding_number(im.nodes, x) != 0 ? Location::inside : Location::outside;
}

double DomainSpec::shoelace_area() const {
    const auto& nd = impl_->nodes;
    double a = 0.0;
    for (std::size_t i = 0; i < nd.size(); ++i) a += cross(nd[i].frame.point, nd[(i + 1) % nd.size()].frame.point);
    return 0.5 * std::abs(a);
}

double DomainSpec::area() const {
    double a = 0.0;
    for (const auto& nd : impl_->nodes) a += cross(nd.frame.point, nd.frame.tangent);
    return 0.5 * std::abs(a) * node_spacing();
}

DomainSpec DomainSpec::rescaled(double rho) const {
    if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("rescaling factor must lie in (0, 1], got " + std::to_string(rho));
    if (rho == 1.0) return *this;
    auto im = std::make_shared<Impl>();
    const Impl& src = *impl_;
    im->profile = src.profile;
    im->r = rho * src.r;
    im->beta = src.beta;
    im->center = src.center;
    im->origin = src.center + rho * (src.origin - src.center);
    im->scale = rho * src.scale;
    im->perimeter = rho * src.perimeter;
    im->nodes.reserve(src.nodes.size());
    for (const auto& nd : src.nodes) {
        BoundaryFrame f = nd.frame;
        f.point = src.center + rho * (f.point - src.center);
        f.curvature /= rho;
        im->nodes.push_back({rho * nd.s, f});
    }
    im->finish();
    return DomainSpec(std::move(im));
}

void DomainSpec::write_csv(std::ostream& out) const {
    out << "s,x1,x2,t1,t2,n1,n2,kappa\n";
    out.precision(17);
    for (const auto& nd : impl_->nodes) {
        const auto& f = nd.frame;
        out << nd.s << ',' << f.point.x << ',' << f.point.y << ',' << f.tangent.x << ',' << f.tangent.y << ','
            << f.normal.x << ',' << f.normal.y << ',' << f.curvature << '\n';
    }
}

DomainSpec build_domain(double r, double beta, int node_count) {
    if (!(r > 0.0)) throw DomainError("stadium width r must be positive");
    if (!(beta > 0.0)) throw DomainError("smoothing half-width beta must be positive");
    if (!(beta < 0.3)) throw DomainError("smoothing half-width beta must be below 0.3");
    if (node_count < 64 || node_count % 2 != 0) throw DomainError("node count must be even and at least 64");

    auto im = std::make_shared<DomainSpec::Impl>();
    im->profile = std::make_shared<const MollifiedProfile>(beta);
    const Vec2 qend = im->profile->quarter_end();
    im->r = r;
    im->beta = beta;
    im->scale = r / qend.y;
    im->origin = Vec2{0.0, 0.0};
    im->center = Vec2{0.0, r};
    im->perimeter = 4.0 * im->profile->quarter() * im->scale;

    const double spacing = im->perimeter / node_count;
    const double window = 2.0 * beta * im->scale;
    if (window / spacing < 8.0) {
        throw ResolutionError("node count " + std::to_string(node_count) + " resolves the smoothing window with only " +
                              std::to_string(window / spacing) + " nodes (need 8)");
    }
    im->nodes.resize(static_cast<std::size_t>(node_count));
    for (int k = 0; k < node_count; ++k) {
        const double s = k * spacing;
        im->nodes[static_cast<std::size_t>(k)] = {s, im->exact(s)};
    }
    im->finish();
    return DomainSpec(std::move(im));
}

DomainSpec rescaled(const DomainSpec& dom, double rho) { return dom.rescaled(rho); }

bool contains(const ClosedCurve& curve, Vec2 x) { return curve.locate(x) == Location::inside; }

double stadium_wall_distance(Vec2 x) {
    const double ax = std::abs(x.x);
    if (ax <= 1.0) return std::min(x.y, 2.0 - x.y);
    return 1.0 - norm(Vec2{ax - 1.0, x.y - 1.0});
}

}  // namespace cuspflow
