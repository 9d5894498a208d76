// Built with -ffast-math so the inner loops vectorize (including log via libmvec).
#include "cuspflow/kernels.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace cuspflow {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

// Single-precision reciprocal refined by one Newton step (relative error
// ~1e-14); several times faster than a packed double division.
inline double fast_reciprocal(double d) {
    const double r = static_cast<double>(1.0f / static_cast<float>(d));
    return r * (2.0 - d * r);
}

}  // namespace

void double_layer_parallel(const LayerSources& src, std::span<const Vec2> targets, std::span<FieldValue> out) {
    const long nt = static_cast<long>(targets.size());
    const std::size_t ns = src.size();
    const double* sx = src.x.data();
    const double* sy = src.y.data();
    const double* snx = src.nx.data();
    const double* sny = src.ny.data();
    const double* sw = src.wmu.data();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < nt; ++i) {
        const double px = targets[i].x;
        const double py = targets[i].y;
        double v = 0.0, gx = 0.0, gy = 0.0;
#pragma omp simd reduction(+ : v, gx, gy)
        for (std::size_t j = 0; j < ns; ++j) {
            const double rx = px - sx[j];
            const double ry = py - sy[j];
            const double inv = fast_reciprocal(rx * rx + ry * ry);
            const double rn = rx * snx[j] + ry * sny[j];
            const double a = sw[j] * inv;
            const double b = 2.0 * a * rn * inv;
            v += a * rn;
            gx += a * snx[j] - b * rx;
            gy += a * sny[j] - b * ry;
        }
        out[i] = FieldValue{kInvTwoPi * v, {kInvTwoPi * gx, kInvTwoPi * gy}};
    }
}

void blob_stream_parallel(const BlobSources& src, double eps, std::span<const Vec2> targets, std::span<double> out) {
    const long nt = static_cast<long>(targets.size());
    const std::size_t ns = src.size();
    const double* sx = src.x.data();
    const double* sy = src.y.data();
    const double* sq = src.q.data();
    const double e2 = eps * eps;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < nt; ++i) {
        const double px = targets[i].x;
        const double py = targets[i].y;
        double sum = 0.0;
#pragma omp simd reduction(+ : sum)
        for (std::size_t j = 0; j < ns; ++j) {
            const double rx = px - sx[j];
            const double ry = py - sy[j];
            sum += sq[j] * std::log(rx * rx + ry * ry + e2);
        }
        out[i] = -0.5 * kInvTwoPi * sum;
    }
}

// Single precision throughout (positions relative to targets stay well
// conditioned since |x| = O(1)); about twice the throughput of the double
// loop with absolute error ~1e-7 of the velocity scale.
void blob_velocity_parallel(const BlobSources& src, double eps, std::span<const Vec2> targets, std::span<Vec2> out) {
    const long nt = static_cast<long>(targets.size());
    const std::size_t ns = src.size();
    std::vector<float> fx(ns), fy(ns), fq(ns);
    for (std::size_t j = 0; j < ns; ++j) {
        fx[j] = static_cast<float>(src.x[j]);
        fy[j] = static_cast<float>(src.y[j]);
        fq[j] = static_cast<float>(src.q[j]);
    }
    const float* sx = fx.data();
    const float* sy = fy.data();
    const float* sq = fq.data();
    const float e2 = static_cast<float>(eps * eps);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < nt; ++i) {
        const float px = static_cast<float>(targets[i].x);
        const float py = static_cast<float>(targets[i].y);
        float ux = 0.0f, uy = 0.0f;
#pragma omp simd reduction(+ : ux, uy)
        for (std::size_t j = 0; j < ns; ++j) {
            const float rx = px - sx[j];
            const float ry = py - sy[j];
            const float a = sq[j] / (rx * rx + ry * ry + e2);
            ux += a * ry;
            uy -= a * rx;
        }
        out[i] = Vec2{kInvTwoPi * ux, kInvTwoPi * uy};
    }
}

}  // namespace cuspflow
