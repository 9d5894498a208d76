#include "cuspflow/kernels.hpp"

#include <cmath>
#include <numbers>

namespace cuspflow {

namespace {
constexpr double kInvTwoPi = 0.5 / std::numbers::pi;
}

FieldValue double_layer_serial(const LayerSources& src, Vec2 x) {
    FieldValue f;
    for (std::size_t j = 0; j < src.size(); ++j) {
        const Vec2 r = x - Vec2{src.x[j], src.y[j]};
        const Vec2 n{src.nx[j], src.ny[j]};
        const double r2 = norm2(r);
        const double rn = dot(r, n);
        f.value += src.wmu[j] * rn / r2;
        f.gradient += src.wmu[j] * (n / r2 - (2.0 * rn / (r2 * r2)) * r);
    }
    f.value *= kInvTwoPi;
    f.gradient *= kInvTwoPi;
    return f;
}

void double_layer_serial(const LayerSources& src, std::span<const Vec2> targets, std::span<FieldValue> out) {
    for (std::size_t i = 0; i < targets.size(); ++i) out[i] = double_layer_serial(src, targets[i]);
}

void blob_stream_serial(const BlobSources& src, double eps, std::span<const Vec2> targets, std::span<double> out) {
    const double e2 = eps * eps;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < src.size(); ++j) {
            sum += src.q[j] * std::log(norm2(targets[i] - Vec2{src.x[j], src.y[j]}) + e2);
        }
        out[i] = -0.5 * kInvTwoPi * sum;
    }
}

void blob_velocity_serial(const BlobSources& src, double eps, std::span<const Vec2> targets, std::span<Vec2> out) {
    const double e2 = eps * eps;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        Vec2 sum;
        for (std::size_t j = 0; j < src.size(); ++j) {
            const Vec2 z = targets[i] - Vec2{src.x[j], src.y[j]};
            sum += (src.q[j] / (norm2(z) + e2)) * Vec2{z.y, -z.x};
        }
        out[i] = kInvTwoPi * sum;
    }
}

}  // namespace cuspflow
