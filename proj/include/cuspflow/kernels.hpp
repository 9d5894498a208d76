#pragma once

#include <span>
#include <vector>

#include "cuspflow/vec2.hpp"

// Dense O(targets × sources) sums behind the boundary-integral and vortex
// routines.  Each kernel has a plain serial reference and an OpenMP/SIMD
// version over structure-of-arrays data.  They agree to rounding except the
// parallel blob velocity, which runs in single precision.

namespace cuspflow {

struct FieldValue {
    double value{0.0};
    Vec2 gradient;
};

/// Quadrature data of a double layer: positions, outward normals and
/// weight-times-density products.
struct LayerSources {
    std::vector<double> x, y, nx, ny, wmu;

    std::size_t size() const { return x.size(); }
};

/// Point vortices carrying strength q_j = A_j w_j.
struct BlobSources {
    std::vector<double> x, y, q;

    std::size_t size() const { return x.size(); }
};

/// (1/2π) Σ wμ_j (x − y_j)·n_j / |x − y_j|² and its x-gradient.
FieldValue double_layer_serial(const LayerSources& src, Vec2 x);
void double_layer_serial(const LayerSources& src, std::span<const Vec2> targets, std::span<FieldValue> out);
void double_layer_parallel(const LayerSources& src, std::span<const Vec2> targets, std::span<FieldValue> out);

/// Krasny-regularized stream function Σ q_j (−1/4π) ln(|x − y_j|² + ε²).
void blob_stream_serial(const BlobSources& src, double eps, std::span<const Vec2> targets, std::span<double> out);
void blob_stream_parallel(const BlobSources& src, double eps, std::span<const Vec2> targets, std::span<double> out);

/// Rotated gradient of the blob stream: Σ q_j (1/2π) (z₂, −z₁) / (|z|² + ε²), z = x − y_j.
void blob_velocity_serial(const BlobSources& src, double eps, std::span<const Vec2> targets, std::span<Vec2> out);
void blob_velocity_parallel(const BlobSources& src, double eps, std::span<const Vec2> targets, std::span<Vec2> out);

}  // namespace cuspflow
