#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cuspflow/geometry.hpp"
#include "cuspflow/kernels.hpp"
#include "cuspflow/potential.hpp"

namespace cuspflow {

/// C^∞ monotone ramp: 0 for t <= 0, 1 for t >= 1, R(t) + R(1 - t) = 1.
double smooth_ramp(double t);

/// Initial vorticity on D.  `ramp` is R((x2 - a0)/(a1 - a0)); `interior`
/// additionally multiplies by R((d - 0.3)/0.2) with d the distance to the
/// unsmoothed stadium wall, so that ω0 vanishes on a collar of ∂D.
struct InitialData {
    enum class Profile { ramp, interior };

    double a0{0.25};
    double a1{0.5};
    double delta{0.01};
    Profile profile{Profile::ramp};

    double operator()(Vec2 x) const;
};

/// Area of {x ∈ curve : ω0(x) >= level} by the midpoint rule on a grid of spacing h.
double superlevel_measure(const ClosedCurve& curve, const InitialData& data, double level, double h);

/// Throws ConfigError unless 0 <= a0 < a1, δ ∈ (0, 0.1] and |{ω0 >= δ}| >= 30δ.
void validate_initial_data(const DomainSpec& dom, const InitialData& data);

/// Lagrangian particles with conserved vorticity values and a boundary marker.
struct FlowState {
    double t{0.0};
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w;     // vorticity carried by each particle
    std::vector<double> area;  // area weight A_j
    double marker_s{0.0};      // clockwise arclength of the tracked boundary particle
    double blob_eps{0.0};
    long projections{0};  // particles pushed back into the domain so far

    std::size_t size() const { return x.size(); }
    Vec2 position(std::size_t j) const { return {x[j], y[j]}; }
    std::vector<Vec2> positions() const;
    double circulation() const;
    BlobSources sources() const;
};

/// Particles on the grid {(i h, (j + ½) h)} inside the curve with A = h²,
/// w = ω0; zero-vorticity particles are dropped.  Throws ConfigError if
/// h > 0.05 or no particle remains.
FlowState init_particles(const ClosedCurve& curve, const std::function<double(Vec2)>& omega, double h,
                         double blob_eps, Vec2 marker_point);
/// Stadium version: marker at the top midpoint, blob_eps = blob_eps_factor · h.
FlowState init_particles(const DomainSpec& dom, const InitialData& data, double h, double blob_eps_factor = 2.0);

/// Stream function ψ = ψ0 + h_c of one particle snapshot: ψ0 is the blob
/// sum, h_c the harmonic correction with boundary data -ψ0 (one solve).
class StreamField {
  public:
    StreamField(const LaplaceSolver& solver, BlobSources src, double blob_eps);

    const LaplaceSolver& solver() const { return *solver_; }
    /// ψ at points of D̄ (up to one near-band width outside is tolerated).
    void stream(std::span<const Vec2> targets, std::span<double> out) const;
    /// u = ∇⊥ψ = (-∂2ψ, ∂1ψ).
    void velocity(std::span<const Vec2> targets, std::span<Vec2> out) const;
    /// a = -∂ψ/∂n at arclength s by one-sided differences along the inward
    /// normal with step equal to the near-band width (raw signed value).
    double boundary_speed(double s) const;
    void boundary_speed(std::span<const double> s, std::span<double> out) const;

  private:
    const LaplaceSolver* solver_;
    BlobSources src_;
    double eps_;
    Density correction_;
};

std::vector<Vec2> velocity(const LaplaceSolver& solver, const FlowState& state, std::span<const Vec2> targets);
double boundary_speed(const LaplaceSolver& solver, const FlowState& state, double s);

/// Velocity at all particles plus the marker speed, for one stage of the integrator.
struct StageVelocity {
    std::vector<Vec2> u;
    double marker_speed{0.0};
};
using VelocityProvider = std::function<StageVelocity(std::span<const Vec2> positions, double marker_s, double t)>;

/// Biot–Savart provider for fixed particle strengths q = A w.
VelocityProvider biot_savart(const LaplaceSolver& solver, const FlowState& state);

struct StepInfo {
    double max_speed{0.0};     // max |u| over particles at the start of the step
    double marker_speed{0.0};  // a at the start of the step
    int projected{0};
};

/// One classical RK4 step of particles and marker.  Throws StepSizeError if
/// dt max|u| > h/2, AccuracyAbort if a particle leaves the closure by more
/// than 1e-3 or projections exceed 0.1% of the particles per unit time.
FlowState step(const VelocityProvider& velocity, const ClosedCurve& curve, const FlowState& state, double dt, double h,
               StepInfo* info = nullptr);

/// Shepard (inverse squared distance) average of w over particles within
/// `radius` of x.  An empty neighborhood gives 0; it counts as resolved only
/// when no particle lies within twice the radius either.
struct Reconstruction {
    double value{0.0};
    bool resolved{true};
    int neighbors{0};
};
Reconstruction reconstruct_omega(const FlowState& state, Vec2 x, double radius);

}  // namespace cuspflow
