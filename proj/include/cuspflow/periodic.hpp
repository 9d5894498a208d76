#pragma once

#include <complex>
#include <span>
#include <vector>

namespace cuspflow {

/// Periodic quintic B-spline interpolant through equispaced samples.
/// The argument is measured in sample units: f(k) == samples[k].
class PeriodicQuinticSpline {
  public:
    PeriodicQuinticSpline() = default;
    explicit PeriodicQuinticSpline(std::span<const double> samples);

    double operator()(double u) const;
    double derivative(double u) const;
    std::size_t size() const { return coeffs_.size(); }

  private:
    std::vector<double> coeffs_;
};

/// Trigonometric interpolant of N equispaced samples over one period.
/// N must be even; the Nyquist mode is split symmetrically.
class TrigInterpolant {
  public:
    TrigInterpolant() = default;
    TrigInterpolant(std::span<const double> samples, double period);

    double value(double s) const;
    double derivative(double s) const;
    /// Samples of the derivative at the interpolation nodes.
    std::vector<double> node_derivatives() const;
    bool empty() const { return modes_.empty(); }

  private:
    std::vector<std::complex<double>> modes_;  // c_k / N for k = 0..N/2
    double period_{1.0};
    std::size_t n_{0};
};

/// Trigonometric interpolation of N periodic samples onto a grid `factor`
/// times finer (the coarse nodes are every factor-th fine node).
std::vector<double> trig_upsample(std::span<const double> coarse, int factor);

/// Transpose of trig_upsample: maps a fine-grid row r to Interpᵀ r.
std::vector<double> trig_upsample_adjoint(std::span<const double> fine, int factor);

/// Even-N periodic Dirichlet kernel on the unit-spaced grid: interpolation
/// weight of node 0 at offset t (in sample units).
double dirichlet_kernel(double t, std::size_t n);

}  // namespace cuspflow
