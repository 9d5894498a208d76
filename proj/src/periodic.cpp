#include "cuspflow/periodic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace cuspflow {

namespace {

using cvec = std::vector<std::complex<double>>;

cvec forward(std::span<const double> data) {
    Eigen::FFT<double> fft;
    cvec in(data.begin(), data.end());
    cvec out;
    fft.fwd(out, in);
    return out;
}

// Centered quintic B-spline, support (-3, 3).
double bspline5(double x) {
    static constexpr double binom[7] = {1, 6, 15, 20, 15, 6, 1};
    double sum = 0.0;
    for (int k = 0; k < 7; ++k) {
        const double t = x + 3.0 - k;
        if (t <= 0.0) break;
        const double t2 = t * t;
        sum += ((k & 1) ? -binom[k] : binom[k]) * t2 * t2 * t;
    }
    return sum / 120.0;
}

double bspline5_derivative(double x) {
    static constexpr double binom[7] = {1, 6, 15, 20, 15, 6, 1};
    double sum = 0.0;
    for (int k = 0; k < 7; ++k) {
        const double t = x + 3.0 - k;
        if (t <= 0.0) break;
        const double t2 = t * t;
        sum += ((k & 1) ? -binom[k] : binom[k]) * t2 * t2;
    }
    return sum / 24.0;
}

std::size_t wrap(long i, std::size_t n) {
    const long m = static_cast<long>(n);
    long r = i % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
}

}  // namespace

PeriodicQuinticSpline::PeriodicQuinticSpline(std::span<const double> samples) {
    const std::size_t m = samples.size();
    if (m < 6) throw std::invalid_argument("periodic quintic spline needs at least 6 samples");
    cvec spec = forward(samples);
    for (std::size_t k = 0; k < m; ++k) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        const double lambda = (66.0 + 52.0 * std::cos(a) + 2.0 * std::cos(2.0 * a)) / 120.0;
        spec[k] /= lambda;
    }
    Eigen::FFT<double> fft;
    cvec back;
    fft.inv(back, spec);
    coeffs_.resize(m);
    for (std::size_t k = 0; k < m; ++k) coeffs_[k] = back[k].real();
}

double PeriodicQuinticSpline::operator()(double u) const {
    const double fl = std::floor(u);
    const long i = static_cast<long>(fl);
    const double f = u - fl;
    double sum = 0.0;
    for (long j = -2; j <= 3; ++j) sum += coeffs_[wrap(i + j, coeffs_.size())] * bspline5(f - j);
    return sum;
}

double PeriodicQuinticSpline::derivative(double u) const {
    const double fl = std::floor(u);
    const long i = static_cast<long>(fl);
    const double f = u - fl;
    double sum = 0.0;
    for (long j = -2; j <= 3; ++j) sum += coeffs_[wrap(i + j, coeffs_.size())] * bspline5_derivative(f - j);
    return sum;
}

TrigInterpolant::TrigInterpolant(std::span<const double> samples, double period)
    : period_(period), n_(samples.size()) {
    if (n_ < 2 || n_ % 2 != 0) throw std::invalid_argument("trigonometric interpolation needs an even sample count");
    cvec spec = forward(samples);
    modes_.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k <= n_ / 2; ++k) modes_[k] = spec[k] / static_cast<double>(n_);
}

double TrigInterpolant::value(double s) const {
    const double theta = 2.0 * std::numbers::pi * s / period_;
    const std::size_t half = n_ / 2;
    const std::complex<double> step(std::cos(theta), std::sin(theta));
    std::complex<double> rot = step;
    double sum = modes_[0].real();
    for (std::size_t k = 1; k < half; ++k) {
        sum += 2.0 * (modes_[k] * rot).real();
        rot *= step;
    }
    sum += modes_[half].real() * std::cos(static_cast<double>(half) * theta);
    return sum;
}

double TrigInterpolant::derivative(double s) const {
    const double theta = 2.0 * std::numbers::pi * s / period_;
    const std::size_t half = n_ / 2;
    const std::complex<double> step(std::cos(theta), std::sin(theta));
    std::complex<double> rot = step;
    double sum = 0.0;
    for (std::size_t k = 1; k < half; ++k) {
        sum += 2.0 * static_cast<double>(k) * (std::complex<double>(0.0, 1.0) * modes_[k] * rot).real();
        rot *= step;
    }
    sum -= static_cast<double>(half) * modes_[half].real() * std::sin(static_cast<double>(half) * theta);
    return sum * 2.0 * std::numbers::pi / period_;
}

std::vector<double> TrigInterpolant::node_derivatives() const {
    const std::size_t half = n_ / 2;
    cvec spec(n_, {0.0, 0.0});
    const double scale = 2.0 * std::numbers::pi / period_ * static_cast<double>(n_);
    for (std::size_t k = 1; k < half; ++k) {
        const std::complex<double> d = std::complex<double>(0.0, static_cast<double>(k)) * modes_[k] * scale;
        spec[k] = d;
        spec[n_ - k] = std::conj(d);
    }
    Eigen::FFT<double> fft;
    cvec back;
    fft.inv(back, spec);
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = back[j].real();
    return out;
}

std::vector<double> trig_upsample(std::span<const double> coarse, int factor) {
    const std::size_t n = coarse.size();
    if (n % 2 != 0 || factor < 1) throw std::invalid_argument("trig_upsample: even size and factor >= 1 required");
    const std::size_t nf = n * static_cast<std::size_t>(factor);
    const cvec c = forward(coarse);
    cvec f(nf, {0.0, 0.0});
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < half; ++k) f[k] = c[k];
    for (std::size_t k = half + 1; k < n; ++k) f[nf - (n - k)] = c[k];
    f[half] += 0.5 * c[half];
    f[nf - half] += 0.5 * c[half];
    Eigen::FFT<double> fft;
    cvec back;
    fft.inv(back, f);
    std::vector<double> out(nf);
    for (std::size_t p = 0; p < nf; ++p) out[p] = back[p].real() * factor;
    return out;
}

std::vector<double> trig_upsample_adjoint(std::span<const double> fine, int factor) {
    const std::size_t nf = fine.size();
    if (factor < 1 || nf % static_cast<std::size_t>(factor) != 0) {
        throw std::invalid_argument("trig_upsample_adjoint: size must be a multiple of factor");
    }
    const std::size_t n = nf / static_cast<std::size_t>(factor);
    if (n % 2 != 0) throw std::invalid_argument("trig_upsample_adjoint: coarse size must be even");
    const cvec F = forward(fine);
    // R_k = sum_p r_p exp(+2πi k p / nf) = F[(-k) mod nf]
    auto R = [&](long k) { return F[wrap(-k, nf)]; };
    const std::size_t half = n / 2;
    cvec s(n);
    for (std::size_t m = 0; m < half; ++m) s[m] = R(static_cast<long>(m));
    for (std::size_t m = half + 1; m < n; ++m) s[m] = R(static_cast<long>(m) - static_cast<long>(n));
    s[half] = 0.5 * (R(static_cast<long>(half)) + R(-static_cast<long>(half)));
    Eigen::FFT<double> fft;
    cvec out_c;
    fft.fwd(out_c, s);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = out_c[j].real() / static_cast<double>(n);
    return out;
}

double dirichlet_kernel(double t, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double a = std::numbers::pi * t / nn;
    const double sa = std::sin(a);
    if (std::abs(sa) < 1e-14) return 1.0;  // t is a multiple of n (n even)
    return std::sin(std::numbers::pi * t) * std::cos(a) / (sa * nn);
}

}  // namespace cuspflow
