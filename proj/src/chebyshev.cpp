#include "uhlsim/chebyshev.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace uhlsim {

namespace {

// Iterative radix-2 FFT, in place. Size must be a power of two.
void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::size_t next_pow2(std::size_t x) {
    std::size_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

}  // namespace

ChebyshevSeries ChebyshevSeries::project(const std::function<double(double)>& f, int degree,
                                         int oversample) {
    if (degree < 0) throw std::invalid_argument("ChebyshevSeries: negative degree");
    const std::size_t n =
        next_pow2(static_cast<std::size_t>(degree + 1) * std::max(1, oversample));
    // DCT-I at Chebyshev-Lobatto nodes x_j = cos(pi j / n) via an FFT of the
    // even extension of the sample sequence.
    std::vector<double> samples(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        samples[j] = f(std::cos(M_PI * static_cast<double>(j) / static_cast<double>(n)));
    std::vector<std::complex<double>> ext(2 * n);
    for (std::size_t j = 0; j <= n; ++j) ext[j] = samples[j];
    for (std::size_t j = 1; j < n; ++j) ext[2 * n - j] = samples[j];
    fft(ext);
    std::vector<double> coeffs(degree + 1, 0.0);
    for (int k = 0; k <= degree; ++k) coeffs[k] = ext[k].real() / static_cast<double>(n);
    coeffs[0] *= 0.5;
    return ChebyshevSeries(std::move(coeffs));
}

double ChebyshevSeries::operator()(double x) const {
    // Clenshaw recurrence.
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) {
        double b0 = coeffs_[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return coeffs_.empty() ? 0.0 : coeffs_[0] + x * b1 - b2;
}

ChebyshevSeries ChebyshevSeries::parity_filtered(int parity) const {
    std::vector<double> out(coeffs_.size(), 0.0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
        if (static_cast<int>(k % 2) == parity) out[k] = coeffs_[k];
    return ChebyshevSeries(std::move(out));
}

ChebyshevSeries ChebyshevSeries::truncated(double tol) const {
    std::size_t last = 0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
        if (std::abs(coeffs_[k]) > tol) last = k;
    return ChebyshevSeries(std::vector<double>(coeffs_.begin(), coeffs_.begin() + last + 1));
}

ChebyshevSeries ChebyshevSeries::scaled(double factor) const {
    std::vector<double> out = coeffs_;
    for (double& c : out) c *= factor;
    return ChebyshevSeries(std::move(out));
}

}  // namespace uhlsim
