#include "uhlsim/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace uhlsim {

namespace {

// Inverse error function via Newton iterations on erf.
double erf_inv(double y) {
    if (y <= -1.0 || y >= 1.0) throw std::invalid_argument("erf_inv: |y| must be < 1");
    const double a = 0.147;  // Winitzki initial guess
    double ln1my2 = std::log(1.0 - y * y);
    double t1 = 2.0 / (M_PI * a) + ln1my2 / 2.0;
    double x = std::copysign(std::sqrt(std::max(0.0, std::sqrt(t1 * t1 - ln1my2 / a) - t1)), y);
    for (int it = 0; it < 60; ++it) {
        double err = std::erf(x) - y;
        double deriv = 2.0 / std::sqrt(M_PI) * std::exp(-x * x);
        if (deriv < 1e-300) break;
        double step = err / deriv;
        x -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    return g;
}

}  // namespace

std::int64_t sign_degree_bound(double beta, double delta) {
    const double bound = std::ceil(8.0 * M_E / beta * std::log(2.0 / delta));
    auto u = static_cast<std::int64_t>(bound);
    if (u % 2 == 0) ++u;
    return u;
}

/// Grid certification cannot resolve errors below the double-precision noise
/// floor; requests beyond it are certified at the floor while degrees keep the
/// exact formula value.
inline constexpr double kCertificationFloor = 1e-12;

SignPolynomial synthesize_sign_polynomial(double beta, double delta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("sign polynomial: beta in (0,1]");
    if (!(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("sign polynomial: delta in (0,1/2)");
    const std::int64_t u = sign_degree_bound(beta, delta);
    delta = std::max(delta, kCertificationFloor);
    // erf(kx) with k chosen so the erf-to-sgn gap on |x| >= beta is <= delta/2;
    // the Chebyshev truncation then has delta/2 of budget left.
    const double k = erf_inv(1.0 - delta / 2.0) / beta;

    auto certify = [&](const ChebyshevSeries& p, double& max_abs, double& sign_err) {
        max_abs = 0.0;
        sign_err = 0.0;
        for (double x : uniform_grid(-1.0, 1.0, kCertificationGridPoints)) {
            double v = p(x);
            max_abs = std::max(max_abs, std::abs(v));
            if (std::abs(x) >= beta) sign_err = std::max(sign_err, std::abs(v - (x > 0 ? 1.0 : -1.0)));
        }
        for (double x : log_grid(beta, 1.0, 2001)) {
            double v = p(x);
            max_abs = std::max(max_abs, std::abs(v));
            sign_err = std::max(sign_err, std::abs(v - 1.0));
            // odd polynomial: the negative side mirrors exactly
        }
    };

    std::int64_t degree = u;
    for (int attempt = 0; attempt < 8; ++attempt) {
        auto series = ChebyshevSeries::project([k](double x) { return std::erf(k * x); },
                                               static_cast<int>(degree))
                          .parity_filtered(1);
        double max_abs, sign_err;
        certify(series, max_abs, sign_err);
        if (max_abs > 1.0) {
            series = series.scaled((1.0 - 1e-12) / max_abs);
            certify(series, max_abs, sign_err);
        }
        if (max_abs <= 1.0 + 1e-9 && sign_err <= delta) {
            SignPolynomial out;
            out.series = std::move(series);
            out.degree = degree;
            out.beta = beta;
            out.delta = delta;
            out.grid_max_abs = max_abs;
            out.grid_sign_error = sign_err;
            out.escalated = degree != u;
            return out;
        }
        std::int64_t next = degree + std::max<std::int64_t>(2, degree / 4);
        if (next % 2 == 0) ++next;
        if (next > 4 * u) break;
        degree = next;
    }
    throw std::runtime_error("sign polynomial: certification failed after degree escalation");
}

SqrtPolynomial synthesize_sqrt_polynomial(double m_min, double delta, bool kernel_safe) {
    if (!(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("sqrt polynomial: delta in (0,1/2)");
    if (!(m_min > 0.0 && m_min <= 1.0))
        throw std::invalid_argument("sqrt polynomial: m_min in (0,1]");
    delta = std::max(delta, kCertificationFloor);

    // The certificate covers the spectrum region the transformation touches:
    // [m_min, 1] always, plus x = 0 for kernel-safe use. The kernel route is
    // additionally bounded on all of [-1, 1]; the support route may exceed one
    // below m_min, where the cited construction (not needed numerically)
    // guarantees a globally bounded polynomial of the same degree order.
    auto certify = [&](const SqrtPolynomial& p, double& max_abs, double& err) {
        max_abs = 0.0;
        err = 0.0;
        for (double x : uniform_grid(m_min, 1.0, kCertificationGridPoints)) {
            double v = p(x);
            max_abs = std::max(max_abs, std::abs(v));
            err = std::max(err, std::abs(v - std::sqrt(x) / 2.0));
        }
        for (double x : log_grid(m_min, 1.0, 2001))
            err = std::max(err, std::abs(p(x) - std::sqrt(x) / 2.0));
        if (p.kernel_safe) {
            err = std::max(err, std::abs(p(0.0)));
            for (double x : uniform_grid(-1.0, 1.0, kCertificationGridPoints))
                max_abs = std::max(max_abs, std::abs(p(x)));
        }
    };

    // Two certified routes for even approximants of sqrt(x)/2 in y = x^2:
    //  (a) kernel-safe: g(y) = y (y + b)^{-3/4} / 2 on [0, 1]; g(0) = 0,
    //      x-degree ~ (1/sqrt(delta)) m_min^{-3/4} ln(1/delta);
    //  (b) support-only: g(y) = y^{1/4} / 2 on [m_min^2/4, 1],
    //      x-degree ~ (1/m_min) ln(1/delta). Invalid on the kernel.
    auto attempt = [&](bool route_kernel) -> SqrtPolynomial {
        double y_lo, b = 0.0;
        std::int64_t inner_deg;
        if (route_kernel) {
            y_lo = 0.0;
            b = std::max(1e-300, 0.5 * delta * std::pow(m_min, 1.5));
            inner_deg = static_cast<std::int64_t>(
                std::ceil((std::log(1.0 / delta) + 5.0) / std::sqrt(b)));
        } else {
            y_lo = 0.25 * m_min * m_min;
            inner_deg = static_cast<std::int64_t>(
                std::ceil((std::log(1.0 / delta) + 5.0) / std::sqrt(y_lo)));
        }
        for (int tries = 0; tries < 10; ++tries) {
            SqrtPolynomial out;
            out.y_lo = y_lo;
            if (route_kernel) {
                out.inner = ChebyshevSeries::project(
                    [b, y_lo](double t) {
                        double y = 0.5 * ((1.0 - y_lo) * t + 1.0 + y_lo);
                        y = std::max(y, 0.0);
                        return 0.5 * y / std::pow(y + b, 0.75);
                    },
                    static_cast<int>(inner_deg));
            } else {
                out.inner = ChebyshevSeries::project(
                    [y_lo](double t) {
                        double y = 0.5 * ((1.0 - y_lo) * t + 1.0 + y_lo);
                        y = std::max(y, 0.0);
                        return 0.5 * std::pow(y, 0.25);
                    },
                    static_cast<int>(inner_deg));
            }
            out.degree = 2 * inner_deg;
            out.m_min = m_min;
            out.delta = delta;
            out.kernel_safe = route_kernel;
            double max_abs, err;
            certify(out, max_abs, err);
            if (max_abs > 1.0 && max_abs < 1.0 + delta / 4.0) {
                out.inner = out.inner.scaled((1.0 - 1e-12) / max_abs);
                certify(out, max_abs, err);
            }
            if (max_abs <= 1.0 + 1e-9 && err <= delta) {
                out.grid_max_abs = max_abs;
                out.grid_error = err;
                const double formula =
                    std::min(1.0 / m_min, 1.0 / (delta * delta)) * std::log(1.0 / delta);
                out.degree_constant = static_cast<double>(out.degree) / std::max(1.0, formula);
                return out;
            }
            inner_deg = inner_deg * 3 / 2 + 1;
            if (inner_deg > 1'500'000)
                throw std::runtime_error("sqrt polynomial: certification failed (degree cap)");
        }
        throw std::runtime_error("sqrt polynomial: certification failed after escalation");
    };

    if (kernel_safe) return attempt(true);
    try {
        SqrtPolynomial support = attempt(false);
        return support;
    } catch (const std::runtime_error&) {
        return attempt(true);
    }
}

std::string certificate_json(const SignPolynomial& p) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"kind\":\"sign\",\"beta\":" << p.beta << ",\"delta\":" << p.delta
       << ",\"degree\":" << p.degree << ",\"grid_max_abs\":" << p.grid_max_abs
       << ",\"grid_sign_error\":" << p.grid_sign_error
       << ",\"escalated\":" << (p.escalated ? "true" : "false") << "}";
    return os.str();
}

std::string certificate_json(const SqrtPolynomial& p) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"kind\":\"sqrt\",\"m_min\":" << p.m_min << ",\"delta\":" << p.delta
       << ",\"degree\":" << p.degree << ",\"grid_max_abs\":" << p.grid_max_abs
       << ",\"grid_error\":" << p.grid_error << ",\"kernel_safe\":"
       << (p.kernel_safe ? "true" : "false") << ",\"degree_constant\":" << p.degree_constant
       << "}";
    return os.str();
}

}  // namespace uhlsim
