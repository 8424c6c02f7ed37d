// Small numerical utilities shared across the library: digamma, bracketed
// root refinement, and an adaptive Dormand-Prince 5(4) integrator that works
// for both real and complex-valued states (the latter is needed when the
// stub equation is continued to complex momenta).

#ifndef SSCAT_NUMERIC_HPP
#define SSCAT_NUMERIC_HPP

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sscat {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

/// Raised when a formula is evaluated at (or too close to) a point where its
/// denominator vanishes: full reflectors in the L<->S maps, m22 = 0, comb
/// stub eigenvalues, sphere eigenvalue hits.
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

/// Digamma function for x > 0.  Recurrence lift below 10, then the Stirling
/// series; accurate to ~2 ulp over the arguments used here (all >= 1).
double digamma(double x);

struct BisectResult {
    double root = 0.0;
    int iterations = 0;
    double residual = 0.0;  // |f(root)|
};

/// Bisection on [a, b]; requires a sign change.  Stops when the bracket is
/// narrower than xtol (absolute) or after max_iter halvings.
BisectResult bisect(const std::function<double(double)>& f, double a, double b,
                    double xtol, int max_iter = 200);

/// Scan [a, b] on a uniform grid and bisect every sign change to xtol.
std::vector<double> find_roots_on_grid(const std::function<double(double)>& f,
                                       double a, double b, int grid, double xtol);

struct OdeDiagnostics {
    int steps = 0;
    int rejected = 0;
    double err_target = 0.0;  // controller tolerance atol + rtol*|y|
};

namespace detail {

// Dormand-Prince 5(4) pair with standard PI-free step control.
// State is a 2-vector over Scalar; the RHS is f(x, y) -> dy.
template <class Scalar, class Rhs>
std::array<Scalar, 2> rk45_integrate(const Rhs& f, double x0, double x1,
                                     std::array<Scalar, 2> y, double rtol,
                                     double atol, OdeDiagnostics* diag) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600,
                        e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640,
                        e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const double span = x1 - x0;
    if (span == 0.0) return y;
    const double dir = span > 0 ? 1.0 : -1.0;
    double h = span / 64.0;
    double x = x0;
    int steps = 0, rejected = 0;

    auto err_norm = [&](const std::array<Scalar, 2>& e,
                        const std::array<Scalar, 2>& y0,
                        const std::array<Scalar, 2>& y1) {
        double m = 0.0;
        for (int i = 0; i < 2; ++i) {
            double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
            m = std::max(m, std::abs(e[i]) / sc);
        }
        return m;
    };

    std::array<Scalar, 2> k1 = f(x, y);
    while (dir * (x1 - x) > 0) {
        if (dir * (x + h - x1) > 0) h = x1 - x;
        std::array<Scalar, 2> y2, y3, y4, y5, y6, y7;
        for (int i = 0; i < 2; ++i) y2[i] = y[i] + h * (a21 * k1[i]);
        auto k2 = f(x + c2 * h, y2);
        for (int i = 0; i < 2; ++i) y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        auto k3 = f(x + c3 * h, y3);
        for (int i = 0; i < 2; ++i)
            y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        auto k4 = f(x + c4 * h, y4);
        for (int i = 0; i < 2; ++i)
            y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        auto k5 = f(x + c5 * h, y5);
        for (int i = 0; i < 2; ++i)
            y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                a64 * k4[i] + a65 * k5[i]);
        auto k6 = f(x + h, y6);
        for (int i = 0; i < 2; ++i)
            y7[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                b5 * k5[i] + b6 * k6[i]);
        auto k7 = f(x + h, y7);  // FSAL

        std::array<Scalar, 2> err;
        for (int i = 0; i < 2; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                          e6 * k6[i] + e7 * k7[i]);
        double en = err_norm(err, y, y7);
        if (en <= 1.0) {
            x += h;
            y = y7;
            k1 = k7;
            ++steps;
        } else {
            ++rejected;
        }
        double fac = 0.9 * std::pow(std::max(en, 1e-30), -0.2);
        h *= std::min(5.0, std::max(0.2, fac));
        if (std::abs(h) < 1e-15 * std::abs(span))
            throw std::runtime_error("rk45: step size underflow");
        if (steps + rejected > 2000000)
            throw std::runtime_error("rk45: step budget exhausted");
    }
    if (diag) {
        diag->steps = steps;
        diag->rejected = rejected;
        diag->err_target = atol + rtol * std::max(std::abs(y[0]), std::abs(y[1]));
    }
    return y;
}

}  // namespace detail

}  // namespace sscat

#endif
