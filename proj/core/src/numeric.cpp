#include "sscat/numeric.hpp"

#include <algorithm>

namespace sscat {

double digamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("digamma: requires x > 0");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // Stirling series; |error| < 1e-17 for x >= 10.
    const double inv = 1.0 / x, inv2 = inv * inv;
    double series = inv2 * (1.0 / 12 -
                    inv2 * (1.0 / 120 -
                    inv2 * (1.0 / 252 -
                    inv2 * (1.0 / 240 -
                    inv2 * (1.0 / 132)))));
    return result + std::log(x) - 0.5 * inv - series;
}

BisectResult bisect(const std::function<double(double)>& f, double a, double b,
                    double xtol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, 0, 0.0};
    if (fb == 0.0) return {b, 0, 0.0};
    if ((fa < 0) == (fb < 0))
        throw std::invalid_argument("bisect: no sign change on bracket");
    BisectResult res;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if (fm == 0.0 || (b - a) < xtol) {
            res.root = m;
            res.residual = std::abs(fm);
            return res;
        }
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    res.root = 0.5 * (a + b);
    res.residual = std::abs(f(res.root));
    return res;
}

std::vector<double> find_roots_on_grid(const std::function<double(double)>& f,
                                       double a, double b, int grid, double xtol) {
    if (grid < 2) throw std::invalid_argument("find_roots_on_grid: grid >= 2");
    std::vector<double> roots;
    double h = (b - a) / grid;
    double xp = a, fp = f(xp);
    for (int i = 1; i <= grid; ++i) {
        double x = a + i * h;
        double fx = f(x);
        if (fp == 0.0) roots.push_back(xp);
        else if (std::isfinite(fp) && std::isfinite(fx) && (fp < 0) != (fx < 0))
            roots.push_back(bisect(f, xp, x, xtol).root);
        xp = x;
        fp = fx;
    }
    if (fp == 0.0) roots.push_back(xp);
    return roots;
}

}  // namespace sscat
