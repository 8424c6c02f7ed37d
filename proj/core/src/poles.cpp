#include "sscat/poles.hpp"

#include <algorithm>
#include <cmath>

namespace sscat {

namespace {

constexpr Complex I{0.0, 1.0};

struct KreinParts {
    Complex q;    // (c u' - u)(0), zero exactly at stub eigenvalues
    Complex qb;   // q * beta, entire
    Complex eps;  // exp(i k ell)
    Complex eta;  // q * zeta
};

KreinParts krein_parts(const CombParams& p, Complex k) {
    const ToothSolution s = solve_tooth(p, k);
    KreinParts parts;
    parts.q = p.c * s.du0 - s.u0;
    parts.qb = (p.d * parts.q + p.b * p.b * s.du0) / (2.0 * k);
    parts.eps = std::exp(I * (k * p.ell));
    parts.eta = parts.q * std::cos(k * p.ell) + parts.qb * std::sin(k * p.ell);
    return parts;
}

// V_n = q^n U_n(zeta) via V_{n+1} = 2 eta V_n - q^2 V_{n-1}; polynomial in the
// entire quantities (eta, q), so no beta pole ever appears.
void homogeneous_cheb(const KreinParts& c, int N, Complex* v_nm2, Complex* v_nm1) {
    Complex vm1{0.0}, v{1.0};
    const Complex q2 = c.q * c.q;
    Complex prev{0.0};
    for (int m = 0; m < N - 1; ++m) {
        const Complex vp = 2.0 * c.eta * v - q2 * vm1;
        prev = v;
        vm1 = v;
        v = vp;
    }
    *v_nm2 = (N >= 2) ? prev : Complex{0.0};
    *v_nm1 = v;
}

}  // namespace

Complex krein_denominator(const CombParams& p, int N, Complex k) {
    if (N < 1) throw std::invalid_argument("krein_denominator: N >= 1");
    const Complex beta = comb_beta(p, k);
    const Complex zeta = std::cos(k * p.ell) + beta * std::sin(k * p.ell);
    const Complex eps = std::exp(I * (k * p.ell));
    return eps * cheb_u(N - 2, zeta) - (1.0 + I * beta) * cheb_u(N - 1, zeta);
}

Complex krein_denominator_entire(const CombParams& p, int N, Complex k) {
    if (N < 1) throw std::invalid_argument("krein_denominator_entire: N >= 1");
    const KreinParts c = krein_parts(p, k);
    Complex v_nm2, v_nm1;
    homogeneous_cheb(c, N, &v_nm2, &v_nm1);
    return c.eps * c.q * c.q * v_nm2 - (c.q + I * c.qb) * v_nm1;
}

int winding_number(const std::function<Complex(Complex)>& f, const ComplexRect& rect,
                   int samples_per_edge) {
    const std::array<Complex, 4> corners = {
        Complex{rect.re_lo, rect.im_lo}, Complex{rect.re_hi, rect.im_lo},
        Complex{rect.re_hi, rect.im_hi}, Complex{rect.re_lo, rect.im_hi}};

    auto eval = [&](Complex z) {
        const Complex fz = f(z);
        if (!std::isfinite(fz.real()) || !std::isfinite(fz.imag()) ||
            std::abs(fz) == 0.0)
            throw SingularityError("winding_number: zero or non-finite on contour");
        return fz;
    };

    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        const Complex a = corners[e], b = corners[(e + 1) % 4];
        // adaptive phase tracking: subdivide until each increment < pi/2
        std::vector<double> ts = {0.0, 1.0};
        std::vector<Complex> fs = {eval(a), eval(b)};
        for (int pass = 0; pass < 24; ++pass) {
            bool refined = false;
            std::vector<double> nts;
            std::vector<Complex> nfs;
            nts.reserve(2 * ts.size());
            nfs.reserve(2 * ts.size());
            int base = pass == 0 ? samples_per_edge : 1;
            for (size_t i = 0; i + 1 < ts.size(); ++i) {
                nts.push_back(ts[i]);
                nfs.push_back(fs[i]);
                const double dphi =
                    std::abs(std::arg(fs[i + 1] / fs[i]));
                int extra = base - 1;
                if (dphi > 1.5) extra = std::max(extra, 3);
                else if (dphi > 0.7) extra = std::max(extra, 1);
                if (extra > 0) {
                    refined = true;
                    for (int j = 1; j <= extra; ++j) {
                        const double t =
                            ts[i] + (ts[i + 1] - ts[i]) * double(j) / (extra + 1);
                        nts.push_back(t);
                        nfs.push_back(eval(a + (b - a) * t));
                    }
                }
            }
            nts.push_back(ts.back());
            nfs.push_back(fs.back());
            ts.swap(nts);
            fs.swap(nfs);
            if (!refined && pass > 0) break;
            if (ts.size() > 2000000)
                throw SingularityError("winding_number: contour refinement diverged");
        }
        for (size_t i = 0; i + 1 < ts.size(); ++i) {
            const double dphi = std::arg(fs[i + 1] / fs[i]);
            if (std::abs(dphi) > 2.8)
                throw SingularityError("winding_number: phase jump too large");
            total += dphi;
        }
    }
    const double w = total / (2.0 * pi);
    const long n = std::lround(w);
    if (std::abs(w - double(n)) > 0.25)
        throw SingularityError("winding_number: non-integer winding");
    return int(n);
}

namespace {

// Newton with a central-difference derivative; the denominator is analytic,
// so the difference quotient converges quadratically alongside the iterate.
bool newton_refine(const std::function<Complex(Complex)>& f, Complex* k,
                   double* residual) {
    Complex z = *k;
    for (int it = 0; it < 60; ++it) {
        const double h = 1e-7 * std::max(1.0, std::abs(z));
        const Complex fz = f(z);
        const Complex df = (f(z + h) - f(z - h)) / (2.0 * h);
        if (std::abs(df) == 0.0) return false;
        const Complex step = fz / df;
        z -= step;
        if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(z))) {
            *k = z;
            *residual = std::abs(f(z));
            return true;
        }
    }
    *k = z;
    *residual = std::abs(f(z));
    return false;
}

void subdivide_collect(const std::function<Complex(Complex)>& f,
                       const ComplexRect& rect, int zeros, int depth,
                       PoleSet* out) {
    const double w = rect.re_hi - rect.re_lo;
    const double h = rect.im_hi - rect.im_lo;
    const Complex center{0.5 * (rect.re_lo + rect.re_hi),
                         0.5 * (rect.im_lo + rect.im_hi)};

    if (zeros == 1) {
        Complex k = center;
        double residual = 0.0;
        const bool ok = newton_refine(f, &k, &residual);
        if (ok && rect.contains(k)) {
            out->push_back(Pole{k, residual, 1, PoleOrigin::unclassified, {}});
            return;
        }
        // escaped or stalled: keep splitting below
    }

    if (std::max(w, h) < 1e-6 || depth > 40) {
        // terminal cell: either a genuinely multiple zero (b = 0 embedded
        // eigenvalues) or a cluster Newton cannot separate
        Complex k = center;
        double residual = 0.0;
        const bool ok = newton_refine(f, &k, &residual);
        Pole pole;
        pole.k = (ok && rect.contains(k)) ? k : center;
        pole.residual = (ok && rect.contains(k)) ? residual : std::abs(f(center));
        pole.multiplicity = zeros;
        pole.origin = PoleOrigin::unclassified;
        out->push_back(pole);
        return;
    }

    // split the longer side; nudge the split if a zero sits on the cut
    for (double frac : {0.5, 0.47, 0.53, 0.41}) {
        ComplexRect a = rect, b = rect;
        if (w >= h) {
            const double cut = rect.re_lo + frac * w;
            a.re_hi = cut;
            b.re_lo = cut;
        } else {
            const double cut = rect.im_lo + frac * h;
            a.im_hi = cut;
            b.im_lo = cut;
        }
        try {
            const int za = winding_number(f, a);
            const int zb = winding_number(f, b);
            if (za + zb != zeros) continue;  // contour trouble; re-cut
            if (za > 0) subdivide_collect(f, a, za, depth + 1, out);
            if (zb > 0) subdivide_collect(f, b, zb, depth + 1, out);
            return;
        } catch (const SingularityError&) {
            continue;
        }
    }
    // every cut failed: fall back to Newton from the center
    Complex k = center;
    double residual = 0.0;
    newton_refine(f, &k, &residual);
    Pole pole;
    pole.k = rect.contains(k) ? k : center;
    pole.residual = rect.contains(k) ? residual : std::abs(f(center));
    pole.multiplicity = zeros;
    pole.origin = PoleOrigin::unclassified;
    out->push_back(pole);
}

}  // namespace

PoleSet find_poles(const CombParams& p, int N, const ComplexRect& region, int grid) {
    auto f = [&](Complex k) { return krein_denominator_entire(p, N, k); };

    PoleSet out;
    const double w = region.re_hi - region.re_lo;
    const int nx = std::max(1, grid);
    // initial split into vertical strips keeps each winding integral short
    for (int i = 0; i < nx; ++i) {
        ComplexRect cell = region;
        cell.re_lo = region.re_lo + w * double(i) / nx;
        cell.re_hi = region.re_lo + w * double(i + 1) / nx;
        int zeros = 0;
        bool counted = false;
        for (double pad : {0.0, 1e-7 * w, -1e-7 * w}) {
            ComplexRect c2 = cell;
            c2.re_lo += pad;
            c2.re_hi += pad;
            try {
                zeros = winding_number(f, c2);
                cell = c2;
                counted = true;
                break;
            } catch (const SingularityError&) {
                continue;
            }
        }
        if (!counted)
            throw SingularityError("find_poles: could not count zeros in cell");
        if (zeros > 0) subdivide_collect(f, cell, zeros, 0, &out);
    }

    // dedupe refinements that converged to the same zero from two cells
    std::sort(out.begin(), out.end(), [](const Pole& a, const Pole& b) {
        if (a.k.real() != b.k.real()) return a.k.real() < b.k.real();
        return a.k.imag() < b.k.imag();
    });
    PoleSet dedup;
    for (const auto& pole : out) {
        if (!dedup.empty() && std::abs(dedup.back().k - pole.k) < 1e-8)
            dedup.back().multiplicity += pole.multiplicity - 1;
        else
            dedup.push_back(pole);
    }
    return dedup;
}

PoleSet classify_poles(PoleSet poles, const std::vector<double>& stub_ks,
                       const CombParams& p, int N) {
    if (stub_ks.empty()) {
        for (auto& pole : poles) pole.origin = PoleOrigin::spatial;
        return poles;
    }
    double min_spacing = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < stub_ks.size(); ++i)
        min_spacing = std::min(min_spacing, stub_ks[i + 1] - stub_ks[i]);
    if (!std::isfinite(min_spacing)) min_spacing = 2.0 * stub_ks.front();

    for (auto& pole : poles) {
        if (pole.residual > 1e-8) continue;  // unconverged: stays unclassified
        double best = std::numeric_limits<double>::infinity();
        double best_kn = stub_ks.front();
        for (double kn : stub_ks) {
            const double d = std::abs(pole.k.real() - kn);
            if (d < best) {
                best = d;
                best_kn = kn;
            }
        }
        pole.nearest_k_n = best_kn;
        if (best > 0.5 * min_spacing) {
            pole.origin = PoleOrigin::spatial;
            continue;
        }
        // homotopy b -> 0: follow the zero while shrinking |b| in steps of
        // 0.05; a stub-origin pole runs into its eigenvalue on the real axis.
        Complex z = pole.k;
        bool tracked = true;
        CombParams q = p;
        const double sign = p.b >= 0 ? 1.0 : -1.0;
        for (double babs = std::abs(p.b) - 0.05; babs > 0.02; babs -= 0.05) {
            q.b = sign * babs;
            auto fb = [&](Complex kk) { return krein_denominator_entire(q, N, kk); };
            double res = 0.0;
            if (!newton_refine(fb, &z, &res)) {
                tracked = false;
                break;
            }
        }
        const bool lands = tracked && std::abs(z.real() - best_kn) < 0.1 * min_spacing &&
                           std::abs(z.imag()) < 0.05 * min_spacing;
        pole.origin = lands ? PoleOrigin::stub : PoleOrigin::spatial;
    }
    return poles;
}

}  // namespace sscat
