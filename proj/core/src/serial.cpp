#include "sscat/serial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sscat {

namespace {

constexpr Complex I{0.0, 1.0};

template <class T>
T cheb_u_impl(int n, T x) {
    if (n < -1) throw std::invalid_argument("cheb_u: n >= -1 required");
    if (n == -1) return T{0.0};
    T um1{0.0}, u{1.0};
    for (int m = 0; m < n; ++m) {
        T up = 2.0 * x * u - um1;
        um1 = u;
        u = up;
    }
    return u;
}

}  // namespace

double cheb_u(int n, double x) { return cheb_u_impl(n, x); }
Complex cheb_u(int n, Complex x) { return cheb_u_impl(n, x); }

SerialResult serial_closed_form(const ElementData& elem, double ell, int N, double k) {
    if (N < 1) throw std::invalid_argument("serial_closed_form: N >= 1");
    if (ell < 0.0) throw std::invalid_argument("serial_closed_form: ell >= 0");
    const Complex eps = std::exp(I * (k * ell));
    const Complex eps_bar = 1.0 / eps;
    const double x = (eps_bar * elem.R).real();
    const double u_nm1 = cheb_u(N - 1, x);
    const double u_n = cheb_u(N, x);
    const double s2 = std::norm(elem.S);
    const double den = std::sqrt(1.0 + s2 * u_nm1 * u_nm1);

    // Phase factor of the product of coefficient transfer matrices.  The
    // identity U_n^2 - 2x U_n U_{n-1} + U_{n-1}^2 = 1 makes it unimodular.
    const Complex theta_fac = (u_n - eps * std::conj(elem.R) * u_nm1) / den;
    const Complex inv_theta = 1.0 / theta_fac;

    // exp(i N phi) enters t_N and t_rev_N; it drops out of the printed
    // probabilities and of elements with real L (phi = 0) but not of the
    // general case (checked against the other two composition routes).
    const Complex phase_n = std::exp(I * (N * elem.phi));
    const Complex eps_bar_n = std::exp(-I * (N * k * ell));

    SerialResult res;
    res.k = k;
    res.ell = ell;
    res.n_elements = N;
    res.zeta = x;
    res.u_val = u_nm1;
    res.in_band = std::abs(x) <= 1.0;
    res.t = phase_n * eps_bar_n * inv_theta / den;
    res.t_rev = std::conj(phase_n) * eps_bar_n * inv_theta / den;
    res.r = -eps_bar * inv_theta * elem.S * u_nm1 / den;
    res.r_rev = eps_bar_n * eps_bar_n * eps * inv_theta * std::conj(elem.S) * u_nm1 / den;
    return res;
}

SerialResult serial_recursive(const SMatrix& single, double ell, int N) {
    if (N < 1) throw std::invalid_argument("serial_recursive: N >= 1");
    const double k = single.k;
    const Complex eps2 = std::exp(I * (2.0 * k * ell));
    const Complex eps2_bar = 1.0 / eps2;

    // Global-convention amplitudes of the growing array; scatterer j sits at
    // j*ell, so its own reflections carry eps^{+-2j}.
    Complex t = single.t, r = single.r, t_rev = single.t_rev, r_rev = single.r_rev;
    Complex fwd = 1.0, bwd = 1.0;  // eps^{2j}, conj
    for (int j = 1; j < N; ++j) {
        fwd *= eps2;
        bwd *= eps2_bar;
        const Complex r_new = fwd * single.r;
        const Complex rrev_new = bwd * single.r_rev;
        const Complex den = 1.0 - r_rev * r_new;
        if (std::abs(den) < 1e-13)
            throw SingularityError(
                "serial_recursive: vanishing composition denominator");
        const Complex t_next = single.t * t / den;
        const Complex r_next = r + t_rev * r_new * t / den;
        const Complex trev_next = t_rev * single.t_rev / den;
        const Complex rrev_next = rrev_new + single.t * r_rev * single.t_rev / den;
        t = t_next;
        r = r_next;
        t_rev = trev_next;
        r_rev = rrev_next;
    }

    SerialResult res;
    res.k = k;
    res.ell = ell;
    res.n_elements = N;
    res.t = t;
    res.r = r;
    res.t_rev = t_rev;
    res.r_rev = r_rev;
    const ElementData elem = element_data(l_from_s(single), k);
    res.zeta = bloch_discriminant(elem, ell, k);
    res.u_val = cheb_u(N - 1, res.zeta);
    res.in_band = std::abs(res.zeta) <= 1.0;
    return res;
}

SerialResult serial_transfer_product(const LTransfer& L, double ell, int N, double k) {
    if (N < 1) throw std::invalid_argument("serial_transfer_product: N >= 1");
    const LTransfer period = L * free_segment(ell, k);

    LTransfer total = L;
    double log_scale = 0.0;
    for (int j = 1; j < N; ++j) {
        total = period * total;
        const double mag = std::max({std::abs(total.l11), std::abs(total.l12),
                                     std::abs(total.l21), std::abs(total.l22)});
        if (mag > 1e100) {
            const double inv = 1.0 / mag;
            total.l11 *= inv;
            total.l12 *= inv;
            total.l21 *= inv;
            total.l22 *= inv;
            log_scale += std::log(mag);
        }
    }

    const Complex ik{0.0, k};
    const Complex den = total.l21 - ik * (total.l22 + total.l11) - k * k * total.l12;
    const double scale = std::abs(total.l21) +
                         k * (std::abs(total.l22) + std::abs(total.l11)) +
                         k * k * std::abs(total.l12);
    if (std::abs(den) < 1e-13 * scale)
        throw SingularityError("serial_transfer_product: full reflection");

    // det(total) = (det L)^N exactly; using the analytic value avoids the
    // cancellation of forming a determinant from near-proportional rows.
    const Complex detL = L.det();
    Complex det_n = 1.0;
    for (int j = 0; j < N; ++j) det_n *= detL;
    const double sigma_inv = std::exp(-log_scale);

    // Amplitudes with both boundary references at the array faces; shift the
    // right face from (N-1) ell back to the origin convention.
    const Complex eps_bar = std::exp(-I * (k * ell));
    Complex shift = 1.0;
    for (int j = 1; j < N; ++j) shift *= eps_bar;

    SerialResult res;
    res.k = k;
    res.ell = ell;
    res.n_elements = N;
    res.r = -(total.l21 + ik * (total.l22 - total.l11) + k * k * total.l12) / den;
    res.r_rev = -shift * shift *
                (total.l21 + ik * (total.l11 - total.l22) + k * k * total.l12) / den;
    res.t = -2.0 * ik * det_n * sigma_inv * shift / den;
    res.t_rev = -2.0 * ik * sigma_inv * shift / den;

    const ElementData elem = element_data(L, k);
    res.zeta = bloch_discriminant(elem, ell, k);
    res.u_val = cheb_u(N - 1, res.zeta);
    res.in_band = std::abs(res.zeta) <= 1.0;
    return res;
}

double bloch_discriminant(const ElementData& elem, double ell, double k) {
    const Complex eps_bar = std::exp(-I * (k * ell));
    return (eps_bar * elem.R).real();
}

std::optional<BandInterval> BandIntervals::band_containing(double k) const {
    for (const auto& b : intervals)
        if (b.contains(k)) return b;
    return std::nullopt;
}

BandIntervals band_intervals(const std::function<ElementData(double)>& elem_fn,
                             double ell, double k_min, double k_max, int grid,
                             const std::vector<double>& breakers) {
    if (grid < 2) throw std::invalid_argument("band_intervals: grid >= 2");
    if (!(k_max > k_min)) throw std::invalid_argument("band_intervals: empty range");

    // h(k) = |disc| - 1: negative in a band.  Singular element data (beta
    // poles and friends) count as gap points, as do explicit breakers.
    auto h = [&](double k) -> double {
        try {
            const double d = bloch_discriminant(elem_fn(k), ell, k);
            if (!std::isfinite(d)) return std::numeric_limits<double>::infinity();
            return std::abs(d) - 1.0;
        } catch (const SingularityError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    // Sample points: uniform grid plus a tight pair around every breaker so a
    // band interval never spans one.
    std::vector<double> ks;
    ks.reserve(grid + 1 + 2 * breakers.size());
    const double step = (k_max - k_min) / grid;
    for (int i = 0; i <= grid; ++i) ks.push_back(k_min + i * step);
    const double eps_b = 1e-9 * (k_max - k_min);
    for (double b : breakers) {
        if (b > k_min + eps_b && b < k_max - eps_b) {
            ks.push_back(b - eps_b);
            ks.push_back(b);
            ks.push_back(b + eps_b);
        }
    }
    std::sort(ks.begin(), ks.end());

    const double xtol = 1e-10 * (k_max - k_min);
    auto refine = [&](double a, double b, int* depth) -> double {
        // bisect the band edge inside [a, b]; h changes sign there
        int d = 0;
        double fa = h(a);
        while (b - a > xtol && d < 200) {
            const double m = 0.5 * (a + b);
            const double fm = h(m);
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
            ++d;
        }
        *depth = d;
        return 0.5 * (a + b);
    };

    BandIntervals out;
    out.k_min = k_min;
    out.k_max = k_max;
    out.grid = grid;

    bool inside = false;
    BandInterval cur;
    double prev_k = ks.front();
    double prev_h = h(prev_k);
    if (prev_h <= 0.0) {
        inside = true;
        cur.k_lo = prev_k;
        cur.residual_lo = std::abs(prev_h);
        cur.depth_lo = 0;
    }
    auto is_breaker = [&](double k) {
        for (double b : breakers)
            if (k == b) return true;
        return false;
    };
    for (size_t i = 1; i < ks.size(); ++i) {
        const double kk = ks[i];
        double hk = is_breaker(kk) ? std::numeric_limits<double>::infinity() : h(kk);
        if (!inside && hk <= 0.0) {
            int depth = 0;
            cur = BandInterval{};
            if (std::isfinite(prev_h)) {
                cur.k_lo = refine(prev_k, kk, &depth);
            } else {
                cur.k_lo = kk;  // band emerges from a singular point
            }
            cur.depth_lo = depth;
            cur.residual_lo = std::abs(h(cur.k_lo));
            inside = true;
        } else if (inside && hk > 0.0) {
            int depth = 0;
            if (std::isfinite(hk)) {
                cur.k_hi = refine(prev_k, kk, &depth);
            } else {
                cur.k_hi = prev_k;
            }
            cur.depth_hi = depth;
            cur.residual_hi = std::abs(h(cur.k_hi));
            out.intervals.push_back(cur);
            inside = false;
        }
        prev_k = kk;
        prev_h = hk;
    }
    if (inside) {
        cur.k_hi = k_max;
        cur.residual_hi = std::abs(prev_h);
        cur.depth_hi = 0;
        out.intervals.push_back(cur);
    }
    return out;
}

EnvelopeBounds envelope_bounds(const ElementData& elem, double ell, int N, double k) {
    const double x = bloch_discriminant(elem, ell, k);
    const double s2 = std::norm(elem.S);
    const double r2 = std::norm(elem.R);  // = 1 + s2
    const double t_sq = 1.0 / r2;
    const double refl_sq = s2 / r2;
    const double ax = std::abs(x);

    EnvelopeBounds b;
    b.in_band = ax <= 1.0;
    b.lb1_inside = (1.0 - x * x) / (1.0 + s2 - x * x);
    b.lb2_inside = 1.0 / (1.0 + double(N) * double(N) * s2);
    const double grow = double(N) - 1.0 + std::pow(ax, N - 1);
    b.ub_outside = 1.0 / (1.0 + s2 * grow * grow);
    const double t2n = std::pow(t_sq, N);
    const double denom = t2n + double(N) * double(N) * refl_sq *
                                   std::pow(1.0 + std::sqrt(refl_sq), 2 * N - 2);
    b.lb_outside = denom > 0.0 ? t2n / denom : 0.0;
    return b;
}

}  // namespace sscat
