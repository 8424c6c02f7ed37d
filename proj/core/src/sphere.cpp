#include "sscat/sphere.hpp"

#include "sscat/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace sscat {

namespace {

constexpr double inv4pi = 1.0 / (4.0 * pi);

// nu >= 0 with nu(nu+1) = E, i.e. the (generally non-integer) angular index
// at energy E.
double nu_of(double E) { return 0.5 * (std::sqrt(1.0 + 4.0 * E) - 1.0); }

void check_eigenvalue_hit(double E) {
    const long l = std::lround(nu_of(E));
    if (l >= 1) {
        const double lam = double(l) * double(l + 1);
        if (std::abs(lam - E) < 1e-12 * lam)
            throw EigenvalueHit("sphere series: k^2 hits eigenvalue l(l+1), l = " +
                                std::to_string(l));
    }
}

// sum_{m>=0} (-1)^m / (m + a)  (Dirichlet beta-like tail of an alternating
// harmonic shift), via the digamma reflection-free identity.
double alt_tail(double a) {
    return 0.5 * (digamma(0.5 * (a + 1.0)) - digamma(0.5 * a));
}

int auto_l_max(double k, int requested) {
    int l = requested > 0 ? requested
                          : std::max(5000, 50 * int(std::ceil(std::max(k * k, 1.0))));
    // the resummed tails need l_max above the last singular term
    const double nu = nu_of(std::max(k * k, 0.0));
    return std::max(l, int(std::ceil(nu)) + 10);
}

}  // namespace

int SphereParams::effective_l_max(double k) const { return auto_l_max(k, l_max); }

SeriesValue g_series(double k, int l_max) {
    const double E = k * k;
    check_eigenvalue_hit(E);
    const int L = auto_l_max(k, l_max);
    const double nu = nu_of(E);

    double sum = 0.0, abs_sum = 0.0;
    for (int l = 1; l <= L; ++l) {
        const double term = 1.0 / (l - nu) + 1.0 / (l + 1.0 + nu);
        const double s = (l & 1) ? -term : term;
        sum += s;
        abs_sum += std::abs(term);
    }
    // exact alternating tails: sum_{l>L} (-1)^l/(l+a) = (-1)^{L+1} alt_tail(L+1+a)
    const double sgn = (L & 1) ? 1.0 : -1.0;  // (-1)^{L+1}
    const double tail = sgn * (alt_tail(L + 1.0 - nu) + alt_tail(L + 2.0 + nu));

    SeriesValue out;
    out.value = inv4pi * (sum + tail);
    out.tail_bound = inv4pi * (abs_sum + std::abs(tail)) * 4.4e-16 + 1e-15;
    return out;
}

SeriesValue z_series(double k, double rho, int l_max, double c_G) {
    if (!(rho > 0.0)) throw std::invalid_argument("z_series: rho > 0 required");
    const double E = k * k;
    check_eigenvalue_hit(E);
    const int L = auto_l_max(k, l_max);
    const double nu = nu_of(E);

    // sum_{j=0}^{2l} 1/(l^2+j+1) = psi((l+1)^2+1) - psi(l^2+1), exactly.
    double sum = 0.0, abs_sum = 0.0;
    double psi_lo = digamma(2.0);  // psi(1^2 + 1) at l = 1
    for (int l = 1; l <= L; ++l) {
        const double psi_hi = digamma(double(l + 1) * double(l + 1) + 1.0);
        const double term =
            1.0 / (l - nu) + 1.0 / (l + 1.0 + nu) - (psi_hi - psi_lo);
        sum += term;
        abs_sum += std::abs(term) + (psi_hi - psi_lo);
        psi_lo = psi_hi;
    }
    // resummed tail of both pieces (partial fractions and harmonic blocks)
    const double tail = digamma(double(L + 1) * double(L + 1) + 1.0) -
                        digamma(L + 1.0 - nu) - digamma(L + 2.0 + nu);

    SeriesValue out;
    out.value = inv4pi * (sum + tail) - std::log(rho) / (2.0 * pi) + c_G;
    out.tail_bound = inv4pi * (abs_sum + std::abs(tail)) * 4.4e-16 + 1e-15;
    return out;
}

SphereSeries sphere_series(const SphereParams& p, double k) {
    const int L = p.effective_l_max(k);
    const SeriesValue g = g_series(k, L);
    const SeriesValue Z = z_series(k, p.rho, L, p.c_G);
    SphereSeries s;
    s.g = g.value;
    s.Z = Z.value;
    s.Delta = (g.value - Z.value) * (g.value + Z.value);
    s.tail_bound = g.tail_bound + Z.tail_bound;
    return s;
}

LTransfer sphere_transfer_general(double g, double Z1, double Z2, double rho) {
    if (g == 0.0) throw SingularityError("sphere_transfer: g = 0");
    const double Delta = g * g - Z1 * Z2;
    LTransfer L;
    L.l11 = (Z2 + pi * Delta) / g;
    L.l12 = -2.0 * pi * rho * Delta / g;
    L.l21 = (1.0 / pi - Z1 - Z2 - pi * Delta) / (2.0 * rho * g);
    L.l22 = (Z1 + pi * Delta) / g;
    return L;
}

LTransfer sphere_transfer(const SphereParams& p, double k) {
    const SphereSeries s = sphere_series(p, k);
    return sphere_transfer_general(s.g, s.Z, s.Z, p.rho);
}

SMatrix sphere_transmission(const SphereParams& p, double k) {
    if (!(k > 0.0))
        throw std::invalid_argument("sphere_transmission: requires k > 0");
    const SphereSeries s = sphere_series(p, k);
    const Complex i2kr{0.0, 2.0 * k * p.rho};
    const double a = pi * s.Delta + 2.0 * s.Z - 1.0 / pi;
    const Complex den =
        a + i2kr * (2.0 * s.Z + 2.0 * pi * s.Delta) - 4.0 * pi * k * k * p.rho * p.rho * s.Delta;
    if (std::abs(den) < 1e-280)
        throw SingularityError("sphere_transmission: vanishing denominator");
    SMatrix out;
    out.k = k;
    out.r = -(a + 4.0 * pi * k * k * p.rho * p.rho * s.Delta) / den;
    out.t = -Complex{0.0, 4.0 * k * p.rho} * s.g / den;
    out.t_rev = out.t;  // det L = 1 for identical junctions
    out.r_rev = out.r;  // and Z1 = Z2 makes the element mirror symmetric
    return out;
}

ElementData sphere_element_data(const SphereParams& p, double k) {
    return element_data(sphere_transfer(p, k), k);
}

std::vector<MuRoot> mu_roots(const SphereParams& p, int l_lo, int l_hi) {
    if (l_lo < 1 || l_hi < l_lo) throw std::invalid_argument("mu_roots: bad l range");
    std::vector<MuRoot> roots;
    for (int l = l_lo; l <= l_hi; ++l) {
        const double lo = double(l) * double(l - 1);
        const double hi = double(l) * double(l + 1);
        const double pad = (hi - lo) * 1e-9;
        const double sgn = (l & 1) ? -1.0 : 1.0;
        auto F = [&](double E) {
            const double k = std::sqrt(E);
            const int L = p.effective_l_max(k);
            return z_series(k, p.rho, L, p.c_G).value + sgn * g_series(k, L).value;
        };
        const double f_lo = F(lo + pad), f_hi = F(hi - pad);
        if ((f_lo < 0) == (f_hi < 0)) continue;  // no root at this level
        const auto res = bisect(F, lo + pad, hi - pad, (hi - lo) * 1e-13);
        roots.push_back(MuRoot{l, res.root});
    }
    return roots;
}

AveragedCurve averaged_transmission(const SphereParams& p,
                                    const std::vector<double>& k_grid) {
    AveragedCurve out;
    out.k = k_grid;
    out.t2.reserve(k_grid.size());
    for (double k : k_grid) out.t2.push_back(std::norm(sphere_transmission(p, k).t));

    const int n = int(out.t2.size());
    for (int i = 1; i + 1 < n; ++i) {
        if (out.t2[i] > out.t2[i - 1] && out.t2[i] >= out.t2[i + 1])
            out.peak_indices.push_back(i);
    }

    out.averaged.resize(n);
    if (out.peak_indices.empty()) {
        out.averaged = out.t2;
        return out;
    }
    const int npk = int(out.peak_indices.size());
    for (int i = 0; i < n; ++i) {
        // ten peaks nearest in k: slide a window over the sorted peak list
        auto it = std::lower_bound(out.peak_indices.begin(), out.peak_indices.end(), i);
        int rgt = int(it - out.peak_indices.begin());
        int lft = rgt - 1;
        const int want = std::min(10, npk);
        double acc = 0.0;
        for (int taken = 0; taken < want; ++taken) {
            const bool take_left =
                rgt >= npk ||
                (lft >= 0 && (out.k[i] - out.k[out.peak_indices[lft]] <
                              out.k[out.peak_indices[rgt]] - out.k[i]));
            if (take_left) {
                acc += out.t2[out.peak_indices[lft]];
                --lft;
            } else {
                acc += out.t2[out.peak_indices[rgt]];
                ++rgt;
            }
        }
        out.averaged[i] = acc / want;
    }
    return out;
}

double delta_prime_reference(double beta, double k) {
    const double kb = 0.5 * k * beta;
    return 1.0 / (1.0 + kb * kb);
}

double calibrate_delta_prime(double t2_ref, double k_ref) {
    if (!(t2_ref > 0.0) || t2_ref > 1.0)
        throw std::invalid_argument("calibrate_delta_prime: t2_ref in (0, 1]");
    return 2.0 / k_ref * std::sqrt(1.0 / t2_ref - 1.0);
}

}  // namespace sscat
