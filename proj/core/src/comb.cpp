#include "sscat/comb.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sscat {

namespace {

constexpr Complex I{0.0, 1.0};

// sin(w y)/w and cos(w y), stable as w -> 0.
Complex sinc_w(Complex w, double y) {
    if (std::abs(w) * std::abs(y) < 1e-8) {
        const Complex w2y2 = w * w * y * y;
        return y * (1.0 - w2y2 / 6.0 * (1.0 - w2y2 / 20.0));
    }
    return std::sin(w * y) / w;
}

template <class K>
ToothSolution tooth_impl(const CombParams& p, K k) {
    if (!(p.L > 0.0)) throw std::invalid_argument("solve_tooth: L > 0 required");
    ToothSolution sol;
    sol.k = Complex(k);
    const Complex k2 = Complex(k) * Complex(k);
    switch (p.potential) {
        case CombParams::Potential::zero: {
            // u(x) = sin(k(x-L))/k
            sol.u0 = -sinc_w(Complex(k), p.L);
            sol.du0 = std::cos(Complex(k) * p.L);
            return sol;
        }
        case CombParams::Potential::constant: {
            const Complex w = std::sqrt(k2 - p.v0);  // branch-independent below
            sol.u0 = -sinc_w(w, p.L);
            sol.du0 = std::cos(w * p.L);
            return sol;
        }
        case CombParams::Potential::callable:
            break;
    }
    // -u'' + V u = k^2 u integrated from (u, u') = (0, 1) at x = L down to 0.
    OdeDiagnostics diag;
    auto rhs = [&](double x, const std::array<Complex, 2>& y) {
        return std::array<Complex, 2>{y[1], (p.V(x) - k2) * y[0]};
    };
    auto y = detail::rk45_integrate<Complex>(rhs, p.L, 0.0, {Complex{0.0}, Complex{1.0}},
                                             1e-12, 1e-14, &diag);
    sol.u0 = y[0];
    sol.du0 = y[1];
    sol.steps = diag.steps;
    sol.rejected = diag.rejected;
    sol.err_target = diag.err_target;
    return sol;
}

}  // namespace

CombParams CombParams::with_constant_potential(CombParams base, double v0) {
    base.potential = Potential::constant;
    base.v0 = v0;
    return base;
}

CombParams CombParams::with_potential(CombParams base, std::function<double(double)> V) {
    base.potential = Potential::callable;
    base.V = std::move(V);
    return base;
}

CombParams CombParams::with_sampled_potential(CombParams base,
                                              std::vector<double> samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("with_sampled_potential: need >= 2 samples");
    const double L = base.L;
    base.potential = Potential::callable;
    base.V = [samples = std::move(samples), L](double x) {
        const double s = std::clamp(x / L, 0.0, 1.0) * (samples.size() - 1);
        const size_t i = std::min(size_t(s), samples.size() - 2);
        const double w = s - double(i);
        return (1.0 - w) * samples[i] + w * samples[i + 1];
    };
    return base;
}

ToothSolution solve_tooth(const CombParams& p, Complex k) { return tooth_impl(p, k); }

ToothSolution solve_tooth(const CombParams& p, double k) {
    // Real momentum keeps everything real; reuse the complex path and strip
    // the (exactly zero for analytic paths, negligible for the integrator)
    // imaginary parts on return where callers need reals.
    return tooth_impl(p, Complex{k, 0.0});
}

Complex comb_beta(const CombParams& p, Complex k) {
    const ToothSolution s = solve_tooth(p, k);
    const Complex den = p.c * s.du0 - s.u0;
    return p.d / (2.0 * k) + (p.b * p.b) / (2.0 * k) * (s.du0 / den);
}

double comb_beta(const CombParams& p, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("comb_beta: requires k > 0");
    return comb_beta(p, Complex{k, 0.0}).real();
}

bool comb_at_beta_pole(const CombParams& p, double k) {
    const ToothSolution s = solve_tooth(p, k);
    const double den = (p.c * s.du0 - s.u0).real();
    const double scale = std::abs(s.u0) + std::abs(p.c) * std::abs(s.du0);
    if (std::abs(den) > 1e-3 * std::max(scale, 1e-30)) return false;
    // one Newton step on the pole condition estimates the distance in k
    const double h = std::max(1e-7, p.pole_eps);
    const ToothSolution sp = solve_tooth(p, k + h);
    const ToothSolution sm = solve_tooth(p, k - h);
    const double dden = ((p.c * sp.du0 - sp.u0).real() -
                         (p.c * sm.du0 - sm.u0).real()) / (2.0 * h);
    if (dden == 0.0) return std::abs(den) == 0.0;
    return std::abs(den / dden) < p.pole_eps;
}

namespace {

// |t_N|^2 = 1/(1 + beta^2 U_{N-1}(zeta)^2) underflows double range: beta is
// finite but so large that evaluating the formulas would overflow.  The
// full-reflection limit is the honest value then.
bool effectively_full_reflection(double beta, double zeta, int N) {
    const double lg = std::log10(1.0 + std::abs(beta)) +
                      (N - 1) * std::log10(2.0 * std::abs(zeta) + 2.0);
    return lg > 280.0;
}

}  // namespace

ElementData comb_element_data(const CombParams& p, double k) {
    if (comb_at_beta_pole(p, k))
        throw SingularityError("comb_element_data: beta pole (stub eigenvalue)");
    const double beta = comb_beta(p, k);
    if (!std::isfinite(beta))
        throw SingularityError("comb_element_data: beta pole (stub eigenvalue)");
    return ElementData{Complex{1.0, beta}, Complex{0.0, beta}, 0.0};
}

double comb_zeta(const CombParams& p, double k) {
    return std::cos(k * p.ell) + comb_beta(p, k) * std::sin(k * p.ell);
}

SerialResult comb_amplitudes(const CombParams& p, int N, double k) {
    if (N < 1) throw std::invalid_argument("comb_amplitudes: N >= 1");
    if (!(k > 0.0)) throw std::invalid_argument("comb_amplitudes: requires k > 0");
    const Complex eps = std::exp(I * (k * p.ell));
    const Complex eps_bar = 1.0 / eps;

    SerialResult res;
    res.k = k;
    res.ell = p.ell;
    res.n_elements = N;

    double beta = comb_beta(p, k);
    const double zeta_raw = std::isfinite(beta)
                                ? std::cos(k * p.ell) + beta * std::sin(k * p.ell)
                                : std::numeric_limits<double>::infinity();
    if (!std::isfinite(beta) || effectively_full_reflection(beta, zeta_raw, N) ||
        comb_at_beta_pole(p, k)) {
        // Total reflection: t_N = 0, r_N = -1 in the pole limit.
        res.full_reflection = true;
        res.t = res.t_rev = 0.0;
        res.r = -1.0;
        Complex mirror = 1.0;
        for (int j = 1; j < N; ++j) mirror *= eps_bar * eps_bar;
        res.r_rev = -mirror;
        res.zeta = zeta_raw;
        res.u_val = std::numeric_limits<double>::infinity();
        res.in_band = false;
        return res;
    }

    const double zeta = zeta_raw;
    const double u1 = cheb_u(N - 1, zeta);
    const double u2 = cheb_u(N - 2, zeta);
    const Complex den = eps * u2 - Complex{1.0, beta} * u1;
    if (std::abs(den) < 1e-280)
        throw SingularityError("comb_amplitudes: vanishing denominator");

    Complex eps_bar_nm1 = 1.0;  // eps^{1-N}
    for (int j = 1; j < N; ++j) eps_bar_nm1 *= eps_bar;

    res.zeta = zeta;
    res.u_val = u1;
    res.in_band = std::abs(zeta) <= 1.0;
    res.r = I * beta * u1 / den;
    res.t = -eps_bar_nm1 / den;
    res.t_rev = res.t;                              // phi = 0
    res.r_rev = eps_bar_nm1 * eps_bar_nm1 * res.r;  // mirror symmetry about the center
    return res;
}

SerialResult comb_direct_oracle(const CombParams& p, int N, double k) {
    if (N < 1) throw std::invalid_argument("comb_direct_oracle: N >= 1");
    const Complex eps = std::exp(I * (k * p.ell));
    const Complex eps_inv = 1.0 / eps;

    const double beta = comb_beta(p, k);
    const double zeta_raw = std::isfinite(beta)
                                ? std::cos(k * p.ell) + beta * std::sin(k * p.ell)
                                : std::numeric_limits<double>::infinity();
    if (!std::isfinite(beta) || effectively_full_reflection(beta, zeta_raw, N) ||
        comb_at_beta_pole(p, k)) {
        return comb_amplitudes(p, N, k);  // full-reflection branch
    }
    const Complex one_ib{1.0, beta};
    const double zeta = zeta_raw;

    using Mat = Eigen::MatrixXcd;
    using Vec = Eigen::VectorXcd;

    // Reflection: unknowns f_0..f_{N-1} (f_N = 0), r_N = f_0.
    Mat Af = Mat::Zero(N, N);
    Vec bf = Vec::Zero(N);
    Af(0, 0) = one_ib;
    if (N > 1) Af(0, 1) = -1.0;
    bf(0) = Complex{0.0, -beta};
    for (int j = 1; j <= N - 2; ++j) {
        Af(j, j + 1) += eps_inv;
        Af(j, j) += -2.0 * zeta;
        Af(j, j - 1) += eps;
    }
    if (N > 1) {
        Af(N - 1, N - 1) = -2.0 * zeta;
        Af(N - 1, N - 2) = eps;
    }
    Eigen::PartialPivLU<Mat> luf(Af);
    const Vec f = luf.solve(bf);

    // Transmission: unknowns e_1..e_N (e_0 = 1), t_N = e_N.
    Mat Ae = Mat::Zero(N, N);
    Vec be = Vec::Zero(N);
    if (N == 1) {
        Ae(0, 0) = one_ib;
        be(0) = 1.0;
    } else {
        // rows indexed 0..N-1 over unknown vector (e_1 .. e_N)
        Ae(0, 0) = -2.0 * zeta;
        Ae(0, 1) = eps;
        be(0) = -eps_inv;
        for (int j = 1; j <= N - 2; ++j) {
            Ae(j, j + 1) += eps;         // e_{j+2}
            Ae(j, j) += -2.0 * zeta;     // e_{j+1}
            Ae(j, j - 1) += eps_inv;     // e_j
        }
        Ae(N - 1, N - 1) = one_ib;
        Ae(N - 1, N - 2) = -1.0;
    }
    Eigen::PartialPivLU<Mat> lue(Ae);
    const Vec e = lue.solve(be);

    SerialResult res;
    res.k = k;
    res.ell = p.ell;
    res.n_elements = N;
    res.zeta = zeta;
    res.u_val = cheb_u(N - 1, zeta);
    res.in_band = std::abs(zeta) <= 1.0;
    res.r = f(0);
    res.t = e(N - 1);
    res.t_rev = res.t;
    Complex mirror = 1.0;
    for (int j = 1; j < N; ++j) mirror *= eps_inv * eps_inv;
    res.r_rev = mirror * res.r;
    return res;
}

std::vector<double> stub_spectrum(const CombParams& p, double k_min, double k_max,
                                  int grid) {
    if (!(k_max > k_min) || !(k_min > 0.0))
        throw std::invalid_argument("stub_spectrum: need 0 < k_min < k_max");
    if (grid <= 0) {
        // zeros are spaced like pi/L; oversample by 8
        grid = std::max(64, int(std::ceil((k_max - k_min) * p.L / pi * 8)));
    }
    auto f = [&](double k) {
        const ToothSolution s = solve_tooth(p, k);
        return (s.u0 - p.c * s.du0).real();
    };
    return find_roots_on_grid(f, k_min, k_max, grid, 1e-13 * (k_max - k_min));
}

ZeroEnergyReport zero_energy_checks(const CombParams& p, int N) {
    if (N < 1) throw std::invalid_argument("zero_energy_checks: N >= 1");
    ZeroEnergyReport rep;
    rep.resonance_condition = p.d * (p.c + p.L) + p.b * p.b;
    rep.resonance = std::abs(rep.resonance_condition) < 1e-12;
    rep.zeta0 = 1.0 + (p.d * p.c + p.d * p.L + p.b * p.b) * p.ell / (2.0 * (p.c + p.L));
    for (int n = 1; n <= N - 1; ++n) {
        if (std::abs(std::cos(n * pi / N) - rep.zeta0) < 1e-10)
            rep.matching_n.push_back(n);
    }
    for (double k : {1e-2, 1e-3, 1e-4}) {
        rep.samples.emplace_back(k, comb_amplitudes(p, N, k).transmission());
    }
    rep.t2_small_k = rep.samples.back().second;
    return rep;
}

}  // namespace sscat
