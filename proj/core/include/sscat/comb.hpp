// Comb-graph scatterer: a line with Dirichlet-terminated stubs of length L
// attached at spacing ell through the real three-parameter junction matrix
// K = [[b, c], [d, -b]].  The stub enters only through the boundary data of
// u_L, the solution of -u'' + V u = k^2 u with u_L(L) = 0, u_L'(L) = 1, via
//
//     beta(k) = d/2k + (b^2/2k) * u_L'(0) / (c u_L'(0) - u_L(0)),
//
// which makes the single tooth a delta-like element with R = 1 + i*beta,
// S = i*beta and Bloch discriminant zeta = cos(k ell) + beta sin(k ell).
// beta has poles at the decoupled-stub eigenvalues (u_L - c u_L')(0) = 0,
// where the comb reflects totally for every N.

#ifndef SSCAT_COMB_HPP
#define SSCAT_COMB_HPP

#include "sscat/serial.hpp"

namespace sscat {

struct CombParams {
    double b = 1.0, c = 0.0, d = 0.0;
    double L = 1.0;    // stub length, > 0
    double ell = 1.0;  // spacing
    // Stub potential: analytic fast paths for V = 0 and V = const are exact
    // and double as test oracles for the integrator.
    enum class Potential { zero, constant, callable };
    Potential potential = Potential::zero;
    double v0 = 0.0;
    std::function<double(double)> V;

    // A tooth within pole_eps (in k) of a stub eigenvalue is treated as an
    // exact full reflector; the amplitude limit there is well defined.
    double pole_eps = 1e-9;

    static CombParams with_constant_potential(CombParams base, double v0);
    static CombParams with_potential(CombParams base, std::function<double(double)> V);
    /// Uniform samples on [0, L], linearly interpolated.
    static CombParams with_sampled_potential(CombParams base, std::vector<double> samples);
};

struct ToothSolution {
    Complex u0{0.0}, du0{1.0};  // u_L(0), u_L'(0)
    Complex k{0.0};
    int steps = 0;       // accepted integrator steps (0 for analytic paths)
    int rejected = 0;
    double err_target = 0.0;
};

/// Boundary data of the tooth solution at the junction, by backward
/// integration from x = L (analytic for zero/constant potentials).  Complex k
/// is the continuation used by the resonance search.
ToothSolution solve_tooth(const CombParams& p, Complex k);
ToothSolution solve_tooth(const CombParams& p, double k);

double comb_beta(const CombParams& p, double k);
Complex comb_beta(const CombParams& p, Complex k);

/// Distance guard: true when k is within p.pole_eps of a beta pole (estimated
/// from one Newton step on the pole condition).
bool comb_at_beta_pole(const CombParams& p, double k);

/// R = 1 + i beta, S = i beta, phi = 0.  Throws SingularityError at beta poles.
ElementData comb_element_data(const CombParams& p, double k);

double comb_zeta(const CombParams& p, double k);

/// Closed-form N-tooth amplitudes.  At a beta pole returns the full-reflection
/// limit (t = 0, r = -1) with the full_reflection flag set.
SerialResult comb_amplitudes(const CombParams& p, int N, double k);

/// Direct linear-system route: assembles and solves the tridiagonal systems
/// for the outgoing coefficients and reads off r_N and t_N.  Independent of
/// the Chebyshev formula; kept as a production cross-check.
SerialResult comb_direct_oracle(const CombParams& p, int N, double k);

/// Stub eigenvalues in (k_min, k_max): roots of u_L(0) - c u_L'(0) = 0.
std::vector<double> stub_spectrum(const CombParams& p, double k_min, double k_max,
                                  int grid = 0);

/// Zero-energy behavior: the resonance condition d(c+L) + b^2 = 0, the
/// band-edge matches cos(n pi / N) = 1 + (dc + dL + b^2) ell / (2(c+L)), and a
/// small-k measurement of |t_N|^2.
struct ZeroEnergyReport {
    double resonance_condition = 0.0;  // d(c+L) + b^2
    bool resonance = false;
    double zeta0 = 0.0;                // limit of zeta as k -> 0+
    std::vector<int> matching_n;       // n in 1..N-1 with cos(n pi/N) = zeta0
    double t2_small_k = 0.0;           // |t_N|^2 at k = 1e-4
    std::vector<std::pair<double, double>> samples;  // (k, |t_N|^2)
};

ZeroEnergyReport zero_energy_checks(const CombParams& p, int N);

}  // namespace sscat

#endif
