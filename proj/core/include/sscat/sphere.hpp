// Geometric "bubble" scatterer: a unit sphere with leads at the poles coupled
// through the physical contact conditions of radius rho.  Only m = 0 modes
// couple; the junction Green's function data reduce to the two spectral sums
//
//   g(k) = (1/4pi) sum_{l>=1} (2l+1)(-1)^l / (l(l+1) - k^2)
//   Z(k) = (1/4pi) sum_{l>=1} [ (2l+1)/(l(l+1)-k^2)
//                               - sum_{j=0}^{2l} 1/(l^2+j+1) ]
//          - ln(rho)/2pi + c_G
//
// evaluated here as a partial sum to l_max plus an analytically resummed
// tail.  Partial fractions give (2l+1)/(l(l+1)-E) = 1/(l-nu) + 1/(l+1+nu)
// with nu(nu+1) = E, and the inner harmonic block telescopes through
// digamma values, so both tails reduce to closed digamma expressions and the
// truncation error of the returned value is at roundoff level; tail_bound
// reports that scale.  A general sphere radius R rescales as k -> k R and is
// not implemented separately.

#ifndef SSCAT_SPHERE_HPP
#define SSCAT_SPHERE_HPP

#include "sscat/scatter.hpp"

namespace sscat {

/// k^2 collides with a sphere eigenvalue l(l+1); the series are undefined.
class EigenvalueHit : public SingularityError {
public:
    explicit EigenvalueHit(const std::string& what) : SingularityError(what) {}
};

struct SphereParams {
    double rho = 0.01;  // contact radius, 0 < rho << 1
    double ell = 1.0;   // lead spacing in arrays
    int l_max = 0;      // series truncation; 0 selects max(5000, 50 ceil(k^2))
    double c_G = 0.0;   // regularization constant, 0 unless recalibrating

    int effective_l_max(double k) const;
};

struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

SeriesValue g_series(double k, int l_max);
SeriesValue z_series(double k, double rho, int l_max, double c_G);

struct SphereSeries {
    double g = 0.0, Z = 0.0;
    double Delta = 0.0;  // (g - Z)(g + Z)
    double tail_bound = 0.0;
};

SphereSeries sphere_series(const SphereParams& p, double k);

/// Value/derivative transfer matrix of the physically coupled sphere with
/// identical junctions (real, det = 1, so phi = 0).
LTransfer sphere_transfer(const SphereParams& p, double k);

/// General two-junction form with distinct regularized values Z1, Z2 (no
/// reference data exists for Z1 != Z2; exposed, exercised only at Z1 = Z2).
LTransfer sphere_transfer_general(double g, double Z1, double Z2, double rho);

SMatrix sphere_transmission(const SphereParams& p, double k);

ElementData sphere_element_data(const SphereParams& p, double k);

struct MuRoot {
    int l = 0;
    double mu = 0.0;  // energy; the resonance momentum is sqrt(mu)
};

/// Roots of Z + (-1)^l g on the spectral intervals (l(l-1), l(l+1)) for
/// l in [l_lo, l_hi]; the factor is strictly increasing there, so each root
/// is unique.  Levels without a sign change are skipped (small l).
std::vector<MuRoot> mu_roots(const SphereParams& p, int l_lo, int l_hi);

struct AveragedCurve {
    std::vector<double> k;
    std::vector<double> t2;        // |t(k)|^2
    std::vector<double> averaged;  // mean of the ten nearest peak values
    std::vector<int> peak_indices;
};

/// Transmission on the grid plus the ten-neighboring-peak average around each
/// point.  With fewer than ten peaks, all are used; with none, the raw curve
/// is returned.
AveragedCurve averaged_transmission(const SphereParams& p,
                                    const std::vector<double>& k_grid);

/// |t|^2 of the delta-prime interaction of strength beta.
double delta_prime_reference(double beta, double k);

/// Strength that makes the delta-prime curve pass through (k_ref, t2_ref).
double calibrate_delta_prime(double t2_ref, double k_ref);

}  // namespace sscat

#endif
