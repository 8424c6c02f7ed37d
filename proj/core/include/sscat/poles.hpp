// Resonances of the N-tooth comb as zeros of the Krein determinant in the
// complex momentum plane.  The determinant reduces to the denominator of the
// N-tooth amplitudes,
//
//     den(k) = eps U_{N-2}(zeta) - (1 + i beta) U_{N-1}(zeta),
//
// which is analytic except for the poles beta inherits from the decoupled
// stub eigenvalues k_n on the real axis.  Clearing those poles with
// q(k)^N, q = (c u_L' - u_L)(0), gives an entire function with the same
// zeros off the real axis (and, in the decoupled limit b = 0, N-fold zeros
// at the embedded eigenvalues k_n).  The argument-principle counting runs on
// the entire form; Newton refinement then polishes each isolated zero.

#ifndef SSCAT_POLES_HPP
#define SSCAT_POLES_HPP

#include "sscat/comb.hpp"

namespace sscat {

/// Denominator of the N-tooth amplitudes continued to complex k.
Complex krein_denominator(const CombParams& p, int N, Complex k);

/// q(k)^N times the same; entire in k (for k != 0), used for winding counts.
Complex krein_denominator_entire(const CombParams& p, int N, Complex k);

struct ComplexRect {
    double re_lo = 0.0, re_hi = 1.0;
    double im_lo = -1.0, im_hi = 0.0;

    bool contains(Complex k) const {
        return k.real() >= re_lo && k.real() <= re_hi && k.imag() >= im_lo &&
               k.imag() <= im_hi;
    }
};

enum class PoleOrigin { stub, spatial, unclassified };

struct Pole {
    Complex k{0.0};
    double residual = 0.0;  // |entire denominator| after refinement
    int multiplicity = 1;
    PoleOrigin origin = PoleOrigin::unclassified;
    std::optional<double> nearest_k_n;
};

using PoleSet = std::vector<Pole>;

/// Winding number of f around the rectangle boundary, by adaptive phase
/// tracking.  Throws if a zero sits (numerically) on the boundary.
int winding_number(const std::function<Complex(Complex)>& f, const ComplexRect& rect,
                   int samples_per_edge = 64);

/// All zeros of the entire Krein denominator inside `region`, found by
/// recursive rectangle subdivision (argument principle) plus Newton.  Poles
/// whose Newton refinement fails are reported unclassified with the cell-level
/// residual.  `grid` controls the initial subdivision of the region.
PoleSet find_poles(const CombParams& p, int N, const ComplexRect& region,
                   int grid = 8);

/// Tag each pole by origin: `stub` if it lies within half the minimal k_n
/// spacing of a stub eigenvalue and its b -> 0 homotopy (steps of 0.05)
/// terminates on that eigenvalue, `spatial` otherwise.
PoleSet classify_poles(PoleSet poles, const std::vector<double>& stub_ks,
                       const CombParams& p, int N);

}  // namespace sscat

#endif
