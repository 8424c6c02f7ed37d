// Composition of N identical single-mode scatterers spaced by ell:
//   * closed form via Chebyshev polynomials of the second kind,
//   * recursive star-product composition of S-matrices,
//   * transfer-matrix product with overflow-safe scaling,
// plus the Bloch band condition |Re(conj(eps) R)| <= 1 of the infinite array,
// band-interval detection and the in-band/in-gap envelope bounds.
//
// All three composition routes return amplitudes in the same global plane-wave
// convention (scatterers at 0, ell, ..., (N-1) ell), so they agree not just in
// probability but amplitude by amplitude; the test suite leans on that.

#ifndef SSCAT_SERIAL_HPP
#define SSCAT_SERIAL_HPP

#include <optional>

#include "sscat/scatter.hpp"

namespace sscat {

/// Chebyshev polynomial of the second kind, n >= -1, by the three-term
/// recurrence (uniformly accurate across the band edge x = +-1; the
/// trigonometric and hyperbolic closed forms serve as test oracles only).
double cheb_u(int n, double x);
Complex cheb_u(int n, Complex x);

struct SerialResult {
    Complex t{1.0}, r{0.0}, t_rev{1.0}, r_rev{0.0};
    double k = 1.0;
    double ell = 0.0;
    int n_elements = 1;
    double zeta = 0.0;    // Re(conj(eps) R), argument of the Chebyshev factor
    double u_val = 1.0;   // U_{N-1}(zeta)
    bool in_band = true;  // |zeta| <= 1
    bool full_reflection = false;  // set by comb when k hits a stub eigenvalue

    double transmission() const { return std::norm(t); }
    double reflection() const { return std::norm(r); }
};

/// Closed-form N-element amplitudes from the element data.  N >= 1, ell >= 0.
SerialResult serial_closed_form(const ElementData& elem, double ell, int N, double k);

/// Same amplitudes by adding one scatterer at a time (star product of
/// unitary S-matrices with position phases).  Throws SingularityError when a
/// multiple-scattering denominator 1 - r_rev * r vanishes.
SerialResult serial_recursive(const SMatrix& single, double ell, int N);

/// Same amplitudes by multiplying N one-period value/derivative transfer
/// matrices (spacing appears only between elements).  Entries deep in a gap
/// grow like (|zeta| + sqrt(zeta^2-1))^N; magnitudes above 1e100 are rescaled
/// and the exponent tracked separately.
SerialResult serial_transfer_product(const LTransfer& L, double ell, int N, double k);

/// Bloch test value Re(conj(eps) R); the infinite array has a band where its
/// magnitude does not exceed 1.
double bloch_discriminant(const ElementData& elem, double ell, double k);

struct BandInterval {
    double k_lo = 0.0, k_hi = 0.0;
    double residual_lo = 0.0, residual_hi = 0.0;  // ||disc| - 1| at the edge
    int depth_lo = 0, depth_hi = 0;               // bisection depth used

    bool contains(double k) const { return k >= k_lo && k <= k_hi; }
};

struct BandIntervals {
    std::vector<BandInterval> intervals;
    double k_min = 0.0, k_max = 0.0;
    int grid = 0;

    std::optional<BandInterval> band_containing(double k) const;
};

/// Locate the bands of the infinite array on [k_min, k_max] by scanning a
/// uniform grid and bisecting the sign changes of |disc| - 1.  `breakers` are
/// momenta where the element data is singular (e.g. comb beta poles); a band
/// never crosses one.  Sub-grid bands can be missed; the grid is the knob.
BandIntervals band_intervals(const std::function<ElementData(double)>& elem_fn,
                             double ell, double k_min, double k_max, int grid,
                             const std::vector<double>& breakers = {});

/// Envelope bounds on |t_N|^2.  In a band both lower bounds hold; in a gap
/// the transmission is squeezed between lb_outside and ub_outside.
struct EnvelopeBounds {
    bool in_band = true;
    double lb1_inside = 0.0;  // (1-x^2)/(1+|S|^2-x^2)
    double lb2_inside = 0.0;  // 1/(1+N^2 |S|^2)
    double ub_outside = 1.0;  // 1/(1+|S|^2 (N-1+|x|^{N-1})^2)
    double lb_outside = 0.0;  // |t|^{2N}/(|t|^{2N}+N^2 |r|^2 (1+|r|)^{2N-2})
};

EnvelopeBounds envelope_bounds(const ElementData& elem, double ell, int N, double k);

}  // namespace sscat

#endif
