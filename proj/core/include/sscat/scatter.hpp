// Matrix calculus for a single-mode scatterer: the three equivalent
// descriptions (on-shell S-matrix, coefficient transfer matrix M, and the
// value/derivative transfer matrix L) and the reduced element data (R, S, phi)
// consumed by the serial composition engine.
//
// Conventions.  The S-matrix is laid out as
//
//     S = | t      r_rev |        (B+)   = S (A+)
//         | r      t_rev |        (B-)       (A-)
//
// with t, r the left-to-right and t_rev, r_rev the right-to-left amplitudes.
// M relates plane-wave coefficients right of the scatterer to those on the
// left, L relates (value, derivative) boundary data.  Unitarity of S forces
// |det L| = 1 and det L = t/t_rev = exp(2i*phi); L = exp(i*phi) * CurlyL with
// CurlyL real and det CurlyL = 1.  phi is taken as arg(t/t_rev)/2 with the
// principal branch; phi and phi+pi describe the same scatterer (only
// exp(2i*phi) ever enters), so tests compare exp(2i*phi) only.

#ifndef SSCAT_SCATTER_HPP
#define SSCAT_SCATTER_HPP

#include "sscat/numeric.hpp"

namespace sscat {

struct SMatrix {
    Complex t{1.0, 0.0};
    Complex r{0.0, 0.0};
    Complex t_rev{1.0, 0.0};
    Complex r_rev{0.0, 0.0};
    double k = 1.0;  // on-shell momentum, k > 0

    /// max |row norm - 1| over both propagation directions
    double unitarity_defect() const;
};

struct MTransfer {
    Complex m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};

    Complex det() const { return m11 * m22 - m12 * m21; }
};

/// Value/derivative transfer matrix.  l12 carries units of length, l21 of
/// inverse length.  Entries may be complex; for a unitary scatterer
/// L = exp(i*phi) * CurlyL with CurlyL real.
struct LTransfer {
    Complex l11{1.0}, l12{0.0}, l21{0.0}, l22{1.0};

    Complex det() const { return l11 * l22 - l12 * l21; }

    /// Phase of the decomposition, arg(det L)/2 in (-pi/2, pi/2].
    double phi() const;

    /// Real unimodular factor CurlyL = exp(-i*phi) L.  Throws if the
    /// imaginary remainder is not negligible (input was not phase-decomposable).
    std::array<double, 4> curly() const;

    static LTransfer from_curly(const std::array<double, 4>& curly, double phi = 0.0);

    LTransfer operator*(const LTransfer& rhs) const;
};

/// Reduced element data for the serial formula:
///   R = exp(i*phi)/t,  S = -exp(i*phi) r/t,  |R|^2 - |S|^2 = 1.
struct ElementData {
    Complex R{1.0};
    Complex S{0.0};
    double phi = 0.0;
};

// ---- conversions -----------------------------------------------------------

/// Scattering amplitudes of the scatterer described by L at momentum k.
/// Throws SingularityError when the common denominator
/// L21 - ik(L22+L11) - k^2 L12 is degenerate (full reflection).
SMatrix s_from_l(const LTransfer& L, double k);

/// Inverse map.  Throws SingularityError for a full reflector (|r| = 1),
/// where the construction degenerates.
LTransfer l_from_s(const SMatrix& S);

MTransfer m_from_l(const LTransfer& L, double k);
MTransfer m_from_s(const SMatrix& S);

/// Throws SingularityError when m22 = 0 (zero transmission).
SMatrix s_from_m(const MTransfer& M, double k);

/// (R, S, phi) of the element described by L, evaluated at momentum k via the
/// real CurlyL form.  Requires |det L| = 1.
ElementData element_data(const LTransfer& L, double k);

// ---- elementary transfer matrices ------------------------------------------

/// Point delta interaction of strength alpha: derivative jump alpha * value.
LTransfer delta_transfer(double alpha);

/// Delta-prime interaction of strength beta: value jump beta * derivative.
LTransfer delta_prime_transfer(double beta);

/// Free propagation over a segment of length ell at momentum k.
LTransfer free_segment(double ell, double k);

}  // namespace sscat

#endif
