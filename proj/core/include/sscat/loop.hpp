// Planar loop scatterer with two leads in a perpendicular magnetic field,
// delta-coupled at both junctions.  The vector potential enters only through
// the flux Phi (in units of the flux quantum 2*pi), via A = Phi/(L1+L2) along
// the loop.  Transmission and reflection probabilities are 2*pi-periodic in
// Phi; the amplitudes themselves are not, and no periodicity is asserted for
// them.

#ifndef SSCAT_LOOP_HPP
#define SSCAT_LOOP_HPP

#include "sscat/scatter.hpp"

namespace sscat {

struct LoopParams {
    double L1 = 1.0, L2 = 1.0;        // branch lengths, > 0
    double alpha1 = 0.0, alpha2 = 0.0;  // delta coupling strengths
    double Phi = 0.0;                 // magnetic flux
};

/// The building blocks of the loop transfer matrix, computed from the
/// epsilon_{j,+-} = exp(i(-A +- k) L_j) products.  The expanded trigonometric
/// forms are equivalent (used as cross-checks in the tests) but less stable.
struct LoopBlocks {
    Complex B, C, D, E_plus, E_minus;
    Complex eps1p, eps1m, eps2p, eps2m;
};

LoopBlocks loop_building_blocks(const LoopParams& p, double k);

/// Value/derivative transfer matrix across the loop (junction 1 to junction 2).
LTransfer loop_transfer(const LoopParams& p, double k);

/// On-shell amplitudes.  Throws SingularityError at the isolated momenta where
/// the common denominator vanishes.
SMatrix loop_amplitudes(const LoopParams& p, double k);

/// Element data for the serial engine (l_from_s then element_data).
ElementData loop_element_data(const LoopParams& p, double k);

}  // namespace sscat

#endif
