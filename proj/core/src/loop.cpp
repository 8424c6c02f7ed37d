#include "sscat/loop.hpp"

namespace sscat {

namespace {
constexpr Complex I{0.0, 1.0};
}

LoopBlocks loop_building_blocks(const LoopParams& p, double k) {
    if (!(p.L1 > 0.0) || !(p.L2 > 0.0))
        throw std::invalid_argument("loop: branch lengths must be positive");
    const double A = p.Phi / (p.L1 + p.L2);
    LoopBlocks b;
    b.eps1p = std::exp(I * ((-A + k) * p.L1));
    b.eps1m = std::exp(I * ((-A - k) * p.L1));
    b.eps2p = std::exp(I * ((-A + k) * p.L2));
    b.eps2m = std::exp(I * ((-A - k) * p.L2));
    b.B = (b.eps1p - b.eps1m) * (b.eps2m - b.eps2p);
    b.C = -b.eps1m * b.eps2m + b.eps1p * b.eps2p;
    b.D = b.eps2p - b.eps2m + b.eps2p * b.eps2m * (b.eps1p - b.eps1m);
    b.E_plus = 1.0 - b.eps1p * b.eps2p;
    b.E_minus = 1.0 - b.eps1m * b.eps2m;
    return b;
}

LTransfer loop_transfer(const LoopParams& p, double k) {
    const LoopBlocks b = loop_building_blocks(p, k);
    const Complex pre = 1.0 / (2.0 * k * b.D);
    const double a1 = p.alpha1, a2 = p.alpha2;
    if (std::abs(b.D) < 1e-14)
        throw SingularityError("loop_transfer: D = 0");
    LTransfer L;
    L.l11 = pre * (I * a1 * b.B + 2.0 * k * b.C);
    L.l12 = pre * (I * b.B);
    L.l21 = pre * (I * a1 * a2 * b.B + 2.0 * (a1 + a2) * k * b.C -
                   4.0 * I * (k * k) * b.E_minus * b.E_plus);
    L.l22 = pre * (2.0 * k * b.C + I * a2 * b.B);
    return L;
}

SMatrix loop_amplitudes(const LoopParams& p, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("loop_amplitudes: requires k > 0");
    const LoopBlocks b = loop_building_blocks(p, k);
    const double a1 = p.alpha1, a2 = p.alpha2;
    const double k2 = k * k;
    const Complex ee = b.E_minus * b.E_plus;

    const Complex den = I * a1 * a2 * b.B + k * (a2 + a1) * (2.0 * b.C + b.B) -
                        I * k2 * (4.0 * ee + b.B + 4.0 * b.C);
    const double scale = std::abs(a1 * a2 * b.B) +
                         std::abs(k * (a2 + a1)) * (2.0 * std::abs(b.C) + std::abs(b.B)) +
                         k2 * (4.0 * std::abs(ee) + std::abs(b.B) + 4.0 * std::abs(b.C));
    if (std::abs(den) < 1e-13 * std::max(scale, 1.0))
        throw SingularityError("loop_amplitudes: vanishing denominator");

    SMatrix s;
    s.k = k;
    s.r = (-I * a1 * a2 * b.B + k * ((a2 - a1) * b.B - 2.0 * (a1 + a2) * b.C) +
           I * k2 * (4.0 * ee - b.B)) / den;
    s.t = 4.0 * I * k2 * b.D * std::exp(-2.0 * I * p.Phi) / den;

    // The right-to-left amplitudes are not written out in closed form; they
    // follow from the transfer matrix.
    const SMatrix via_l = s_from_l(loop_transfer(p, k), k);
    s.t_rev = via_l.t_rev;
    s.r_rev = via_l.r_rev;
    return s;
}

ElementData loop_element_data(const LoopParams& p, double k) {
    return element_data(l_from_s(loop_amplitudes(p, k)), k);
}

}  // namespace sscat
