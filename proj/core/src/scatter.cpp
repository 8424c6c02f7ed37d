#include "sscat/scatter.hpp"

#include <algorithm>

namespace sscat {

namespace {
constexpr Complex I{0.0, 1.0};

// Relative threshold below which a denominator counts as singular.  The
// amplitude formulas are ratios of same-order quantities at full reflection,
// so returning the quotient there would only amplify roundoff.
constexpr double kSingularRel = 1e-13;
}  // namespace

double SMatrix::unitarity_defect() const {
    double f1 = std::abs(std::norm(t) + std::norm(r) - 1.0);
    double f2 = std::abs(std::norm(t_rev) + std::norm(r_rev) - 1.0);
    // column orthogonality of [[t, r_rev], [r, t_rev]]
    double f3 = std::abs(t * std::conj(r_rev) + r * std::conj(t_rev));
    return std::max({f1, f2, f3});
}

double LTransfer::phi() const { return 0.5 * std::arg(det()); }

std::array<double, 4> LTransfer::curly() const {
    const Complex ph = std::exp(Complex{0.0, -phi()});
    const Complex c11 = ph * l11, c12 = ph * l12, c21 = ph * l21, c22 = ph * l22;
    const double scale = std::max({std::abs(c11), std::abs(c12), std::abs(c21),
                                   std::abs(c22), 1.0});
    const double imag = std::max({std::abs(c11.imag()), std::abs(c12.imag()),
                                  std::abs(c21.imag()), std::abs(c22.imag())});
    if (imag > 1e-9 * scale)
        throw std::invalid_argument(
            "LTransfer::curly: matrix is not exp(i*phi) times a real matrix");
    return {c11.real(), c12.real(), c21.real(), c22.real()};
}

LTransfer LTransfer::from_curly(const std::array<double, 4>& c, double phi) {
    const Complex ph = std::exp(Complex{0.0, phi});
    return {ph * c[0], ph * c[1], ph * c[2], ph * c[3]};
}

LTransfer LTransfer::operator*(const LTransfer& rhs) const {
    return {l11 * rhs.l11 + l12 * rhs.l21, l11 * rhs.l12 + l12 * rhs.l22,
            l21 * rhs.l11 + l22 * rhs.l21, l21 * rhs.l12 + l22 * rhs.l22};
}

SMatrix s_from_l(const LTransfer& L, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("s_from_l: requires k > 0");
    const Complex ik{0.0, k};
    const Complex den = L.l21 - ik * (L.l22 + L.l11) - k * k * L.l12;
    const double scale = std::abs(L.l21) + k * (std::abs(L.l22) + std::abs(L.l11)) +
                         k * k * std::abs(L.l12);
    if (std::abs(den) < kSingularRel * scale)
        throw SingularityError("s_from_l: degenerate denominator (full reflection)");
    SMatrix s;
    s.k = k;
    s.r = -(L.l21 + ik * (L.l22 - L.l11) + k * k * L.l12) / den;
    s.t = -2.0 * ik * L.det() / den;
    s.r_rev = -(L.l21 + ik * (L.l11 - L.l22) + k * k * L.l12) / den;
    s.t_rev = -2.0 * ik / den;
    return s;
}

LTransfer l_from_s(const SMatrix& S) {
    const double k = S.k;
    const Complex ik{0.0, k};
    const Complex tt = S.t * S.t_rev;
    if (std::abs(S.t_rev) < kSingularRel)
        throw SingularityError("l_from_s: full reflector (t = 0)");
    const Complex pre = 1.0 / (2.0 * S.t_rev);
    LTransfer L;
    L.l11 = pre * (tt + (1.0 + S.r) * (1.0 - S.r_rev));
    L.l12 = pre * (tt - (1.0 + S.r) * (1.0 + S.r_rev)) / ik;
    L.l21 = pre * ik * (tt - (1.0 - S.r) * (1.0 - S.r_rev));
    L.l22 = pre * (tt + (1.0 - S.r) * (1.0 + S.r_rev));
    return L;
}

MTransfer m_from_l(const LTransfer& L, double k) {
    const Complex ik{0.0, k};
    const double k2 = k * k;
    MTransfer M;
    const Complex pre = 1.0 / (2.0 * ik);
    M.m11 = pre * (L.l21 + ik * (L.l11 + L.l22) - k2 * L.l12);
    M.m12 = pre * (L.l21 + ik * (L.l11 - L.l22) + k2 * L.l12);
    M.m21 = pre * (-L.l21 + ik * (L.l11 - L.l22) - k2 * L.l12);
    M.m22 = pre * (-L.l21 + ik * (L.l11 + L.l22) + k2 * L.l12);
    return M;
}

MTransfer m_from_s(const SMatrix& S) {
    if (std::abs(S.t_rev) < kSingularRel)
        throw SingularityError("m_from_s: full reflector (t_rev = 0)");
    const Complex pre = 1.0 / S.t_rev;
    return {pre * (S.t * S.t_rev - S.r * S.r_rev), pre * S.r_rev, -pre * S.r, pre};
}

SMatrix s_from_m(const MTransfer& M, double k) {
    const double scale = std::max({std::abs(M.m11), std::abs(M.m12),
                                   std::abs(M.m21), 1.0});
    if (std::abs(M.m22) < kSingularRel * scale)
        throw SingularityError("s_from_m: m22 = 0 (zero transmission)");
    SMatrix s;
    s.k = k;
    s.r = -M.m21 / M.m22;
    s.t = M.m11 - M.m12 * M.m21 / M.m22;
    s.r_rev = M.m12 / M.m22;
    s.t_rev = 1.0 / M.m22;
    return s;
}

ElementData element_data(const LTransfer& L, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("element_data: requires k > 0");
    if (std::abs(std::abs(L.det()) - 1.0) > 1e-9)
        throw std::invalid_argument("element_data: |det L| != 1");
    const double phi = L.phi();
    const auto c = L.curly();
    ElementData e;
    e.phi = phi;
    e.R = Complex{0.5 * (c[0] + c[3]), 0.5 * (c[2] / k - k * c[1])};
    e.S = Complex{0.5 * (c[0] - c[3]), 0.5 * (c[2] / k + k * c[1])};
    return e;
}

LTransfer delta_transfer(double alpha) {
    return {1.0, 0.0, Complex{alpha}, 1.0};
}

LTransfer delta_prime_transfer(double beta) {
    return {1.0, Complex{beta}, 0.0, 1.0};
}

LTransfer free_segment(double ell, double k) {
    const double c = std::cos(k * ell), s = std::sin(k * ell);
    return {Complex{c}, Complex{s / k}, Complex{-k * s}, Complex{c}};
}

}  // namespace sscat
