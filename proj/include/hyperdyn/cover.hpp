#pragma once

#include <string_view>
#include <vector>

#include "hyperdyn/mat2.hpp"

namespace hyperdyn {

/// Element of the universal cover of PSL(2,R).
///
/// The matrix m acts on RP^1, written in the angle coordinate x in R/piZ.
/// Its canonical lift f_m : R -> R is the increasing lift normalized by
/// f_m(0) in [0, pi), with values within 1e-12 of pi wrapped to 0. The
/// cover element is the lifted circle map f = f_m + winding * pi. The
/// matrix is only defined up to sign.
/// The center is {(I, k)} and is generated by center_generator() = (I, 1),
/// a full turn of RP^1.
class CoverElement {
public:
    CoverElement() = default;
    // Checked: renormalizes m and rejects non-unit determinants.
    CoverElement(const Mat2& m, long winding);

    static CoverElement identity() { return {}; }
    static CoverElement center_generator() { return {Mat2::identity(), 1}; }
    // Lift of the rotation matrix R(angle) along the path R(s angle),
    // s in [0,1]; rotation(pi) is center_generator().
    static CoverElement rotation(double angle);

    const Mat2& matrix() const { return m_; }
    long winding() const { return k_; }

    // Lifted circle map f(x) = f_m(x) + winding * pi.
    double lift(double x) const;

    CoverElement inverse() const;
    CoverElement pow(long n) const;

    friend CoverElement operator*(const CoverElement& p, const CoverElement& q) { return compose(p, q); }
    friend CoverElement compose(const CoverElement& p, const CoverElement& q);
    friend bool operator==(const CoverElement&, const CoverElement&) = default;

private:
    Mat2 m_{};
    long k_ = 0;
};

// Canonical lift f_m(x) of the RP^1 action of +-m.
double canonical_lift(const Mat2& m, double x);

// Projection to PSL(2,R), represented by an SL(2,R) matrix.
inline Mat2 theta(const CoverElement& p) { return p.matrix(); }

enum class OneParam { X, S, U };

// X^t = diag(e^{t/2}, e^{-t/2}), S^x = [[1,x],[0,1]], U^y = [[1,0],[y,1]],
// each lifted along its one-parameter path from the identity.
CoverElement one_param(OneParam kind, double t);

enum class ElementClass { Hyperbolic, Parabolic, Elliptic, Central };

std::string_view to_string(ElementClass c);

// ||tr| - 2| <= kParabolicBand classifies as parabolic; Central requires
// the matrix within kCentralTol of +-I.
inline constexpr double kParabolicBand = 1e-9;
inline constexpr double kCentralTol = 1e-9;

ElementClass classify(const Mat2& m);
inline ElementClass classify(const CoverElement& p) { return classify(p.matrix()); }

// 2 arccosh(|tr|/2) for hyperbolic elements, 0 otherwise.
double translation_length(const Mat2& m);
inline double translation_length(const CoverElement& p) { return translation_length(p.matrix()); }

// Commutator [p, q] = p^-1 q^-1 p q.
CoverElement commutator(const CoverElement& p, const CoverElement& q);

struct CommutatorSample {
    long n = 0;
    double ratio = 0.0;          // L([p^n, q]) / (2n) from direct products
    double ratio_closed = 0.0;   // same from the conjugated closed form
    double trace_direct = 0.0;   // |tr [p^n, q]|
    double trace_closed = 0.0;
    double trace_rel_diff = 0.0;
};

/// L([p^n, q]) / 2n for n = 1..n_max, computed both by direct matrix
/// products and by conjugating p to X^{L(p)}: with [[a,b],[c,d]] the
/// conjugate of q, the commutator becomes
///   [[ad - e^{-nL} bc, (1 - e^{-nL}) bd], [(1 - e^{nL}) ac, ad - e^{nL} bc]].
/// Throws "degenerate-commutator" when [p, q] is central or parabolic, and
/// invalid-input when p is not hyperbolic.
std::vector<CommutatorSample> commutator_length_sequence(const CoverElement& p, const CoverElement& q, long n_max);

// Matrix A with A m A^-1 = +-diag(e^{L/2}, e^{-L/2}) for hyperbolic m.
Mat2 diagonalizer(const Mat2& m);

}  // namespace hyperdyn
