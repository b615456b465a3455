#ifndef LDG_QTENSOR_HPP
#define LDG_QTENSOR_HPP

#include <array>
#include <cstddef>

#include "ldg/util.hpp"

namespace ldg {

struct MaterialParams;  // defined in bulk.hpp

// Symmetric traceless 3x3 matrix stored as 5 coefficients in the fixed
// orthonormal basis (Frobenius inner product, tr(Ei Ej) = delta_ij):
//   E1 = (e1⊗e1 − e2⊗e2)/√2
//   E2 = (2 e3⊗e3 − e1⊗e1 − e2⊗e2)/√6
//   E3 = (e1⊗e2 + e2⊗e1)/√2
//   E4 = (e1⊗e3 + e3⊗e1)/√2
//   E5 = (e2⊗e3 + e3⊗e2)/√2
// so the euclidean norm of the coefficient vector equals |Q| = √(tr Q²).
struct QTensor {
    std::array<double, 5> a{0, 0, 0, 0, 0};

    QTensor& operator+=(const QTensor& o) {
        for (int i = 0; i < 5; ++i) a[i] += o.a[i];
        return *this;
    }
    QTensor& operator-=(const QTensor& o) {
        for (int i = 0; i < 5; ++i) a[i] -= o.a[i];
        return *this;
    }
    QTensor& operator*=(double c) {
        for (int i = 0; i < 5; ++i) a[i] *= c;
        return *this;
    }
};

inline QTensor operator+(QTensor x, const QTensor& y) { return x += y; }
inline QTensor operator-(QTensor x, const QTensor& y) { return x -= y; }
inline QTensor operator*(double c, QTensor x) { return x *= c; }
inline QTensor operator-(const QTensor& x) {
    QTensor r;
    for (int i = 0; i < 5; ++i) r.a[i] = -x.a[i];
    return r;
}
inline double dot(const QTensor& x, const QTensor& y) {
    double s = 0;
    for (int i = 0; i < 5; ++i) s += x.a[i] * y.a[i];
    return s;
}
inline double norm2(const QTensor& x) { return dot(x, x); }
inline double norm(const QTensor& x) { return std::sqrt(norm2(x)); }

Mat3 to_matrix(const QTensor& q);
QTensor from_matrix(const Mat3& m);  // symmetrizes and removes the trace

// Q = s (n⊗n − Id/3); n must be unit length (1e-10), else validation_error.
QTensor from_uniaxial(double s, const Vec3& n);

// (tr Q², tr Q³) straight from the coefficients.
void trace_powers(const QTensor& q, double& tr2, double& tr3);
double det3(const QTensor& q);

// Eigenvalues sorted descending with matching orthonormal eigenvectors.
// Deterministic: near ties (gap < 1e-12) go through a fixed-order Jacobi
// sweep, Q = 0 returns the canonical basis, and every eigenvector has its
// first nonzero component made positive.
struct EigenSystem {
    std::array<double, 3> lambda;
    std::array<Vec3, 3> vec;
};
EigenSystem eigen(const QTensor& q);

// Eigenvalue-only fast path (same values as eigen().lambda).
std::array<double, 3> eigenvalues(const QTensor& q);

// Twelve classification regions in the (λ1, λ2) plane for decompose_sr.
enum class Region {
    R1p, R2p, R3p, R4p, R5p, R6p,
    R1m, R2m, R3m, R4m, R5m, R6m,
};
const char* region_name(Region r);

// Region of the labeled eigenvalue pair; tested in the fixed order
// R1+..R6+, R1-..R6-, first match wins (adjacent regions agree on their
// shared boundaries, so precedence only affects the label).
Region classify_region(double l1, double l2);

// Q = s (n⊗n − Id/3) + r (m⊗m − Id/3) with 0 ≤ r ≤ s/2 or s/2 ≤ r ≤ 0.
// The eigenvalue pair fed to classify_region is labeled by a fixed
// eigenvector order (descending lexicographic comparison of the
// sign-canonicalized eigenvectors), which is invariant under Q → −Q, so
// negation reflects the region label R± → R∓.
struct SRRep {
    double s, r;
    Vec3 n, m;
    Region region;
};
SRRep decompose_sr(const QTensor& q);

// Q = S (n⊗n − Id/3) + R (m⊗m − p⊗p), aligned with decompose_sr so that
// r = 2R and s = S + R hold identically; equivalently S = 3λn/2 and
// R = (2λm + λn)/2 for the eigenvalues λn on n, λm on m.
struct SRCapRep {
    double S, R;
    Vec3 n, m, p;
};
SRCapRep decompose_SR(const QTensor& q);

// β = 1 − 6 (tr Q³)²/(tr Q²)³ clamped to [0,1]; β = 0 for |Q| ≤ epsQ
// (the isotropic point is treated as non-biaxial).
inline constexpr double kBiaxialityNormFloor = 1e-8;
double biaxiality(const QTensor& q);

// Polynomial variant β̃ = (tr Q²)³ − 6 (tr Q³)² = 2 s²r²(s−r)²; no floor.
double biaxiality_poly(const QTensor& q);

// Nearest point of {s₊(n⊗n − Id/3)}: π(Q) = s₊(n⊗n − Id/3) with n the
// leading eigenvector. Requires the gap condition S > 8|R|, else throws
// degenerate_projection_error carrying (S, R).
QTensor project_to_uniaxial(const QTensor& q, const MaterialParams& p);

// Uniform random tensor with coefficients in [lo, hi); used by tests and
// randomized sweeps.
QTensor random_qtensor(SplitMix64& rng, double lo = -2.0, double hi = 2.0);

}  // namespace ldg

#endif
