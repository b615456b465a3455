#ifndef LDG_BULK_HPP
#define LDG_BULK_HPP

#include "ldg/qtensor.hpp"

namespace ldg {

// Material constants of the quartic bulk potential plus the derived scalar
// order parameters and the potential's minimum value.
struct MaterialParams {
    double a2, b2, c2;  // temperature/material constants, all > 0
    double L;           // elastic constant, > 0
    double s_plus;      // (b² + √(b⁴ + 24 a²c²)) / (4c²)
    double s_minus;     // (b² − √(b⁴ + 24 a²c²)) / (4c²)
    double f_min;       // min of f_B over S0, attained at the uniaxial s₊ states
};

// Validates positivity and fills the derived fields; 2c²s₊² = b²s₊ + 3a²
// holds for the computed s₊.
MaterialParams derive_params(double a2, double b2, double c2, double L);

// Restriction of f_B to uniaxial Q = s(n⊗n − Id/3):
// f_B(s) = s²(−9a² − 2b²s + 3c²s²)/27.
double f_uniaxial(double s, const MaterialParams& p);

// f_B(Q) = −(a²/2) tr Q² − (b²/3) tr Q³ + (c²/4)(tr Q²)².
double f_bulk(const QTensor& q, const MaterialParams& p);

// f̃_B = f_B − f_min ≥ 0, zero exactly on {s₊(n⊗n − Id/3)}.
double f_bulk_shifted(const QTensor& q, const MaterialParams& p);

// Euler–Lagrange right-hand side (the gradient of f̃_B restricted to S0):
// G = −a² Q − b²(Q² − tr(Q²)/3 Id) + c² tr(Q²) Q, symmetric traceless,
// vanishing on the minimizing set.
QTensor bulk_gradient(const QTensor& q, const MaterialParams& p);

// Lower bound on f̃_B in terms of the radial distance δ = |Q| − √(2/3)s₊
// and the biaxiality parameter:
//   coef(δ)·δ² + (b²/(6√6)) β(Q) |Q|³,
// where coef(δ) = A = (2c²s₊²/3 + a²)/2 for δ ≥ 0, and for δ < 0
// coef(δ) = A + Bδ + (c²/4)δ² with B = c²√(2/3)s₊ − b²/(3√6) > 0, i.e. the
// exact quartic radial profile of the uniaxial branch.  Dropping the cubic
// and quartic terms is only safe when δ ≥ 0; keeping them below the
// minimizer radius makes the bound valid for every Q, with equality on the
// positive uniaxial branch up to the minimizer radius (in particular at
// Q = 0 and at |Q| = √(2/3)s₊).
double bound_beta(const QTensor& q, const MaterialParams& p);

// Coefficient of (s₊ − s)² in the case-(i) bound: (c²s₊² + 3a²)/27.
double sr_bound_gamma(const MaterialParams& p);

// Universal constant of the case-(ii) bound, τ = η/(24√3) with
// η = min over γ∈[0,1/2] of β(γ)/(γ²(1−γ)²) = 27/4; see tools/derive_tau.cpp
// for the derivation scan that produced this value.
inline constexpr double kTauCaseII = 0.16237976320958224;

// Closed-form lower bounds on f̃_B by (s,r)-case:
//   case i   (0 ≤ r ≤ s/2, 0 ≤ s ≤ s₊):
//            (s₊−s)²·sr_bound_gamma + (r(s−r)/9)(3a²+b²s−2c²s²) + (5b²/27) r²s
//   case ii  (0 ≤ r ≤ s/2, s ≥ s₊):
//            [(2c²s₊²/3+a²)/2]·radial + τ b² s₊³ r²(s−r)²/s⁴, where
//            radial = min{(2/3)(s−s₊)², (1/6)(√3 s−2s₊)²} for √3 s > 2s₊
//            and radial = 0 on the band s₊ ≤ s ≤ 2s₊/√3: there the norm
//            interval [s/√2, √(2/3)s] contains the minimizer radius, so the
//            radial distance can vanish and only the biaxial term survives
//   case iii (s/2 ≤ r ≤ 0): the positive constant
//            −a⁴/(4c²) − (s₊³/3)(b²/9 − c²s₊/3)
enum class BoundCase { i, ii, iii };
struct SRBound {
    BoundCase which;
    double bound;
};
SRBound bound_sr(const QTensor& q, const MaterialParams& p);

}  // namespace ldg

#endif
