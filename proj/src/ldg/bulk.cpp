#include "ldg/bulk.hpp"

#include <cmath>

#include "ldg/errors.hpp"

namespace ldg {

MaterialParams derive_params(double a2, double b2, double c2, double L) {
    if (!(a2 > 0) || !(b2 > 0) || !(c2 > 0) || !(L > 0))
        throw validation_error("derive_params: a2, b2, c2, L must all be positive");
    MaterialParams p;
    p.a2 = a2;
    p.b2 = b2;
    p.c2 = c2;
    p.L = L;
    double disc = std::sqrt(b2 * b2 + 24.0 * a2 * c2);
    p.s_plus = (b2 + disc) / (4.0 * c2);
    p.s_minus = (b2 - disc) / (4.0 * c2);
    p.f_min = 0.0;
    p.f_min = f_uniaxial(p.s_plus, p);
    return p;
}

double f_uniaxial(double s, const MaterialParams& p) {
    return s * s * (-9.0 * p.a2 - 2.0 * p.b2 * s + 3.0 * p.c2 * s * s) / 27.0;
}

double f_bulk(const QTensor& q, const MaterialParams& p) {
    double tr2, tr3;
    trace_powers(q, tr2, tr3);
    return -0.5 * p.a2 * tr2 - p.b2 * tr3 / 3.0 + 0.25 * p.c2 * tr2 * tr2;
}

double f_bulk_shifted(const QTensor& q, const MaterialParams& p) {
    return f_bulk(q, p) - p.f_min;
}

QTensor bulk_gradient(const QTensor& q, const MaterialParams& p) {
    double tr2 = norm2(q);
    Mat3 m = to_matrix(q);
    Mat3 g = (-p.a2 + p.c2 * tr2) * m - p.b2 * (m * m - (tr2 / 3.0) * Mat3::identity());
    return from_matrix(g);
}

double bound_beta(const QTensor& q, const MaterialParams& p) {
    double qn = norm(q);
    double u0 = std::sqrt(2.0 / 3.0) * p.s_plus;
    double delta = qn - u0;
    // Quadratic coefficient of the radial polynomial
    //   g(δ) = A δ² + B δ³ + (c²/4) δ⁴,  the exact distance of
    //   f(u) = −(a²/2)u² − (b²/(3√6))u³ + (c²/4)u⁴ from its minimum at u0.
    // For δ ≥ 0 the positive cubic/quartic terms may be dropped (pure A δ²);
    // for δ < 0 they must be kept or the bound overshoots the true density.
    double A = 0.5 * (2.0 / 3.0 * p.c2 * p.s_plus * p.s_plus + p.a2);
    double coef = A;
    if (delta < 0) {
        double B = p.c2 * u0 - p.b2 / (3.0 * std::sqrt(6.0));
        coef += B * delta + 0.25 * p.c2 * delta * delta;
    }
    return coef * delta * delta +
           p.b2 / (6.0 * std::sqrt(6.0)) * biaxiality(q) * qn * qn * qn;
}

double sr_bound_gamma(const MaterialParams& p) {
    return (p.c2 * p.s_plus * p.s_plus + 3.0 * p.a2) / 27.0;
}

SRBound bound_sr(const QTensor& q, const MaterialParams& p) {
    SRRep rep = decompose_sr(q);
    double s = rep.s, r = rep.r;
    double sp = p.s_plus;
    if (r >= 0.0 && s >= 0.0) {
        if (s <= sp) {
            double b = (sp - s) * (sp - s) * sr_bound_gamma(p) +
                       r * (s - r) / 9.0 * (3.0 * p.a2 + p.b2 * s - 2.0 * p.c2 * s * s) +
                       5.0 * p.b2 / 27.0 * r * r * s;
            return {BoundCase::i, b};
        }
        // Radial part: at fixed s the norm |Q| sweeps [s/sqrt(2), sqrt(2/3)s]
        // as r varies over [0, s/2], so the squared distance of |Q| to the
        // minimizer radius sqrt(2/3)s_plus admits a positive lower bound only
        // once the whole interval lies beyond it, i.e. sqrt(3)s > 2s_plus.
        // Inside the overlap band s_plus <= s <= 2s_plus/sqrt(3) the norm can
        // hit the minimizer radius exactly and the radial term must vanish;
        // taking the smaller endpoint value there would overestimate.
        double coef = 0.5 * (2.0 / 3.0 * p.c2 * sp * sp + p.a2);
        double radial = 0.0;
        if (std::sqrt(3.0) * s > 2.0 * sp) {
            double t1 = 2.0 / 3.0 * (s - sp) * (s - sp);
            double t2 = (std::sqrt(3.0) * s - 2.0 * sp) * (std::sqrt(3.0) * s - 2.0 * sp) / 6.0;
            radial = std::min(t1, t2);
        }
        double biax = r * (s - r) / (s * s);
        double b = coef * radial + kTauCaseII * p.b2 * sp * sp * sp * biax * biax;
        return {BoundCase::ii, b};
    }
    double b = -p.a2 * p.a2 / (4.0 * p.c2) -
               sp * sp * sp / 3.0 * (p.b2 / 9.0 - p.c2 * sp / 3.0);
    return {BoundCase::iii, b};
}

}  // namespace ldg
