#include "ldg/qtensor.hpp"

#include <algorithm>
#include <cmath>

#include "ldg/bulk.hpp"
#include "ldg/errors.hpp"

namespace ldg {

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kSqrt6 = std::sqrt(6.0);
}  // namespace

Mat3 to_matrix(const QTensor& q) {
    Mat3 m;
    double d1 = q.a[0] / kSqrt2 - q.a[1] / kSqrt6;
    double d2 = -q.a[0] / kSqrt2 - q.a[1] / kSqrt6;
    double d3 = 2.0 * q.a[1] / kSqrt6;
    m.m[0][0] = d1;
    m.m[1][1] = d2;
    m.m[2][2] = d3;
    m.m[0][1] = m.m[1][0] = q.a[2] / kSqrt2;
    m.m[0][2] = m.m[2][0] = q.a[3] / kSqrt2;
    m.m[1][2] = m.m[2][1] = q.a[4] / kSqrt2;
    return m;
}

QTensor from_matrix(const Mat3& m) {
    double s01 = 0.5 * (m.m[0][1] + m.m[1][0]);
    double s02 = 0.5 * (m.m[0][2] + m.m[2][0]);
    double s12 = 0.5 * (m.m[1][2] + m.m[2][1]);
    double tr = m.trace() / 3.0;
    double d1 = m.m[0][0] - tr;
    double d2 = m.m[1][1] - tr;
    double d3 = m.m[2][2] - tr;
    QTensor q;
    q.a[0] = (d1 - d2) / kSqrt2;
    q.a[1] = kSqrt6 * d3 / 2.0;
    q.a[2] = kSqrt2 * s01;
    q.a[3] = kSqrt2 * s02;
    q.a[4] = kSqrt2 * s12;
    return q;
}

QTensor from_uniaxial(double s, const Vec3& n) {
    if (std::abs(norm(n) - 1.0) > 1e-10)
        throw validation_error("from_uniaxial: director must be unit length");
    Mat3 m = Mat3::outer(n, n) - (1.0 / 3.0) * Mat3::identity();
    return from_matrix(s * m);
}

double det3(const QTensor& q) { return to_matrix(q).det(); }

void trace_powers(const QTensor& q, double& tr2, double& tr3) {
    tr2 = norm2(q);
    // Newton's identity for a traceless matrix: tr Q³ = 3 det Q.
    tr3 = 3.0 * det3(q);
}

std::array<double, 3> eigenvalues(const QTensor& q) {
    double tr2 = norm2(q);
    if (tr2 < 1e-28) return {0.0, 0.0, 0.0};
    // Characteristic polynomial of a traceless symmetric matrix:
    // λ³ − (tr Q²/2) λ − det Q = 0, solved in trigonometric (Cardano) form.
    double J2 = 0.5 * tr2;
    double J3 = det3(q);
    double mmag = 2.0 * std::sqrt(J2 / 3.0);
    double c3 = 4.0 * J3 / (mmag * mmag * mmag);
    c3 = std::clamp(c3, -1.0, 1.0);
    double theta = std::acos(c3) / 3.0;
    std::array<double, 3> l;
    l[0] = mmag * std::cos(theta);
    l[1] = mmag * std::cos(theta - 2.0 * M_PI / 3.0);
    l[2] = mmag * std::cos(theta + 2.0 * M_PI / 3.0);
    // One Newton step per root on the characteristic polynomial; skipped
    // where p'(λ) ≈ 0 (double roots).
    double fpscale = 3.0 * l[0] * l[0] + J2;
    for (double& x : l) {
        double fp = 3.0 * x * x - J2;
        if (std::abs(fp) > 1e-8 * fpscale) x -= (x * x * x - J2 * x - J3) / fp;
    }
    std::sort(l.begin(), l.end(), std::greater<double>());
    double shift = (l[0] + l[1] + l[2]) / 3.0;
    for (double& x : l) x -= shift;
    return l;
}

namespace {

Vec3 canonical_sign(Vec3 v) {
    for (int i = 0; i < 3; ++i) {
        if (v[i] != 0.0) {
            if (v[i] < 0.0)
                for (int j = 0; j < 3; ++j) v[j] = -v[j];
            break;
        }
    }
    return v;
}

// Cyclic Jacobi with a fixed (p,q) visiting order; used for (near-)degenerate
// spectra so that repeated eigenvalues get reproducible eigenvectors.
void jacobi3(const Mat3& m0, double w[3], Vec3 vcol[3]) {
    double a[3][3];
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = m0.m[i][j];
    double scale = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(a[i][j]));
    if (scale == 0) scale = 1;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if (off < 1e-32 * scale * scale) break;
        static const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (const int* pq : pairs) {
            int p = pq[0], q = pq[1];
            if (a[p][q] == 0.0) continue;
            double tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
            double c = 1.0 / std::sqrt(1.0 + t * t);
            double s = t * c;
            double app = a[p][p], aqq = a[q][q], apq = a[p][q];
            a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
            a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
            a[p][q] = a[q][p] = 0.0;
            int r = 3 - p - q;
            double arp = a[r][p], arq = a[r][q];
            a[r][p] = a[p][r] = c * arp - s * arq;
            a[r][q] = a[q][r] = s * arp + c * arq;
            for (int i = 0; i < 3; ++i) {
                double vip = v[i][p], viq = v[i][q];
                v[i][p] = c * vip - s * viq;
                v[i][q] = s * vip + c * viq;
            }
        }
    }
    for (int j = 0; j < 3; ++j) {
        w[j] = a[j][j];
        vcol[j] = Vec3{v[0][j], v[1][j], v[2][j]};
    }
}

}  // namespace

EigenSystem eigen(const QTensor& q) {
    EigenSystem es;
    if (norm2(q) < 1e-28) {
        es.lambda = {0.0, 0.0, 0.0};
        es.vec = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
        return es;
    }
    auto l = eigenvalues(q);
    Mat3 m = to_matrix(q);
    double gap = std::min(l[0] - l[1], l[1] - l[2]);
    if (gap < 1e-12) {
        double w[3];
        Vec3 vc[3];
        jacobi3(m, w, vc);
        int idx[3] = {0, 1, 2};
        std::stable_sort(idx, idx + 3, [&](int i, int j) { return w[i] > w[j]; });
        for (int k = 0; k < 3; ++k) {
            es.lambda[k] = w[idx[k]];
            es.vec[k] = canonical_sign(normalized(vc[idx[k]]));
        }
        return es;
    }
    // Distinct eigenvalues: each eigenvector is orthogonal to the row space of
    // (Q − λ Id); cross the best-conditioned row pair.
    for (int k = 0; k < 3; ++k) {
        Mat3 a = m;
        for (int i = 0; i < 3; ++i) a.m[i][i] -= l[k];
        Vec3 r0{a.m[0][0], a.m[0][1], a.m[0][2]};
        Vec3 r1{a.m[1][0], a.m[1][1], a.m[1][2]};
        Vec3 r2{a.m[2][0], a.m[2][1], a.m[2][2]};
        Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
        Vec3 best = c01;
        if (norm2(c02) > norm2(best)) best = c02;
        if (norm2(c12) > norm2(best)) best = c12;
        es.vec[k] = normalized(best);
        es.lambda[k] = l[k];
    }
    // Re-orthonormalize (Gram-Schmidt), then fix signs.
    es.vec[1] = normalized(es.vec[1] - dot(es.vec[1], es.vec[0]) * es.vec[0]);
    es.vec[2] = cross(es.vec[0], es.vec[1]);
    for (int k = 0; k < 3; ++k) es.vec[k] = canonical_sign(es.vec[k]);
    return es;
}

const char* region_name(Region r) {
    switch (r) {
        case Region::R1p: return "R1+";
        case Region::R2p: return "R2+";
        case Region::R3p: return "R3+";
        case Region::R4p: return "R4+";
        case Region::R5p: return "R5+";
        case Region::R6p: return "R6+";
        case Region::R1m: return "R1-";
        case Region::R2m: return "R2-";
        case Region::R3m: return "R3-";
        case Region::R4m: return "R4-";
        case Region::R5m: return "R5-";
        case Region::R6m: return "R6-";
    }
    return "?";
}

Region classify_region(double l1, double l2) {
    if (l1 <= 0 && l2 >= -2 * l1) return Region::R1p;
    if (l2 <= 0 && l2 >= -l1 / 2) return Region::R2p;
    if (l2 <= 0 && l2 >= l1) return Region::R3p;
    if (l1 <= 0 && l1 >= l2) return Region::R4p;
    if (l1 <= 0 && -2 * l1 >= l2 && l2 >= -l1) return Region::R5p;
    if (l2 <= 0 && -2 * l2 >= l1 && l1 >= -l2) return Region::R6p;
    if (l1 >= 0 && l2 <= -2 * l1) return Region::R1m;
    if (l2 >= 0 && l2 <= -l1 / 2) return Region::R2m;
    if (l2 >= 0 && l2 <= l1) return Region::R3m;
    if (l1 >= 0 && l1 <= l2) return Region::R4m;
    if (l1 >= 0 && -2 * l1 <= l2 && l2 <= -l1) return Region::R5m;
    if (l2 >= 0 && -2 * l2 <= l1 && l1 <= -l2) return Region::R6m;
    return Region::R1p;  // unreachable: the twelve regions cover the plane
}

namespace {

bool lex_greater(const Vec3& x, const Vec3& y) {
    for (int i = 0; i < 3; ++i) {
        if (x[i] > y[i]) return true;
        if (x[i] < y[i]) return false;
    }
    return false;
}

struct LabeledEigen {
    std::array<double, 3> l;
    std::array<Vec3, 3> v;
};

// Labels (λ1,λ2,λ3) by descending lexicographic order of the eigenvectors.
// The order depends only on the eigenspaces, not the eigenvalues, so Q and −Q
// get identical labels and the region classification reflects R± → R∓.
LabeledEigen labeled_eigen(const QTensor& q) {
    EigenSystem es = eigen(q);
    int idx[3] = {0, 1, 2};
    std::stable_sort(idx, idx + 3, [&](int i, int j) { return lex_greater(es.vec[i], es.vec[j]); });
    LabeledEigen le;
    for (int k = 0; k < 3; ++k) {
        le.l[k] = es.lambda[idx[k]];
        le.v[k] = es.vec[idx[k]];
    }
    return le;
}

// Per-region linear formulas; n_idx/m_idx select among the labeled
// eigenvectors (0-based: 0 = n1, 1 = n2, 2 = n3).
struct RegionFormula {
    double s, r;
    int n_idx, m_idx;
};

RegionFormula region_formula(Region reg, double l1, double l2) {
    switch (reg) {
        case Region::R1p:
        case Region::R1m: return {2 * l2 + l1, 2 * l1 + l2, 1, 0};
        case Region::R2p:
        case Region::R2m: return {2 * l1 + l2, 2 * l2 + l1, 0, 1};
        case Region::R3p:
        case Region::R3m: return {-2 * l1 - l2, l2 - l1, 2, 1};
        case Region::R4p:
        case Region::R4m: return {-2 * l2 - l1, l1 - l2, 2, 0};
        case Region::R5p:
        case Region::R5m: return {l2 - l1, -2 * l1 - l2, 1, 2};
        case Region::R6p:
        case Region::R6m: return {l1 - l2, -2 * l2 - l1, 0, 2};
    }
    return {0, 0, 0, 1};
}

}  // namespace

SRRep decompose_sr(const QTensor& q) {
    LabeledEigen le = labeled_eigen(q);
    Region reg = classify_region(le.l[0], le.l[1]);
    RegionFormula f = region_formula(reg, le.l[0], le.l[1]);
    return SRRep{f.s, f.r, le.v[f.n_idx], le.v[f.m_idx], reg};
}

SRCapRep decompose_SR(const QTensor& q) {
    SRRep sr = decompose_sr(q);
    return SRCapRep{sr.s - 0.5 * sr.r, 0.5 * sr.r, sr.n, sr.m, normalized(cross(sr.n, sr.m))};
}

double biaxiality(const QTensor& q) {
    double tr2, tr3;
    trace_powers(q, tr2, tr3);
    if (tr2 <= kBiaxialityNormFloor * kBiaxialityNormFloor) return 0.0;
    double beta = 1.0 - 6.0 * tr3 * tr3 / (tr2 * tr2 * tr2);
    return std::clamp(beta, 0.0, 1.0);
}

double biaxiality_poly(const QTensor& q) {
    double tr2, tr3;
    trace_powers(q, tr2, tr3);
    return tr2 * tr2 * tr2 - 6.0 * tr3 * tr3;
}

QTensor project_to_uniaxial(const QTensor& q, const MaterialParams& p) {
    SRCapRep c = decompose_SR(q);
    if (!(c.S > 8.0 * std::abs(c.R))) throw degenerate_projection_error(c.S, c.R);
    EigenSystem es = eigen(q);
    return from_uniaxial(p.s_plus, es.vec[0]);
}

QTensor random_qtensor(SplitMix64& rng, double lo, double hi) {
    QTensor q;
    for (int i = 0; i < 5; ++i) q.a[i] = rng.uniform(lo, hi);
    return q;
}

}  // namespace ldg
