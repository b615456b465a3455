// Derives the constant used in the large-s branch of bound_sr and scans the
// bound against the exact shifted bulk density.
//
// The biaxial deficit enters that branch through tau * b^2 * s_+^3 *
// (r(s-r)/s^2)^2.  Writing gamma = r/s, the sharp prefactor is
//   tau = eta / (24*sqrt(3)),  eta = min over gamma in [0, 1/2] of
//         27 / (4 * (1 - gamma + gamma^2)^3),
// located by a coarse grid plus golden-section refinement below.  The scan
// then checks f_bulk_shifted - bound_sr >= 0 on a dense (s, gamma) grid for
// several material parameter sets and reports the worst margin.

#include <cmath>
#include <cstdio>

#include "ldg/bulk.hpp"
#include "ldg/qtensor.hpp"

using namespace ldg;

namespace {

double eta_of(double g) {
    double d = 1.0 - g + g * g;
    return 27.0 / (4.0 * d * d * d);
}

double minimize_eta() {
    // coarse grid
    double best_g = 0, best = eta_of(0);
    for (int i = 0; i <= 10000; ++i) {
        double g = 0.5 * i / 10000.0;
        double v = eta_of(g);
        if (v < best) {
            best = v;
            best_g = g;
        }
    }
    // golden-section refinement around the grid minimum
    double lo = std::max(0.0, best_g - 1e-3), hi = std::min(0.5, best_g + 1e-3);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = eta_of(x1), f2 = eta_of(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eta_of(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eta_of(x2);
        }
    }
    double g = 0.5 * (a + b);
    double v = eta_of(g);
    std::printf("eta minimum: gamma = %.12g, eta = %.17g\n", g, v);
    return v;
}

// Worst (most negative is bad) value of f_bulk_shifted - bound_sr over the
// region handled by the scanned branch.
void scan_params(double a2, double b2, double c2) {
    MaterialParams p = derive_params(a2, b2, c2, 1.0);
    double worst = 1e300, worst_s = 0, worst_g = 0;
    const Vec3 e1{1, 0, 0}, e2{0, 1, 0};
    for (int is = 0; is <= 800; ++is) {
        double s = p.s_plus * (1.0 + 7.0 * is / 800.0);  // s in [s_plus, 8 s_plus]
        for (int ig = 0; ig <= 400; ++ig) {
            double g = 0.5 * ig / 400.0;
            double r = g * s;
            QTensor q = from_uniaxial(s, e1) + from_uniaxial(r, e2);
            double margin = f_bulk_shifted(q, p) - bound_sr(q, p).bound;
            if (margin < worst) {
                worst = margin;
                worst_s = s;
                worst_g = g;
            }
        }
    }
    std::printf("params (%g, %g, %g): worst margin %.6e at s = %.6g, r/s = %.4g\n", a2, b2, c2,
                worst, worst_s, worst_g);
}

}  // namespace

int main() {
    double eta = minimize_eta();
    double tau = eta / (24.0 * std::sqrt(3.0));
    std::printf("tau = eta / (24*sqrt(3)) = %.17g\n", tau);
    std::printf("kTauCaseII           = %.17g\n", kTauCaseII);
    std::printf("closed form 3*sqrt(3)/32 = %.17g\n", 3.0 * std::sqrt(3.0) / 32.0);

    scan_params(1, 1, 1);
    scan_params(2, 1, 1);
    scan_params(1, 3, 1);
    scan_params(0.5, 1, 2);
    scan_params(3, 0.2, 1.5);
    return 0;
}
