#include "ldg/field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ldg/errors.hpp"

namespace ldg {

namespace {

inline double twt(int idx, int n) { return (idx == 0 || idx == n - 1) ? 0.5 : 1.0; }

inline double dot_of(const QTensor& a, const QTensor& b) { return dot(a, b); }
inline double dot_of(const Vec3& a, const Vec3& b) { return dot(a, b); }

// Forward-difference bilinear edge sum Σ w·⟨Δu, Δv⟩ with trapezoid weights
// in the two transverse directions; with u = v this is the exact quadrature
// of ∫|∇F|² for per-axis linear fields.
template <class T>
double edge_dot_impl(const Grid3& g, const std::vector<T>& u, const std::vector<T>& v) {
    double sx = parallel_sum(static_cast<std::size_t>(g.nz), [&](std::size_t ks) {
        int k = static_cast<int>(ks);
        double acc = 0;
        for (int j = 0; j < g.ny; ++j) {
            double w = twt(j, g.ny) * twt(k, g.nz);
            for (int i = 0; i + 1 < g.nx; ++i)
                acc += w * dot_of(u[g.idx(i + 1, j, k)] - u[g.idx(i, j, k)],
                                  v[g.idx(i + 1, j, k)] - v[g.idx(i, j, k)]);
        }
        return acc;
    });
    double sy = parallel_sum(static_cast<std::size_t>(g.nz), [&](std::size_t ks) {
        int k = static_cast<int>(ks);
        double acc = 0;
        for (int j = 0; j + 1 < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double w = twt(i, g.nx) * twt(k, g.nz);
                acc += w * dot_of(u[g.idx(i, j + 1, k)] - u[g.idx(i, j, k)],
                                  v[g.idx(i, j + 1, k)] - v[g.idx(i, j, k)]);
            }
        return acc;
    });
    double sz = parallel_sum(static_cast<std::size_t>(g.nz) - 1, [&](std::size_t ks) {
        int k = static_cast<int>(ks);
        double acc = 0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double w = twt(i, g.nx) * twt(j, g.ny);
                acc += w * dot_of(u[g.idx(i, j, k + 1)] - u[g.idx(i, j, k)],
                                  v[g.idx(i, j, k + 1)] - v[g.idx(i, j, k)]);
            }
        return acc;
    });
    // Σ w·⟨Δu, Δv⟩; callers convert to Σ w·⟨Δu/h, Δv/h⟩·h³ by multiplying
    // with h.
    return sx + sy + sz;
}

template <class T>
double edge_sum_impl(const Grid3& g, const std::vector<T>& v) {
    return edge_dot_impl(g, v, v);
}

// Σ w·(|Δb|² − |Δa|²) assembled per edge in the factored form
// ⟨Δb − Δa, Δb + Δa⟩, so the result stays accurate when a and b are close
// (the global sums would cancel catastrophically).
template <class T>
double edge_delta_impl(const Grid3& g, const std::vector<T>& a, const std::vector<T>& b) {
    auto term = [&](std::size_t p, std::size_t q) {
        T db = b[p] - b[q];
        T da = a[p] - a[q];
        return dot_of(db - da, db + da);
    };
    double sx = parallel_sum(static_cast<std::size_t>(g.nz), [&](std::size_t ks) {
        int k = static_cast<int>(ks);
        double acc = 0;
        for (int j = 0; j < g.ny; ++j) {
            double w = twt(j, g.ny) * twt(k, g.nz);
            for (int i = 0; i + 1 < g.nx; ++i) acc += w * term(g.idx(i + 1, j, k), g.idx(i, j, k));
        }
        return acc;
    });
    double sy = parallel_sum(static_cast<std::size_t>(g.nz), [&](std::size_t ks) {
        int k = static_cast<int>(ks);
        double acc = 0;
        for (int j = 0; j + 1 < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double w = twt(i, g.nx) * twt(k, g.nz);
                acc += w * term(g.idx(i, j + 1, k), g.idx(i, j, k));
            }
        return acc;
    });
    double sz = parallel_sum(static_cast<std::size_t>(g.nz) - 1, [&](std::size_t ks) {
        int k = static_cast<int>(ks);
        double acc = 0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double w = twt(i, g.nx) * twt(j, g.ny);
                acc += w * term(g.idx(i, j, k + 1), g.idx(i, j, k));
            }
        return acc;
    });
    return sx + sy + sz;
}

void require_same_grid(const Grid3& a, const Grid3& b, const char* who) {
    if (a.nx != b.nx || a.ny != b.ny || a.nz != b.nz || a.h != b.h || a.origin != b.origin)
        throw validation_error(std::string(who) + ": grid mismatch");
}

}  // namespace

Grid3 make_grid(int nx, int ny, int nz, double h, const Vec3& origin) {
    if (nx < 3 || ny < 3 || nz < 3) throw validation_error("make_grid: node counts must be >= 3");
    if (!(h > 0)) throw validation_error("make_grid: spacing must be positive");
    return Grid3{nx, ny, nz, origin, h};
}

QField make_qfield(const Grid3& g) { return QField{g, std::vector<QTensor>(g.n_nodes())}; }

DirectorField make_director_field(const Grid3& g, const Vec3& fill) {
    return DirectorField{g, std::vector<Vec3>(g.n_nodes(), fill)};
}

void apply_director_boundary(QField& f, const std::function<Vec3(const Vec3&)>& n_b,
                             const MaterialParams& p) {
    const Grid3& g = f.grid;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (!g.is_boundary(i, j, k)) continue;
                Vec3 nb = n_b(g.pos(i, j, k));
                if (std::abs(norm(nb) - 1.0) > 1e-10)
                    throw validation_error("boundary director must be unit length");
                f.v[g.idx(i, j, k)] = from_uniaxial(p.s_plus, nb);
            }
}

void apply_director_boundary(DirectorField& d, const std::function<Vec3(const Vec3&)>& n_b) {
    const Grid3& g = d.grid;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (!g.is_boundary(i, j, k)) continue;
                Vec3 nb = n_b(g.pos(i, j, k));
                if (std::abs(norm(nb) - 1.0) > 1e-10)
                    throw validation_error("boundary director must be unit length");
                d.v[g.idx(i, j, k)] = nb;
            }
}

std::vector<std::size_t> interior_nodes(const Grid3& g) {
    std::vector<std::size_t> out;
    out.reserve(g.n_nodes());
    for (int k = 1; k + 1 < g.nz; ++k)
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) out.push_back(g.idx(i, j, k));
    return out;
}

double edge_gradient_sum(const QField& f) {
    return edge_sum_impl(f.grid, f.v) * f.grid.h;
}

double edge_gradient_sum(const DirectorField& d) {
    return edge_sum_impl(d.grid, d.v) * d.grid.h;
}

double edge_dot_sum(const QField& f, const QField& g) {
    require_same_grid(f.grid, g.grid, "edge_dot_sum");
    return edge_dot_impl(f.grid, f.v, g.v) * f.grid.h;
}

double dirichlet_energy_delta(const DirectorField& a, const DirectorField& b) {
    require_same_grid(a.grid, b.grid, "dirichlet_energy_delta");
    return edge_delta_impl(a.grid, a.v, b.v) * a.grid.h;
}

double elastic_energy(const QField& f, const MaterialParams& p) {
    return 0.5 * p.L * edge_gradient_sum(f);
}

double bulk_energy(const QField& f, const MaterialParams& p) {
    const Grid3& g = f.grid;
    double h3 = g.h * g.h * g.h;
    double s = parallel_sum(static_cast<std::size_t>(g.nz > 2 ? g.nz - 2 : 0), [&](std::size_t ks) {
        int k = static_cast<int>(ks) + 1;
        double acc = 0;
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) acc += f_bulk_shifted(f.v[g.idx(i, j, k)], p);
        return acc;
    });
    return s * h3;
}

double total_energy(const QField& f, const MaterialParams& p) {
    return elastic_energy(f, p) + bulk_energy(f, p);
}

double dirichlet_energy_director(const DirectorField& d) {
    return edge_sum_impl(d.grid, d.v) * d.grid.h;
}

std::vector<QTensor> energy_gradient(const QField& f, const MaterialParams& p) {
    const Grid3& g = f.grid;
    std::vector<QTensor> out(g.n_nodes());
    double h2 = g.h * g.h;
    double h3 = h2 * g.h;
    parallel_apply(static_cast<std::size_t>(g.nz > 2 ? g.nz - 2 : 0), [&](std::size_t ks) {
        int k = static_cast<int>(ks) + 1;
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) {
                std::size_t c = g.idx(i, j, k);
                QTensor lap = f.v[g.idx(i - 1, j, k)] + f.v[g.idx(i + 1, j, k)] +
                              f.v[g.idx(i, j - 1, k)] + f.v[g.idx(i, j + 1, k)] +
                              f.v[g.idx(i, j, k - 1)] + f.v[g.idx(i, j, k + 1)] -
                              6.0 * f.v[c];
                lap *= 1.0 / h2;
                out[c] = h3 * (-p.L * lap + bulk_gradient(f.v[c], p));
            }
    });
    return out;
}

Residual el_residual(const QField& f, const MaterialParams& p) {
    const Grid3& g = f.grid;
    Residual res;
    res.r.assign(g.n_nodes(), QTensor{});
    double h2 = g.h * g.h;
    parallel_apply(static_cast<std::size_t>(g.nz > 2 ? g.nz - 2 : 0), [&](std::size_t ks) {
        int k = static_cast<int>(ks) + 1;
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) {
                std::size_t c = g.idx(i, j, k);
                QTensor lap = f.v[g.idx(i - 1, j, k)] + f.v[g.idx(i + 1, j, k)] +
                              f.v[g.idx(i, j - 1, k)] + f.v[g.idx(i, j + 1, k)] +
                              f.v[g.idx(i, j, k - 1)] + f.v[g.idx(i, j, k + 1)] -
                              6.0 * f.v[c];
                lap *= 1.0 / h2;
                res.r[c] = p.L * lap - bulk_gradient(f.v[c], p);
            }
    });
    res.max_norm = std::sqrt(parallel_max(res.r.size(), [&](std::size_t i) { return norm2(res.r[i]); }));
    return res;
}

double grad_sq_centered(const QField& f, int i, int j, int k) {
    const Grid3& g = f.grid;
    double h2 = g.h * g.h;
    std::size_t c = g.idx(i, j, k);
    double s = 0;
    s += 0.5 * (norm2(f.v[g.idx(i + 1, j, k)] - f.v[c]) + norm2(f.v[c] - f.v[g.idx(i - 1, j, k)]));
    s += 0.5 * (norm2(f.v[g.idx(i, j + 1, k)] - f.v[c]) + norm2(f.v[c] - f.v[g.idx(i, j - 1, k)]));
    s += 0.5 * (norm2(f.v[g.idx(i, j, k + 1)] - f.v[c]) + norm2(f.v[c] - f.v[g.idx(i, j, k - 1)]));
    return s / h2;
}

double normalized_energy(const QField& f, const MaterialParams& p, const Vec3& center,
                         double radius) {
    const Grid3& g = f.grid;
    if (!(radius > 0)) throw std::domain_error("normalized_energy: radius must be positive");
    for (int a = 0; a < 3; ++a) {
        int n = a == 0 ? g.nx : (a == 1 ? g.ny : g.nz);
        double lo = g.origin[a] + g.h;
        double hi = g.origin[a] + g.h * (n - 2);
        if (center[a] - radius < lo - 1e-12 || center[a] + radius > hi + 1e-12)
            throw std::domain_error("normalized_energy: ball not contained in the domain interior");
    }
    double h3 = g.h * g.h * g.h;
    double r2 = radius * radius;
    int i0 = static_cast<int>(std::floor((center[0] - radius - g.origin[0]) / g.h));
    int i1 = static_cast<int>(std::ceil((center[0] + radius - g.origin[0]) / g.h));
    int j0 = static_cast<int>(std::floor((center[1] - radius - g.origin[1]) / g.h));
    int j1 = static_cast<int>(std::ceil((center[1] + radius - g.origin[1]) / g.h));
    int k0 = static_cast<int>(std::floor((center[2] - radius - g.origin[2]) / g.h));
    int k1 = static_cast<int>(std::ceil((center[2] + radius - g.origin[2]) / g.h));
    double acc = 0;
    for (int k = std::max(1, k0); k <= std::min(g.nz - 2, k1); ++k)
        for (int j = std::max(1, j0); j <= std::min(g.ny - 2, j1); ++j)
            for (int i = std::max(1, i0); i <= std::min(g.nx - 2, i1); ++i) {
                Vec3 d = f.grid.pos(i, j, k) - center;
                if (norm2(d) > r2) continue;
                double e = 0.5 * grad_sq_centered(f, i, j, k) +
                           f_bulk_shifted(f.v[g.idx(i, j, k)], p) / p.L;
                acc += e * h3;
            }
    return acc / radius;
}

double w12_distance(const QField& f, const QField& g) {
    const Grid3& gf = f.grid, &gg = g.grid;
    require_same_grid(gf, gg, "w12_distance");
    double h3 = gf.h * gf.h * gf.h;
    double val = parallel_sum(gf.n_nodes(), [&](std::size_t i) { return norm2(f.v[i] - g.v[i]); });
    double grad = 0;
    for (int k = 0; k < gf.nz; ++k)
        for (int j = 0; j < gf.ny; ++j)
            for (int i = 0; i < gf.nx; ++i) {
                std::size_t c = gf.idx(i, j, k);
                QTensor d0 = f.v[c] - g.v[c];
                if (i + 1 < gf.nx) {
                    QTensor e = (f.v[gf.idx(i + 1, j, k)] - g.v[gf.idx(i + 1, j, k)]) - d0;
                    grad += norm2(e);
                }
                if (j + 1 < gf.ny) {
                    QTensor e = (f.v[gf.idx(i, j + 1, k)] - g.v[gf.idx(i, j + 1, k)]) - d0;
                    grad += norm2(e);
                }
                if (k + 1 < gf.nz) {
                    QTensor e = (f.v[gf.idx(i, j, k + 1)] - g.v[gf.idx(i, j, k + 1)]) - d0;
                    grad += norm2(e);
                }
            }
    return std::sqrt(val * h3 + grad / (gf.h * gf.h) * h3);
}

double boundary_normal_energy(const QField& f) {
    const Grid3& g = f.grid;
    double acc = 0;
    // x faces
    for (int k = 2; k + 2 < g.nz; ++k)
        for (int j = 2; j + 2 < g.ny; ++j) {
            acc += norm2(f.v[g.idx(0, j, k)] - f.v[g.idx(1, j, k)]);
            acc += norm2(f.v[g.idx(g.nx - 1, j, k)] - f.v[g.idx(g.nx - 2, j, k)]);
        }
    // y faces
    for (int k = 2; k + 2 < g.nz; ++k)
        for (int i = 2; i + 2 < g.nx; ++i) {
            acc += norm2(f.v[g.idx(i, 0, k)] - f.v[g.idx(i, 1, k)]);
            acc += norm2(f.v[g.idx(i, g.ny - 1, k)] - f.v[g.idx(i, g.ny - 2, k)]);
        }
    // z faces
    for (int j = 2; j + 2 < g.ny; ++j)
        for (int i = 2; i + 2 < g.nx; ++i) {
            acc += norm2(f.v[g.idx(i, j, 0)] - f.v[g.idx(i, j, 1)]);
            acc += norm2(f.v[g.idx(i, j, g.nz - 1)] - f.v[g.idx(i, j, g.nz - 2)]);
        }
    return acc;  // h²·Σ|d/h|² = Σ|d|²
}

}  // namespace ldg
