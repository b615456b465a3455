#ifndef LDG_FIELD_HPP
#define LDG_FIELD_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "ldg/bulk.hpp"
#include "ldg/qtensor.hpp"

namespace ldg {

// Uniform node-centered box grid; node (i,j,k) sits at origin + h·(i,j,k),
// x fastest in memory. The boundary is exactly the outermost node shell.
struct Grid3 {
    int nx, ny, nz;
    Vec3 origin{0, 0, 0};
    double h;

    std::size_t n_nodes() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    Vec3 pos(int i, int j, int k) const {
        return {origin[0] + h * i, origin[1] + h * j, origin[2] + h * k};
    }
    bool is_boundary(int i, int j, int k) const {
        return i == 0 || i == nx - 1 || j == 0 || j == ny - 1 || k == 0 || k == nz - 1;
    }
    // distance from the node to the nearest boundary face plane
    double boundary_distance(int i, int j, int k) const {
        int di = std::min(i, nx - 1 - i);
        int dj = std::min(j, ny - 1 - j);
        int dk = std::min(k, nz - 1 - k);
        return h * std::min(di, std::min(dj, dk));
    }
};

Grid3 make_grid(int nx, int ny, int nz, double h, const Vec3& origin = {0, 0, 0});

struct QField {
    Grid3 grid;
    std::vector<QTensor> v;
};

struct DirectorField {
    Grid3 grid;
    std::vector<Vec3> v;
};

QField make_qfield(const Grid3& g);
DirectorField make_director_field(const Grid3& g, const Vec3& fill = {0, 0, 1});

// Strong anchoring: sets every boundary node to s₊(n_b⊗n_b − Id/3). The
// assignment n_b must be unit length at each boundary node (1e-10), else
// validation_error. Interior nodes are left untouched.
void apply_director_boundary(QField& f, const std::function<Vec3(const Vec3&)>& n_b,
                             const MaterialParams& p);
void apply_director_boundary(DirectorField& d, const std::function<Vec3(const Vec3&)>& n_b);

// List of interior (non-boundary) node indices in memory order.
std::vector<std::size_t> interior_nodes(const Grid3& g);

// Σ over forward-difference edges of |ΔF|²·h, with trapezoid weights in the
// two transverse directions so the sum is the exact ∫|∇F|² for fields linear
// along each axis. Shared by the elastic and director energies.
double edge_gradient_sum(const QField& f);
double edge_gradient_sum(const DirectorField& d);

// Bilinear form of the same quadrature: Σ_edges w·⟨Δf, Δg⟩·h, so that
// edge_dot_sum(f, f) == edge_gradient_sum(f). Grids must match. Used by the
// solvers for exact directional derivatives of the elastic energy.
double edge_dot_sum(const QField& f, const QField& g);

// dirichlet_energy_director(b) − dirichlet_energy_director(a), assembled per
// edge in the factored form ⟨Δb − Δa, Δb + Δa⟩ so the difference of two
// nearby fields keeps full precision (the two global sums would cancel).
double dirichlet_energy_delta(const DirectorField& a, const DirectorField& b);

// (L/2)·edge_gradient_sum
double elastic_energy(const QField& f, const MaterialParams& p);

// rectangle rule over interior nodes: Σ f̃_B(Q)·h³
double bulk_energy(const QField& f, const MaterialParams& p);

// elastic_energy + bulk_energy ≥ 0
double total_energy(const QField& f, const MaterialParams& p);

// ∫|∇n|² by the same edge quadrature (no 1/2 factor).
double dirichlet_energy_director(const DirectorField& d);

// Exact gradient of the discrete total_energy with respect to the interior
// node coefficients: per interior node (−L·ΔₕQ + bulk_gradient)·h³ with ΔₕQ
// the 7-point Laplacian; zero on boundary nodes (Dirichlet frozen).
std::vector<QTensor> energy_gradient(const QField& f, const MaterialParams& p);

// Euler–Lagrange residual L·ΔₕQ − bulk_gradient per interior node (zero on
// the boundary); nodewise energy_gradient = −el_residual·h³.
struct Residual {
    double max_norm;
    std::vector<QTensor> r;
};
Residual el_residual(const QField& f, const MaterialParams& p);

// Node-centered |∇ₕQ|²: per axis the average of the squared forward and
// backward differences. Defined on interior nodes only.
double grad_sq_centered(const QField& f, int i, int j, int k);

// (1/radius)·Σ_{nodes in B(center, radius)} e_L·h³ with
// e_L = |∇ₕQ|²/2 + f̃_B/L. The ball must sit inside the domain with at least
// one cell to spare, else std::domain_error.
double normalized_energy(const QField& f, const MaterialParams& p, const Vec3& center,
                         double radius);

// W^{1,2} distance √(Σ_nodes |f−g|² h³ + Σ_edges |∇ₕ(f−g)|² h³);
// grids must match.
double w12_distance(const QField& f, const QField& g);

// h²·Σ over face-interior boundary nodes (a 2-node collar around the box
// edges is excluded) of the squared one-sided normal difference |ΔQ/h|².
double boundary_normal_energy(const QField& f);

}  // namespace ldg

#endif
