#pragma once

#include <vector>

#include "smelab/field.hpp"
#include "smelab/params.hpp"

namespace sme {

/// Central differences at interior nodes; one-sided second order at boundary nodes
/// (first order or zero when the lattice runs out of active neighbours).
VectorField gradient(const ScalarField& u);

/// sum_i D_i(D_i u / sqrt(1 + |Du|^2)) in divergence form: fluxes on half nodes,
/// with the tangential difference averaged over the four surrounding nodes.
/// Values at interior nodes; zero elsewhere.
ScalarField mean_curvature_operator(const ScalarField& u);

/// M(u) - (m-1)/(u v) at interior nodes. Throws DomainError naming the first
/// interior node with u <= 0.
ScalarField sme_residual(const ScalarField& u, const Params& p);

/// sigma_{m-1} * sum_cells h^2 sqrt(1 + |Du|^2) u^{m-1}, midpoint rule per cell.
double area_functional(const ScalarField& u, const Params& p);

/// Exact gradient of area_functional with respect to interior node values.
ScalarField area_gradient(const ScalarField& u, const Params& p);

/// Geometry of the graph of u, see GraphGeometry.
struct GraphGeometry {
    std::vector<double> v;                 // sqrt(1 + |Du|^2), active nodes
    std::vector<double> nu1, nu2, nu3;     // unit normal v^{-1}(-Du, 1)
    std::vector<double> g11, g12, g22;     // g^{ij} = delta_ij - nu_i nu_j
    std::vector<double> H;                 // mean curvature (interior nodes)
    std::vector<double> A2;                // |A|^2 (interior nodes)
    double identity_defect = 0.0;          // max |H - (m-1) nu3 / u| over interior nodes with u > 0
    std::size_t identity_skipped = 0;      // interior nodes with u <= 0 left out of the comparison
};

GraphGeometry graph_geometry(const ScalarField& u, const Params& p);

/// Discrete weak form: sum over half-node edges of flux * D zeta plus
/// (m-1) zeta / (u v) at nodes. Summation by parts gives exactly
/// -h^2 sum zeta * sme_residual. zeta must vanish on boundary nodes and
/// on interior nodes touching them.
double weak_form_residual(const ScalarField& u, const ScalarField& zeta, const Params& p);

namespace detail {
/// Central gradient at an interior node.
inline void central_gradient(const Grid2D& g, std::span<const double> u, std::size_t k, double& gx, double& gy) {
    const double inv2h = 0.5 / g.h();
    gx = (u[g.neighbor(k, 1, 0)] - u[g.neighbor(k, -1, 0)]) * inv2h;
    gy = (u[g.neighbor(k, 0, 1)] - u[g.neighbor(k, 0, -1)]) * inv2h;
}

/// Flux D_d u / sqrt(1 + |Du|^2) on the half node between k and its +d neighbour (d = 0: x, 1: y).
double half_node_flux(const Grid2D& g, std::span<const double> u, std::size_t k, int d);
}  // namespace detail

}  // namespace sme
