#pragma once

#include <vector>

#include "ddm/errors.hpp"
#include "ddm/vec2.hpp"

namespace ddm {

/// Uniform rectangular grid over a covering box. Nodes are ordered
/// lexicographically with x fastest: node(i,j) = j*(nx+1) + i.
struct StructuredGrid {
    Rect bounds{-0.5, 0.5, -0.5, 0.5};
    int nx = 2;
    int ny = 2;

    StructuredGrid() = default;
    StructuredGrid(Rect b, int nx_, int ny_) : bounds(b), nx(nx_), ny(ny_) {
        if (nx < 2 || ny < 2) throw ConfigError("StructuredGrid: nx, ny must be >= 2");
        if (!(bounds.x1 > bounds.x0) || !(bounds.y1 > bounds.y0))
            throw ConfigError("StructuredGrid: empty bounds");
    }

    double hx() const { return bounds.width() / nx; }
    double hy() const { return bounds.height() / ny; }
    int num_nodes() const { return (nx + 1) * (ny + 1); }
    int num_cells() const { return nx * ny; }

    int node_index(int i, int j) const { return j * (nx + 1) + i; }
    Vec2 node(int i, int j) const {
        return {bounds.x0 + i * hx(), bounds.y0 + j * hy()};
    }
    /// Lower-left corner of cell (ci,cj), ci in [0,nx), cj in [0,ny).
    Vec2 cell_origin(int ci, int cj) const {
        return {bounds.x0 + ci * hx(), bounds.y0 + cj * hy()};
    }
};

/// Tensor Gauss-Legendre rule on the reference cell [0,1]^2, `order` points
/// per axis. Reference weights sum to 1 and the rule is exact for
/// polynomials of degree <= 2*order-1 per axis.
struct QuadratureRule {
    int order = 4;
    std::vector<double> points;  // 1-D abscissae on [0,1]
    std::vector<double> weights; // matching 1-D weights, sum to 1

    explicit QuadratureRule(int order_per_axis = 4);
};

} // namespace ddm
