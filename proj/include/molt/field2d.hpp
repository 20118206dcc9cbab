#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "molt/errors.hpp"
#include "molt/geometry.hpp"
#include "molt/line.hpp"

namespace molt {

/// Tensor-product grid with per-axis sweep lines and an interior mask.
/// Rectangle grids cover the whole box (Dirichlet boundary on the edge
/// nodes, or periodic with the duplicated-endpoint convention); embedded
/// grids carry the level-set line structure from build_embedded_lines.
struct Grid2D {
    int nx = 0, ny = 0;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    double dx = 0, dy = 0;
    std::vector<double> xs, ys;
    BoundaryKind bc = BoundaryKind::dirichlet;
    bool embedded = false;
    std::vector<uint8_t> interior;           // nx * ny, row-major
    std::vector<EmbeddedLine> x_lines, y_lines;

    int idx(int ix, int iy) const { return iy * nx + ix; }
    bool is_interior(int ix, int iy) const { return interior[std::size_t(idx(ix, iy))] != 0; }
    double cell_volume() const { return dx * dy; }

    /// ny == 1 builds the degenerate single-row grid on which the y
    /// operators act as the identity (C collapses to the 1D D).
    static std::shared_ptr<const Grid2D> rectangle(int nx, int ny, double x0, double x1,
                                                   double y0, double y1, BoundaryKind bc)
    {
        if (nx < 2 || ny < 1) throw argument_error("Grid2D::rectangle: need at least 2x1 nodes");
        if (!(x1 > x0) || (ny > 1 && !(y1 > y0)))
            throw argument_error("Grid2D::rectangle: empty box");
        auto g = std::make_shared<Grid2D>();
        g->nx = nx;
        g->ny = ny;
        g->x0 = x0; g->x1 = x1; g->y0 = y0; g->y1 = y1;
        g->dx = (x1 - x0) / double(nx - 1);
        g->dy = ny > 1 ? (y1 - y0) / double(ny - 1) : 0.0;
        g->bc = bc;
        g->xs.resize(nx);
        g->ys.resize(ny);
        for (int i = 0; i < nx; ++i) g->xs[i] = x0 + g->dx * double(i);
        for (int j = 0; j < ny; ++j) g->ys[j] = y0 + g->dy * double(j);
        g->xs.back() = x1;
        g->ys.back() = ny > 1 ? y1 : y0;
        g->interior.assign(std::size_t(nx) * ny, 1);
        g->x_lines.reserve(ny);
        for (int j = 0; j < ny; ++j)
            g->x_lines.push_back({0, j, g->ys[j], 0, nx, x0, x1, 0.0, 0.0});
        if (ny > 1) {
            g->y_lines.reserve(nx);
            for (int i = 0; i < nx; ++i)
                g->y_lines.push_back({1, i, g->xs[i], 0, ny, y0, y1, 0.0, 0.0});
        }
        return g;
    }

    static std::shared_ptr<const Grid2D> embed(const ImplicitCurve& curve, int nx, int ny,
                                               double x0, double x1, double y0, double y1)
    {
        auto g = std::make_shared<Grid2D>();
        g->nx = nx;
        g->ny = ny;
        g->x0 = x0; g->x1 = x1; g->y0 = y0; g->y1 = y1;
        g->dx = (x1 - x0) / double(nx - 1);
        g->dy = (y1 - y0) / double(ny - 1);
        g->bc = BoundaryKind::dirichlet;
        g->embedded = true;
        g->xs.resize(nx);
        g->ys.resize(ny);
        for (int i = 0; i < nx; ++i) g->xs[i] = x0 + g->dx * double(i);
        for (int j = 0; j < ny; ++j) g->ys[j] = y0 + g->dy * double(j);
        g->xs.back() = x1;
        g->ys.back() = y1;
        EmbeddedGeometry geo = build_embedded_lines(curve, g->xs, g->ys);
        g->interior = std::move(geo.interior);
        g->x_lines = std::move(geo.x_lines);
        g->y_lines = std::move(geo.y_lines);
        return g;
    }
};

/// Scalar field on a shared grid. Exterior (masked) entries stay zero; the
/// operators neither read nor write them.
class Field2D {
public:
    Field2D() = default;
    explicit Field2D(std::shared_ptr<const Grid2D> grid)
        : grid_(std::move(grid)), v_(std::size_t(grid_->nx) * grid_->ny, 0.0)
    {
    }

    const std::shared_ptr<const Grid2D>& grid() const { return grid_; }
    double& operator()(int ix, int iy) { return v_[std::size_t(grid_->idx(ix, iy))]; }
    double operator()(int ix, int iy) const { return v_[std::size_t(grid_->idx(ix, iy))]; }
    std::span<double> data() { return v_; }
    std::span<const double> data() const { return v_; }

    void fill(double value) { std::fill(v_.begin(), v_.end(), value); }

    /// Samples f(x, y) at interior nodes (exterior stays zero).
    template <class F>
    void sample(F&& f)
    {
        const auto& g = *grid_;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix)
                v_[std::size_t(g.idx(ix, iy))] =
                    g.is_interior(ix, iy) ? f(g.xs[ix], g.ys[iy]) : 0.0;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    std::shared_ptr<const Grid2D> grid_;
    std::vector<double> v_;
};

} // namespace molt
