#pragma once

#include <array>
#include <memory>
#include <vector>

#include "molt/conv1d.hpp"
#include "molt/errors.hpp"

namespace molt {

/// Uniform box grid for the 3D splitting operators. Embedded geometry is a
/// 2D feature; the 3D operators are the straightforward axis-by-axis
/// generalization on a box.
struct Grid3D {
    std::array<int, 3> n{};
    std::array<double, 3> lo{}, hi{};
    std::array<std::vector<double>, 3> coords;
    BoundaryKind bc = BoundaryKind::dirichlet;

    static std::shared_ptr<const Grid3D> box(std::array<int, 3> n, std::array<double, 3> lo,
                                             std::array<double, 3> hi, BoundaryKind bc)
    {
        auto g = std::make_shared<Grid3D>();
        g->n = n;
        g->lo = lo;
        g->hi = hi;
        g->bc = bc;
        for (int a = 0; a < 3; ++a) {
            if (n[std::size_t(a)] < 2) throw argument_error("Grid3D::box: need >= 2 nodes per axis");
            auto& c = g->coords[std::size_t(a)];
            c.resize(std::size_t(n[std::size_t(a)]));
            const double h = (hi[std::size_t(a)] - lo[std::size_t(a)]) / double(n[std::size_t(a)] - 1);
            for (int i = 0; i < n[std::size_t(a)]; ++i) c[std::size_t(i)] = lo[std::size_t(a)] + h * i;
            c.back() = hi[std::size_t(a)];
        }
        return g;
    }

    std::size_t size() const { return std::size_t(n[0]) * n[1] * n[2]; }
    std::size_t idx(int ix, int iy, int iz) const
    {
        return (std::size_t(iz) * n[1] + iy) * n[0] + ix;
    }
};

class Field3D {
public:
    Field3D() = default;
    explicit Field3D(std::shared_ptr<const Grid3D> g) : grid_(std::move(g)), v_(grid_->size(), 0.0) {}
    const std::shared_ptr<const Grid3D>& grid() const { return grid_; }
    double& at(int ix, int iy, int iz) { return v_[grid_->idx(ix, iy, iz)]; }
    double at(int ix, int iy, int iz) const { return v_[grid_->idx(ix, iy, iz)]; }
    std::span<double> data() { return v_; }
    std::span<const double> data() const { return v_; }

private:
    std::shared_ptr<const Grid3D> grid_;
    std::vector<double> v_;
};

/// C_xyz = L_y^{-1}L_z^{-1}D_x + L_z^{-1}L_x^{-1}D_y + L_x^{-1}L_y^{-1}D_z and
/// D_xyz = 1 - L_x^{-1}L_y^{-1}L_z^{-1} on a box, reusing the 1D sweeps along
/// each axis. Homogeneous Dirichlet or periodic boundaries.
class AdiOperators3D {
public:
    AdiOperators3D(std::shared_ptr<const Grid3D> grid, double alpha,
                   QuadratureRule rule = QuadratureRule::quadratic)
        : grid_(std::move(grid)), alpha_(alpha)
    {
        for (int a = 0; a < 3; ++a) {
            const auto& c = grid_->coords[std::size_t(a)];
            lines_[std::size_t(a)] = LineGrid::embedded(c, c.front(), c.back(),
                                                        c[1] - c[0]);
            ws_[std::size_t(a)] = make_workspace(lines_[std::size_t(a)], alpha_, grid_->bc, rule);
            buf_in_[std::size_t(a)].resize(c.size());
            buf_out_[std::size_t(a)].resize(c.size());
        }
        t1_ = Field3D(grid_);
        t2_ = Field3D(grid_);
    }

    void linv(int axis, const Field3D& in, Field3D& out) const { sweep(axis, in, out, false); }
    void d_axis(int axis, const Field3D& in, Field3D& out) const { sweep(axis, in, out, true); }

    void apply_C(const Field3D& in, Field3D& out) const
    {
        auto o = out.data();
        std::fill(o.begin(), o.end(), 0.0);
        static constexpr int perp[3][2] = {{1, 2}, {2, 0}, {0, 1}};
        for (int a = 0; a < 3; ++a) {
            sweep(a, in, t1_, true);
            sweep(perp[a][0], t1_, t2_, false);
            sweep(perp[a][1], t2_, t1_, false);
            auto t = t1_.data();
            for (std::size_t i = 0; i < o.size(); ++i) o[i] += t[i];
        }
    }

    void apply_D(const Field3D& in, Field3D& out) const
    {
        sweep(2, in, t1_, false);
        sweep(1, t1_, t2_, false);
        sweep(0, t2_, t1_, false);
        auto o = out.data();
        auto u = in.data();
        auto t = t1_.data();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = u[i] - t[i];
    }

private:
    void sweep(int axis, const Field3D& in, Field3D& out, bool as_D) const
    {
        const auto& g = *grid_;
        const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
        const int count = g.n[std::size_t(axis)];
        auto& bi = buf_in_[std::size_t(axis)];
        auto& bo = buf_out_[std::size_t(axis)];
        const BoundarySpec bc = g.bc == BoundaryKind::periodic ? BoundarySpec::periodic()
                                                               : BoundarySpec::homogeneous();
        auto src = in.data();
        auto dst = out.data();
        const int na = axis == 0 ? ny : nx;
        const int nb = axis == 2 ? ny : nz;
        for (int b = 0; b < nb; ++b)
            for (int a = 0; a < na; ++a) {
                for (int k = 0; k < count; ++k) {
                    const std::size_t id = axis == 0   ? g.idx(k, a, b)
                                           : axis == 1 ? g.idx(a, k, b)
                                                       : g.idx(a, b, k);
                    bi[std::size_t(k)] = src[id];
                }
                std::span<const double> u(bi.data(), std::size_t(count));
                std::span<double> o(bo.data(), std::size_t(count));
                if (as_D)
                    apply_D_into(lines_[std::size_t(axis)], u, alpha_, ws_[std::size_t(axis)], bc, o);
                else
                    apply_Linv_into(lines_[std::size_t(axis)], u, alpha_, ws_[std::size_t(axis)], bc, o);
                for (int k = 0; k < count; ++k) {
                    const std::size_t id = axis == 0   ? g.idx(k, a, b)
                                           : axis == 1 ? g.idx(a, k, b)
                                                       : g.idx(a, b, k);
                    dst[id] = bo[std::size_t(k)];
                }
            }
    }

    std::shared_ptr<const Grid3D> grid_;
    double alpha_;
    std::array<LineGrid, 3> lines_;
    mutable std::array<ConvWorkspace, 3> ws_;
    mutable std::array<std::vector<double>, 3> buf_in_, buf_out_;
    mutable Field3D t1_, t2_;
};

} // namespace molt
