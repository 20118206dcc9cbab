#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "molt/conv1d.hpp"
#include "molt/errors.hpp"
#include "molt/field2d.hpp"

namespace molt {

/// Stage storage for the operator-reuse recursion. After stage p,
/// v[j-1] holds C^{p+1-j} D^{j-1} [u] for j = 1..p, built with one fresh
/// operator application per slot and stage.
struct StageTable {
    std::vector<Field2D> v;
    int stage = 0;
};

/// Dimensionally split operators on a tensor grid:
///   L_gamma^{-1} per axis, C = L_y^{-1} D_x + L_x^{-1} D_y,
///   D = 1 - L_x^{-1} L_y^{-1}.
/// Boundary values for the intermediate operands are the lines' Dirichlet
/// slots (zero for the homogeneous problems driven here); periodic grids
/// need none. An instance owns per-line workspaces and scratch fields, so
/// it must not be shared between threads; distinct instances may run
/// concurrently.
class AdiOperators {
public:
    AdiOperators(std::shared_ptr<const Grid2D> grid, double alpha,
                 QuadratureRule rule = QuadratureRule::quadratic, bool symmetrize = false)
        : grid_(std::move(grid)),
          alpha_(alpha),
          symmetrize_(symmetrize),
          tmp1_(grid_),
          tmp2_(grid_),
          tmp3_(grid_),
          stage_scratch_(grid_)
    {
        const auto& g = *grid_;
        xlg_.reserve(g.x_lines.size());
        xws_.reserve(g.x_lines.size());
        for (const auto& line : g.x_lines) {
            std::vector<double> nodes(g.xs.begin() + line.first,
                                      g.xs.begin() + line.first + line.count);
            LineGrid lg = LineGrid::embedded(std::move(nodes), line.left_cross,
                                             line.right_cross, g.dx);
            xws_.push_back(make_workspace(lg, alpha_, g.bc, rule));
            xlg_.push_back(std::move(lg));
        }
        ylg_.reserve(g.y_lines.size());
        yws_.reserve(g.y_lines.size());
        for (const auto& line : g.y_lines) {
            std::vector<double> nodes(g.ys.begin() + line.first,
                                      g.ys.begin() + line.first + line.count);
            LineGrid lg = LineGrid::embedded(std::move(nodes), line.left_cross,
                                             line.right_cross, g.dy);
            yws_.push_back(make_workspace(lg, alpha_, g.bc, rule));
            ylg_.push_back(std::move(lg));
        }
        ybuf_in_.resize(g.ny);
        ybuf_out_.resize(g.ny);
    }

    const std::shared_ptr<const Grid2D>& grid() const { return grid_; }
    double alpha() const { return alpha_; }
    bool symmetrize() const { return symmetrize_; }

    /// Largest residual of the 2x2 boundary-correction solves since the last
    /// reset; the corrections are exact to round-off when healthy.
    double boundary_residual() const { return residual_; }
    void reset_boundary_residual() { residual_ = 0.0; }

    /// Count of C/D applications (the Table-2 bookkeeping unit).
    long operator_applications() const { return op_count_; }
    void reset_operator_count() { op_count_ = 0; }

    void linv_x(const Field2D& in, Field2D& out) const { sweep_x(in, out, false); }
    void linv_y(const Field2D& in, Field2D& out) const { sweep_y(in, out, false); }
    void d_x(const Field2D& in, Field2D& out) const { sweep_x(in, out, true); }
    void d_y(const Field2D& in, Field2D& out) const { sweep_y(in, out, true); }

    /// C[u] = L_y^{-1}[D_x u] + L_x^{-1}[D_y u]. The two orderings are
    /// already mirror images, so C needs no symmetrization.
    void apply_C(const Field2D& in, Field2D& out) const
    {
        sweep_x(in, tmp1_, true);
        sweep_y(tmp1_, out, false);
        sweep_y(in, tmp1_, true);
        sweep_x(tmp1_, tmp2_, false);
        auto o = out.data();
        auto t = tmp2_.data();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] += t[i];
        ++op_count_;
    }

    /// D[u] = u - L_x^{-1}[L_y^{-1} u]; with symmetrize on, the composition
    /// is replaced by the average of both axis orderings.
    void apply_D(const Field2D& in, Field2D& out) const
    {
        sweep_y(in, tmp1_, false);
        sweep_x(tmp1_, tmp2_, false);
        auto o = out.data();
        auto u = in.data();
        auto t = tmp2_.data();
        if (!symmetrize_) {
            for (std::size_t i = 0; i < o.size(); ++i) o[i] = u[i] - t[i];
        } else {
            sweep_x(in, tmp1_, false);
            sweep_y(tmp1_, tmp3_, false);
            auto s = tmp3_.data();
            for (std::size_t i = 0; i < o.size(); ++i)
                o[i] = u[i] - 0.5 * (t[i] + s[i]);
        }
        ++op_count_;
    }

    Field2D apply_C(const Field2D& in) const
    {
        Field2D out(grid_);
        apply_C(in, out);
        return out;
    }

    Field2D apply_D(const Field2D& in) const
    {
        Field2D out(grid_);
        apply_D(in, out);
        return out;
    }

    Field2D linv_x(const Field2D& in) const
    {
        Field2D out(grid_);
        linv_x(in, out);
        return out;
    }

    Field2D linv_y(const Field2D& in) const
    {
        Field2D out(grid_);
        linv_y(in, out);
        return out;
    }

    /// Stage 1 of the reuse recursion: v_1 = C[u].
    void stage_init(const Field2D& u, StageTable& table) const
    {
        if (table.v.empty()) table.v.emplace_back(grid_);
        apply_C(u, table.v[0]);
        table.stage = 1;
    }

    /// Stage p: v_p = D[v_{p-1}], then v_j := C[v_j] for j < p.
    /// One fresh C or D application per slot (p applications total).
    void stage_advance(StageTable& table) const
    {
        const int p = table.stage + 1;
        if (static_cast<int>(table.v.size()) < p) table.v.emplace_back(grid_);
        apply_D(table.v[std::size_t(p - 2)], table.v[std::size_t(p - 1)]);
        for (int j = p - 2; j >= 0; --j) {
            apply_C(table.v[std::size_t(j)], stage_scratch_);
            std::swap(table.v[std::size_t(j)], stage_scratch_);
        }
        table.stage = p;
    }

    StageTable build_stage_table(const Field2D& u, int P) const
    {
        if (P < 1) throw argument_error("build_stage_table: P must be >= 1");
        StageTable table;
        stage_init(u, table);
        for (int p = 2; p <= P; ++p) stage_advance(table);
        return table;
    }

private:
    void sweep_x(const Field2D& in, Field2D& out, bool as_D) const
    {
        const auto& g = *grid_;
        auto src = in.data();
        auto dst = out.data();
        for (std::size_t li = 0; li < xlg_.size(); ++li) {
            const auto& meta = g.x_lines[li];
            const std::size_t off = std::size_t(meta.perp_index) * g.nx + meta.first;
            std::span<const double> u = src.subspan(off, std::size_t(meta.count));
            std::span<double> o = dst.subspan(off, std::size_t(meta.count));
            const BoundarySpec bc = g.bc == BoundaryKind::periodic
                                        ? BoundarySpec::periodic()
                                        : BoundarySpec::dirichlet(meta.bc_left, meta.bc_right);
            LinvDiagnostics diag;
            if (as_D)
                apply_D_into(xlg_[li], u, alpha_, xws_[li], bc, o, 0.0, 0.0, &diag);
            else
                apply_Linv_into(xlg_[li], u, alpha_, xws_[li], bc, o, 0.0, 0.0, &diag);
            residual_ = std::max({residual_, diag.residual_left, diag.residual_right});
        }
    }

    void sweep_y(const Field2D& in, Field2D& out, bool as_D) const
    {
        const auto& g = *grid_;
        if (g.ny == 1 || ylg_.empty()) {
            // degenerate 1D field: L_y^{-1} is the identity, D_y vanishes
            auto src = in.data();
            auto dst = out.data();
            for (std::size_t i = 0; i < src.size(); ++i) dst[i] = as_D ? 0.0 : src[i];
            return;
        }
        auto src = in.data();
        auto dst = out.data();
        for (std::size_t li = 0; li < ylg_.size(); ++li) {
            const auto& meta = g.y_lines[li];
            const int n = meta.count;
            for (int k = 0; k < n; ++k)
                ybuf_in_[std::size_t(k)] =
                    src[std::size_t(meta.first + k) * g.nx + meta.perp_index];
            std::span<const double> u(ybuf_in_.data(), std::size_t(n));
            std::span<double> o(ybuf_out_.data(), std::size_t(n));
            const BoundarySpec bc = g.bc == BoundaryKind::periodic
                                        ? BoundarySpec::periodic()
                                        : BoundarySpec::dirichlet(meta.bc_left, meta.bc_right);
            LinvDiagnostics diag;
            if (as_D)
                apply_D_into(ylg_[li], u, alpha_, yws_[li], bc, o, 0.0, 0.0, &diag);
            else
                apply_Linv_into(ylg_[li], u, alpha_, yws_[li], bc, o, 0.0, 0.0, &diag);
            residual_ = std::max({residual_, diag.residual_left, diag.residual_right});
            for (int k = 0; k < n; ++k)
                dst[std::size_t(meta.first + k) * g.nx + meta.perp_index] =
                    ybuf_out_[std::size_t(k)];
        }
    }

    std::shared_ptr<const Grid2D> grid_;
    double alpha_;
    bool symmetrize_;
    std::vector<LineGrid> xlg_, ylg_;
    mutable std::vector<ConvWorkspace> xws_, yws_;
    mutable std::vector<double> ybuf_in_, ybuf_out_;
    mutable Field2D tmp1_, tmp2_, tmp3_, stage_scratch_;
    mutable double residual_ = 0.0;
    mutable long op_count_ = 0;
};

} // namespace molt
