#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "molt/errors.hpp"

namespace molt {

/// Level-set geometry: interior = { phi < 0 }.
struct ImplicitCurve {
    std::function<double(double, double)> phi;
    std::string name;

    static ImplicitCurve circle(double r, double cx = 0.0, double cy = 0.0)
    {
        return {[=](double x, double y) {
                    const double dx = x - cx, dy = y - cy;
                    return dx * dx + dy * dy - r * r;
                },
                "circle"};
    }

    /// Tilted ellipse ((x+y)/4)^2 + (x-y)^2 = 1; its principal axes run
    /// along y = +-x, so they never align with the sweep directions.
    static ImplicitCurve ellipse()
    {
        return {[](double x, double y) {
                    const double u = 0.25 * (x + y), v = x - y;
                    return u * u + v * v - 1.0;
                },
                "ellipse"};
    }

    static ImplicitCurve rectangle(double x0, double x1, double y0, double y1)
    {
        return {[=](double x, double y) {
                    return std::max(std::max(x0 - x, x - x1), std::max(y0 - y, y - y1));
                },
                "rectangle"};
    }
};

/// One maximal interior segment of a sweep line: contiguous interior nodes
/// bracketed by two boundary points. The boundary points may sit off-grid;
/// their distance to the nearest interior node is in (0, h].
struct EmbeddedLine {
    int axis = 0;             // 0: varies x at fixed y; 1: varies y at fixed x
    int perp_index = 0;
    double perp_coord = 0.0;
    int first = 0;            // first interior node index along the axis
    int count = 0;            // interior node count, >= 2
    double left_cross = 0.0;  // boundary point coordinates along the axis
    double right_cross = 0.0;
    double bc_left = 0.0;     // Dirichlet value slots
    double bc_right = 0.0;
};

struct EmbeddedGeometry {
    std::vector<EmbeddedLine> x_lines, y_lines;
    std::vector<uint8_t> interior; // nx * ny, row-major (iy * nx + ix)
};

namespace detail {

/// Bisection of a 1D restriction of phi to machine-limited coordinate
/// accuracy. lo sits on the phi >= 0 side, hi on the phi < 0 side.
inline double bisect_crossing(const std::function<double(double)>& phi, double lo, double hi)
{
    if (phi(lo) == 0.0) return lo;
    for (int it = 0; it < 100 && std::abs(hi - lo) > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid) >= 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct LineRun {
    int first, last;
    double left_cross, right_cross;
};

/// Scans one grid line for maximal interior runs and their boundary
/// crossings. Nodes within snap distance of the curve are reported through
/// `demote`; the returned flag says whether any were found (the caller
/// re-scans until none are).
template <class IsIn, class Phi1, class Demote>
bool scan_grid_line(const std::vector<double>& u, IsIn is_in, Phi1 phi1, Demote demote,
                    std::vector<LineRun>* runs)
{
    constexpr double snap_tol = 1e-3;
    const int n = static_cast<int>(u.size());
    bool demotions = false;
    int i = 0;
    while (i < n) {
        if (!is_in(i)) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && is_in(j + 1)) ++j;
        if (i == 0 || j == n - 1)
            throw config_error("build_embedded_lines: interior region reaches the bounding "
                               "box; enlarge the domain");

        // crossing next to node `in`, beyond which sits the exterior node `out`
        auto locate = [&](int in, int out, double h) {
            if (phi1(u[out]) < 0.0) return u[out]; // exterior only by demotion
            const double c = bisect_crossing(phi1, u[out], u[in]);
            return (std::abs(c - u[out]) < snap_tol * h) ? u[out] : c;
        };
        const double hl = u[i] - u[i - 1];
        const double hr = u[j + 1] - u[j];
        const double lc = locate(i, i - 1, hl);
        const double rc = locate(j, j + 1, hr);

        // an interior node essentially on the curve becomes a boundary point
        if (u[i] - lc < snap_tol * hl) {
            demote(i);
            demotions = true;
        }
        if (rc - u[j] < snap_tol * hr) {
            demote(j);
            demotions = true;
        }
        if (runs) runs->push_back({i, j, lc, rc});
        i = j + 1;
    }
    return demotions;
}

} // namespace detail

/// Intersects every grid line with the level set and builds per-axis line
/// collections plus the interior mask.
///
/// Crossings are located by sign change plus bisection. A crossing within
/// 1e-3 h of a grid node snaps to that node: onto an exterior node directly,
/// while an interior node that close to the curve is demoted to a boundary
/// point (applied globally so both sweep directions stay consistent).
/// Tangential grazing without a sign change contributes no crossing.
inline EmbeddedGeometry build_embedded_lines(const ImplicitCurve& curve,
                                             const std::vector<double>& xs,
                                             const std::vector<double>& ys)
{
    const int nx = static_cast<int>(xs.size());
    const int ny = static_cast<int>(ys.size());
    if (nx < 3 || ny < 3) throw argument_error("build_embedded_lines: grid too small");

    std::vector<uint8_t> demoted(std::size_t(nx) * ny, 0);
    auto inside = [&](int ix, int iy) {
        return curve.phi(xs[ix], ys[iy]) < 0.0 && !demoted[std::size_t(iy) * nx + ix];
    };

    auto sweep_all = [&](std::vector<detail::LineRun>* xr, std::vector<detail::LineRun>* yr,
                         std::vector<int>* x_of_run, std::vector<int>* y_of_run) {
        bool demotions = false;
        for (int iy = 0; iy < ny; ++iy) {
            auto phi1 = [&, iy](double x) { return curve.phi(x, ys[iy]); };
            std::vector<detail::LineRun> runs;
            demotions |= detail::scan_grid_line(
                xs, [&](int ix) { return inside(ix, iy); }, phi1,
                [&](int ix) { demoted[std::size_t(iy) * nx + ix] = 1; }, xr ? &runs : nullptr);
            if (xr)
                for (auto& r : runs) {
                    xr->push_back(r);
                    x_of_run->push_back(iy);
                }
        }
        for (int ix = 0; ix < nx; ++ix) {
            auto phi1 = [&, ix](double y) { return curve.phi(xs[ix], y); };
            std::vector<detail::LineRun> runs;
            demotions |= detail::scan_grid_line(
                ys, [&](int iy) { return inside(ix, iy); }, phi1,
                [&](int iy) { demoted[std::size_t(iy) * nx + ix] = 1; }, yr ? &runs : nullptr);
            if (yr)
                for (auto& r : runs) {
                    yr->push_back(r);
                    y_of_run->push_back(ix);
                }
        }
        return demotions;
    };

    // settle demotions, then collect
    int pass = 0;
    while (sweep_all(nullptr, nullptr, nullptr, nullptr)) {
        if (++pass > 4)
            throw numeric_error("build_embedded_lines: snapping did not settle; the geometry "
                                "is under-resolved");
    }
    std::vector<detail::LineRun> xruns, yruns;
    std::vector<int> xperp, yperp;
    sweep_all(&xruns, &yruns, &xperp, &yperp);

    EmbeddedGeometry geo;
    geo.interior.assign(std::size_t(nx) * ny, 0);

    for (std::size_t r = 0; r < xruns.size(); ++r) {
        const auto& run = xruns[r];
        const int iy = xperp[r];
        if (run.last - run.first + 1 < 2)
            throw config_error("build_embedded_lines: x-segment with fewer than 2 interior "
                               "nodes near (x, y) = (" + std::to_string(xs[run.first]) + ", " +
                               std::to_string(ys[iy]) + "); refine the grid");
        EmbeddedLine line;
        line.axis = 0;
        line.perp_index = iy;
        line.perp_coord = ys[iy];
        line.first = run.first;
        line.count = run.last - run.first + 1;
        line.left_cross = run.left_cross;
        line.right_cross = run.right_cross;
        geo.x_lines.push_back(line);
        for (int ix = run.first; ix <= run.last; ++ix)
            geo.interior[std::size_t(iy) * nx + ix] = 1;
    }
    for (std::size_t r = 0; r < yruns.size(); ++r) {
        const auto& run = yruns[r];
        const int ix = yperp[r];
        if (run.last - run.first + 1 < 2)
            throw config_error("build_embedded_lines: y-segment with fewer than 2 interior "
                               "nodes near (x, y) = (" + std::to_string(xs[ix]) + ", " +
                               std::to_string(ys[run.first]) + "); refine the grid");
        EmbeddedLine line;
        line.axis = 1;
        line.perp_index = ix;
        line.perp_coord = xs[ix];
        line.first = run.first;
        line.count = run.last - run.first + 1;
        line.left_cross = run.left_cross;
        line.right_cross = run.right_cross;
        geo.y_lines.push_back(line);
    }
    return geo;
}

} // namespace molt
