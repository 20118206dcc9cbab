#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "molt/errors.hpp"
#include "molt/field2d.hpp"
#include "molt/wave1d.hpp"
#include "molt/wave2d.hpp"

namespace molt {

/// Discrete energy sum_interior [ ((u^n - u^{n-1})/dt)^2 + c^2 |grad_h u^n|^2 ] dV,
/// with one-sided differences where a neighbor leaves the interior.
/// A bounded functional over long runs is the working proxy for A-stability.
inline double energy_functional(const Field2D& u_curr, const Field2D& u_prev, double dt, double c)
{
    const auto& g = *u_curr.grid();
    double e = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            if (!g.is_interior(ix, iy)) continue;
            const double ut = (u_curr(ix, iy) - u_prev(ix, iy)) / dt;

            const bool lok = ix > 0 && g.is_interior(ix - 1, iy);
            const bool rok = ix < g.nx - 1 && g.is_interior(ix + 1, iy);
            double gx = 0.0;
            if (lok && rok) gx = (u_curr(ix + 1, iy) - u_curr(ix - 1, iy)) / (2.0 * g.dx);
            else if (rok) gx = (u_curr(ix + 1, iy) - u_curr(ix, iy)) / g.dx;
            else if (lok) gx = (u_curr(ix, iy) - u_curr(ix - 1, iy)) / g.dx;

            const bool dok = iy > 0 && g.is_interior(ix, iy - 1);
            const bool uok = iy < g.ny - 1 && g.is_interior(ix, iy + 1);
            double gy = 0.0;
            if (dok && uok) gy = (u_curr(ix, iy + 1) - u_curr(ix, iy - 1)) / (2.0 * g.dy);
            else if (uok) gy = (u_curr(ix, iy + 1) - u_curr(ix, iy)) / g.dy;
            else if (dok) gy = (u_curr(ix, iy) - u_curr(ix, iy - 1)) / g.dy;

            e += (ut * ut + c * c * (gx * gx + gy * gy)) * g.cell_volume();
        }
    }
    return e;
}

/// 1D counterpart on a uniform line.
inline double energy_functional(const std::vector<double>& u_curr,
                                const std::vector<double>& u_prev, double dx, double dt, double c)
{
    const int n = static_cast<int>(u_curr.size());
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ut = (u_curr[std::size_t(i)] - u_prev[std::size_t(i)]) / dt;
        double gx = 0.0;
        if (i > 0 && i < n - 1)
            gx = (u_curr[std::size_t(i + 1)] - u_curr[std::size_t(i - 1)]) / (2.0 * dx);
        else if (i == 0) gx = (u_curr[1] - u_curr[0]) / dx;
        else gx = (u_curr[std::size_t(n - 1)] - u_curr[std::size_t(n - 2)]) / dx;
        e += (ut * ut + c * c * gx * gx) * dx;
    }
    return e;
}

/// Discrete L2 error against an exact solution, sqrt(sum (u - ue)^2 dV) over
/// the interior.
inline double l2_error(const Field2D& u, const std::function<double(double, double)>& exact)
{
    const auto& g = *u.grid();
    double s = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            if (!g.is_interior(ix, iy)) continue;
            const double d = u(ix, iy) - exact(g.xs[ix], g.ys[iy]);
            s += d * d;
        }
    return std::sqrt(s * g.cell_volume());
}

/// Bilinear interpolation of a field at a physical point; exterior and
/// out-of-box samples read as zero.
inline double sample_bilinear(const Field2D& u, double x, double y)
{
    const auto& g = *u.grid();
    const double fx = (x - g.x0) / g.dx;
    const double fy = (y - g.y0) / g.dy;
    const int ix = static_cast<int>(std::floor(fx));
    const int iy = static_cast<int>(std::floor(fy));
    if (ix < 0 || iy < 0 || ix + 1 >= g.nx || iy + 1 >= g.ny) return 0.0;
    const double tx = fx - ix, ty = fy - iy;
    auto at = [&](int i, int j) { return g.is_interior(i, j) ? u(i, j) : 0.0; };
    return (1.0 - tx) * (1.0 - ty) * at(ix, iy) + tx * (1.0 - ty) * at(ix + 1, iy) +
           (1.0 - tx) * ty * at(ix, iy + 1) + tx * ty * at(ix + 1, iy + 1);
}

/// Wavefront anisotropy: the outermost radial maximum of |u| is located on
/// 64 angular rays inside [r_lo, r_hi]; returns (max r - min r) / mean r.
/// Throws when no wavefront rises above one tenth of the field maximum.
inline double anisotropy_metric(const Field2D& u, double cx, double cy, double r_lo, double r_hi)
{
    const auto& g = *u.grid();
    const int sectors = 64;
    const double step = 0.25 * std::min(g.dx, g.dy);
    const int nr = static_cast<int>((r_hi - r_lo) / step);
    if (nr < 4) throw argument_error("anisotropy_metric: radius band too narrow");

    // sample all rays first; the detection threshold is relative to the
    // strongest amplitude inside the band (a forced source can dominate the
    // global maximum without touching the wavefront)
    std::vector<double> prof(std::size_t(sectors) * (std::size_t(nr) + 1));
    double band_max = 0.0;
    for (int s = 0; s < sectors; ++s) {
        const double theta = 2.0 * std::numbers::pi * (double(s) + 0.5) / double(sectors);
        const double dx = std::cos(theta), dy = std::sin(theta);
        for (int k = 0; k <= nr; ++k) {
            const double r = r_lo + step * double(k);
            const double v = std::abs(sample_bilinear(u, cx + r * dx, cy + r * dy));
            prof[std::size_t(s) * (std::size_t(nr) + 1) + std::size_t(k)] = v;
            band_max = std::max(band_max, v);
        }
    }
    if (band_max <= 0.0)
        throw numeric_error("anisotropy_metric: no signal inside the radius band");
    const double amp_floor = 0.1 * band_max;

    std::vector<double> radii;
    radii.reserve(sectors);
    for (int s = 0; s < sectors; ++s) {
        const double* p = prof.data() + std::size_t(s) * (std::size_t(nr) + 1);
        double found = -1.0;
        for (int k = nr - 1; k >= 1; --k) {
            const double v = p[k];
            if (v >= amp_floor && v >= p[k - 1] && v >= p[k + 1]) {
                found = r_lo + step * double(k);
                break;
            }
        }
        if (found < 0.0)
            throw numeric_error("anisotropy_metric: wavefront not detectable in sector " +
                                std::to_string(s));
        radii.push_back(found);
    }
    double rmin = radii[0], rmax = radii[0], rsum = 0.0;
    for (double r : radii) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        rsum += r;
    }
    return (rmax - rmin) / (rsum / double(sectors));
}

/// One row of a refinement study.
struct ErrorRecord {
    double dt = 0.0;
    double error = 0.0;
    double rate = std::numeric_limits<double>::quiet_NaN(); // defined from the 2nd row on
    double seconds = 0.0;
};

/// rate_i = log2(err_{i-1} / err_i) for successive rows.
inline void fill_rates(std::vector<ErrorRecord>& rows)
{
    for (std::size_t i = 1; i < rows.size(); ++i)
        rows[i].rate = std::log2(rows[i - 1].error / rows[i].error);
}

} // namespace molt
