#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "molt/conv1d.hpp"
#include "molt/errors.hpp"
#include "molt/line.hpp"
#include "molt/params.hpp"

namespace molt {

namespace detail {

/// Fornberg's algorithm: weights w[j] with f^{(m)}(x0) ~= sum_j w[j] f(x[j]).
inline std::vector<double> fd_weights(double x0, std::span<const double> x, int m)
{
    const int n = static_cast<int>(x.size()) - 1;
    if (n < m) throw argument_error("fd_weights: need at least m+1 points");
    std::vector<std::vector<double>> C(n + 1, std::vector<double>(m + 1, 0.0));
    C[0][0] = 1.0;
    double c1 = 1.0;
    double c4 = x[0] - x0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C[i][k] = c1 * (k * C[i - 1][k - 1] - c5 * C[i - 1][k]) / c2;
                C[i][0] = -c1 * c5 * C[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                C[j][k] = (c4 * C[j][k] - k * C[j][k - 1]) / c3;
            C[j][0] = c4 * C[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int j = 0; j <= n; ++j) w[j] = C[j][m];
    return w;
}

} // namespace detail

/// Time-dependent Dirichlet data for one line. deriv-style closures return
/// d^{order} u_L / dt^{order} at time t for even orders 0, 2, ..., up to
/// 2(P-1) -- the inverse Lax-Wendroff machinery never asks for more.
struct DirichletData1D {
    std::function<double(int, double)> left;
    std::function<double(int, double)> right;
    int max_order = 1 << 20;

    static DirichletData1D homogeneous()
    {
        auto zero = [](int, double) { return 0.0; };
        return {zero, zero};
    }

    static DirichletData1D constant(double l, double r)
    {
        return {[l](int order, double) { return order == 0 ? l : 0.0; },
                [r](int order, double) { return order == 0 ? r : 0.0; }};
    }

    /// u_L(t) = amp * sin(omega t + phase), all derivatives analytic.
    static std::function<double(int, double)> harmonic(double amp, double omega, double phase = 0.0)
    {
        return [=](int order, double t) {
            const int m = order / 2;
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            return amp * sign * std::pow(omega, order) * std::sin(omega * t + phase);
        };
    }

    /// Finite-difference fallback for tabulated data: centered Fornberg
    /// stencils of accuracy >= acc evaluated at the exact query time.
    static std::function<double(int, double)>
    tabulated(std::vector<double> samples, double t0, double dts, int acc = 4)
    {
        return [samples = std::move(samples), t0, dts, acc](int order, double t) {
            const int n = static_cast<int>(samples.size());
            const int width = order + acc + 1;
            if (width > n) throw config_error("DirichletData1D: derivative unavailable from samples");
            int center = static_cast<int>(std::lround((t - t0) / dts));
            int first = std::clamp(center - width / 2, 0, n - width);
            std::vector<double> tx(width);
            for (int i = 0; i < width; ++i) tx[i] = t0 + dts * double(first + i);
            auto w = detail::fd_weights(t, tx, order);
            double s = 0.0;
            for (int i = 0; i < width; ++i) s += w[i] * samples[first + i];
            return s;
        };
    }
};

/// Boundary values carried by the operand of the m-th recursive D
/// application: D^m[u] ~ (-1)^m (dt/beta)^{2m} d^{2m}u_L/dt^{2m} at the wall.
inline std::pair<double, double> boundary_values_ILW(const DirichletData1D& data, int m,
                                                     double t, const SolverParams& params)
{
    if (m < 0 || m > params.order_P - 1)
        throw argument_error("boundary_values_ILW: require 0 <= m <= P-1");
    if (2 * m > data.max_order)
        throw config_error("boundary_values_ILW: boundary derivative of order " +
                           std::to_string(2 * m) + " unavailable");
    if (m == 0) return {data.left(0, t), data.right(0, t)};
    const double r = params.dt / params.beta;
    double f = std::pow(r, 2 * m);
    if (m % 2 == 1) f = -f;
    return {f * data.left(2 * m, t), f * data.right(2 * m, t)};
}

/// Initial condition u(x,0) = f, u_t(x,0) = g. Samplers are mandatory;
/// the optional closures give analytic even spatial derivatives
/// (order, x) -> d^{order} f / dx^{order} and enable the exact route of the
/// high-order first step.
struct InitialData1D {
    std::function<double(double)> f;
    std::function<double(double)> g; // null means g == 0
    std::function<double(int, double)> f_deriv;
    std::function<double(int, double)> g_deriv;
};

/// Three-level solution state plus the sentinel reference amplitude.
struct WaveState1D {
    std::vector<double> u_prev, u_curr;
    int n = 0;
    double t = 0.0;
};

/// The 1D scheme of order 2P: u^{n+1} = 2u^n - u^{n-1} + sum_p A_p D^p[u^n],
/// with D applied recursively and inverse Lax-Wendroff boundary values at
/// every level.
class WaveSolver1D {
public:
    WaveSolver1D(LineGrid line, SolverParams params, BoundaryKind kind,
                 DirichletData1D bdata = DirichletData1D::homogeneous(),
                 QuadratureRule rule = QuadratureRule::quadratic)
        : line_(std::move(line)),
          params_(params),
          kind_(kind),
          bdata_(std::move(bdata)),
          coeffs_(params.order_P, params.beta),
          ws_(make_workspace(line_, params.alpha(), kind, rule))
    {
        const int n = line_.size();
        state_.u_prev.assign(n, 0.0);
        state_.u_curr.assign(n, 0.0);
        v_.assign(n, 0.0);
        vnext_.assign(n, 0.0);
        acc_.assign(n, 0.0);
    }

    const LineGrid& line() const { return line_; }
    const SolverParams& params() const { return params_; }
    const WaveState1D& state() const { return state_; }
    const std::vector<double>& current() const { return state_.u_curr; }
    const std::vector<double>& previous() const { return state_.u_prev; }
    double time() const { return state_.t; }
    int step_index() const { return state_.n; }
    double boundary_residual() const { return boundary_residual_; }

    void set_state(std::vector<double> u_prev, std::vector<double> u_curr, int n, double t)
    {
        const std::size_t sz = std::size_t(line_.size());
        if (u_prev.size() != sz || u_curr.size() != sz)
            throw argument_error("WaveSolver1D::set_state: array length must match the grid");
        state_.u_prev = std::move(u_prev);
        state_.u_curr = std::move(u_curr);
        state_.n = n;
        state_.t = t;
        ref_amp_ = std::max(max_abs(state_.u_prev), max_abs(state_.u_curr));
    }

    /// Builds u^0 = f and the order-matched first step u^1. Parts with
    /// analytic derivative closures use them directly; the rest realize
    /// d^{2m}/dx^{2m} through the recursive convolution series. The
    /// convolution route assumes homogeneous boundary data for the velocity
    /// part (exact for periodic and homogeneous Dirichlet runs).
    void initialize(const InitialData1D& init)
    {
        const int n = line_.size();
        const int P = params_.order_P;
        const double cdt = params_.c * params_.dt;

        std::vector<double> u0(n), u1(n, 0.0);
        for (int i = 0; i < n; ++i) u0[i] = init.f(line_.nodes[i]);

        if (init.f_deriv) {
            for (int i = 0; i < n; ++i) {
                const double x = line_.nodes[i];
                double fac = 1.0, s = init.f_deriv(0, x);
                for (int m = 1; m <= P; ++m) {
                    fac *= cdt * cdt / (double(2 * m - 1) * double(2 * m));
                    s += fac * init.f_deriv(2 * m, x);
                }
                u1[i] += s;
            }
        } else {
            // u1 += f + (1/2) sum_p A_p D^p[f]
            for (int i = 0; i < n; ++i) u1[i] += u0[i];
            std::vector<double> dp = u0;
            for (int p = 1; p <= P; ++p) {
                apply_level(dp, vnext_, p, 0.0);
                dp.swap(vnext_);
                for (int i = 0; i < n; ++i) u1[i] += 0.5 * coeffs_.a[p] * dp[i];
            }
        }

        if (init.g) {
            if (init.g_deriv) {
                for (int i = 0; i < n; ++i) {
                    const double x = line_.nodes[i];
                    double fac = params_.dt, s = fac * init.g_deriv(0, x);
                    for (int m = 1; m <= P; ++m) {
                        fac *= cdt * cdt / (double(2 * m) * double(2 * m + 1));
                        s += fac * init.g_deriv(2 * m, x);
                    }
                    u1[i] += s;
                }
            } else {
                std::vector<double> g0(n);
                for (int i = 0; i < n; ++i) g0[i] = init.g(line_.nodes[i]);
                for (int i = 0; i < n; ++i) u1[i] += params_.dt * g0[i];
                std::vector<double> dp = g0;
                const BoundarySpec bc = kind_ == BoundaryKind::periodic
                                            ? BoundarySpec::periodic()
                                            : BoundarySpec::homogeneous();
                for (int p = 1; p <= P; ++p) {
                    double Bp = 0.0;
                    for (int m = 1; m <= p; ++m) Bp += coeffs_.b[p][m];
                    apply_D_into(line_, dp, params_.alpha(), ws_, bc, vnext_);
                    dp.swap(vnext_);
                    for (int i = 0; i < n; ++i) u1[i] += params_.dt * Bp * dp[i];
                }
            }
        }

        if (kind_ == BoundaryKind::dirichlet && !line_.left_off_grid() && !line_.right_off_grid()) {
            u1.front() = bdata_.left(0, params_.dt);
            u1.back() = bdata_.right(0, params_.dt);
        }
        set_state(std::move(u0), std::move(u1), 1, params_.dt);
    }

    /// One step of the order-2P update. Cost O(P N).
    void step()
    {
        const int n = line_.size();
        const int P = params_.order_P;
        const double t_now = state_.t;

        std::copy(state_.u_curr.begin(), state_.u_curr.end(), v_.begin());
        std::fill(acc_.begin(), acc_.end(), 0.0);
        boundary_residual_ = 0.0;

        for (int p = 1; p <= P; ++p) {
            LinvDiagnostics diag;
            apply_level(v_, vnext_, p, t_now, &diag);
            v_.swap(vnext_);
            boundary_residual_ = std::max({boundary_residual_, diag.residual_left,
                                           diag.residual_right});
            const double ap = coeffs_.a[p];
            for (int i = 0; i < n; ++i) acc_[i] += ap * v_[i];
        }

        auto& unext = vnext_;
        for (int i = 0; i < n; ++i)
            unext[i] = 2.0 * state_.u_curr[i] - state_.u_prev[i] + acc_[i];

        if (kind_ == BoundaryKind::dirichlet && !line_.left_off_grid() && !line_.right_off_grid()) {
            unext.front() = bdata_.left(0, t_now + params_.dt);
            unext.back() = bdata_.right(0, t_now + params_.dt);
        }

        const double m = max_abs(unext);
        if (ref_amp_ == 0.0) ref_amp_ = m;
        else if (m > 1e6 * ref_amp_)
            throw numeric_error("WaveSolver1D: instability sentinel tripped at step " +
                                std::to_string(state_.n + 1) + " (max |u| = " +
                                std::to_string(m) + ", reference " + std::to_string(ref_amp_) + ")");

        state_.u_prev.swap(state_.u_curr);
        state_.u_curr.swap(unext);
        state_.n += 1;
        state_.t += params_.dt;
    }

private:
    /// Applies v_p = D[v_{p-1}] with the level-p boundary correction: the
    /// output of L^{-1}[v_{p-1}] takes the values bval(p-1) - bval(p), the
    /// inverse Lax-Wendroff data of the two adjacent operator levels
    /// (bval(P) is beyond the data contract and of size O(dt^{2P}); dropped).
    void apply_level(const std::vector<double>& vin, std::vector<double>& vout, int p,
                     double t, LinvDiagnostics* diag = nullptr)
    {
        BoundarySpec bc = BoundarySpec::periodic();
        if (kind_ == BoundaryKind::dirichlet) {
            auto [lo_l, lo_r] = boundary_values_ILW(bdata_, p - 1, t, params_);
            double hi_l = 0.0, hi_r = 0.0;
            if (p <= params_.order_P - 1)
                std::tie(hi_l, hi_r) = boundary_values_ILW(bdata_, p, t, params_);
            bc = BoundarySpec::dirichlet(lo_l - hi_l, lo_r - hi_r);
        }
        apply_D_into(line_, vin, params_.alpha(), ws_, bc, vout, 0.0, 0.0, diag);
    }

    static double max_abs(const std::vector<double>& v)
    {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }

    LineGrid line_;
    SolverParams params_;
    BoundaryKind kind_;
    DirichletData1D bdata_;
    SchemeCoefficients coeffs_;
    ConvWorkspace ws_;
    WaveState1D state_;
    std::vector<double> v_, vnext_, acc_;
    double ref_amp_ = 0.0;
    double boundary_residual_ = 0.0;
};

} // namespace molt
