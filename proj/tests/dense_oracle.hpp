#pragma once

// Dense O(N^2) reference for the fast convolution: sums every cell's
// contribution to every target node with explicit decay products, using the
// same per-cell quadrature rules as the sweeps. Test-only; independent of
// the recursive evaluation path it checks.

#include <span>
#include <vector>

#include "molt/conv1d.hpp"

namespace molt_test {

inline std::vector<double> dense_convolve(const molt::LineGrid& line, std::span<const double> u,
                                          molt::ConvWorkspace& ws, double ua = 0.0,
                                          double ub = 0.0, double* I_a = nullptr,
                                          double* I_b = nullptr)
{
    using molt::detail::eval_rule;
    const int n = ws.n;
    std::vector<double> out(std::size_t(n), 0.0);
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        double D = 1.0;
        for (int i = j - 1; i >= 0; --i) {
            acc += D * eval_rule(ws.jl[std::size_t(i)], u, ua, ub);
            D *= ws.decay[std::size_t(i)];
        }
        if (ws.left_gap) acc += D * eval_rule(ws.gl, u, ua, ub);
        D = 1.0;
        for (int i = j; i < n - 1; ++i) {
            acc += D * eval_rule(ws.jr[std::size_t(i)], u, ua, ub);
            D *= ws.decay[std::size_t(i)];
        }
        if (ws.right_gap) acc += D * eval_rule(ws.gr, u, ua, ub);
        out[std::size_t(j)] = acc;
    }
    if (I_a) {
        double D = ws.left_gap ? ws.gap_decay_l : 1.0;
        double acc = ws.left_gap ? eval_rule(ws.gla, u, ua, ub) : 0.0;
        for (int i = 0; i < n - 1; ++i) {
            acc += D * eval_rule(ws.jr[std::size_t(i)], u, ua, ub);
            D *= ws.decay[std::size_t(i)];
        }
        if (ws.right_gap) acc += D * eval_rule(ws.gr, u, ua, ub);
        *I_a = acc;
    }
    if (I_b) {
        double D = ws.right_gap ? ws.gap_decay_r : 1.0;
        double acc = ws.right_gap ? eval_rule(ws.grb, u, ua, ub) : 0.0;
        for (int i = n - 2; i >= 0; --i) {
            acc += D * eval_rule(ws.jl[std::size_t(i)], u, ua, ub);
            D *= ws.decay[std::size_t(i)];
        }
        if (ws.left_gap) acc += D * eval_rule(ws.gl, u, ua, ub);
        *I_b = acc;
    }
    return out;
}

} // namespace molt_test
