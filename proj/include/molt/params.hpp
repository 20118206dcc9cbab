#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "molt/errors.hpp"

namespace molt {

/// Coefficient A_p(beta) of the order-2P three-level update,
///
///   A_p(beta) = 2 * sum_{m=1}^{p} (-1)^m beta^{2m}/(2m)! * binom(p-1, m-1).
///
/// Each term is produced from the previous one by a multiply/divide
/// recurrence, so no factorial or binomial is ever formed explicitly
/// (safe up to p = 10 and beyond).
inline double coefficient_A(int p, double beta)
{
    if (p < 1) throw argument_error("coefficient_A: p must be >= 1");
    if (beta < 0.0) throw argument_error("coefficient_A: beta must be >= 0");
    const double b2 = beta * beta;
    double term = -0.5 * b2; // m = 1: (-1) beta^2 / 2!
    double sum = term;
    for (int m = 1; m < p; ++m) {
        // term_{m+1} / term_m = -beta^2 (p - m) / ((2m+1)(2m+2) m)
        term *= -b2 * double(p - m) / (double(2 * m + 1) * double(2 * m + 2) * double(m));
        sum += term;
    }
    return 2.0 * sum;
}

/// Stability sum S(beta, Dhat) = -sum_{p=1}^{P} A_p(beta) Dhat^p.
/// The scheme is A-stable iff 0 <= S <= 4 for all Dhat in [0, 1].
inline double stability_sum(int P, double beta, double dhat)
{
    if (P < 1) throw argument_error("stability_sum: P must be >= 1");
    if (dhat < 0.0 || dhat > 1.0) throw argument_error("stability_sum: Dhat must be in [0, 1]");
    // Horner in dhat, highest power first.
    double s = 0.0;
    for (int p = P; p >= 1; --p)
        s = (s - coefficient_A(p, beta)) * dhat;
    // note: loop computes dhat * (-A_1 + dhat * (-A_2 + ...))
    return s;
}

/// Largest beta for which the order-2P scheme remains A-stable: the first
/// positive root of S(beta, 1) = 4. Found by a bracketing pre-scan in steps
/// of 0.01 on (0, 2] followed by bisection to 1e-10. S has a double root at
/// beta = 0 and its first crossing of 4 is simple, so bisection is safe.
inline double beta_max(int P)
{
    if (P < 1 || P > 10) throw argument_error("beta_max: P must be in [1, 10]");
    auto f = [P](double beta) { return stability_sum(P, beta, 1.0) - 4.0; };

    double lo = 0.0, hi = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double beta = 0.01 * k;
        if (f(beta) >= 0.0) {
            lo = 0.01 * (k - 1);
            hi = beta;
            break;
        }
    }
    if (hi == 0.0) throw numeric_error("beta_max: no sign change of S(beta,1) - 4 in (0, 2]");

    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0) hi = mid;
        else lo = mid;
    }
    // The lower endpoint keeps S(beta_max, 1) <= 4, so the returned value is
    // itself stable (the amplification factor stays on the unit circle).
    return lo;
}

/// Roots of the characteristic polynomial rho^2 - (2 - S) rho + 1 = 0 with
/// S = stability_sum(P, beta, dhat). Their product is 1, so the scheme is
/// stable exactly when both roots sit on the unit circle (0 <= S <= 4).
inline std::pair<std::complex<double>, std::complex<double>>
amplification_factor(int P, double beta, double dhat)
{
    if (beta <= 0.0) throw argument_error("amplification_factor: beta must be > 0");
    const double s = stability_sum(P, beta, dhat);
    const double h = 0.5 * (2.0 - s);
    const double disc = h * h - 1.0;
    if (disc <= 0.0) {
        const double im = std::sqrt(-disc);
        return {std::complex<double>(h, im), std::complex<double>(h, -im)};
    }
    const double re = std::sqrt(disc);
    return {std::complex<double>(h + re, 0.0), std::complex<double>(h - re, 0.0)};
}

/// Time-step parameters shared by every solver component.
/// alpha = beta / (c dt) is always derived, never stored independently.
struct SolverParams {
    double c = 1.0;     // wave speed
    double dt = 0.0;    // time step
    double beta = 0.0;  // dimensionless averaging parameter
    int order_P = 1;    // the scheme is accurate to order 2P

    SolverParams() = default;

    SolverParams(double c_, double dt_, double beta_, int order_P_)
        : c(c_), dt(dt_), beta(beta_), order_P(order_P_)
    {
        if (c <= 0.0) throw config_error("SolverParams: wave speed must be positive");
        if (dt <= 0.0) throw config_error("SolverParams: time step must be positive");
        if (order_P < 1) throw config_error("SolverParams: order parameter P must be >= 1");
        if (beta <= 0.0) throw config_error("SolverParams: beta must be positive");
        // slack covers the bisection tolerance of beta_max, so the exact
        // table values (e.g. beta = 2 for P = 1) are accepted
        const double bmax = beta_max(order_P);
        if (beta > bmax + 1e-9)
            throw config_error("SolverParams: beta = " + std::to_string(beta) +
                               " exceeds beta_max(" + std::to_string(order_P) + ") = " +
                               std::to_string(bmax));
    }

    /// beta defaults to beta_max(P): the truncation error constant decreases
    /// with increasing beta, so the largest stable value is the best one.
    static SolverParams with_default_beta(double c_, double dt_, int order_P_)
    {
        return SolverParams(c_, dt_, beta_max(order_P_), order_P_);
    }

    double alpha() const { return beta / (c * dt); }
};

/// Coefficient tables of the order-2P scheme.
///   a[p]    = A_p(beta)                                   (1D update)
///   c[p][m] = (-1)^m 2 beta^{2m}/(2m)! binom(p-1, m-1)    (C^m D^{p-m} terms)
///   b[p][m] = (-1)^m beta^{2m}/(2m+1)! binom(p-1, m-1)    (initial-step velocity terms)
/// All tables are 1-based in p and m; a[p] == sum_m c[p][m] by construction.
struct SchemeCoefficients {
    int P = 0;
    std::vector<double> a;                  // a[p], p = 1..P (a[0] unused)
    std::vector<std::vector<double>> c;     // c[p][m], m = 1..p
    std::vector<std::vector<double>> b;     // b[p][m], m = 1..p

    SchemeCoefficients() = default;

    SchemeCoefficients(int P_, double beta) : P(P_)
    {
        if (P < 1) throw argument_error("SchemeCoefficients: P must be >= 1");
        if (beta < 0.0) throw argument_error("SchemeCoefficients: beta must be >= 0");
        const double b2 = beta * beta;
        a.assign(P + 1, 0.0);
        c.assign(P + 1, {});
        b.assign(P + 1, {});
        for (int p = 1; p <= P; ++p) {
            c[p].assign(p + 1, 0.0);
            b[p].assign(p + 1, 0.0);
            double tc = -b2;       // c[p][1] = -2 beta^2/2!
            double tb = -b2 / 6.0; // b[p][1] = -beta^2/3!
            c[p][1] = tc;
            b[p][1] = tb;
            double sum = tc;
            for (int m = 1; m < p; ++m) {
                const double pm = double(p - m) / double(m);
                tc *= -b2 * pm / (double(2 * m + 1) * double(2 * m + 2));
                tb *= -b2 * pm / (double(2 * m + 2) * double(2 * m + 3));
                c[p][m + 1] = tc;
                b[p][m + 1] = tb;
                sum += tc;
            }
            a[p] = sum;
        }
    }
};

} // namespace molt
