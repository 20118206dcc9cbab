#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "molt/errors.hpp"
#include "molt/line.hpp"

namespace molt {

/// Local quadrature used for the per-cell integrals of the fast convolution.
///
/// linear:    the operand is linearly interpolated on each cell and the
///            interpolant is integrated exactly against the exponential
///            kernel. Second order at fixed CFL.
/// quadratic: three-point (centered) quadratic interpolation, again
///            integrated exactly. Second order in Dx with a symbol error
///            that stays small when the time step is refined while the mesh
///            is held fixed; this is the production default.
enum class QuadratureRule { linear, quadratic };

namespace detail {

/// m1(nu) = (1 - (1 + nu) e^{-nu}) / nu, series-evaluated below nu = 0.5
/// where the direct form cancels catastrophically.
inline double moment_m1(double nu)
{
    if (nu >= 0.5) return (1.0 - (1.0 + nu) * std::exp(-nu)) / nu;
    double term = 0.5 * nu; // k = 1
    double sum = term;
    for (int k = 1; k < 30; ++k) {
        term *= -nu * double(k + 1) / (double(k) * double(k + 2));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

/// m2(nu) = (2 - (nu^2 + 2 nu + 2) e^{-nu}) / nu^2, same branching.
inline double moment_m2(double nu)
{
    if (nu >= 0.5) return (2.0 - (nu * nu + 2.0 * nu + 2.0) * std::exp(-nu)) / (nu * nu);
    double term = nu / 3.0; // k = 1
    double sum = term;
    for (int k = 1; k < 30; ++k) {
        term *= -nu * double(k + 2) / (double(k) * double(k + 3));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

/// Kernel moments over one cell of width w:
///   M_k = (alpha/2) \int_0^w e^{-alpha t} t^k dt,  k = 0, 1, 2.
struct CellMoments {
    double M0, M1, M2;
};

inline CellMoments cell_moments(double alpha, double w)
{
    const double nu = alpha * w;
    CellMoments m;
    m.M0 = -0.5 * std::expm1(-nu);
    m.M1 = 0.5 * w * moment_m1(nu);
    m.M2 = 0.5 * w * w * moment_m2(nu);
    return m;
}

/// Quadrature rule for one cell: up to three weights applied to operand
/// values at the listed node indices. Index -1 refers to the operand value
/// at the left boundary point, -2 at the right boundary point.
struct CellRule {
    double w0 = 0.0, w1 = 0.0, w2 = 0.0;
    int i0 = 0, i1 = 0, i2 = 0;
};

/// Exponential-exact weights for a 3-point quadratic interpolant.
/// tau_k are the stencil coordinates in the local kernel variable
/// (tau = distance from the target endpoint, increasing away from it);
/// the cell occupies tau in [0, w].
inline CellRule quadratic_rule(double alpha, double w, double tau0, double tau1, double tau2,
                               int i0, int i1, int i2)
{
    const CellMoments m = cell_moments(alpha, w);
    auto lagrange = [&](double ti, double ta, double tb) {
        return (m.M2 - (ta + tb) * m.M1 + ta * tb * m.M0) / ((ti - ta) * (ti - tb));
    };
    CellRule r;
    r.w0 = lagrange(tau0, tau1, tau2);
    r.w1 = lagrange(tau1, tau0, tau2);
    r.w2 = lagrange(tau2, tau0, tau1);
    r.i0 = i0;
    r.i1 = i1;
    r.i2 = i2;
    return r;
}

/// Linear rule on the cell's own endpoints (tau = 0 and tau = w). Evaluates
/// the weight expressions by a 4-term Taylor series below nu = 1e-3, where
/// (1 - e^{-nu})/nu - e^{-nu} cancels.
inline CellRule linear_rule(double alpha, double w, int i_target, int i_far)
{
    const double nu = alpha * w;
    CellRule r;
    if (nu < 1e-3) {
        const double nu2 = nu * nu;
        r.w0 = 0.5 * (nu / 2.0 - nu2 / 6.0 + nu2 * nu / 24.0 - nu2 * nu2 / 120.0);
        r.w1 = 0.5 * (nu / 2.0 - nu2 / 3.0 + nu2 * nu / 8.0 - nu2 * nu2 / 30.0);
    } else {
        const double d = std::exp(-nu);
        const double q = (1.0 - d) / nu;
        r.w0 = 0.5 * (1.0 - q);
        r.w1 = 0.5 * (q - d);
    }
    r.i0 = i_target;
    r.i1 = i_far;
    r.i2 = i_far; // unused (weight 0)
    r.w2 = 0.0;
    return r;
}

} // namespace detail

/// Precomputed sweep data for one (line, alpha) pair plus scratch arrays.
/// Weights depend only on the geometry and alpha and are reused across time
/// steps; the scratch makes a workspace unshareable between concurrent calls.
struct ConvWorkspace {
    double alpha = 0.0;
    QuadratureRule rule = QuadratureRule::quadratic;
    BoundaryKind kind = BoundaryKind::periodic;
    int n = 0;
    double a = 0.0, b = 0.0;

    std::vector<double> decay;       // e^{-alpha h_i} per cell
    std::vector<detail::CellRule> jl; // J^L at node i+1 over cell i
    std::vector<detail::CellRule> jr; // J^R at node i over cell i

    bool left_gap = false, right_gap = false;
    double gap_decay_l = 1.0, gap_decay_r = 1.0;
    detail::CellRule gl, gla, gr, grb;

    double one_minus_mu = 0.0;       // 1 - e^{-alpha (b-a)}
    std::vector<double> efrom_a;     // e^{-alpha (x_i - a)}
    std::vector<double> eto_b;       // e^{-alpha (b - x_i)}

    std::vector<double> IL, IR;      // scratch
};

namespace detail {

inline void check_workspace(const LineGrid& line, double alpha, const ConvWorkspace& ws)
{
    if (ws.n != line.size() || ws.alpha != alpha ||
        ws.a != line.left_boundary || ws.b != line.right_boundary)
        throw internal_error("conv1d: workspace does not match (alpha, line)");
}

} // namespace detail

inline ConvWorkspace make_workspace(const LineGrid& line, double alpha, BoundaryKind kind,
                                    QuadratureRule rule = QuadratureRule::quadratic)
{
    using detail::CellRule;
    if (alpha <= 0.0) throw argument_error("make_workspace: alpha must be positive");
    line.validate();
    const auto& x = line.nodes;
    const int n = line.size();
    if (kind == BoundaryKind::periodic && (line.left_off_grid() || line.right_off_grid()))
        throw argument_error("make_workspace: periodic lines cannot have off-grid endpoints");

    ConvWorkspace ws;
    ws.alpha = alpha;
    ws.rule = rule;
    ws.kind = kind;
    ws.n = n;
    ws.a = line.left_boundary;
    ws.b = line.right_boundary;
    ws.left_gap = line.left_off_grid();
    ws.right_gap = line.right_off_grid();

    ws.decay.resize(n - 1);
    ws.jl.resize(n - 1);
    ws.jr.resize(n - 1);

    const bool quad = (rule == QuadratureRule::quadratic);

    for (int i = 0; i < n - 1; ++i) {
        const double w = x[i + 1] - x[i];
        ws.decay[i] = std::exp(-alpha * w);

        // J^L at node i+1: kernel variable tau = x_{i+1} - y.
        {
            int out = -100;
            double out_coord = 0.0;
            if (i + 2 <= n - 1) {
                out = i + 2;
                out_coord = x[i + 2];
            } else if (ws.right_gap) {
                out = -2;
                out_coord = line.right_boundary;
            } else if (kind == BoundaryKind::periodic) {
                out = 1; // node 0 duplicates node n-1
                out_coord = x[n - 1] + (x[1] - x[0]);
            } else if (n >= 3) {
                out = i - 1;
                out_coord = x[i - 1];
            }
            // a third point nearly coincident with a cell endpoint makes the
            // Lagrange weights blow up; the quadratic adds nothing there
            const double t2 = (out == -100) ? 0.0 : x[i + 1] - out_coord;
            if (quad && out != -100 &&
                std::abs(t2) > 1e-3 * w && std::abs(t2 - w) > 1e-3 * w)
                ws.jl[i] = detail::quadratic_rule(alpha, w, 0.0, w, t2, i + 1, i, out);
            else
                ws.jl[i] = detail::linear_rule(alpha, w, i + 1, i);
        }

        // J^R at node i: tau = y - x_i.
        {
            int out = -100;
            double out_coord = 0.0;
            if (i - 1 >= 0) {
                out = i - 1;
                out_coord = x[i - 1];
            } else if (ws.left_gap) {
                out = -1;
                out_coord = line.left_boundary;
            } else if (kind == BoundaryKind::periodic) {
                out = n - 2;
                out_coord = x[0] - (x[n - 1] - x[n - 2]);
            } else if (n >= 3) {
                out = i + 2;
                out_coord = x[i + 2];
            }
            const double t2 = (out == -100) ? 0.0 : out_coord - x[i];
            if (quad && out != -100 &&
                std::abs(t2) > 1e-3 * w && std::abs(t2 - w) > 1e-3 * w)
                ws.jr[i] = detail::quadratic_rule(alpha, w, 0.0, w, t2, i, i + 1, out);
            else
                ws.jr[i] = detail::linear_rule(alpha, w, i, i + 1);
        }
    }

    if (ws.left_gap) {
        const double w0 = x[0] - line.left_boundary;
        ws.gap_decay_l = std::exp(-alpha * w0);
        if (quad && n >= 2) {
            // stencil (a, x0, x1)
            ws.gl = detail::quadratic_rule(alpha, w0, w0, 0.0, x[0] - x[1], -1, 0, 1);
            ws.gla = detail::quadratic_rule(alpha, w0, 0.0, w0, x[1] - line.left_boundary, -1, 0, 1);
        } else {
            ws.gl = detail::linear_rule(alpha, w0, 0, -1);
            ws.gla = detail::linear_rule(alpha, w0, -1, 0);
        }
    }
    if (ws.right_gap) {
        const double w1 = line.right_boundary - x[n - 1];
        ws.gap_decay_r = std::exp(-alpha * w1);
        if (quad && n >= 2) {
            // stencil (x_{n-2}, x_{n-1}, b)
            ws.gr = detail::quadratic_rule(alpha, w1, x[n - 2] - x[n - 1], 0.0, w1,
                                           n - 2, n - 1, -2);
            ws.grb = detail::quadratic_rule(alpha, w1, line.right_boundary - x[n - 2], w1, 0.0,
                                            n - 2, n - 1, -2);
        } else {
            ws.gr = detail::linear_rule(alpha, w1, n - 1, -2);
            ws.grb = detail::linear_rule(alpha, w1, -2, n - 1);
        }
    }

    ws.one_minus_mu = -std::expm1(-alpha * (line.right_boundary - line.left_boundary));
    ws.efrom_a.resize(n);
    ws.eto_b.resize(n);
    for (int i = 0; i < n; ++i) {
        ws.efrom_a[i] = std::exp(-alpha * (x[i] - line.left_boundary));
        ws.eto_b[i] = std::exp(-alpha * (line.right_boundary - x[i]));
    }

    ws.IL.assign(n, 0.0);
    ws.IR.assign(n, 0.0);
    return ws;
}

namespace detail {

inline double eval_rule(const CellRule& r, std::span<const double> u, double ua, double ub)
{
    auto at = [&](int i) { return i == -1 ? ua : (i == -2 ? ub : u[std::size_t(i)]); };
    return r.w0 * at(r.i0) + r.w1 * at(r.i1) + r.w2 * at(r.i2);
}

} // namespace detail

/// Particular solution I[u](x_j) ~ (alpha/2) \int_a^b e^{-alpha |x_j - y|} u(y) dy
/// by the characteristic left/right exponential recurrences; O(N) work.
/// u_left/u_right are the operand values at off-grid boundary points (used
/// only by the gap-cell stencils). I_a/I_b, when requested, receive the
/// particular solution evaluated at the line endpoints.
inline void fast_convolve_into(const LineGrid& line, std::span<const double> u, double alpha,
                               ConvWorkspace& ws, std::span<double> out,
                               double u_left = 0.0, double u_right = 0.0,
                               double* I_a = nullptr, double* I_b = nullptr)
{
    detail::check_workspace(line, alpha, ws);
    const int n = ws.n;
    if (static_cast<int>(u.size()) != n || static_cast<int>(out.size()) != n)
        throw argument_error("fast_convolve: operand length must match the line");

    auto& IL = ws.IL;
    auto& IR = ws.IR;

    IL[0] = ws.left_gap ? detail::eval_rule(ws.gl, u, u_left, u_right) : 0.0;
    for (int i = 1; i < n; ++i)
        IL[i] = ws.decay[i - 1] * IL[i - 1] + detail::eval_rule(ws.jl[i - 1], u, u_left, u_right);
    const double Ib = ws.right_gap
                          ? ws.gap_decay_r * IL[n - 1] + detail::eval_rule(ws.grb, u, u_left, u_right)
                          : IL[n - 1];

    IR[n - 1] = ws.right_gap ? detail::eval_rule(ws.gr, u, u_left, u_right) : 0.0;
    for (int i = n - 2; i >= 0; --i)
        IR[i] = ws.decay[i] * IR[i + 1] + detail::eval_rule(ws.jr[i], u, u_left, u_right);
    const double Ia = ws.left_gap
                          ? ws.gap_decay_l * IR[0] + detail::eval_rule(ws.gla, u, u_left, u_right)
                          : IR[0];

    for (int i = 0; i < n; ++i) out[i] = IL[i] + IR[i];
    if (I_a) *I_a = Ia;
    if (I_b) *I_b = Ib;
}

inline std::vector<double> fast_convolve(const LineGrid& line, std::span<const double> u,
                                         double alpha, ConvWorkspace& ws,
                                         double u_left = 0.0, double u_right = 0.0,
                                         double* I_a = nullptr, double* I_b = nullptr)
{
    std::vector<double> out(u.size());
    fast_convolve_into(line, u, alpha, ws, out, u_left, u_right, I_a, I_b);
    return out;
}

/// Residuals of the 2x2 boundary-correction solve plus the endpoint values
/// the corrected output actually attains.
struct LinvDiagnostics {
    double residual_left = 0.0;
    double residual_right = 0.0;
    double value_left = 0.0;
    double value_right = 0.0;
};

/// w = I[u] + A e^{-alpha (x-a)} + B e^{-alpha (b-x)} with (A, B) chosen so
/// that w satisfies the boundary conditions: prescribed endpoint values for
/// Dirichlet, matching value and slope across the seam for periodic. The
/// result satisfies L[w] = u at interior nodes to quadrature accuracy.
inline void apply_Linv_into(const LineGrid& line, std::span<const double> u, double alpha,
                            ConvWorkspace& ws, const BoundarySpec& bc, std::span<double> out,
                            double u_left = 0.0, double u_right = 0.0,
                            LinvDiagnostics* diag = nullptr)
{
    double Ia = 0.0, Ib = 0.0;
    fast_convolve_into(line, u, alpha, ws, out, u_left, u_right, &Ia, &Ib);

    const double om = ws.one_minus_mu;
    if (om < 1e-14)
        throw numeric_error("apply_Linv: 1 - e^{-alpha(b-a)} below 1e-14; domain too short "
                            "or alpha too small for a well-posed boundary correction");
    const double mu = 1.0 - om;

    double A = 0.0, B = 0.0;
    if (bc.kind == BoundaryKind::periodic) {
        A = Ib / om;
        B = Ia / om;
    } else {
        const double ra = bc.left - Ia;
        const double rb = bc.right - Ib;
        const double det = om * (1.0 + mu);
        A = (ra - mu * rb) / det;
        B = (rb - mu * ra) / det;
    }

    const int n = ws.n;
    for (int i = 0; i < n; ++i) out[i] += A * ws.efrom_a[i] + B * ws.eto_b[i];

    if (diag) {
        diag->value_left = Ia + A + B * mu;
        diag->value_right = Ib + A * mu + B;
        if (bc.kind == BoundaryKind::dirichlet) {
            diag->residual_left = std::abs(diag->value_left - bc.left);
            diag->residual_right = std::abs(diag->value_right - bc.right);
        } else {
            diag->residual_left = std::abs(diag->value_left - diag->value_right);
            diag->residual_right = diag->residual_left;
        }
    }
}

inline std::vector<double> apply_Linv(const LineGrid& line, std::span<const double> u, double alpha,
                                      ConvWorkspace& ws, const BoundarySpec& bc,
                                      double u_left = 0.0, double u_right = 0.0,
                                      LinvDiagnostics* diag = nullptr)
{
    std::vector<double> out(u.size());
    apply_Linv_into(line, u, alpha, ws, bc, out, u_left, u_right, diag);
    return out;
}

/// D[u] = u - L^{-1}[u].
inline void apply_D_into(const LineGrid& line, std::span<const double> u, double alpha,
                         ConvWorkspace& ws, const BoundarySpec& bc, std::span<double> out,
                         double u_left = 0.0, double u_right = 0.0,
                         LinvDiagnostics* diag = nullptr)
{
    apply_Linv_into(line, u, alpha, ws, bc, out, u_left, u_right, diag);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - out[i];
}

inline std::vector<double> apply_D(const LineGrid& line, std::span<const double> u, double alpha,
                                   ConvWorkspace& ws, const BoundarySpec& bc,
                                   double u_left = 0.0, double u_right = 0.0,
                                   LinvDiagnostics* diag = nullptr)
{
    std::vector<double> out(u.size());
    apply_D_into(line, u, alpha, ws, bc, out, u_left, u_right, diag);
    return out;
}

} // namespace molt
