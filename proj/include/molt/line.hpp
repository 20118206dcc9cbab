#pragma once

#include <cmath>
#include <vector>

#include "molt/errors.hpp"

namespace molt {

enum class BoundaryKind { periodic, dirichlet };

/// Boundary treatment for one operator application on a line. Dirichlet
/// carries the values the *output* of L^{-1} must take at the two boundary
/// points; periodic lines carry no values.
struct BoundarySpec {
    BoundaryKind kind = BoundaryKind::periodic;
    double left = 0.0;
    double right = 0.0;

    static BoundarySpec periodic() { return {BoundaryKind::periodic, 0.0, 0.0}; }
    static BoundarySpec dirichlet(double l, double r) { return {BoundaryKind::dirichlet, l, r}; }
    static BoundarySpec homogeneous() { return dirichlet(0.0, 0.0); }
};

/// One convolution line: strictly increasing nodes plus two boundary
/// endpoints a <= x_0 and b >= x_{N-1}.
///
/// Regular lines place the endpoints on the first and last node. Periodic
/// lines additionally duplicate that node logically (x_0 represents the same
/// physical point as x_{N-1}, so operands satisfy u_0 == u_{N-1}). Embedded
/// lines carry off-grid endpoints strictly outside the node range; the gap
/// between an endpoint and its nearest node is at most one cell.
struct LineGrid {
    std::vector<double> nodes;
    double left_boundary = 0.0;
    double right_boundary = 0.0;
    double spacing = 0.0; // nominal dx

    int size() const { return static_cast<int>(nodes.size()); }
    bool left_off_grid() const { return left_boundary < nodes.front(); }
    bool right_off_grid() const { return right_boundary > nodes.back(); }
    double length() const { return right_boundary - left_boundary; }

    /// n nodes from a to b inclusive; boundary points coincide with the ends.
    static LineGrid uniform(double a, double b, int n)
    {
        if (n < 2) throw argument_error("LineGrid::uniform: need at least 2 nodes");
        if (!(b > a)) throw argument_error("LineGrid::uniform: b must exceed a");
        LineGrid g;
        g.nodes.resize(n);
        const double h = (b - a) / double(n - 1);
        for (int i = 0; i < n; ++i) g.nodes[i] = a + h * double(i);
        g.nodes.back() = b;
        g.left_boundary = a;
        g.right_boundary = b;
        g.spacing = h;
        g.validate();
        return g;
    }

    /// Interior nodes plus (possibly off-grid) boundary endpoints.
    static LineGrid embedded(std::vector<double> nodes_, double a, double b, double nominal_dx)
    {
        LineGrid g;
        g.nodes = std::move(nodes_);
        g.left_boundary = a;
        g.right_boundary = b;
        g.spacing = nominal_dx;
        g.validate();
        return g;
    }

    void validate() const
    {
        if (nodes.size() < 2) throw argument_error("LineGrid: need at least 2 nodes");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw argument_error("LineGrid: nodes must be strictly increasing");
        if (left_boundary > nodes.front())
            throw argument_error("LineGrid: left boundary must satisfy a <= x_0");
        if (right_boundary < nodes.back())
            throw argument_error("LineGrid: right boundary must satisfy b >= x_{N-1}");
    }
};

} // namespace molt
