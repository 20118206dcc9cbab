#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "molt/field2d.hpp"
#include "molt/geometry.hpp"

using namespace molt;

namespace {

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * double(i) / double(n - 1);
    return v;
}

} // namespace

TEST_CASE("ellipse crossings on the x axis")
{
    auto curve = ImplicitCurve::ellipse();
    auto xs = linspace(-2.3, 2.3, 81);
    auto ys = linspace(-2.3, 2.3, 81);
    auto geo = build_embedded_lines(curve, xs, ys);

    // the row through y = 0 crosses at x = +-4/sqrt(17)
    const double expect = 4.0 / std::sqrt(17.0);
    const int iy0 = 40; // ys[40] == 0
    REQUIRE(ys[iy0] == Catch::Approx(0.0).margin(1e-14));
    bool found = false;
    for (const auto& line : geo.x_lines) {
        if (line.perp_index != iy0) continue;
        found = true;
        CHECK(line.left_cross == Catch::Approx(-expect).margin(1e-10));
        CHECK(line.right_cross == Catch::Approx(expect).margin(1e-10));
    }
    CHECK(found);
}

TEST_CASE("unit circle crossings are symmetric")
{
    auto curve = ImplicitCurve::circle(1.0);
    auto xs = linspace(-1.5, 1.5, 61);
    auto ys = linspace(-1.5, 1.5, 61);
    auto geo = build_embedded_lines(curve, xs, ys);
    const int iy0 = 30;
    REQUIRE(ys[iy0] == Catch::Approx(0.0).margin(1e-14));
    for (const auto& line : geo.x_lines) {
        if (line.perp_index != iy0) continue;
        CHECK(line.left_cross == Catch::Approx(-1.0).margin(1e-10));
        CHECK(line.right_cross == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("crossing coordinates satisfy |phi| <= 1e-10")
{
    auto curve = ImplicitCurve::ellipse();
    auto xs = linspace(-2.3, 2.3, 80); // 0 is not a grid coordinate here
    auto ys = linspace(-2.3, 2.3, 80);
    auto geo = build_embedded_lines(curve, xs, ys);
    REQUIRE(!geo.x_lines.empty());
    REQUIRE(!geo.y_lines.empty());
    for (const auto& line : geo.x_lines) {
        CHECK(std::abs(curve.phi(line.left_cross, line.perp_coord)) <= 1e-10);
        CHECK(std::abs(curve.phi(line.right_cross, line.perp_coord)) <= 1e-10);
    }
    for (const auto& line : geo.y_lines) {
        CHECK(std::abs(curve.phi(line.perp_coord, line.left_cross)) <= 1e-10);
        CHECK(std::abs(curve.phi(line.perp_coord, line.right_cross)) <= 1e-10);
    }
}

TEST_CASE("boundary points bracket their segments with gaps in (0, h]")
{
    auto curve = ImplicitCurve::ellipse();
    auto xs = linspace(-2.3, 2.3, 90);
    auto ys = linspace(-2.3, 2.3, 90);
    const double hx = xs[1] - xs[0];
    auto geo = build_embedded_lines(curve, xs, ys);
    for (const auto& line : geo.x_lines) {
        const double gap_l = xs[line.first] - line.left_cross;
        const double gap_r = line.right_cross - xs[line.first + line.count - 1];
        CHECK(gap_l > 0.0);
        CHECK(gap_l <= hx * (1.0 + 1e-12));
        CHECK(gap_r > 0.0);
        CHECK(gap_r <= hx * (1.0 + 1e-12));
    }
}

TEST_CASE("every interior node belongs to exactly one line per axis")
{
    auto curve = ImplicitCurve::ellipse();
    auto xs = linspace(-2.4, 2.4, 70);
    auto ys = linspace(-2.4, 2.4, 70);
    const int nx = 70;
    auto geo = build_embedded_lines(curve, xs, ys);

    std::vector<int> xcover(70 * 70, 0), ycover(70 * 70, 0);
    for (const auto& line : geo.x_lines)
        for (int k = 0; k < line.count; ++k) xcover[line.perp_index * nx + line.first + k] += 1;
    for (const auto& line : geo.y_lines)
        for (int k = 0; k < line.count; ++k) ycover[(line.first + k) * nx + line.perp_index] += 1;
    for (int i = 0; i < 70 * 70; ++i) {
        CHECK(xcover[i] == (geo.interior[i] ? 1 : 0));
        CHECK(ycover[i] == (geo.interior[i] ? 1 : 0));
    }
}

TEST_CASE("mask inherits the symmetries of phi")
{
    auto curve = ImplicitCurve::circle(1.1);
    const int n = 64;
    auto xs = linspace(-1.6, 1.6, n);
    auto ys = linspace(-1.6, 1.6, n);
    auto geo = build_embedded_lines(curve, xs, ys);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            CHECK(geo.interior[iy * n + ix] == geo.interior[iy * n + (n - 1 - ix)]);
            CHECK(geo.interior[iy * n + ix] == geo.interior[(n - 1 - iy) * n + ix]);
            CHECK(geo.interior[iy * n + ix] == geo.interior[ix * n + iy]);
        }
}

TEST_CASE("lines outside the interior are not emitted")
{
    auto curve = ImplicitCurve::circle(0.5);
    auto xs = linspace(-2.0, 2.0, 41);
    auto ys = linspace(-2.0, 2.0, 41);
    auto geo = build_embedded_lines(curve, xs, ys);
    for (const auto& line : geo.x_lines)
        CHECK(std::abs(line.perp_coord) < 0.5);
    for (const auto& line : geo.y_lines)
        CHECK(std::abs(line.perp_coord) < 0.5);
}

TEST_CASE("under-resolved segments raise a refinement error")
{
    // radius comparable to the spacing leaves rows with a single interior node
    auto curve = ImplicitCurve::circle(0.11);
    auto xs = linspace(-2.0, 2.0, 41); // h = 0.1
    auto ys = linspace(-2.0, 2.0, 41);
    CHECK_THROWS_AS(build_embedded_lines(curve, xs, ys), config_error);
}

TEST_CASE("interior touching the bounding box is rejected")
{
    auto curve = ImplicitCurve::circle(3.0);
    auto xs = linspace(-2.0, 2.0, 41);
    auto ys = linspace(-2.0, 2.0, 41);
    CHECK_THROWS_AS(build_embedded_lines(curve, xs, ys), config_error);
}

TEST_CASE("boundary points near grid nodes are snapped")
{
    // place the circle so a crossing falls within 1e-3 h of a node
    const int n = 41;
    auto xs = linspace(-2.0, 2.0, n);
    auto ys = linspace(-2.0, 2.0, n);
    const double h = xs[1] - xs[0];
    // crossing at x = 1.0 + 1e-4 h on the row y = 0: inside node at x = 1.0
    auto curve = ImplicitCurve::circle(1.0 + 1e-4 * h);
    auto geo = build_embedded_lines(curve, xs, ys);
    const int iy0 = 20;
    for (const auto& line : geo.x_lines) {
        if (line.perp_index != iy0) continue;
        // the node at x = 1.0 was demoted: the boundary point sits exactly on it
        CHECK(line.right_cross == Catch::Approx(1.0).margin(1e-14));
        CHECK(xs[line.first + line.count - 1] == Catch::Approx(1.0 - h).margin(1e-12));
    }
}

TEST_CASE("rectangle grid lines span the whole box")
{
    auto g = Grid2D::rectangle(9, 7, -1.0, 1.0, 0.0, 2.0, BoundaryKind::dirichlet);
    CHECK(g->x_lines.size() == 7);
    CHECK(g->y_lines.size() == 9);
    for (const auto& line : g->x_lines) {
        CHECK(line.first == 0);
        CHECK(line.count == 9);
        CHECK(line.left_cross == -1.0);
        CHECK(line.right_cross == 1.0);
    }
    for (int iy = 0; iy < 7; ++iy)
        for (int ix = 0; ix < 9; ++ix) CHECK(g->is_interior(ix, iy));
}

TEST_CASE("embedded grid factory wires the mask and lines together")
{
    auto g = Grid2D::embed(ImplicitCurve::ellipse(), 80, 80, -2.2, 2.2, -2.2, 2.2);
    CHECK(g->embedded);
    std::size_t n_interior = 0;
    for (auto m : g->interior) n_interior += m;
    // area of the ellipse is pi * 4 * 1 / ... : ((x+y)/4)^2 + (x-y)^2 = 1 has
    // semi-axes 4/sqrt(2) and 1/sqrt(2) along y = +-x, area = pi * 2
    const double cell = g->dx * g->dy;
    const double area = double(n_interior) * cell;
    CHECK(area == Catch::Approx(2.0 * std::numbers::pi).epsilon(0.05));
}
