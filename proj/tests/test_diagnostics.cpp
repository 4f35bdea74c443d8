#include <doctest.h>

#include <cmath>
#include <vector>

#include <netflow/diagnostics.hpp>
#include <netflow/flow.hpp>
#include <netflow/shapes.hpp>

using namespace netflow;

namespace {

Network circular_arc(double rho, double phi0, double phi1, double h) {
    Network net;
    const int n = std::max(2, int(std::ceil(rho * (phi1 - phi0) / h))) + 1;
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
        const double phi = phi0 + (phi1 - phi0) * i / (n - 1);
        pts.push_back({rho * std::cos(phi), rho * std::sin(phi)});
    }
    const int a = add_vertex(net, pts.front(), VertexKind::Endpoint);
    const int b = add_vertex(net, pts.back(), VertexKind::Endpoint);
    add_segment(net, a, b, pts);
    return net;
}

int vertex_left_of(const Network& net, double x) {
    for (const auto& v : net.vertices)
        if (v.pos.x < x) return v.id;
    return -1;
}

}  // namespace

TEST_CASE("kernel weight: peak value and hard truncation") {
    for (const double tau : {0.25, 1.0, 3.0}) {
        CHECK(density_kernel(0.0, tau) ==
              doctest::Approx(1.0 / std::sqrt(4.0 * kPi * tau)).epsilon(1e-14));
        CHECK(density_kernel(4.0 * tau * 37.0 * 1.0001, tau) == 0.0);
        CHECK(density_kernel(4.0 * tau * 36.9999, tau) > 0.0);
    }
    CHECK(density_kernel(1.0, 0.0) == 0.0);
}

TEST_CASE("stock densities: line 1, triple cone 3/2, self-similar circle") {
    const auto line = make_star({0, 0}, {0.0, kPi}, 13.0, 0.02, true);
    CHECK(gaussian_density(line, {0, 0}, 1.0).value ==
          doctest::Approx(1.0).epsilon(1e-4));
    CHECK(gaussian_density(line, {0, 0}, 0.5).value ==
          doctest::Approx(1.0).epsilon(1e-4));

    const auto triod = make_star(
        {0, 0}, {0.4, 0.4 + 2.0 * kPi / 3.0, 0.4 - 2.0 * kPi / 3.0}, 13.0, 0.02);
    CHECK(gaussian_density(triod, {0, 0}, 1.0).value ==
          doctest::Approx(1.5).epsilon(1e-4));

    // A unit circle probed at its self-similar scale 1/sqrt(2).
    const auto circ = make_circle({0, 0}, 1.0, 0.01);
    CHECK(gaussian_density(circ, {0, 0}, 1.0 / std::sqrt(2.0)).value ==
          doctest::Approx(std::sqrt(2.0 * kPi / std::exp(1.0))).epsilon(1e-4));
}

TEST_CASE("density is covariant under scaling and rigid motion") {
    const auto net = make_lens(1.0, 2.0, 0.02);
    const Vec2 x0{0.3, 0.2};
    const double r = 0.7;
    const double base = gaussian_density(net, x0, r).value;

    const double lam = 2.3;
    const auto scaled = transformed(net, lam, 0.0, {0, 0});
    CHECK(gaussian_density(scaled, lam * x0, lam * r).value ==
          doctest::Approx(base).epsilon(1e-12));

    const double ang = 0.7;
    const Vec2 shift{0.4, -0.3};
    const auto moved = transformed(net, 1.0, ang, shift);
    CHECK(gaussian_density(moved, rotate(x0, ang) + shift, r).value ==
          doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("density flags scales the mesh cannot resolve") {
    const auto circ = make_circle({0, 0}, 1.0, 0.05);
    const auto coarse = gaussian_density(circ, {1.0, 0.0}, 0.08);
    CHECK(coarse.under_resolved);
    const auto fine = gaussian_density(circ, {1.0, 0.0}, 0.3);
    CHECK_FALSE(fine.under_resolved);
}

TEST_CASE("shrinking circle holds the self-similar trace value") {
    FlowState state;
    state.net = make_circle({0, 0}, 1.0, 0.02);
    const auto traj = evolve(state, 0.45, {0.15, 0.3, 0.4});
    REQUIRE_FALSE(traj.halted);

    const auto trace = huisken_trace(traj.snapshots, {0, 0}, 0.5);
    REQUIRE(trace.points.size() == traj.snapshots.size());
    const double steady = std::sqrt(2.0 * kPi / std::exp(1.0));
    for (const auto& pt : trace.points) {
        CHECK(pt.theta == doctest::Approx(steady).epsilon(3e-3));
        CHECK(pt.defect < 1e-4);
    }
    CHECK(trace.max_increase < 5e-4);

    // Probed away from the shrinking center the trace strictly decreases.
    const auto off = huisken_trace(traj.snapshots, {0.25, 0.0}, 0.5);
    CHECK(off.max_increase < 1e-4);
    CHECK(off.points.front().theta - off.points.back().theta > 0.15);
}

TEST_CASE("a static line has a constant unit trace with zero defect") {
    const auto line = make_star({0, 0}, {0.0, kPi}, 13.0, 0.02, true);
    std::vector<std::pair<double, Network>> snaps{
        {0.0, line}, {0.1, line}, {0.2, line}};
    const auto trace = huisken_trace(snaps, {0, 0}, 0.25);
    REQUIRE(trace.points.size() == 3);
    for (const auto& pt : trace.points) {
        CHECK(pt.theta == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(pt.defect < 1e-10);
    }
    CHECK(trace.max_increase < 1e-9);
}

TEST_CASE("tangent-angle field follows a graph curve") {
    const auto net = make_graph_curve([](double x) { return 0.5 * x * x; }, -1.0,
                                      1.0, 0.02);
    const int root = vertex_left_of(net, 0.0);
    REQUIRE(root >= 0);
    const auto field = theta_field(net, root);
    const auto& seg = net.segments.front();
    const auto& th = field.per_segment.at(seg.id);
    REQUIRE(th.size() == seg.points.size());
    double worst = 0.0;
    for (size_t i = 0; i < th.size(); ++i)
        worst = std::max(worst, std::abs(th[i] - std::atan(seg.points[i].x)));
    CHECK(worst < 5e-4);
}

TEST_CASE("tangent-angle field is constant across a balanced cone") {
    const double a0 = 0.4;
    const auto triod = make_star(
        {0, 0}, {a0, a0 + 2.0 * kPi / 3.0, a0 - 2.0 * kPi / 3.0}, 2.0, 0.02);
    const auto field = theta_field(triod, 0);
    double lo = 1e300, hi = -1e300;
    for (const auto& [sid, vals] : field.per_segment)
        for (double v : vals) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    CHECK(hi - lo < 1e-9);
    CHECK(lo == doctest::Approx(a0).epsilon(1e-9));
}

TEST_CASE("root choice shifts the angle field by a lattice constant") {
    const double a0 = 0.4;
    const auto triod = make_star(
        {0, 0}, {a0, a0 + 2.0 * kPi / 3.0, a0 - 2.0 * kPi / 3.0}, 2.0, 0.02);
    const auto f0 = theta_field(triod, 0);
    const auto f1 = theta_field(triod, 2);  // an outer endpoint
    double diff0 = 0.0;
    bool first = true;
    for (const auto& [sid, vals] : f0.per_segment) {
        const auto& other = f1.per_segment.at(sid);
        REQUIRE(other.size() == vals.size());
        for (size_t i = 0; i < vals.size(); ++i) {
            const double d = vals[i] - other[i];
            if (first) {
                diff0 = d;
                first = false;
            }
            CHECK(std::abs(d - diff0) < 1e-9);
        }
    }
    const double units = diff0 / (kPi / 3.0);
    CHECK(std::abs(units - std::llround(units)) < 1e-9);
}

TEST_CASE("angle and area fields reject cycles") {
    const auto circ = make_circle({0, 0}, 1.0, 0.05);
    const int root = circ.vertices.front().id;
    CHECK_THROWS_AS(theta_field(circ, root), NetworkError);
    CHECK_THROWS_AS(beta_field(circ, root), NetworkError);
}

TEST_CASE("area field vanishes on radial rays and sweeps arcs exactly") {
    const auto triod = make_star(
        {0, 0}, {0.4, 0.4 + 2.0 * kPi / 3.0, 0.4 - 2.0 * kPi / 3.0}, 2.0, 0.02);
    const auto bt = beta_field(triod, 0);
    for (const auto& [sid, vals] : bt.per_segment)
        for (double v : vals) CHECK(std::abs(v) < 1e-12);

    // On a circular arc about the origin the primitive grows like rho^2 phi.
    const double rho = 1.3;
    const auto arc = circular_arc(rho, 0.0, kPi / 2.0, 0.01);
    const int root = arc.segments.front().from;
    const auto ba = beta_field(arc, root);
    const auto& vals = ba.per_segment.at(arc.segments.front().id);
    const auto& pts = arc.segments.front().points;
    CHECK(vals.front() == 0.0);
    CHECK(vals.back() ==
          doctest::Approx(rho * rho * kPi / 2.0).epsilon(1e-4));
    const size_t mid = vals.size() / 2;
    CHECK(vals[mid] ==
          doctest::Approx(rho * rho * angle_of(pts[mid])).epsilon(1e-3));
}

TEST_CASE("weighted functional with unit weight reduces to the density") {
    const auto triod = make_star(
        {0, 0}, {0.4, 0.4 + 2.0 * kPi / 3.0, 0.4 - 2.0 * kPi / 3.0}, 13.0, 0.02);
    const Vec2 x0{0.1, 0.05};
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    const auto wf = weighted_functional(triod, 0.0, one, zero, x0, 1.0, 0);
    CHECK(wf.value ==
          doctest::Approx(gaussian_density(triod, x0, 1.0).value).epsilon(1e-12));
    CHECK(wf.dissipation_convexity == 0.0);
    CHECK(wf.dissipation_kernel >= 0.0);
    CHECK(wf.domain_tag.find("truncated") == 0);
}

TEST_CASE("static cone through the origin is a null state of the functional") {
    const auto triod = make_star(
        {0, 0}, {0.4, 0.4 + 2.0 * kPi / 3.0, 0.4 - 2.0 * kPi / 3.0}, 13.0, 0.02);
    auto sq = [](double u) { return u * u; };
    auto two = [](double) { return 2.0; };
    // theta is constant, beta vanishes; with the gauge shift -2t*theta the
    // argument is identically zero and the rays are radial, so every term dies.
    const double a0 = 0.4, t = 0.1;
    const auto wf =
        weighted_functional(triod, t, sq, two, {0, 0}, 1.0, 0, -2.0 * t * a0);
    CHECK(std::abs(wf.value) < 1e-13);
    CHECK(std::abs(wf.dissipation_convexity) < 1e-13);
    CHECK(std::abs(wf.dissipation_kernel) < 1e-13);
}

TEST_CASE("offset line: convexity dissipation has a closed form") {
    const double c = 0.3;
    const auto line = make_graph_curve([&](double) { return c; }, -13.0, 13.0, 0.02);
    const int root = vertex_left_of(line, 0.0);
    auto sq = [](double u) { return u * u; };
    auto two = [](double) { return 2.0; };
    // At t=0: integral of 2 |x_perp|^2 rho = 2 c^2 exp(-c^2/4).
    const auto wf = weighted_functional(line, 0.0, sq, two, {0, 0}, 1.0, root);
    CHECK(wf.dissipation_convexity ==
          doctest::Approx(2.0 * c * c * std::exp(-c * c / 4.0)).epsilon(1e-4));
}

TEST_CASE("localized functional scales like t^2 on a static cone") {
    const auto triod = make_star(
        {0, 0}, {0.4, 0.4 + 2.0 * kPi / 3.0, 0.4 - 2.0 * kPi / 3.0}, 13.0, 0.02);
    // Keeping t0 - t fixed pins the weight, isolating the t^2 growth.
    const auto at1 = localized_functional(triod, 0.1, {0, 0}, 1.0, 0);
    const auto at2 = localized_functional(triod, 0.2, {0, 0}, 1.1, 0);
    CHECK(at1.dissipation < 1e-13);
    CHECK(at2.dissipation < 1e-13);
    CHECK(at1.value > 0.0);
    CHECK(at2.value / at1.value ==
          doctest::Approx((0.2 / 0.1) * (0.2 / 0.1)).epsilon(1e-6));
    CHECK(at2.annulus_term / at1.annulus_term ==
          doctest::Approx(4.0).epsilon(1e-6));
    CHECK(at1.annulus_term > 0.0);
}

TEST_CASE("expansion defect: zero on radial cones, 8 pi on the unit circle") {
    const auto triod = make_star(
        {0, 0}, {0.4, 0.4 + 2.0 * kPi / 3.0, 0.4 - 2.0 * kPi / 3.0}, 4.0, 0.02);
    CHECK(expander_defect(triod, 5.0) < 1e-10);

    const auto circ = make_circle({0, 0}, 1.0, 0.01);
    CHECK(expander_defect(circ, 2.0) == doctest::Approx(8.0 * kPi).epsilon(2e-3));
    CHECK(expander_defect(circ, 0.5) == 0.0);
}

TEST_CASE("junction separation inside a ball") {
    const auto lens = make_lens(1.0, 2.0, 0.02);
    CHECK(junction_separation(lens, {0, 0}, 5.0) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::isinf(junction_separation(lens, {1.0, 0.0}, 0.5)));
    const auto star = make_star(
        {0, 0}, {0.0, 2.0 * kPi / 3.0, -2.0 * kPi / 3.0}, 1.0, 0.05);
    CHECK(std::isinf(junction_separation(star, {0, 0}, 5.0)));
}

TEST_CASE("similarity transforms map every marker exactly") {
    const auto net = make_lens(1.0, 2.0, 0.01);
    const double lam = 2.0, ang = kPi / 3.0;
    const Vec2 shift{1.0, -2.0};
    const auto out = transformed(net, lam, ang, shift);
    REQUIRE(out.segments.size() == net.segments.size());
    for (size_t si = 0; si < net.segments.size(); ++si)
        for (size_t i = 0; i < net.segments[si].points.size(); ++i) {
            const Vec2 want = lam * rotate(net.segments[si].points[i], ang) + shift;
            CHECK(dist(out.segments[si].points[i], want) < 1e-12);
        }
    for (size_t vi = 0; vi < net.vertices.size(); ++vi) {
        const Vec2 want = lam * rotate(net.vertices[vi].pos, ang) + shift;
        CHECK(dist(out.vertices[vi].pos, want) < 1e-12);
    }
    CHECK(validate(out).regular);
}
