#include <doctest.h>

#include <netflow/network.hpp>
#include <netflow/network_io.hpp>
#include <netflow/shapes.hpp>

#include <cmath>
#include <filesystem>

using namespace netflow;

namespace {

Network bent_star(double delta) {
    return make_star({0.0, 0.0},
                     {kPi / 2, kPi / 2 + 2.0 * kPi / 3 + delta,
                      kPi / 2 - 2.0 * kPi / 3},
                     1.0, 0.02);
}

}  // namespace

TEST_CASE("straight rods meeting at 120 degrees are balanced to rounding") {
    const auto net = bent_star(0.0);
    const auto rep = validate(net);
    CHECK(rep.regular);
    CHECK(rep.max_triple_defect < 1e-12);
    CHECK(rep.embedding_violations.empty());
}

TEST_CASE("junction defect of a bent star matches the unit-vector sum") {
    const double delta = 5.0 * kPi / 180.0;
    const auto net = bent_star(delta);
    const auto rep = validate(net);
    // Straight rods have exact one-sided tangents, so the defect is the
    // closed-form |e^{i a1} + e^{i a2} + e^{i a3}|.
    const double sx = std::cos(kPi / 2) + std::cos(kPi / 2 + 2 * kPi / 3 + delta) +
                      std::cos(kPi / 2 - 2 * kPi / 3);
    const double sy = std::sin(kPi / 2) + std::sin(kPi / 2 + 2 * kPi / 3 + delta) +
                      std::sin(kPi / 2 - 2 * kPi / 3);
    const double oracle = std::hypot(sx, sy);
    CHECK(rep.max_triple_defect == doctest::Approx(oracle).epsilon(1e-10));
    CHECK_FALSE(rep.regular);
}

TEST_CASE("circle length converges to 2 pi under refinement") {
    const double err1 = std::abs(make_circle({0, 0}, 1.0, 0.02).total_length() - 2 * kPi);
    const double err2 = std::abs(make_circle({0, 0}, 1.0, 0.01).total_length() - 2 * kPi);
    CHECK(err1 < 5e-4);
    CHECK(err2 < err1 / 3.0);  // second-order polygon error
}

TEST_CASE("counterclockwise circles have positive unit curvature") {
    const auto net = make_circle({0.25, -0.5}, 1.0, 0.01);
    for (const auto& seg : net.segments) {
        const auto prof = curvature_profile(seg);
        for (size_t i = 1; i + 1 < prof.size(); ++i)
            CHECK(prof[i].k == doctest::Approx(1.0).epsilon(2e-4));
    }
    CHECK(sup_curvature(net) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("graph curvature of a half parabola matches the closed form") {
    const auto net =
        make_graph_curve([](double x) { return 0.5 * x * x; }, -1.0, 1.0, 0.002);
    const auto& seg = net.segments.front();
    const auto prof = curvature_profile(seg);
    double worst = 0.0;
    for (size_t i = 2; i + 2 < prof.size(); ++i) {
        const double x = seg.points[i].x;
        const double oracle = 1.0 / std::pow(1.0 + x * x, 1.5);
        worst = std::max(worst, std::abs(prof[i].k - oracle));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("resample keeps endpoints and near-uniform gaps") {
    auto net = make_graph_curve([](double x) { return std::sin(3 * x); }, 0.0,
                                2.0, 0.13);
    const Vec2 a = net.segments[0].points.front();
    const Vec2 b = net.segments[0].points.back();
    const auto fine = resample(net, 0.01);
    const auto& seg = fine.segments[0];
    CHECK(seg.points.front().x == a.x);
    CHECK(seg.points.front().y == a.y);
    CHECK(seg.points.back().x == b.x);
    CHECK(seg.points.back().y == b.y);
    CHECK(seg.min_spacing() >= 0.005);
    CHECK(seg.max_spacing() <= 0.02);
    CHECK_FALSE(seg.short_mesh);

    const auto stub = resample(make_star({0, 0}, {0.0, kPi}, 0.015, 0.01), 0.01);
    for (const auto& s : stub.segments) CHECK(s.short_mesh);
}

TEST_CASE("length ratio gauges: segment, star, circle") {
    const auto line = make_star({0, 0}, {0.0, kPi}, 2.0, 0.02, true);
    CHECK(length_ratio(line) == doctest::Approx(2.0).epsilon(0.02));

    const auto star = bent_star(0.0);
    CHECK(length_ratio(star) == doctest::Approx(3.0).epsilon(0.02));

    // Centers sit on the curve, so the sup is 4 asin(r/2)/r at r = diameter.
    const auto circle = make_circle({0, 0}, 1.0, 0.01);
    const double ratio =
        length_ratio(circle, {.max_centers = 120, .radii_per_center = 16, .r_min = 0.5, .r_max = 2.0});
    CHECK(ratio > 2.0);
    CHECK(ratio == doctest::Approx(kPi).epsilon(0.05));
}

TEST_CASE("length in ball clips chords exactly") {
    const auto line = make_star({0, 0}, {0.0, kPi}, 2.0, 0.05, true);
    CHECK(length_in_ball(line, {0.0, 0.0}, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(length_in_ball(line, {0.0, 0.3}, 0.5) ==
          doctest::Approx(2.0 * 0.4).epsilon(1e-9));
    CHECK(length_in_ball(line, {0.0, 1.0}, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("exterior tangents point out of the segment past the vertex") {
    Network net = make_star({0, 0}, {0.0}, 1.0, 0.1);
    const auto& seg = net.segments[0];
    const Vec2 at_junction = exterior_tangent(seg, true);
    CHECK(at_junction.x == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(at_junction.y) < 1e-12);
    const Vec2 at_tip = exterior_tangent(seg, false);
    CHECK(at_tip.x == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("validation rejects malformed networks") {
    Network net = bent_star(0.0);
    SUBCASE("dangling segment end") {
        net.segments[0].to = 99;
        CHECK_THROWS_AS(validate(net), NetworkError);
    }
    SUBCASE("segment end away from its vertex") {
        net.segments[0].points.back() += Vec2{0.1, 0.0};
        CHECK_THROWS_AS(validate(net), NetworkError);
    }
    SUBCASE("duplicate consecutive markers") {
        auto& pts = net.segments[0].points;
        pts.insert(pts.begin() + 3, pts[3]);
        CHECK_THROWS_AS(validate(net), NetworkError);
    }
    SUBCASE("wrong valence for the declared kind") {
        net.vertex(1).kind = VertexKind::Triple;  // tip with one branch
        CHECK_THROWS_AS(validate(net), NetworkError);
    }
}

TEST_CASE("embedding check flags crossing strands but not joints") {
    Network cross;
    add_vertex(cross, {-1.0, 0.0}, VertexKind::Endpoint);
    add_vertex(cross, {1.0, 0.0}, VertexKind::Endpoint);
    add_vertex(cross, {0.1, -1.0}, VertexKind::Endpoint);
    add_vertex(cross, {0.1, 1.0}, VertexKind::Endpoint);
    add_segment(cross, 0, 1, line_points({-1.0, 0.0}, {1.0, 0.0}, 0.05));
    add_segment(cross, 2, 3, line_points({0.1, -1.0}, {0.1, 1.0}, 0.05));
    const auto rep = validate(cross);
    REQUIRE(rep.embedding_violations.size() == 1);

    CHECK(validate(bent_star(0.0)).embedding_violations.empty());
    CHECK(validate(make_circle({0, 0}, 1.0, 0.02)).embedding_violations.empty());
}

TEST_CASE("two-valent joins with opposite tangents keep a network regular") {
    CHECK(validate(make_circle({0, 0}, 1.0, 0.01)).regular);
    // A right-angle corner at a 2-valent vertex is not a smooth join.
    const auto corner = make_star({0, 0}, {0.0, kPi / 2}, 1.0, 0.02, true);
    const auto rep = validate(corner);
    CHECK_FALSE(rep.regular);
}

TEST_CASE("network JSON round-trips bit for bit") {
    const auto net = make_lens(1.0, 2.0, 0.03);
    const auto path = std::filesystem::temp_directory_path() / "roundtrip.json";
    save_network(net, path.string());
    const auto back = load_network(path.string());
    REQUIRE(back.segments.size() == net.segments.size());
    REQUIRE(back.vertices.size() == net.vertices.size());
    for (size_t si = 0; si < net.segments.size(); ++si) {
        const auto& a = net.segments[si];
        const auto& b = back.segments[si];
        REQUIRE(a.points.size() == b.points.size());
        CHECK(a.id == b.id);
        CHECK(a.from == b.from);
        CHECK(a.to == b.to);
        for (size_t i = 0; i < a.points.size(); ++i) {
            CHECK(a.points[i].x == b.points[i].x);
            CHECK(a.points[i].y == b.points[i].y);
        }
    }
}

TEST_CASE("network JSON loader rejects unknown kinds and bad references") {
    CHECK_THROWS_AS(network_from_json_text(R"({"vertices":[
        {"id":0,"x":0,"y":0,"kind":"quadruple"}],"segments":[]})"),
                    NetworkError);
    CHECK_THROWS_AS(network_from_json_text("not json at all"), NetworkError);
    CHECK_THROWS_AS(network_from_json_text(R"({"vertices":[],"segments":[
        {"id":0,"from":0,"to":1,"points":[[0,0],[1,0]]}]})"),
                    NetworkError);
}

TEST_CASE("hausdorff distance between concentric circles is the gap") {
    const auto a = make_circle({0, 0}, 1.0, 0.01);
    const auto b = make_circle({0, 0}, 1.1, 0.01);
    CHECK(hausdorff_distance(a, b) == doctest::Approx(0.1).epsilon(1e-3));
    CHECK(hausdorff_distance(a, b, 2.0, {0.0, 0.0}) ==
          doctest::Approx(0.1).epsilon(1e-3));
    CHECK(hausdorff_distance(a, a) == doctest::Approx(0.0));
}

TEST_CASE("lens arcs meet the axis rays in exact balance") {
    const auto net = make_lens(1.0, 2.0, 0.01);
    const auto rep = validate(net);
    CHECK(rep.regular);
    CHECK(rep.max_triple_defect < 1e-6);
    // Arc radius 2w/sqrt(3): total arc length 2 * R * (2 pi/3) each side.
    const double R = 2.0 / std::sqrt(3.0);
    const double arcs = 2.0 * R * (2.0 * kPi / 3.0);
    CHECK(net.total_length() == doctest::Approx(arcs + 4.0).epsilon(1e-3));
}
