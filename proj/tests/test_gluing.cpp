#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <netflow/gluing.hpp>
#include <netflow/shapes.hpp>

using namespace netflow;

namespace {

const std::vector<double> kSkewCone{0.2, 2.1, 4.5};

const ExpanderSolution& skew_solution() {
    static const ExpanderSolution sol = solve_triod_expander(kSkewCone);
    return sol;
}

const DecayReport& skew_decay() {
    static const DecayReport rep = verify_decay(skew_solution());
    return rep;
}

bool contains_bitwise(const Network& net, const Vec2& p) {
    for (const auto& seg : net.segments)
        for (const auto& q : seg.points)
            if (q.x == p.x && q.y == p.y) return true;
    return false;
}

}  // namespace

TEST_CASE("cone extraction reads angles and graph constants off a junction") {
    const auto lens = make_lens(1.0, 3.0, 0.01);
    const auto cone = extract_cone(lens, 0);
    CHECK(cone.vertex_id == 0);
    CHECK(dist(cone.center, {-1.0, 0.0}) < 1e-14);
    REQUIRE(cone.branches.size() == 3);
    for (size_t i = 1; i < cone.branches.size(); ++i)
        CHECK(cone.branches[i - 1].angle < cone.branches[i].angle);
    CHECK(cone.branches[0].angle == doctest::Approx(-kPi / 3.0).epsilon(1e-5));
    CHECK(cone.branches[1].angle == doctest::Approx(kPi / 3.0).epsilon(1e-5));
    CHECK(cone.branches[2].angle == doctest::Approx(kPi).epsilon(1e-5));

    // Arcs stop being graphical at the turning point, one circle radius out.
    const double R = 2.0 / std::sqrt(3.0);
    CHECK(cone.r_graph == doctest::Approx(R).epsilon(0.02));
    CHECK(cone.rescale == doctest::Approx(4.0 / R).epsilon(0.02));
    CHECK(cone.branches[0].c_height > 0.4);
    CHECK(cone.branches[0].c_height < 1.0);
    CHECK(cone.branches[2].c_height < 1e-10);  // the straight ray
    CHECK(cone.branches[2].c_slope < 1e-10);

    const auto angles = cone.angles();
    REQUIRE(angles.size() == 3);
    CHECK(angles[1] == cone.branches[1].angle);
}

TEST_CASE("straight cone glues onto itself silently") {
    const double a0 = kPi / 2.0;
    const std::vector<double> angles{a0, a0 + 2.0 * kPi / 3.0,
                                     a0 - 2.0 * kPi / 3.0};
    const auto seed = make_star({0, 0}, angles, 6.0, 0.02);
    const auto sol = solve_triod_expander(angles);
    REQUIRE(sol.converged);
    const auto decay = verify_decay(sol);
    CHECK(decay.r0 == doctest::Approx(1.0));

    const double s = 1e-3;
    const auto rep = glue(seed, 0, sol, decay, s);
    CHECK(rep.s == s);
    CHECK(rep.scale == doctest::Approx(std::sqrt(2.0 * s)).epsilon(1e-14));
    CHECK(rep.splice_inner == doctest::Approx(std::pow(s, 0.25)).epsilon(1e-14));
    CHECK(rep.splice_outer == doctest::Approx(2.0 * rep.splice_inner).epsilon(1e-14));
    CHECK(rep.max_angle_mismatch < 1e-9);
    CHECK(rep.asymptotic_regime);
    CHECK(rep.core_markers > 2);
    CHECK(rep.splice_height_const < 1e-10);
    CHECK(rep.splice_slope_const < 1e-10);
    CHECK(validate(rep.net).regular);

    const auto hyp = verify_hypotheses(rep, sol);
    for (double d : hyp.expander_distance) CHECK(d < 1e-9);
    // Balls about the junction hold three rays: length/r peaks at 3.
    CHECK(hyp.length_ratio > 2.5);
    CHECK(hyp.length_ratio < 3.5);
    CHECK(hyp.theta_beta_growth < 4.0);
    CHECK(hyp.graph_height_const == rep.splice_height_const);
}

TEST_CASE("seed markers outside the splice zone survive bit-for-bit") {
    const auto seed = make_star({0, 0}, kSkewCone, 6.0, 0.02);
    const auto rep = glue(seed, 0, skew_solution(), skew_decay(), 1e-3);
    int checked = 0;
    for (const auto& seg : seed.segments)
        for (const auto& p : seg.points)
            if (norm(p) > rep.splice_outer * 1.0001) {
                REQUIRE(contains_bitwise(rep.net, p));
                ++checked;
            }
    CHECK(checked > 100);
}

TEST_CASE("glued junction is regular and tracks the requested scale") {
    const auto seed = make_star({0, 0}, kSkewCone, 6.0, 0.02);
    const auto& sol = skew_solution();
    for (double s : {1e-2, 1e-3, 1e-4}) {
        const auto rep = glue(seed, 0, sol, skew_decay(), s);
        CHECK(validate(rep.net).regular);
        CHECK(rep.max_angle_mismatch < 1e-8);
        // The glued junction sits at scale * (expander junction).
        bool found = false;
        for (const auto& v : rep.net.vertices)
            if (v.id == 0) {
                CHECK(dist(v.pos, rep.scale * sol.junctions[0]) < 1e-14);
                found = true;
            }
        CHECK(found);
        CHECK(rep.asymptotic_regime ==
              (rep.r0 * rep.scale <= rep.splice_inner));
    }
}

TEST_CASE("rescaled glue converges to the expander as s shrinks") {
    const auto seed = make_star({0, 0}, kSkewCone, 6.0, 0.02);
    const auto& sol = skew_solution();
    std::vector<double> far_distance;
    for (double s : {1e-2, 1e-3, 1e-4}) {
        const auto rep = glue(seed, 0, sol, skew_decay(), s);
        const auto hyp = verify_hypotheses(rep, sol);
        CHECK(hyp.expander_distance[0] < 1e-5);  // core ball is pure expander
        CHECK(hyp.expander_distance[0] <= hyp.expander_distance[2] + 1e-12);
        far_distance.push_back(hyp.expander_distance[2]);
    }
    CHECK(far_distance[0] > far_distance[1]);
    CHECK(far_distance[1] > far_distance[2]);
}

TEST_CASE("glue rejects inconsistent inputs") {
    const auto seed = make_star({0, 0}, kSkewCone, 6.0, 0.02);
    const auto& sol = skew_solution();
    const auto& decay = skew_decay();

    CHECK_THROWS_AS(glue(seed, 0, sol, decay, -1.0), NetworkError);
    CHECK_THROWS_AS(glue(seed, 0, sol, decay, 50.0), NetworkError);

    ExpanderSolution unconverged;
    CHECK_THROWS_AS(glue(seed, 0, unconverged, decay, 1e-3), NetworkError);

    const auto four = make_star({0, 0}, {0.3, 1.8, 3.3, 4.8}, 6.0, 0.02);
    CHECK_THROWS_AS(glue(four, 0, sol, decay, 1e-3), NetworkError);

    const auto shifted = make_star({0, 0}, {0.25, 2.1, 4.5}, 6.0, 0.02);
    CHECK_THROWS_AS(glue(shifted, 0, sol, decay, 1e-3), NetworkError);

    const auto stub = make_star({0, 0}, kSkewCone, 0.3, 0.02);
    CHECK_THROWS_AS(glue(stub, 0, sol, decay, 1e-3), NetworkError);
}

TEST_CASE("family runs share scale-invariant gauges across s") {
    const auto seed = make_star({0, 0}, kSkewCone, 6.0, 0.02);
    FamilyOpts opts;
    opts.s_values = {4e-3, 1e-3};
    opts.horizon = 0.02;
    opts.spacing = 0.008;
    opts.snapshots = 2;
    opts.density_grid = 5;
    opts.density_scales = {0.1};
    const auto family = run_family(seed, 0, skew_solution(), skew_decay(), opts);
    REQUIRE(family.size() == 2);
    for (const auto& fm : family) {
        CHECK_FALSE(fm.traj.halted);
        CHECK(fm.events.empty());
        CHECK(fm.traj.final_t == doctest::Approx(opts.horizon).epsilon(1e-9));
        CHECK(fm.sup_k_sqrt_t > 0.0);
        CHECK(fm.sup_k_sqrt_t < 5.0);
        CHECK(fm.min_seg_over_sqrt_t > 0.0);
        CHECK(fm.max_density > 1.0);
        CHECK(fm.max_density < 1.6);
        CHECK(fm.density_resolved);
        CHECK(fm.hypotheses.length_ratio > 1.0);
    }
    // Smaller s starts closer to the expander in the rescaled frame.
    CHECK(family[1].hypotheses.expander_distance[2] <
          family[0].hypotheses.expander_distance[2]);
}
