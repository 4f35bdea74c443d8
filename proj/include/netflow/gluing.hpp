#pragma once

#include <netflow/diagnostics.hpp>
#include <netflow/expander.hpp>
#include <netflow/flow.hpp>
#include <netflow/network.hpp>

#include <array>
#include <string>
#include <vector>

namespace netflow {

// One branch of a network near a (possibly irregular) junction, viewed as a
// graph over the half-line in its outgoing tangent direction.
struct ConeBranch {
    int segment_id = -1;
    bool at_from = true;   // junction sits at the from-end of the segment
    double angle = 0.0;    // direction of the half-line
    double r_graph = 0.0;  // largest radius with strictly increasing abscissa
    double c_height = 0.0; // sup |eta| / xi^2 over the graphical part
    double c_slope = 0.0;  // sup |d eta / d xi| / xi over the graphical part
};

struct ConeData {
    int vertex_id = -1;
    Vec2 center{0.0, 0.0};
    std::vector<ConeBranch> branches;  // sorted by angle
    double r_graph = 0.0;              // min over branches, capped at 5
    double rescale = 1.0;              // suggested pre-scaling (4 / r_graph if < 4)

    std::vector<double> angles() const;
};

// Measures how the network opens up around `vertex_id`: per-branch ray
// directions and graph constants. Throws if a branch is not graphical at all.
ConeData extract_cone(const Network& net, int vertex_id);

struct GlueReport {
    double s = 0.0;
    int vertex_id = -1;
    Vec2 center{0.0, 0.0};
    double scale = 0.0;          // sqrt(2 s)
    double splice_inner = 0.0;   // s^{1/4}: pure expander inside
    double splice_outer = 0.0;   // 2 s^{1/4}: pure seed outside
    double max_angle_mismatch = 0.0;  // expander asymptote vs. cone ray
    double r0 = 0.0;                  // decay radius used for regime check
    bool asymptotic_regime = false;   // r0 * sqrt(2 s) <= s^{1/4}
    int core_markers = 0;             // markers taken verbatim from the expander
    double splice_height_const = 0.0; // sup |eta|/xi^2 over the splice samples
    double splice_slope_const = 0.0;  // sup |d eta/d xi|/xi over the splice samples
    Network net;
};

// Replaces the junction `vertex_id` of `seed` by the rescaled expander and
// interpolates between the two across the annulus s^{1/4} <= |x| <= 2 s^{1/4}.
// Seed markers beyond the splice zone are kept bit-for-bit. The expander must
// have been solved for this junction's ray angles.
GlueReport glue(const Network& seed, int vertex_id, const ExpanderSolution& sol,
                const DecayReport& decay, double s);

struct HypothesisReport {
    double length_ratio = 0.0;        // sup over centers/radii of length/(2r)
    double theta_beta_growth = 0.0;   // sup (|theta|+|beta|) / (1+|x|^2)
    double graph_height_const = 0.0;  // sup |eta|/xi^2 over the splice zone
    double graph_slope_const = 0.0;   // sup |d eta/d xi|/xi over the splice zone
    std::array<double, 3> expander_distance{0.0, 0.0, 0.0};  // Hausdorff on
    // B_2, B_4, B_8 between the glued network scaled by 1/sqrt(2s) and the
    // expander itself.
};

HypothesisReport verify_hypotheses(const GlueReport& glued,
                                   const ExpanderSolution& sol);

struct FamilyMember {
    double s = 0.0;
    double sup_k_sqrt_t = 0.0;        // max over t>0 of sup|k| * sqrt(t)
    double min_seg_over_sqrt_t = 0.0; // min over t>0 of min segment / sqrt(t)
    double max_density = 0.0;         // over probe grid and scales, all snapshots
    bool density_resolved = true;
    GlueReport glue;
    HypothesisReport hypotheses;
    Trajectory traj;
    std::vector<std::string> events;
};

struct FamilyOpts {
    std::vector<double> s_values{1e-2, 4e-3, 1e-3};
    double horizon = 0.05;
    double spacing = 0.01;   // resampling target before evolving
    int snapshots = 5;
    int density_grid = 9;    // probe grid is density_grid^2 over [-1,1]^2
    std::vector<double> density_scales{0.1, 0.025};  // r^2 = scale * t
    StepControls controls;
};

// Glues the expander into the seed at each requested scale, evolves every
// glued network to the common horizon and collects scale-invariant gauges.
std::vector<FamilyMember> run_family(const Network& seed, int vertex_id,
                                     const ExpanderSolution& sol,
                                     const DecayReport& decay,
                                     const FamilyOpts& opts);

}  // namespace netflow
