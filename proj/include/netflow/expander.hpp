#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <netflow/network.hpp>

namespace netflow {

// One branch of a self-expanding configuration, integrated in arclength from
// its junction: x' = tau(phi), phi' = <x, J tau>.
struct BranchTrace {
    std::vector<Vec2> points;
    std::vector<double> phi;  // unwrapped tangent angle
    std::vector<double> s;    // arclength
    bool reached_target = false;

    double terminal_angle() const { return phi.empty() ? 0.0 : phi.back(); }
};

struct IntegratorOpts {
    double tol = 1e-10;
    double max_step = 5e-4;
    double max_arclength = 100.0;
};

// Integrate outward until |x| >= r_max (or s_max, whichever first).
BranchTrace branch_integrate(const Vec2& start, double phi0, double r_max,
                             const IntegratorOpts& opts = {});

// Integrate for exactly the given arclength.
BranchTrace branch_integrate_length(const Vec2& start, double phi0,
                                    double length,
                                    const IntegratorOpts& opts = {});

// sup over interior samples of |dphi/ds - <x,nu>| with dphi/ds from
// five-point finite differences on the stored (possibly nonuniform) grid.
double branch_residual_sup(const BranchTrace& b);

struct MultiStartEntry {
    int seed = -1;
    bool converged = false;
    double residual = 0.0;
    Vec2 junction;
    double frame_angle = 0.0;
    int iterations = 0;
};

struct ExpanderSolution {
    bool converged = false;
    std::vector<double> ray_angles;       // targets, sorted ascending
    std::vector<Vec2> junctions;          // 1 (triod) or 2 (tree)
    std::vector<double> frame_angles;
    std::vector<int> junction_of_ray;     // per ray angle, owning junction
    std::vector<BranchTrace> ray_branches;
    BranchTrace internal[2];              // tree: halves from each junction
    bool has_internal = false;
    double shoot_residual = 0.0;
    double residual_sup = 0.0;            // defining-equation residual
    std::vector<MultiStartEntry> multistart;
};

struct ShootOpts {
    double r_max = 8.0;
    double ode_tol = 1e-10;
    double newton_step = 2e-3;   // ODE max step during the Newton iteration
    double output_step = 5e-4;   // ODE max step for the converged solution
    double shoot_tol = 1e-11;
    int max_iterations = 60;
};

// Tree-like self-expanding triod asymptotic to the three given ray
// directions.  Multi-start damped Newton on (junction, frame angle); the
// balanced frame carries the 120-degree condition exactly.
ExpanderSolution solve_triod_expander(const std::vector<double>& angles,
                                      const ShootOpts& opts = {});

// 4-ray tree with two junctions: rays pairing[0],pairing[1] attach to the
// first junction, pairing[2],pairing[3] to the second, joined by an internal
// branch matched in position and tangent at its midpoint.
ExpanderSolution solve_tree_expander(const std::vector<double>& angles,
                                     const std::array<int, 4>& pairing,
                                     const ShootOpts& opts = {});

struct GraphProfile {
    std::vector<double> x, u, up;
    bool decaying = true;      // false when the integration blew up
    bool sign_structure = true;  // u and u - x u' keep one sign, u' opposite
    std::string note;
};

// Profile equation of a graphical expander branch over a ray:
//   u'' = (1 + u'^2)(u - x u').
GraphProfile graph_profile(double x0, double u0, double up0, double x1,
                           double tol = 1e-10);

struct BranchDecay {
    double C_u = 0.0;    // sup |u| e^{x^2/2} on the fit window
    double C_up = 0.0;   // sup |u'| x e^{x^2/2}
    double C_upp = 0.0;  // sup |u''| e^{x^2/2}
    double fit_lo = 0.0, fit_hi = 0.0;
    bool monotone_tail = true;
    bool straight = false;
};

struct DecayReport {
    std::vector<BranchDecay> branches;
    double r0 = 1.0;  // smallest radius with every tail bound below 1e-8
};

// Graph-over-asymptote decay constants of each ray branch.
DecayReport verify_decay(const ExpanderSolution& sol);

// Materialise the solution as a network: junction vertices, branch segments
// trimmed at |x| <= r_trunc (0: keep full extent), endpoint tips.
Network expander_to_network(const ExpanderSolution& sol, double r_trunc = 0.0);

}  // namespace netflow
