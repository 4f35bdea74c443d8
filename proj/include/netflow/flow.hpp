#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <netflow/network.hpp>

namespace netflow {

enum class EventKind {
    SegmentCollapse,
    LoopCollapse,
    JunctionCollision,
    StepReject,
    BoundaryExit,
    NewtonFailure,
};

std::string to_string(EventKind k);

struct Event {
    EventKind kind;
    double t = 0.0;
    std::string detail;
    bool halting = false;
};

enum class TimeScheme { Explicit, SemiImplicit };

struct StepControls {
    double cfl = 0.25;           // dt = cfl*h_min^2 (explicit) / cfl*h_min (semi-implicit)
    TimeScheme scheme = TimeScheme::Explicit;
    double target_spacing = 0.0; // mesh width h; 0 = take the initial min spacing
    double angle_tol = 1e-3;     // junction balance tolerance for evolved states
    double newton_tol = 1e-9;
    int newton_max_iter = 25;
    int max_step_rejects = 8;
    double collapse_factor = 3.0;   // collapse when a segment drops under factor*h
    double domain_radius = 0.0;     // >0: emit boundary-exit when a marker leaves
    std::vector<int> free_endpoints;  // endpoint vertex ids allowed to move
};

struct FlowState {
    Network net;
    double t = 0.0;
    double h = 0.0;  // mesh width governing dt and collapse thresholds
    StepControls controls;
    std::vector<Event> events;
    bool halted = false;
};

struct JunctionSolveResult {
    bool converged = false;
    Vec2 position;
    double defect = 0.0;
    int iterations = 0;
};

// Reposition the shared end marker of the three branches meeting at the
// triple vertex so the exterior one-sided tangents balance.  Damped Newton in
// the two junction coordinates; ties resolved toward the previous position by
// starting there (or at `start` if given).  Does not modify `net` unless it
// converges.
JunctionSolveResult junction_solve(Network& net, int vertex_id,
                                   double newton_tol = 1e-9, int max_iter = 25,
                                   std::optional<Vec2> start = std::nullopt);

// One accepted time step (internally retrying with halved dt when the
// junction solve diverges).  Returns the dt actually taken; 0 when halted.
// dt_cap > 0 additionally bounds the step (used to land on output times).
double flow_step(FlowState& state, double dt_cap = 0.0);

struct TrajectoryRow {
    double t = 0.0;
    double total_length = 0.0;
    double sup_k = 0.0;
    double min_segment_length = 0.0;
    double junction_defect_max = 0.0;
    std::string event;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    std::vector<std::pair<double, Network>> snapshots;
    std::vector<Event> events;
    double final_t = 0.0;
    bool halted = false;
};

// Run the flow to time T, storing deep snapshots at the requested times
// (plus t=0 and t=T).  Halting events stop the run early; the trajectory is
// still returned.  Throws NetworkError if the initial network fails
// validate() structurally or is not regular.
Trajectory evolve(FlowState& state, double T,
                  const std::vector<double>& snapshot_times = {},
                  int max_rows = 400);

double max_triple_defect(const Network& net);

struct Window {
    Vec2 center;
    double radius = 0.0;
    double axis_angle = 0.0;  // graph direction
};

struct WindowReport {
    bool is_graph = false;
    double lipschitz = 0.0;
    double height = 0.0;  // max |transverse offset - window center offset|
    std::string reason;   // set when not a graph
};

// Graphicality of net within the vertical strip of half-width radius around
// the window center, axis rotated by axis_angle: single crossing component,
// monotone in the axis coordinate, covering the full strip width.
WindowReport graph_window_monitor(const Network& net, const Window& window);

// Abstract-graph cycles (one representative per independent cycle): segment
// ids along each cycle.
std::vector<std::vector<int>> network_cycles(const Network& net);

// Signed shoelace area of the closed polyline formed by a cycle.
double cycle_area(const Network& net, const std::vector<int>& cycle_segments);
double cycle_length(const Network& net, const std::vector<int>& cycle_segments);

}  // namespace netflow
