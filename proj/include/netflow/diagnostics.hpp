#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <netflow/network.hpp>

namespace netflow {

// Backward-heat kernel weight used by all density integrals:
//   (4 pi tau)^(-1/2) * exp(-|x-x0|^2 / (4 tau)),  tau = scale^2 or t0 - t.
// Weights below 1e-16 of the peak are truncated.
double density_kernel(double dist2, double tau);

struct DensityValue {
    double value = 0.0;
    bool under_resolved = false;  // scale < 2 * local marker spacing
};

// Gaussian density of the network at center x0 and scale r (trapezoid rule
// over marker chords inside the kernel truncation radius).
DensityValue gaussian_density(const Network& net, const Vec2& x0, double r);

struct TracePoint {
    double t = 0.0;
    double theta = 0.0;   // density at scale sqrt(t0 - t)
    double defect = 0.0;  // integral of |k + (x-x0)^perp/(2(t0-t))|^2 rho
};

struct HuiskenTrace {
    std::vector<TracePoint> points;
    double max_increase = 0.0;  // largest positive jump between samples
};

// Monotone trace along a trajectory of snapshots (t, network), t < t0.
HuiskenTrace huisken_trace(const std::vector<std::pair<double, Network>>& snaps,
                           const Vec2& x0, double t0);

// Per-marker scalar field, indexed by segment id then marker index.
struct MarkerField {
    int root = -1;
    std::map<int, std::vector<double>> per_segment;
};

// Continuous tangent-angle field on a tree-like network.  Raw angles are
// corrected by multiples of pi/3 at junctions (greedy: residual jump under
// pi/6 at a balanced junction); the root value is the principal tangent
// angle there.  Throws when a cycle is reachable from the root.
MarkerField theta_field(const Network& net, int root_vertex);

// Primitive of the Liouville form x dy - y dx along the network, anchored to
// 0 at the root (exact chord integrals).  Same tree requirement.
MarkerField beta_field(const Network& net, int root_vertex);

struct WeightedFunctional {
    double value = 0.0;
    double dissipation_convexity = 0.0;  // int f''(a) |x_perp - 2t k|^2 rho
    double dissipation_kernel = 0.0;     // int f(a)  |k + (x-x0)^perp/(2(t0-t))|^2 rho
    std::string domain_tag;
};

// Weighted monotone quantity int f(beta + 2t theta) rho_{x0,t0} together
// with its two dissipation integrals.  beta_gauge_shift is added to beta
// (used to carry the trajectory gauge along a flow).
WeightedFunctional weighted_functional(
    const Network& net, double t, const std::function<double(double)>& f,
    const std::function<double(double)>& fpp, const Vec2& x0, double t0,
    int root_vertex, double beta_gauge_shift = 0.0);

struct LocalizedFunctional {
    double value = 0.0;        // int phi(|x|) (beta+2t theta)^2 rho
    double dissipation = 0.0;  // int phi |x_perp - 2t k|^2 rho
    double annulus_term = 0.0; // int_{r_in<|x|<r_out} (beta+2t theta)^2 rho
};

LocalizedFunctional localized_functional(const Network& net, double t,
                                         const Vec2& x0, double t0,
                                         int root_vertex,
                                         double beta_gauge_shift = 0.0,
                                         double r_inner = 2.0,
                                         double r_outer = 3.0);

// int_{net cap B_R} |kvec - x^perp|^2 ds  (zero exactly on self-expanding
// configurations).
double expander_defect(const Network& net, double R);

// Minimum pairwise distance between triple junctions inside B_R(center);
// +infinity when fewer than two are present.
double junction_separation(const Network& net, const Vec2& center, double R);

// Scaled/rotated/translated copy: p -> scale * R(angle) p + shift.
Network transformed(const Network& net, double scale, double angle,
                    const Vec2& shift);

}  // namespace netflow
