#pragma once

#include <functional>
#include <vector>

#include <netflow/network.hpp>

namespace netflow {

// Builders for the stock configurations used by experiments and tests.
// Marker spacing is approximately h everywhere.

// n straight rays from `center` at the given angles, each of the given
// length, meeting at a triple (n==3) or multiple vertex; outer ends are
// endpoint vertices with ids 1..n, the junction has id 0.
Network make_star(const Vec2& center, const std::vector<double>& angles,
                  double length, double h, bool force_multiple = false);

// Closed circle as two half arcs joined by two 2-valent multiple vertices
// (smooth connection points).
Network make_circle(const Vec2& center, double radius, double h);

// Closed curve r(phi) given in polar form about `center` (same two-arc
// representation as make_circle).
Network make_polar_curve(const Vec2& center, const std::function<double(double)>& r,
                         double h);

// Single segment sampling y = f(x) on [x0, x1] with endpoint vertices.
Network make_graph_curve(const std::function<double(double)>& f, double x0,
                         double x1, double h);

// Symmetric lens: two circular arcs between two triple junctions on the
// x-axis at +-half_width, each junction continuing into a straight
// horizontal ray.  Arc departure angles are +-60 degrees so the junctions
// are exactly balanced.
Network make_lens(double half_width, double ray_length, double h);

// Append a polyline as one segment between two existing or new vertices.
int add_segment(Network& net, int from, int to, std::vector<Vec2> pts);
int add_vertex(Network& net, const Vec2& pos, VertexKind kind);

// Straight polyline sampler.
std::vector<Vec2> line_points(const Vec2& a, const Vec2& b, double h);

}  // namespace netflow
