#include <netflow/diagnostics.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace netflow {

namespace {
constexpr double kLogTruncation = 37.0;  // exp(-37) < 1e-16
}

double density_kernel(double dist2, double tau) {
    if (tau <= 0.0) return 0.0;
    const double arg = dist2 / (4.0 * tau);
    if (arg > kLogTruncation) return 0.0;
    return std::exp(-arg) / std::sqrt(4.0 * kPi * tau);
}

DensityValue gaussian_density(const Network& net, const Vec2& x0, double r) {
    DensityValue out;
    const double tau = r * r;
    const double reach2 = 4.0 * tau * kLogTruncation;
    double max_near_spacing = 0.0;
    for (const auto& seg : net.segments) {
        const auto& p = seg.points;
        if (p.empty()) continue;
        double w_prev = density_kernel(norm2(p[0] - x0), tau);
        for (size_t i = 0; i + 1 < p.size(); ++i) {
            const double w_next = density_kernel(norm2(p[i + 1] - x0), tau);
            if (w_prev > 0.0 || w_next > 0.0) {
                const double len = dist(p[i], p[i + 1]);
                out.value += 0.5 * (w_prev + w_next) * len;
                if (norm2(p[i] - x0) < reach2)
                    max_near_spacing = std::max(max_near_spacing, len);
            }
            w_prev = w_next;
        }
    }
    out.under_resolved = r < 2.0 * max_near_spacing;
    return out;
}

HuiskenTrace huisken_trace(const std::vector<std::pair<double, Network>>& snaps,
                           const Vec2& x0, double t0) {
    HuiskenTrace trace;
    for (const auto& [t, net] : snaps) {
        if (t >= t0) continue;
        const double gap = t0 - t;
        TracePoint pt;
        pt.t = t;
        pt.theta = gaussian_density(net, x0, std::sqrt(gap)).value;
        double defect = 0.0;
        for (const auto& seg : net.segments) {
            if (seg.points.size() < 3) continue;
            const auto prof = curvature_profile(seg);
            const auto& p = seg.points;
            auto integrand = [&](size_t i) {
                const double w = density_kernel(norm2(p[i] - x0), gap);
                if (w == 0.0) return 0.0;
                const Vec2 d = p[i] - x0;
                const Vec2 dperp = d - dot(d, prof[i].tau) * prof[i].tau;
                return norm2(prof[i].kvec + dperp / (2.0 * gap)) * w;
            };
            double g_prev = integrand(0);
            for (size_t i = 0; i + 1 < p.size(); ++i) {
                const double g_next = integrand(i + 1);
                defect += 0.5 * (g_prev + g_next) * dist(p[i], p[i + 1]);
                g_prev = g_next;
            }
        }
        pt.defect = defect;
        trace.points.push_back(pt);
    }
    for (size_t i = 1; i < trace.points.size(); ++i)
        trace.max_increase = std::max(
            trace.max_increase, trace.points[i].theta - trace.points[i - 1].theta);
    return trace;
}

namespace {

// Raw tangent angles per marker in traversal order, unwrapped continuously.
std::vector<double> unwrapped_angles(const std::vector<Vec2>& p) {
    const size_t n = p.size();
    std::vector<Vec2> tans(n);
    if (n == 2) {
        tans[0] = tans[1] = normalized(p[1] - p[0]);
    } else {
        for (size_t i = 0; i < n; ++i) {
            if (i == 0)
                tans[i] = one_sided_tangent(p[0], p[1], p[2], dist(p[0], p[1]),
                                            dist(p[1], p[2]));
            else if (i == n - 1)
                tans[i] = -one_sided_tangent(p[n - 1], p[n - 2], p[n - 3],
                                             dist(p[n - 1], p[n - 2]),
                                             dist(p[n - 2], p[n - 3]));
            else
                tans[i] = p[i + 1] - p[i - 1];
            tans[i] = normalized(tans[i]);
        }
    }
    std::vector<double> out(n);
    out[0] = angle_of(tans[0]);
    for (size_t i = 1; i < n; ++i)
        out[i] = out[i - 1] + wrap_angle(angle_of(tans[i]) - out[i - 1]);
    return out;
}

struct Traversal {
    int seg_idx;
    bool forward;    // traversed from `from` to `to`
    double start_theta_raw;  // raw angle entering the segment
};

// BFS over the tree from the root; visit() is called once per segment with
// the traversal orientation and the value at the entry vertex.
template <typename Visit>
void traverse_tree(const Network& net, int root_vertex, Visit&& visit) {
    if (!net.has_vertex(root_vertex))
        throw NetworkError("root vertex " + std::to_string(root_vertex) +
                           " not found");
    std::set<int> visited_vertices{root_vertex};
    std::set<int> visited_segments;
    std::deque<int> frontier{root_vertex};
    while (!frontier.empty()) {
        const int vid = frontier.front();
        frontier.pop_front();
        for (auto [si, at_from] : net.incident_ends(vid)) {
            const Segment& seg = net.segments[si];
            if (visited_segments.count(seg.id)) continue;
            visited_segments.insert(seg.id);
            const int other = at_from ? seg.to : seg.from;
            if (visited_vertices.count(other))
                throw NetworkError("not tree-like: cycle through segment " +
                                   std::to_string(seg.id));
            visited_vertices.insert(other);
            visit(si, at_from, vid);
            frontier.push_back(other);
        }
    }
    if (visited_segments.size() != net.segments.size())
        throw NetworkError("network is not connected from root vertex " +
                           std::to_string(root_vertex));
}

}  // namespace

MarkerField theta_field(const Network& net, int root_vertex) {
    MarkerField field;
    field.root = root_vertex;
    // Corrected angle value at each visited vertex (continuity reference).
    std::map<int, double> vertex_theta;
    bool root_seeded = false;

    traverse_tree(net, root_vertex, [&](int si, bool forward, int entry_vertex) {
        const Segment& seg = net.segments[si];
        std::vector<Vec2> pts = seg.points;
        if (!forward) std::reverse(pts.begin(), pts.end());
        std::vector<double> ang = unwrapped_angles(pts);

        double shift;
        if (!root_seeded && entry_vertex == root_vertex) {
            // Root gauge: principal value of the root tangent angle.
            shift = wrap_angle(ang[0]) - ang[0];
            root_seeded = true;
        } else {
            const double ref = vertex_theta.at(entry_vertex);
            // pi/3-multiple correction restoring continuity at the junction.
            const double m = std::round((ref - ang[0]) / (kPi / 3.0));
            shift = m * (kPi / 3.0);
        }
        for (double& a : ang) a += shift;
        if (!vertex_theta.count(entry_vertex)) vertex_theta[entry_vertex] = ang[0];
        const int exit_vertex = forward ? seg.to : seg.from;
        vertex_theta[exit_vertex] = ang.back();

        if (!forward) std::reverse(ang.begin(), ang.end());
        field.per_segment[seg.id] = std::move(ang);
    });
    return field;
}

MarkerField beta_field(const Network& net, int root_vertex) {
    MarkerField field;
    field.root = root_vertex;
    std::map<int, double> vertex_beta{{root_vertex, 0.0}};

    traverse_tree(net, root_vertex, [&](int si, bool forward, int entry_vertex) {
        const Segment& seg = net.segments[si];
        std::vector<Vec2> pts = seg.points;
        if (!forward) std::reverse(pts.begin(), pts.end());
        std::vector<double> val(pts.size());
        val[0] = vertex_beta.at(entry_vertex);
        for (size_t i = 1; i < pts.size(); ++i)
            val[i] = val[i - 1] + cross(pts[i - 1], pts[i]);
        const int exit_vertex = forward ? seg.to : seg.from;
        vertex_beta[exit_vertex] = val.back();
        if (!forward) std::reverse(val.begin(), val.end());
        field.per_segment[seg.id] = std::move(val);
    });
    return field;
}

WeightedFunctional weighted_functional(
    const Network& net, double t, const std::function<double(double)>& f,
    const std::function<double(double)>& fpp, const Vec2& x0, double t0,
    int root_vertex, double beta_gauge_shift) {
    if (t >= t0) throw NetworkError("weighted functional requires t < t0");
    const auto theta = theta_field(net, root_vertex);
    const auto beta = beta_field(net, root_vertex);
    const double gap = t0 - t;

    WeightedFunctional out;
    double max_radius = 0.0;
    for (const auto& seg : net.segments) {
        const auto& p = seg.points;
        if (p.size() < 2) continue;
        const auto prof = curvature_profile(seg);
        const auto& th = theta.per_segment.at(seg.id);
        const auto& be = beta.per_segment.at(seg.id);
        auto eval = [&](size_t i, double& v, double& dc, double& dk) {
            const double w = density_kernel(norm2(p[i] - x0), gap);
            v = dc = dk = 0.0;
            max_radius = std::max(max_radius, norm(p[i]));
            if (w == 0.0) return;
            const double alpha = be[i] + beta_gauge_shift + 2.0 * t * th[i];
            const Vec2 xperp = p[i] - dot(p[i], prof[i].tau) * prof[i].tau;
            const Vec2 d = p[i] - x0;
            const Vec2 dperp = d - dot(d, prof[i].tau) * prof[i].tau;
            v = f(alpha) * w;
            dc = fpp(alpha) * norm2(xperp - 2.0 * t * prof[i].kvec) * w;
            dk = f(alpha) * norm2(prof[i].kvec + dperp / (2.0 * gap)) * w;
        };
        double v0, c0, k0, v1, c1, k1;
        eval(0, v0, c0, k0);
        for (size_t i = 0; i + 1 < p.size(); ++i) {
            eval(i + 1, v1, c1, k1);
            const double len = dist(p[i], p[i + 1]);
            out.value += 0.5 * (v0 + v1) * len;
            out.dissipation_convexity += 0.5 * (c0 + c1) * len;
            out.dissipation_kernel += 0.5 * (k0 + k1) * len;
            v0 = v1; c0 = c1; k0 = k1;
        }
    }
    out.domain_tag = "truncated:R=" + std::to_string(max_radius);
    return out;
}

LocalizedFunctional localized_functional(const Network& net, double t,
                                         const Vec2& x0, double t0,
                                         int root_vertex,
                                         double beta_gauge_shift,
                                         double r_inner, double r_outer) {
    if (t >= t0) throw NetworkError("localized functional requires t < t0");
    const auto theta = theta_field(net, root_vertex);
    const auto beta = beta_field(net, root_vertex);
    const double gap = t0 - t;

    LocalizedFunctional out;
    for (const auto& seg : net.segments) {
        const auto& p = seg.points;
        if (p.size() < 2) continue;
        const auto prof = curvature_profile(seg);
        const auto& th = theta.per_segment.at(seg.id);
        const auto& be = beta.per_segment.at(seg.id);
        auto eval = [&](size_t i, double& v, double& d, double& a) {
            v = d = a = 0.0;
            const double w = density_kernel(norm2(p[i] - x0), gap);
            if (w == 0.0) return;
            const double radius = norm(p[i]);
            const double phi = smooth_cutoff(radius, r_inner, r_outer);
            const double alpha = be[i] + beta_gauge_shift + 2.0 * t * th[i];
            const Vec2 xperp = p[i] - dot(p[i], prof[i].tau) * prof[i].tau;
            v = phi * alpha * alpha * w;
            d = phi * norm2(xperp - 2.0 * t * prof[i].kvec) * w;
            if (radius > r_inner && radius < r_outer) a = alpha * alpha * w;
        };
        double v0, d0, a0, v1, d1, a1;
        eval(0, v0, d0, a0);
        for (size_t i = 0; i + 1 < p.size(); ++i) {
            eval(i + 1, v1, d1, a1);
            const double len = dist(p[i], p[i + 1]);
            out.value += 0.5 * (v0 + v1) * len;
            out.dissipation += 0.5 * (d0 + d1) * len;
            out.annulus_term += 0.5 * (a0 + a1) * len;
            v0 = v1; d0 = d1; a0 = a1;
        }
    }
    return out;
}

double expander_defect(const Network& net, double R) {
    double acc = 0.0;
    const double R2 = R * R;
    for (const auto& seg : net.segments) {
        const auto& p = seg.points;
        if (p.size() < 3) continue;
        const auto prof = curvature_profile(seg);
        auto integrand = [&](size_t i) {
            const Vec2 xperp = p[i] - dot(p[i], prof[i].tau) * prof[i].tau;
            return norm2(prof[i].kvec - xperp);
        };
        double g_prev = integrand(0);
        for (size_t i = 0; i + 1 < p.size(); ++i) {
            const double g_next = integrand(i + 1);
            if (norm2(0.5 * (p[i] + p[i + 1])) <= R2)
                acc += 0.5 * (g_prev + g_next) * dist(p[i], p[i + 1]);
            g_prev = g_next;
        }
    }
    return acc;
}

double junction_separation(const Network& net, const Vec2& center, double R) {
    std::vector<Vec2> js;
    for (const auto& v : net.vertices)
        if (v.kind == VertexKind::Triple && dist(v.pos, center) <= R)
            js.push_back(v.pos);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < js.size(); ++i)
        for (size_t j = i + 1; j < js.size(); ++j)
            best = std::min(best, dist(js[i], js[j]));
    return best;
}

Network transformed(const Network& net, double scale, double angle,
                    const Vec2& shift) {
    Network out = net;
    auto map = [&](const Vec2& p) { return scale * rotate(p, angle) + shift; };
    for (auto& v : out.vertices) v.pos = map(v.pos);
    for (auto& s : out.segments)
        for (auto& p : s.points) p = map(p);
    return out;
}

}  // namespace netflow
