#include <netflow/network.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <unordered_map>

namespace netflow {

std::string to_string(VertexKind k) {
    switch (k) {
        case VertexKind::Endpoint: return "endpoint";
        case VertexKind::Triple: return "triple";
        case VertexKind::Multiple: return "multiple";
    }
    return "?";
}

VertexKind vertex_kind_from_string(const std::string& s) {
    if (s == "endpoint") return VertexKind::Endpoint;
    if (s == "triple") return VertexKind::Triple;
    if (s == "multiple") return VertexKind::Multiple;
    throw NetworkError("unknown vertex kind \"" + s + "\"");
}

double Segment::length() const {
    double L = 0.0;
    for (size_t i = 1; i < points.size(); ++i) L += dist(points[i - 1], points[i]);
    return L;
}

double Segment::min_spacing() const {
    // Minimise the squared distance; one sqrt at the end.
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < points.size(); ++i)
        m = std::min(m, norm2(points[i] - points[i - 1]));
    return std::sqrt(m);
}

double Segment::max_spacing() const {
    double m = 0.0;
    for (size_t i = 1; i < points.size(); ++i)
        m = std::max(m, dist(points[i - 1], points[i]));
    return m;
}

const Vertex& Network::vertex(int id) const {
    for (const auto& v : vertices)
        if (v.id == id) return v;
    throw NetworkError("vertex id " + std::to_string(id) + " not found");
}

Vertex& Network::vertex(int id) {
    for (auto& v : vertices)
        if (v.id == id) return v;
    throw NetworkError("vertex id " + std::to_string(id) + " not found");
}

const Segment& Network::segment(int id) const {
    for (const auto& s : segments)
        if (s.id == id) return s;
    throw NetworkError("segment id " + std::to_string(id) + " not found");
}

bool Network::has_vertex(int id) const {
    for (const auto& v : vertices)
        if (v.id == id) return true;
    return false;
}

std::vector<std::pair<int, bool>> Network::incident_ends(int vertex_id) const {
    std::vector<std::pair<int, bool>> out;
    for (size_t i = 0; i < segments.size(); ++i) {
        if (segments[i].from == vertex_id) out.emplace_back(int(i), true);
        if (segments[i].to == vertex_id) out.emplace_back(int(i), false);
    }
    return out;
}

double Network::total_length() const {
    double L = 0.0;
    for (const auto& s : segments) L += s.length();
    return L;
}

double Network::min_marker_spacing() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : segments) m = std::min(m, s.min_spacing());
    return m;
}

Vec2 exterior_tangent(const Segment& seg, bool at_from) {
    const auto& p = seg.points;
    if (p.size() < 2) throw NetworkError("segment " + std::to_string(seg.id) +
                                         " has fewer than 2 markers");
    Vec2 t;
    if (p.size() == 2) {
        t = at_from ? p[0] - p[1] : p.back() - p[p.size() - 2];
        return normalized(t);
    }
    Vec2 q0, q1, q2;
    if (at_from) {
        q0 = p[0]; q1 = p[1]; q2 = p[2];
    } else {
        q0 = p[p.size() - 1]; q1 = p[p.size() - 2]; q2 = p[p.size() - 3];
    }
    const double a = dist(q0, q1), b = dist(q1, q2);
    if (a == 0.0 || b == 0.0)
        throw NetworkError("segment " + std::to_string(seg.id) +
                           " has coincident markers near a vertex");
    // Tangent of the fitted quadratic points into the segment; flip it.
    return normalized(-one_sided_tangent(q0, q1, q2, a, b));
}

namespace {

// Uniform-grid spatial hash over chord pieces for near-linear embeddedness
// checking.  Two chords "intersect" when they cross or pass closer than tol
// without sharing a network vertex.
struct ChordRef {
    int seg_idx;
    int piece;  // chord from points[piece] to points[piece+1]
};

bool chords_adjacent(const Network& net, const ChordRef& a, const ChordRef& b) {
    if (a.seg_idx == b.seg_idx) return std::abs(a.piece - b.piece) <= 1;
    const Segment& sa = net.segments[a.seg_idx];
    const Segment& sb = net.segments[b.seg_idx];
    // Pieces touching a shared vertex are legitimately close.
    auto touches = [](const Segment& s, int piece, int vid) {
        const int last = int(s.points.size()) - 2;
        return (piece == 0 && s.from == vid) || (piece == last && s.to == vid);
    };
    for (int vid : {sa.from, sa.to}) {
        if ((sb.from == vid || sb.to == vid) && touches(sa, a.piece, vid) &&
            touches(sb, b.piece, vid))
            return true;
    }
    return false;
}

double chord_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                      const Vec2& b1) {
    auto seg_point = [](const Vec2& p, const Vec2& q, const Vec2& x) {
        const Vec2 d = q - p;
        const double L2 = norm2(d);
        double t = L2 > 0.0 ? dot(x - p, d) / L2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return dist(x, p + t * d);
    };
    const double d1 = cross(a1 - a0, b0 - a0), d2 = cross(a1 - a0, b1 - a0);
    const double d3 = cross(b1 - b0, a0 - b0), d4 = cross(b1 - b0, a1 - b0);
    // Sign tests guarded against rounding noise on nearly collinear chords.
    const double ea = 1e-12 * norm(a1 - a0) * (norm(b0 - a0) + norm(b1 - a0));
    const double eb = 1e-12 * norm(b1 - b0) * (norm(a0 - b0) + norm(a1 - b0));
    const bool straddle_a = (d1 > ea && d2 < -ea) || (d1 < -ea && d2 > ea);
    const bool straddle_b = (d3 > eb && d4 < -eb) || (d3 < -eb && d4 > eb);
    if (straddle_a && straddle_b) return 0.0;  // transversal crossing
    return std::min(std::min(seg_point(a0, a1, b0), seg_point(a0, a1, b1)),
                    std::min(seg_point(b0, b1, a0), seg_point(b0, b1, a1)));
}

std::vector<std::string> embedding_violations(const Network& net, double tol) {
    std::vector<std::string> out;
    std::vector<ChordRef> chords;
    double cell = 0.0;
    for (size_t si = 0; si < net.segments.size(); ++si) {
        const auto& pts = net.segments[si].points;
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            chords.push_back({int(si), int(i)});
            cell = std::max(cell, dist(pts[i], pts[i + 1]));
        }
    }
    if (chords.empty()) return out;
    cell = std::max(cell, tol) * 1.01;
    std::unordered_map<long long, std::vector<int>> grid;
    auto key = [cell](const Vec2& p) {
        const long long ix = (long long)std::floor(p.x / cell);
        const long long iy = (long long)std::floor(p.y / cell);
        return ix * 2000003LL + iy;
    };
    for (size_t c = 0; c < chords.size(); ++c) {
        const auto& pts = net.segments[chords[c].seg_idx].points;
        const Vec2 mid = 0.5 * (pts[chords[c].piece] + pts[chords[c].piece + 1]);
        grid[key(mid)].push_back(int(c));
    }
    std::set<std::pair<int, int>> reported;
    for (size_t c = 0; c < chords.size(); ++c) {
        const auto& pa = net.segments[chords[c].seg_idx].points;
        const Vec2 a0 = pa[chords[c].piece], a1 = pa[chords[c].piece + 1];
        const Vec2 mid = 0.5 * (a0 + a1);
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                const Vec2 probe{mid.x + double(dx) * cell, mid.y + double(dy) * cell};
                auto it = grid.find(key(probe));
                if (it == grid.end()) continue;
                for (int o : it->second) {
                    if (o <= int(c)) continue;
                    if (chords_adjacent(net, chords[c], chords[o])) continue;
                    const auto& pb = net.segments[chords[o].seg_idx].points;
                    const Vec2 b0 = pb[chords[o].piece], b1 = pb[chords[o].piece + 1];
                    if (chord_distance(a0, a1, b0, b1) < tol) {
                        auto pr = std::make_pair(
                            net.segments[chords[c].seg_idx].id,
                            net.segments[chords[o].seg_idx].id);
                        if (reported.insert(pr).second)
                            out.push_back("segments " + std::to_string(pr.first) +
                                          " and " + std::to_string(pr.second) +
                                          " pass within tolerance");
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace

ValidationReport validate(const Network& net, double angle_tol) {
    ValidationReport rep;
    std::set<int> seen_ids;
    for (const auto& v : net.vertices) {
        if (!seen_ids.insert(v.id).second)
            throw NetworkError("duplicate vertex id " + std::to_string(v.id));
    }
    std::set<int> seen_seg;
    for (const auto& s : net.segments) {
        if (!seen_seg.insert(s.id).second)
            throw NetworkError("duplicate segment id " + std::to_string(s.id));
        if (!net.has_vertex(s.from) || !net.has_vertex(s.to))
            throw NetworkError("segment " + std::to_string(s.id) +
                               " references a missing vertex (dangling end)");
        if (s.points.size() < 2)
            throw NetworkError("segment " + std::to_string(s.id) +
                               " has fewer than 2 markers");
        for (size_t i = 1; i < s.points.size(); ++i)
            if (dist(s.points[i - 1], s.points[i]) == 0.0)
                throw NetworkError("segment " + std::to_string(s.id) +
                                   " has duplicate markers at index " +
                                   std::to_string(i - 1));
        const double dfrom = dist(s.points.front(), net.vertex(s.from).pos);
        const double dto = dist(s.points.back(), net.vertex(s.to).pos);
        if (dfrom > 1e-12 || dto > 1e-12)
            throw NetworkError("segment " + std::to_string(s.id) +
                               " endpoints do not coincide with its vertices");
    }

    rep.regular = true;
    rep.min_segment_length = std::numeric_limits<double>::infinity();
    rep.min_marker_spacing = std::numeric_limits<double>::infinity();
    for (const auto& s : net.segments) {
        rep.min_segment_length = std::min(rep.min_segment_length, s.length());
        rep.min_marker_spacing = std::min(rep.min_marker_spacing, s.min_spacing());
    }

    for (const auto& v : net.vertices) {
        const auto ends = net.incident_ends(v.id);
        const int n = int(ends.size());
        if (v.kind == VertexKind::Endpoint && n != 1)
            throw NetworkError("endpoint vertex " + std::to_string(v.id) +
                               " has " + std::to_string(n) + " incident ends");
        if (v.kind == VertexKind::Triple && n != 3)
            throw NetworkError("triple vertex " + std::to_string(v.id) +
                               " has " + std::to_string(n) + " incident ends");
        if (v.kind == VertexKind::Multiple && n < 2)
            throw NetworkError("multiple vertex " + std::to_string(v.id) +
                               " has fewer than 2 incident ends");
        if (n < 2) continue;

        Vec2 sum{0.0, 0.0};
        std::vector<Vec2> tangents;
        for (auto [si, at_from] : ends) {
            const Vec2 T = exterior_tangent(net.segments[si], at_from);
            tangents.push_back(T);
            sum += T;
        }
        JunctionReport jr;
        jr.vertex_id = v.id;
        jr.valence = n;
        jr.defect = norm(sum);
        rep.junctions.push_back(jr);

        if (v.kind == VertexKind::Triple) {
            rep.max_triple_defect = std::max(rep.max_triple_defect, jr.defect);
            if (jr.defect > angle_tol) rep.regular = false;
        } else if (v.kind == VertexKind::Multiple) {
            // A 2-valent join with opposite tangents is a smooth point of the
            // underlying curve, not a genuine multiple point.
            const bool smooth_join = (n == 2 && jr.defect <= angle_tol);
            if (!smooth_join) rep.regular = false;
            for (int i = 0; i < n && smooth_join == false; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (dist(tangents[i], tangents[j]) <= angle_tol)
                        throw NetworkError(
                            "multiple vertex " + std::to_string(v.id) +
                            " has coincident exterior tangents");
        }
    }

    rep.embedding_violations =
        embedding_violations(net, 0.25 * std::min(rep.min_marker_spacing, 1.0e30));
    rep.length_ratio_bound = length_ratio(net);
    return rep;
}

namespace {

std::vector<double> cumulative_arclength(const std::vector<Vec2>& pts) {
    std::vector<double> s(pts.size(), 0.0);
    for (size_t i = 1; i < pts.size(); ++i)
        s[i] = s[i - 1] + dist(pts[i - 1], pts[i]);
    return s;
}

Vec2 point_at_arclength(const std::vector<Vec2>& pts,
                        const std::vector<double>& s, double target) {
    if (target <= 0.0) return pts.front();
    if (target >= s.back()) return pts.back();
    const auto it = std::upper_bound(s.begin(), s.end(), target);
    const size_t i = size_t(it - s.begin());
    const double seg = s[i] - s[i - 1];
    const double u = seg > 0.0 ? (target - s[i - 1]) / seg : 0.0;
    return pts[i - 1] + u * (pts[i] - pts[i - 1]);
}

}  // namespace

Network resample(const Network& net, double h) {
    if (!(h > 0.0)) throw NetworkError("resample spacing must be positive");
    Network out = net;
    for (auto& seg : out.segments) {
        const auto s = cumulative_arclength(seg.points);
        const double L = s.back();
        if (L == 0.0)
            throw NetworkError("segment " + std::to_string(seg.id) +
                               " has zero length");
        std::vector<Vec2> fresh;
        if (L < 2.0 * h) {
            fresh = {seg.points.front(),
                     point_at_arclength(seg.points, s, 0.5 * L),
                     seg.points.back()};
            seg.short_mesh = true;
        } else {
            const int n = std::max(2, int(std::llround(L / h)));
            fresh.reserve(n + 1);
            for (int i = 0; i <= n; ++i)
                fresh.push_back(point_at_arclength(seg.points, s, L * i / n));
            fresh.front() = seg.points.front();
            fresh.back() = seg.points.back();
            seg.short_mesh = false;
        }
        seg.points = std::move(fresh);
    }
    return out;
}

std::vector<CurvatureSample> curvature_profile(const Segment& seg) {
    const auto& p = seg.points;
    const size_t n = p.size();
    if (n < 2)
        throw NetworkError("segment " + std::to_string(seg.id) +
                           " has fewer than 2 markers");
    for (size_t i = 1; i < n; ++i)
        if (dist(p[i - 1], p[i]) == 0.0)
            throw NetworkError("segment " + std::to_string(seg.id) +
                               " has duplicate markers at index " +
                               std::to_string(i - 1));
    const auto s = cumulative_arclength(p);
    std::vector<CurvatureSample> out(n);
    for (size_t i = 0; i < n; ++i) out[i].s = s[i];

    if (n == 2) {  // straight chord: no curvature information
        out[0].tau = out[1].tau = normalized(p[1] - p[0]);
        return out;
    }
    for (size_t i = 0; i < n; ++i) {
        size_t i0 = i, i1 = i + 1, i2 = i + 2;
        if (i == n - 1) { i0 = n - 3; i1 = n - 2; i2 = n - 1; }
        else if (i > 0) { i0 = i - 1; i1 = i; i2 = i + 1; }
        const double a = s[i1] - s[i0], b = s[i2] - s[i1];
        const Vec2 dd = three_point_second_derivative(p[i0], p[i1], p[i2], a, b);
        // Tangent of the same fitted quadratic at this marker.
        Vec2 tau;
        if (i == 0)
            tau = one_sided_tangent(p[i0], p[i1], p[i2], a, b);
        else if (i == n - 1)
            tau = -one_sided_tangent(p[i2], p[i1], p[i0], b, a);
        else
            tau = p[i2] - p[i0];
        tau = normalized(tau);
        const Vec2 nu = rot90(tau);
        out[i].tau = tau;
        out[i].k = dot(dd, nu);
        out[i].kvec = out[i].k * nu;
    }
    return out;
}

double sup_curvature(const Network& net) {
    double m = 0.0;
    for (const auto& seg : net.segments) {
        if (seg.points.size() < 3) continue;
        for (const auto& c : curvature_profile(seg)) m = std::max(m, std::abs(c.k));
    }
    return m;
}

double length_in_ball(const Network& net, const Vec2& x0, double r) {
    double acc = 0.0;
    const double r2 = r * r;
    for (const auto& seg : net.segments) {
        const auto& p = seg.points;
        for (size_t i = 0; i + 1 < p.size(); ++i) {
            const Vec2 d = p[i + 1] - p[i];
            const double L2 = norm2(d);
            if (L2 == 0.0) continue;
            // |p_i + t d - x0|^2 <= r^2 as a quadratic in t on [0,1].
            const Vec2 w = p[i] - x0;
            const double bq = dot(w, d) / L2;
            const double cq = (norm2(w) - r2) / L2;
            const double disc = bq * bq - cq;
            if (disc <= 0.0) continue;
            const double sq = std::sqrt(disc);
            const double t0 = std::clamp(-bq - sq, 0.0, 1.0);
            const double t1 = std::clamp(-bq + sq, 0.0, 1.0);
            acc += (t1 - t0) * std::sqrt(L2);
        }
    }
    return acc;
}

double length_ratio(const Network& net, const LengthRatioSpec& spec) {
    std::vector<Vec2> centers;
    for (const auto& v : net.vertices) centers.push_back(v.pos);
    size_t total_markers = 0;
    for (const auto& s : net.segments) total_markers += s.points.size();
    const size_t stride =
        std::max<size_t>(1, total_markers / std::max(1, spec.max_centers));
    size_t idx = 0;
    for (const auto& s : net.segments)
        for (const auto& p : s.points)
            if (idx++ % stride == 0) centers.push_back(p);
    if (centers.empty()) return 0.0;

    double lo = spec.r_min, hi = spec.r_max;
    if (hi <= 0.0) {
        Vec2 mn = centers.front(), mx = centers.front();
        for (const auto& s : net.segments)
            for (const auto& p : s.points) {
                mn.x = std::min(mn.x, p.x); mn.y = std::min(mn.y, p.y);
                mx.x = std::max(mx.x, p.x); mx.y = std::max(mx.y, p.y);
            }
        hi = 0.75 * std::max(mx.x - mn.x, mx.y - mn.y);
        if (hi <= 0.0) hi = 1.0;
    }
    if (lo <= 0.0) {
        lo = std::max(4.0 * net.min_marker_spacing(), 1e-6 * hi);
        lo = std::min(lo, hi);
    }
    double best = 0.0;
    const int nr = std::max(1, spec.radii_per_center);
    for (const auto& c : centers) {
        for (int j = 0; j < nr; ++j) {
            const double r =
                nr == 1 ? hi : lo * std::pow(hi / lo, double(j) / (nr - 1));
            if (r <= 0.0) continue;
            best = std::max(best, length_in_ball(net, c, r) / r);
        }
    }
    return best;
}

double distance_to_network(const Network& net, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& seg : net.segments) {
        const auto& q = seg.points;
        for (size_t i = 0; i + 1 < q.size(); ++i) {
            const Vec2 d = q[i + 1] - q[i];
            const double L2 = norm2(d);
            double t = L2 > 0.0 ? dot(p - q[i], d) / L2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            best = std::min(best, dist(p, q[i] + t * d));
        }
    }
    return best;
}

namespace {

// Uniform-grid index over a network's chords for fast point queries.
struct ChordGrid {
    struct Chord {
        Vec2 p, q;
    };
    std::vector<Chord> chords;
    std::unordered_map<long long, std::vector<int>> cells;
    double cell = 0.0;
    long long lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;

    explicit ChordGrid(const Network& net) {
        for (const auto& seg : net.segments)
            for (size_t i = 0; i + 1 < seg.points.size(); ++i) {
                chords.push_back({seg.points[i], seg.points[i + 1]});
                cell = std::max(cell, dist(seg.points[i], seg.points[i + 1]));
            }
        if (chords.empty()) return;
        if (cell <= 0.0) cell = 1.0;
        bool first = true;
        for (size_t c = 0; c < chords.size(); ++c) {
            const Vec2 mid = 0.5 * (chords[c].p + chords[c].q);
            const long long ix = (long long)std::floor(mid.x / cell);
            const long long iy = (long long)std::floor(mid.y / cell);
            cells[ix * 2000003LL + iy].push_back(int(c));
            if (first || ix < lo_x) lo_x = ix;
            if (first || ix > hi_x) hi_x = ix;
            if (first || iy < lo_y) lo_y = iy;
            if (first || iy > hi_y) hi_y = iy;
            first = false;
        }
    }

    double distance(const Vec2& p) const {
        if (chords.empty()) return std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        const long long px = (long long)std::floor(p.x / cell);
        const long long py = (long long)std::floor(p.y / cell);
        const long long span = std::max(hi_x - lo_x, hi_y - lo_y) + 2;
        for (long long k = 0;; ++k) {
            for (long long dx = -k; dx <= k; ++dx) {
                for (long long dy = -k; dy <= k; ++dy) {
                    if (std::max(std::llabs(dx), std::llabs(dy)) != k) continue;
                    auto it = cells.find((px + dx) * 2000003LL + (py + dy));
                    if (it == cells.end()) continue;
                    for (int c : it->second) {
                        const Vec2 d = chords[c].q - chords[c].p;
                        const double L2 = norm2(d);
                        double t = L2 > 0.0 ? dot(p - chords[c].p, d) / L2 : 0.0;
                        t = std::clamp(t, 0.0, 1.0);
                        best = std::min(best, dist(p, chords[c].p + t * d));
                    }
                }
            }
            // A chord whose midpoint lies in an unscanned ring is at least
            // (k - 0.5) cells away from p.
            if (best <= (double(k) - 0.5) * cell || k > span) break;
        }
        return best;
    }
};

}  // namespace

double hausdorff_distance(const Network& a, const Network& b, double R,
                          const Vec2& center) {
    const bool restrict = R > 0.0;
    double h = 0.0;
    auto one_side = [&](const Network& from, const Network& to) {
        const ChordGrid grid(to);
        for (const auto& seg : from.segments)
            for (const auto& p : seg.points) {
                if (restrict && dist(p, center) > R) continue;
                h = std::max(h, grid.distance(p));
            }
    };
    one_side(a, b);
    one_side(b, a);
    return h;
}

}  // namespace netflow
