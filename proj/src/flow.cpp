#include <netflow/flow.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace netflow {

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::SegmentCollapse: return "segment-collapse";
        case EventKind::LoopCollapse: return "loop-collapse";
        case EventKind::JunctionCollision: return "junction-collision";
        case EventKind::StepReject: return "step-reject";
        case EventKind::BoundaryExit: return "boundary-exit";
        case EventKind::NewtonFailure: return "newton-failure";
    }
    return "?";
}

namespace {

void set_end_marker(Segment& s, bool at_from, const Vec2& q) {
    (at_from ? s.points.front() : s.points.back()) = q;
}

// Exterior tangent of a branch with its end marker replaced by q.
Vec2 exterior_tangent_at(const Segment& s, bool at_from, const Vec2& q) {
    const auto& p = s.points;
    if (p.size() == 2) {
        const Vec2 p1 = at_from ? p[1] : p[p.size() - 2];
        return normalized(q - p1);
    }
    const Vec2 p1 = at_from ? p[1] : p[p.size() - 2];
    const Vec2 p2 = at_from ? p[2] : p[p.size() - 3];
    const double a = dist(q, p1), b = dist(p1, p2);
    return normalized(-one_sided_tangent(q, p1, p2, a, b));
}

}  // namespace

JunctionSolveResult junction_solve(Network& net, int vertex_id, double newton_tol,
                                   int max_iter, std::optional<Vec2> start) {
    JunctionSolveResult res;
    const auto ends = net.incident_ends(vertex_id);
    if (ends.size() != 3)
        throw NetworkError("junction solve requires a triple vertex, vertex " +
                           std::to_string(vertex_id) + " has " +
                           std::to_string(ends.size()) + " ends");

    auto F = [&](const Vec2& q) {
        Vec2 sum{0.0, 0.0};
        for (auto [si, at_from] : ends)
            sum += exterior_tangent_at(net.segments[si], at_from, q);
        return sum;
    };

    double min_branch = std::numeric_limits<double>::infinity();
    for (auto [si, at_from] : ends)
        min_branch = std::min(min_branch, net.segments[si].length());
    const double max_move = 0.75 * min_branch;

    Vec2 q = start.value_or(net.vertex(vertex_id).pos);
    Vec2 f = F(q);
    double fn = norm(f);
    int iter = 0;
    while (fn > newton_tol && iter < max_iter) {
        ++iter;
        const double eps = 1e-6 * std::max(1.0, norm(q));
        const Vec2 fx = (F({q.x + eps, q.y}) - f) / eps;
        const Vec2 fy = (F({q.x, q.y + eps}) - f) / eps;
        const double det = fx.x * fy.y - fx.y * fy.x;
        if (!(std::abs(det) > 1e-14)) break;
        // Solve J d = -f for the Newton direction.
        Vec2 d{(-f.x * fy.y + f.y * fy.x) / det, (-fx.x * f.y + fx.y * f.x) / det};
        const double dn = norm(d);
        if (dn > max_move) d *= max_move / dn;
        bool accepted = false;
        for (double lam = 1.0; lam >= 1.0 / 256.0; lam *= 0.5) {
            const Vec2 trial = q + lam * d;
            const Vec2 ft = F(trial);
            if (norm(ft) < (1.0 - 0.25 * lam) * fn) {
                q = trial;
                f = ft;
                fn = norm(f);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    res.position = q;
    res.defect = fn;
    res.iterations = iter;
    res.converged = fn <= newton_tol;
    if (res.converged) {
        net.vertex(vertex_id).pos = q;
        for (auto [si, at_from] : ends) set_end_marker(net.segments[si], at_from, q);
    }
    return res;
}

double max_triple_defect(const Network& net) {
    double m = 0.0;
    for (const auto& v : net.vertices) {
        if (v.kind != VertexKind::Triple) continue;
        Vec2 sum{0.0, 0.0};
        for (auto [si, at_from] : net.incident_ends(v.id))
            sum += exterior_tangent(net.segments[si], at_from);
        m = std::max(m, norm(sum));
    }
    return m;
}

namespace {

// Uniform-by-arclength redistribution of one segment's markers; marker count
// re-bucketed when the spacing leaves [h/2, 2h].
void redistribute_segment(Segment& seg, double h) {
    const auto& p = seg.points;
    // Scratch buffers keep their capacity across the per-step calls.
    static std::vector<double> s;
    static std::vector<Vec2> fresh;
    s.resize(p.size());
    s[0] = 0.0;
    double chord_min = std::numeric_limits<double>::infinity(), chord_max = 0.0;
    for (size_t i = 1; i < p.size(); ++i) {
        const double d = dist(p[i - 1], p[i]);
        chord_min = std::min(chord_min, d);
        chord_max = std::max(chord_max, d);
        s[i] = s[i - 1] + d;
    }
    const double L = s.back();
    if (L <= 0.0) return;
    int n = int(p.size()) - 1;
    if (L < 2.0 * h) {
        n = 2;
        seg.short_mesh = true;
    } else {
        const double spacing = L / n;
        if (spacing < 0.5 * h || spacing > 2.0 * h)
            n = std::max(2, int(std::llround(L / h)));
        seg.short_mesh = false;
    }
    // Already uniform at the target marker count: leave the mesh alone so the
    // markers follow the flow exactly instead of being re-interpolated.
    const double mean = L / n;
    if (n == int(p.size()) - 1 && chord_max <= 1.02 * mean &&
        chord_min >= 0.98 * mean)
        return;
    fresh.assign(n + 1, Vec2{});
    fresh[0] = p.front();
    fresh[n] = p.back();
    size_t j = 1;
    for (int i = 1; i < n; ++i) {
        const double target = L * i / n;
        while (j < s.size() && s[j] < target) ++j;
        const size_t k = std::min(j, s.size() - 1);
        const double ds = s[k] - s[k - 1];
        const double u = ds > 0.0 ? (target - s[k - 1]) / ds : 0.0;
        fresh[i] = p[k - 1] + u * (p[k] - p[k - 1]);
    }
    std::swap(seg.points, fresh);
}

void thomas_solve(std::vector<double>& a, std::vector<double>& b,
                  std::vector<double>& c, std::vector<Vec2>& r) {
    const size_t n = r.size();
    for (size_t i = 1; i < n; ++i) {
        const double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        r[i] -= m * r[i - 1];
    }
    r[n - 1] = r[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;) r[i] = (r[i] - c[i] * r[i + 1]) / b[i];
}

// Backward-Euler heat step on an open marker chain with both end markers
// held fixed; spacings taken from the current polyline.
void semi_implicit_open(std::vector<Vec2>& p, double dt) {
    const size_t n = p.size();
    if (n < 3) return;
    std::vector<double> lo(n - 2), di(n - 2), up(n - 2);
    std::vector<Vec2> rhs(n - 2);
    for (size_t i = 1; i + 1 < n; ++i) {
        const double a = dist(p[i], p[i - 1]);
        const double b = dist(p[i + 1], p[i]);
        if (a <= 0.0 || b <= 0.0) return;
        const double A = 2.0 / (a * (a + b));
        const double C = 2.0 / (b * (a + b));
        lo[i - 1] = -dt * A;
        di[i - 1] = 1.0 + dt * (A + C);
        up[i - 1] = -dt * C;
        rhs[i - 1] = p[i];
    }
    rhs.front() += dt * (2.0 / (dist(p[1], p[0]) * (dist(p[1], p[0]) + dist(p[2], p[1])))) * p[0];
    rhs.back() += dt * (2.0 / (dist(p[n - 1], p[n - 2]) * (dist(p[n - 1], p[n - 2]) + dist(p[n - 2], p[n - 3])))) * p[n - 1];
    thomas_solve(lo, di, up, rhs);
    for (size_t i = 1; i + 1 < n; ++i) p[i] = rhs[i - 1];
}

// Backward-Euler heat step on a closed marker loop (p[0] adjacent to
// p[n-1]); the cyclic tridiagonal system is folded to two ordinary solves.
void semi_implicit_closed(std::vector<Vec2>& p, double dt) {
    const size_t n = p.size();
    if (n < 3) return;
    std::vector<double> lo(n), di(n), up(n);
    std::vector<Vec2> rhs(p);
    for (size_t i = 0; i < n; ++i) {
        const double a = dist(p[i], p[(i + n - 1) % n]);
        const double b = dist(p[(i + 1) % n], p[i]);
        if (a <= 0.0 || b <= 0.0) return;
        const double A = 2.0 / (a * (a + b));
        const double C = 2.0 / (b * (a + b));
        lo[i] = -dt * A;
        di[i] = 1.0 + dt * (A + C);
        up[i] = -dt * C;
    }
    const double beta = lo[0];       // corner entry row 0, column n-1
    const double alpha = up[n - 1];  // corner entry row n-1, column 0
    const double gamma = -di[0];
    std::vector<double> d2(di);
    d2[0] -= gamma;
    d2[n - 1] -= alpha * beta / gamma;
    std::vector<Vec2> u(n, {0.0, 0.0});
    u[0] = {gamma, 0.0};
    u[n - 1] = {alpha, 0.0};
    auto a1 = lo, b1 = d2, c1 = up;
    thomas_solve(a1, b1, c1, rhs);
    auto a2 = lo, b2 = d2, c2 = up;
    thomas_solve(a2, b2, c2, u);
    const Vec2 vy = rhs[0] + (beta / gamma) * rhs[n - 1];
    const double vz = 1.0 + u[0].x + (beta / gamma) * u[n - 1].x;
    for (size_t i = 0; i < n; ++i) rhs[i] -= (u[i].x / vz) * vy;
    p = rhs;
}

// Maximal runs of segments linked through 2-valent smooth joins.  Joins
// interior to a chain become ordinary unknowns of the implicit step, so the
// time step carries no mesh restriction from them.
struct ChainLink {
    int seg = -1;   // segment index
    bool fwd = true;  // traverse points from -> to
};

struct Chain {
    std::vector<ChainLink> links;
    bool closed = false;
};

std::vector<Chain> smooth_chains(const Network& net) {
    auto through = [&](int vid) {
        return net.vertex(vid).kind == VertexKind::Multiple &&
               net.incident_ends(vid).size() == 2;
    };
    std::vector<bool> used(net.segments.size(), false);

    auto walk = [&](int start, bool fwd) {
        Chain ch;
        int si = start;
        while (true) {
            used[si] = true;
            ch.links.push_back({si, fwd});
            const auto& s = net.segments[si];
            const int far = fwd ? s.to : s.from;
            if (!through(far)) break;
            const auto ends = net.incident_ends(far);
            const std::pair<int, bool> arrival{si, !fwd};
            const auto next = ends[0] == arrival ? ends[1] : ends[0];
            if (used[next.first]) {
                ch.closed = true;
                break;
            }
            si = next.first;
            fwd = next.second;
        }
        return ch;
    };

    std::vector<Chain> chains;
    for (size_t si = 0; si < net.segments.size(); ++si) {
        if (used[si]) continue;
        const auto& s = net.segments[si];
        if (through(s.from) && through(s.to)) continue;  // chain interior / loop
        chains.push_back(walk(int(si), !through(s.from)));
    }
    for (size_t si = 0; si < net.segments.size(); ++si) {
        if (used[si]) continue;
        chains.push_back(walk(int(si), true));  // closes on wrap-around
    }
    return chains;
}

// Ordered marker list of a chain.  Closed chains drop the repeated wrap
// marker; open chains keep both end markers.
std::vector<Vec2> chain_markers(const Network& net, const Chain& ch) {
    std::vector<Vec2> pts;
    for (size_t li = 0; li < ch.links.size(); ++li) {
        const auto& s = net.segments[ch.links[li].seg];
        std::vector<Vec2> part(s.points);
        if (!ch.links[li].fwd) std::reverse(part.begin(), part.end());
        const size_t skip = li == 0 ? 0 : 1;
        pts.insert(pts.end(), part.begin() + skip, part.end());
    }
    if (ch.closed && pts.size() > 1) pts.pop_back();
    return pts;
}

void write_chain_markers(Network& net, const Chain& ch, const std::vector<Vec2>& pts) {
    const size_t n = pts.size();
    size_t off = 0;
    for (const auto& link : ch.links) {
        auto& s = net.segments[link.seg];
        const size_t m = s.points.size();
        std::vector<Vec2> part(m);
        for (size_t k = 0; k < m; ++k)
            part[k] = pts[ch.closed ? (off + k) % n : off + k];
        if (!link.fwd) std::reverse(part.begin(), part.end());
        s.points = std::move(part);
        off += m - 1;
    }
    // Pull the join vertices onto their (possibly moved) shared markers.
    for (const auto& link : ch.links) {
        const auto& s = net.segments[link.seg];
        for (const bool at_from : {true, false}) {
            auto& v = net.vertex(at_from ? s.from : s.to);
            if (v.kind != VertexKind::Multiple) continue;
            v.pos = at_from ? s.points.front() : s.points.back();
        }
    }
}

void semi_implicit_network(Network& net, double dt) {
    for (const auto& ch : smooth_chains(net)) {
        auto pts = chain_markers(net, ch);
        if (ch.closed) semi_implicit_closed(pts, dt);
        else semi_implicit_open(pts, dt);
        write_chain_markers(net, ch, pts);
    }
}

struct VertexClass {
    std::vector<int> triples;
    std::vector<int> smooth_joins;     // 2-valent multiple vertices
    std::vector<int> moving_endpoints; // endpoints not pinned
};

VertexClass classify_vertices(const Network& net, const StepControls& c) {
    VertexClass vc;
    for (const auto& v : net.vertices) {
        const int valence = int(net.incident_ends(v.id).size());
        if (v.kind == VertexKind::Triple) vc.triples.push_back(v.id);
        else if (v.kind == VertexKind::Multiple && valence == 2)
            vc.smooth_joins.push_back(v.id);
        else if (v.kind == VertexKind::Endpoint &&
                 std::find(c.free_endpoints.begin(), c.free_endpoints.end(),
                           v.id) != c.free_endpoints.end())
            vc.moving_endpoints.push_back(v.id);
    }
    return vc;
}

// Curvature vector at a 2-valent smooth join from the wrap-around stencil.
Vec2 join_curvature(const Network& net, int vid) {
    const auto ends = net.incident_ends(vid);
    const Vec2 q = net.vertex(vid).pos;
    Vec2 nb[2];
    for (int e = 0; e < 2; ++e) {
        const auto& s = net.segments[ends[e].first];
        nb[e] = ends[e].second ? s.points[1] : s.points[s.points.size() - 2];
    }
    const double a = dist(nb[0], q), b = dist(q, nb[1]);
    if (a == 0.0 || b == 0.0) return {0.0, 0.0};
    const Vec2 dd = three_point_second_derivative(nb[0], q, nb[1], a, b);
    const Vec2 nu = rot90(normalized(nb[1] - nb[0]));
    return dot(dd, nu) * nu;
}

Vec2 endpoint_curvature(const Network& net, int vid) {
    const auto ends = net.incident_ends(vid);
    const auto& s = net.segments[ends[0].first];
    const auto& p = s.points;
    if (p.size() < 3) return {0.0, 0.0};
    Vec2 q0, q1, q2;
    if (ends[0].second) { q0 = p[0]; q1 = p[1]; q2 = p[2]; }
    else { q0 = p[p.size() - 1]; q1 = p[p.size() - 2]; q2 = p[p.size() - 3]; }
    const double a = dist(q0, q1), b = dist(q1, q2);
    const Vec2 dd = three_point_second_derivative(q0, q1, q2, a, b);
    const Vec2 nu = rot90(normalized(one_sided_tangent(q0, q1, q2, a, b)));
    return dot(dd, nu) * nu;
}

// The incidence structure (vertex ids, segment ids and endpoints) fully
// determines the cycle list and is untouched by stepping, so recompute it
// only when the fingerprint changes.
const std::vector<std::vector<int>>& cached_cycles(const Network& net) {
    static std::vector<int> key;
    static std::vector<std::vector<int>> cycles;
    static std::vector<int> probe;
    probe.clear();
    probe.push_back(int(net.vertices.size()));
    for (const auto& v : net.vertices) probe.push_back(v.id);
    for (const auto& s : net.segments) {
        probe.push_back(s.id);
        probe.push_back(s.from);
        probe.push_back(s.to);
    }
    if (probe != key) {
        cycles = network_cycles(net);
        key = probe;
    }
    return cycles;
}

// Shoelace area (doubled) and marker-chain length of the oriented cycle walk,
// accumulated in one pass without materialising the polyline.
struct CycleMetrics {
    double area2 = 0.0;
    double length = 0.0;
};

CycleMetrics cycle_metrics(const Network& net, const std::vector<int>& cyc) {
    CycleMetrics m;
    int at = net.segment(cyc.front()).from;
    Vec2 first, prev;
    bool started = false;
    for (int sid : cyc) {
        const Segment& s = net.segment(sid);
        const auto& p = s.points;
        const bool fwd = s.from == at;
        for (size_t j = 0; j + 1 < p.size(); ++j) {
            const Vec2 q = fwd ? p[j] : p[p.size() - 1 - j];
            if (!started) {
                first = q;
                started = true;
            } else {
                m.area2 += cross(prev, q);
                m.length += dist(prev, q);
            }
            prev = q;
        }
        at = fwd ? s.to : s.from;
    }
    if (started) {
        m.area2 += cross(prev, first);
        m.length += dist(prev, first);
    }
    return m;
}

std::vector<Event> detect_events(const Network& net, double t, double collapse_tol) {
    std::vector<Event> out;
    const auto& cycles = cached_cycles(net);
    std::vector<int> cycle_segs;
    for (const auto& cyc : cycles) {
        cycle_segs.insert(cycle_segs.end(), cyc.begin(), cyc.end());
        const auto metrics = cycle_metrics(net, cyc);
        const double area = std::abs(0.5 * metrics.area2);
        const double len = metrics.length;
        if (area < collapse_tol * collapse_tol || len < 2.0 * collapse_tol) {
            Event e{EventKind::LoopCollapse, t,
                    "loop through segment " + std::to_string(cyc.front()) +
                        " (area " + std::to_string(area) + ")",
                    true};
            out.push_back(e);
        }
    }
    if (!out.empty()) return out;

    std::vector<const Vertex*> triples;
    for (const auto& v : net.vertices)
        if (v.kind == VertexKind::Triple) triples.push_back(&v);
    for (size_t i = 0; i < triples.size(); ++i)
        for (size_t j = i + 1; j < triples.size(); ++j)
            if (dist(triples[i]->pos, triples[j]->pos) < collapse_tol)
                out.push_back({EventKind::JunctionCollision, t,
                               "junctions " + std::to_string(triples[i]->id) +
                                   " and " + std::to_string(triples[j]->id),
                               true});
    if (!out.empty()) return out;

    for (const auto& s : net.segments)
        if (std::find(cycle_segs.begin(), cycle_segs.end(), s.id) ==
                cycle_segs.end() &&
            s.length() < collapse_tol)
            out.push_back({EventKind::SegmentCollapse, t,
                           "segment " + std::to_string(s.id), true});
    return out;
}

}  // namespace

double flow_step(FlowState& state, double dt_cap) {
    if (state.halted) return 0.0;
    auto& c = state.controls;
    if (state.h <= 0.0) {
        state.h = c.target_spacing > 0.0 ? c.target_spacing
                                         : state.net.min_marker_spacing();
    }
    const double collapse_tol = c.collapse_factor * state.h;
    const double h_min = state.net.min_marker_spacing();
    double dt = c.scheme == TimeScheme::Explicit ? c.cfl * h_min * h_min
                                                 : c.cfl * h_min;
    if (dt_cap > 0.0) dt = std::min(dt, dt_cap);

    const VertexClass vc = classify_vertices(state.net, c);
    // Step buffer: copy-assignment reuses its vector capacity between steps,
    // and the commit below swaps instead of reallocating.
    static Network scratch;
    for (int reject = 0;; ++reject) {
        scratch = state.net;
        Network& trial = scratch;

        if (c.scheme == TimeScheme::Explicit) {
            // Forward Euler on interior markers.  The stencil reads the
            // pre-step copy, so the sweep needs no profile allocation.
            for (size_t si = 0; si < trial.segments.size(); ++si) {
                const auto& p = state.net.segments[si].points;
                const size_t n = p.size();
                if (n < 3) continue;
                auto& fresh = trial.segments[si].points;
                double a = dist(p[0], p[1]);
                for (size_t i = 1; i + 1 < n; ++i) {
                    const double b = dist(p[i], p[i + 1]);
                    if (a == 0.0 || b == 0.0)
                        throw NetworkError(
                            "segment " + std::to_string(trial.segments[si].id) +
                            " has duplicate markers at index " +
                            std::to_string(a == 0.0 ? i - 1 : i));
                    const Vec2 dd = three_point_second_derivative(
                        p[i - 1], p[i], p[i + 1], a, b);
                    const Vec2 nu = rot90(normalized(p[i + 1] - p[i - 1]));
                    fresh[i] = p[i] + dt * (dot(dd, nu) * nu);
                    a = b;
                }
            }
        } else {
            // Chain-wise implicit solve: smooth joins are interior unknowns,
            // so they need no explicit update and no step restriction.
            semi_implicit_network(trial, dt);
        }
        if (c.scheme == TimeScheme::Explicit) {
            // Smooth joins move with the curve; velocities from the pre-step
            // geometry.
            for (int vid : vc.smooth_joins) {
                const Vec2 v = join_curvature(state.net, vid);
                auto& vx = trial.vertex(vid);
                vx.pos += dt * v;
                for (auto [si, at_from] : trial.incident_ends(vid))
                    set_end_marker(trial.segments[si], at_from, vx.pos);
            }
        }
        for (int vid : vc.moving_endpoints) {
            const Vec2 v = endpoint_curvature(state.net, vid);
            auto& vx = trial.vertex(vid);
            vx.pos += dt * v;
            for (auto [si, at_from] : trial.incident_ends(vid))
                set_end_marker(trial.segments[si], at_from, vx.pos);
        }

        bool junctions_ok = true;
        for (int vid : vc.triples) {
            const auto r = junction_solve(trial, vid, c.newton_tol,
                                          c.newton_max_iter,
                                          state.net.vertex(vid).pos);
            if (!r.converged) { junctions_ok = false; break; }
        }
        if (!junctions_ok) {
            state.events.push_back({EventKind::StepReject, state.t,
                                    "junction solve diverged, dt halved to " +
                                        std::to_string(dt * 0.5),
                                    false});
            dt *= 0.5;
            if (reject + 1 >= c.max_step_rejects) {
                state.events.push_back({EventKind::NewtonFailure, state.t,
                                        "junction solve failed after " +
                                            std::to_string(reject + 1) +
                                            " halvings",
                                        true});
                state.halted = true;
                return 0.0;
            }
            continue;
        }

        for (auto& seg : trial.segments) redistribute_segment(seg, state.h);

        const double t_new = state.t + dt;
        auto evs = detect_events(trial, t_new, collapse_tol);
        if (c.domain_radius > 0.0) {
            for (const auto& seg : trial.segments)
                for (const auto& p : seg.points)
                    if (norm(p) > c.domain_radius) {
                        evs.push_back({EventKind::BoundaryExit, t_new,
                                       "segment " + std::to_string(seg.id), true});
                        break;
                    }
        }
        std::swap(state.net, scratch);
        state.t = t_new;
        for (const auto& e : evs) {
            state.events.push_back(e);
            if (e.halting) state.halted = true;
        }
        return dt;
    }
}

Trajectory evolve(FlowState& state, double T,
                  const std::vector<double>& snapshot_times, int max_rows) {
    const auto rep = validate(state.net, std::max(state.controls.angle_tol, 1e-6));
    if (!rep.regular)
        throw NetworkError("flow requires a regular network "
                           "(all junctions triple and balanced)");
    if (state.h <= 0.0)
        state.h = state.controls.target_spacing > 0.0
                      ? state.controls.target_spacing
                      : state.net.min_marker_spacing();

    std::vector<double> targets(snapshot_times);
    targets.push_back(T);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    targets.erase(std::remove_if(targets.begin(), targets.end(),
                                 [&](double s) { return s <= state.t || s > T + 1e-15; }),
                  targets.end());

    Trajectory traj;
    auto record_row = [&](const std::string& ev) {
        TrajectoryRow row;
        row.t = state.t;
        row.total_length = state.net.total_length();
        row.sup_k = sup_curvature(state.net);
        row.min_segment_length = std::numeric_limits<double>::infinity();
        for (const auto& s : state.net.segments)
            row.min_segment_length = std::min(row.min_segment_length, s.length());
        row.junction_defect_max = max_triple_defect(state.net);
        row.event = ev;
        traj.rows.push_back(row);
    };

    traj.snapshots.emplace_back(state.t, state.net);
    record_row("");
    const double row_dt = (T - state.t) / std::max(1, max_rows);
    double next_row = state.t + row_dt;
    size_t seen_events = state.events.size();
    size_t target_idx = 0;

    while (state.t < T - 1e-14 && !state.halted) {
        while (target_idx < targets.size() && targets[target_idx] <= state.t + 1e-14)
            ++target_idx;
        const double cap = target_idx < targets.size()
                               ? targets[target_idx] - state.t
                               : T - state.t;
        flow_step(state, cap);

        std::string ev;
        for (size_t i = seen_events; i < state.events.size(); ++i) {
            if (!ev.empty()) ev += ";";
            ev += to_string(state.events[i].kind);
        }
        seen_events = state.events.size();

        const bool at_target = target_idx < targets.size() &&
                               std::abs(state.t - targets[target_idx]) <= 1e-12;
        if (at_target) traj.snapshots.emplace_back(targets[target_idx], state.net);
        if (at_target || !ev.empty() || state.t >= next_row || state.halted) {
            record_row(ev);
            next_row = state.t + row_dt;
        }
    }
    if (std::abs(traj.snapshots.back().first - state.t) > 1e-12)
        traj.snapshots.emplace_back(state.t, state.net);
    traj.events = state.events;
    traj.final_t = state.t;
    traj.halted = state.halted;
    return traj;
}

std::vector<std::vector<int>> network_cycles(const Network& net) {
    // Spanning forest; every non-tree edge closes one independent cycle.
    std::map<int, std::vector<std::pair<int, int>>> adj;  // vertex -> (other, seg id)
    for (const auto& s : net.segments) {
        adj[s.from].push_back({s.to, s.id});
        adj[s.to].push_back({s.from, s.id});
    }
    std::map<int, int> parent_vertex, parent_edge;
    std::set<int> visited, tree_edges;
    std::vector<std::vector<int>> cycles;
    for (const auto& v : net.vertices) {
        if (visited.count(v.id)) continue;
        std::vector<int> stack{v.id};
        visited.insert(v.id);
        parent_vertex[v.id] = -1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (auto [w, eid] : adj[u]) {
                if (tree_edges.count(eid)) continue;
                if (!visited.count(w)) {
                    visited.insert(w);
                    parent_vertex[w] = u;
                    parent_edge[w] = eid;
                    tree_edges.insert(eid);
                    stack.push_back(w);
                } else if (eid != parent_edge[u] || u == w) {
                    // Non-tree edge u-w: cycle = tree path w..u plus this edge.
                    std::vector<int> path_u, path_w;
                    std::set<int> anc;
                    for (int x = u; x != -1; x = parent_vertex[x]) anc.insert(x);
                    int meet = w;
                    while (!anc.count(meet)) meet = parent_vertex[meet];
                    std::vector<int> cyc;
                    for (int x = u; x != meet; x = parent_vertex[x])
                        cyc.push_back(parent_edge[x]);
                    std::vector<int> tail;
                    for (int x = w; x != meet; x = parent_vertex[x])
                        tail.push_back(parent_edge[x]);
                    std::reverse(cyc.begin(), cyc.end());
                    cyc.push_back(eid);
                    cyc.insert(cyc.end(), tail.begin(), tail.end());
                    std::set<int> uniq(cyc.begin(), cyc.end());
                    if (uniq.size() == cyc.size()) cycles.push_back(cyc);
                    tree_edges.insert(eid);  // avoid re-reporting
                }
            }
        }
    }
    return cycles;
}

namespace {

std::vector<Vec2> cycle_polyline(const Network& net, const std::vector<int>& cyc) {
    std::vector<Vec2> pts;
    if (cyc.empty()) return pts;
    // Orient the walk: start at the first segment's `from` vertex.
    int at = net.segment(cyc.front()).from;
    for (int sid : cyc) {
        const Segment& s = net.segment(sid);
        if (s.from == at) {
            for (size_t i = 0; i + 1 < s.points.size(); ++i) pts.push_back(s.points[i]);
            at = s.to;
        } else {
            for (size_t i = s.points.size(); i-- > 1;) pts.push_back(s.points[i]);
            at = s.from;
        }
    }
    return pts;
}

}  // namespace

double cycle_area(const Network& net, const std::vector<int>& cyc) {
    const auto pts = cycle_polyline(net, cyc);
    double a = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        a += cross(pts[i], pts[(i + 1) % pts.size()]);
    return 0.5 * a;
}

double cycle_length(const Network& net, const std::vector<int>& cyc) {
    double L = 0.0;
    for (int sid : cyc) L += net.segment(sid).length();
    return L;
}

WindowReport graph_window_monitor(const Network& net, const Window& window) {
    WindowReport rep;
    const double r = window.radius;
    const double ca = std::cos(window.axis_angle), sa = std::sin(window.axis_angle);
    auto to_frame = [&](const Vec2& p) {
        const Vec2 d = p - window.center;
        return Vec2{ca * d.x + sa * d.y, -sa * d.x + ca * d.y};
    };

    for (const auto& v : net.vertices) {
        const Vec2 f = to_frame(v.pos);
        if (std::abs(f.x) < r && net.incident_ends(v.id).size() >= 3) {
            rep.reason = "junction inside window";
            return rep;
        }
    }

    // Strip-clipped runs of the polyline.
    std::vector<std::vector<Vec2>> runs;
    for (const auto& seg : net.segments) {
        std::vector<Vec2> run;
        for (size_t i = 0; i + 1 < seg.points.size(); ++i) {
            Vec2 a = to_frame(seg.points[i]);
            Vec2 b = to_frame(seg.points[i + 1]);
            auto inside = [&](const Vec2& p) { return std::abs(p.x) <= r; };
            const bool ia = inside(a), ib = inside(b);
            if (!ia && !ib) {
                if (a.x * b.x < 0.0 || std::min(std::abs(a.x), std::abs(b.x)) < r) {
                    // crosses the whole strip
                    rep.reason = "chord spans window without samples";
                }
                if (!run.empty()) { runs.push_back(run); run.clear(); }
                continue;
            }
            auto clip = [&](Vec2 in, Vec2 out) {
                const double edge = out.x > r ? r : -r;
                const double t = (edge - in.x) / (out.x - in.x);
                return in + t * (out - in);
            };
            Vec2 a2 = ia ? a : clip(b, a);
            Vec2 b2 = ib ? b : clip(a, b);
            if (run.empty()) run.push_back(a2);
            run.push_back(b2);
            if (!ib) { runs.push_back(run); run.clear(); }
        }
        if (!run.empty()) runs.push_back(run);
    }
    if (runs.empty()) {
        rep.reason = "window empty";
        return rep;
    }
    // Merge runs whose ends coincide (2-valent joins / vertices in strip).
    bool merged = true;
    while (merged && runs.size() > 1) {
        merged = false;
        for (size_t i = 0; i < runs.size() && !merged; ++i) {
            for (size_t j = i + 1; j < runs.size() && !merged; ++j) {
                auto near = [](const Vec2& a, const Vec2& b) {
                    return dist(a, b) < 1e-9;
                };
                auto& A = runs[i];
                auto& B = runs[j];
                if (near(A.back(), B.front())) {
                    A.insert(A.end(), B.begin() + 1, B.end());
                } else if (near(A.back(), B.back())) {
                    A.insert(A.end(), B.rbegin() + 1, B.rend());
                } else if (near(A.front(), B.back())) {
                    B.insert(B.end(), A.begin() + 1, A.end());
                    A = std::move(B);
                } else if (near(A.front(), B.front())) {
                    std::reverse(A.begin(), A.end());
                    A.insert(A.end(), B.begin() + 1, B.end());
                } else {
                    continue;
                }
                runs.erase(runs.begin() + j);
                merged = true;
            }
        }
    }
    if (runs.size() != 1) {
        rep.reason = "multiple components in window (" +
                     std::to_string(runs.size()) + ")";
        return rep;
    }
    auto& chain = runs.front();
    if (chain.size() < 2) {
        rep.reason = "degenerate crossing";
        return rep;
    }
    if (chain.front().x > chain.back().x) std::reverse(chain.begin(), chain.end());
    const double cover_tol = 1e-9 + 0.05 * r;
    if (chain.front().x > -r + cover_tol || chain.back().x < r - cover_tol) {
        rep.reason = "crossing does not span window";
        return rep;
    }
    double lip = 0.0, height = 0.0;
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        const double dx = chain[i + 1].x - chain[i].x;
        const double dy = chain[i + 1].y - chain[i].y;
        if (dx <= 0.0) {
            if (std::abs(dy) < 1e-14) continue;  // repeated point
            rep.reason = "not monotone over the axis";
            return rep;
        }
        lip = std::max(lip, std::abs(dy / dx));
    }
    for (const auto& p : chain) height = std::max(height, std::abs(p.y));
    rep.is_graph = true;
    rep.lipschitz = lip;
    rep.height = height;
    return rep;
}

}  // namespace netflow
