#include <netflow/gluing.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace netflow {

namespace {

// Markers of a segment ordered so that index 0 sits at the given vertex.
std::vector<Vec2> oriented_points(const Segment& seg, bool at_from) {
    std::vector<Vec2> pts = seg.points;
    if (!at_from) std::reverse(pts.begin(), pts.end());
    return pts;
}

// Linear interpolation of eta(xi) over a strictly increasing abscissa table;
// clamps to the last value's asymptote (zero) beyond the table end.
double interp_graph(const std::vector<double>& xi, const std::vector<double>& eta,
                    double q, bool zero_beyond) {
    if (xi.empty()) return 0.0;
    if (q <= xi.front()) return eta.front();
    if (q >= xi.back()) return zero_beyond ? 0.0 : eta.back();
    auto it = std::upper_bound(xi.begin(), xi.end(), q);
    const size_t i = size_t(it - xi.begin());
    const double w = (q - xi[i - 1]) / (xi[i] - xi[i - 1]);
    return (1.0 - w) * eta[i - 1] + w * eta[i];
}

}  // namespace

std::vector<double> ConeData::angles() const {
    std::vector<double> out;
    for (const auto& b : branches) out.push_back(b.angle);
    return out;
}

ConeData extract_cone(const Network& net, int vertex_id) {
    const Vertex& v = net.vertex(vertex_id);
    ConeData cone;
    cone.vertex_id = vertex_id;
    cone.center = v.pos;
    cone.r_graph = 5.0;
    for (const auto& [si, at_from] : net.incident_ends(vertex_id)) {
        const Segment& seg = net.segments[si];
        ConeBranch br;
        br.segment_id = seg.id;
        br.at_from = at_from;
        const Vec2 e = inward_tangent(seg, at_from);
        br.angle = angle_of(e);
        const Vec2 n = rot90(e);
        const auto pts = oriented_points(seg, at_from);
        double prev_xi = 0.0;
        double prev_eta = 0.0;
        for (size_t i = 1; i < pts.size(); ++i) {
            const Vec2 d = pts[i] - cone.center;
            const double xi = dot(d, e), eta = dot(d, n);
            if (xi <= prev_xi || xi > 5.0) break;
            br.r_graph = xi;
            br.c_height = std::max(br.c_height, std::abs(eta) / (xi * xi));
            const double mid = 0.5 * (xi + prev_xi);
            if (mid > 0.0)
                br.c_slope = std::max(
                    br.c_slope, std::abs((eta - prev_eta) / (xi - prev_xi)) / mid);
            prev_xi = xi;
            prev_eta = eta;
        }
        if (br.r_graph <= 0.0)
            throw NetworkError("branch of segment " + std::to_string(seg.id) +
                               " is not a graph over its junction ray");
        cone.r_graph = std::min(cone.r_graph, br.r_graph);
        cone.branches.push_back(br);
    }
    std::sort(cone.branches.begin(), cone.branches.end(),
              [](const ConeBranch& a, const ConeBranch& b) { return a.angle < b.angle; });
    if (cone.r_graph < 4.0) cone.rescale = 4.0 / cone.r_graph;
    return cone;
}

GlueReport glue(const Network& seed, int vertex_id, const ExpanderSolution& sol,
                const DecayReport& decay, double s) {
    if (!sol.converged)
        throw NetworkError("gluing needs a converged expander");
    if (s <= 0.0) throw NetworkError("gluing scale s must be positive");
    const ConeData cone = extract_cone(seed, vertex_id);
    const size_t n = cone.branches.size();
    if (sol.ray_angles.size() != n)
        throw NetworkError("expander ray count does not match the junction valence");

    GlueReport rep;
    rep.s = s;
    rep.vertex_id = vertex_id;
    rep.center = cone.center;
    rep.scale = std::sqrt(2.0 * s);
    rep.splice_inner = std::pow(s, 0.25);
    rep.splice_outer = 2.0 * rep.splice_inner;
    rep.r0 = decay.r0;
    rep.asymptotic_regime = decay.r0 * rep.scale <= rep.splice_inner;
    if (rep.splice_outer >= cone.r_graph)
        throw NetworkError(
            "seed is not graphical out to the outer splice radius; rescale the "
            "seed or reduce s");

    // Match each cone branch to the expander ray with the nearest asymptote.
    std::vector<int> match(n, -1);
    std::vector<bool> used(n, false);
    for (size_t j = 0; j < n; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t r = 0; r < n; ++r) {
            if (used[r]) continue;
            const double d =
                std::abs(wrap_angle(cone.branches[j].angle - sol.ray_angles[r]));
            if (d < best) {
                best = d;
                match[j] = int(r);
            }
        }
        used[match[j]] = true;
        rep.max_angle_mismatch = std::max(rep.max_angle_mismatch, best);
    }
    if (rep.max_angle_mismatch > 1e-3)
        throw NetworkError("expander asymptotes do not match the junction rays");

    Network out = seed;
    // Junction vertices replacing the glued one.
    int next_vid = 0;
    for (const auto& vv : out.vertices) next_vid = std::max(next_vid, vv.id + 1);
    std::vector<int> junction_vid(sol.junctions.size());
    for (size_t k = 0; k < sol.junctions.size(); ++k) {
        const Vec2 pos = rep.center + rep.scale * sol.junctions[k];
        if (k == 0) {
            for (auto& vv : out.vertices)
                if (vv.id == vertex_id) {
                    vv.pos = pos;
                    vv.kind = VertexKind::Triple;
                }
            junction_vid[k] = vertex_id;
        } else {
            out.vertices.push_back({next_vid, pos, VertexKind::Triple});
            junction_vid[k] = next_vid++;
        }
    }

    for (size_t j = 0; j < n; ++j) {
        const ConeBranch& br = cone.branches[j];
        const int ray = match[j];
        const BranchTrace& tr = sol.ray_branches[ray];
        const int jn = sol.junction_of_ray.empty() ? 0 : sol.junction_of_ray[ray];
        const Vec2 e = unit_dir(br.angle);
        const Vec2 nrm = rot90(e);

        // Graphical suffix of the expander trace over its own ray.
        std::vector<double> exi, eeta;
        {
            size_t g0 = tr.points.size() - 1;
            while (g0 > 0 &&
                   dot(tr.points[g0 - 1], e) < dot(tr.points[g0], e))
                --g0;
            for (size_t i = g0; i < tr.points.size(); ++i) {
                exi.push_back(dot(tr.points[i], e));
                eeta.push_back(dot(tr.points[i], nrm));
            }
        }

        // Core: rescaled expander markers strictly inside the splice zone,
        // thinned to a spacing that still pins the junction angles to ~1e-7.
        constexpr double core_spacing = 1e-3;  // in expander units
        std::vector<Vec2> pts;
        double xi_c = 0.0, s_kept = -1.0;
        for (size_t i = 0; i < tr.points.size(); ++i) {
            if (s_kept >= 0.0 && tr.s[i] - s_kept < core_spacing) continue;
            const Vec2 p = rep.center + rep.scale * tr.points[i];
            const double xi = dot(p - rep.center, e);
            if (xi >= rep.splice_inner && pts.size() >= 2) break;
            pts.push_back(p);
            xi_c = xi;
            s_kept = tr.s[i];
        }
        rep.core_markers += int(pts.size());
        if (exi.empty() || exi.front() * rep.scale > rep.splice_inner)
            throw NetworkError("expander branch is not graphical at the splice radius");

        // Seed markers of this branch, junction first.
        Segment* seg = nullptr;
        for (auto& ss : out.segments)
            if (ss.id == br.segment_id) seg = &ss;
        const auto spts = oriented_points(*seg, br.at_from);
        std::vector<double> sxi;
        for (const auto& p : spts) sxi.push_back(dot(p - rep.center, e));
        size_t m0 = 1;
        while (m0 < spts.size() && sxi[m0] < rep.splice_outer) ++m0;
        if (m0 == spts.size())
            throw NetworkError("seed branch of segment " +
                               std::to_string(seg->id) +
                               " ends inside the splice zone");
        const double xi_out = sxi[m0];

        // Blend samples across (xi_c, xi_out).
        const double h_seed = seg->length() / double(spts.size() - 1);
        const double width = xi_out - xi_c;
        const int n_blend =
            std::clamp(int(std::ceil(width / (0.5 * h_seed))), 16, 4000);
        std::vector<double> seed_eta;
        for (const auto& p : spts) seed_eta.push_back(dot(p - rep.center, nrm));
        double prev_xi = xi_c, prev_eta = dot(pts.back() - rep.center, nrm);
        for (int b = 1; b < n_blend; ++b) {
            const double xi = xi_c + width * b / n_blend;
            const double phi = smooth_cutoff(xi / rep.splice_inner, 1.0, 2.0);
            const double v =
                rep.scale * interp_graph(exi, eeta, xi / rep.scale, true);
            const double u = interp_graph(sxi, seed_eta, xi, false);
            const double eta = phi * v + (1.0 - phi) * u;
            pts.push_back(rep.center + xi * e + eta * nrm);
            if (xi >= rep.splice_inner && xi <= rep.splice_outer) {
                rep.splice_height_const =
                    std::max(rep.splice_height_const, std::abs(eta) / (xi * xi));
                rep.splice_slope_const = std::max(
                    rep.splice_slope_const,
                    std::abs((eta - prev_eta) / (xi - prev_xi)) / (0.5 * (xi + prev_xi)));
            }
            prev_xi = xi;
            prev_eta = eta;
        }

        // Seed tail, bit-for-bit.
        for (size_t m = m0; m < spts.size(); ++m) pts.push_back(spts[m]);

        const int far_vertex = br.at_from ? seg->to : seg->from;
        if (!br.at_from) std::reverse(pts.begin(), pts.end());
        seg->points = std::move(pts);
        seg->from = br.at_from ? junction_vid[jn] : far_vertex;
        seg->to = br.at_from ? far_vertex : junction_vid[jn];
        seg->short_mesh = false;
    }

    if (sol.has_internal) {
        const auto& hp = sol.internal[0];
        const auto& hq = sol.internal[1];
        std::vector<Vec2> pts;
        for (const auto& q : hp.points) pts.push_back(rep.center + rep.scale * q);
        const Vec2 mid = rep.center + rep.scale * 0.5 * (hp.points.back() + hq.points.back());
        pts.back() = mid;
        for (size_t i = hq.points.size() - 1; i-- > 0;)
            pts.push_back(rep.center + rep.scale * hq.points[i]);
        int next_sid = 0;
        for (const auto& ss : out.segments) next_sid = std::max(next_sid, ss.id + 1);
        Segment internal;
        internal.id = next_sid;
        internal.from = junction_vid[0];
        internal.to = junction_vid[1];
        internal.points = std::move(pts);
        out.segments.push_back(std::move(internal));
    }

    out.name = seed.name.empty() ? "glued" : seed.name + "-glued";
    rep.net = std::move(out);
    return rep;
}

HypothesisReport verify_hypotheses(const GlueReport& glued,
                                   const ExpanderSolution& sol) {
    HypothesisReport rep;
    rep.length_ratio = length_ratio(glued.net);
    rep.graph_height_const = glued.splice_height_const;
    rep.graph_slope_const = glued.splice_slope_const;

    const auto th = theta_field(glued.net, glued.vertex_id);
    const auto be = beta_field(glued.net, glued.vertex_id);
    for (const auto& seg : glued.net.segments) {
        const auto& tv = th.per_segment.at(seg.id);
        const auto& bv = be.per_segment.at(seg.id);
        for (size_t i = 0; i < seg.points.size(); ++i) {
            const double g =
                (std::abs(tv[i]) + std::abs(bv[i])) /
                (1.0 + norm2(seg.points[i] - glued.center));
            rep.theta_beta_growth = std::max(rep.theta_beta_growth, g);
        }
    }

    const Network scaled = transformed(glued.net, 1.0 / glued.scale, 0.0,
                                       (-1.0 / glued.scale) * glued.center);
    const Network psi = expander_to_network(sol, 0.0);
    const std::array<double, 3> balls{2.0, 4.0, 8.0};
    for (size_t i = 0; i < balls.size(); ++i)
        rep.expander_distance[i] =
            hausdorff_distance(scaled, psi, balls[i], {0.0, 0.0});
    return rep;
}

std::vector<FamilyMember> run_family(const Network& seed, int vertex_id,
                                     const ExpanderSolution& sol,
                                     const DecayReport& decay,
                                     const FamilyOpts& opts) {
    std::vector<FamilyMember> out;
    for (double s : opts.s_values) {
        FamilyMember fm;
        fm.s = s;
        fm.glue = glue(seed, vertex_id, sol, decay, s);
        fm.hypotheses = verify_hypotheses(fm.glue, sol);

        Network net = resample(fm.glue.net, opts.spacing);
        for (const auto& v : net.vertices)
            if (v.kind == VertexKind::Triple) junction_solve(net, v.id);

        FlowState state;
        state.net = std::move(net);
        state.controls = opts.controls;
        state.controls.target_spacing = opts.spacing;
        std::vector<double> snaps;
        for (int k = 1; k < opts.snapshots; ++k)
            snaps.push_back(opts.horizon * k / opts.snapshots);
        fm.traj = evolve(state, opts.horizon, snaps);

        fm.min_seg_over_sqrt_t = std::numeric_limits<double>::infinity();
        for (const auto& row : fm.traj.rows) {
            if (row.t <= 0.0) continue;
            const double rt = std::sqrt(row.t);
            fm.sup_k_sqrt_t = std::max(fm.sup_k_sqrt_t, row.sup_k * rt);
            fm.min_seg_over_sqrt_t =
                std::min(fm.min_seg_over_sqrt_t, row.min_segment_length / rt);
        }
        for (const auto& ev : fm.traj.events)
            fm.events.push_back(to_string(ev.kind) + " at t=" + std::to_string(ev.t));

        const int g = std::max(2, opts.density_grid);
        for (const auto& [t, snap] : fm.traj.snapshots) {
            if (t <= 0.0) continue;
            for (int iy = 0; iy < g; ++iy) {
                for (int ix = 0; ix < g; ++ix) {
                    const Vec2 p{-1.0 + 2.0 * ix / (g - 1),
                                 -1.0 + 2.0 * iy / (g - 1)};
                    for (double c : opts.density_scales) {
                        const auto d = gaussian_density(snap, p, std::sqrt(c * t));
                        fm.max_density = std::max(fm.max_density, d.value);
                        if (d.under_resolved) fm.density_resolved = false;
                    }
                }
            }
        }
        out.push_back(std::move(fm));
    }
    return out;
}

}  // namespace netflow
