#include <netflow/shapes.hpp>

#include <cmath>

namespace netflow {

int add_vertex(Network& net, const Vec2& pos, VertexKind kind) {
    int id = 0;
    for (const auto& v : net.vertices) id = std::max(id, v.id + 1);
    net.vertices.push_back({id, pos, kind});
    return id;
}

int add_segment(Network& net, int from, int to, std::vector<Vec2> pts) {
    int id = 0;
    for (const auto& s : net.segments) id = std::max(id, s.id + 1);
    Segment s;
    s.id = id;
    s.from = from;
    s.to = to;
    s.points = std::move(pts);
    net.segments.push_back(std::move(s));
    return id;
}

std::vector<Vec2> line_points(const Vec2& a, const Vec2& b, double h) {
    const double L = dist(a, b);
    const int n = std::max(2, int(std::llround(L / h)));
    std::vector<Vec2> pts;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) pts.push_back(a + (double(i) / n) * (b - a));
    return pts;
}

Network make_star(const Vec2& center, const std::vector<double>& angles,
                  double length, double h, bool force_multiple) {
    Network net;
    net.name = "star";
    const int n = int(angles.size());
    VertexKind kind = VertexKind::Multiple;
    if (n == 1) kind = VertexKind::Endpoint;
    else if (n == 3 && !force_multiple) kind = VertexKind::Triple;
    net.vertices.push_back({0, center, kind});
    for (int i = 0; i < n; ++i) {
        const Vec2 tip = center + length * unit_dir(angles[i]);
        net.vertices.push_back({i + 1, tip, VertexKind::Endpoint});
        Segment s;
        s.id = i;
        s.from = 0;
        s.to = i + 1;
        s.points = line_points(center, tip, h);
        net.segments.push_back(std::move(s));
    }
    return net;
}

namespace {

std::vector<Vec2> arc_points(const Vec2& c, double R, double phi0, double phi1,
                             double h) {
    const double span = phi1 - phi0;
    const int n = std::max(2, int(std::llround(std::abs(span) * R / h)));
    std::vector<Vec2> pts;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double phi = phi0 + span * i / n;
        pts.push_back(c + R * unit_dir(phi));
    }
    return pts;
}

}  // namespace

Network make_circle(const Vec2& center, double radius, double h) {
    Network net;
    net.name = "circle";
    const Vec2 a = center + Vec2{radius, 0.0};
    const Vec2 b = center - Vec2{radius, 0.0};
    net.vertices.push_back({0, a, VertexKind::Multiple});
    net.vertices.push_back({1, b, VertexKind::Multiple});
    Segment upper;
    upper.id = 0;
    upper.from = 0;
    upper.to = 1;
    upper.points = arc_points(center, radius, 0.0, kPi, h);
    Segment lower;
    lower.id = 1;
    lower.from = 1;
    lower.to = 0;
    lower.points = arc_points(center, radius, kPi, 2.0 * kPi, h);
    net.segments = {std::move(upper), std::move(lower)};
    return net;
}

Network make_polar_curve(const Vec2& center, const std::function<double(double)>& r,
                         double h) {
    Network net;
    net.name = "polar-curve";
    auto point = [&](double phi) { return center + r(phi) * unit_dir(phi); };
    net.vertices.push_back({0, point(0.0), VertexKind::Multiple});
    net.vertices.push_back({1, point(kPi), VertexKind::Multiple});
    for (int half = 0; half < 2; ++half) {
        const double phi0 = half == 0 ? 0.0 : kPi;
        const double phi1 = phi0 + kPi;
        // March phi so consecutive markers are roughly h apart.
        std::vector<Vec2> pts{point(phi0)};
        double phi = phi0;
        while (phi < phi1) {
            const double rad = std::max(std::abs(r(phi)), 1e-9);
            const double dphi = std::min(h / rad, phi1 - phi);
            phi = std::min(phi + dphi, phi1);
            pts.push_back(point(phi));
        }
        if (pts.size() < 3) pts.insert(pts.begin() + 1, point(0.5 * (phi0 + phi1)));
        Segment s;
        s.id = half;
        s.from = half;
        s.to = 1 - half;
        s.points = std::move(pts);
        net.segments.push_back(std::move(s));
    }
    return net;
}

Network make_graph_curve(const std::function<double(double)>& f, double x0,
                         double x1, double h) {
    Network net;
    net.name = "graph-curve";
    // March x so steps are near-uniform in arclength; markers are evaluated
    // on the curve itself (interpolating a fine polyline instead would put
    // them on chords, which curvature stencils amplify as h^-2 noise).
    auto slope = [&](double x) {
        const double d = 1e-6 * std::max(1.0, std::abs(x));
        return (f(x + d) - f(x - d)) / (2.0 * d);
    };
    const int fine = std::max(2000, int((x1 - x0) / (0.05 * h)));
    double arclength = 0.0;
    double prev = std::hypot(1.0, slope(x0));
    for (int i = 1; i <= fine; ++i) {
        const double xs = x0 + (x1 - x0) * i / fine;
        const double cur = std::hypot(1.0, slope(xs));
        arclength += 0.5 * (prev + cur) * (x1 - x0) / fine;
        prev = cur;
    }
    const int n = std::max(2, int(std::llround(arclength / h)));
    const double step = arclength / n;
    std::vector<Vec2> pts{{x0, f(x0)}};
    double x = x0;
    for (int i = 1; i < n; ++i) {
        double dx = step / std::hypot(1.0, slope(x));
        dx = step / std::hypot(1.0, slope(x + 0.5 * dx));
        x += dx;
        pts.push_back({x, f(x)});
    }
    pts.push_back({x1, f(x1)});
    net.vertices.push_back({0, pts.front(), VertexKind::Endpoint});
    net.vertices.push_back({1, pts.back(), VertexKind::Endpoint});
    Segment s;
    s.id = 0;
    s.from = 0;
    s.to = 1;
    s.points = std::move(pts);
    net.segments.push_back(std::move(s));
    return net;
}

Network make_lens(double half_width, double ray_length, double h) {
    Network net;
    net.name = "lens";
    const double w = half_width;
    const double R = 2.0 * w / std::sqrt(3.0);
    const Vec2 cu{0.0, -w / std::sqrt(3.0)};  // upper arc center
    const Vec2 cl{0.0, +w / std::sqrt(3.0)};
    const Vec2 jl{-w, 0.0}, jr{w, 0.0};
    net.vertices.push_back({0, jl, VertexKind::Triple});
    net.vertices.push_back({1, jr, VertexKind::Triple});
    net.vertices.push_back({2, jl + Vec2{-ray_length, 0.0}, VertexKind::Endpoint});
    net.vertices.push_back({3, jr + Vec2{ray_length, 0.0}, VertexKind::Endpoint});

    Segment upper;  // left junction -> right junction over the top
    upper.id = 0;
    upper.from = 0;
    upper.to = 1;
    upper.points = arc_points(cu, R, 5.0 * kPi / 6.0, kPi / 6.0, h);
    Segment lower;
    lower.id = 1;
    lower.from = 0;
    lower.to = 1;
    lower.points = arc_points(cl, R, 7.0 * kPi / 6.0, 11.0 * kPi / 6.0, h);
    Segment lray;
    lray.id = 2;
    lray.from = 0;
    lray.to = 2;
    lray.points = line_points(jl, jl + Vec2{-ray_length, 0.0}, h);
    Segment rray;
    rray.id = 3;
    rray.from = 1;
    rray.to = 3;
    rray.points = line_points(jr, jr + Vec2{ray_length, 0.0}, h);
    net.segments = {std::move(upper), std::move(lower), std::move(lray),
                    std::move(rray)};
    return net;
}

}  // namespace netflow
