#include <netflow/svg.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace netflow {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string network_svg(const Network& net, double width) {
    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_y;
    for (const auto& seg : net.segments) {
        for (const auto& p : seg.points) {
            lo_x = std::min(lo_x, p.x);
            hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_y = std::max(hi_y, p.y);
        }
    }
    const bool empty = !(lo_x <= hi_x);
    if (empty) {
        lo_x = lo_y = -1.0;
        hi_x = hi_y = 1.0;
    }
    const double pad = 0.05 * std::max(hi_x - lo_x, hi_y - lo_y) + 1e-9;
    lo_x -= pad;
    lo_y -= pad;
    hi_x += pad;
    hi_y += pad;
    const double w = hi_x - lo_x, h = hi_y - lo_y;
    const double height = width * h / w;
    const double stroke = 0.002 * std::max(w, h);

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
           "\" height=\"" + num(height) + "\" viewBox=\"" + num(lo_x) + " " +
           num(-hi_y) + " " + num(w) + " " + num(h) + "\">\n";
    out += "<g fill=\"none\" stroke=\"#1a6ee0\" stroke-width=\"" + num(stroke) +
           "\" stroke-linejoin=\"round\">\n";
    for (const auto& seg : net.segments) {
        if (seg.points.empty()) continue;
        out += "<polyline points=\"";
        for (size_t i = 0; i < seg.points.size(); ++i) {
            if (i) out += ' ';
            // Flip y so mathematical orientation reads upward on screen.
            out += num(seg.points[i].x) + "," + num(-seg.points[i].y);
        }
        out += "\"/>\n";
    }
    out += "</g>\n";
    for (const auto& v : net.vertices) {
        if (v.kind == VertexKind::Endpoint) continue;
        const char* color = v.kind == VertexKind::Triple ? "#d1342f" : "#444444";
        out += "<circle cx=\"" + num(v.pos.x) + "\" cy=\"" + num(-v.pos.y) +
               "\" r=\"" + num(3.0 * stroke) + "\" fill=\"" + color + "\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

void save_svg(const Network& net, const std::string& path, double width) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NetworkError("cannot open " + path + " for writing");
    out << network_svg(net, width);
}

}  // namespace netflow
