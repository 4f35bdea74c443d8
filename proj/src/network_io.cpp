#include <netflow/network_io.hpp>

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace netflow {

using nlohmann::json;

Network network_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw NetworkError(std::string("network JSON parse failure: ") + e.what());
    }
    if (!j.is_object() || !j.contains("vertices") || !j.contains("segments"))
        throw NetworkError("network JSON must contain vertices and segments");
    Network net;
    for (const auto& jv : j.at("vertices")) {
        Vertex v;
        v.id = jv.at("id").get<int>();
        v.pos.x = jv.at("x").get<double>();
        v.pos.y = jv.at("y").get<double>();
        v.kind = vertex_kind_from_string(jv.at("kind").get<std::string>());
        net.vertices.push_back(v);
    }
    for (const auto& js : j.at("segments")) {
        Segment s;
        s.id = js.at("id").get<int>();
        s.from = js.at("from").get<int>();
        s.to = js.at("to").get<int>();
        for (const auto& jp : js.at("points")) {
            if (!jp.is_array() || jp.size() != 2)
                throw NetworkError("segment " + std::to_string(s.id) +
                                   " has a malformed point");
            s.points.push_back({jp[0].get<double>(), jp[1].get<double>()});
        }
        net.segments.push_back(std::move(s));
    }
    for (const auto& s : net.segments) {
        if (s.points.size() < 2)
            throw NetworkError("segment " + std::to_string(s.id) +
                               " has fewer than two points");
        for (int vid : {s.from, s.to})
            if (!net.has_vertex(vid))
                throw NetworkError("segment " + std::to_string(s.id) +
                                   " references missing vertex " +
                                   std::to_string(vid));
    }
    return net;
}

Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NetworkError("cannot open network file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return network_from_json_text(ss.str());
}

std::string network_to_json_text(const Network& net) {
    json j;
    j["vertices"] = json::array();
    for (const auto& v : net.vertices)
        j["vertices"].push_back({{"id", v.id},
                                 {"x", v.pos.x},
                                 {"y", v.pos.y},
                                 {"kind", to_string(v.kind)}});
    j["segments"] = json::array();
    for (const auto& s : net.segments) {
        json pts = json::array();
        for (const auto& p : s.points) pts.push_back({p.x, p.y});
        j["segments"].push_back(
            {{"id", s.id}, {"from", s.from}, {"to", s.to}, {"points", pts}});
    }
    return j.dump(1);
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw NetworkError("cannot write network file " + path);
    out << network_to_json_text(net) << "\n";
}

}  // namespace netflow
