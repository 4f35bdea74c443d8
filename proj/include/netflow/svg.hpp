#pragma once

#include <netflow/network.hpp>

#include <string>

namespace netflow {

// Renders the network as a standalone SVG document: one polyline per segment,
// dots on the junction vertices. Produces a valid (empty) drawing for a
// network without markers.
std::string network_svg(const Network& net, double width = 640.0);

void save_svg(const Network& net, const std::string& path, double width = 640.0);

}  // namespace netflow
