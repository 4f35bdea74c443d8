#pragma once

#include <string>

#include <netflow/network.hpp>

namespace netflow {

// On-disk schema:
//   {"vertices":[{"id":..,"x":..,"y":..,"kind":"triple"|"endpoint"|"multiple"}],
//    "segments":[{"id":..,"from":..,"to":..,"points":[[x,y],...]}]}
// Unknown vertex kinds are rejected.  Doubles round-trip losslessly.
Network load_network(const std::string& path);
Network network_from_json_text(const std::string& text);
std::string network_to_json_text(const Network& net);
void save_network(const Network& net, const std::string& path);

}  // namespace netflow
