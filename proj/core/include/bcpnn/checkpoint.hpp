#pragma once

#include <memory>
#include <string>

#include "bcpnn/network.hpp"

namespace bcpnn {

// Versioned binary container: config echo, progress counters, population
// state, connectivity, traces, weights and biases. Load round-trips
// bitwise; resuming training from an epoch-boundary checkpoint continues
// the uninterrupted trajectory exactly.
void save_checkpoint(Network& net, const std::string& path);
// config_override, when given, must match the stored model signature; it
// lets a continuation carry different run plumbing (epochs, paths).
std::unique_ptr<Network> load_checkpoint(const std::string& path,
                                         const RunConfig* config_override =
                                             nullptr);

// Reads only the embedded config (for mismatch diagnostics).
RunConfig peek_checkpoint_config(const std::string& path);

}  // namespace bcpnn
