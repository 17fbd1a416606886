#pragma once

#include "nls/ground_state.hpp"
#include "nls/run_config.hpp"

namespace nls {

// Deterministic initial data for the named presets. Soliton-family presets
// receive the solved ground state; callers that already have one avoid a
// repeated solve by passing it in.
ComplexField make_initial_field(const RunConfig& cfg, const GroundState* q = nullptr);

// True when the preset needs the ground state (soliton family).
bool preset_needs_ground_state(const std::string& preset);

// Band-limited, spatially enveloped unit-norm noise; bit-reproducible for a
// fixed seed (no library distributions involved).
ComplexField seeded_noise(const Grid& grid, unsigned long seed);

}  // namespace nls
