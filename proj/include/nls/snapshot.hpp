#pragma once

#include <cstdint>
#include <string>

#include "nls/field.hpp"

namespace nls {

enum class SnapshotKind : std::uint32_t { field = 0, ground_state = 1 };

struct Snapshot {
    ComplexField field;
    SnapshotKind kind = SnapshotKind::field;
};

// Binary format: magic "NLS1", u32 version = 1, u32 kind, u32 d, d x u32
// per-axis n, f64 L, f64 t, then n^d samples as little-endian f64 (re, im)
// pairs, row-major with axis 0 fastest. No padding, no checksum.
void write_snapshot(const ComplexField& f, const std::string& path,
                    SnapshotKind kind = SnapshotKind::field);

Snapshot read_snapshot(const std::string& path);

}  // namespace nls
