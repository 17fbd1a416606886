#include "nls/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "nls/errors.hpp"

namespace nls {

namespace {

constexpr char kMagic[4] = {'N', 'L', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

// The format is little-endian; this code targets little-endian hosts and
// writes native doubles/u32s directly.
static_assert(std::endian::native == std::endian::little,
              "snapshot format requires a little-endian host");

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::ifstream& in, T& v, const char* what) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in)
        throw IoError(IoError::Kind::truncated_payload,
                      std::string("snapshot: truncated while reading ") + what);
}

}  // namespace

void write_snapshot(const ComplexField& f, const std::string& path, SnapshotKind kind) {
    f.check_finite();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(IoError::Kind::write_failure, "snapshot: cannot open " + path);
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(kind));
    const Grid& g = f.grid();
    put(out, static_cast<std::uint32_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) put(out, static_cast<std::uint32_t>(g.n()));
    put(out, g.half_width());
    put(out, f.time());
    for (const Complex& z : f.samples()) {
        put(out, z.real());
        put(out, z.imag());
    }
    if (!out) throw IoError(IoError::Kind::write_failure, "snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Kind::other, "snapshot: cannot open " + path);

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 3) != 0)
        throw IoError(IoError::Kind::bad_magic, "snapshot: bad magic in " + path);
    if (magic[3] != kMagic[3])
        throw IoError(IoError::Kind::bad_version,
                      "snapshot: unsupported format revision in " + path);

    std::uint32_t version = 0, kind = 0, dim = 0;
    get(in, version, "version");
    if (version != kVersion)
        throw IoError(IoError::Kind::bad_version, "snapshot: unsupported version " +
                                                      std::to_string(version) + " in " + path);
    get(in, kind, "kind");
    if (kind > 1) throw IoError(IoError::Kind::other, "snapshot: unknown kind in " + path);
    get(in, dim, "dimension");
    if (dim < 1 || dim > 3) throw IoError(IoError::Kind::other, "snapshot: bad dimension in " + path);

    std::uint32_t n = 0;
    for (std::uint32_t a = 0; a < dim; ++a) {
        std::uint32_t na = 0;
        get(in, na, "axis size");
        if (a == 0)
            n = na;
        else if (na != n)
            throw IoError(IoError::Kind::other, "snapshot: anisotropic grids unsupported");
    }
    double L = 0.0, t = 0.0;
    get(in, L, "half-width");
    get(in, t, "time");

    Grid grid(static_cast<int>(dim), static_cast<int>(n), L);
    std::vector<Complex> samples(grid.size());
    in.read(reinterpret_cast<char*>(samples.data()),
            static_cast<std::streamsize>(samples.size() * sizeof(Complex)));
    if (!in)
        throw IoError(IoError::Kind::truncated_payload, "snapshot: truncated payload in " + path);

    Snapshot snap{ComplexField(grid, std::move(samples), t), static_cast<SnapshotKind>(kind)};
    snap.field.check_finite();
    return snap;
}

}  // namespace nls
