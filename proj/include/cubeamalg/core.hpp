#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubeamalg {

using ElementId = std::uint32_t;
using LabelSet = std::uint64_t;  // bitmask over label indices < label universe (<= 64)

/// A face of the combinatorial k-cube: a bitmask over {0,...,k-1}.
using Face = std::uint32_t;

inline constexpr std::uint32_t max_cube_dimension = 16;

inline Face full_face(std::uint32_t k) { return k == 0 ? 0u : ((1u << k) - 1u); }

inline bool face_subset(Face a, Face b) { return (a & ~b) == 0; }

inline std::uint32_t face_popcount(Face f) { return static_cast<std::uint32_t>(std::popcount(f)); }

// Canonical face order: by popcount, then numeric mask value.
inline bool face_less(Face a, Face b) {
    auto pa = face_popcount(a), pb = face_popcount(b);
    if (pa != pb) return pa < pb;
    return a < b;
}

/// All subsets of {0,...,k-1} in canonical order.
inline std::vector<Face> all_faces(std::uint32_t k) {
    std::vector<Face> out;
    out.reserve(std::size_t{1} << k);
    for (Face f = 0; f <= full_face(k); ++f) out.push_back(f);
    if (k == 0) out = {0u};
    std::sort(out.begin(), out.end(), face_less);
    return out;
}

/// Subsets of the given mask, in canonical face order.
inline std::vector<Face> subfaces_of(Face mask) {
    std::vector<Face> out;
    Face sub = mask;
    for (;;) {
        out.push_back(sub);
        if (sub == 0) break;
        sub = (sub - 1) & mask;
    }
    std::sort(out.begin(), out.end(), face_less);
    return out;
}

/// Malformed input: bad documents, dangling ids, schema violations. CLI exit code 2.
struct input_error : std::runtime_error {
    std::string code;
    input_error(std::string c, const std::string& msg)
        : std::runtime_error(msg), code(std::move(c)) {}
};

/// Mathematical refusal: the operation is outside the family's range (e.g. k > n). CLI exit code 1.
struct refusal_error : std::runtime_error {
    explicit refusal_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Internal consistency failure: a construction produced something its own validator rejects.
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

/// Monotone source of fresh element ids. One per run context; ids are never reused,
/// so embeddings stay stable across stages.
class IdAllocator {
  public:
    explicit IdAllocator(ElementId start = 0) : next_(start) {}

    ElementId fresh() { return next_++; }

    void bump_past(ElementId id) {
        if (id + 1 > next_) next_ = id + 1;
    }

    ElementId peek() const { return next_; }

  private:
    ElementId next_;
};

}  // namespace cubeamalg
