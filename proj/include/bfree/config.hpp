#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bfree/scheme.hpp"

namespace bfree {

enum class PatchSource { ExactIntegerOrbit, TruncatedGeneric, RotationCoding, Product, Raw };

std::string_view to_string(PatchSource source);

struct Provenance {
    PatchSource source = PatchSource::Raw;
    /// Orbit offset m for exact patches (bit n describes m + n).
    std::int64_t m = 0;
    /// Internal point for truncated generic patches.
    std::optional<TruncatedInternalPoint> point;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// A finite 0/1 word on the integer interval [lo, hi].
class Patch {
public:
    Patch(std::int64_t lo, std::vector<std::uint8_t> bits, Provenance provenance = {});

    std::int64_t lo() const noexcept { return lo_; }
    std::int64_t hi() const noexcept { return lo_ + static_cast<std::int64_t>(bits_.size()) - 1; }
    std::size_t size() const noexcept { return bits_.size(); }
    bool contains(std::int64_t n) const noexcept { return n >= lo_ && n <= hi(); }

    /// Bit at absolute position n; CenterOutOfRange outside [lo, hi].
    bool at(std::int64_t n) const;
    bool operator[](std::int64_t n) const noexcept { return bits_[static_cast<std::size_t>(n - lo_)] != 0; }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    const Provenance& provenance() const noexcept { return provenance_; }

    std::string to_string() const;

    /// Bits and interval equal; provenance is ignored.
    bool same_word(const Patch& other) const noexcept { return lo_ == other.lo_ && bits_ == other.bits_; }

private:
    std::int64_t lo_;
    std::vector<std::uint8_t> bits_;
    Provenance provenance_;
};

/// Sieve block length; blocks are processed independently.
inline constexpr std::int64_t kSieveBlock = 1 << 16;

/**
 * Restriction of the B-free configuration shifted by m to [lo, hi]: bit n is 1
 * iff no modulus b (explicit or tail) has (m + n) mod b in F_b. With the
 * default window this is "no b divides m + n"; in particular m + n = 0 gives 0.
 * Segmented sieve; the result does not depend on the worker count.
 */
Patch exact_patch(std::int64_t m, std::int64_t lo, std::int64_t hi, const ModuliSet& moduli,
    const Window& window = {}, unsigned workers = 1);

/// Bit n is 1 iff (r_b + n) mod b is not forbidden for every b of the point.
Patch generic_patch(const TruncatedInternalPoint& h, const Window& window, std::int64_t lo, std::int64_t hi);

/**
 * Left shift by g positions: result bit n equals input bit n + g, so the
 * interval moves to [lo - g, hi - g]. This intertwines h -> h + Δ(g):
 * shift(generic_patch(h, W, I), g) = generic_patch(h + Δ(g), W, I - g).
 */
Patch shift(const Patch& p, std::int64_t g);

/// Coordinate-wise product on the common interval; LevelMismatch if the intervals differ.
Patch multiply(const Patch& a, const Patch& b);

/**
 * Largest L >= 0 with both patches defined and equal on [center - L, center + L];
 * -1 if they differ at the center. CenterOutOfRange if either patch misses the center.
 */
std::int64_t agreement_length(const Patch& p1, const Patch& p2, std::int64_t center);

} // namespace bfree
