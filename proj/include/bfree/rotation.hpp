#pragma once

/**
 * @file rotation.hpp
 * @brief 0/1 coding of an irrational circle rotation with arbitrarily long blocks of ones.
 *
 * E is the union of the arcs J_n + k*alpha (1 <= n <= n_max, 0 <= k < n) with
 * |J_n| = 1/(2n 2^n), so a point of J_n codes n consecutive ones. Multiplying
 * such a coding coordinate-wise with a B-free configuration keeps every
 * admissible B-free word possible.
 *
 * Circle points are 64-bit fixed point (x in R/Z stored as x * 2^64 mod 2^64),
 * so rotation by alpha is exact modular addition and the coding commutes with
 * the shift bit for bit.
 */

#include <cstdint>
#include <optional>
#include <vector>

#include "bfree/config.hpp"
#include "bfree/scheme.hpp"

namespace bfree {

using CirclePoint = std::uint64_t;
/// Arc endpoints live in [0, 2^64]; 2^64 is one full turn.
using CircleCoord = unsigned __int128;
inline constexpr CircleCoord kFullTurn = CircleCoord{1} << 64;

CirclePoint to_circle(double x);
double from_circle(CircleCoord x);

/// Half-open arc [lo, hi) with 0 <= lo < hi <= 2^64.
struct Arc {
    CircleCoord lo;
    CircleCoord hi;
    friend bool operator==(const Arc&, const Arc&) = default;
};

/// Finite union of arcs on R/Z, kept sorted, disjoint and merged.
class CircleIntervalSet {
public:
    CircleIntervalSet() = default;

    /// Arc from start of the given length (<= one turn), wrapping through 0 if needed.
    void add(CirclePoint start, CircleCoord length);
    /// Arc [lo, hi) in turns; hi < lo wraps around 0. lo == hi adds nothing.
    void add(double lo, double hi);

    static CircleIntervalSet full();

    const std::vector<Arc>& arcs() const noexcept { return arcs_; }
    bool contains(CirclePoint x) const;
    CircleCoord fixed_measure() const;

    friend bool operator==(const CircleIntervalSet&, const CircleIntervalSet&) = default;

private:
    void insert(Arc a);
    std::vector<Arc> arcs_;
};

/// Lebesgue measure of the union, by a sweep over the merged arcs.
double union_measure(const CircleIntervalSet& s);

/// |J_n| = 1/(2n 2^n) in fixed point (floor, exact when 2n 2^n is a power of two).
CircleCoord arc_length_for_level(int n);

/// Left endpoint of J_n: frac(n * sqrt 2) by default, or a counter-based draw from the seed.
CirclePoint arc_start_for_level(int n, std::optional<std::uint64_t> placement_seed);

CircleIntervalSet build_E(double alpha, int n_max, std::optional<std::uint64_t> placement_seed = std::nullopt);

/// True when alpha is within a few ulps of some p/q with q <= max_denominator.
bool near_rational(double alpha, std::int64_t max_denominator = 1'000'000);

class RotationSystem {
public:
    /// RationalRotation for alpha outside (0, 1] or near a rational with denominator <= 10^6.
    RotationSystem(double alpha, int n_max, std::optional<std::uint64_t> placement_seed = std::nullopt);

    /// Arbitrary interval set; used for degenerate codings (empty or full E).
    RotationSystem(double alpha, CircleIntervalSet e, int n_max);

    double alpha() const noexcept { return alpha_; }
    CirclePoint alpha_fixed() const noexcept { return alpha_fixed_; }
    int level() const noexcept { return n_max_; }
    const CircleIntervalSet& e() const noexcept { return e_; }
    std::optional<std::uint64_t> placement_seed() const noexcept { return placement_seed_; }

    /// 1_E(x + k alpha).
    bool bit(CirclePoint x, std::int64_t k) const { return e_.contains(x + static_cast<CirclePoint>(k) * alpha_fixed_); }

    CirclePoint rotate(CirclePoint x, std::int64_t k = 1) const { return x + static_cast<CirclePoint>(k) * alpha_fixed_; }

private:
    double alpha_;
    CirclePoint alpha_fixed_;
    int n_max_;
    std::optional<std::uint64_t> placement_seed_;
    CircleIntervalSet e_;
};

/// Bits 1_E(x + k alpha) for k in [lo, hi].
Patch code_point(const RotationSystem& sys, CirclePoint x, std::int64_t lo, std::int64_t hi);

/// generic_patch(h, W, [lo, hi]) times code_point(sys, x, [lo, hi]), coordinate-wise.
Patch convolve_sample(const TruncatedInternalPoint& h, const Window& w, const RotationSystem& sys, CirclePoint x,
    std::int64_t lo, std::int64_t hi);

struct BlockStats {
    int block = 0;
    std::int64_t samples = 0;
    std::int64_t hits = 0;
    double estimate = 0.0;
    double standard_error = 0.0;
    /// |J_m| = 1/(2m 2^m): every x in J_m codes m ones at 0..m-1.
    double lower_bound = 0.0;
};

/// Monte-Carlo estimate of λ{x : bits 0..m-1 of the coding are all 1}.
BlockStats block_ones_stats(const RotationSystem& sys, int block, std::int64_t samples, std::uint64_t seed,
    unsigned workers = 1);

bool codings_differ(const RotationSystem& sys, CirclePoint x, CirclePoint y, std::int64_t half_length);

struct InjectivityStats {
    std::int64_t pairs = 0;
    std::int64_t distinguished = 0;
    double fraction() const noexcept { return pairs == 0 ? 0.0 : static_cast<double>(distinguished) / static_cast<double>(pairs); }
};

/// Uniform pairs (x, y); counts those whose codings differ somewhere in [-L, L].
InjectivityStats injectivity_probe(const RotationSystem& sys, std::int64_t pairs, std::int64_t half_length,
    std::uint64_t seed);

} // namespace bfree
