#pragma once

/**
 * @file mirsky.hpp
 * @brief Cylinder frequencies of the Mirsky measure.
 *
 * The Mirsky measure is the image of Haar measure on H under h -> generic
 * configuration of h. A cylinder is fixed by a finite pattern q (position ->
 * bit); its measure is the Haar measure of the internal points whose
 * configuration matches q. Two exact routes are provided (inclusion-exclusion
 * over the zero positions for coprime moduli, and a walk over Z/lcm) together
 * with the empirical Birkhoff frequency along the integer orbit.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bfree/config.hpp"
#include "bfree/scheme.hpp"

namespace bfree {

inline constexpr std::size_t kDefaultZerosCap = 20;

class PatternQuery {
public:
    explicit PatternQuery(std::map<std::int64_t, bool> bits);

    /// Pattern "1?01" placed at offset; '?' or '*' leaves a position unconstrained.
    static PatternQuery from_string(std::string_view word, std::int64_t offset = 0);

    const std::map<std::int64_t, bool>& bits() const noexcept { return bits_; }
    std::vector<std::int64_t> ones() const;
    std::vector<std::int64_t> zeros() const;
    std::int64_t min_position() const noexcept { return bits_.begin()->first; }
    std::int64_t max_position() const noexcept { return bits_.rbegin()->first; }
    /// Number of positions from the first to the last constrained one.
    std::int64_t span_length() const noexcept { return max_position() - min_position() + 1; }

    PatternQuery translated(std::int64_t g) const;
    PatternQuery with(std::int64_t position, bool bit) const;
    PatternQuery without(std::int64_t position) const;

    /// True iff the patch is defined on every constrained position and matches.
    bool matches(const Patch& p) const;

    /// "offset:word", e.g. "0:1?1".
    std::string label() const;

private:
    std::map<std::int64_t, bool> bits_;
};

struct CylinderFrequency {
    Rational exact;
    /// Upper bound on |untruncated - exact|; absent when no tail bound applies.
    std::optional<double> tail_error;
    std::size_t level = 0;
};

struct FrequencyOptions {
    std::size_t zeros_cap = kDefaultZerosCap;
    std::int64_t enumeration_bound = kDefaultEnumerationBound;
};

/// Inclusion-exclusion over subsets of the zero positions; needs pairwise coprime moduli.
Rational frequency_inclusion_exclusion(const PatternQuery& q, std::span<const std::int64_t> moduli, const Window& w,
    std::size_t zeros_cap = kDefaultZerosCap);

/// Fraction of n0 in Z/lcm whose configuration Δ(n0) matches q.
Rational frequency_enumeration(const PatternQuery& q, std::span<const std::int64_t> moduli, const Window& w,
    std::int64_t enumeration_bound = kDefaultEnumerationBound);

/// Exact frequency at level K plus the tail bound. Coprime B_K take the inclusion-exclusion route.
CylinderFrequency pattern_frequency_exact(const PatternQuery& q, const ModuliSet& b, std::size_t level,
    const Window& w = {}, const FrequencyOptions& options = {});

/**
 * Upper bound on the probability that a modulus beyond level K changes one of
 * the span_length(q) queried positions: span * sum_{b beyond B_K} |F_b| / b.
 * Zero for finite sets fully covered by the level, infinite for the primes tail.
 */
double tail_error(const PatternQuery& q, const ModuliSet& b, std::size_t level, const Window& w = {});

struct EmpiricalFrequency {
    std::int64_t count = 0;
    std::int64_t n = 0;
    double value() const noexcept { return static_cast<double>(count) / static_cast<double>(n); }
    Rational exact() const { return Rational(count, n); }
};

/// #{1 <= m <= N : exact configuration shifted by m matches q} / N, streamed in sieve blocks.
EmpiricalFrequency empirical_frequency(const PatternQuery& q, const ModuliSet& b, std::int64_t n,
    const Window& w = {}, unsigned workers = 1);

struct DensityReport {
    std::vector<std::int64_t> moduli;
    Rational exact;
    double tail_error = 0.0;
    std::optional<EmpiricalFrequency> empirical;
};

/// Density of the configuration: exact at level K, its tail bound, and the empirical value at N (skipped for N = 0).
DensityReport density(const ModuliSet& b, const Window& w, std::size_t level, std::int64_t n, unsigned workers = 1);

} // namespace bfree
