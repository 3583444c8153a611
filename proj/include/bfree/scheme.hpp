#pragma once

/**
 * @file scheme.hpp
 * @brief Generalized B-free cut-and-project data: moduli, windows, internal points.
 *
 * The internal group H is the closure of the diagonally embedded integers in
 * the product of Z/bZ over the moduli. Everything here works at a finite
 * truncation level K, i.e. on the first K moduli B_K, where H_K is the set of
 * residue vectors (r_b) satisfying r_b = r_b' (mod gcd(b, b')) pairwise.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bfree/arith.hpp"

namespace bfree {

/// Enumeration budget for residue-class walks over Z/lcm(B_K).
inline constexpr std::int64_t kDefaultEnumerationBound = 10'000'000;

enum class TailFamily { None, PrimeSquares, Primes };

std::string_view to_string(TailFamily tail);
TailFamily parse_tail(std::string_view name);

class ModuliSet {
public:
    /// Sorts, rejects duplicates and values < 2, computes the coprime/primitive flags.
    static ModuliSet validate(std::vector<std::int64_t> raw, TailFamily tail = TailFamily::None);

    const std::vector<std::int64_t>& explicit_moduli() const noexcept { return explicit_; }
    TailFamily tail() const noexcept { return tail_; }
    bool has_tail() const noexcept { return tail_ != TailFamily::None; }

    // Flags refer to the whole (possibly infinite) set, tail included.
    bool pairwise_coprime() const noexcept { return coprime_; }
    bool primitive() const noexcept { return primitive_; }

    /// Number of moduli, nullopt for infinite sets.
    std::optional<std::size_t> size() const;

    bool is_tail_member(std::int64_t b) const;
    bool contains(std::int64_t b) const;

    /// B_K: the K smallest moduli of explicit ∪ tail.
    std::vector<std::int64_t> first(std::size_t level) const;

    /// All moduli b <= bound, ascending.
    std::vector<std::int64_t> up_to(std::int64_t bound) const;

    /// Upper bound on the sum of 1/b over tail-family members b > above.
    /// Infinite for the primes family; zero without a tail.
    double tail_family_reciprocal_bound(std::int64_t above) const;

private:
    std::vector<std::int64_t> explicit_;
    TailFamily tail_ = TailFamily::None;
    bool coprime_ = true;
    bool primitive_ = true;
};

/**
 * Window W = {h : r_b not in F_b for all b}. Forbidden sets not listed
 * explicitly fall back to a default: {0} (the B-free window) or the empty set.
 */
class Window {
public:
    Window() = default;

    /// Window whose unlisted forbidden sets are empty.
    static Window empty_forbidden();

    /// Overrides F_b for the listed moduli. Residues must lie in [0, b) and F_b must be proper.
    Window with(std::int64_t b, std::vector<std::int64_t> forbidden) const;

    const std::vector<std::int64_t>& forbidden(std::int64_t b) const;
    bool default_is_empty() const noexcept { return default_empty_; }
    const std::map<std::int64_t, std::vector<std::int64_t>>& overrides() const noexcept { return overrides_; }

    /// Bit mask over Z/bZ with true at allowed residues.
    std::vector<bool> allowed_mask(std::int64_t b) const;

private:
    std::map<std::int64_t, std::vector<std::int64_t>> overrides_;
    bool default_empty_ = false;
};

/// A point of H_K: residues r_b in [0, b), pairwise CRT-compatible.
class TruncatedInternalPoint {
public:
    TruncatedInternalPoint() = default;
    TruncatedInternalPoint(std::vector<std::int64_t> moduli, std::vector<std::int64_t> residues);

    const std::vector<std::int64_t>& moduli() const noexcept { return moduli_; }
    const std::vector<std::int64_t>& residues() const noexcept { return residues_; }
    std::size_t level() const noexcept { return moduli_.size(); }

    /// h + Δ(g).
    TruncatedInternalPoint translated(std::int64_t g) const;

    /// Coordinate-wise sum; both points must live on the same moduli.
    TruncatedInternalPoint operator+(const TruncatedInternalPoint& other) const;

    friend bool operator==(const TruncatedInternalPoint&, const TruncatedInternalPoint&) = default;

private:
    std::vector<std::int64_t> moduli_;
    std::vector<std::int64_t> residues_;
};

bool crt_compatible(std::span<const std::int64_t> moduli, std::span<const std::int64_t> residues);

/// Δ(n) = (n mod b)_b.
TruncatedInternalPoint delta_embed(std::int64_t n, std::span<const std::int64_t> moduli);

/// Haar-distributed point of H_K: Δ(n) for n uniform in [0, lcm(B_K)), deterministic in seed.
TruncatedInternalPoint haar_sample(std::span<const std::int64_t> moduli, std::uint64_t seed);

bool window_contains(const TruncatedInternalPoint& h, const Window& w);

/// Query set {h in H_K : r_b in S_b for all b}.
class CylinderConstraint {
public:
    CylinderConstraint(std::vector<std::int64_t> moduli, std::vector<std::vector<std::int64_t>> allowed);

    const std::vector<std::int64_t>& moduli() const noexcept { return moduli_; }
    const std::vector<std::vector<std::int64_t>>& allowed() const noexcept { return allowed_; }

    /// Some S_b is empty, so the measure is zero.
    bool empty_measure() const noexcept;

private:
    std::vector<std::int64_t> moduli_;
    std::vector<std::vector<std::int64_t>> allowed_;
};

/// Haar measure of the cylinder. Uses the product formula when the moduli are
/// pairwise coprime, otherwise enumerates Z/lcm (LcmOverflow above the bound).
Rational cylinder_measure(const CylinderConstraint& c, std::int64_t enumeration_bound = kDefaultEnumerationBound);

/// prod |S_b| / b. Requires pairwise coprime moduli.
Rational cylinder_measure_product(const CylinderConstraint& c);

/// #{n mod lcm : n mod b in S_b for all b} / lcm.
Rational cylinder_measure_enumerate(const CylinderConstraint& c, std::int64_t enumeration_bound = kDefaultEnumerationBound);

/// Residues t with F_b + t = F_b (mod b).
std::vector<std::int64_t> modulus_periods(const Window& w, std::int64_t b);

/**
 * Period group of W at level K: compatible vectors whose every coordinate is a
 * per-modulus period. Sorted lexicographically by residues; the zero vector
 * comes first. Throws LcmOverflow if more than max_elements would be produced.
 */
std::vector<TruncatedInternalPoint> window_period_group(const Window& w, std::span<const std::int64_t> moduli,
    std::int64_t max_elements = kDefaultEnumerationBound);

/// True iff the period group at level K is trivial.
bool haar_aperiodic_at_level(const Window& w, std::span<const std::int64_t> moduli);

} // namespace bfree
