#pragma once

/**
 * @file megf.hpp
 * @brief The factor map onto the internal group, computed from finite data.
 *
 * A generic configuration of h has a 1 at n only if (r_b + n) mod b is allowed
 * for every b, so each 1-bit excludes the residues f - n (f in F_b) at every
 * modulus. Collecting the exclusions of all 1-bits pins down r_b once a single
 * candidate survives. Zero bits are disjunctions over moduli and are used only
 * for the final consistency check.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bfree/config.hpp"
#include "bfree/scheme.hpp"

namespace bfree {

enum class Outcome { Determined, Ambiguous, Inconsistent };

std::string_view to_string(Outcome outcome);

struct ModulusOutcome {
    std::int64_t modulus = 0;
    Outcome outcome = Outcome::Ambiguous;
    /// Surviving residues, ascending. Exactly one when Determined, none when Inconsistent.
    std::vector<std::int64_t> candidates;
    /// Smallest R such that the bits within distance R of the patch center already determine r_b.
    std::optional<std::int64_t> radius;
};

struct ReconstructionResult {
    std::vector<ModulusOutcome> moduli;
    Outcome status = Outcome::Ambiguous;
    /// Set when every modulus is Determined but the residues are CRT-incompatible or fail to reproduce the patch.
    bool global_inconsistent = false;

    /// The reconstructed point when the status is Determined.
    std::optional<TruncatedInternalPoint> point() const;
};

/// Center used for per-modulus radii: floor((lo + hi) / 2).
std::int64_t patch_center(const Patch& p);

ReconstructionResult reconstruct(const Patch& p, std::span<const std::int64_t> moduli, const Window& w);

/// min(16 * lcm(moduli), 10^6).
std::int64_t default_radius_cap(std::span<const std::int64_t> moduli);

/**
 * Smallest R such that reconstruct(generic_patch(h, W, [-R, R])) is Determined at b,
 * or nullopt when no R <= cap works (or F_b is empty).
 */
std::optional<std::int64_t> determining_radius(const TruncatedInternalPoint& h, const Window& w, std::int64_t b,
    std::optional<std::int64_t> cap = std::nullopt);

/// max over the moduli of h of determining_radius; nullopt if any modulus never settles.
std::optional<std::int64_t> full_determining_radius(const TruncatedInternalPoint& h, const Window& w,
    std::optional<std::int64_t> cap = std::nullopt);

/**
 * max over centers c in [center_lo, center_hi] of full_determining_radius(h + Δ(c)).
 * One pass over a single long patch of h; nullopt if some center exceeds the cap.
 */
std::optional<std::int64_t> max_determining_radius(const TruncatedInternalPoint& h, const Window& w,
    std::int64_t center_lo, std::int64_t center_hi, std::optional<std::int64_t> cap = std::nullopt);

struct EquivarianceReport {
    bool base_determined = false;
    std::int64_t checked = 0;
    std::vector<std::int64_t> failures;
    bool passed() const noexcept { return base_determined && failures.empty(); }
};

/// For each g in [g_lo, g_hi], checks reconstruct(shift(generic_patch(h, W, [lo, hi]), g)) = h + Δ(g).
EquivarianceReport equivariance_check(const TruncatedInternalPoint& h, const Window& w, std::int64_t g_lo,
    std::int64_t g_hi, std::int64_t lo, std::int64_t hi);

} // namespace bfree
