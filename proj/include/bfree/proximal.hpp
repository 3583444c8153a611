#pragma once

/**
 * @file proximal.hpp
 * @brief Finite-scale probe of regional proximality between two generic configurations.
 *
 * Two points are regionally proximal when, up to small perturbations, some
 * translate brings their configurations arbitrarily close. The probe keeps the
 * base points fixed and asks for a center c where the configurations agree on
 * [c - L, c + L].
 */

#include <cstdint>
#include <optional>

#include "bfree/config.hpp"
#include "bfree/scheme.hpp"

namespace bfree {

/**
 * First center c in [-R, R], ordered by |c| with ties toward positive c, such
 * that the generic patches of h1 and h2 agree on [c - L, c + L].
 */
std::optional<std::int64_t> find_agreement_window(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2,
    const Window& w, std::int64_t half_length, std::int64_t search_radius);

/// Largest agreement half-length over centers in [-R, R], measured inside [-R - L, R + L]; -1 if they never agree.
std::int64_t best_agreement_length(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2,
    const Window& w, std::int64_t half_length, std::int64_t search_radius);

/**
 * Density of {n : bit1(n) != bit2(n)}. Pairwise coprime moduli use a per-modulus
 * product; otherwise one joint period is enumerated (LcmOverflow above the bound).
 */
Rational exact_disagreement_density(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2,
    const Window& w, std::int64_t enumeration_bound = kDefaultEnumerationBound);

/// Disagreement count over [lo, hi] divided by its length.
Rational disagreement_density_on(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2, const Window& w,
    std::int64_t lo, std::int64_t hi);

/// Disagreement count over [-N, N] divided by 2N + 1.
Rational empirical_disagreement_density(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2,
    const Window& w, std::int64_t n);

struct ProximalReport {
    std::int64_t target_half_length = 0;
    std::int64_t best_agreement = -1;
    std::optional<std::int64_t> witness;
    std::int64_t search_radius = 0;
    std::optional<Rational> exact_density;
    Rational empirical_density;
    std::int64_t n = 0;

    friend bool operator==(const ProximalReport&, const ProximalReport&) = default;
};

/// Runs the witness search and both density computations. exact_density is absent when the period is too long.
ProximalReport proximal_probe(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2, const Window& w,
    std::int64_t half_length, std::int64_t search_radius, std::int64_t n);

} // namespace bfree
