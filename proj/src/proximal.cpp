#include "bfree/proximal.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "bfree/error.hpp"

namespace bfree {

namespace {

void check_search(std::int64_t half_length, std::int64_t search_radius)
{
    if (half_length < 0 || search_radius < half_length)
        fail(ErrorCode::InvalidArgument,
            fmt::format("need 0 <= L <= R, got L = {}, R = {}", half_length, search_radius));
}

// disagree[i] for positions lo + i.
std::vector<std::uint8_t> disagreements(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2,
    const Window& w, std::int64_t lo, std::int64_t hi)
{
    const Patch a = generic_patch(h1, w, lo, hi);
    const Patch b = generic_patch(h2, w, lo, hi);
    std::vector<std::uint8_t> d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = a.bits()[i] != b.bits()[i];
    return d;
}

} // namespace

std::optional<std::int64_t> find_agreement_window(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2,
    const Window& w, std::int64_t half_length, std::int64_t search_radius)
{
    check_search(half_length, search_radius);
    const std::int64_t lo = -search_radius - half_length;
    const auto d = disagreements(h1, h2, w, lo, search_radius + half_length);
    std::vector<std::int64_t> prefix(d.size() + 1, 0);
    for (std::size_t i = 0; i < d.size(); ++i)
        prefix[i + 1] = prefix[i] + d[i];
    auto clean = [&](std::int64_t c) {
        const auto a = static_cast<std::size_t>(c - half_length - lo);
        const auto b = static_cast<std::size_t>(c + half_length - lo + 1);
        return prefix[b] == prefix[a];
    };
    if (clean(0))
        return 0;
    for (std::int64_t k = 1; k <= search_radius; ++k) {
        if (clean(k))
            return k;
        if (clean(-k))
            return -k;
    }
    return std::nullopt;
}

std::int64_t best_agreement_length(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2,
    const Window& w, std::int64_t half_length, std::int64_t search_radius)
{
    check_search(half_length, search_radius);
    const std::int64_t lo = -search_radius - half_length;
    const std::int64_t hi = search_radius + half_length;
    const auto d = disagreements(h1, h2, w, lo, hi);
    const auto len = static_cast<std::int64_t>(d.size());
    constexpr auto far = std::numeric_limits<std::int64_t>::max() / 4;

    // Distance to the nearest disagreement on each side (inclusive).
    std::vector<std::int64_t> left(d.size()), right(d.size());
    std::int64_t last = -far;
    for (std::int64_t i = 0; i < len; ++i) {
        if (d[static_cast<std::size_t>(i)])
            last = i;
        left[static_cast<std::size_t>(i)] = i - last;
    }
    last = far;
    for (std::int64_t i = len - 1; i >= 0; --i) {
        if (d[static_cast<std::size_t>(i)])
            last = i;
        right[static_cast<std::size_t>(i)] = last - i;
    }

    std::int64_t best = -1;
    for (std::int64_t c = -search_radius; c <= search_radius; ++c) {
        const auto i = static_cast<std::size_t>(c - lo);
        const std::int64_t nearest = std::min(left[i], right[i]);
        if (nearest == 0)
            continue;
        const std::int64_t edge = std::min(c - lo, hi - c);
        best = std::max(best, std::min(nearest - 1, edge));
    }
    return best;
}

Rational exact_disagreement_density(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2,
    const Window& w, std::int64_t enumeration_bound)
{
    std::map<std::int64_t, std::pair<std::optional<std::int64_t>, std::optional<std::int64_t>>> joint;
    for (std::size_t i = 0; i < h1.level(); ++i)
        joint[h1.moduli()[i]].first = h1.residues()[i];
    for (std::size_t i = 0; i < h2.level(); ++i)
        joint[h2.moduli()[i]].second = h2.residues()[i];
    std::vector<std::int64_t> all;
    for (const auto& [b, r] : joint)
        all.push_back(b);

    if (!pairwise_coprime(all)) {
        const auto lcm = checked_lcm(all);
        if (!lcm || *lcm > enumeration_bound)
            fail(ErrorCode::LcmOverflow, fmt::format("joint period exceeds the enumeration bound {}", enumeration_bound));
        return disagreement_density_on(h1, h2, w, 0, *lcm - 1);
    }

    // Coprime moduli: n mod b are independent and uniform, so the densities of
    // {bit1 = 1}, {bit2 = 1} and {both} factor over b.
    Rational d1 = 1, d2 = 1, both = 1;
    for (const auto& [b, r] : joint) {
        const auto mask = w.allowed_mask(b);
        std::int64_t c1 = 0, c2 = 0, c12 = 0;
        for (std::int64_t t = 0; t < b; ++t) {
            const bool a1 = !r.first || mask[static_cast<std::size_t>((*r.first + t) % b)];
            const bool a2 = !r.second || mask[static_cast<std::size_t>((*r.second + t) % b)];
            c1 += a1;
            c2 += a2;
            c12 += a1 && a2;
        }
        d1 *= Rational(c1, b);
        d2 *= Rational(c2, b);
        both *= Rational(c12, b);
    }
    return d1 + d2 - 2 * both;
}

Rational disagreement_density_on(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2, const Window& w,
    std::int64_t lo, std::int64_t hi)
{
    if (hi < lo)
        fail(ErrorCode::InvalidArgument, fmt::format("empty interval [{}, {}]", lo, hi));
    const auto d = disagreements(h1, h2, w, lo, hi);
    const auto count = std::count(d.begin(), d.end(), std::uint8_t{1});
    return Rational(static_cast<std::int64_t>(count), hi - lo + 1);
}

Rational empirical_disagreement_density(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2,
    const Window& w, std::int64_t n)
{
    if (n < 0)
        fail(ErrorCode::InvalidArgument, "N must be non-negative");
    return disagreement_density_on(h1, h2, w, -n, n);
}

ProximalReport proximal_probe(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2, const Window& w,
    std::int64_t half_length, std::int64_t search_radius, std::int64_t n)
{
    ProximalReport report;
    report.target_half_length = half_length;
    report.search_radius = search_radius;
    report.n = n;
    report.witness = find_agreement_window(h1, h2, w, half_length, search_radius);
    report.best_agreement = best_agreement_length(h1, h2, w, half_length, search_radius);
    try {
        report.exact_density = exact_disagreement_density(h1, h2, w);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::LcmOverflow)
            throw;
    }
    report.empirical_density = empirical_disagreement_density(h1, h2, w, n);
    return report;
}

} // namespace bfree
