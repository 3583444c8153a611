#include "bfree/megf.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "bfree/error.hpp"

namespace bfree {

std::string_view to_string(Outcome outcome)
{
    switch (outcome) {
    case Outcome::Determined: return "Determined";
    case Outcome::Ambiguous: return "Ambiguous";
    case Outcome::Inconsistent: return "Inconsistent";
    }
    return "Ambiguous";
}

std::optional<TruncatedInternalPoint> ReconstructionResult::point() const
{
    if (status != Outcome::Determined)
        return std::nullopt;
    std::vector<std::int64_t> b, r;
    for (const auto& m : moduli) {
        b.push_back(m.modulus);
        r.push_back(m.candidates.front());
    }
    return TruncatedInternalPoint(std::move(b), std::move(r));
}

std::int64_t patch_center(const Patch& p)
{
    const std::int64_t sum = p.lo() + p.hi();
    return sum >= 0 ? sum / 2 : -((-sum + 1) / 2);
}

ReconstructionResult reconstruct(const Patch& p, std::span<const std::int64_t> moduli, const Window& w)
{
    constexpr auto never = std::numeric_limits<std::int64_t>::max();
    const std::int64_t c = patch_center(p);
    std::vector<std::int64_t> ones;
    for (std::int64_t n = p.lo(); n <= p.hi(); ++n)
        if (p[n])
            ones.push_back(n);

    ReconstructionResult result;
    bool any_inconsistent = false;
    bool all_determined = true;
    for (const std::int64_t b : moduli) {
        ModulusOutcome mo;
        mo.modulus = b;
        // Distance from the center of the closest 1-bit excluding each residue.
        std::vector<std::int64_t> excluded_at(static_cast<std::size_t>(b), never);
        const auto& forbidden = w.forbidden(b);
        for (const std::int64_t n : ones) {
            const std::int64_t d = n >= c ? n - c : c - n;
            for (const std::int64_t f : forbidden) {
                auto& slot = excluded_at[static_cast<std::size_t>(mod_floor(f - n, b))];
                slot = std::min(slot, d);
            }
        }
        std::int64_t radius = 0;
        for (std::int64_t r = 0; r < b; ++r) {
            const auto e = excluded_at[static_cast<std::size_t>(r)];
            if (e == never)
                mo.candidates.push_back(r);
            else
                radius = std::max(radius, e);
        }
        if (mo.candidates.empty()) {
            mo.outcome = Outcome::Inconsistent;
            any_inconsistent = true;
        } else if (mo.candidates.size() == 1) {
            mo.outcome = Outcome::Determined;
            mo.radius = radius;
        } else {
            mo.outcome = Outcome::Ambiguous;
        }
        all_determined = all_determined && mo.outcome == Outcome::Determined;
        result.moduli.push_back(std::move(mo));
    }

    if (any_inconsistent) {
        result.status = Outcome::Inconsistent;
    } else if (all_determined) {
        std::vector<std::int64_t> residues;
        for (const auto& m : result.moduli)
            residues.push_back(m.candidates.front());
        bool ok = crt_compatible(moduli, residues);
        if (ok) {
            const TruncatedInternalPoint h({moduli.begin(), moduli.end()}, residues);
            ok = generic_patch(h, w, p.lo(), p.hi()).same_word(p);
        }
        result.status = ok ? Outcome::Determined : Outcome::Inconsistent;
        result.global_inconsistent = !ok;
    } else {
        result.status = Outcome::Ambiguous;
    }
    return result;
}

std::int64_t default_radius_cap(std::span<const std::int64_t> moduli)
{
    constexpr std::int64_t hard_cap = 1'000'000;
    const auto lcm = checked_lcm(moduli);
    if (!lcm || *lcm > hard_cap / 16)
        return hard_cap;
    return 16 * *lcm;
}

namespace {

// Evaluates bits of the generic configuration of a fixed point one position at a time.
class GenericBits {
public:
    GenericBits(const TruncatedInternalPoint& h, const Window& w) : h_(h)
    {
        for (const std::int64_t b : h.moduli())
            masks_.push_back(w.allowed_mask(b));
    }

    bool operator()(std::int64_t n) const
    {
        for (std::size_t i = 0; i < masks_.size(); ++i) {
            const std::int64_t b = h_.moduli()[i];
            if (!masks_[i][static_cast<std::size_t>(mod_floor(h_.residues()[i] + mod_floor(n, b), b))])
                return false;
        }
        return true;
    }

private:
    const TruncatedInternalPoint& h_;
    std::vector<std::vector<bool>> masks_;
};

} // namespace

std::optional<std::int64_t> determining_radius(const TruncatedInternalPoint& h, const Window& w, std::int64_t b,
    std::optional<std::int64_t> cap)
{
    const auto it = std::find(h.moduli().begin(), h.moduli().end(), b);
    if (it == h.moduli().end())
        fail(ErrorCode::InvalidArgument, fmt::format("modulus {} is not part of the point", b));
    const auto& forbidden = w.forbidden(b);
    if (forbidden.empty())
        return std::nullopt;
    const std::int64_t limit = cap.value_or(default_radius_cap(h.moduli()));
    const GenericBits bits(h, w);

    std::vector<bool> excluded(static_cast<std::size_t>(b), false);
    std::int64_t remaining = b;
    auto visit = [&](std::int64_t n) {
        if (!bits(n))
            return;
        for (const std::int64_t f : forbidden) {
            const auto r = static_cast<std::size_t>(mod_floor(f - n, b));
            if (!excluded[r]) {
                excluded[r] = true;
                --remaining;
            }
        }
    };
    for (std::int64_t radius = 0; radius <= limit; ++radius) {
        visit(radius);
        if (radius > 0)
            visit(-radius);
        if (remaining == 1)
            return radius;
    }
    return std::nullopt;
}

std::optional<std::int64_t> full_determining_radius(const TruncatedInternalPoint& h, const Window& w,
    std::optional<std::int64_t> cap)
{
    return max_determining_radius(h, w, 0, 0, cap);
}

std::optional<std::int64_t> max_determining_radius(const TruncatedInternalPoint& h, const Window& w,
    std::int64_t center_lo, std::int64_t center_hi, std::optional<std::int64_t> cap)
{
    if (center_hi < center_lo)
        fail(ErrorCode::InvalidArgument, "empty center range");
    const std::int64_t limit = cap.value_or(default_radius_cap(h.moduli()));

    struct Tracker {
        std::int64_t b;
        std::vector<std::int64_t> forbidden;
        std::vector<std::int64_t> stamp; // center index + 1 when excluded for that center
        std::int64_t remaining = 0;
    };
    std::vector<Tracker> trackers;
    for (const std::int64_t b : h.moduli()) {
        const auto& f = w.forbidden(b);
        if (f.empty())
            return std::nullopt;
        trackers.push_back({b, f, std::vector<std::int64_t>(static_cast<std::size_t>(b), 0), 0});
    }
    if (trackers.empty())
        return 0;

    // Patch of h around the center range, widened on demand.
    std::int64_t margin = 64;
    for (const auto& t : trackers)
        margin = std::max(margin, 4 * t.b);
    margin = std::min(margin, limit);
    auto patch = generic_patch(h, w, center_lo - margin, center_hi + margin);

    std::int64_t worst = 0;
    for (std::int64_t c = center_lo; c <= center_hi; ++c) {
        const std::int64_t stamp = c - center_lo + 1;
        std::size_t unsettled = trackers.size();
        for (auto& t : trackers)
            t.remaining = t.b;
        auto visit = [&](std::int64_t n) {
            if (!patch[n])
                return;
            for (auto& t : trackers) {
                if (t.remaining == 1)
                    continue;
                for (const std::int64_t f : t.forbidden) {
                    auto& s = t.stamp[static_cast<std::size_t>(mod_floor(f - n, t.b))];
                    if (s != stamp) {
                        s = stamp;
                        if (--t.remaining == 1)
                            --unsettled;
                    }
                }
            }
        };
        std::int64_t radius = 0;
        for (;; ++radius) {
            if (radius > limit)
                return std::nullopt;
            if (!patch.contains(c - radius) || !patch.contains(c + radius)) {
                margin = std::min(std::max(margin * 2, radius + 1), limit + 1);
                patch = generic_patch(h, w, center_lo - margin, center_hi + margin);
            }
            visit(c + radius);
            if (radius > 0)
                visit(c - radius);
            if (unsettled == 0)
                break;
        }
        worst = std::max(worst, radius);
    }
    return worst;
}

EquivarianceReport equivariance_check(const TruncatedInternalPoint& h, const Window& w, std::int64_t g_lo,
    std::int64_t g_hi, std::int64_t lo, std::int64_t hi)
{
    EquivarianceReport report;
    const Patch base = generic_patch(h, w, lo, hi);
    const auto r0 = reconstruct(base, h.moduli(), w);
    report.base_determined = r0.status == Outcome::Determined && r0.point() == h;
    if (!report.base_determined)
        return report;
    for (std::int64_t g = g_lo; g <= g_hi; ++g) {
        const auto r = reconstruct(shift(base, g), h.moduli(), w);
        ++report.checked;
        if (r.point() != h.translated(g))
            report.failures.push_back(g);
    }
    return report;
}

} // namespace bfree
