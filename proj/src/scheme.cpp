#include "bfree/scheme.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "bfree/error.hpp"

namespace bfree {

namespace {

// Largest argument for which a tail family is materialized by sieving.
constexpr std::int64_t kPrimeSieveLimit = 100'000'000;
constexpr std::int64_t kReciprocalSieveLimit = 1'000'000;

const std::vector<std::int64_t>& cached_small_primes()
{
    static const std::vector<std::int64_t> primes = primes_up_to(kReciprocalSieveLimit);
    return primes;
}

std::vector<std::int64_t> family_up_to(TailFamily tail, std::int64_t bound)
{
    std::vector<std::int64_t> out;
    switch (tail) {
    case TailFamily::None:
        break;
    case TailFamily::PrimeSquares: {
        const std::int64_t root = isqrt(std::max<std::int64_t>(bound, 0));
        if (root > kPrimeSieveLimit)
            fail(ErrorCode::TailNotEnumerable, fmt::format("prime-squares tail up to {} exceeds the sieve limit", bound));
        for (const std::int64_t p : primes_up_to(root))
            out.push_back(p * p);
        break;
    }
    case TailFamily::Primes:
        if (bound > kPrimeSieveLimit)
            fail(ErrorCode::TailNotEnumerable, fmt::format("primes tail up to {} exceeds the sieve limit", bound));
        out = primes_up_to(bound);
        break;
    }
    return out;
}

bool squarefree(std::int64_t n)
{
    for (std::int64_t d = 2; d <= n / d; ++d)
        if (n % (d * d) == 0)
            return false;
    return true;
}

std::vector<std::int64_t> merge_unique(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b)
{
    std::vector<std::int64_t> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

std::string_view to_string(TailFamily tail)
{
    switch (tail) {
    case TailFamily::None: return "none";
    case TailFamily::PrimeSquares: return "prime-squares";
    case TailFamily::Primes: return "primes";
    }
    return "none";
}

TailFamily parse_tail(std::string_view name)
{
    if (name.empty() || name == "none" || name == "null")
        return TailFamily::None;
    if (name == "prime-squares")
        return TailFamily::PrimeSquares;
    if (name == "primes")
        return TailFamily::Primes;
    fail(ErrorCode::UnknownTail, fmt::format("unknown tail generator '{}'", name));
}

ModuliSet ModuliSet::validate(std::vector<std::int64_t> raw, TailFamily tail)
{
    if (raw.empty() && tail == TailFamily::None)
        fail(ErrorCode::EmptyModuli, "moduli list is empty and no tail generator is given");
    for (const std::int64_t b : raw)
        if (b < 2)
            fail(ErrorCode::ModulusTooSmall, fmt::format("modulus {} is smaller than 2", b));
    std::sort(raw.begin(), raw.end());
    if (auto dup = std::adjacent_find(raw.begin(), raw.end()); dup != raw.end())
        fail(ErrorCode::DuplicateModulus, fmt::format("modulus {} appears more than once", *dup));

    ModuliSet set;
    set.explicit_ = std::move(raw);
    set.tail_ = tail;

    const auto& ex = set.explicit_;
    set.coprime_ = bfree::pairwise_coprime(ex);
    for (std::size_t i = 0; i < ex.size() && set.primitive_; ++i)
        for (std::size_t j = i + 1; j < ex.size(); ++j)
            if (ex[j] % ex[i] == 0) {
                set.primitive_ = false;
                break;
            }

    // Any explicit modulus outside the family shares a prime with some family member.
    for (const std::int64_t b : ex) {
        if (tail == TailFamily::None || set.is_tail_member(b))
            continue;
        set.coprime_ = false;
        if (tail == TailFamily::Primes || is_prime(b) || !squarefree(b))
            set.primitive_ = false;
    }
    return set;
}

std::optional<std::size_t> ModuliSet::size() const
{
    if (has_tail())
        return std::nullopt;
    return explicit_.size();
}

bool ModuliSet::is_tail_member(std::int64_t b) const
{
    switch (tail_) {
    case TailFamily::None: return false;
    case TailFamily::Primes: return is_prime(b);
    case TailFamily::PrimeSquares: {
        const std::int64_t r = isqrt(b);
        return r * r == b && is_prime(r);
    }
    }
    return false;
}

bool ModuliSet::contains(std::int64_t b) const
{
    return std::binary_search(explicit_.begin(), explicit_.end(), b) || is_tail_member(b);
}

std::vector<std::int64_t> ModuliSet::first(std::size_t level) const
{
    if (!has_tail()) {
        if (level > explicit_.size())
            fail(ErrorCode::LevelExceedsModuli,
                fmt::format("level {} exceeds the {} available moduli", level, explicit_.size()));
        return {explicit_.begin(), explicit_.begin() + static_cast<std::ptrdiff_t>(level)};
    }
    std::int64_t bound = std::max<std::int64_t>(64, explicit_.empty() ? 0 : explicit_.back());
    for (;;) {
        auto merged = up_to(bound);
        if (merged.size() >= level) {
            merged.resize(level);
            return merged;
        }
        bound *= 4;
    }
}

std::vector<std::int64_t> ModuliSet::up_to(std::int64_t bound) const
{
    std::vector<std::int64_t> ex;
    for (const std::int64_t b : explicit_)
        if (b <= bound)
            ex.push_back(b);
    return merge_unique(ex, family_up_to(tail_, bound));
}

double ModuliSet::tail_family_reciprocal_bound(std::int64_t above) const
{
    switch (tail_) {
    case TailFamily::None:
        return 0.0;
    case TailFamily::Primes:
        return std::numeric_limits<double>::infinity();
    case TailFamily::PrimeSquares: {
        // p^2 > above  <=>  p > isqrt(above)
        const std::int64_t p0 = std::max<std::int64_t>(isqrt(std::max<std::int64_t>(above, 0)), 1);
        if (p0 >= kReciprocalSieveLimit)
            return 1.0 / static_cast<double>(p0);
        double sum = 0.0;
        for (const std::int64_t p : cached_small_primes())
            if (p > p0)
                sum += 1.0 / (static_cast<double>(p) * static_cast<double>(p));
        // sum_{n > C} 1/n^2 <= 1/C covers primes above the sieve; the factor absorbs rounding.
        return (sum + 1.0 / static_cast<double>(kReciprocalSieveLimit)) * (1.0 + 1e-12);
    }
    }
    return 0.0;
}

Window Window::empty_forbidden()
{
    Window w;
    w.default_empty_ = true;
    return w;
}

Window Window::with(std::int64_t b, std::vector<std::int64_t> forbidden) const
{
    if (b < 2)
        fail(ErrorCode::ModulusTooSmall, fmt::format("window modulus {} is smaller than 2", b));
    for (const std::int64_t r : forbidden)
        if (r < 0 || r >= b)
            fail(ErrorCode::InvalidResidue, fmt::format("forbidden residue {} is outside [0, {})", r, b));
    std::sort(forbidden.begin(), forbidden.end());
    forbidden.erase(std::unique(forbidden.begin(), forbidden.end()), forbidden.end());
    if (static_cast<std::int64_t>(forbidden.size()) >= b)
        fail(ErrorCode::WindowNotProper, fmt::format("forbidden set for modulus {} covers every residue", b));
    Window out = *this;
    out.overrides_[b] = std::move(forbidden);
    return out;
}

const std::vector<std::int64_t>& Window::forbidden(std::int64_t b) const
{
    static const std::vector<std::int64_t> zero_only{0};
    static const std::vector<std::int64_t> none;
    if (auto it = overrides_.find(b); it != overrides_.end())
        return it->second;
    return default_empty_ ? none : zero_only;
}

std::vector<bool> Window::allowed_mask(std::int64_t b) const
{
    std::vector<bool> mask(static_cast<std::size_t>(b), true);
    for (const std::int64_t f : forbidden(b))
        mask[static_cast<std::size_t>(f)] = false;
    return mask;
}

bool crt_compatible(std::span<const std::int64_t> moduli, std::span<const std::int64_t> residues)
{
    for (std::size_t i = 0; i < moduli.size(); ++i)
        for (std::size_t j = i + 1; j < moduli.size(); ++j) {
            const std::int64_t g = std::gcd(moduli[i], moduli[j]);
            if (g > 1 && residues[i] % g != residues[j] % g)
                return false;
        }
    return true;
}

TruncatedInternalPoint::TruncatedInternalPoint(std::vector<std::int64_t> moduli, std::vector<std::int64_t> residues)
    : moduli_(std::move(moduli)), residues_(std::move(residues))
{
    if (moduli_.size() != residues_.size())
        fail(ErrorCode::LevelMismatch,
            fmt::format("{} moduli but {} residues", moduli_.size(), residues_.size()));
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
        if (moduli_[i] < 2)
            fail(ErrorCode::ModulusTooSmall, fmt::format("modulus {} is smaller than 2", moduli_[i]));
        if (residues_[i] < 0 || residues_[i] >= moduli_[i])
            fail(ErrorCode::InvalidResidue,
                fmt::format("residue {} is outside [0, {})", residues_[i], moduli_[i]));
    }
    if (!crt_compatible(moduli_, residues_))
        fail(ErrorCode::IncompatibleResidues, "residues violate pairwise CRT compatibility");
}

TruncatedInternalPoint TruncatedInternalPoint::translated(std::int64_t g) const
{
    std::vector<std::int64_t> r(residues_.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = mod_floor(residues_[i] + mod_floor(g, moduli_[i]), moduli_[i]);
    return {moduli_, std::move(r)};
}

TruncatedInternalPoint TruncatedInternalPoint::operator+(const TruncatedInternalPoint& other) const
{
    if (moduli_ != other.moduli_)
        fail(ErrorCode::LevelMismatch, "cannot add internal points over different moduli");
    std::vector<std::int64_t> r(residues_.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = (residues_[i] + other.residues_[i]) % moduli_[i];
    return {moduli_, std::move(r)};
}

TruncatedInternalPoint delta_embed(std::int64_t n, std::span<const std::int64_t> moduli)
{
    std::vector<std::int64_t> r;
    r.reserve(moduli.size());
    for (const std::int64_t b : moduli)
        r.push_back(mod_floor(n, b));
    return {{moduli.begin(), moduli.end()}, std::move(r)};
}

TruncatedInternalPoint haar_sample(std::span<const std::int64_t> moduli, std::uint64_t seed)
{
    CounterRng rng(seed);
    const BigInt n = rng.below(big_lcm(moduli));
    std::vector<std::int64_t> r;
    r.reserve(moduli.size());
    for (const std::int64_t b : moduli)
        r.push_back(static_cast<std::int64_t>(n % b));
    return {{moduli.begin(), moduli.end()}, std::move(r)};
}

bool window_contains(const TruncatedInternalPoint& h, const Window& w)
{
    for (std::size_t i = 0; i < h.level(); ++i) {
        const auto& f = w.forbidden(h.moduli()[i]);
        if (std::binary_search(f.begin(), f.end(), h.residues()[i]))
            return false;
    }
    return true;
}

CylinderConstraint::CylinderConstraint(std::vector<std::int64_t> moduli, std::vector<std::vector<std::int64_t>> allowed)
    : moduli_(std::move(moduli)), allowed_(std::move(allowed))
{
    if (moduli_.size() != allowed_.size())
        fail(ErrorCode::LevelMismatch, "cylinder constraint needs one residue set per modulus");
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
        const std::int64_t b = moduli_[i];
        if (b < 2)
            fail(ErrorCode::ModulusTooSmall, fmt::format("modulus {} is smaller than 2", b));
        auto& s = allowed_[i];
        for (const std::int64_t r : s)
            if (r < 0 || r >= b)
                fail(ErrorCode::InvalidResidue, fmt::format("residue {} is outside [0, {})", r, b));
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
}

bool CylinderConstraint::empty_measure() const noexcept
{
    return std::any_of(allowed_.begin(), allowed_.end(), [](const auto& s) { return s.empty(); });
}

Rational cylinder_measure_product(const CylinderConstraint& c)
{
    if (!bfree::pairwise_coprime(c.moduli()))
        fail(ErrorCode::NotCoprime, "product formula requires pairwise coprime moduli");
    Rational out = 1;
    for (std::size_t i = 0; i < c.moduli().size(); ++i)
        out *= Rational(static_cast<std::int64_t>(c.allowed()[i].size()), c.moduli()[i]);
    return out;
}

Rational cylinder_measure_enumerate(const CylinderConstraint& c, std::int64_t enumeration_bound)
{
    const auto lcm = checked_lcm(c.moduli());
    if (!lcm || *lcm > enumeration_bound)
        fail(ErrorCode::LcmOverflow, fmt::format("lcm of the moduli exceeds the enumeration bound {}", enumeration_bound));
    std::vector<std::vector<bool>> masks;
    for (std::size_t i = 0; i < c.moduli().size(); ++i) {
        std::vector<bool> m(static_cast<std::size_t>(c.moduli()[i]), false);
        for (const std::int64_t r : c.allowed()[i])
            m[static_cast<std::size_t>(r)] = true;
        masks.push_back(std::move(m));
    }
    std::int64_t hits = 0;
    for (std::int64_t n = 0; n < *lcm; ++n) {
        bool ok = true;
        for (std::size_t i = 0; i < masks.size() && ok; ++i)
            ok = masks[i][static_cast<std::size_t>(n % c.moduli()[i])];
        hits += ok ? 1 : 0;
    }
    return Rational(hits, *lcm);
}

Rational cylinder_measure(const CylinderConstraint& c, std::int64_t enumeration_bound)
{
    if (c.empty_measure())
        return 0;
    if (bfree::pairwise_coprime(c.moduli()))
        return cylinder_measure_product(c);
    return cylinder_measure_enumerate(c, enumeration_bound);
}

std::vector<std::int64_t> modulus_periods(const Window& w, std::int64_t b)
{
    const auto mask = w.allowed_mask(b);
    std::vector<std::int64_t> periods;
    for (std::int64_t t = 0; t < b; ++t) {
        bool invariant = true;
        for (std::int64_t r = 0; r < b && invariant; ++r)
            invariant = mask[static_cast<std::size_t>(r)] == mask[static_cast<std::size_t>((r + t) % b)];
        if (invariant)
            periods.push_back(t);
    }
    return periods;
}

namespace {

// Depth-first walk over compatible vectors in the product of per-modulus sets.
// The visitor returns false to stop the walk.
void walk_compatible(std::span<const std::int64_t> moduli, const std::vector<std::vector<std::int64_t>>& choices,
    const std::function<bool(const std::vector<std::int64_t>&)>& visit)
{
    std::vector<std::int64_t> current(moduli.size());
    bool stop = false;
    std::function<void(std::size_t)> rec = [&](std::size_t depth) {
        if (stop)
            return;
        if (depth == moduli.size()) {
            stop = !visit(current);
            return;
        }
        for (const std::int64_t r : choices[depth]) {
            bool ok = true;
            for (std::size_t j = 0; j < depth && ok; ++j) {
                const std::int64_t g = std::gcd(moduli[j], moduli[depth]);
                ok = g == 1 || current[j] % g == r % g;
            }
            if (!ok)
                continue;
            current[depth] = r;
            rec(depth + 1);
            if (stop)
                return;
        }
    };
    rec(0);
}

} // namespace

std::vector<TruncatedInternalPoint> window_period_group(const Window& w, std::span<const std::int64_t> moduli,
    std::int64_t max_elements)
{
    std::vector<std::vector<std::int64_t>> choices;
    for (const std::int64_t b : moduli)
        choices.push_back(modulus_periods(w, b));
    std::vector<TruncatedInternalPoint> group;
    bool overflow = false;
    walk_compatible(moduli, choices, [&](const std::vector<std::int64_t>& r) {
        if (static_cast<std::int64_t>(group.size()) >= max_elements) {
            overflow = true;
            return false;
        }
        group.emplace_back(std::vector<std::int64_t>(moduli.begin(), moduli.end()), r);
        return true;
    });
    if (overflow)
        fail(ErrorCode::LcmOverflow, fmt::format("period group has more than {} elements", max_elements));
    return group;
}

bool haar_aperiodic_at_level(const Window& w, std::span<const std::int64_t> moduli)
{
    std::vector<std::vector<std::int64_t>> choices;
    for (const std::int64_t b : moduli)
        choices.push_back(modulus_periods(w, b));
    bool nontrivial = false;
    walk_compatible(moduli, choices, [&](const std::vector<std::int64_t>& r) {
        nontrivial = std::any_of(r.begin(), r.end(), [](std::int64_t x) { return x != 0; });
        return !nontrivial;
    });
    return !nontrivial;
}

} // namespace bfree
