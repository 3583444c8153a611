#include "bfree/mirsky.hpp"

#include <algorithm>
#include <bit>
#include <thread>

#include <fmt/format.h>

#include "bfree/error.hpp"

namespace bfree {

PatternQuery::PatternQuery(std::map<std::int64_t, bool> bits) : bits_(std::move(bits))
{
    if (bits_.empty())
        fail(ErrorCode::EmptyPattern, "pattern query constrains no position");
}

PatternQuery PatternQuery::from_string(std::string_view word, std::int64_t offset)
{
    std::map<std::int64_t, bool> bits;
    for (std::size_t i = 0; i < word.size(); ++i) {
        const char c = word[i];
        const auto pos = offset + static_cast<std::int64_t>(i);
        if (c == '0' || c == '1')
            bits[pos] = c == '1';
        else if (c != '?' && c != '*')
            fail(ErrorCode::ParseError, fmt::format("pattern character '{}' is not 0, 1, ? or *", c));
    }
    return PatternQuery(std::move(bits));
}

std::vector<std::int64_t> PatternQuery::ones() const
{
    std::vector<std::int64_t> out;
    for (const auto& [n, bit] : bits_)
        if (bit)
            out.push_back(n);
    return out;
}

std::vector<std::int64_t> PatternQuery::zeros() const
{
    std::vector<std::int64_t> out;
    for (const auto& [n, bit] : bits_)
        if (!bit)
            out.push_back(n);
    return out;
}

PatternQuery PatternQuery::translated(std::int64_t g) const
{
    std::map<std::int64_t, bool> out;
    for (const auto& [n, bit] : bits_)
        out[n + g] = bit;
    return PatternQuery(std::move(out));
}

PatternQuery PatternQuery::with(std::int64_t position, bool bit) const
{
    auto out = bits_;
    out[position] = bit;
    return PatternQuery(std::move(out));
}

PatternQuery PatternQuery::without(std::int64_t position) const
{
    auto out = bits_;
    out.erase(position);
    return PatternQuery(std::move(out));
}

bool PatternQuery::matches(const Patch& p) const
{
    return std::all_of(bits_.begin(), bits_.end(),
        [&](const auto& kv) { return p.contains(kv.first) && p[kv.first] == kv.second; });
}

std::string PatternQuery::label() const
{
    std::string word(static_cast<std::size_t>(span_length()), '?');
    for (const auto& [n, bit] : bits_)
        word[static_cast<std::size_t>(n - min_position())] = bit ? '1' : '0';
    return fmt::format("{}:{}", min_position(), word);
}

namespace {

using Words = std::vector<std::uint64_t>;

struct ModulusHits {
    std::int64_t b;
    // hits[j]: residues r with (r + position_j) mod b forbidden.
    std::vector<Words> hits;
};

std::int64_t popcount(const Words& w)
{
    std::int64_t c = 0;
    for (const auto x : w)
        c += std::popcount(x);
    return c;
}

} // namespace

Rational frequency_inclusion_exclusion(const PatternQuery& q, std::span<const std::int64_t> moduli, const Window& w,
    std::size_t zeros_cap)
{
    if (!pairwise_coprime(moduli))
        fail(ErrorCode::NotCoprime, "inclusion-exclusion needs pairwise coprime moduli");
    const auto ones = q.ones();
    const auto zeros = q.zeros();
    if (zeros.size() > zeros_cap)
        fail(ErrorCode::ExponentialBlowup,
            fmt::format("{} zero positions exceed the inclusion-exclusion cap {}", zeros.size(), zeros_cap));

    // Positions ordered ones first, then zeros.
    std::vector<std::int64_t> positions = ones;
    positions.insert(positions.end(), zeros.begin(), zeros.end());

    std::vector<ModulusHits> mods;
    BigInt denominator = 1;
    for (const std::int64_t b : moduli) {
        const auto& f = w.forbidden(b);
        if (f.empty())
            continue;
        const std::size_t nwords = static_cast<std::size_t>((b + 63) / 64);
        ModulusHits mh{b, {}};
        for (const std::int64_t n : positions) {
            Words words(nwords, 0);
            for (const std::int64_t fr : f) {
                const auto r = static_cast<std::size_t>(mod_floor(fr - n, b));
                words[r / 64] |= std::uint64_t{1} << (r % 64);
            }
            mh.hits.push_back(std::move(words));
        }
        mods.push_back(std::move(mh));
        denominator *= b;
    }

    // Union of the hit sets of the ones, per modulus.
    std::vector<Words> base;
    for (const auto& mh : mods) {
        Words u(mh.hits.front().size(), 0);
        for (std::size_t j = 0; j < ones.size(); ++j)
            for (std::size_t k = 0; k < u.size(); ++k)
                u[k] |= mh.hits[j][k];
        base.push_back(std::move(u));
    }

    const bool narrow = denominator < (BigInt(1) << 62);
    __int128 narrow_sum = 0;
    BigInt wide_sum = 0;

    std::vector<std::vector<Words>> stack(zeros.size() + 1);
    stack[0] = base;
    auto leaf = [&](const std::vector<Words>& unions, bool negative) {
        if (narrow) {
            __int128 term = 1;
            for (std::size_t i = 0; i < mods.size(); ++i)
                term *= mods[i].b - popcount(unions[i]);
            narrow_sum += negative ? -term : term;
        } else {
            BigInt term = 1;
            for (std::size_t i = 0; i < mods.size(); ++i)
                term *= mods[i].b - popcount(unions[i]);
            wide_sum += negative ? -term : term;
        }
    };
    // Depth-first over subsets S of the zeros; stack[d] holds unions for the chosen prefix.
    auto rec = [&](auto&& self, std::size_t depth, bool negative) -> void {
        if (depth == zeros.size()) {
            leaf(stack[depth], negative);
            return;
        }
        stack[depth + 1] = stack[depth];
        self(self, depth + 1, negative);
        auto& next = stack[depth + 1];
        for (std::size_t i = 0; i < mods.size(); ++i) {
            const auto& h = mods[i].hits[ones.size() + depth];
            next[i] = stack[depth][i];
            for (std::size_t k = 0; k < h.size(); ++k)
                next[i][k] |= h[k];
        }
        self(self, depth + 1, !negative);
    };
    rec(rec, 0, false);

    BigInt numerator = wide_sum;
    if (narrow) {
        const bool neg = narrow_sum < 0;
        unsigned __int128 mag = neg ? static_cast<unsigned __int128>(-narrow_sum) : static_cast<unsigned __int128>(narrow_sum);
        BigInt v = static_cast<std::uint64_t>(mag >> 64);
        v <<= 64;
        v += static_cast<std::uint64_t>(mag);
        numerator = neg ? BigInt(-v) : v;
    }
    return Rational(numerator, denominator);
}

Rational frequency_enumeration(const PatternQuery& q, std::span<const std::int64_t> moduli, const Window& w,
    std::int64_t enumeration_bound)
{
    const auto lcm = checked_lcm(moduli);
    if (!lcm || *lcm > enumeration_bound)
        fail(ErrorCode::LcmOverflow, fmt::format("lcm of the moduli exceeds the enumeration bound {}", enumeration_bound));
    std::vector<std::vector<bool>> masks;
    for (const std::int64_t b : moduli)
        masks.push_back(w.allowed_mask(b));

    std::vector<std::pair<std::int64_t, bool>> constraints(q.bits().begin(), q.bits().end());
    std::int64_t hits = 0;
    for (std::int64_t n0 = 0; n0 < *lcm; ++n0) {
        bool match = true;
        for (const auto& [n, want] : constraints) {
            bool bit = true;
            for (std::size_t i = 0; i < moduli.size() && bit; ++i)
                bit = masks[i][static_cast<std::size_t>(mod_floor(n0 + n, moduli[i]))];
            if (bit != want) {
                match = false;
                break;
            }
        }
        hits += match ? 1 : 0;
    }
    return Rational(hits, *lcm);
}

CylinderFrequency pattern_frequency_exact(const PatternQuery& q, const ModuliSet& b, std::size_t level, const Window& w,
    const FrequencyOptions& options)
{
    const auto moduli = b.first(level);
    CylinderFrequency out;
    out.level = level;
    if (pairwise_coprime(moduli))
        out.exact = frequency_inclusion_exclusion(q, moduli, w, options.zeros_cap);
    else
        out.exact = frequency_enumeration(q, moduli, w, options.enumeration_bound);
    out.tail_error = tail_error(q, b, level, w);
    return out;
}

double tail_error(const PatternQuery& q, const ModuliSet& b, std::size_t level, const Window& w)
{
    const auto head = b.first(level);
    const std::int64_t last = head.empty() ? 0 : head.back();
    const auto default_size = static_cast<double>(w.default_is_empty() ? 0 : 1);

    double sum = 0.0;
    for (const std::int64_t m : b.explicit_moduli()) {
        if (std::binary_search(head.begin(), head.end(), m) || b.is_tail_member(m))
            continue;
        sum += static_cast<double>(w.forbidden(m).size()) / static_cast<double>(m);
    }
    if (b.has_tail() && default_size > 0.0)
        sum += default_size * b.tail_family_reciprocal_bound(last);
    // Tail members whose forbidden set differs from the default.
    for (const auto& [m, f] : w.overrides()) {
        if (m <= last || !b.is_tail_member(m))
            continue;
        sum += (static_cast<double>(f.size()) - default_size) / static_cast<double>(m);
    }
    return static_cast<double>(q.span_length()) * std::max(sum, 0.0);
}

EmpiricalFrequency empirical_frequency(const PatternQuery& q, const ModuliSet& b, std::int64_t n, const Window& w,
    unsigned workers)
{
    if (n < 1)
        fail(ErrorCode::InvalidArgument, "empirical frequency needs N >= 1");
    const std::int64_t lo_off = q.min_position();
    const std::int64_t hi_off = q.max_position();
    const std::vector<std::pair<std::int64_t, bool>> constraints(q.bits().begin(), q.bits().end());

    const std::int64_t blocks = (n + kSieveBlock - 1) / kSieveBlock;
    const auto threads = static_cast<std::int64_t>(std::clamp<unsigned>(workers, 1, 64));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(threads), 0);

    // Worker t handles blocks t, t + threads, ...; each block sieves m in [s, e] plus the pattern span.
    auto run = [&](std::int64_t t) {
        std::int64_t local = 0;
        for (std::int64_t k = t; k < blocks; k += threads) {
            const std::int64_t s = 1 + k * kSieveBlock;
            const std::int64_t e = std::min(n, s + kSieveBlock - 1);
            const Patch p = exact_patch(0, s + lo_off, e + hi_off, b, w);
            for (std::int64_t m = s; m <= e; ++m) {
                bool match = true;
                for (const auto& [pos, want] : constraints)
                    if (p[m + pos] != want) {
                        match = false;
                        break;
                    }
                local += match ? 1 : 0;
            }
        }
        counts[static_cast<std::size_t>(t)] = local;
    };
    if (threads == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::int64_t t = 0; t < threads; ++t)
            pool.emplace_back(run, t);
    }
    EmpiricalFrequency out;
    out.n = n;
    for (const auto c : counts)
        out.count += c;
    return out;
}

DensityReport density(const ModuliSet& b, const Window& w, std::size_t level, std::int64_t n, unsigned workers)
{
    DensityReport report;
    report.moduli = b.first(level);
    const PatternQuery single({{0, true}});
    if (pairwise_coprime(report.moduli)) {
        report.exact = 1;
        for (const std::int64_t m : report.moduli)
            report.exact *= Rational(m - static_cast<std::int64_t>(w.forbidden(m).size()), m);
    } else {
        std::vector<std::vector<std::int64_t>> allowed;
        for (const std::int64_t m : report.moduli) {
            std::vector<std::int64_t> s;
            const auto mask = w.allowed_mask(m);
            for (std::int64_t r = 0; r < m; ++r)
                if (mask[static_cast<std::size_t>(r)])
                    s.push_back(r);
            allowed.push_back(std::move(s));
        }
        report.exact = cylinder_measure(CylinderConstraint(report.moduli, std::move(allowed)));
    }
    report.tail_error = tail_error(single, b, level, w);
    if (n > 0)
        report.empirical = empirical_frequency(single, b, n, w, workers);
    return report;
}

} // namespace bfree
