#include "bfree/rotation.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "bfree/error.hpp"

namespace bfree {

CirclePoint to_circle(double x)
{
    const long double f = static_cast<long double>(x) - std::floor(static_cast<long double>(x));
    const long double v = std::ldexp(f, 64);
    if (v >= std::ldexp(1.0L, 64))
        return 0;
    return static_cast<CirclePoint>(v);
}

double from_circle(CircleCoord x)
{
    return static_cast<double>(std::ldexp(static_cast<long double>(x), -64));
}

void CircleIntervalSet::insert(Arc a)
{
    arcs_.push_back(a);
    std::sort(arcs_.begin(), arcs_.end(), [](const Arc& l, const Arc& r) { return l.lo < r.lo; });
    std::vector<Arc> merged;
    for (const Arc& arc : arcs_) {
        if (!merged.empty() && arc.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, arc.hi);
        else
            merged.push_back(arc);
    }
    arcs_ = std::move(merged);
}

void CircleIntervalSet::add(CirclePoint start, CircleCoord length)
{
    if (length == 0)
        return;
    if (length >= kFullTurn) {
        arcs_.clear();
        arcs_.push_back({0, kFullTurn});
        return;
    }
    const CircleCoord lo = start;
    const CircleCoord hi = lo + length;
    if (hi <= kFullTurn) {
        insert({lo, hi});
    } else {
        insert({lo, kFullTurn});
        insert({0, hi - kFullTurn});
    }
}

void CircleIntervalSet::add(double lo, double hi)
{
    if (!(lo >= 0.0 && lo <= 1.0 && hi >= 0.0 && hi <= 1.0))
        fail(ErrorCode::InvalidArgument, fmt::format("arc endpoints must lie in [0, 1], got [{}, {})", lo, hi));
    if (lo == hi)
        return;
    long double len = static_cast<long double>(hi) - static_cast<long double>(lo);
    if (len < 0)
        len += 1.0L;
    add(to_circle(lo), static_cast<CircleCoord>(std::ldexp(len, 64)));
}

CircleIntervalSet CircleIntervalSet::full()
{
    CircleIntervalSet s;
    s.add(CirclePoint{0}, kFullTurn);
    return s;
}

bool CircleIntervalSet::contains(CirclePoint x) const
{
    const CircleCoord v = x;
    auto it = std::upper_bound(arcs_.begin(), arcs_.end(), v, [](CircleCoord value, const Arc& a) { return value < a.lo; });
    if (it == arcs_.begin())
        return false;
    --it;
    return v < it->hi;
}

CircleCoord CircleIntervalSet::fixed_measure() const
{
    CircleCoord total = 0;
    for (const Arc& a : arcs_)
        total += a.hi - a.lo;
    return total;
}

double union_measure(const CircleIntervalSet& s)
{
    return from_circle(s.fixed_measure());
}

CircleCoord arc_length_for_level(int n)
{
    if (n < 1 || n > 58)
        fail(ErrorCode::InvalidArgument, fmt::format("arc level {} outside [1, 58]", n));
    const CircleCoord denominator = static_cast<CircleCoord>(2 * n) << n;
    return kFullTurn / denominator;
}

CirclePoint arc_start_for_level(int n, std::optional<std::uint64_t> placement_seed)
{
    if (placement_seed)
        return CounterRng(*placement_seed, 0x4a5f).at(static_cast<std::uint64_t>(n));
    const long double v = static_cast<long double>(n) * std::sqrt(2.0L);
    return to_circle(static_cast<double>(v - std::floor(v)));
}

CircleIntervalSet build_E(double alpha, int n_max, std::optional<std::uint64_t> placement_seed)
{
    if (n_max < 1)
        fail(ErrorCode::InvalidArgument, "n_max must be at least 1");
    const CirclePoint step = to_circle(alpha);
    CircleIntervalSet e;
    for (int n = 1; n <= n_max; ++n) {
        const CircleCoord len = arc_length_for_level(n);
        const CirclePoint start = arc_start_for_level(n, placement_seed);
        for (int k = 0; k < n; ++k)
            e.add(static_cast<CirclePoint>(start + static_cast<CirclePoint>(k) * step), len);
    }
    return e;
}

bool near_rational(double alpha, std::int64_t max_denominator)
{
    const long double a = alpha;
    const long double tol = 4.0L * DBL_EPSILON * std::max(1.0L, std::fabs(a));
    // Continued-fraction convergents are the best rational approximations.
    long double x = a;
    long double p_prev = 1, q_prev = 0;
    long double p = std::floor(x), q = 1;
    long double frac = x - p;
    for (;;) {
        if (std::fabs(a - p / q) <= tol || frac == 0.0L)
            return true;
        x = 1.0L / frac;
        const long double digit = std::floor(x);
        frac = x - digit;
        const long double p_next = digit * p + p_prev;
        const long double q_next = digit * q + q_prev;
        if (q_next > static_cast<long double>(max_denominator))
            return false;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
    }
}

namespace {

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        fail(ErrorCode::RationalRotation, fmt::format("rotation number {} is outside (0, 1]", alpha));
    if (near_rational(alpha))
        fail(ErrorCode::RationalRotation,
            fmt::format("rotation number {} is a rational with denominator <= 10^6 to machine precision", alpha));
}

} // namespace

RotationSystem::RotationSystem(double alpha, int n_max, std::optional<std::uint64_t> placement_seed)
    : alpha_(alpha), alpha_fixed_(to_circle(alpha)), n_max_(n_max), placement_seed_(placement_seed)
{
    check_alpha(alpha);
    e_ = build_E(alpha, n_max, placement_seed);
}

RotationSystem::RotationSystem(double alpha, CircleIntervalSet e, int n_max)
    : alpha_(alpha), alpha_fixed_(to_circle(alpha)), n_max_(n_max), e_(std::move(e))
{
    check_alpha(alpha);
}

Patch code_point(const RotationSystem& sys, CirclePoint x, std::int64_t lo, std::int64_t hi)
{
    if (hi < lo)
        fail(ErrorCode::InvalidArgument, fmt::format("empty interval [{}, {}]", lo, hi));
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(hi - lo + 1));
    CirclePoint y = sys.rotate(x, lo);
    for (auto& b : bits) {
        b = sys.e().contains(y) ? 1 : 0;
        y += sys.alpha_fixed();
    }
    return Patch(lo, std::move(bits), Provenance{PatchSource::RotationCoding, 0, std::nullopt});
}

Patch convolve_sample(const TruncatedInternalPoint& h, const Window& w, const RotationSystem& sys, CirclePoint x,
    std::int64_t lo, std::int64_t hi)
{
    return multiply(generic_patch(h, w, lo, hi), code_point(sys, x, lo, hi));
}

BlockStats block_ones_stats(const RotationSystem& sys, int block, std::int64_t samples, std::uint64_t seed,
    unsigned workers)
{
    if (block < 1)
        fail(ErrorCode::InvalidArgument, "block length must be at least 1");
    if (block > sys.level())
        fail(ErrorCode::BlockExceedsLevel, fmt::format("block length {} exceeds level {}", block, sys.level()));
    if (samples < 1)
        fail(ErrorCode::InvalidArgument, "need at least one sample");

    const CounterRng rng(seed, 0xb10c);
    const auto threads = static_cast<std::int64_t>(std::clamp<unsigned>(workers, 1, 64));
    std::vector<std::int64_t> hits(static_cast<std::size_t>(threads), 0);
    auto run = [&](std::int64_t t) {
        std::int64_t local = 0;
        for (std::int64_t i = t; i < samples; i += threads) {
            const CirclePoint x = rng.at(static_cast<std::uint64_t>(i));
            bool all = true;
            for (int k = 0; k < block && all; ++k)
                all = sys.bit(x, k);
            local += all ? 1 : 0;
        }
        hits[static_cast<std::size_t>(t)] = local;
    };
    if (threads == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::int64_t t = 0; t < threads; ++t)
            pool.emplace_back(run, t);
    }

    BlockStats s;
    s.block = block;
    s.samples = samples;
    for (const auto h : hits)
        s.hits += h;
    s.estimate = static_cast<double>(s.hits) / static_cast<double>(samples);
    s.standard_error = std::sqrt(s.estimate * (1.0 - s.estimate) / static_cast<double>(samples));
    s.lower_bound = from_circle(arc_length_for_level(block));
    return s;
}

bool codings_differ(const RotationSystem& sys, CirclePoint x, CirclePoint y, std::int64_t half_length)
{
    CirclePoint a = sys.rotate(x, -half_length);
    CirclePoint b = sys.rotate(y, -half_length);
    for (std::int64_t k = -half_length; k <= half_length; ++k) {
        if (sys.e().contains(a) != sys.e().contains(b))
            return true;
        a += sys.alpha_fixed();
        b += sys.alpha_fixed();
    }
    return false;
}

InjectivityStats injectivity_probe(const RotationSystem& sys, std::int64_t pairs, std::int64_t half_length,
    std::uint64_t seed)
{
    if (half_length < 1)
        fail(ErrorCode::InvalidArgument, "half-length must be at least 1");
    const CounterRng rng(seed, 0x1ec7);
    InjectivityStats s;
    s.pairs = pairs;
    for (std::int64_t i = 0; i < pairs; ++i) {
        const CirclePoint x = rng.at(static_cast<std::uint64_t>(2 * i));
        const CirclePoint y = rng.at(static_cast<std::uint64_t>(2 * i + 1));
        s.distinguished += codings_differ(sys, x, y, half_length) ? 1 : 0;
    }
    return s;
}

} // namespace bfree
