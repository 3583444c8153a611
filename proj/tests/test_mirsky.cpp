#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bfree/error.hpp"
#include "bfree/mirsky.hpp"
#include "oracles.hpp"

using namespace bfree;

namespace {

Rational oracle_frequency(const std::vector<std::int64_t>& moduli, const oracle::Forbidden& f, const PatternQuery& q)
{
    const auto [hits, l] = oracle::pattern_frequency(moduli, f, q.bits());
    return Rational(hits, l);
}

// Every 0/1 word of length 1..max_len at offset 0.
std::vector<PatternQuery> all_words(int max_len)
{
    std::vector<PatternQuery> out;
    for (int len = 1; len <= max_len; ++len)
        for (int mask = 0; mask < (1 << len); ++mask) {
            std::map<std::int64_t, bool> bits;
            for (int i = 0; i < len; ++i)
                bits[i] = (mask >> i) & 1;
            out.emplace_back(bits);
        }
    return out;
}

} // namespace

TEST_CASE("pattern queries")
{
    const auto q = PatternQuery::from_string("1?0", -1);
    CHECK(q.ones() == std::vector<std::int64_t>{-1});
    CHECK(q.zeros() == std::vector<std::int64_t>{1});
    CHECK(q.span_length() == 3);
    CHECK(q.label() == "-1:1?0");
    CHECK_THROWS_AS(PatternQuery({}), Error);
    CHECK_THROWS_AS(PatternQuery::from_string("??"), Error);
    CHECK_THROWS_AS(PatternQuery::from_string("12"), Error);
}

TEST_CASE("pattern_frequency_exact examples")
{
    const std::vector<std::int64_t> b23{2, 3};
    const Window w;
    CHECK(frequency_inclusion_exclusion(PatternQuery::from_string("1"), b23, w) == Rational(1, 3));
    CHECK(frequency_enumeration(PatternQuery::from_string("1"), b23, w) == Rational(1, 3));
    CHECK(frequency_inclusion_exclusion(PatternQuery::from_string("11"), b23, w) == 0);
    CHECK(frequency_enumeration(PatternQuery::from_string("11"), b23, w) == 0);
    CHECK(frequency_inclusion_exclusion(PatternQuery::from_string("10"), std::vector<std::int64_t>{2}, w) == Rational(1, 2));

    const auto set = ModuliSet::validate({2, 3});
    const auto f = pattern_frequency_exact(PatternQuery::from_string("1"), set, 2);
    CHECK(f.exact == Rational(1, 3));
    CHECK(f.tail_error.value() == 0.0);
    CHECK(f.level == 2);

    // Non-coprime moduli go through enumeration.
    const auto nc = ModuliSet::validate({4, 6});
    CHECK(pattern_frequency_exact(PatternQuery::from_string("1"), nc, 2).exact ==
        oracle_frequency({4, 6}, oracle::default_forbidden({4, 6}), PatternQuery::from_string("1")));
}

TEST_CASE("inclusion-exclusion equals enumeration equals oracle")
{
    const std::vector<std::vector<std::int64_t>> sets{{2, 3}, {2, 3, 5}, {3, 4, 5}, {4, 9, 25}, {2, 3, 5, 7}, {5, 7, 8, 9}};
    const auto words = all_words(6);
    for (const auto& moduli : sets) {
        CAPTURE(moduli);
        const auto f = oracle::default_forbidden(moduli);
        for (const auto& q : words) {
            const auto ie = frequency_inclusion_exclusion(q, moduli, Window{});
            REQUIRE(ie == frequency_enumeration(q, moduli, Window{}));
            REQUIRE(ie == oracle_frequency(moduli, f, q));
        }
    }
}

TEST_CASE("inclusion-exclusion with general windows and gaps")
{
    const std::vector<std::int64_t> moduli{5, 7, 9};
    const auto w = Window().with(5, {1, 3}).with(9, {0, 4, 8}).with(7, {});
    const oracle::Forbidden f{{5, {1, 3}}, {9, {0, 4, 8}}};
    for (const char* s : {"1", "0", "1?1", "0??0", "10?01", "1111"}) {
        const auto q = PatternQuery::from_string(s, -2);
        CHECK(frequency_inclusion_exclusion(q, moduli, w) == oracle_frequency(moduli, f, q));
        CHECK(frequency_enumeration(q, moduli, w) == oracle_frequency(moduli, f, q));
    }
}

TEST_CASE("larger lcm: inclusion-exclusion vs enumeration near 10^6")
{
    const std::vector<std::int64_t> moduli{4, 9, 25, 49, 11}; // lcm 485100
    for (const char* s : {"1", "10", "0110", "101101"}) {
        const auto q = PatternQuery::from_string(s, 3);
        CHECK(frequency_inclusion_exclusion(q, moduli, Window{}) == frequency_enumeration(q, moduli, Window{}));
    }
}

TEST_CASE("additivity, shift invariance and bounds")
{
    const std::vector<std::int64_t> moduli{4, 9, 25, 7};
    const Window w;
    CounterRng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::map<std::int64_t, bool> bits;
        const int len = 1 + static_cast<int>(rng.below(5));
        for (int i = 0; i < len; ++i)
            if (rng.below(3) != 0)
                bits[i] = rng.below(2) == 1;
        bits[len] = rng.below(2) == 1;
        const PatternQuery q(bits);
        const auto base = frequency_inclusion_exclusion(q, moduli, w);

        const std::int64_t free_pos = len + 1 + static_cast<std::int64_t>(rng.below(3));
        CHECK(base == frequency_inclusion_exclusion(q.with(free_pos, false), moduli, w) +
                frequency_inclusion_exclusion(q.with(free_pos, true), moduli, w));

        const auto g = static_cast<std::int64_t>(rng.below(1000)) - 500;
        CHECK(base == frequency_inclusion_exclusion(q.translated(g), moduli, w));

        CHECK(base >= 0);
        for (const auto& [n, bit] : q.bits())
            CHECK(base <= frequency_inclusion_exclusion(PatternQuery({{n, bit}}), moduli, w));
    }
}

TEST_CASE("zero-position cap")
{
    const std::string zeros(21, '0');
    CHECK_THROWS_AS(frequency_inclusion_exclusion(PatternQuery::from_string(zeros), std::vector<std::int64_t>{2, 3}, Window{}),
        Error);
    // 20 zeros is within the cap: no two consecutive integers are both free of {2}, so twenty zeros never happen.
    const std::string twenty(20, '0');
    CHECK(frequency_inclusion_exclusion(PatternQuery::from_string(twenty), std::vector<std::int64_t>{2}, Window{}) == 0);
    CHECK_THROWS_AS(frequency_inclusion_exclusion(PatternQuery::from_string("1"), std::vector<std::int64_t>{2, 4}, Window{}),
        Error);
}

TEST_CASE("tail_error")
{
    const auto finite = ModuliSet::validate({2, 3, 5});
    CHECK(tail_error(PatternQuery::from_string("1"), finite, 3) == 0.0);
    // Untruncated explicit moduli count towards the tail.
    CHECK(tail_error(PatternQuery::from_string("1"), finite, 2) == doctest::Approx(0.2));

    const auto sq = ModuliSet::validate({}, TailFamily::PrimeSquares);
    const std::size_t k = primes_up_to(100).size();
    const double bound = tail_error(PatternQuery::from_string("1"), sq, k);
    CHECK(bound <= 0.01);
    // Partial sum over 100 < p <= 10^6 is a lower bound for the true tail.
    double partial = 0.0;
    for (auto p : primes_up_to(1'000'000))
        if (p > 100)
            partial += 1.0 / (static_cast<double>(p) * static_cast<double>(p));
    CHECK(bound >= partial);
    CHECK(bound - partial <= 1.1e-6);

    // Scales with the span; a trailing '?' constrains nothing and does not count.
    CHECK(tail_error(PatternQuery::from_string("1??1"), sq, k) == doctest::Approx(4 * bound).epsilon(1e-12));
    CHECK(tail_error(PatternQuery::from_string("1?"), sq, k) == bound);

    CHECK(std::isinf(tail_error(PatternQuery::from_string("1"), ModuliSet::validate({}, TailFamily::Primes), 5)));
    CHECK(tail_error(PatternQuery::from_string("1"), sq, 3, Window::empty_forbidden()) == 0.0);
}

TEST_CASE("empirical_frequency")
{
    const auto two = ModuliSet::validate({2});
    const auto e2 = empirical_frequency(PatternQuery::from_string("1"), two, 1'000'000);
    CHECK(e2.exact() == Rational(1, 2));

    const auto b23 = ModuliSet::validate({2, 3});
    CHECK(empirical_frequency(PatternQuery::from_string("1"), b23, 600'000).exact() == Rational(1, 3));

    const auto sq = ModuliSet::validate({}, TailFamily::PrimeSquares);
    const auto e = empirical_frequency(PatternQuery::from_string("1"), sq, 1'000'000);
    CHECK(e.count == oracle::squarefree_count(1'000'000));
    CHECK(std::abs(e.value() - 6.0 / (std::numbers::pi * std::numbers::pi)) <= 2e-3);

    // Worker count does not change the count.
    CHECK(empirical_frequency(PatternQuery::from_string("1?01"), sq, 300'000, Window{}, 3).count ==
        empirical_frequency(PatternQuery::from_string("1?01"), sq, 300'000, Window{}, 1).count);
}

TEST_CASE("empirical approaches exact within lcm / N for finite B")
{
    const std::vector<std::int64_t> moduli{4, 9, 5};
    const auto set = ModuliSet::validate(moduli);
    const std::int64_t l = 180;
    for (const auto& word : {"1", "01", "110", "1011", "0000"}) {
        const auto q = PatternQuery::from_string(word);
        const auto exact = frequency_inclusion_exclusion(q, moduli, Window{});
        for (std::int64_t n : {1000, 4321, 20000}) {
            const auto emp = empirical_frequency(q, set, n).exact();
            CHECK(abs(emp - exact) <= Rational(l, n));
        }
    }
}

TEST_CASE("density")
{
    const auto b235 = ModuliSet::validate({2, 3, 5});
    const auto d = density(b235, Window{}, 3, 0);
    CHECK(d.exact == Rational(4, 15));
    CHECK(d.exact == oracle_frequency({2, 3, 5}, oracle::default_forbidden({2, 3, 5}), PatternQuery::from_string("1")));
    CHECK_FALSE(d.empirical.has_value());

    CHECK(density(b235, Window::empty_forbidden(), 3, 100).exact == 1);

    const auto nc = ModuliSet::validate({4, 6});
    CHECK(density(nc, Window{}, 2, 0).exact == Rational(2, 3));

    const auto sq = ModuliSet::validate({}, TailFamily::PrimeSquares);
    const double target = 6.0 / (std::numbers::pi * std::numbers::pi);
    Rational previous = 1;
    for (std::size_t k = 1; k <= 40; k += 3) {
        const auto r = density(sq, Window{}, k, 0);
        CHECK(r.exact < previous);
        previous = r.exact;
        const double value = static_cast<double>(r.exact);
        CHECK(value >= target);
        CHECK(value - r.tail_error <= target);
    }
}
