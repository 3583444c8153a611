#include <doctest.h>

#include <algorithm>
#include <set>

#include "bfree/error.hpp"
#include "bfree/scheme.hpp"
#include "oracles.hpp"

using namespace bfree;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("validate_moduli flags and ordering")
{
    const auto a = ModuliSet::validate({4, 9, 25});
    CHECK(a.pairwise_coprime());
    CHECK(a.primitive());

    const auto b = ModuliSet::validate({2, 4});
    CHECK_FALSE(b.pairwise_coprime());
    CHECK_FALSE(b.primitive());

    const auto c = ModuliSet::validate({9, 4});
    CHECK(c.explicit_moduli() == std::vector<std::int64_t>{4, 9});

    CHECK(ModuliSet::validate({6, 10, 15}).primitive());
    CHECK_FALSE(ModuliSet::validate({6, 10, 15}).pairwise_coprime());
}

TEST_CASE("validate_moduli errors")
{
    CHECK(code_of([] { ModuliSet::validate({3, 5, 3}); }) == ErrorCode::DuplicateModulus);
    CHECK(code_of([] { ModuliSet::validate({1, 5}); }) == ErrorCode::ModulusTooSmall);
    CHECK(code_of([] { ModuliSet::validate({-4}); }) == ErrorCode::ModulusTooSmall);
    CHECK(code_of([] { ModuliSet::validate({}); }) == ErrorCode::EmptyModuli);
    CHECK(code_of([] { parse_tail("squares"); }) == ErrorCode::UnknownTail);
}

TEST_CASE("tail families")
{
    const auto sq = ModuliSet::validate({}, TailFamily::PrimeSquares);
    CHECK(sq.pairwise_coprime());
    CHECK(sq.primitive());
    CHECK_FALSE(sq.size().has_value());
    CHECK(sq.first(6) == std::vector<std::int64_t>{4, 9, 25, 49, 121, 169});
    CHECK(sq.up_to(50) == std::vector<std::int64_t>{4, 9, 25, 49});

    // 6 is square-free composite: shares primes with 4 and 9 but neither divides the other.
    const auto mixed = ModuliSet::validate({6}, TailFamily::PrimeSquares);
    CHECK_FALSE(mixed.pairwise_coprime());
    CHECK(mixed.primitive());
    CHECK(mixed.first(4) == std::vector<std::int64_t>{4, 6, 9, 25});

    CHECK_FALSE(ModuliSet::validate({3}, TailFamily::PrimeSquares).primitive());
    CHECK_FALSE(ModuliSet::validate({12}, TailFamily::PrimeSquares).primitive());
    const auto member = ModuliSet::validate({4, 49}, TailFamily::PrimeSquares);
    CHECK(member.pairwise_coprime());
    CHECK(member.first(3) == std::vector<std::int64_t>{4, 9, 25});

    const auto primes = ModuliSet::validate({}, TailFamily::Primes);
    CHECK(primes.first(5) == std::vector<std::int64_t>{2, 3, 5, 7, 11});
    CHECK_FALSE(ModuliSet::validate({4}, TailFamily::Primes).primitive());

    CHECK(code_of([] { ModuliSet::validate({2, 3}).first(3); }) == ErrorCode::LevelExceedsModuli);
}

TEST_CASE("delta_embed")
{
    CHECK(delta_embed(5, std::vector<std::int64_t>{2, 3, 5}).residues() == std::vector<std::int64_t>{1, 2, 0});
    CHECK(delta_embed(0, std::vector<std::int64_t>{4, 9, 25}).residues() == std::vector<std::int64_t>{0, 0, 0});
    CHECK(delta_embed(-1, std::vector<std::int64_t>{2, 3}).residues() == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("internal points enforce CRT compatibility")
{
    CHECK(code_of([] { TruncatedInternalPoint({2, 4}, {0, 1}); }) == ErrorCode::IncompatibleResidues);
    CHECK(code_of([] { TruncatedInternalPoint({2, 3}, {0, 3}); }) == ErrorCode::InvalidResidue);
    CHECK(code_of([] { TruncatedInternalPoint({2, 3}, {0}); }) == ErrorCode::LevelMismatch);
    const TruncatedInternalPoint h({2, 4}, {1, 3});
    CHECK(h.translated(1).residues() == std::vector<std::int64_t>{0, 0});
    CHECK(h.translated(-5).residues() == std::vector<std::int64_t>{0, 2});
}

TEST_CASE("CRT soundness by exhaustive enumeration")
{
    const std::vector<std::vector<std::int64_t>> sets{{2, 3}, {4, 6}, {4, 6, 10}, {2, 3, 4, 9}, {8, 12, 18}, {6, 10, 15}};
    for (const auto& moduli : sets) {
        CAPTURE(moduli);
        const std::int64_t l = oracle::lcm_of(moduli);
        std::set<std::vector<std::int64_t>> embedded;
        for (std::int64_t n = 0; n < l; ++n) {
            const auto h = delta_embed(n, moduli);
            CHECK(crt_compatible(moduli, h.residues()));
            embedded.insert(h.residues());
        }
        CHECK(static_cast<std::int64_t>(embedded.size()) == l);
        std::int64_t compatible = 0;
        for (const auto& v : oracle::all_vectors(moduli)) {
            if (!crt_compatible(moduli, v))
                continue;
            ++compatible;
            CHECK(embedded.count(v) == 1);
        }
        CHECK(compatible == l);
    }
}

TEST_CASE("haar_sample")
{
    const std::vector<std::int64_t> b23{2, 3};
    std::map<std::vector<std::int64_t>, int> counts;
    constexpr int draws = 6000;
    for (int s = 0; s < draws; ++s)
        ++counts[haar_sample(b23, static_cast<std::uint64_t>(s)).residues()];
    REQUIRE(counts.size() == 6);
    double chi2 = 0.0;
    for (const auto& [v, c] : counts) {
        const double expected = draws / 6.0;
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // 5 degrees of freedom, 0.1% critical value.
    CHECK(chi2 < 20.52);

    const std::vector<std::int64_t> b24{2, 4};
    for (int s = 0; s < 200; ++s) {
        const auto h = haar_sample(b24, static_cast<std::uint64_t>(s));
        CHECK(h.residues()[0] == h.residues()[1] % 2);
    }
    CHECK(haar_sample(std::vector<std::int64_t>{2}, 17) == haar_sample(std::vector<std::int64_t>{2}, 17));

    // lcm beyond 64 bits still samples compatible points.
    std::vector<std::int64_t> big;
    for (std::int64_t p : primes_up_to(60))
        big.push_back(p * p);
    const auto h = haar_sample(big, 3);
    CHECK(h.level() == big.size());
}

TEST_CASE("window_contains")
{
    const std::vector<std::int64_t> b{2, 3};
    const Window w;
    CHECK_FALSE(window_contains(delta_embed(0, b), w));
    CHECK(window_contains(delta_embed(1, b), w));
    CHECK_FALSE(window_contains(delta_embed(6, b), w));
}

TEST_CASE("window validation")
{
    CHECK(code_of([] { Window().with(3, {0, 1, 2}); }) == ErrorCode::WindowNotProper);
    CHECK(code_of([] { Window().with(3, {3}); }) == ErrorCode::InvalidResidue);
    const auto w = Window().with(6, {3, 0, 3});
    CHECK(w.forbidden(6) == std::vector<std::int64_t>{0, 3});
    CHECK(w.forbidden(5) == std::vector<std::int64_t>{0});
    CHECK(Window::empty_forbidden().forbidden(5).empty());
}

TEST_CASE("cylinder_measure")
{
    CHECK(cylinder_measure(CylinderConstraint({2, 3}, {{1}, {1, 2}})) == Rational(1, 3));
    CHECK(cylinder_measure_enumerate(CylinderConstraint({2, 3}, {{1}, {1, 2}})) == Rational(1, 3));
    CHECK(cylinder_measure(CylinderConstraint({2}, {{0, 1}})) == 1);
    CHECK(cylinder_measure(CylinderConstraint({2, 4}, {{1}, {0}})) == 0);
    CHECK(cylinder_measure(CylinderConstraint({2, 3}, {{}, {1}})) == 0);
    CHECK(code_of([] { cylinder_measure_product(CylinderConstraint({2, 4}, {{1}, {1}})); }) == ErrorCode::NotCoprime);
    CHECK(code_of([] {
        cylinder_measure_enumerate(CylinderConstraint({9973, 9967}, {{1}, {1}}), 1000);
    }) == ErrorCode::LcmOverflow);
}

TEST_CASE("Haar consistency: product formula equals enumeration")
{
    CounterRng rng(7);
    const std::vector<std::vector<std::int64_t>> sets{{2, 3, 5, 7}, {4, 9, 25}, {3, 4, 5, 7, 11}, {8, 9, 25, 49}, {7, 11, 13, 17}};
    for (const auto& moduli : sets) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::vector<std::int64_t>> allowed;
            for (auto b : moduli) {
                std::vector<std::int64_t> s;
                for (std::int64_t r = 0; r < b; ++r)
                    if (rng.below(3) != 0)
                        s.push_back(r);
                allowed.push_back(s);
            }
            const CylinderConstraint c(moduli, allowed);
            const auto product = cylinder_measure_product(c);
            CHECK(product == cylinder_measure_enumerate(c));

            // Oracle: direct count over Z/lcm.
            const std::int64_t l = oracle::lcm_of(moduli);
            std::int64_t hits = 0;
            for (std::int64_t n = 0; n < l; ++n) {
                bool ok = true;
                for (std::size_t i = 0; i < moduli.size() && ok; ++i)
                    ok = std::find(allowed[i].begin(), allowed[i].end(), n % moduli[i]) != allowed[i].end();
                hits += ok;
            }
            CHECK(product == Rational(hits, l));
        }
    }
}

TEST_CASE("window_period_group")
{
    const std::vector<std::int64_t> b235{2, 3, 5};
    const auto trivial = window_period_group(Window(), b235);
    REQUIRE(trivial.size() == 1);
    CHECK(trivial[0].residues() == std::vector<std::int64_t>{0, 0, 0});
    CHECK(haar_aperiodic_at_level(Window(), b235));

    const std::vector<std::int64_t> b6{6};
    const auto w6 = Window().with(6, {0, 3});
    const auto periods = window_period_group(w6, b6);
    REQUIRE(periods.size() == 2);
    CHECK(periods[0].residues()[0] == 0);
    CHECK(periods[1].residues()[0] == 3);
    CHECK_FALSE(haar_aperiodic_at_level(w6, b6));

    const std::vector<std::int64_t> b23{2, 3};
    const auto full = window_period_group(Window::empty_forbidden(), b23);
    CHECK(full.size() == 6);

    // Oracle: per-modulus shift check by brute force.
    for (std::int64_t t = 0; t < 6; ++t) {
        const std::set<std::int64_t> f{0, 3};
        std::set<std::int64_t> moved;
        for (auto x : f)
            moved.insert((x + t) % 6);
        CHECK((moved == f) == (t == 0 || t == 3));
    }
}

TEST_CASE("period group is a subgroup")
{
    const std::vector<std::vector<std::int64_t>> sets{{4, 6}, {6, 10}, {12}, {4, 6, 9}};
    CounterRng rng(11);
    for (const auto& moduli : sets) {
        for (int trial = 0; trial < 10; ++trial) {
            Window w;
            for (auto b : moduli) {
                // Union of cosets of a random subgroup dZ/bZ, so periods are likely nontrivial.
                std::vector<std::int64_t> divisors;
                for (std::int64_t d = 1; d <= b; ++d)
                    if (b % d == 0 && d < b)
                        divisors.push_back(d);
                const std::int64_t d = divisors[rng.below(divisors.size())];
                std::vector<std::int64_t> f;
                const std::int64_t coset = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(d)));
                for (std::int64_t x = coset; x < b; x += d)
                    f.push_back(x);
                if (static_cast<std::int64_t>(f.size()) < b)
                    w = w.with(b, f);
            }
            const auto group = window_period_group(w, moduli);
            std::set<std::vector<std::int64_t>> elems;
            for (const auto& g : group)
                elems.insert(g.residues());
            CHECK(elems.count(std::vector<std::int64_t>(moduli.size(), 0)) == 1);
            for (const auto& a : group) {
                std::vector<std::int64_t> neg;
                for (std::size_t i = 0; i < moduli.size(); ++i)
                    neg.push_back((moduli[i] - a.residues()[i]) % moduli[i]);
                CHECK(elems.count(neg) == 1);
                for (const auto& b : group)
                    CHECK(elems.count((a + b).residues()) == 1);
            }
        }
    }
}
