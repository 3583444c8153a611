#include <doctest.h>

#include "bfree/error.hpp"
#include "bfree/megf.hpp"
#include "bfree/proximal.hpp"
#include "oracles.hpp"

using namespace bfree;

namespace {

// Disagreements between two generic words over one joint period, counted directly.
Rational oracle_disagreement(const TruncatedInternalPoint& h1, const TruncatedInternalPoint& h2)
{
    std::vector<std::int64_t> all = h1.moduli();
    all.insert(all.end(), h2.moduli().begin(), h2.moduli().end());
    const std::int64_t l = oracle::lcm_of(all);
    const auto f1 = oracle::default_forbidden(h1.moduli());
    const auto f2 = oracle::default_forbidden(h2.moduli());
    std::int64_t diff = 0;
    for (std::int64_t n = 0; n < l; ++n)
        diff += oracle::generic_bit(h1.moduli(), h1.residues(), f1, n) !=
            oracle::generic_bit(h2.moduli(), h2.residues(), f2, n);
    return Rational(diff, l);
}

} // namespace

TEST_CASE("identical points agree at the origin")
{
    const auto h = haar_sample(std::vector<std::int64_t>{4, 9, 25}, 3);
    for (std::int64_t l : {0, 5, 100})
        CHECK(find_agreement_window(h, h, Window{}, l, l) == 0);
    CHECK(exact_disagreement_density(h, h, Window{}) == 0);
    CHECK(empirical_disagreement_density(h, h, Window{}, 1000) == 0);
}

TEST_CASE("alternating parity words never agree")
{
    const TruncatedInternalPoint h1({2}, {0});
    const TruncatedInternalPoint h2({2}, {1});
    for (std::int64_t r : {1, 10, 1000})
        CHECK_FALSE(find_agreement_window(h1, h2, Window{}, 1, r).has_value());
    // L = 0 fails too: every single position differs.
    CHECK_FALSE(find_agreement_window(h1, h2, Window{}, 0, 50).has_value());
    CHECK(best_agreement_length(h1, h2, Window{}, 0, 50) == -1);
    CHECK(exact_disagreement_density(h1, h2, Window{}) == 1);
}

TEST_CASE("disagreement density examples")
{
    const TruncatedInternalPoint h1({2, 3}, {1, 2});
    const TruncatedInternalPoint h2({2, 3}, {1, 1});
    CHECK(generic_patch(h2, Window{}, 0, 5).to_string() == "100010");
    CHECK(exact_disagreement_density(h1, h2, Window{}) == Rational(1, 3));
    CHECK(empirical_disagreement_density(h1, h2, Window{}, 2) == Rational(2, 5));
    const TruncatedInternalPoint a({4, 6}, {1, 3});
    CHECK_THROWS_AS(exact_disagreement_density(a, a, Window{}, 5), Error);
}

TEST_CASE("tail perturbation leaves a witness in every gap")
{
    // h1 lives on B_K; h2 adds one modulus b' with F = {0}, so the two words differ only on
    // a single progression of step b'.
    const std::vector<std::int64_t> base{4, 9};
    for (std::int64_t m : {0, 17, -5}) {
        const auto h1 = delta_embed(m, base);
        for (std::int64_t bp = 3; bp <= 100; ++bp) {
            if (bp == 4 || bp == 9)
                continue;
            CAPTURE(bp);
            auto moduli = base;
            moduli.push_back(bp);
            const auto h2 = delta_embed(m, moduli);
            const std::int64_t l = (bp - 2) / 2;
            const auto c = find_agreement_window(h1, h2, Window{}, l, bp);
            REQUIRE(c.has_value());
            const auto p1 = generic_patch(h1, Window{}, *c - l, *c + l);
            const auto p2 = generic_patch(h2, Window{}, *c - l, *c + l);
            CHECK(p1.same_word(p2));
        }
    }
}

TEST_CASE("witness search order")
{
    // Words differ only where n + 4 = 0 mod 5 and n + 4 is not a multiple of 4; the first center
    // with a clean [c - 1, c + 1] is found by scanning 0, 1, -1, 2, -2, ...
    const auto h1 = delta_embed(4, std::vector<std::int64_t>{4});
    const auto h2 = delta_embed(4, std::vector<std::int64_t>{4, 5});
    std::optional<std::int64_t> expect;
    for (std::int64_t k = 0; k <= 20 && !expect; ++k)
        for (std::int64_t c : {k, -k}) {
            bool ok = true;
            for (std::int64_t n = c - 1; n <= c + 1; ++n)
                ok = ok && (oracle::mod(n + 4, 5) != 0 || oracle::mod(n + 4, 4) == 0);
            if (ok) {
                expect = c;
                break;
            }
        }
    CHECK(find_agreement_window(h1, h2, Window{}, 1, 20) == expect);
    CHECK(expect == -1);
}

TEST_CASE("exact density matches oracle, symmetry and shift invariance")
{
    const std::vector<std::int64_t> moduli{2, 3, 5};
    CounterRng rng(77);
    for (int i = 0; i < 20; ++i) {
        const auto h1 = haar_sample(moduli, rng.next());
        const auto h2 = haar_sample(moduli, rng.next());
        const auto exact = exact_disagreement_density(h1, h2, Window{});
        CHECK(exact == oracle_disagreement(h1, h2));
        CHECK(exact == exact_disagreement_density(h2, h1, Window{}));
        CHECK(exact >= 0);
        CHECK(exact <= 1);
        const auto g = static_cast<std::int64_t>(rng.below(200)) - 100;
        CHECK(exact == exact_disagreement_density(h1.translated(g), h2.translated(g), Window{}));
        // Whole periods, anywhere on the line.
        CHECK(disagreement_density_on(h1, h2, Window{}, 0, 29) == exact);
        CHECK(disagreement_density_on(h1, h2, Window{}, -45, 44) == exact);
        // lcm 15: 2N + 1 = 15 * 33
        const auto odd = std::vector<std::int64_t>{3, 5};
        const auto o1 = haar_sample(odd, rng.next());
        const auto o2 = haar_sample(odd, rng.next());
        CHECK(empirical_disagreement_density(o1, o2, Window{}, 247) == exact_disagreement_density(o1, o2, Window{}));

        const auto a = proximal_probe(h1, h2, Window{}, 2, 40, 500);
        const auto b = proximal_probe(h2, h1, Window{}, 2, 40, 500);
        CHECK(a == b);
        CHECK(a.best_agreement <= 40 + 2);
    }
}

TEST_CASE("distinct determined points separate beyond the determining radius")
{
    std::vector<std::int64_t> moduli;
    for (auto p : primes_up_to(7))
        moduli.push_back(p * p);
    constexpr std::int64_t search = 300;
    for (std::int64_t g1 = -3; g1 <= 3; ++g1)
        for (std::int64_t g2 = g1 + 1; g2 <= 3; ++g2) {
            const auto h1 = delta_embed(g1, moduli);
            const auto h2 = delta_embed(g2, moduli);
            const std::int64_t r = std::max(*max_determining_radius(h1, Window{}, -search, search),
                *max_determining_radius(h2, Window{}, -search, search));
            CHECK_FALSE(find_agreement_window(h1, h2, Window{}, r, search).has_value());
            CHECK(best_agreement_length(h1, h2, Window{}, r, search) < r);
        }
}

TEST_CASE("product formula against enumeration")
{
    // Different moduli sets, general windows.
    const auto w = Window().with(5, {1, 3}).with(7, {2});
    const TruncatedInternalPoint h1({4, 5, 9}, {1, 2, 7});
    const TruncatedInternalPoint h2({5, 7, 11}, {4, 0, 3});
    const auto exact = exact_disagreement_density(h1, h2, w);
    CHECK(exact == disagreement_density_on(h1, h2, w, 0, 4 * 5 * 9 * 7 * 11 - 1));
    CHECK(exact == exact_disagreement_density(h2, h1, w));

    // Non-coprime moduli fall back to enumeration.
    const TruncatedInternalPoint a({4, 6}, {1, 3});
    const TruncatedInternalPoint b({4, 6}, {3, 1});
    CHECK(exact_disagreement_density(a, b, Window{}) == disagreement_density_on(a, b, Window{}, 0, 11));
}

TEST_CASE("probe without an exact period")
{
    const std::vector<std::int64_t> moduli{4, 6, 35, 143, 323, 667}; // lcm above 10^10
    const auto h1 = haar_sample(moduli, 1);
    const auto h2 = haar_sample(moduli, 2);
    const auto r = proximal_probe(h1, h2, Window{}, 3, 50, 1000);
    CHECK_FALSE(r.exact_density.has_value());
    CHECK(r.empirical_density == empirical_disagreement_density(h1, h2, Window{}, 1000));

    // Coprime moduli keep an exact value at any depth.
    std::vector<std::int64_t> squares;
    for (auto p : primes_up_to(29))
        squares.push_back(p * p);
    CHECK(proximal_probe(haar_sample(squares, 1), haar_sample(squares, 2), Window{}, 3, 50, 1000).exact_density.has_value());
}
