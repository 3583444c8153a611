#include "checks.hpp"

#include <cmath>
#include <numbers>

#include "bfree/config.hpp"
#include "bfree/error.hpp"
#include "bfree/megf.hpp"
#include "bfree/mirsky.hpp"
#include "bfree/proximal.hpp"
#include "bfree/rotation.hpp"

namespace bfree::checks {

namespace {

std::vector<std::int64_t> first_prime_squares(std::size_t count)
{
    return ModuliSet::validate({}, TailFamily::PrimeSquares).first(count);
}

// Q(N) = sum over d <= sqrt N of mu(d) * floor(N / d^2).
std::int64_t squarefree_count_mobius(std::int64_t n)
{
    const std::int64_t root = isqrt(n);
    std::vector<int> mu(static_cast<std::size_t>(root + 1), 1);
    std::vector<bool> composite(static_cast<std::size_t>(root + 1), false);
    for (std::int64_t p = 2; p <= root; ++p) {
        if (composite[static_cast<std::size_t>(p)])
            continue;
        for (std::int64_t k = p; k <= root; k += p) {
            if (k > p)
                composite[static_cast<std::size_t>(k)] = true;
            mu[static_cast<std::size_t>(k)] *= -1;
        }
        for (std::int64_t k = p * p; k <= root; k += p * p)
            mu[static_cast<std::size_t>(k)] = 0;
    }
    std::int64_t q = 0;
    for (std::int64_t d = 1; d <= root; ++d)
        q += mu[static_cast<std::size_t>(d)] * (n / (d * d));
    return q;
}

bool squarefree_trial(std::int64_t n)
{
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % (d * d) == 0)
            return false;
    return true;
}

std::vector<PatternQuery> words_up_to(int max_len)
{
    std::vector<PatternQuery> out;
    for (int len = 1; len <= max_len; ++len)
        for (int mask = 0; mask < (1 << len); ++mask) {
            std::map<std::int64_t, bool> bits;
            for (int i = 0; i < len; ++i)
                bits[i] = ((mask >> (len - 1 - i)) & 1) != 0;
            out.emplace_back(bits);
        }
    return out;
}

// Translations t of Z/lcm with W + t = W, found by testing every point of H_K.
std::vector<TruncatedInternalPoint> brute_periods(const Window& w, const std::vector<std::int64_t>& moduli)
{
    const std::int64_t l = *checked_lcm(moduli);
    std::vector<bool> in(static_cast<std::size_t>(l));
    for (std::int64_t n = 0; n < l; ++n)
        in[static_cast<std::size_t>(n)] = window_contains(delta_embed(n, moduli), w);
    std::vector<TruncatedInternalPoint> out;
    for (std::int64_t t = 0; t < l; ++t) {
        bool period = true;
        for (std::int64_t n = 0; n < l && period; ++n)
            period = in[static_cast<std::size_t>(n)] == in[static_cast<std::size_t>((n + t) % l)];
        if (period)
            out.push_back(delta_embed(t, moduli));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.residues() < b.residues(); });
    return out;
}

Json points_json(const std::vector<TruncatedInternalPoint>& v)
{
    Json out = Json::array();
    for (const auto& p : v)
        out.push_back(point_to_json(p));
    return out;
}

} // namespace

Budget Budget::reduced()
{
    Budget b;
    b.density_n = 100'000;
    b.finite_n = 60'000;
    b.tail_n = 100'000;
    b.megf_points = 20;
    b.megf_shift = 10;
    b.separation_shift = 3;
    b.separation_search = 1000;
    b.rotation_samples = 20'000;
    b.equivariance_range = 200;
    return b;
}

CheckResult check_oracles(std::uint64_t seed)
{
    CheckResult r{0, "oracle suite"};
    const auto sq = ModuliSet::validate({}, TailFamily::PrimeSquares);

    std::int64_t sieve_mismatch = 0;
    const Patch p = exact_patch(0, 1, 10'000, sq);
    for (std::int64_t n = 1; n <= 10'000; ++n)
        sieve_mismatch += p[n] != squarefree_trial(n);

    const std::vector<std::int64_t> finite{4, 6, 9, 25};
    const auto finite_set = ModuliSet::validate(finite);
    CounterRng rng(seed, 0x0ac1e);
    std::int64_t generic_mismatch = 0;
    std::int64_t crt_failures = 0;
    for (int i = 0; i < 20; ++i) {
        const auto m = static_cast<std::int64_t>(rng.below(1'000'000)) - 500'000;
        generic_mismatch += !generic_patch(delta_embed(m, finite), Window{}, -200, 200)
                                 .same_word(exact_patch(m, -200, 200, finite_set));
        const auto h = haar_sample(finite, rng.next());
        crt_failures += !crt_compatible(h.moduli(), h.residues());
    }

    r.passed = sieve_mismatch == 0 && generic_mismatch == 0 && crt_failures == 0;
    r.detail = {{"sieve_vs_trial_division_mismatches", sieve_mismatch},
        {"generic_vs_exact_mismatches", generic_mismatch}, {"crt_failures", crt_failures}};
    return r;
}

CheckResult check_squarefree_density(const Budget& b, unsigned workers)
{
    CheckResult r{1, "square-free density"};
    const auto sq = ModuliSet::validate({}, TailFamily::PrimeSquares);
    const auto e = empirical_frequency(PatternQuery::from_string("1"), sq, b.density_n, Window{}, workers);
    const std::int64_t oracle = squarefree_count_mobius(b.density_n);
    const double target = 6.0 / (std::numbers::pi * std::numbers::pi);
    const double deviation = std::abs(e.value() - target);
    r.passed = e.count == oracle && deviation <= 2e-3;
    r.detail = {{"N", b.density_n}, {"count", e.count}, {"mobius_count", oracle}, {"density", e.value()},
        {"target", target}, {"deviation", deviation}, {"tolerance", 2e-3}};
    return r;
}

CheckResult check_oracle_equivalence(const Budget& b)
{
    CheckResult r{2, "inclusion-exclusion equals enumeration"};
    const std::vector<std::vector<std::int64_t>> sets{{2, 3}, {2, 3, 5}, {2, 3, 5, 7}, {3, 4, 5}};
    const auto words = words_up_to(b.oracle_max_len);
    std::int64_t compared = 0;
    Json mismatches = Json::array();
    for (const auto& moduli : sets)
        for (const auto& q : words) {
            ++compared;
            const auto ie = frequency_inclusion_exclusion(q, moduli, Window{});
            const auto en = frequency_enumeration(q, moduli, Window{});
            if (ie != en)
                mismatches.push_back({{"moduli", moduli}, {"pattern", q.label()}});
        }
    r.passed = mismatches.empty();
    r.detail = {{"max_length", b.oracle_max_len}, {"compared", compared}, {"mismatches", mismatches}};
    return r;
}

CheckResult check_empirical_vs_exact(const Budget& b, unsigned workers)
{
    CheckResult r{3, "empirical versus exact frequencies"};
    const auto words = words_up_to(4);

    const auto b235 = ModuliSet::validate({2, 3, 5});
    std::int64_t finite_mismatches = 0;
    for (const auto& q : words) {
        const auto exact = pattern_frequency_exact(q, b235, 3).exact;
        finite_mismatches += empirical_frequency(q, b235, b.finite_n, Window{}, workers).exact() != exact;
    }

    // p <= 13: 4, 9, 25, 49, 121, 169.
    const auto sq = ModuliSet::validate({}, TailFamily::PrimeSquares);
    constexpr std::size_t level = 6;
    double worst_excess = -1.0;
    std::string worst_pattern;
    for (const auto& q : words) {
        const auto f = pattern_frequency_exact(q, sq, level);
        const double emp = empirical_frequency(q, sq, b.tail_n, Window{}, workers).value();
        const double excess = std::abs(emp - static_cast<double>(f.exact)) - (*f.tail_error + 5e-3);
        if (excess > worst_excess || worst_pattern.empty()) {
            worst_excess = excess;
            worst_pattern = q.label();
        }
    }
    r.passed = b.finite_n % 30 == 0 && finite_mismatches == 0 && worst_excess <= 0.0;
    r.detail = {{"finite_N", b.finite_n}, {"finite_mismatches", finite_mismatches}, {"tail_N", b.tail_n},
        {"tail_level", level}, {"worst_pattern", worst_pattern}, {"worst_excess_over_bound", worst_excess}};
    return r;
}

CheckResult check_megf_roundtrip(const Budget& b, std::uint64_t seed)
{
    CheckResult r{4, "MEGF round-trip and equivariance"};
    const auto moduli = first_prime_squares(8);
    CounterRng rng(seed, 0x3e6f);
    std::int64_t recovered = 0, equivariant = 0, max_radius = 0;
    for (int i = 0; i < b.megf_points; ++i) {
        const auto h = haar_sample(moduli, rng.at(static_cast<std::uint64_t>(i)));
        const auto radius = full_determining_radius(h, Window{});
        if (!radius)
            continue;
        max_radius = std::max(max_radius, *radius);
        const auto rec = reconstruct(generic_patch(h, Window{}, -*radius, *radius), moduli, Window{});
        recovered += rec.point() == h;
        equivariant += equivariance_check(h, Window{}, -b.megf_shift, b.megf_shift, -*radius, *radius).passed();
    }
    r.passed = recovered == b.megf_points && equivariant == b.megf_points;
    r.detail = {{"moduli", moduli}, {"points", b.megf_points}, {"recovered", recovered},
        {"equivariant", equivariant}, {"shift_range", b.megf_shift}, {"max_radius", max_radius}};
    return r;
}

CheckResult check_separation(const Budget& b)
{
    CheckResult r{5, "separation and tail-perturbation witnesses"};
    const auto moduli = first_prime_squares(8);
    const std::int64_t g = b.separation_shift;
    const std::int64_t search = b.separation_search;

    // Every point examined is Δ(g + c) with |g + c| <= search + g.
    const auto joint = max_determining_radius(delta_embed(0, moduli), Window{}, -search - g, search + g);
    if (!joint) {
        r.detail = {{"error", "determining radius exceeds the cap"}};
        return r;
    }
    const std::int64_t radius = *joint;
    const std::int64_t reach = std::max(search, radius);
    std::int64_t pairs = 0, separated = 0, best = -1;
    for (std::int64_t g1 = -g; g1 <= g; ++g1)
        for (std::int64_t g2 = g1 + 1; g2 <= g; ++g2) {
            const auto h1 = delta_embed(g1, moduli);
            const auto h2 = delta_embed(g2, moduli);
            ++pairs;
            separated += !find_agreement_window(h1, h2, Window{}, radius, reach).has_value();
            best = std::max(best, best_agreement_length(h1, h2, Window{}, 0, reach));
        }

    std::int64_t tail_pairs = 0, witnessed = 0;
    for (std::int64_t g1 = -g; g1 <= g; ++g1)
        for (std::int64_t extra : {7, 11, 13}) {
            auto wider = moduli;
            wider.push_back(extra);
            const std::int64_t half = (extra - 2) / 2;
            ++tail_pairs;
            witnessed += find_agreement_window(delta_embed(g1, moduli), delta_embed(g1, wider), Window{}, half,
                2 * extra)
                             .has_value();
        }

    r.passed = separated == pairs && witnessed == tail_pairs;
    r.detail = {{"moduli", moduli}, {"joint_radius", radius}, {"search_radius", reach}, {"pairs", pairs},
        {"separated", separated}, {"best_agreement", best}, {"tail_pairs", tail_pairs}, {"witnessed", witnessed}};
    return r;
}

CheckResult check_disagreement_density(const Budget& b, std::uint64_t seed)
{
    CheckResult r{6, "disagreement-density exactness"};
    const std::vector<std::int64_t> moduli{2, 3, 5};
    CounterRng rng(seed, 0xd15a);
    std::int64_t equal = 0;
    Json sample = Json::array();
    for (int i = 0; i < b.disagreement_pairs; ++i) {
        const auto h1 = haar_sample(moduli, rng.next());
        const auto h2 = haar_sample(moduli, rng.next());
        const auto exact = exact_disagreement_density(h1, h2, Window{});
        const auto offset = static_cast<std::int64_t>(rng.below(1000)) - 500;
        const auto period = disagreement_density_on(h1, h2, Window{}, offset, offset + 29);
        equal += exact == period && exact == exact_disagreement_density(h2, h1, Window{});
        if (i < 3)
            sample.push_back({{"h1", point_to_json(h1)}, {"h2", point_to_json(h2)}, {"exact", rational_to_json(exact)}});
    }
    r.passed = equal == b.disagreement_pairs;
    r.detail = {{"pairs", b.disagreement_pairs}, {"equal", equal}, {"sample", sample}};
    return r;
}

CheckResult check_rotation(const Budget& b, std::uint64_t seed, unsigned workers)
{
    CheckResult r{7, "rotation coding"};
    const double alpha = std::numbers::sqrt2 - 1.0;
    const RotationSystem sys(alpha, b.rotation_level);
    const CircleCoord measure = sys.e().fixed_measure();
    const bool measure_ok = measure > 0 && measure <= kFullTurn / 2;

    const auto stats = block_ones_stats(sys, 3, b.rotation_samples, seed, workers);
    const bool block_ok = stats.estimate >= stats.lower_bound - 3 * stats.standard_error;

    CounterRng rng(seed, 0xe901);
    const std::int64_t range = b.equivariance_range;
    std::int64_t equivariant = 0;
    constexpr int points = 10;
    for (int i = 0; i < points; ++i) {
        const CirclePoint x = rng.next();
        const auto lhs = code_point(sys, sys.rotate(x), -range, range);
        const auto rhs = shift(code_point(sys, x, -range + 1, range + 1), 1);
        equivariant += lhs.lo() == rhs.lo() && lhs.same_word(rhs);
    }

    const auto inj = injectivity_probe(sys, 100, 10'000, seed);
    r.passed = measure_ok && block_ok && equivariant == points;
    r.detail = {{"alpha", alpha}, {"level", b.rotation_level}, {"arcs", sys.e().arcs().size()},
        {"measure", union_measure(sys.e())}, {"measure_in_range", measure_ok}, {"block", 3},
        {"samples", stats.samples}, {"hits", stats.hits}, {"estimate", stats.estimate},
        {"standard_error", stats.standard_error}, {"lower_bound", stats.lower_bound},
        {"equivariance_range", range}, {"equivariant_points", equivariant},
        {"injectivity_fraction", inj.fraction()}};
    return r;
}

CheckResult check_aperiodicity()
{
    CheckResult r{8, "Haar aperiodicity"};
    struct Case {
        const char* name;
        Window window;
        std::vector<std::int64_t> moduli;
        std::vector<std::vector<std::int64_t>> expected;
    };
    const std::vector<Case> cases{
        {"default window on {2,3,5}", Window{}, {2, 3, 5}, {{0, 0, 0}}},
        {"F_6 = {0,3} on {6}", Window().with(6, {0, 3}), {6}, {{0}, {3}}},
        {"F_4 = {0,2}, F_6 = {0,3} on {4,6}", Window().with(4, {0, 2}).with(6, {0, 3}), {4, 6}, {{0, 0}, {2, 0}}},
    };
    bool all = true;
    Json detail = Json::array();
    for (const auto& c : cases) {
        const auto group = window_period_group(c.window, c.moduli);
        const auto brute = brute_periods(c.window, c.moduli);
        std::vector<std::vector<std::int64_t>> residues;
        for (const auto& p : group)
            residues.push_back(p.residues());
        Json per_modulus = Json::object();
        for (auto b : c.moduli)
            per_modulus[std::to_string(b)] = modulus_periods(c.window, b);
        const bool ok = residues == c.expected && group == brute;
        all = all && ok;
        detail.push_back({{"case", c.name}, {"group", points_json(group)}, {"brute_force", points_json(brute)},
            {"per_modulus_periods", per_modulus}, {"ok", ok}});
    }
    r.passed = all;
    r.detail = {{"cases", detail}};
    return r;
}

std::vector<CheckResult> run_all(const Budget& b, std::uint64_t seed, unsigned workers)
{
    std::vector<CheckResult> out;
    out.push_back(check_oracles(seed));
    out.push_back(check_squarefree_density(b, workers));
    out.push_back(check_oracle_equivalence(b));
    out.push_back(check_empirical_vs_exact(b, workers));
    out.push_back(check_megf_roundtrip(b, seed));
    out.push_back(check_separation(b));
    out.push_back(check_disagreement_density(b, seed));
    out.push_back(check_rotation(b, seed, workers));
    out.push_back(check_aperiodicity());
    return out;
}

Json to_json(const CheckResult& r)
{
    return Json{{"id", r.id}, {"name", r.name}, {"status", r.passed ? "PASS" : "FAIL"}, {"detail", r.detail}};
}

} // namespace bfree::checks
