// Acceptance run: one PASS/FAIL line per criterion, with wall time and the key numbers.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "checks.hpp"
#include "cli.hpp"

using namespace bfree;

namespace {

struct Line {
    int id;
    bool passed;
    double seconds;
    double limit; // 0: no runtime limit
    std::string summary;
};

template <class F>
Line timed(int id, double limit, F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    const checks::CheckResult r = f();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = limit <= 0 || s <= limit;
    return {id, r.passed && in_time, s, limit, r.name + " " + r.detail.dump()};
}

std::string selftest_output(unsigned workers, int& code)
{
    std::ostringstream out, err;
    code = cli::run(std::vector<std::string>{"selftest", "--seed", "42", "--workers", std::to_string(workers)}, out, err);
    return out.str();
}

} // namespace

int main()
{
    const auto budget = checks::Budget::full();
    constexpr std::uint64_t seed = 42;
    constexpr unsigned workers = 4;
    std::vector<Line> lines;

    lines.push_back(timed(1, 5.0, [&] { return checks::check_squarefree_density(budget, workers); }));
    lines.push_back(timed(2, 10.0, [&] { return checks::check_oracle_equivalence(budget); }));
    lines.push_back(timed(3, 0, [&] { return checks::check_empirical_vs_exact(budget, workers); }));
    lines.push_back(timed(4, 0, [&] { return checks::check_megf_roundtrip(budget, seed); }));
    lines.push_back(timed(5, 0, [&] { return checks::check_separation(budget); }));
    lines.push_back(timed(6, 0, [&] { return checks::check_disagreement_density(budget, seed); }));
    lines.push_back(timed(7, 30.0, [&] { return checks::check_rotation(budget, seed, workers); }));
    lines.push_back(timed(8, 0, [&] { return checks::check_aperiodicity(); }));

    lines.push_back(timed(9, 0, [&] {
        checks::CheckResult r{9, "selftest determinism"};
        int c1 = 0, c2 = 0, c3 = 0;
        const auto a = selftest_output(1, c1);
        const auto b = selftest_output(1, c2);
        const auto c = selftest_output(4, c3);
        r.passed = !a.empty() && a == b && a == c && c1 == 0 && c2 == 0 && c3 == 0;
        r.detail = {{"bytes", a.size()}, {"repeat_identical", a == b}, {"workers_identical", a == c},
            {"exit_codes", {c1, c2, c3}}};
        return r;
    }));

    bool all = true;
    for (const auto& l : lines) {
        all = all && l.passed;
        const std::string limit = l.limit > 0 ? fmt::format(" (limit {:.0f} s)", l.limit) : "";
        std::cout << fmt::format("{} [{}] {:.2f} s{}: {}\n", l.passed ? "PASS" : "FAIL", l.id, l.seconds, limit, l.summary);
    }
    std::cout << (all ? "ALL PASS" : "SOME FAILED") << '\n';
    return all ? 0 : 1;
}
