#pragma once

// Property and oracle checks shared by `bfree selftest` and the acceptance binary.

#include <cstdint>
#include <string>
#include <vector>

#include "bfree/io.hpp"

namespace bfree::checks {

struct Budget {
    std::int64_t density_n = 1'000'000;
    int oracle_max_len = 4;
    std::int64_t finite_n = 600'000; // multiple of 30
    std::int64_t tail_n = 1'000'000;
    int megf_points = 100;
    std::int64_t megf_shift = 50;
    std::int64_t separation_shift = 10;
    std::int64_t separation_search = 10'000;
    int disagreement_pairs = 20;
    int rotation_level = 20;
    std::int64_t rotation_samples = 100'000;
    std::int64_t equivariance_range = 1000;

    static Budget full() { return {}; }
    static Budget reduced();
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    Json detail = Json::object();
};

CheckResult check_oracles(std::uint64_t seed);
CheckResult check_squarefree_density(const Budget& b, unsigned workers);
CheckResult check_oracle_equivalence(const Budget& b);
CheckResult check_empirical_vs_exact(const Budget& b, unsigned workers);
CheckResult check_megf_roundtrip(const Budget& b, std::uint64_t seed);
CheckResult check_separation(const Budget& b);
CheckResult check_disagreement_density(const Budget& b, std::uint64_t seed);
CheckResult check_rotation(const Budget& b, std::uint64_t seed, unsigned workers);
CheckResult check_aperiodicity();

/// Oracle checks (id 0) followed by checks 1..8, in order.
std::vector<CheckResult> run_all(const Budget& b, std::uint64_t seed, unsigned workers);

Json to_json(const CheckResult& r);

} // namespace bfree::checks
