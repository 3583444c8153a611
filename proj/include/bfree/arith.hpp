#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bfree {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Canonical representative of n mod b in [0, b).
constexpr std::int64_t mod_floor(std::int64_t n, std::int64_t b) noexcept
{
    const std::int64_t r = n % b;
    return r < 0 ? r + b : r;
}

/// lcm of all values, or nullopt when it does not fit in int64.
std::optional<std::int64_t> checked_lcm(std::span<const std::int64_t> values);

BigInt big_lcm(std::span<const std::int64_t> values);

bool pairwise_coprime(std::span<const std::int64_t> values);

/// Sieve of Eratosthenes, primes p <= limit in ascending order.
std::vector<std::int64_t> primes_up_to(std::int64_t limit);

bool is_prime(std::int64_t n);

/// floor(sqrt(n)) for n >= 0.
std::int64_t isqrt(std::int64_t n);

/// Distinct prime factors, ascending.
std::vector<std::int64_t> prime_factors(std::int64_t n);

std::string rational_num(const Rational& q);
std::string rational_den(const Rational& q);

// Counter-based generator: the i-th draw of a stream is a pure function of (seed, i),
// so work can be split across threads without changing results.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t at(std::uint64_t index) const noexcept { return splitmix64(key_ + index * 0xd1b54a32d192ed03ULL); }

    std::uint64_t next() noexcept { return at(counter_++); }

    /// Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Uniform big integer in [0, bound), bound > 0.
    BigInt below(const BigInt& bound);

    std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace bfree
