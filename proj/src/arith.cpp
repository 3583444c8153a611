#include "bfree/arith.hpp"

#include <cmath>
#include <numeric>

namespace bfree {

std::optional<std::int64_t> checked_lcm(std::span<const std::int64_t> values)
{
    std::int64_t acc = 1;
    for (const std::int64_t v : values) {
        const std::int64_t g = std::gcd(acc, v);
        std::int64_t out = 0;
        if (__builtin_mul_overflow(acc / g, v, &out))
            return std::nullopt;
        acc = out;
    }
    return acc;
}

BigInt big_lcm(std::span<const std::int64_t> values)
{
    BigInt acc = 1;
    for (const std::int64_t v : values) {
        const BigInt bv = v;
        acc = acc / boost::multiprecision::gcd(acc, bv) * bv;
    }
    return acc;
}

bool pairwise_coprime(std::span<const std::int64_t> values)
{
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            if (std::gcd(values[i], values[j]) != 1)
                return false;
    return true;
}

std::vector<std::int64_t> primes_up_to(std::int64_t limit)
{
    std::vector<std::int64_t> primes;
    if (limit < 2)
        return primes;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (std::int64_t p = 2; p <= limit; ++p) {
        if (composite[static_cast<std::size_t>(p)])
            continue;
        primes.push_back(p);
        for (std::int64_t q = p * p; q <= limit; q += p)
            composite[static_cast<std::size_t>(q)] = true;
    }
    return primes;
}

bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    for (std::int64_t d = 2; d <= n / d; ++d)
        if (n % d == 0)
            return false;
    return true;
}

std::int64_t isqrt(std::int64_t n)
{
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r > n / r)
        --r;
    while ((r + 1) <= n / (r + 1))
        ++r;
    return r;
}

std::vector<std::int64_t> prime_factors(std::int64_t n)
{
    std::vector<std::int64_t> out;
    for (std::int64_t d = 2; d <= n / d; ++d) {
        if (n % d != 0)
            continue;
        out.push_back(d);
        while (n % d == 0)
            n /= d;
    }
    if (n > 1)
        out.push_back(n);
    return out;
}

std::string rational_num(const Rational& q)
{
    return boost::multiprecision::numerator(q).str();
}

std::string rational_den(const Rational& q)
{
    return boost::multiprecision::denominator(q).str();
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept
{
    // Largest multiple of bound representable; draws at or above it are rejected.
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    for (;;) {
        const std::uint64_t x = next();
        if (x < limit)
            return x % bound;
    }
}

BigInt CounterRng::below(const BigInt& bound)
{
    if (bound <= BigInt(UINT64_MAX))
        return BigInt(below(static_cast<std::uint64_t>(bound)));
    const std::size_t bits = boost::multiprecision::msb(bound) + 1;
    const std::size_t words = (bits + 63) / 64;
    const std::size_t excess = words * 64 - bits;
    for (;;) {
        BigInt x = 0;
        for (std::size_t w = 0; w < words; ++w)
            x = (x << 64) | BigInt(next());
        x >>= excess;
        if (x < bound)
            return x;
    }
}

} // namespace bfree
