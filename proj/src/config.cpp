#include "bfree/config.hpp"

#include <algorithm>
#include <thread>

#include <fmt/format.h>

#include "bfree/error.hpp"

namespace bfree {

std::string_view to_string(PatchSource source)
{
    switch (source) {
    case PatchSource::ExactIntegerOrbit: return "exact";
    case PatchSource::TruncatedGeneric: return "generic";
    case PatchSource::RotationCoding: return "rotation";
    case PatchSource::Product: return "product";
    case PatchSource::Raw: return "raw";
    }
    return "raw";
}

Patch::Patch(std::int64_t lo, std::vector<std::uint8_t> bits, Provenance provenance)
    : lo_(lo), bits_(std::move(bits)), provenance_(std::move(provenance))
{
    if (bits_.empty())
        fail(ErrorCode::InvalidArgument, "patch must cover at least one position");
    for (auto& b : bits_)
        b = b ? 1 : 0;
}

bool Patch::at(std::int64_t n) const
{
    if (!contains(n))
        fail(ErrorCode::CenterOutOfRange, fmt::format("position {} outside [{}, {}]", n, lo_, hi()));
    return (*this)[n];
}

std::string Patch::to_string() const
{
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i])
            s[i] = '1';
    return s;
}

namespace {

struct SieveModulus {
    std::int64_t b;
    std::vector<std::int64_t> forbidden;
};

// Marks values v in [first, first + out.size()) with v mod b in F_b as 0.
void sieve_block(std::int64_t first, std::span<std::uint8_t> out, const std::vector<SieveModulus>& moduli)
{
    std::fill(out.begin(), out.end(), std::uint8_t{1});
    const auto len = static_cast<std::int64_t>(out.size());
    for (const auto& m : moduli) {
        for (const std::int64_t f : m.forbidden) {
            for (std::int64_t i = mod_floor(f - first, m.b); i < len; i += m.b)
                out[static_cast<std::size_t>(i)] = 0;
        }
    }
}

} // namespace

Patch exact_patch(std::int64_t m, std::int64_t lo, std::int64_t hi, const ModuliSet& moduli, const Window& window,
    unsigned workers)
{
    if (hi < lo)
        fail(ErrorCode::InvalidArgument, fmt::format("empty interval [{}, {}]", lo, hi));
    const std::int64_t first = m + lo;
    const std::int64_t last = m + hi;
    const std::int64_t reach = std::max(std::abs(first), std::abs(last));

    // Tail members above |v| cannot divide v != 0; the smallest one still decides v = 0,
    // and explicitly windowed members may forbid nonzero residues.
    std::vector<std::int64_t> bs = moduli.up_to(std::max<std::int64_t>(reach, 1));
    for (const std::int64_t b : moduli.explicit_moduli())
        bs.push_back(b);
    if (moduli.has_tail()) {
        const auto head = moduli.first(1);
        bs.insert(bs.end(), head.begin(), head.end());
        for (const auto& [b, f] : window.overrides())
            if (moduli.is_tail_member(b))
                bs.push_back(b);
    }
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());

    std::vector<SieveModulus> sieve;
    for (const std::int64_t b : bs) {
        const auto& f = window.forbidden(b);
        if (!f.empty())
            sieve.push_back({b, f});
    }

    const std::int64_t len = hi - lo + 1;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(len));
    const std::int64_t blocks = (len + kSieveBlock - 1) / kSieveBlock;
    auto run = [&](std::int64_t start_block, std::int64_t stride) {
        for (std::int64_t k = start_block; k < blocks; k += stride) {
            const std::int64_t off = k * kSieveBlock;
            const std::int64_t n = std::min(kSieveBlock, len - off);
            sieve_block(first + off, std::span(bits).subspan(static_cast<std::size_t>(off), static_cast<std::size_t>(n)),
                sieve);
        }
    };
    const auto threads = static_cast<std::int64_t>(std::clamp<unsigned>(workers, 1, 64));
    if (threads == 1 || blocks == 1) {
        run(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::int64_t t = 0; t < threads; ++t)
            pool.emplace_back(run, t, threads);
    }
    return Patch(lo, std::move(bits), Provenance{PatchSource::ExactIntegerOrbit, m, std::nullopt});
}

Patch generic_patch(const TruncatedInternalPoint& h, const Window& window, std::int64_t lo, std::int64_t hi)
{
    if (hi < lo)
        fail(ErrorCode::InvalidArgument, fmt::format("empty interval [{}, {}]", lo, hi));
    const auto len = static_cast<std::size_t>(hi - lo + 1);
    std::vector<std::uint8_t> bits(len, 1);
    for (std::size_t i = 0; i < h.level(); ++i) {
        const std::int64_t b = h.moduli()[i];
        if (window.forbidden(b).empty())
            continue;
        const auto mask = window.allowed_mask(b);
        std::int64_t idx = mod_floor(h.residues()[i] + mod_floor(lo, b), b);
        for (std::size_t k = 0; k < len; ++k) {
            if (!mask[static_cast<std::size_t>(idx)])
                bits[k] = 0;
            if (++idx == b)
                idx = 0;
        }
    }
    return Patch(lo, std::move(bits), Provenance{PatchSource::TruncatedGeneric, 0, h});
}

Patch shift(const Patch& p, std::int64_t g)
{
    Provenance prov = p.provenance();
    prov.m += g;
    if (prov.point)
        prov.point = prov.point->translated(g);
    return Patch(p.lo() - g, {p.bits().begin(), p.bits().end()}, std::move(prov));
}

Patch multiply(const Patch& a, const Patch& b)
{
    if (a.lo() != b.lo() || a.size() != b.size())
        fail(ErrorCode::LevelMismatch, "coordinate-wise product needs patches on the same interval");
    std::vector<std::uint8_t> bits(a.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        bits[i] = a.bits()[i] & b.bits()[i];
    return Patch(a.lo(), std::move(bits), Provenance{PatchSource::Product, 0, std::nullopt});
}

std::int64_t agreement_length(const Patch& p1, const Patch& p2, std::int64_t center)
{
    if (!p1.contains(center) || !p2.contains(center))
        fail(ErrorCode::CenterOutOfRange, fmt::format("center {} is not covered by both patches", center));
    if (p1[center] != p2[center])
        return -1;
    std::int64_t len = 0;
    for (;;) {
        const std::int64_t l = center - len - 1;
        const std::int64_t r = center + len + 1;
        if (!p1.contains(l) || !p2.contains(l) || !p1.contains(r) || !p2.contains(r))
            break;
        if (p1[l] != p2[l] || p1[r] != p2[r])
            break;
        ++len;
    }
    return len;
}

} // namespace bfree
