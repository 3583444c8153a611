#include "bfree/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bfree/error.hpp"

namespace bfree {

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::ParseError, fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json(const std::string& text, const std::string& what)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::ParseError, fmt::format("{}: {}", what, e.what()));
    }
}

} // namespace

Scheme parse_scheme(const Json& j)
{
    try {
        if (!j.is_object())
            fail(ErrorCode::ParseError, "scheme must be a JSON object");
        std::vector<std::int64_t> raw;
        if (j.contains("moduli"))
            raw = j.at("moduli").get<std::vector<std::int64_t>>();
        TailFamily tail = TailFamily::None;
        if (j.contains("tail") && !j.at("tail").is_null())
            tail = parse_tail(j.at("tail").get<std::string>());

        Scheme s{ModuliSet::validate(std::move(raw), tail), Window{}};
        if (j.contains("window") && !j.at("window").is_null()) {
            for (const auto& [key, value] : j.at("window").items()) {
                std::int64_t b = 0;
                try {
                    std::size_t used = 0;
                    b = std::stoll(key, &used);
                    if (used != key.size())
                        throw std::invalid_argument(key);
                } catch (const std::logic_error&) {
                    fail(ErrorCode::ParseError, fmt::format("window key '{}' is not an integer", key));
                }
                s.window = s.window.with(b, value.get<std::vector<std::int64_t>>());
            }
        }
        return s;
    } catch (const Json::exception& e) {
        fail(ErrorCode::ParseError, fmt::format("malformed scheme: {}", e.what()));
    }
}

Scheme load_scheme(const std::string& path)
{
    return parse_scheme(parse_json(read_file(path), path));
}

Json scheme_to_json(const Scheme& s)
{
    Json j;
    j["moduli"] = s.moduli.explicit_moduli();
    if (s.moduli.has_tail())
        j["tail"] = std::string(to_string(s.moduli.tail()));
    else
        j["tail"] = nullptr;
    Json w = Json::object();
    for (const auto& [b, f] : s.window.overrides())
        w[std::to_string(b)] = f;
    j["window"] = w;
    j["pairwise_coprime"] = s.moduli.pairwise_coprime();
    j["primitive"] = s.moduli.primitive();
    return j;
}

Json rational_to_json(const Rational& q)
{
    return Json{{"num", rational_num(q)}, {"den", rational_den(q)}};
}

Rational rational_from_json(const Json& j)
{
    try {
        return Rational(BigInt(j.at("num").get<std::string>()), BigInt(j.at("den").get<std::string>()));
    } catch (const std::exception& e) {
        fail(ErrorCode::ParseError, fmt::format("malformed rational: {}", e.what()));
    }
}

Json point_to_json(const TruncatedInternalPoint& h)
{
    Json j = Json::object();
    for (std::size_t i = 0; i < h.level(); ++i)
        j[std::to_string(h.moduli()[i])] = h.residues()[i];
    return j;
}

Json patch_to_json(const Patch& p)
{
    Json prov;
    prov["source"] = std::string(to_string(p.provenance().source));
    if (p.provenance().source == PatchSource::ExactIntegerOrbit)
        prov["m"] = p.provenance().m;
    if (p.provenance().point)
        prov["point"] = point_to_json(*p.provenance().point);
    return Json{{"interval", {p.lo(), p.hi()}}, {"bits", p.to_string()}, {"provenance", prov}};
}

Patch patch_from_json(const Json& j)
{
    try {
        const auto interval = j.at("interval").get<std::vector<std::int64_t>>();
        const auto text = j.at("bits").get<std::string>();
        if (interval.size() != 2)
            fail(ErrorCode::ParseError, "patch interval must be [lo, hi]");
        if (interval[1] - interval[0] + 1 != static_cast<std::int64_t>(text.size()))
            fail(ErrorCode::ParseError,
                fmt::format("interval [{}, {}] does not match {} bits", interval[0], interval[1], text.size()));
        std::vector<std::uint8_t> bits;
        for (const char c : text) {
            if (c != '0' && c != '1')
                fail(ErrorCode::ParseError, fmt::format("patch bit '{}' is not 0 or 1", c));
            bits.push_back(c == '1');
        }
        return Patch(interval[0], std::move(bits));
    } catch (const Json::exception& e) {
        fail(ErrorCode::ParseError, fmt::format("malformed patch: {}", e.what()));
    }
}

Patch patch_from_text(std::istream& in, std::int64_t start)
{
    std::vector<std::uint8_t> bits;
    char c = 0;
    while (in.get(c)) {
        if (c == '0' || c == '1')
            bits.push_back(c == '1');
        else if (!std::isspace(static_cast<unsigned char>(c)))
            fail(ErrorCode::ParseError, fmt::format("patch text contains '{}'", c));
    }
    if (bits.empty())
        fail(ErrorCode::ParseError, "patch text contains no bits");
    return Patch(start, std::move(bits));
}

Patch load_patch(const std::string& path, std::int64_t text_start)
{
    const std::string content = read_file(path);
    const auto first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '{')
        return patch_from_json(parse_json(content, path));
    std::istringstream in(content);
    return patch_from_text(in, text_start);
}

Json reconstruction_to_json(const ReconstructionResult& r)
{
    Json moduli = Json::object();
    for (const auto& m : r.moduli) {
        Json o;
        o["outcome"] = std::string(to_string(m.outcome));
        if (m.outcome == Outcome::Determined) {
            o["residue"] = m.candidates.front();
            o["radius"] = *m.radius;
        } else {
            o["candidates"] = m.candidates;
        }
        moduli[std::to_string(m.modulus)] = o;
    }
    Json j;
    j["moduli"] = moduli;
    j["status"] = std::string(to_string(r.status));
    j["global_inconsistent"] = r.global_inconsistent;
    return j;
}

Json proximal_to_json(const ProximalReport& r)
{
    Json j;
    j["target_half_length"] = r.target_half_length;
    j["best_agreement"] = r.best_agreement;
    j["witness"] = r.witness ? Json(*r.witness) : Json(nullptr);
    j["search_radius"] = r.search_radius;
    j["exact_density"] = r.exact_density ? rational_to_json(*r.exact_density) : Json(nullptr);
    j["empirical_density"] = rational_to_json(r.empirical_density);
    j["empirical_density_value"] = static_cast<double>(r.empirical_density);
    j["N"] = r.n;
    return j;
}

} // namespace bfree
