#pragma once

#include <istream>
#include <string>

#include <json.hpp>

#include "bfree/config.hpp"
#include "bfree/megf.hpp"
#include "bfree/proximal.hpp"
#include "bfree/scheme.hpp"

namespace bfree {

using Json = nlohmann::ordered_json;

/// Moduli plus window, as read from a scheme description file.
struct Scheme {
    ModuliSet moduli;
    Window window;
};

/// {"moduli": [...], "tail": "prime-squares" | "primes" | null, "window": {"<b>": [...]}}
Scheme parse_scheme(const Json& j);
Scheme load_scheme(const std::string& path);
Json scheme_to_json(const Scheme& s);

/// {"num": "...", "den": "..."}
Json rational_to_json(const Rational& q);
Rational rational_from_json(const Json& j);

Json point_to_json(const TruncatedInternalPoint& h);

/// {"interval": [lo, hi], "bits": "0101", "provenance": {...}}
Json patch_to_json(const Patch& p);
Patch patch_from_json(const Json& j);

/// Raw 0/1 text: whitespace ignored, first bit at position start.
Patch patch_from_text(std::istream& in, std::int64_t start);

/// Reads a JSON patch, or raw 0/1 text when the content does not start with '{'.
Patch load_patch(const std::string& path, std::int64_t text_start = 0);

Json reconstruction_to_json(const ReconstructionResult& r);
Json proximal_to_json(const ProximalReport& r);

} // namespace bfree
