#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bfree/error.hpp"
#include "bfree/io.hpp"
#include "bfree/mirsky.hpp"
#include "bfree/rotation.hpp"
#include "checks.hpp"

namespace bfree::cli {

namespace {

/// Valid syntax, but the combination of flags makes no sense. Exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Moduli up to this bound form the default level for infinite sets.
constexpr std::int64_t kDefaultLevelBound = 1000;

struct Common {
    std::string scheme_path;
    std::optional<std::size_t> level;
    std::optional<std::int64_t> n;
    std::optional<std::uint64_t> seed;
    std::string format = "json";
    std::string out_path;
    unsigned workers = 1;
};

struct GenerateArgs {
    std::int64_t lo = 0;
    std::int64_t hi = 99;
    std::int64_t m = 0;
    bool haar = false;
};

struct FreqArgs {
    std::vector<std::string> patterns;
    std::int64_t offset = 0;
};

struct ReconstructArgs {
    std::string patch;
    std::int64_t start = 0;
};

struct ProximalArgs {
    std::optional<std::int64_t> g1;
    std::optional<std::int64_t> g2;
    std::optional<std::int64_t> extra;
    std::int64_t half_length = 5;
    std::int64_t radius = 1000;
};

struct RotationArgs {
    double alpha = std::numbers::sqrt2 - 1.0;
    int block = 3;
    std::int64_t samples = 100'000;
    std::optional<std::uint64_t> placement_seed;
    std::int64_t pairs = 100;
    std::int64_t half_length = 10'000;
};

struct SelftestArgs {
    bool full = false;
};

std::string fmt_double(double x)
{
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return fmt::format("{}", x);
}

Json double_json(double x)
{
    return std::isfinite(x) ? Json(x) : Json(nullptr);
}

class Runner {
public:
    Runner(const Common& c, std::ostream& out) : c_(c), out_(out) {}

    Json config(const std::string& command) const
    {
        Json j;
        j["command"] = command;
        if (scheme_)
            j["scheme"] = Json{{"path", c_.scheme_path}, {"resolved", scheme_to_json(*scheme_)}};
        if (level_)
            j["level"] = *level_;
        if (!moduli_.empty())
            j["moduli"] = moduli_;
        j["N"] = c_.n ? Json(*c_.n) : Json(nullptr);
        j["seed"] = c_.seed ? Json(*c_.seed) : Json(nullptr);
        j["format"] = c_.format;
        return j;
    }

    void load_scheme_and_level()
    {
        if (c_.scheme_path.empty())
            throw UsageError("--scheme is required");
        scheme_ = load_scheme(c_.scheme_path);
        const auto size = scheme_->moduli.size();
        if (c_.level)
            level_ = *c_.level;
        else if (size)
            level_ = *size;
        else
            level_ = scheme_->moduli.up_to(kDefaultLevelBound).size();
        if (*level_ == 0)
            fail(ErrorCode::EmptyModuli, "truncation level is zero");
        moduli_ = scheme_->moduli.first(*level_);
    }

    std::uint64_t seed(const char* command) const
    {
        if (!c_.seed)
            throw UsageError(fmt::format("--seed is required for {}", command));
        return *c_.seed;
    }

    void emit_json(const std::string& command, Json result)
    {
        Json doc;
        doc["config"] = config(command);
        doc["result"] = std::move(result);
        out_ << doc.dump(2) << '\n';
    }

    void emit_csv(const std::string& command, const std::string& body)
    {
        out_ << "# config: " << config(command).dump() << '\n' << body;
    }

    bool csv() const { return c_.format == "csv"; }

    int generate(const GenerateArgs& a)
    {
        load_scheme_and_level();
        if (a.hi < a.lo)
            throw UsageError(fmt::format("--hi {} is below --lo {}", a.hi, a.lo));
        Patch p = a.haar ? generic_patch(haar_sample(moduli_, seed("generate --haar")), scheme_->window, a.lo, a.hi)
                         : exact_patch(a.m, a.lo, a.hi, scheme_->moduli, scheme_->window, c_.workers);
        if (csv()) {
            std::string body = "n,bit\n";
            for (std::int64_t n = p.lo(); n <= p.hi(); ++n)
                body += fmt::format("{},{}\n", n, p[n] ? 1 : 0);
            emit_csv("generate", body);
        } else {
            emit_json("generate", patch_to_json(p));
        }
        return 0;
    }

    int freq(const FreqArgs& a)
    {
        load_scheme_and_level();
        Json rows = Json::array();
        std::string body = "pattern,exact_num,exact_den,tail_error,empirical,N,level\n";
        for (const auto& text : a.patterns) {
            const auto q = PatternQuery::from_string(text, a.offset);
            const auto f = pattern_frequency_exact(q, scheme_->moduli, *level_, scheme_->window);
            std::optional<EmpiricalFrequency> e;
            if (c_.n)
                e = empirical_frequency(q, scheme_->moduli, *c_.n, scheme_->window, c_.workers);
            const double tail = f.tail_error.value_or(std::numeric_limits<double>::infinity());
            Json row;
            row["pattern"] = q.label();
            row["exact"] = rational_to_json(f.exact);
            row["exact_value"] = static_cast<double>(f.exact);
            row["tail_error"] = double_json(tail);
            row["empirical"] = e ? Json{{"count", e->count}, {"N", e->n}, {"value", e->value()}} : Json(nullptr);
            rows.push_back(row);
            body += fmt::format("{},{},{},{},{},{},{}\n", q.label(), rational_num(f.exact), rational_den(f.exact),
                fmt_double(tail), e ? fmt_double(e->value()) : "", e ? std::to_string(e->n) : "", *level_);
        }
        if (csv())
            emit_csv("freq", body);
        else
            emit_json("freq", rows);
        return 0;
    }

    int density()
    {
        load_scheme_and_level();
        const auto d = bfree::density(scheme_->moduli, scheme_->window, *level_, c_.n.value_or(0), c_.workers);
        if (csv()) {
            emit_csv("density", fmt::format("level,exact_num,exact_den,exact,tail_error,empirical,N\n{},{},{},{},{},{},{}\n",
                *level_, rational_num(d.exact), rational_den(d.exact), fmt_double(static_cast<double>(d.exact)),
                fmt_double(d.tail_error), d.empirical ? fmt_double(d.empirical->value()) : "",
                d.empirical ? std::to_string(d.empirical->n) : ""));
            return 0;
        }
        Json j;
        j["exact"] = rational_to_json(d.exact);
        j["exact_value"] = static_cast<double>(d.exact);
        j["tail_error"] = double_json(d.tail_error);
        j["empirical"] = d.empirical
            ? Json{{"count", d.empirical->count}, {"N", d.empirical->n}, {"value", d.empirical->value()}}
            : Json(nullptr);
        emit_json("density", j);
        return 0;
    }

    int reconstruct_cmd(const ReconstructArgs& a)
    {
        load_scheme_and_level();
        const Patch p = load_patch(a.patch, a.start);
        const auto r = reconstruct(p, moduli_, scheme_->window);
        if (csv()) {
            std::string body = "modulus,outcome,residue,radius,candidates\n";
            for (const auto& m : r.moduli) {
                std::string cands;
                for (auto c : m.candidates)
                    cands += (cands.empty() ? "" : " ") + std::to_string(c);
                const bool det = m.outcome == Outcome::Determined;
                body += fmt::format("{},{},{},{},{}\n", m.modulus, to_string(m.outcome),
                    det ? std::to_string(m.candidates.front()) : "", det ? std::to_string(*m.radius) : "", cands);
            }
            emit_csv("reconstruct", body);
            return 0;
        }
        Json j = reconstruction_to_json(r);
        j["patch"] = Json{{"interval", {p.lo(), p.hi()}}, {"center", patch_center(p)}};
        const auto point = r.point();
        j["point"] = point ? point_to_json(*point) : Json(nullptr);
        emit_json("reconstruct", j);
        return 0;
    }

    int proximal(const ProximalArgs& a)
    {
        load_scheme_and_level();
        if (a.g1.has_value() != a.g2.has_value())
            throw UsageError("--g1 and --g2 must be given together");
        TruncatedInternalPoint h1, h2;
        if (a.g1) {
            h1 = delta_embed(*a.g1, moduli_);
            h2 = delta_embed(*a.g2, moduli_);
        } else {
            const CounterRng rng(seed("proximal without --g1/--g2"), 0x9a12);
            h1 = haar_sample(moduli_, rng.at(0));
            h2 = haar_sample(moduli_, rng.at(1));
        }
        if (a.extra) {
            // Extend h2 by one modulus, keeping it the image of the same integer where possible.
            auto moduli = h2.moduli();
            auto residues = h2.residues();
            moduli.push_back(*a.extra);
            residues.push_back(a.g2 ? mod_floor(*a.g2, *a.extra) : 0);
            h2 = TruncatedInternalPoint(std::move(moduli), std::move(residues));
        }
        const auto r = proximal_probe(h1, h2, scheme_->window, a.half_length, a.radius, c_.n.value_or(1000));
        Json j = proximal_to_json(r);
        j["h1"] = point_to_json(h1);
        j["h2"] = point_to_json(h2);
        if (csv()) {
            std::string body = "key,value\n";
            for (const auto& [k, v] : j.items())
                body += fmt::format("{},{}\n", k, v.is_string() ? v.get<std::string>() : v.dump());
            emit_csv("proximal", body);
        } else {
            emit_json("proximal", j);
        }
        return 0;
    }

    int rotation(const RotationArgs& a)
    {
        const std::uint64_t s = seed("rotation");
        const int level = static_cast<int>(c_.level.value_or(20));
        level_ = static_cast<std::size_t>(level);
        const RotationSystem sys(a.alpha, level, a.placement_seed);
        if (csv()) {
            std::string body = "lo,hi\n";
            for (const auto& arc : sys.e().arcs())
                body += fmt::format("{},{}\n", fmt_double(from_circle(arc.lo)), fmt_double(from_circle(arc.hi)));
            emit_csv("rotation", body);
            return 0;
        }
        const auto stats = block_ones_stats(sys, a.block, a.samples, s, c_.workers);
        const auto inj = injectivity_probe(sys, a.pairs, a.half_length, s);
        Json j;
        j["alpha"] = a.alpha;
        j["placement"] = a.placement_seed ? Json{{"seed", *a.placement_seed}} : Json("frac(n*sqrt2)");
        j["arcs"] = sys.e().arcs().size();
        j["measure"] = union_measure(sys.e());
        j["block"] = Json{{"m", stats.block}, {"samples", stats.samples}, {"hits", stats.hits},
            {"estimate", stats.estimate}, {"standard_error", stats.standard_error}, {"lower_bound", stats.lower_bound}};
        j["injectivity"] = Json{{"pairs", inj.pairs}, {"half_length", a.half_length}, {"distinguished", inj.distinguished},
            {"fraction", inj.fraction()}};
        emit_json("rotation", j);
        return 0;
    }

    int aperiodicity()
    {
        load_scheme_and_level();
        const auto group = window_period_group(scheme_->window, moduli_);
        if (csv()) {
            std::string body;
            for (std::size_t i = 0; i < moduli_.size(); ++i)
                body += (i ? "," : "") + std::to_string(moduli_[i]);
            body += '\n';
            for (const auto& p : group) {
                for (std::size_t i = 0; i < p.level(); ++i)
                    body += (i ? "," : "") + std::to_string(p.residues()[i]);
                body += '\n';
            }
            emit_csv("aperiodicity", body);
            return 0;
        }
        Json elements = Json::array();
        for (const auto& p : group)
            elements.push_back(point_to_json(p));
        Json per = Json::object();
        for (auto b : moduli_)
            per[std::to_string(b)] = modulus_periods(scheme_->window, b);
        emit_json("aperiodicity",
            Json{{"haar_aperiodic", group.size() == 1}, {"period_group", elements}, {"per_modulus_periods", per}});
        return 0;
    }

    int selftest(const SelftestArgs& a)
    {
        const std::uint64_t s = seed("selftest");
        const auto budget = a.full ? checks::Budget::full() : checks::Budget::reduced();
        const auto results = checks::run_all(budget, s, c_.workers);
        bool all = true;
        for (const auto& r : results)
            all = all && r.passed;
        if (csv()) {
            std::string body = "id,name,status\n";
            for (const auto& r : results)
                body += fmt::format("{},{},{}\n", r.id, r.name, r.passed ? "PASS" : "FAIL");
            emit_csv("selftest", body);
        } else {
            Json list = Json::array();
            for (const auto& r : results)
                list.push_back(checks::to_json(r));
            emit_json("selftest", Json{{"budget", a.full ? "full" : "reduced"}, {"checks", list}, {"passed", all}});
        }
        return all ? 0 : 1;
    }

private:
    const Common& c_;
    std::ostream& out_;
    std::optional<Scheme> scheme_;
    std::optional<std::size_t> level_;
    std::vector<std::int64_t> moduli_;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"B-free weak model sets: configurations, frequencies, reconstruction, proximality, rotation codings"};
    app.name("bfree");
    app.require_subcommand(1);
    app.fallthrough();

    Common c;
    app.add_option("--scheme", c.scheme_path, "scheme description (JSON)");
    app.add_option("--level", c.level, "truncation level K (rotation: n_max)")->check(CLI::PositiveNumber);
    app.add_option("--N", c.n, "empirical budget N")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", c.seed, "random seed");
    app.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", c.out_path, "output file (default stdout)");
    app.add_option("--workers", c.workers, "worker threads; output does not depend on it")->check(CLI::PositiveNumber);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "configuration patch: exact orbit of m, or a Haar-generic point");
    generate->add_option("--lo", gen.lo, "first position");
    generate->add_option("--hi", gen.hi, "last position");
    generate->add_option("--m", gen.m, "integer whose orbit is sampled");
    generate->add_flag("--haar", gen.haar, "generic patch of a Haar-random point at level K");

    FreqArgs fq;
    auto* freq = app.add_subcommand("freq", "exact and empirical pattern frequencies");
    freq->add_option("--pattern", fq.patterns, "0/1/? word; repeatable")->required();
    freq->add_option("--offset", fq.offset, "position of the first letter");

    auto* density = app.add_subcommand("density", "density of the configuration");

    ReconstructArgs rec;
    auto* reconstruct = app.add_subcommand("reconstruct", "recover the internal point from a patch");
    reconstruct->add_option("--patch", rec.patch, "patch file: JSON or raw 0/1 text")->required();
    reconstruct->add_option("--start", rec.start, "position of the first bit of a text patch");

    ProximalArgs px;
    auto* proximal = app.add_subcommand("proximal", "agreement-window search and disagreement densities");
    proximal->add_option("--g1", px.g1, "first point is Δ(g1)");
    proximal->add_option("--g2", px.g2, "second point is Δ(g2)");
    proximal->add_option("--extra", px.extra, "extra modulus appended to the second point")->check(CLI::Range(2, 1'000'000));
    proximal->add_option("--L", px.half_length, "target half-length")->check(CLI::NonNegativeNumber);
    proximal->add_option("--R", px.radius, "search radius")->check(CLI::NonNegativeNumber);

    RotationArgs rot;
    auto* rotation = app.add_subcommand("rotation", "rotation coding statistics (csv: arc endpoints)");
    rotation->add_option("--alpha", rot.alpha, "rotation number in (0, 1]");
    rotation->add_option("--block", rot.block, "block length m")->check(CLI::PositiveNumber);
    rotation->add_option("--samples", rot.samples, "Monte-Carlo samples")->check(CLI::PositiveNumber);
    rotation->add_option("--placement-seed", rot.placement_seed, "random J_n placement");
    rotation->add_option("--pairs", rot.pairs, "injectivity pairs")->check(CLI::NonNegativeNumber);
    rotation->add_option("--L", rot.half_length, "injectivity half-length")->check(CLI::PositiveNumber);

    auto* aperiodicity = app.add_subcommand("aperiodicity", "period group of the window at level K");

    SelftestArgs st;
    auto* selftest = app.add_subcommand("selftest", "oracle suite and acceptance checks at reduced budgets");
    selftest->add_flag("--full", st.full, "acceptance budgets instead of reduced ones");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    std::ofstream file;
    if (!c.out_path.empty()) {
        file.open(c.out_path, std::ios::binary);
        if (!file) {
            err << fmt::format("cannot open --out {}\n", c.out_path);
            return 2;
        }
    }
    std::ostream& sink = c.out_path.empty() ? out : file;
    // Buffer so that a failing command leaves no partial output.
    std::ostringstream buffer;
    Runner runner(c, buffer);
    int code = 0;
    try {
        if (*generate)
            code = runner.generate(gen);
        else if (*freq)
            code = runner.freq(fq);
        else if (*density)
            code = runner.density();
        else if (*reconstruct)
            code = runner.reconstruct_cmd(rec);
        else if (*proximal)
            code = runner.proximal(px);
        else if (*rotation)
            code = runner.rotation(rot);
        else if (*aperiodicity)
            code = runner.aperiodicity();
        else if (*selftest)
            code = runner.selftest(st);
    } catch (const UsageError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
    sink << buffer.str();
    return code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run(args, out, err);
}

} // namespace bfree::cli
