#include "trapfactor/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "trapfactor/algorithms.hpp"
#include "trapfactor/coverage_lab.hpp"

namespace trapfactor::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

Natural parse_candidate(const std::string& text) {
    Natural n = parse_natural(text);
    if (n < 3 || mpz_even_p(n.get_mpz_t()))
        throw UsageError("n must be an odd integer >= 3");
    return n;
}

Rational parse_ratio(const std::string& text) {
    const auto slash = text.find('/');
    Natural num, den = 1;
    if (slash == std::string::npos) {
        num = parse_natural(text);
    } else {
        num = parse_natural(text.substr(0, slash));
        den = parse_natural(text.substr(slash + 1));
    }
    if (sgn(num) <= 0 || sgn(den) <= 0) throw UsageError("s must be a positive fraction h/t");
    Rational s(num, den);
    s.canonicalize();
    return s;
}

mpz_class parse_signed(const std::string& text) {
    if (text.empty()) throw UsageError("empty integer");
    const bool neg = text[0] == '-';
    const Natural mag = parse_natural(neg ? text.substr(1) : text);
    return neg ? mpz_class(-mag) : mpz_class(mag);
}

std::pair<mpz_class, mpz_class> parse_k_range(const std::string& text) {
    const auto sep = text.find("..", 1);  // k_lo may start with '-'
    if (sep == std::string::npos) throw UsageError("k range must be of the form lo..hi");
    const mpz_class lo = parse_signed(text.substr(0, sep));
    const mpz_class hi = parse_signed(text.substr(sep + 2));
    if (lo > hi) throw UsageError("k range is empty");
    return {lo, hi};
}

// JSON integers above 2^53 are emitted as decimal strings
json json_int(const mpz_class& v) {
    static const mpz_class limit = mpz_class(1) << 53;
    if (abs(v) < limit) return json(mpz_get_si(v.get_mpz_t()));
    return json(v.get_str());
}

void apply_precision_cap_env() {
    if (const char* cap = std::getenv("TRAPFACTOR_PRECISION_CAP_BITS")) {
        char* end = nullptr;
        const unsigned long bits = std::strtoul(cap, &end, 10);
        if (end == cap || *end != '\0' || bits < 64)
            throw UsageError("TRAPFACTOR_PRECISION_CAP_BITS must be an integer >= 64");
        set_floor_precision_cap(static_cast<unsigned>(bits));
    }
}

std::string resolve_format(const Config& cfg, const char* fallback) {
    return cfg.format.empty() ? fallback : cfg.format;
}

FactorReport dispatch_factor(const Config& cfg, const Natural& n) {
    const Natural max_steps = parse_natural(cfg.max_steps);
    if (cfg.method == "fermat") return fermat_factor(n, max_steps, cfg.workers);
    if (cfg.method == "lehman") return lehman_factor(n, cfg.workers);
    if (cfg.method == "multitrap")
        return multi_trap_factor(n, {{1}, {2}}, mpz_class(max_steps), cfg.workers);
    if (cfg.method == "auto") {
        // no divisor hint from the CLI: the planner's no-hint answer is the
        // multi-trap schedule, which the driver sweeps itself
        return multi_trap_factor(n, {{1}, {2}}, mpz_class(max_steps), cfg.workers);
    }
    throw UsageError("unknown method: " + cfg.method);
}

int run_factor(const Config& cfg, std::ostream& out) {
    const Natural n = parse_candidate(cfg.n);
    const std::string format = resolve_format(cfg, "json");
    const FactorReport report = dispatch_factor(cfg, n);
    const bool found = report.status == FactorStatus::found;

    if (format == "json") {
        json obj;
        obj["n"] = n.get_str();
        json factors = json::array();
        for (const Natural& f : report.factors) factors.push_back(f.get_str());
        obj["factors"] = std::move(factors);
        obj["method"] = report.method;
        obj["steps"] = json_int(report.steps_used);
        obj["multiplier"] = report.multiplier ? json(report.multiplier->get_str()) : json(nullptr);
        out << obj.dump() << '\n';
    } else if (format == "text") {
        if (found) {
            out << n << " = " << report.factors[0] << " * " << report.factors[1]
                << " (method=" << report.method << ", steps=" << report.steps_used;
            if (report.multiplier) out << ", multiplier=" << *report.multiplier;
            out << ")\n";
        } else {
            out << n << ": no factor found (method=" << report.method
                << ", steps=" << report.steps_used << ")\n";
        }
    } else {
        throw UsageError("factor supports --format json|text");
    }
    return found ? 0 : 1;
}

int run_scan(const Config& cfg, std::ostream& out) {
    const Natural n = parse_candidate(cfg.n);
    const std::string format = resolve_format(cfg, "json");
    if (format != "json" && format != "text") throw UsageError("scan supports --format json|text");

    TrapSpec spec;
    spec.n = n;
    spec.order = cfg.order;
    spec.s = parse_ratio(cfg.s);
    std::tie(spec.k_lo, spec.k_hi) = parse_k_range(cfg.k_range);
    if (cfg.parity == "auto") {
        if (spec.order == 1 && spec.s == Rational(1))
            spec.parity_filter = static_cast<unsigned>(mpz_odd_p(Natural(isqrt(4 * n)).get_mpz_t()));
    } else if (cfg.parity != "none") {
        throw UsageError("--parity must be auto or none");
    }
    if (!cfg.residue.empty()) {
        const auto colon = cfg.residue.find(':');
        if (colon == std::string::npos) throw UsageError("--residue must be M:rho");
        ResidueFilter filter{parse_natural(cfg.residue.substr(0, colon)),
                             parse_natural(cfg.residue.substr(colon + 1))};
        if (filter.modulus < 1) throw UsageError("--residue modulus must be >= 1");
        spec.residue_filter = filter;
    }

    const ScanResult res = scan(spec, cfg.workers);
    for (const TrapHit& hit : res.hits) {
        if (format == "json") {
            json line;
            line["k"] = json_int(hit.k);
            line["x"] = hit.x.get_str();
            line["divisor"] = hit.divisor.get_str();
            out << line.dump() << '\n';
        } else {
            out << "k=" << hit.k << " x=" << hit.x << " divisor=" << hit.divisor << '\n';
        }
    }
    return 0;
}

std::vector<Natural> sample_odd_log_uniform(const Natural& lo, const Natural& hi, unsigned count,
                                            std::uint64_t seed) {
    if (lo < 9 || lo > hi) throw UsageError("bad sample range");
    if (hi > Natural("1000000000000000000"))
        throw UsageError("sample range upper bound must be at most 1e18");
    const Natural odd_lo = lo | 1;
    const Natural odd_hi = mpz_odd_p(hi.get_mpz_t()) ? hi : Natural(hi - 1);
    if (odd_lo > odd_hi) throw UsageError("sample range contains no odd integer");
    std::mt19937_64 rng(seed);
    const double ln_lo = std::log(mpz_get_d(lo.get_mpz_t()));
    const double ln_hi = std::log(mpz_get_d(hi.get_mpz_t()));
    std::vector<Natural> samples;
    samples.reserve(count);
    while (samples.size() < count) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        Natural n(std::exp(ln_lo + u * (ln_hi - ln_lo)));
        n |= 1;
        if (n < odd_lo) n = odd_lo;
        if (n > odd_hi) n = odd_hi;
        samples.push_back(n);
    }
    return samples;
}

int run_coverage(const Config& cfg, std::ostream& out) {
    const std::string format = resolve_format(cfg, "csv");
    if (format != "csv") throw UsageError("coverage emits CSV; use --format csv");
    int order;
    if (cfg.cov_order == "circle") {
        order = 0;
    } else if (cfg.cov_order == "1" || cfg.cov_order == "2" || cfg.cov_order == "3") {
        order = cfg.cov_order[0] - '0';
    } else {
        throw UsageError("--order must be 1, 2, 3 or circle");
    }
    const Rational s = parse_ratio(cfg.s);
    const Natural b = parse_natural(cfg.budget);
    const auto samples =
        sample_odd_log_uniform(parse_natural(cfg.n_lo), parse_natural(cfg.n_hi), cfg.samples, cfg.seed);
    const auto records = measure_coverage(order, s, b, samples, cfg.workers);
    write_coverage_csv(out, records);
    return 0;
}

int run_bench(const Config& cfg, std::ostream& out) {
    const Natural n = parse_candidate(cfg.n);
    const std::string format = resolve_format(cfg, "json");
    if (format != "json" && format != "text") throw UsageError("bench supports --format json|text");

    std::vector<std::string> methods;
    std::stringstream ss(cfg.methods);
    for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty()) methods.push_back(tok);
    if (methods.empty()) throw UsageError("--methods must name at least one method");

    json results = json::array();
    for (const std::string& method : methods) {
        Config one = cfg;
        one.method = method;
        const auto start = std::chrono::steady_clock::now();
        const FactorReport report = dispatch_factor(one, n);
        const auto stop = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
        json row;
        row["method"] = method;
        row["found"] = report.status == FactorStatus::found;
        row["steps"] = json_int(report.steps_used);
        row["ms"] = ms;
        json factors = json::array();
        for (const Natural& f : report.factors) factors.push_back(f.get_str());
        row["factors"] = std::move(factors);
        results.push_back(std::move(row));
        if (format == "text")
            out << method << ": steps=" << report.steps_used << " ms=" << ms << '\n';
    }
    if (format == "json") {
        json obj;
        obj["n"] = n.get_str();
        obj["results"] = std::move(results);
        out << obj.dump() << '\n';
    }
    return 0;
}

}  // namespace

int run(const Config& cfg, std::ostream& out, std::ostream& err) {
    try {
        apply_precision_cap_env();
        switch (cfg.command) {
            case Config::Command::factor: return run_factor(cfg, out);
            case Config::Command::scan: return run_scan(cfg, out);
            case Config::Command::coverage: return run_coverage(cfg, out);
            case Config::Command::bench: return run_bench(cfg, out);
        }
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Config cfg;
    CLI::App app{"divisor-trap integer factorization toolkit"};
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--workers", cfg.workers, "worker threads for k-range scans")
            ->check(CLI::Range(1u, 256u));
        sub->add_option("--format", cfg.format, "output format (json, csv or text)");
        sub->add_option("--seed", cfg.seed, "seed for randomized sweeps");
    };

    auto* factor = app.add_subcommand("factor", "factor an odd integer");
    factor->add_option("n", cfg.n, "odd integer to factor")->required();
    factor->add_option("--method", cfg.method, "fermat, lehman, multitrap or auto");
    factor->add_option("--max-steps", cfg.max_steps, "step budget (fermat) or global cap");
    add_common(factor);

    auto* scan = app.add_subcommand("scan", "raw trap scan, one JSON line per hit");
    scan->add_option("n", cfg.n, "odd integer to scan")->required();
    scan->add_option("--order", cfg.order, "trap order (1 = tangent/Fermat)")
        ->check(CLI::Range(1u, 8u));
    scan->add_option("--s", cfg.s, "trap parameter s as h/t");
    scan->add_option("--k-range", cfg.k_range, "step range lo..hi");
    scan->add_option("--parity", cfg.parity, "parity filter: auto or none");
    scan->add_option("--residue", cfg.residue, "residue filter M:rho");
    add_common(scan);

    auto* coverage = app.add_subcommand("coverage", "empirical trap coverage, CSV");
    coverage->add_option("--order", cfg.cov_order, "1, 2, 3 or circle");
    coverage->add_option("--s", cfg.s, "trap parameter s as h/t");
    coverage->add_option("--b", cfg.budget, "step budget per trap");
    coverage->add_option("--samples", cfg.samples, "number of sampled n");
    coverage->add_option("--n-lo", cfg.n_lo, "sample range lower bound");
    coverage->add_option("--n-hi", cfg.n_hi, "sample range upper bound");
    add_common(coverage);

    auto* bench = app.add_subcommand("bench", "steps/time summary per method");
    bench->add_option("n", cfg.n, "odd integer to factor")->required();
    bench->add_option("--methods", cfg.methods, "comma-separated method list");
    bench->add_option("--max-steps", cfg.max_steps, "step budget per method");
    add_common(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    if (factor->parsed()) cfg.command = Config::Command::factor;
    else if (scan->parsed()) cfg.command = Config::Command::scan;
    else if (coverage->parsed()) cfg.command = Config::Command::coverage;
    else cfg.command = Config::Command::bench;
    return run(cfg, out, err);
}

}  // namespace trapfactor::cli
