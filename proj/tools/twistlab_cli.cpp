// twistlab command line. Talks to the library only through twistlab.h.
#include <twistlab/twistlab.h>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Owned {
    char* p = nullptr;
    ~Owned() { twl_string_free(p); }
    std::string str() const { return p ? std::string(p) : std::string(); }
};

int exit_code(twl_status s) {
    switch (s) {
        case TWL_OK: return kExitOk;
        case TWL_E_INVALID_ARGUMENT:
        case TWL_E_UNKNOWN_FORM:
        case TWL_E_CONTRACT: return kExitUsage;
        default: return kExitRuntime;
    }
}

int report(twl_session* s, twl_status st) {
    if (st != TWL_OK) std::cerr << "error (" << twl_status_name(st) << "): " << twl_last_error(s) << "\n";
    return exit_code(st);
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || !(x > 0.0)) throw CLI::ValidationError("--xgrid", "bad X value '" + item + "'");
        out.push_back(x);
    }
    if (out.empty()) throw CLI::ValidationError("--xgrid", "empty grid");
    return out;
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    return static_cast<bool>(f);
}

// Prints to --out when given, else stdout.
int emit(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return kExitOk;
    }
    if (!write_file(out, text)) {
        std::cerr << "error: cannot write " << out << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twistlab: quadratic twists of modular L-functions, moments and checks"};
    app.require_subcommand(1);
    app.fallthrough();

    twl_config cfg;
    twl_config_default(&cfg);
    std::string cache_dir, out, format = "text";
    bool fail_fast = false;

    app.add_option("--threads", cfg.threads, "worker threads (0: hardware count)")->capture_default_str();
    app.add_option("--delta", cfg.delta, "bump transition width")->capture_default_str()->check(CLI::Range(1e-3, 0.5));
    app.add_option("--prime-limit", cfg.prime_limit, "Euler products over p <= P")
        ->capture_default_str()
        ->check(CLI::Range(uint64_t{100}, uint64_t{100000000}));
    app.add_option("--cache-dir", cache_dir, "coefficient cache directory")->envname("TWISTLAB_CACHE");
    app.add_option("--sample", cfg.sample_rate, "fraction of family members kept")
        ->capture_default_str()
        ->check(CLI::Range(1e-6, 1.0));
    app.add_option("--seed", cfg.sample_seed, "sampling seed")->capture_default_str();
    app.add_flag("--fail-fast", fail_fast, "abort a moment on the first member failure");
    app.add_option("--out,-o", out, "output file (default stdout)");
    app.add_option("--format", format, "text or json")->capture_default_str()->check(CLI::IsMember({"text", "json"}));

    std::string form, form2, kind = "second";

    auto* forms_cmd = app.add_subcommand("forms", "list registry forms with inferred eta");

    auto* constants = app.add_subcommand("constants", "Euler-product constants for a moment");
    constants->add_option("--form", form, "form label")->required();
    constants->add_option("--form2", form2, "second form (mixed)");
    constants->add_option("--kind", kind, "second, mixed or first")
        ->capture_default_str()
        ->check(CLI::IsMember({"second", "mixed", "first"}));

    std::uint64_t d = 1;
    double z = 1.0;
    bool deriv = false, untwisted = false, check_z = false;
    auto* lvalue = app.add_subcommand("lvalue", "L(1/2) or L'(1/2) of one twist");
    lvalue->add_option("--form", form, "form label")->required();
    lvalue->add_option("--d", d, "odd squarefree twist parameter (1: untwisted)")->capture_default_str();
    lvalue->add_flag("--deriv", deriv, "evaluate L'(1/2)");
    lvalue->add_flag("--untwisted", untwisted, "the form itself, D = 1");
    lvalue->add_option("--z", z, "AFE balance parameter")->capture_default_str()->check(CLI::PositiveNumber);
    lvalue->add_flag("--check-z-invariance", check_z, "re-evaluate at a second Z and compare");

    std::string x, xgrid, csv;
    bool no_runtime = false;
    auto* moment = app.add_subcommand("moment", "empirical vs predicted moment over an X grid");
    moment->add_option("--kind", kind, "second, mixed or first")
        ->capture_default_str()
        ->check(CLI::IsMember({"second", "mixed", "first"}));
    moment->add_option("--form", form, "form label")->required();
    moment->add_option("--form2", form2, "second form (mixed)");
    auto* xopt = moment->add_option("--x", x, "single X");
    auto* gopt = moment->add_option("--xgrid", xgrid, "comma-separated X values");
    xopt->excludes(gopt);
    moment->add_option("--csv", csv, "write the CSV summary here");
    moment->add_flag("--no-runtime", no_runtime, "omit runtime_seconds so reruns are byte-identical");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", suite, "gauss, poisson or afe")->required()->check(CLI::IsMember({"gauss", "poisson", "afe"}));
    verify->add_option("--form", form, "form label (afe)");

    std::string action;
    std::uint64_t n_max = 0;
    auto* cache = app.add_subcommand("cache", "coefficient cache management");
    cache->add_option("action", action, "list, clear or warm")->required()->check(CLI::IsMember({"list", "clear", "warm"}));
    cache->add_option("--form", form, "form label (warm)");
    cache->add_option("--n", n_max, "table length (warm)");

    try {
        app.parse(argc, argv);
        if (moment->parsed() && x.empty() && xgrid.empty())
            throw CLI::RequiredError("--x or --xgrid");
        if ((constants->parsed() || moment->parsed()) && kind == "mixed" && form2.empty())
            throw CLI::RequiredError("--form2 (mixed kind)");
        if (verify->parsed() && suite == "afe" && form.empty()) throw CLI::RequiredError("--form (afe suite)");
        if (cache->parsed() && action == "warm" && (form.empty() || n_max == 0))
            throw CLI::RequiredError("--form and --n (cache warm)");
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    cfg.cache_dir = cache_dir.c_str();
    cfg.fail_fast = fail_fast ? 1 : 0;
    const twl_format fmt = format == "json" ? TWL_FORMAT_JSON : TWL_FORMAT_TEXT;

    twl_session* s = nullptr;
    if (const twl_status st = twl_session_create(&cfg, &s); st != TWL_OK) {
        std::cerr << "error (" << twl_status_name(st) << "): " << twl_create_error() << "\n";
        return exit_code(st);
    }
    struct Guard {
        twl_session* s;
        ~Guard() { twl_session_destroy(s); }
    } guard{s};

    if (forms_cmd->parsed()) {
        std::stringstream labels(twl_registry_labels());
        std::string label;
        std::ostringstream os;
        while (std::getline(labels, label, ',')) {
            twl_form_info info;
            if (const twl_status st = twl_form_info_get(s, label.c_str(), &info); st != TWL_OK) return report(s, st);
            char line[256];
            std::snprintf(line, sizeof line, "%-6s kappa=%-2d N=%-4llu eta=%+d i^k*eta=%+d residual=%.2e rejected=%.2e\n",
                          label.c_str(), info.kappa, static_cast<unsigned long long>(info.level), info.eta,
                          info.root_number, info.eta_residual, info.eta_rejected_residual);
            os << line;
        }
        return emit(out, os.str());
    }

    if (constants->parsed()) {
        Owned text;
        const twl_status st = twl_constants(s, kind.c_str(), form.c_str(), form2.c_str(), fmt, &text.p);
        if (st != TWL_OK) return report(s, st);
        return emit(out, text.str());
    }

    if (lvalue->parsed()) {
        int flags = 0;
        if (deriv) flags |= TWL_LV_DERIV;
        if (untwisted) flags |= TWL_LV_UNTWISTED;
        if (check_z) flags |= TWL_LV_CHECK_Z;
        twl_lvalue r;
        if (const twl_status st = twl_lvalue_eval(s, form.c_str(), d, z, flags, &r); st != TWL_OK) return report(s, st);
        char buf[1024];
        const char* what = deriv ? "L'(1/2)" : "L(1/2)";
        if (fmt == TWL_FORMAT_JSON) {
            int n = std::snprintf(buf, sizeof buf,
                                  "{\"form\":\"%s\",\"d\":%llu,\"D\":%llu,\"untwisted\":%s,\"kind\":\"%s\","
                                  "\"root_number\":%d,\"Z\":%.17g,\"value\":%.17g,\"abs_terms\":%.17g,\"length\":%llu",
                                  form.c_str(), static_cast<unsigned long long>(r.d),
                                  static_cast<unsigned long long>(r.D), r.untwisted ? "true" : "false", what,
                                  r.root_number, r.Z, r.value, r.abs_terms, static_cast<unsigned long long>(r.length));
            if (r.checked)
                n += std::snprintf(buf + n, sizeof buf - n, ",\"Z_other\":%.17g,\"value_other\":%.17g,\"z_difference\":%.3e",
                                   r.Z_other, r.value_other, r.z_difference);
            std::snprintf(buf + n, sizeof buf - n, "}\n");
        } else {
            int n = std::snprintf(buf, sizeof buf, "form = %s\n", form.c_str());
            if (r.untwisted)
                n += std::snprintf(buf + n, sizeof buf - n, "twist = none (D = 1)\n");
            else
                n += std::snprintf(buf + n, sizeof buf - n, "d = %llu (D = %llu)\n",
                                   static_cast<unsigned long long>(r.d), static_cast<unsigned long long>(r.D));
            n += std::snprintf(buf + n, sizeof buf - n, "root_number = %+d\n%s = %.15g\nZ = %g\nterms = %llu\n",
                               r.root_number, what, r.value, r.Z, static_cast<unsigned long long>(r.length));
            if (r.checked)
                std::snprintf(buf + n, sizeof buf - n, "value at Z = %g: %.15g\nz_difference = %.3e\n", r.Z_other,
                              r.value_other, r.z_difference);
        }
        return emit(out, buf);
    }

    if (moment->parsed()) {
        std::vector<double> grid;
        try {
            grid = parse_grid(x.empty() ? xgrid : x);
        } catch (const CLI::ParseError& e) {
            return app.exit(e) == 0 ? kExitOk : kExitUsage;
        }
        Owned jsonl, table;
        const twl_status st = twl_moment(s, kind.c_str(), form.c_str(), form2.c_str(), grid.data(), grid.size(),
                                         no_runtime ? 0 : 1, &jsonl.p, &table.p);
        if (st != TWL_OK) return report(s, st);
        if (const int rc = emit(out, jsonl.str()); rc != kExitOk) return rc;
        if (!csv.empty() && !write_file(csv, table.str())) {
            std::cerr << "error: cannot write " << csv << "\n";
            return kExitRuntime;
        }
        // Ratio trend for a human; stdout stays machine-readable unless --out was given.
        std::ostream& human = out.empty() ? std::cerr : std::cout;
        human << table.str();
        return kExitOk;
    }

    if (verify->parsed()) {
        Owned text;
        int passed = 0;
        const twl_status st = twl_verify(s, suite.c_str(), form.c_str(), fmt, &text.p, &passed);
        if (st != TWL_OK) return report(s, st);
        if (const int rc = emit(out, text.str()); rc != kExitOk) return rc;
        return passed ? kExitOk : kExitRuntime;
    }

    if (cache->parsed()) {
        if (action == "list") {
            Owned text;
            if (const twl_status st = twl_cache_list(s, &text.p); st != TWL_OK) return report(s, st);
            return emit(out, text.str());
        }
        if (action == "clear") {
            size_t removed = 0;
            if (const twl_status st = twl_cache_clear(s, &removed); st != TWL_OK) return report(s, st);
            return emit(out, "removed " + std::to_string(removed) + " file(s)\n");
        }
        Owned path;
        if (const twl_status st = twl_cache_warm(s, form.c_str(), n_max, &path.p); st != TWL_OK) return report(s, st);
        return emit(out, path.str() + "\n");
    }
    return kExitUsage;
}
