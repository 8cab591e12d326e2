#include "twistlab/session.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <regex>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "twistlab/error.hpp"
#include "twistlab/numerics.hpp"

namespace twistlab {

namespace fs = std::filesystem;

Session::Session(SessionOptions options) : options_(std::move(options)) {
    if (options_.threads == 0) options_.threads = default_thread_count();
    validate(options_.bump);
    require(options_.prime_limit >= 100, ErrorCode::invalid_argument, "prime limit must be at least 100");
    require(options_.sample.rate > 0.0 && options_.sample.rate <= 1.0, ErrorCode::invalid_argument,
            "sample rate must lie in (0, 1]");
}

SieveOptions Session::sieve_options() const {
    SieveOptions s;
    s.threads = options_.threads;
    s.memory_budget = options_.memory_budget;
    s.cache_dir = options_.cache_dir;
    return s;
}

std::shared_ptr<const CoefficientTable> Session::coefficients(const FormSpec& form, std::uint64_t n_min) {
    auto& held = tables_[form.label];
    if (held && held->n_max >= n_min) return held;
    std::shared_ptr<const CoefficientTable> t;
    // Any cached table at least this long will do; take the shortest.
    std::uint64_t best = 0;
    for (const auto& e : cache_list())
        if (e.label == form.label && e.n_max >= n_min && (best == 0 || e.n_max < best)) best = e.n_max;
    if (best != 0) t = read_cache(options_.cache_dir, form, best);
    if (!t) t = sieve_coefficients(form, n_min, sieve_options());
    held = t;
    return t;
}

const EtaInference& Session::eta_inference(const std::string& label) {
    const FormSpec base = find_form(label);
    if (auto it = eta_.find(base.label); it != eta_.end()) return it->second;
    const auto probes = admissible_d(base, 1, kEtaProbes);
    std::uint64_t n = 0;
    for (double Z : {1.0, probe_Z(base)})
        n = std::max(n, AfeEvaluator(base, Z, CutoffKind::derivative).required_length(8 * probes.back()));
    const auto t = coefficients(base, n);
    return eta_.emplace(base.label, infer_eta(base, probes, *t)).first->second;
}

FormSpec Session::resolve(const std::string& label) {
    FormSpec f = find_form(label);
    f.eta = eta_inference(label).eta;
    return f;
}

std::uint64_t Session::prime_limit_for(const FormSpec& form) const {
    return form.source == SourceKind::delta ? std::min<std::uint64_t>(options_.prime_limit, kDeltaCap)
                                            : options_.prime_limit;
}

LocalData Session::local(const FormSpec& form) {
    const std::uint64_t P = prime_limit_for(form);
    LocalData ld = local_data(*coefficients(form, P), P);
    ld.form = form;
    return ld;
}

ConstantReport Session::constants(MomentKind kind, const std::vector<std::string>& labels) {
    const std::size_t need = kind == MomentKind::mixed ? 2 : 1;
    require(labels.size() == need, ErrorCode::invalid_argument,
            std::string("constants for the ") + to_string(kind) + " moment need " + std::to_string(need) + " form(s)");
    const FormSpec f = resolve(labels[0]);
    const LocalData lf = local(f);
    if (kind == MomentKind::second) return constants_second(lf, options_.bump);
    if (kind == MomentKind::first) return constants_first(lf, options_.bump);
    const FormSpec g = resolve(labels[1]);
    return constants_mixed(lf, local(g), options_.bump);
}

LValueResult Session::lvalue(const std::string& label, std::uint64_t d, const LValueRequest& req) {
    const FormSpec f = resolve(label);
    LValueResult r;
    r.label = f.label;
    r.untwisted = req.untwisted || d == 1;
    const TwistPoint pt = r.untwisted ? make_untwisted(f) : make_twist(f, d);
    r.d = pt.d;
    r.D = pt.D;
    r.w = pt.w;
    r.derivative = req.derivative;
    r.Z = req.Z;
    require(req.Z > 0.0 && std::isfinite(req.Z), ErrorCode::invalid_argument, "Z must be positive");
    if (req.derivative && pt.w != -1)
        fail(ErrorCode::contract, "L'(1/2) requested for " + f.label +
                                      (r.untwisted ? std::string(" (untwisted)") : " at d = " + std::to_string(d)) +
                                      ", where the root number is +1: the derivative combination is identically 0 "
                                      "there; drop --deriv for L(1/2)");
    const CutoffKind kind = req.derivative ? CutoffKind::derivative : CutoffKind::value;
    std::vector<double> zs{req.Z};
    if (req.check_z_invariance) zs.push_back(req.Z == 1.0 ? probe_Z(f) : 1.0);
    std::vector<AfeEvaluator> evals;
    std::uint64_t n = 1;
    for (double Z : zs) {
        evals.emplace_back(f, Z, kind);
        n = std::max(n, evals.back().required_length(pt.D));
    }
    const auto t = coefficients(f, n);
    const AfeValue v = evals[0].evaluate(pt, *t);
    r.value = v.value;
    r.abs_terms = v.abs_terms;
    r.length = v.length;
    if (req.check_z_invariance) {
        const AfeValue o = evals[1].evaluate(pt, *t);
        r.checked = true;
        r.Z_other = zs[1];
        r.value_other = o.value;
        r.z_difference = std::abs(v.value - o.value);
    }
    return r;
}

std::vector<MomentReport> Session::moment(MomentKind kind, const std::vector<std::string>& labels,
                                          const std::vector<double>& xgrid) {
    std::vector<FormSpec> forms;
    for (const auto& l : labels) forms.push_back(resolve(l));
    ExperimentConfig cfg;
    cfg.bump = options_.bump;
    cfg.prime_limit = options_.prime_limit;
    cfg.threads = options_.threads;
    cfg.sample = options_.sample;
    cfg.policy = options_.policy;
    cfg.sieve = sieve_options();
    return run_experiment(kind, forms, xgrid, cfg,
                          [this](const FormSpec& f, std::uint64_t n) { return coefficients(f, n); });
}

SuiteResult Session::verify(const std::string& suite, const std::string& label) {
    if (suite == "gauss") return run_gauss_suite(999, 20, options_.threads);
    if (suite == "poisson") return run_poisson_suite(default_poisson_pairs());
    if (suite == "afe") {
        require(!label.empty(), ErrorCode::invalid_argument, "the afe suite needs a form");
        const FormSpec f = resolve(label);
        AfeSuiteOptions opt;
        opt.threads = options_.threads;
        std::uint64_t n = 0;
        for (double Z : {1.0, probe_Z(f)})
            for (CutoffKind kind : {CutoffKind::derivative, CutoffKind::value})
                n = std::max(n, AfeEvaluator(f, Z, kind).required_length(8 * opt.d_limit));
        if (f.source == SourceKind::delta) n = std::min<std::uint64_t>(n, kDeltaCap);
        return run_afe_suite(f, *coefficients(f, n), opt);
    }
    fail(ErrorCode::invalid_argument, "unknown suite '" + suite + "' (gauss, poisson, afe)");
}

std::vector<CacheEntry> Session::cache_list() const {
    std::vector<CacheEntry> out;
    if (options_.cache_dir.empty()) return out;
    std::error_code ec;
    if (!fs::is_directory(options_.cache_dir, ec)) return out;
    static const std::regex name(R"((.+)-n(\d+)-v(\d+)\.coef)");
    for (const auto& e : fs::directory_iterator(options_.cache_dir, ec)) {
        std::smatch m;
        const std::string file = e.path().filename().string();
        if (!e.is_regular_file() || !std::regex_match(file, m, name)) continue;
        if (std::stoi(m[3].str()) != kCoefficientVersion) continue;
        out.push_back({e.path().string(), m[1].str(), std::stoull(m[2].str()), e.file_size()});
    }
    std::sort(out.begin(), out.end(), [](const CacheEntry& a, const CacheEntry& b) {
        return std::tie(a.label, a.n_max) < std::tie(b.label, b.n_max);
    });
    return out;
}

std::size_t Session::cache_clear() {
    require(!options_.cache_dir.empty(), ErrorCode::invalid_argument,
            "no cache directory (set TWISTLAB_CACHE or --cache-dir)");
    std::size_t removed = 0;
    std::error_code ec;
    if (!fs::is_directory(options_.cache_dir, ec)) return 0;
    std::vector<fs::path> doomed;
    for (const auto& e : fs::directory_iterator(options_.cache_dir, ec)) {
        const std::string file = e.path().filename().string();
        if (e.is_regular_file() && (file.ends_with(".coef") || file.ends_with(".coef.tmp"))) doomed.push_back(e.path());
    }
    for (const auto& p : doomed)
        if (fs::remove(p, ec)) ++removed;
    return removed;
}

CacheEntry Session::cache_warm(const std::string& label, std::uint64_t n_max) {
    require(!options_.cache_dir.empty(), ErrorCode::invalid_argument,
            "no cache directory (set TWISTLAB_CACHE or --cache-dir)");
    const FormSpec f = find_form(label);
    const auto t = coefficients(f, n_max);
    const auto path = fs::path(options_.cache_dir) / cache_file_name(f.label, t->n_max);
    std::error_code ec;
    if (!fs::exists(path, ec)) write_cache(options_.cache_dir, *t);
    return {path.string(), f.label, t->n_max, static_cast<std::uint64_t>(fs::file_size(path))};
}

std::string to_json(const LValueResult& r) {
    nlohmann::ordered_json j;
    j["form"] = r.label;
    j["d"] = r.d;
    j["D"] = r.D;
    j["untwisted"] = r.untwisted;
    j["kind"] = r.derivative ? "L'(1/2)" : "L(1/2)";
    j["root_number"] = r.w;
    j["Z"] = r.Z;
    j["value"] = r.value;
    j["abs_terms"] = r.abs_terms;
    j["length"] = r.length;
    if (r.checked) {
        j["Z_other"] = r.Z_other;
        j["value_other"] = r.value_other;
        j["z_difference"] = r.z_difference;
    }
    return j.dump();
}

std::string to_text(const LValueResult& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "form = " << r.label << "\n";
    if (r.untwisted)
        os << "twist = none (D = 1)\n";
    else
        os << "d = " << r.d << " (D = " << r.D << ")\n";
    os << "root_number = " << r.w << "\n";
    os << (r.derivative ? "L'(1/2) = " : "L(1/2) = ") << r.value << "\n";
    os << "Z = " << r.Z << "\n";
    os << "terms = " << r.length << "\n";
    if (r.checked) {
        os << "value at Z = " << r.Z_other << ": " << r.value_other << "\n";
        os << std::setprecision(3) << "z_difference = " << r.z_difference << "\n";
    }
    return os.str();
}

}  // namespace twistlab
