#include "twistlab/moments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "twistlab/arith.hpp"
#include "twistlab/error.hpp"
#include "twistlab/numerics.hpp"

namespace twistlab {

using ojson = nlohmann::ordered_json;

const char* to_string(MomentKind kind) {
    switch (kind) {
        case MomentKind::second: return "second";
        case MomentKind::mixed: return "mixed";
        case MomentKind::first: return "first";
    }
    return "?";
}

MomentKind parse_moment_kind(const std::string& text) {
    if (text == "second") return MomentKind::second;
    if (text == "mixed") return MomentKind::mixed;
    if (text == "first") return MomentKind::first;
    fail(ErrorCode::invalid_argument, "unknown moment kind '" + text + "' (second, mixed, first)");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

bool sampled(std::uint64_t d, const SampleSpec& s) {
    if (s.rate >= 1.0) return true;
    const double u = double(splitmix64(d ^ splitmix64(s.seed)) >> 11) * 0x1.0p-53;
    return u < s.rate;
}

std::size_t expected_forms(MomentKind kind) { return kind == MomentKind::mixed ? 2 : 1; }

}  // namespace

TwistFamily enumerate_family(const std::vector<FormSpec>& forms, double X, const BumpSpec& bump,
                             const SampleSpec& sample) {
    require(!forms.empty() && forms.size() <= 2, ErrorCode::invalid_argument, "a family needs one or two forms");
    require(X >= 100.0 && std::isfinite(X), ErrorCode::invalid_argument, "X must be at least 100");
    require(sample.rate > 0.0 && sample.rate <= 1.0, ErrorCode::invalid_argument, "sample rate must lie in (0, 1]");
    validate(bump);
    if (forms.size() == 2)
        require(forms[0].label != forms[1].label, ErrorCode::invalid_argument, "mixed family needs two distinct forms");
    TwistFamily fam;
    fam.forms = forms;
    fam.X = X;
    fam.bump = bump;
    fam.sample = sample;
    for (const auto& f : forms) {
        require(f.eta_known(), ErrorCode::contract, "family for " + f.label + " needs eta");
        if (degenerate_form(f)) fam.degenerate = true;
    }
    if (fam.degenerate) return fam;
    std::uint64_t levels = 1;
    for (const auto& f : forms) levels *= f.level;
    for (std::uint64_t d = 1; 8.0 * double(d) < X; d += 2) {
        if (gcd_u64(d, levels) != 1 || !is_squarefree(d)) continue;
        const double F = bump_F(8.0 * double(d) / X, bump);
        if (!(F > 0.0)) continue;
        bool odd = true;
        for (const auto& f : forms) odd = odd && root_number(f, d) == -1;
        if (!odd || !sampled(d, sample)) continue;
        fam.d.push_back(d);
        fam.weight.push_back(F / sample.rate);
    }
    return fam;
}

std::uint64_t required_coefficients(const FormSpec& form, double X) {
    const auto dmax = static_cast<std::uint64_t>(std::ceil(X / 8.0));
    return AfeEvaluator(form, 1.0, CutoffKind::derivative).required_length(8 * dmax);
}

std::optional<double> LprimeMemo::find(const std::string& label, std::uint64_t d) const {
    const auto it = values_.find({label, d});
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

void LprimeMemo::store(const std::string& label, std::uint64_t d, double value) { values_[{label, d}] = value; }

EmpiricalResult empirical_moment(MomentKind kind, const TwistFamily& family,
                                 const std::vector<const CoefficientTable*>& coeffs, const EmpiricalOptions& options) {
    const std::size_t nf = expected_forms(kind);
    require(family.forms.size() == nf && coeffs.size() == nf, ErrorCode::invalid_argument,
            std::string("the ") + to_string(kind) + " moment needs " + std::to_string(nf) + " form(s)");
    for (std::size_t j = 0; j < nf; ++j)
        require(coeffs[j] && coeffs[j]->form.label == family.forms[j].label, ErrorCode::invalid_argument,
                "coefficient table does not match form " + family.forms[j].label);
    EmpiricalResult out;
    const std::size_t m = family.size();
    if (m == 0) return out;

    std::vector<AfeEvaluator> evals;
    for (std::size_t j = 0; j < nf; ++j) evals.emplace_back(family.forms[j], 1.0, CutoffKind::derivative);

    // values[j * m + i] = L'(1/2, f_j x chi_8d_i)
    std::vector<double> values(nf * m, 0.0);
    std::vector<char> known(nf * m, 0);
    if (options.memo) {
        for (std::size_t j = 0; j < nf; ++j)
            for (std::size_t i = 0; i < m; ++i)
                if (auto v = options.memo->find(family.forms[j].label, family.d[i])) {
                    values[j * m + i] = *v;
                    known[j * m + i] = 1;
                    ++out.memo_hits;
                }
    }
    std::vector<std::size_t> todo;
    for (std::size_t k = 0; k < nf * m; ++k)
        if (!known[k]) todo.push_back(k);
    // Large d first: the work per member grows linearly in d.
    std::reverse(todo.begin(), todo.end());
    std::vector<std::string> errors(nf * m);
    std::vector<char> failed(nf * m, 0);
    const bool fast = options.policy == FailurePolicy::fail_fast;
    parallel_for(todo.size(), std::max(1u, options.threads), [&](std::size_t t) {
        const std::size_t k = todo[t], j = k / m, i = k % m;
        try {
            const TwistPoint pt = make_twist(family.forms[j], family.d[i]);
            values[k] = evals[j].evaluate(pt, *coeffs[j]).value;
        } catch (const Error& e) {
            if (fast) throw;
            failed[k] = 1;
            errors[k] = e.what();
        }
    });
    if (options.memo)
        for (std::size_t k : todo)
            if (!failed[k]) options.memo->store(family.forms[k / m].label, family.d[k % m], values[k]);

    CompensatedSum sum;
    for (std::size_t i = 0; i < m; ++i) {
        bool bad = false;
        for (std::size_t j = 0; j < nf; ++j) {
            if (failed[j * m + i]) {
                out.failures.push_back({family.d[i], family.forms[j].label + ": " + errors[j * m + i]});
                bad = true;
            }
        }
        if (bad) continue;
        double term = values[i];
        if (kind == MomentKind::second) term = values[i] * values[i];
        if (kind == MomentKind::mixed) term = values[i] * values[m + i];
        sum.add(family.weight[i] * term);
        ++out.evaluated;
    }
    out.value = sum.value();
    return out;
}

SecondPrediction predicted_second(const ConstantReport& c, double X) {
    SecondPrediction p;
    if (c.degenerate) return p;
    const double lx = std::log(X);
    const double coef = c.component("leading_coefficient");
    p.leading = coef * X * lx * lx * lx / 3.0;
    p.with_secondary = coef * X * (lx * lx * lx / 3.0 + c.component("C2") * lx * lx);
    return p;
}

double predicted_mixed(const ConstantReport& c, double X) {
    if (c.degenerate) return 0.0;
    const double lx = std::log(X);
    return c.value * X * lx * lx;
}

FirstPrediction predicted_first(const ConstantReport& c, const FormSpec& form, double X) {
    FirstPrediction p;
    const double kN = double(form.kappa) * double(form.level);
    p.U = X / std::pow(std::log(X * kN), 17.0 * 7.0 / 4.0);
    if (c.degenerate) return p;
    const double scale = double(form.kappa) * std::sqrt(double(form.level)) / (2.0 * kPi);
    const double rest = 2.0 * c.component("L'/L(1,sym2f)") + c.component("Z*'(0)/Z*(0)");
    p.leading = c.value * X * std::log(X * scale);
    p.full = c.value * X * (std::log(X * scale) + rest);
    p.u_bracket = c.value * X * (std::log(p.U * scale) + rest);
    return p;
}

namespace {

std::optional<double> safe_ratio(double num, double den) {
    if (den == 0.0) return std::nullopt;
    return num / den;
}

}  // namespace

std::vector<MomentReport> run_experiment(MomentKind kind, const std::vector<FormSpec>& forms,
                                         const std::vector<double>& xgrid, const ExperimentConfig& config,
                                         const CoefficientProvider& provider) {
    require(forms.size() == expected_forms(kind), ErrorCode::invalid_argument,
            std::string("the ") + to_string(kind) + " moment needs " + std::to_string(expected_forms(kind)) +
                " form(s)");
    require(!xgrid.empty(), ErrorCode::invalid_argument, "empty X grid");
    for (const auto& f : forms) require(f.eta_known(), ErrorCode::contract, f.label + " needs eta");
    validate(config.bump);
    const double xmax = *std::max_element(xgrid.begin(), xgrid.end());

    bool degenerate = false;
    for (const auto& f : forms) degenerate = degenerate || degenerate_form(f);

    std::uint64_t P = config.prime_limit;
    for (const auto& f : forms)
        if (f.source == SourceKind::delta) P = std::min<std::uint64_t>(P, kDeltaCap);

    SieveOptions sopt = config.sieve;
    sopt.threads = config.threads;
    std::vector<std::shared_ptr<const CoefficientTable>> tables;
    std::vector<const CoefficientTable*> raw;
    std::vector<LocalData> local;
    std::size_t cache_hits = 0;
    std::uint64_t n_max = 0;
    for (const auto& f : forms) {
        std::uint64_t n = P;
        if (!degenerate) n = std::max(n, required_coefficients(f, xmax));
        tables.push_back(provider ? provider(f, n) : sieve_coefficients(f, n, sopt));
        require(tables.back() && tables.back()->n_max >= n, ErrorCode::internal, "coefficient provider fell short");
        if (tables.back()->from_cache) ++cache_hits;
        raw.push_back(tables.back().get());
        local.push_back(local_data(*tables.back(), P));
        local.back().form = f;
        n_max = std::max(n_max, n);
    }

    std::vector<ConstantReport> constants;
    if (kind == MomentKind::second) constants.push_back(constants_second(local[0], config.bump));
    if (kind == MomentKind::first) constants.push_back(constants_first(local[0], config.bump));
    if (kind == MomentKind::mixed) constants.push_back(constants_mixed(local[0], local[1], config.bump));

    LprimeMemo memo;
    std::vector<MomentReport> reports;
    std::optional<double> previous;
    for (double X : xgrid) {
        const auto t0 = std::chrono::steady_clock::now();
        const TwistFamily fam = enumerate_family(forms, X, config.bump, config.sample);
        EmpiricalOptions eopt;
        eopt.threads = config.threads;
        eopt.policy = config.policy;
        eopt.memo = &memo;
        const EmpiricalResult emp = empirical_moment(kind, fam, raw, eopt);

        MomentReport r;
        r.kind = kind;
        for (const auto& f : forms) r.forms.push_back(f.label);
        r.X = X;
        r.empirical = emp.value;
        r.constants = constants;
        r.family_size = fam.size();
        r.evaluated = emp.evaluated;
        r.degenerate = fam.degenerate || constants[0].degenerate;
        r.failures = emp.failures;
        if (kind == MomentKind::second) {
            const auto p = predicted_second(constants[0], X);
            r.predicted_leading = p.leading;
            r.predicted_with_secondary = p.with_secondary;
            r.ratio = safe_ratio(r.empirical, p.with_secondary);
            r.ratio_leading = safe_ratio(r.empirical, p.leading);
        } else if (kind == MomentKind::first) {
            const auto p = predicted_first(constants[0], forms[0], X);
            r.predicted_leading = p.leading;
            r.predicted_with_secondary = p.full;
            r.predicted_u_bracket = p.u_bracket;
            r.ratio = safe_ratio(r.empirical, p.full);
            r.ratio_leading = safe_ratio(r.empirical, p.leading);
            r.ratio_u_bracket = safe_ratio(r.empirical, p.u_bracket);
        } else {
            r.predicted_leading = predicted_mixed(constants[0], X);
            r.ratio = safe_ratio(r.empirical, r.predicted_leading);
            r.ratio_leading = r.ratio;
        }
        if (r.ratio && previous) r.ratio_change = *r.ratio - *previous;
        previous = r.ratio;
        r.threads = config.threads;
        r.delta = config.bump.delta;
        r.prime_limit = P;
        r.n_max = n_max;
        r.cache_hits = cache_hits;
        r.memo_hits = emp.memo_hits;
        r.sample_rate = config.sample.rate;
        r.sample_seed = config.sample.seed;
        r.Z = 1.0;
        r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        reports.push_back(std::move(r));
    }
    return reports;
}

namespace {

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson constants_json(const ConstantReport& c) {
    ojson j;
    j["name"] = c.name;
    j["prime_limit"] = c.prime_limit;
    j["value"] = c.value;
    j["tail_bound"] = c.tail_bound;
    j["degenerate"] = c.degenerate;
    ojson comp = ojson::object();
    for (const auto& [k, v] : c.components) comp[k] = v;
    j["components"] = comp;
    return j;
}

}  // namespace

std::string to_json(const ConstantReport& report) { return constants_json(report).dump(); }

std::string to_json(const MomentReport& r, bool include_runtime) {
    ojson j;
    j["kind"] = to_string(r.kind);
    j["forms"] = r.forms;
    j["X"] = r.X;
    j["empirical"] = r.empirical;
    j["predicted_leading"] = r.predicted_leading;
    j["predicted_with_secondary"] = opt(r.predicted_with_secondary);
    j["ratio"] = opt(r.ratio);
    j["ratio_leading"] = opt(r.ratio_leading);
    j["predicted_u_bracket"] = opt(r.predicted_u_bracket);
    j["ratio_u_bracket"] = opt(r.ratio_u_bracket);
    j["ratio_change"] = opt(r.ratio_change);
    j["family_size"] = r.family_size;
    j["evaluated"] = r.evaluated;
    j["degenerate"] = r.degenerate;
    ojson fails = ojson::array();
    for (const auto& f : r.failures) fails.push_back({{"d", f.d}, {"message", f.message}});
    j["failures"] = fails;
    ojson cs = ojson::array();
    for (const auto& c : r.constants) cs.push_back(constants_json(c));
    j["constants"] = cs;
    ojson prov;
    if (include_runtime) prov["runtime_seconds"] = r.runtime_seconds;
    prov["threads"] = r.threads;
    prov["delta"] = r.delta;
    prov["prime_limit"] = r.prime_limit;
    prov["n_max"] = r.n_max;
    prov["cache_hits"] = r.cache_hits;
    prov["memo_hits"] = r.memo_hits;
    prov["sample_rate"] = r.sample_rate;
    prov["sample_seed"] = r.sample_seed;
    prov["Z"] = r.Z;
    prov["coefficient_version"] = kCoefficientVersion;
    j["provenance"] = prov;
    return j.dump();
}

std::string csv_header() { return "X,empirical,predicted_leading,predicted_with_secondary,ratio,family_size"; }

std::string to_csv_row(const MomentReport& r) {
    std::ostringstream os;
    os << std::setprecision(17) << r.X << ',' << r.empirical << ',' << r.predicted_leading << ',';
    if (r.predicted_with_secondary) os << *r.predicted_with_secondary;
    os << ',';
    if (r.ratio) os << *r.ratio;
    os << ',' << r.family_size;
    return os.str();
}

}  // namespace twistlab
