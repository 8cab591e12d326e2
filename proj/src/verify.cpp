#include "twistlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include <json.hpp>

#include "twistlab/arith.hpp"
#include "twistlab/error.hpp"
#include "twistlab/lfunc.hpp"
#include "twistlab/numerics.hpp"

namespace twistlab {

namespace {

void check_odd(std::uint64_t n) {
    require(n >= 1 && n % 2 == 1, ErrorCode::invalid_argument,
            "Gauss sums need an odd positive modulus, got n = " + std::to_string(n));
}

cplx prefactor(std::uint64_t n) {
    const double s = kronecker(-1, static_cast<std::int64_t>(n));
    return cplx(0.5, -0.5) + s * cplx(0.5, 0.5);
}

std::uint64_t ipow(std::uint64_t p, int e) {
    std::uint64_t r = 1;
    while (e-- > 0) r *= p;
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

cplx gauss_bruteforce(std::int64_t k, std::uint64_t n) {
    check_odd(n);
    const auto sn = static_cast<std::int64_t>(n);
    const std::int64_t kr = ((k % sn) + sn) % sn;
    cplx sum = 0.0;
    for (std::int64_t a = 0; a < sn; ++a) {
        const int chi = kronecker(a, sn);
        if (chi == 0) continue;
        const double theta = 2.0 * kPi * double((a * kr) % sn) / double(sn);
        sum += double(chi) * cplx(std::cos(theta), std::sin(theta));
    }
    return prefactor(n) * sum;
}

cplx gauss_explicit(std::int64_t k, std::uint64_t n) {
    check_odd(n);
    cplx out = 1.0;
    for (const auto& [p, beta] : factor_trial(n).factors) {
        int alpha = 0;
        bool infinite = k == 0;
        std::int64_t rest = k;
        if (!infinite)
            while (rest % static_cast<std::int64_t>(p) == 0) {
                rest /= static_cast<std::int64_t>(p);
                ++alpha;
            }
        const int b = static_cast<int>(beta);
        double g;
        if (infinite || b <= alpha) {
            g = b % 2 ? 0.0 : double(ipow(p, b) - ipow(p, b - 1));
        } else if (b == alpha + 1) {
            const double pa = double(ipow(p, alpha));
            g = b % 2 == 0 ? -pa : kronecker(rest, static_cast<std::int64_t>(p)) * pa * std::sqrt(double(p));
        } else {
            g = 0.0;
        }
        out *= g;
        if (g == 0.0) break;
    }
    return out;
}

double fourier_cs(double y, const BumpSpec& bump) {
    validate(bump);
    const double d = bump.delta;
    const double w = 2.0 * kPi * y;
    auto kern = [](double t) { return std::cos(t) + std::sin(t); };
    double plateau;
    if (w == 0.0) {
        plateau = 1.0 - 2.0 * d;
    } else {
        auto prim = [&](double x) { return (std::sin(w * x) - std::cos(w * x)) / w; };
        plateau = prim(1.0 - d) - prim(d);
    }
    // On each band F reduces to the smooth step in the band coordinate.
    const int pieces = 4 + static_cast<int>(std::min(2000.0, std::abs(w) * d / 2.0));
    auto band = integrate_gk<double>(
        [&](double t) {
            const double s = smooth_step(t);
            return s * (kern(w * d * t) + kern(w * (1.0 - d * t)));
        },
        0.0, 1.0, 1e-13, 4 * pieces + 200, pieces);
    return plateau + d * band.value;
}

namespace {

// Smallest y (a power of 2) past which |F^| stays below eps, judged on dense
// irregular samples since F^ has zeros.
double decay_scale(const BumpSpec& bump, double eps) {
    static std::mutex mu;
    static std::map<std::pair<double, double>, double> memo;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_pair(bump.delta, eps);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double y = 4.0;
    for (; y < 1e5; y *= 2.0) {
        double worst = 0.0;
        for (int j = 0; j < 256; ++j) {
            const double t = y * (1.0 + 3.0 * std::fmod(phi * (j + 1), 1.0));
            worst = std::max({worst, std::abs(fourier_cs(t, bump)), std::abs(fourier_cs(-t, bump))});
        }
        if (worst < eps) break;
    }
    memo[key] = y;
    return y;
}

}  // namespace

std::vector<std::pair<std::uint64_t, double>> default_poisson_pairs() {
    return {{1, 50},    {1, 200},   {3, 100},   {5, 60},    {7, 150},   {9, 40},    {9, 300},
            {15, 200},  {15, 75},   {21, 120},  {25, 250},  {27, 90},   {33, 400},  {35, 70},
            {45, 180},  {49, 140},  {63, 500},  {77, 230},  {81, 320},  {99, 260},  {105, 300},
            {105, 150}, {121, 400}, {135, 350}, {165, 500}};
}

PoissonResult verify_poisson(std::uint64_t n, double Z, const BumpSpec& bump) {
    check_odd(n);
    require(Z > 0.0 && std::isfinite(Z), ErrorCode::invalid_argument, "Z must be positive");
    validate(bump);
    PoissonResult r;
    r.n = n;
    r.Z = Z;
    const auto sn = static_cast<std::int64_t>(n);

    CompensatedSum lhs;
    for (std::int64_t d = 1; double(d) < Z; d += 2) {
        const int chi = kronecker(d, sn);
        if (chi != 0) lhs.add(chi * bump_F(double(d) / Z, bump));
    }
    r.lhs = lhs.value();

    const double step = Z / (2.0 * double(n));
    const double scale = step * kronecker(2, sn);
    // |G_k(n)| <= n bounds the tail without trusting sparse Gauss sums.
    std::vector<cplx> pos{0.0}, neg{0.0};  // terms at +k and -k, k >= 1
    std::vector<double> env{0.0};         // n (|F^(k step)| + |F^(-k step)|)
    auto extend = [&](std::int64_t K) {
        for (auto k = static_cast<std::int64_t>(pos.size()); k <= K; ++k) {
            const double fp = fourier_cs(double(k) * step, bump), fm = fourier_cs(-double(k) * step, bump);
            const double sgn = k % 2 ? -1.0 : 1.0;
            pos.push_back(sgn * gauss_explicit(k, n) * fp);
            neg.push_back(sgn * gauss_explicit(-k, n) * fm);
            env.push_back(double(n) * (std::abs(fp) + std::abs(fm)));
        }
    };
    // Sum through 2K; the block K < |k| <= 2K bounds what lies beyond.
    const double y_floor = decay_scale(bump, 1e-13);
    std::int64_t K = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(0.5 * y_floor / step)));
    for (;; K *= 2) {
        extend(2 * K);
        double block = 0.0;
        for (std::int64_t k = K + 1; k <= 2 * K; ++k) block += env[k];
        r.truncation = std::abs(scale) * block;
        if (r.truncation < 1e-10 || double(K) * step > 2000.0) break;
    }
    r.k_max = 2 * K;
    if (r.truncation > 1e-8) {
        std::ostringstream os;
        os << "verify_poisson(n=" << n << ", Z=" << Z << "): truncation estimate " << r.truncation
           << " exceeds 1e-8 at k_max = " << r.k_max;
        fail(ErrorCode::precision, os.str());
    }
    CompensatedSum re, im;
    const cplx t0 = gauss_explicit(0, n) * fourier_cs(0.0, bump);
    re.add(t0.real());
    im.add(t0.imag());
    for (std::int64_t k = 1; k <= r.k_max; ++k) {
        re.add(pos[k].real() + neg[k].real());
        im.add(pos[k].imag() + neg[k].imag());
    }
    r.rhs = scale * re.value();
    r.discrepancy = std::abs(r.lhs - r.rhs) + std::abs(scale * im.value());
    return r;
}

bool SuiteResult::passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

std::string SuiteResult::to_text() const {
    std::ostringstream os;
    os << "suite " << suite << "\n";
    os << std::left << std::setw(34) << "check" << std::setw(6) << "pass" << std::setw(8) << "cases" << std::setw(14)
       << "worst" << std::setw(12) << "tolerance"
       << "detail\n";
    for (const auto& v : verdicts) {
        std::ostringstream w, t;
        w << std::setprecision(3) << v.worst;
        t << std::setprecision(3) << v.tolerance;
        os << std::left << std::setw(34) << v.check << std::setw(6) << (v.passed ? "PASS" : "FAIL") << std::setw(8)
           << v.cases << std::setw(14) << w.str() << std::setw(12) << t.str() << v.detail << "\n";
    }
    os << "suite " << suite << ": " << (passed() ? "PASS" : "FAIL") << " (" << std::fixed << std::setprecision(2)
       << runtime_seconds << " s)\n";
    return os.str();
}

std::string SuiteResult::to_json() const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["passed"] = passed();
    j["runtime_seconds"] = runtime_seconds;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& v : verdicts)
        arr.push_back({{"check", v.check},
                       {"passed", v.passed},
                       {"cases", v.cases},
                       {"worst", v.worst},
                       {"tolerance", v.tolerance},
                       {"detail", v.detail}});
    j["verdicts"] = arr;
    return j.dump();
}

SuiteResult run_gauss_suite(std::uint64_t n_limit, std::int64_t k_limit, unsigned threads) {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr double tol = 1e-9;
    std::vector<std::uint64_t> ns;
    for (std::uint64_t n = 1; n <= n_limit; n += 2) ns.push_back(n);
    std::vector<double> worst_match(ns.size()), worst_4k(ns.size());
    std::vector<std::int64_t> arg_k(ns.size());
    parallel_for(ns.size(), std::max(1u, threads), [&](std::size_t i) {
        for (std::int64_t k = -k_limit; k <= k_limit; ++k) {
            const cplx brute = gauss_bruteforce(k, ns[i]);
            const double e = std::abs(brute - gauss_explicit(k, ns[i]));
            if (e > worst_match[i]) {
                worst_match[i] = e;
                arg_k[i] = k;
            }
            worst_4k[i] = std::max(worst_4k[i], std::abs(brute - gauss_bruteforce(4 * k, ns[i])));
        }
    });
    SuiteResult out;
    out.suite = "gauss";
    const auto im = std::max_element(worst_match.begin(), worst_match.end()) - worst_match.begin();
    Verdict match{"explicit_vs_bruteforce", false, worst_match[im], tol, ns.size() * std::size_t(2 * k_limit + 1), ""};
    match.passed = match.worst < tol;
    match.detail = "odd n <= " + std::to_string(n_limit) + ", |k| <= " + std::to_string(k_limit) + "; worst at n=" +
                   std::to_string(ns[im]) + " k=" + std::to_string(arg_k[im]);
    out.verdicts.push_back(match);
    Verdict four{"G_k(n) = G_4k(n)", false, *std::max_element(worst_4k.begin(), worst_4k.end()), tol, match.cases,
                 "same grid, brute force on both sides"};
    four.passed = four.worst < tol;
    out.verdicts.push_back(four);

    Verdict mult{"multiplicativity", false, 0.0, tol, 0, "coprime odd m, n <= 99, k in {-7, 0, 1, 12}"};
    for (std::uint64_t m = 1; m <= 99; m += 2)
        for (std::uint64_t n = m; n <= 99; n += 2) {
            if (gcd_u64(m, n) != 1) continue;
            for (std::int64_t k : {-7, 0, 1, 12}) {
                const double e = std::abs(gauss_explicit(k, m * n) - gauss_explicit(k, m) * gauss_explicit(k, n));
                const double e2 = std::abs(gauss_bruteforce(k, m * n) - gauss_bruteforce(k, m) * gauss_bruteforce(k, n));
                mult.worst = std::max({mult.worst, e, e2});
                ++mult.cases;
            }
        }
    mult.passed = mult.worst < tol;
    out.verdicts.push_back(mult);
    out.runtime_seconds = seconds_since(t0);
    return out;
}

SuiteResult run_poisson_suite(const std::vector<std::pair<std::uint64_t, double>>& pairs, const BumpSpec& bump) {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr double tol = 1e-8;
    SuiteResult out;
    out.suite = "poisson";
    Verdict all{"poisson_all_pairs", true, 0.0, tol, 0, ""};
    for (const auto& [n, Z] : pairs) {
        Verdict v;
        std::ostringstream name;
        name << "n=" << n << " Z=" << Z;
        v.check = name.str();
        v.tolerance = tol;
        v.cases = 1;
        try {
            const PoissonResult r = verify_poisson(n, Z, bump);
            v.worst = r.discrepancy;
            v.passed = r.discrepancy < tol;
            std::ostringstream det;
            det << std::setprecision(12) << "lhs=" << r.lhs << " rhs=" << r.rhs << " k_max=" << r.k_max
                << " trunc=" << std::setprecision(2) << r.truncation;
            v.detail = det.str();
        } catch (const Error& e) {
            v.passed = false;
            v.worst = std::numeric_limits<double>::infinity();
            v.detail = e.what();
        }
        all.worst = std::max(all.worst, v.worst);
        all.passed = all.passed && v.passed;
        ++all.cases;
        out.verdicts.push_back(v);
    }
    all.detail = std::to_string(pairs.size()) + " pairs, delta = " + std::to_string(bump.delta);
    out.verdicts.push_back(all);
    out.runtime_seconds = seconds_since(t0);
    return out;
}

std::uint64_t afe_d_capacity(const FormSpec& form, std::uint64_t n_max) {
    // Square level: w is constant, so the value kernel only runs when it is -1.
    const bool constant_w = is_perfect_square(form.level);
    const bool any_minus = !constant_w || !form.eta_known() || form.sign() == -1;
    double x = 0.0;
    for (double Z : {1.0, probe_Z(form)})
        for (CutoffKind kind : {CutoffKind::derivative, CutoffKind::value}) {
            if (kind == CutoffKind::value && (!any_minus || Z == 1.0)) continue;
            const AfeEvaluator ev(form, Z, kind);
            x = std::max(x, double(ev.required_length(1000000)) / 1e6);
        }
    return static_cast<std::uint64_t>(std::floor(double(n_max) / (8.0 * x)));
}

SuiteResult run_afe_suite(const FormSpec& form, const CoefficientTable& coeffs, const AfeSuiteOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    require(form.eta_known(), ErrorCode::contract, "the afe suite needs eta for " + form.label);
    const std::uint64_t cap = std::min(options.d_limit, afe_d_capacity(form, coeffs.n_max));
    std::vector<std::uint64_t> pool;
    for (std::uint64_t d = 1; d <= cap; d += 2)
        if (is_squarefree(d) && gcd_u64(d, form.level) == 1) pool.push_back(d);
    require(!pool.empty(), ErrorCode::resource,
            "coefficient table for " + form.label + " is too short for any twist (n_max = " +
                std::to_string(coeffs.n_max) + ")");
    std::mt19937_64 rng(options.seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(pool.size(), options.twists));
    std::sort(pool.begin(), pool.end());

    const double Zp = probe_Z(form);
    const AfeEvaluator d1(form, 1.0, CutoffKind::derivative), dp(form, Zp, CutoffKind::derivative);
    const AfeEvaluator vp(form, Zp, CutoffKind::value);
    struct Row {
        int w = 0;
        double annihilation = 0.0, z_diff = 0.0, lval = 0.0;
    };
    std::vector<Row> rows(pool.size());
    parallel_for(pool.size(), std::max(1u, options.threads), [&](std::size_t i) {
        const TwistPoint t = make_twist(form, pool[i]);
        rows[i].w = t.w;
        const AfeValue a = dp.evaluate(t, coeffs);
        if (t.w == 1) {
            rows[i].annihilation = std::abs(a.value) / (1.0 + a.abs_terms);
        } else {
            rows[i].z_diff = std::abs(a.value - d1.evaluate(t, coeffs).value);
            rows[i].lval = std::abs(vp.evaluate(t, coeffs).value);
        }
    });
    const double tol = options.tolerance;
    Verdict ann{"annihilation (w=+1)", true, 0.0, tol, 0, "|value| / (1 + sum|terms|) at Z = probe"};
    Verdict zin{"Z-invariance of L' (w=-1)", true, 0.0, tol, 0, ""};
    Verdict lc{"l_central vanishes (w=-1)", true, 0.0, tol, 0, "|L(1/2)| at Z = probe"};
    for (const auto& r : rows) {
        if (r.w == 1) {
            ann.worst = std::max(ann.worst, r.annihilation);
            ++ann.cases;
        } else {
            zin.worst = std::max(zin.worst, r.z_diff);
            lc.worst = std::max(lc.worst, r.lval);
            ++zin.cases;
            ++lc.cases;
        }
    }
    std::ostringstream zd;
    zd << "|L'(Z=1) - L'(Z=" << std::setprecision(6) << Zp << ")|";
    zin.detail = zd.str();
    for (Verdict* v : {&ann, &zin, &lc}) v->passed = v->worst < tol;
    SuiteResult out;
    out.suite = "afe:" + form.label;
    out.verdicts = {ann, zin, lc};
    Verdict span{"twists drawn", true, 0.0, 0.0, pool.size(),
                 "d in [" + std::to_string(pool.front()) + ", " + std::to_string(pool.back()) + "], cap " +
                     std::to_string(cap) + ", seed " + std::to_string(options.seed)};
    out.verdicts.push_back(span);
    out.runtime_seconds = seconds_since(t0);
    return out;
}

}  // namespace twistlab
