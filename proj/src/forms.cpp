#include "twistlab/forms.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "twistlab/arith.hpp"
#include "twistlab/error.hpp"
#include "twistlab/numerics.hpp"

namespace twistlab {

const std::vector<FormSpec>& registry() {
    static const std::vector<FormSpec> forms = [] {
        std::vector<FormSpec> v;
        FormSpec delta;
        delta.label = "Delta";
        delta.kappa = 12;
        delta.level = 1;
        delta.source = SourceKind::delta;
        v.push_back(delta);
        auto elliptic = [&](const char* label, std::uint64_t level, Curve c) {
            FormSpec f;
            f.label = label;
            f.kappa = 2;
            f.level = level;
            f.source = SourceKind::elliptic;
            f.curve = c;
            v.push_back(f);
        };
        elliptic("11a", 11, {0, -1, 1, -10, -20});
        elliptic("19a", 19, {0, 1, 1, -9, -15});
        elliptic("37a", 37, {0, 0, 1, -1, 0});
        elliptic("49a", 49, {1, -1, 0, -2, -1});
        return v;
    }();
    return forms;
}

FormSpec find_form(std::string_view label) {
    std::string key(label);
    for (auto& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    for (const auto& f : registry()) {
        std::string name = f.label;
        for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (name == key) return f;
    }
    std::string known;
    for (const auto& f : registry()) known += (known.empty() ? "" : ", ") + f.label;
    fail(ErrorCode::unknown_form, "unknown form '" + std::string(label) + "' (registered: " + known + ")");
}

namespace {

std::uint64_t mod_reduce(std::int64_t a, std::uint64_t p) {
    const std::int64_t m = a % static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(m < 0 ? m + static_cast<std::int64_t>(p) : m);
}

// All moduli here are below 2^32, so products fit in 64 bits.
std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return (a * b) % p; }

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    std::int64_t r0 = static_cast<std::int64_t>(p), r1 = static_cast<std::int64_t>(a % p);
    std::int64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
        std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    return static_cast<std::uint64_t>(t0 < 0 ? t0 + static_cast<std::int64_t>(p) : t0);
}

std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mul_mod(r, a, p);
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    return r;
}

int legendre(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    return pow_mod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

// Tonelli-Shanks; a must be a nonzero square mod the odd prime p.
std::uint64_t sqrt_mod(std::uint64_t a, std::uint64_t p) {
    if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);
    std::uint64_t q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    std::uint64_t z = 2;
    while (legendre(z, p) != -1) ++z;
    std::uint64_t m = static_cast<std::uint64_t>(s);
    std::uint64_t c = pow_mod(z, q, p);
    std::uint64_t t = pow_mod(a, q, p);
    std::uint64_t r = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
        std::uint64_t i = 0, tt = t;
        while (tt != 1) {
            tt = mul_mod(tt, tt, p);
            ++i;
        }
        std::uint64_t b = c;
        for (std::uint64_t j = 0; j + i + 1 < m; ++j) b = mul_mod(b, b, p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    return r;
}

// Short Weierstrass y^2 = x^3 + A x + B over F_p.
struct ShortCurve {
    std::uint64_t p, A, B;
};

struct Point {
    std::uint64_t x = 0, y = 0;
    bool inf = true;
};

Point add(const ShortCurve& c, const Point& P, const Point& Q) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    const std::uint64_t p = c.p;
    std::uint64_t lam;
    if (P.x == Q.x) {
        if ((P.y + Q.y) % p == 0) return {};
        const std::uint64_t num = (3 * mul_mod(P.x, P.x, p) + c.A) % p;
        lam = mul_mod(num, inv_mod(2 * P.y % p, p), p);
    } else {
        const std::uint64_t num = (Q.y + p - P.y) % p;
        const std::uint64_t den = (Q.x + p - P.x) % p;
        lam = mul_mod(num, inv_mod(den, p), p);
    }
    Point R;
    R.inf = false;
    R.x = (mul_mod(lam, lam, p) + 2 * p - P.x - Q.x) % p;
    R.y = (mul_mod(lam, (P.x + p - R.x) % p, p) + p - P.y) % p;
    return R;
}

Point scalar(const ShortCurve& c, std::uint64_t k, Point P) {
    Point R;
    while (k) {
        if (k & 1) R = add(c, R, P);
        P = add(c, P, P);
        k >>= 1;
    }
    return R;
}

Point random_point(const ShortCurve& c, std::mt19937_64& rng) {
    for (;;) {
        const std::uint64_t x = rng() % c.p;
        const std::uint64_t rhs = (mul_mod(mul_mod(x, x, c.p), x, c.p) + mul_mod(c.A, x, c.p) + c.B) % c.p;
        if (rhs == 0) return {x, 0, false};
        if (legendre(rhs, c.p) == 1) return {x, sqrt_mod(rhs, c.p), false};
    }
}

// Some M in [lo, hi] with M P = O.
std::uint64_t multiple_in_interval(const ShortCurve& c, const Point& P, std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t width = hi - lo;
    const std::uint64_t m = static_cast<std::uint64_t>(std::ceil(std::sqrt(double(width + 1))));
    std::unordered_map<std::uint64_t, std::uint64_t> baby;
    baby.reserve(2 * m + 2);
    Point jP = P;
    for (std::uint64_t j = 1; j <= m; ++j) {
        if (jP.inf) return j;  // order at most m; any multiple of it works below
        baby.emplace(jP.x, j);
        jP = add(c, jP, P);
    }
    const Point giant = scalar(c, 2 * m + 1, P);
    std::uint64_t centre = lo + m;
    Point S = scalar(c, centre, P);
    while (centre <= hi + m) {
        if (S.inf) return centre;
        auto it = baby.find(S.x);
        if (it != baby.end()) {
            const Point J = scalar(c, it->second, P);
            const std::uint64_t M = (J.y == S.y) ? centre - it->second : centre + it->second;
            if (scalar(c, M, P).inf) return M;
        }
        S = add(c, S, giant);
        centre += 2 * m + 1;
    }
    fail(ErrorCode::internal, "point counting: no multiple of the point order in the Hasse interval");
}

std::uint64_t point_order(const ShortCurve& c, const Point& P, std::uint64_t multiple) {
    std::uint64_t ord = multiple;
    for (const auto& pp : factor_trial(multiple).factors) {
        for (int i = 0; i < pp.e && ord % pp.p == 0; ++i) {
            if (!scalar(c, ord / pp.p, P).inf) break;
            ord /= pp.p;
        }
    }
    return ord;
}

}  // namespace

std::int64_t count_points_naive(const Curve& e, std::uint64_t p) {
    require(p >= 2 && p < (std::uint64_t(1) << 31), ErrorCode::invalid_argument,
            "count_points_naive: p must be a prime below 2^31");
    if (p == 2) {
        std::int64_t count = 1;
        for (std::int64_t x = 0; x < 2; ++x)
            for (std::int64_t y = 0; y < 2; ++y) {
                const std::int64_t lhs = y * y + e.a1 * x * y + e.a3 * y;
                const std::int64_t rhs = x * x * x + e.a2 * x * x + e.a4 * x + e.a6;
                if (((lhs - rhs) % 2 + 2) % 2 == 0) ++count;
            }
        return count;
    }
    // Completing the square: y^2 + g y = f has 1 + (g^2 + 4f | p) solutions.
    std::vector<signed char> chi(p, -1);
    chi[0] = 0;
    for (std::uint64_t y = 1; y < p; ++y) chi[mul_mod(y, y, p)] = 1;
    const std::uint64_t a1 = mod_reduce(e.a1, p), a2 = mod_reduce(e.a2, p), a3 = mod_reduce(e.a3, p),
                        a4 = mod_reduce(e.a4, p), a6 = mod_reduce(e.a6, p);
    std::int64_t count = 1;
    for (std::uint64_t x = 0; x < p; ++x) {
        const std::uint64_t f = (mul_mod(mul_mod(x, x, p), (x + a2) % p, p) + mul_mod(a4, x, p) + a6) % p;
        const std::uint64_t g = (mul_mod(a1, x, p) + a3) % p;
        const std::uint64_t disc = (mul_mod(g, g, p) + 4 * f) % p;
        count += 1 + chi[disc];
    }
    return count;
}

std::int64_t ap_naive(const Curve& e, std::uint64_t p) {
    return static_cast<std::int64_t>(p) + 1 - count_points_naive(e, p);
}

std::int64_t ap_bsgs(const Curve& e, std::uint64_t p) {
    require(p >= 5 && p < (std::uint64_t(1) << 31), ErrorCode::invalid_argument,
            "ap_bsgs: p must lie in [5, 2^31)");
    require(mod_reduce(e.discriminant(), p) != 0, ErrorCode::invalid_argument,
            "ap_bsgs: p = " + std::to_string(p) + " is a prime of bad reduction");
    ShortCurve E{p, mod_reduce(-27 * e.c4(), p), mod_reduce(-54 * e.c6(), p)};
    std::uint64_t g = 2;
    while (legendre(g, p) != -1) ++g;
    const std::uint64_t g2 = mul_mod(g, g, p);
    ShortCurve T{p, mul_mod(E.A, g2, p), mul_mod(E.B, mul_mod(g2, g, p), p)};

    const std::uint64_t root = static_cast<std::uint64_t>(std::floor(2.0 * std::sqrt(double(p))));
    const std::uint64_t lo = p + 1 - root, hi = p + 1 + root + 1;
    std::mt19937_64 rng(p * 0x9E3779B97F4A7C15ull);
    std::uint64_t l_e = 1, l_t = 1;
    for (int iter = 0; iter < 400; ++iter) {
        const bool twist = iter % 2 == 1;
        const ShortCurve& c = twist ? T : E;
        const Point P = random_point(c, rng);
        const std::uint64_t ord = point_order(c, P, multiple_in_interval(c, P, lo, hi));
        std::uint64_t& l = twist ? l_t : l_e;
        l = std::lcm(l, ord);

        std::uint64_t found = 0;
        int hits = 0;
        for (std::uint64_t n = (lo + l_e - 1) / l_e * l_e; n <= hi && hits < 2; n += l_e) {
            if ((2 * p + 2 - n) % l_t == 0) {
                found = n;
                ++hits;
            }
        }
        if (hits == 1) return static_cast<std::int64_t>(p) + 1 - static_cast<std::int64_t>(found);
    }
    fail(ErrorCode::internal, "ap_bsgs: group order not determined at p = " + std::to_string(p));
}

std::int64_t ap_integer(const Curve& e, std::uint64_t p) {
    if (p < 1000 || mod_reduce(e.discriminant(), p) == 0) return ap_naive(e, p);
    return ap_bsgs(e, p);
}

double ap_elliptic(const Curve& e, std::uint64_t p) {
    return double(ap_integer(e, p)) / std::sqrt(double(p));
}

std::vector<__int128> tau_table(std::uint64_t n_max) {
    require(n_max >= 1 && n_max <= kDeltaCap, ErrorCode::invalid_argument,
            "tau_table: n_max must lie in [1, " + std::to_string(kDeltaCap) + "]");
    // prod (1 - q^n)^3 = sum (-1)^k (2k+1) q^{k(k+1)/2}; tau(n) is the q^{n-1}
    // coefficient of its eighth power.
    const std::size_t len = n_max;
    std::vector<std::pair<std::size_t, std::int64_t>> sparse;
    for (std::int64_t k = 0;; ++k) {
        const std::size_t e = static_cast<std::size_t>(k * (k + 1) / 2);
        if (e >= len) break;
        sparse.emplace_back(e, (k % 2 ? -1 : 1) * (2 * k + 1));
    }
    std::vector<__int128> p2(len, 0);
    for (const auto& [ea, ca] : sparse)
        for (const auto& [eb, cb] : sparse)
            if (ea + eb < len) p2[ea + eb] += static_cast<__int128>(ca) * cb;
    auto square = [len](const std::vector<__int128>& a) {
        std::vector<__int128> out(len, 0);
        for (std::size_t n = 0; n < len; ++n) {
            __int128 acc = 0;
            for (std::size_t i = 0; 2 * i < n; ++i) acc += a[i] * a[n - i];
            acc *= 2;
            if (n % 2 == 0) acc += a[n / 2] * a[n / 2];
            out[n] = acc;
        }
        return out;
    };
    const auto p8 = square(square(p2));
    std::vector<__int128> tau(n_max + 1, 0);
    for (std::uint64_t n = 1; n <= n_max; ++n) tau[n] = p8[n - 1];
    return tau;
}

std::vector<std::int64_t> elliptic_coefficients(const FormSpec& form, std::uint64_t n_max, unsigned threads) {
    require(form.source == SourceKind::elliptic, ErrorCode::invalid_argument,
            "elliptic_coefficients: form " + form.label + " has no curve");
    require(n_max >= 1, ErrorCode::invalid_argument, "n_max must be positive");
    std::vector<std::int64_t> a(n_max + 1, 0);
    a[1] = 1;
    if (n_max < 2) return a;
    const PrimeTable table(static_cast<std::uint32_t>(n_max));
    const auto primes = table.primes();
    parallel_for(primes.size(), threads, [&](std::size_t i) {
        const std::uint64_t p = primes[i];
        const std::int64_t ap = ap_integer(form.curve, p);
        const bool good = form.level % p != 0;
        if (good && double(ap) * double(ap) > 4.0 * double(p))
            fail(ErrorCode::internal, "Hasse bound violated at p = " + std::to_string(p));
        a[p] = ap;
    });
    // pk[n] is the full power of the least prime of n dividing n.
    std::vector<std::uint32_t> pk(n_max + 1, 0);
    for (std::uint64_t n = 2; n <= n_max; ++n) {
        const std::uint64_t p = table.smallest_factor(n);
        const std::uint64_t q = n / p;
        pk[n] = static_cast<std::uint32_t>((q % p == 0) ? std::uint64_t(pk[q]) * p : p);
        if (n == p) continue;
        if (pk[n] == n) {
            const bool good = form.level % p != 0;
            a[n] = a[p] * a[q] - (good ? std::int64_t(p) * a[q / p] : 0);
        } else {
            a[n] = a[pk[n]] * a[n / pk[n]];
        }
    }
    return a;
}

std::uint64_t sieve_memory_estimate(const FormSpec& form, std::uint64_t n_max) {
    const std::uint64_t per = form.source == SourceKind::delta ? 16 + 4 + 4 + 16 : 8 + 4 + 4 + 16;
    return per * (n_max + 1);
}

namespace {

void finish(CoefficientTable& t) {
    t.lambda_over_sqrt.assign(t.n_max + 1, 0.0);
    for (std::uint64_t n = 1; n <= t.n_max; ++n) t.lambda_over_sqrt[n] = t.lambda[n] / std::sqrt(double(n));
}

}  // namespace

std::string cache_dir_from_env() {
    const char* v = std::getenv("TWISTLAB_CACHE");
    return v ? std::string(v) : std::string();
}

std::string cache_file_name(const std::string& label, std::uint64_t n_max) {
    return label + "-n" + std::to_string(n_max) + "-v" + std::to_string(kCoefficientVersion) + ".coef";
}

std::shared_ptr<CoefficientTable> read_cache(const std::string& dir, const FormSpec& form, std::uint64_t n_max) {
    static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");
    const auto path = std::filesystem::path(dir) / cache_file_name(form.label, n_max);
    std::ifstream in(path, std::ios::binary);
    if (!in) return nullptr;
    std::string header;
    if (!std::getline(in, header)) return nullptr;
    const std::string expected =
        "form," + form.label + "," + std::to_string(n_max) + "," + std::to_string(kCoefficientVersion);
    if (header != expected) return nullptr;
    auto t = std::make_shared<CoefficientTable>();
    t->form = form;
    t->n_max = n_max;
    t->lambda.assign(n_max + 1, 0.0);
    in.read(reinterpret_cast<char*>(t->lambda.data() + 1), static_cast<std::streamsize>(n_max * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(n_max * sizeof(double))) return nullptr;
    if (in.peek() != std::char_traits<char>::eof()) return nullptr;
    if (t->lambda[1] != 1.0) return nullptr;
    finish(*t);
    t->from_cache = true;
    return t;
}

void write_cache(const std::string& dir, const CoefficientTable& table) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = std::filesystem::path(dir) / cache_file_name(table.form.label, table.n_max);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::io, "cannot write coefficient cache " + tmp);
        out << "form," << table.form.label << "," << table.n_max << "," << kCoefficientVersion << "\n";
        out.write(reinterpret_cast<const char*>(table.lambda.data() + 1),
                  static_cast<std::streamsize>(table.n_max * sizeof(double)));
        if (!out) fail(ErrorCode::io, "short write to coefficient cache " + tmp);
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(ErrorCode::io, "cannot move coefficient cache into place: " + ec.message());
}

std::shared_ptr<const CoefficientTable> sieve_coefficients(const FormSpec& form, std::uint64_t n_max,
                                                           const SieveOptions& options) {
    require(n_max >= 1, ErrorCode::invalid_argument, "n_max must be positive");
    if (form.source == SourceKind::delta)
        require(n_max <= kDeltaCap, ErrorCode::invalid_argument,
                "n_max " + std::to_string(n_max) + " exceeds the Delta cap of " + std::to_string(kDeltaCap));
    const std::uint64_t need = sieve_memory_estimate(form, n_max);
    if (need > options.memory_budget) {
        std::ostringstream os;
        os << "coefficient table for " << form.label << " to n = " << n_max << " needs " << need
           << " bytes, budget is " << options.memory_budget << " bytes";
        fail(ErrorCode::resource, os.str());
    }
    if (!options.cache_dir.empty())
        if (auto cached = read_cache(options.cache_dir, form, n_max)) return cached;

    auto t = std::make_shared<CoefficientTable>();
    t->form = form;
    t->n_max = n_max;
    t->lambda.assign(n_max + 1, 0.0);
    if (form.source == SourceKind::elliptic) {
        const auto a = elliptic_coefficients(form, n_max, options.threads);
        for (std::uint64_t n = 1; n <= n_max; ++n) t->lambda[n] = double(a[n]) / std::sqrt(double(n));
    } else {
        const auto tau = tau_table(n_max);
        auto& lam = t->lambda;
        lam[1] = 1.0;
        if (n_max >= 2) {
            const PrimeTable table(static_cast<std::uint32_t>(n_max));
            std::vector<std::uint32_t> pk(n_max + 1, 0);
            for (std::uint64_t n = 2; n <= n_max; ++n) {
                const std::uint64_t p = table.smallest_factor(n);
                const std::uint64_t q = n / p;
                pk[n] = static_cast<std::uint32_t>((q % p == 0) ? std::uint64_t(pk[q]) * p : p);
                if (n == p)
                    lam[n] = double(tau[n]) / std::pow(double(p), 5.5);
                else if (pk[n] == n)
                    lam[n] = lam[p] * lam[q] - lam[q / p];
                else
                    lam[n] = lam[pk[n]] * lam[n / pk[n]];
            }
        }
    }
    finish(*t);
    if (!options.cache_dir.empty()) write_cache(options.cache_dir, *t);
    return t;
}

}  // namespace twistlab
