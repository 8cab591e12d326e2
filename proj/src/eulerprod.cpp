#include "twistlab/eulerprod.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "twistlab/arith.hpp"
#include "twistlab/error.hpp"
#include "twistlab/numerics.hpp"

namespace twistlab {

namespace {

constexpr double kEps = 0.01;
constexpr int kSeriesTerms = 80;

void check_region(cplx u, const char* what) {
    if (!(u.real() > -0.25 + kEps)) {
        std::ostringstream os;
        os << what << ": Re " << u.real() << " is outside the convergence region Re > -1/4 + " << kEps;
        fail(ErrorCode::domain, os.str());
    }
}

cplx p_pow(std::uint64_t p, cplx s) { return std::exp(-s * std::log(double(p))); }

int ord(std::uint64_t n, std::uint64_t p) {
    int e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    return e;
}

std::uint64_t part_level(LevelPart part, std::uint64_t n1, std::uint64_t n2) {
    switch (part) {
        case LevelPart::one: return 1;
        case LevelPart::n1: return n1;
        case LevelPart::n2: return n2;
        case LevelPart::full: return n1 * n2;
    }
    return 1;
}

struct CSum {
    CompensatedSum re, im;
    void add(cplx z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

// Product of local factors over the primes of `primes`, through a compensated
// sum of logarithms. The tail is fitted from the last decade of primes,
// assuming |log factor| <= C p^-2 beyond P.
template <class Factor>
ProductValue absolute_product(const std::vector<std::uint32_t>& primes, std::uint64_t P, Factor&& factor) {
    CSum logs;
    double C = 0.0;
    bool zero = false;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        const std::uint64_t p = primes[i];
        const cplx z = factor(i);
        if (z == cplx(0.0)) {
            zero = true;
            continue;
        }
        const cplx l = std::log(z);
        logs.add(l);
        if (10 * p > P) C = std::max(C, double(p) * double(p) * std::abs(l));
    }
    ProductValue out;
    out.P = P;
    out.fitted_C = C;
    out.value = zero ? cplx(0.0) : std::exp(logs.value());
    const double rel = 2.0 * C / (double(P) * std::log(double(P)));
    // A vanishing local factor makes the product exactly 0; the bound then
    // covers what the other factors could contribute.
    out.tail_bound = (zero ? std::exp(logs.value().real()) : std::abs(out.value)) * rel;
    return out;
}

// Mean and spread of the partial products over the last 10% of primes.
template <class LogFactor>
ProductValue averaged_product(const std::vector<std::uint32_t>& primes, std::uint64_t P, LogFactor&& log_factor) {
    CSum logs;
    const std::size_t start = primes.size() - std::max<std::size_t>(1, primes.size() / 10);
    CSum mean;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t count = 0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        logs.add(log_factor(i));
        if (i >= start) {
            const cplx partial = std::exp(logs.value());
            mean.add(partial);
            lo = std::min(lo, partial.real());
            hi = std::max(hi, partial.real());
            ++count;
        }
    }
    ProductValue out;
    out.P = P;
    out.value = mean.value() / double(count);
    out.tail_bound = 0.5 * (hi - lo);
    return out;
}

// lambda(p^j), j = 0..terms, from the Hecke recursion.
std::vector<double> prime_power_lambdas(double lam, bool bad, int terms) {
    std::vector<double> L(terms + 1);
    L[0] = 1.0;
    if (terms >= 1) L[1] = lam;
    for (int j = 2; j <= terms; ++j) L[j] = bad ? lam * L[j - 1] : lam * L[j - 1] - L[j - 2];
    return L;
}

std::vector<cplx> powers(cplx x, int terms) {
    std::vector<cplx> out(terms + 1);
    out[0] = 1.0;
    for (int j = 1; j <= terms; ++j) out[j] = out[j - 1] * x;
    return out;
}

}  // namespace

LocalData local_data(const CoefficientTable& coeffs, std::uint64_t P) {
    require(P >= 2, ErrorCode::invalid_argument, "prime limit must be at least 2");
    require(P <= coeffs.n_max, ErrorCode::invalid_argument,
            "prime limit " + std::to_string(P) + " exceeds the coefficient table (n_max = " +
                std::to_string(coeffs.n_max) + ")");
    LocalData d;
    d.form = coeffs.form;
    d.P = P;
    const PrimeTable table(static_cast<std::uint32_t>(P));
    for (std::uint32_t p : table.primes()) {
        d.primes.push_back(p);
        d.lambda_p.push_back(coeffs.lambda[p]);
    }
    return d;
}

LocalRoots local_roots(double lambda_p, std::uint64_t p, bool bad) {
    LocalRoots r;
    r.p = p;
    if (bad) {
        r.alpha = lambda_p;
        r.beta = 0.0;
        return r;
    }
    // Roots of X^2 - lambda X + 1; complex conjugates on the unit circle when |lambda| <= 2.
    const cplx disc = std::sqrt(cplx(lambda_p * lambda_p - 4.0, 0.0));
    r.alpha = 0.5 * (lambda_p + disc);
    r.beta = 0.5 * (lambda_p - disc);
    return r;
}

cplx sym2_local_inverse(double lam, std::uint64_t p, cplx s, bool bad) {
    const cplx X = p_pow(p, s);
    if (bad) return 1.0 - lam * lam * X;
    return (1.0 - X) * (1.0 - (lam * lam - 2.0) * X + X * X);
}

cplx rankin_local_inverse(double lf, bool bad_f, double lg, bool bad_g, std::uint64_t p, cplx s) {
    const cplx Y = p_pow(p, s);
    const double e1 = lf * lg;
    if (bad_f && bad_g) return 1.0 - e1 * Y;
    if (bad_f) return 1.0 - e1 * Y + lf * lf * Y * Y;
    if (bad_g) return 1.0 - e1 * Y + lg * lg * Y * Y;
    return 1.0 - e1 * Y + (lf * lf + lg * lg - 2.0) * Y * Y - e1 * Y * Y * Y + Y * Y * Y * Y;
}

ProductValue sym2_product(const LocalData& f, cplx s) {
    return averaged_product(f.primes, f.P, [&](std::size_t i) {
        return -std::log(sym2_local_inverse(f.lambda_p[i], f.primes[i], s, f.bad(i)));
    });
}

double sym2_log_derivative_truncated(const LocalData& f, double s) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < f.primes.size(); ++i) {
        const double p = f.primes[i], lp = std::log(p), X = std::pow(p, -s), lam = f.lambda_p[i];
        if (f.bad(i)) {
            acc.add(-lp * lam * lam * X / (1.0 - lam * lam * X));
        } else {
            const double c = lam * lam - 2.0;
            acc.add(-lp * X / (1.0 - X) - lp * X * (c - 2.0 * X) / (1.0 - c * X + X * X));
        }
    }
    return acc.value();
}

Sym2Value sym2_L(const LocalData& f, double s) {
    require(s >= 1.0, ErrorCode::domain, "sym2_L: s must be >= 1 (the product diverges below)");
    const ProductValue v = sym2_product(f, s);
    auto log_l = [&](double h) { return cplx(std::log(sym2_product(f, s + h).value.real())); };
    constexpr double h = 1e-4;
    const double d1 = ((log_l(h) - log_l(-h)) / (2.0 * h)).real();
    const double rich = richardson_derivative(log_l, h).real();
    Sym2Value out;
    out.value = v.value.real();
    out.tail_bound = v.tail_bound;
    out.log_derivative = rich;
    out.log_derivative_error = std::abs(rich - d1);
    out.P = f.P;
    return out;
}

ProductValue rankin_L1(const LocalData& f, const LocalData& g) {
    require(f.form.label != g.form.label, ErrorCode::invalid_argument,
            "rankin_L1: f = g = " + f.form.label + "; L(s, f x f) has a pole at s = 1 from its zeta factor");
    const std::uint64_t P = std::min(f.P, g.P);
    const std::size_t n = std::min(f.primes.size(), g.primes.size());
    std::vector<std::uint32_t> primes(f.primes.begin(), f.primes.begin() + static_cast<std::ptrdiff_t>(n));
    return averaged_product(primes, P, [&](std::size_t i) {
        return -std::log(rankin_local_inverse(f.lambda_p[i], f.bad(i), g.lambda_p[i], g.bad(i), primes[i], 1.0));
    });
}

ProductValue zstar_second_part(const LocalData& f, LevelPart part, cplx u, cplx v) {
    check_region(u, "zstar_second");
    check_region(v, "zstar_second");
    const std::uint64_t Np = part_level(part, f.form.level, 1);
    return absolute_product(f.primes, f.P, [&](std::size_t i) -> cplx {
        const std::uint64_t p = f.primes[i];
        const double lam = f.lambda_p[i];
        const bool bad = f.bad(i);
        cplx E = 1.0;
        if (p != 2) {
            const cplx xu = p_pow(p, 0.5 + u), xv = p_pow(p, 0.5 + v);
            const double w = double(p) / double(p + 1);
            if (!bad) {
                const cplx am = 1.0 / ((1.0 - lam * xu + xu * xu) * (1.0 - lam * xv + xv * xv));
                const cplx ap = 1.0 / ((1.0 + lam * xu + xu * xu) * (1.0 + lam * xv + xv * xv));
                E = 1.0 + w * (0.5 * am + 0.5 * ap - 1.0);
            } else {
                const double sgn = ord(Np, p) % 2 ? -1.0 : 1.0;
                E = w * (0.5 / ((1.0 - lam * xu) * (1.0 - lam * xv)) + sgn * 0.5 / ((1.0 + lam * xu) * (1.0 + lam * xv)));
            }
        }
        return E * (1.0 - p_pow(p, 1.0 + u + v)) * sym2_local_inverse(lam, p, 1.0 + 2.0 * u, bad) *
               sym2_local_inverse(lam, p, 1.0 + u + v, bad) * sym2_local_inverse(lam, p, 1.0 + 2.0 * v, bad);
    });
}

namespace {

ProductValue combine(std::initializer_list<std::pair<double, ProductValue>> terms) {
    ProductValue out;
    for (const auto& [c, t] : terms) {
        if (c == 0.0) continue;
        out.value += c * t.value;
        out.tail_bound += std::abs(c) * t.tail_bound;
        out.fitted_C = std::max(out.fitted_C, t.fitted_C);
        out.P = t.P;
    }
    return out;
}

int form_sign(const FormSpec& f) {
    require(f.eta_known(), ErrorCode::contract, "the Z* assembly for " + f.label + " needs eta");
    return f.sign();
}

}  // namespace

ProductValue zstar_second(const LocalData& f, cplx u, cplx v) {
    const double eps = form_sign(f.form);
    return combine({{1.0, zstar_second_part(f, LevelPart::one, u, v)},
                    {-eps, zstar_second_part(f, LevelPart::full, u, v)}});
}

ProductValue zstar_mixed_part(const LocalData& f, const LocalData& g, LevelPart part, cplx u, cplx v) {
    check_region(u, "zstar_mixed");
    check_region(v, "zstar_mixed");
    require(f.form.label != g.form.label, ErrorCode::invalid_argument, "zstar_mixed needs two distinct forms");
    const std::uint64_t N1 = f.form.level, N2 = g.form.level;
    const std::uint64_t Np = part_level(part, N1, N2);
    const std::uint64_t P = std::min(f.P, g.P);
    const std::size_t n = std::min(f.primes.size(), g.primes.size());
    std::vector<std::uint32_t> primes(f.primes.begin(), f.primes.begin() + static_cast<std::ptrdiff_t>(n));
    return absolute_product(primes, P, [&](std::size_t i) -> cplx {
        const std::uint64_t p = primes[i];
        const double lf = f.lambda_p[i], lg = g.lambda_p[i];
        const bool bf = f.bad(i), bg = g.bad(i);
        cplx E = 1.0;
        if (p != 2) {
            const cplx xu = p_pow(p, 0.5 + u), xv = p_pow(p, 0.5 + v);
            const double w = double(p) / double(p + 1);
            const double c1 = bf ? 0.0 : 1.0, c2 = bg ? 0.0 : 1.0;
            const cplx m = 1.0 / ((1.0 - lf * xu + c1 * xu * xu) * (1.0 - lg * xv + c2 * xv * xv));
            const cplx pl = 1.0 / ((1.0 + lf * xu + c1 * xu * xu) * (1.0 + lg * xv + c2 * xv * xv));
            if (!bf && !bg) {
                E = 1.0 + w * (0.5 * m + 0.5 * pl - 1.0);
            } else {
                const double sgn = ord(Np, p) % 2 ? -1.0 : 1.0;
                E = w * (0.5 * m + sgn * 0.5 * pl);
            }
        }
        return E * rankin_local_inverse(lf, bf, lg, bg, p, 1.0 + u + v) * sym2_local_inverse(lf, p, 1.0 + 2.0 * u, bf) *
               sym2_local_inverse(lg, p, 1.0 + 2.0 * v, bg);
    });
}

ProductValue zstar_mixed(const LocalData& f, const LocalData& g, cplx u, cplx v) {
    const double ef = form_sign(f.form), eg = form_sign(g.form);
    return combine({{1.0, zstar_mixed_part(f, g, LevelPart::one, u, v)},
                    {-ef, zstar_mixed_part(f, g, LevelPart::n1, u, v)},
                    {-eg, zstar_mixed_part(f, g, LevelPart::n2, u, v)},
                    {ef * eg, zstar_mixed_part(f, g, LevelPart::full, u, v)}});
}

ProductValue zstar_first_part(const LocalData& f, LevelPart part, cplx u) {
    check_region(u, "zstar_first");
    const std::uint64_t Np = part_level(part, f.form.level, 1);
    return absolute_product(f.primes, f.P, [&](std::size_t i) -> cplx {
        const std::uint64_t p = f.primes[i];
        const double lam = f.lambda_p[i];
        const bool bad = f.bad(i);
        cplx E = 1.0;
        if (p != 2) {
            const cplx x = p_pow(p, 0.5 + u);
            const double w = double(p) / double(p + 1);
            if (!bad) {
                E = 1.0 + w * (0.5 / (1.0 - lam * x + x * x) + 0.5 / (1.0 + lam * x + x * x) - 1.0);
            } else {
                const double sgn = ord(Np, p) % 2 ? -1.0 : 1.0;
                E = w * (0.5 / (1.0 - lam * x) + sgn * 0.5 / (1.0 + lam * x));
            }
        }
        return E * sym2_local_inverse(lam, p, 1.0 + 2.0 * u, bad);
    });
}

ProductValue zstar_first(const LocalData& f, cplx u) {
    const double eps = form_sign(f.form);
    return combine({{1.0, zstar_first_part(f, LevelPart::one, u)}, {-eps, zstar_first_part(f, LevelPart::full, u)}});
}

ProductValue raw_second_series(const LocalData& f, LevelPart part, cplx u, cplx v) {
    const std::uint64_t Np = part_level(part, f.form.level, 1);
    return absolute_product(f.primes, f.P, [&](std::size_t i) -> cplx {
        const std::uint64_t p = f.primes[i];
        if (p == 2) return 1.0;
        const bool bad = f.bad(i);
        const auto L = prime_power_lambdas(f.lambda_p[i], bad, kSeriesTerms);
        const auto xu = powers(p_pow(p, 0.5 + u), kSeriesTerms), xv = powers(p_pow(p, 0.5 + v), kSeriesTerms);
        const int o = ord(Np, p);
        const double w = double(p) / double(p + 1);
        cplx sum = 0.0;
        for (int j = 0; j <= kSeriesTerms; ++j)
            for (int k = 0; k <= kSeriesTerms; ++k) {
                if ((o + j + k) % 2) continue;
                const double weight = (bad || j + k > 0) ? w : 1.0;
                sum += weight * L[j] * L[k] * xu[j] * xv[k];
            }
        return sum;
    });
}

ProductValue normalizer_second(const LocalData& f, cplx u, cplx v) {
    return absolute_product(f.primes, f.P, [&](std::size_t i) -> cplx {
        const std::uint64_t p = f.primes[i];
        const double lam = f.lambda_p[i];
        const bool bad = f.bad(i);
        return 1.0 / ((1.0 - p_pow(p, 1.0 + u + v)) * sym2_local_inverse(lam, p, 1.0 + 2.0 * u, bad) *
                      sym2_local_inverse(lam, p, 1.0 + u + v, bad) * sym2_local_inverse(lam, p, 1.0 + 2.0 * v, bad));
    });
}

ProductValue raw_mixed_series(const LocalData& f, const LocalData& g, LevelPart part, cplx u, cplx v) {
    const std::uint64_t Np = part_level(part, f.form.level, g.form.level);
    const std::size_t n = std::min(f.primes.size(), g.primes.size());
    std::vector<std::uint32_t> primes(f.primes.begin(), f.primes.begin() + static_cast<std::ptrdiff_t>(n));
    return absolute_product(primes, std::min(f.P, g.P), [&](std::size_t i) -> cplx {
        const std::uint64_t p = primes[i];
        if (p == 2) return 1.0;
        const bool bf = f.bad(i), bg = g.bad(i);
        const auto Lf = prime_power_lambdas(f.lambda_p[i], bf, kSeriesTerms);
        const auto Lg = prime_power_lambdas(g.lambda_p[i], bg, kSeriesTerms);
        const auto xu = powers(p_pow(p, 0.5 + u), kSeriesTerms), xv = powers(p_pow(p, 0.5 + v), kSeriesTerms);
        const int o = ord(Np, p);
        const double w = double(p) / double(p + 1);
        cplx sum = 0.0;
        for (int j = 0; j <= kSeriesTerms; ++j)
            for (int k = 0; k <= kSeriesTerms; ++k) {
                if ((o + j + k) % 2) continue;
                const double weight = (bf || bg || j + k > 0) ? w : 1.0;
                sum += weight * Lf[j] * Lg[k] * xu[j] * xv[k];
            }
        return sum;
    });
}

ProductValue normalizer_mixed(const LocalData& f, const LocalData& g, cplx u, cplx v) {
    const std::size_t n = std::min(f.primes.size(), g.primes.size());
    std::vector<std::uint32_t> primes(f.primes.begin(), f.primes.begin() + static_cast<std::ptrdiff_t>(n));
    return absolute_product(primes, std::min(f.P, g.P), [&](std::size_t i) -> cplx {
        const std::uint64_t p = primes[i];
        const double lf = f.lambda_p[i], lg = g.lambda_p[i];
        const bool bf = f.bad(i), bg = g.bad(i);
        return 1.0 / (rankin_local_inverse(lf, bf, lg, bg, p, 1.0 + u + v) *
                      sym2_local_inverse(lf, p, 1.0 + 2.0 * u, bf) * sym2_local_inverse(lg, p, 1.0 + 2.0 * v, bg));
    });
}

ProductValue raw_first_series(const LocalData& f, LevelPart part, cplx u) {
    const std::uint64_t Np = part_level(part, f.form.level, 1);
    return absolute_product(f.primes, f.P, [&](std::size_t i) -> cplx {
        const std::uint64_t p = f.primes[i];
        if (p == 2) return 1.0;
        const bool bad = f.bad(i);
        const auto L = prime_power_lambdas(f.lambda_p[i], bad, kSeriesTerms);
        const auto x = powers(p_pow(p, 0.5 + u), kSeriesTerms);
        const int o = ord(Np, p);
        const double w = double(p) / double(p + 1);
        cplx sum = 0.0;
        for (int j = 0; j <= kSeriesTerms; ++j) {
            if ((o + j) % 2) continue;
            sum += ((bad || j > 0) ? w : 1.0) * L[j] * x[j];
        }
        return sum;
    });
}

ProductValue normalizer_first(const LocalData& f, cplx u) {
    return absolute_product(f.primes, f.P, [&](std::size_t i) -> cplx {
        return 1.0 / sym2_local_inverse(f.lambda_p[i], f.primes[i], 1.0 + 2.0 * u, f.bad(i));
    });
}

PositivityCheck bracket_positivity(const LocalData& f, std::uint64_t limit) {
    PositivityCheck out;
    out.smallest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.primes.size() && f.primes[i] <= limit; ++i) {
        const double p = f.primes[i], t = f.lambda_p[i] / std::sqrt(p);
        for (double sgn : {-1.0, 1.0}) {
            const double b = f.bad(i) ? 1.0 / (1.0 + sgn * t) : 1.0 / (1.0 + sgn * t + 1.0 / p);
            ++out.brackets;
            out.smallest = std::min(out.smallest, b);
            if (!(b > 0.0)) out.all_positive = false;
        }
    }
    return out;
}

double ConstantReport::component(const std::string& key) const {
    for (const auto& [k, v] : components)
        if (k == key) return v;
    fail(ErrorCode::internal, "constant report '" + name + "' has no component " + key);
}

std::string ConstantReport::to_text() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "report = " << name << "\n";
    os << "prime_limit = " << prime_limit << "\n";
    os << "value = " << value << "\n";
    os << "tail_bound = " << tail_bound << "\n";
    os << "degenerate = " << (degenerate ? "true" : "false") << "\n";
    for (const auto& [k, v] : components) os << k << " = " << v << "\n";
    return os.str();
}

bool degenerate_form(const FormSpec& f) { return f.eta_known() && f.sign() == 1 && is_perfect_square(f.level); }

namespace {

constexpr double kZstarStep = 1e-3;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

ConstantReport constants_second(const LocalData& f, const BumpSpec& bump) {
    const Sym2Value sym = sym2_L(f, 1.0);
    const ProductValue z1 = zstar_second_part(f, LevelPart::one, 0.0, 0.0);
    const ProductValue zn = zstar_second_part(f, LevelPart::full, 0.0, 0.0);
    const ProductValue z = zstar_second(f, 0.0, 0.0);
    const double zu =
        richardson_derivative([&](double h) { return zstar_second(f, h, 0.0).value; }, kZstarStep).real();
    const double F1 = mellin_F(1.0, bump).real();
    const double Fp = mellin_F_log_moment(bump);
    const double psi = digamma(0.5 * f.form.kappa);
    const double logN = std::log(std::sqrt(double(f.form.level)) / (2.0 * kPi));
    const double zval = z.value.real();

    ConstantReport r;
    r.name = "second:" + f.form.label;
    r.prime_limit = f.P;
    r.degenerate = zval == 0.0;
    const double C2 = r.degenerate ? kNaN : psi + logN + kEulerGamma + 3.0 * sym.log_derivative + zu / zval + Fp / F1;
    r.value = C2;
    r.tail_bound = z.tail_bound;
    r.components = {
        {"L(1,sym2f)", sym.value},
        {"L(1,sym2f).tail", sym.tail_bound},
        {"L'/L(1,sym2f)", sym.log_derivative},
        {"L'/L(1,sym2f).error", sym.log_derivative_error},
        {"Z*(0,0)", zval},
        {"Z*(0,0).tail", z.tail_bound},
        {"Z*_1(0,0)", z1.value.real()},
        {"Z*_N(0,0)", zn.value.real()},
        {"Z*.fitted_C", z.fitted_C},
        {"dZ*/du(0,0)", zu},
        {"F~(1)", F1},
        {"F~'(1)", Fp},
        {"F~'(1)/F~(1)", Fp / F1},
        {"digamma(k/2)", psi},
        {"log(sqrtN/2pi)", logN},
        {"euler_gamma", kEulerGamma},
        {"C2", C2},
        {"leading_coefficient", sym.value * sym.value * sym.value * zval * F1 / (kPi * kPi)},
        {"delta", bump.delta},
    };
    return r;
}

ConstantReport constants_mixed(const LocalData& f, const LocalData& g, const BumpSpec& bump) {
    const Sym2Value sf = sym2_L(f, 1.0);
    const Sym2Value sg = sym2_L(g, 1.0);
    const ProductValue rs = rankin_L1(f, g);
    const ProductValue z = zstar_mixed(f, g, 0.0, 0.0);
    const double F1 = mellin_F(1.0, bump).real();
    const double zval = z.value.real();
    const double C = sf.value * sg.value * rs.value.real() * zval * F1 / (2.0 * kPi * kPi);

    ConstantReport r;
    r.name = "mixed:" + f.form.label + "x" + g.form.label;
    r.prime_limit = std::min(f.P, g.P);
    r.degenerate = zval == 0.0;
    r.value = C;
    r.tail_bound = z.tail_bound;
    r.components = {
        {"L(1,sym2f)", sf.value},
        {"L(1,sym2f).tail", sf.tail_bound},
        {"L(1,sym2g)", sg.value},
        {"L(1,sym2g).tail", sg.tail_bound},
        {"L(1,fxg)", rs.value.real()},
        {"L(1,fxg).uncertainty", rs.tail_bound},
        {"Z*(0,0)", zval},
        {"Z*(0,0).tail", z.tail_bound},
        {"Z*.fitted_C", z.fitted_C},
        {"F~(1)", F1},
        {"C(f,g)", C},
        {"delta", bump.delta},
    };
    return r;
}

ConstantReport constants_first(const LocalData& f, const BumpSpec& bump) {
    const Sym2Value sym = sym2_L(f, 1.0);
    const ProductValue z1 = zstar_first_part(f, LevelPart::one, 0.0);
    const ProductValue zn = zstar_first_part(f, LevelPart::full, 0.0);
    const ProductValue z = zstar_first(f, 0.0);
    const double zp = richardson_derivative([&](double h) { return zstar_first(f, h).value; }, kZstarStep).real();
    const double F1 = mellin_F(1.0, bump).real();
    const double zval = z.value.real();
    const double C3 = F1 / (2.0 * kPi * kPi) * sym.value * zval;
    const double N = double(f.form.level);
    const double lower = N > std::exp(1.0) ? 1e-3 * std::log(std::log(N)) / std::sqrt(std::log(N)) : kNaN;

    ConstantReport r;
    r.name = "first:" + f.form.label;
    r.prime_limit = f.P;
    r.degenerate = zval == 0.0;
    r.value = C3;
    r.tail_bound = z.tail_bound;
    r.components = {
        {"L(1,sym2f)", sym.value},
        {"L(1,sym2f).tail", sym.tail_bound},
        {"L'/L(1,sym2f)", sym.log_derivative},
        {"Z*(0)", zval},
        {"Z*(0).tail", z.tail_bound},
        {"Z*_1(0)", z1.value.real()},
        {"Z*_N(0)", zn.value.real()},
        {"Z*.fitted_C", z.fitted_C},
        {"Z*'(0)", zp},
        {"Z*'(0)/Z*(0)", r.degenerate ? kNaN : zp / zval},
        {"Z*(0).lower_bound", lower},
        {"F~(1)", F1},
        {"C3", C3},
        {"delta", bump.delta},
    };
    return r;
}

}  // namespace twistlab
