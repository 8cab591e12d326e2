#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "twistlab/session.hpp"

namespace tw_test {

// One session for the whole test binary so eta inference and tables are shared.
inline twistlab::Session& session() {
    static twistlab::Session s([] {
        twistlab::SessionOptions o;
        o.threads = 1;
        o.cache_dir = twistlab::cache_dir_from_env();
        return o;
    }());
    return s;
}

inline twistlab::FormSpec form(const std::string& label) { return session().resolve(label); }

// #E(F_p): enumeration of (x, y) for p = 2, otherwise 1 + sum_x (1 + (disc_x / p))
// with the Legendre symbol from Euler's criterion.
inline std::int64_t count_points_oracle(const twistlab::Curve& e, std::int64_t p) {
    auto md = [p](std::int64_t v) { return ((v % p) + p) % p; };
    auto rhs = [&](std::int64_t x) { return md(md(md(x * x) * x) + md(e.a2 * md(x * x)) + md(e.a4 * x) + e.a6); };
    std::int64_t count = 1;
    if (p == 2) {
        for (std::int64_t x = 0; x < 2; ++x)
            for (std::int64_t y = 0; y < 2; ++y)
                if (md(y * y + e.a1 * x * y + e.a3 * y) == rhs(x)) ++count;
        return count;
    }
    auto power = [p](std::int64_t b, std::int64_t k) {
        std::int64_t r = 1;
        b %= p;
        for (; k > 0; k >>= 1, b = b * b % p)
            if (k & 1) r = r * b % p;
        return r;
    };
    for (std::int64_t x = 0; x < p; ++x) {
        const std::int64_t b = md(e.a1 * x + e.a3);
        const std::int64_t disc = md(b * b + 4 * rhs(x));
        if (disc == 0)
            count += 1;
        else
            count += power(disc, (p - 1) / 2) == 1 ? 2 : 0;
    }
    return count;
}

inline bool is_prime_oracle(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q = 2; q * q <= n; ++q)
        if (n % q == 0) return false;
    return true;
}

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
    return s * h / 3.0;
}

// tau(n) for n <= n_max from q prod (1 - q^n)^24, expanded in integers.
inline std::vector<__int128> tau_by_q_expansion(std::size_t n_max) {
    std::vector<__int128> c(n_max, 0);  // coefficients of prod (1 - q^n)^24 up to q^(n_max-1)
    c[0] = 1;
    for (std::size_t n = 1; n < n_max; ++n)
        for (int r = 0; r < 24; ++r)
            for (std::size_t j = n_max - 1; j >= n; --j) c[j] -= c[j - n];
    std::vector<__int128> tau(n_max + 1, 0);
    for (std::size_t n = 1; n <= n_max; ++n) tau[n] = c[n - 1];
    return tau;
}

// Integer coefficients from prod_p (1 - a_p p^-s + 1_{p good} p^(1-2s))^-1,
// with a_p from counting points by enumeration.
inline std::vector<std::int64_t> euler_expansion(const twistlab::FormSpec& f, std::uint64_t n_max) {
    std::vector<std::int64_t> a(n_max + 1, 0);
    a[1] = 1;
    for (std::uint64_t p = 2; p <= n_max; ++p) {
        if (!is_prime_oracle(p)) continue;
        const std::int64_t ap = std::int64_t(p) + 1 - count_points_oracle(f.curve, std::int64_t(p));
        const bool good = f.level % p != 0;
        // a(p^k) by the Hecke recursion, then multiply into every n coprime to p.
        std::vector<std::int64_t> pk{1, ap};
        std::uint64_t q = p;
        while (q <= n_max / p) {
            q *= p;
            const std::size_t k = pk.size();
            pk.push_back(ap * pk[k - 1] - (good ? std::int64_t(p) * pk[k - 2] : 0));
        }
        for (std::uint64_t m = n_max / p; m >= 1; --m) {
            if (m % p == 0 || a[m] == 0) continue;
            std::uint64_t n = m * p;
            for (std::size_t k = 1; k < pk.size() && n <= n_max; ++k, n *= p) {
                a[n] = a[m] * pk[k];
                if (n > n_max / p) break;
            }
        }
    }
    return a;
}

}  // namespace tw_test
