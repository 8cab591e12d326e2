#include <doctest.h>

#include <numeric>
#include <random>

#include "support.hpp"
#include "twistlab/arith.hpp"
#include "twistlab/error.hpp"

using namespace twistlab;

namespace {

// Legendre symbol by listing the nonzero squares mod p.
int legendre_by_squares(std::int64_t a, std::int64_t p) {
    const std::int64_t r = ((a % p) + p) % p;
    if (r == 0) return 0;
    for (std::int64_t x = 1; x < p; ++x)
        if (x * x % p == r) return 1;
    return -1;
}

// Kronecker symbol from its multiplicative definition in the bottom argument.
int kronecker_oracle(std::int64_t a, std::int64_t n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int sign = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) sign = -1;
    }
    for (std::int64_t q = 2; n > 1; ++q) {
        while (n % q == 0) {
            n /= q;
            if (q == 2) {
                if (a % 2 == 0) return 0;
                const std::int64_t r = ((a % 8) + 8) % 8;
                sign *= (r == 1 || r == 7) ? 1 : -1;
            } else {
                sign *= legendre_by_squares(a, q);
            }
        }
    }
    return sign;
}

int mobius_oracle(std::uint64_t n) {
    int m = 1;
    for (std::uint64_t q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            n /= q;
            if (n % q == 0) return 0;
            m = -m;
        }
    return n > 1 ? -m : m;
}

}  // namespace

TEST_CASE("kronecker agrees with residue enumeration") {
    for (std::int64_t a = -60; a <= 60; ++a)
        for (std::int64_t n = -60; n <= 60; ++n) {
            if (a == 0 && n == 0) continue;
            INFO("a=" << a << " n=" << n);
            CHECK(kronecker(a, n) == kronecker_oracle(a, n));
        }
}

TEST_CASE("kronecker with the discriminants used for twists") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t d = 2 * std::int64_t(rng() % 5000) + 1;
        const std::int64_t n = std::int64_t(rng() % 3000) + 1;
        CHECK(kronecker(8 * d, n) == kronecker_oracle(8 * d, n));
    }
}

TEST_CASE("prime table") {
    const PrimeTable t = sieve(100000);
    CHECK(t.primes().size() == 9592);
    for (std::uint64_t n = 0; n <= 5000; ++n) CHECK(t.is_prime(n) == tw_test::is_prime_oracle(n));
    CHECK(t.prime_count_upto(1000) == 168);
    for (std::uint64_t n : {2ull, 97ull, 1001ull, 65536ull, 99991ull, 99999ull}) {
        const Factorization f = t.factor(n);
        CHECK(f.product() == n);
        for (const auto& pp : f.factors) CHECK(tw_test::is_prime_oracle(pp.p));
    }
}

TEST_CASE("factorization above the table and by trial division") {
    const PrimeTable t = sieve(1000);
    for (std::uint64_t n : {1000003ull, 2ull * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23ull, 999983ull * 999979ull}) {
        CHECK(t.factor(n).product() == n);
        CHECK(factor_trial(n).product() == n);
    }
    const Factorization f = factor_trial(2 * 2 * 2 * 9 * 5);
    CHECK(f.order(2) == 3);
    CHECK(f.order(3) == 2);
    CHECK(f.order(7) == 0);
}

TEST_CASE("mobius and squarefree") {
    for (std::uint64_t n = 1; n <= 20000; ++n) {
        CHECK(mobius(n) == mobius_oracle(n));
        CHECK(is_squarefree(n) == (mobius_oracle(n) != 0));
    }
    std::size_t odd_sf = 0;
    for (std::uint64_t n = 1; n <= 10000; n += 2)
        if (is_squarefree(n)) ++odd_sf;
    std::size_t oracle = 0;
    for (std::uint64_t n = 1; n <= 10000; n += 2) {
        bool sf = true;
        for (std::uint64_t q = 3; q * q <= n; q += 2)
            if (n % (q * q) == 0) sf = false;
        oracle += sf;
    }
    CHECK(odd_sf == oracle);
}

TEST_CASE("gcd and perfect squares") {
    for (std::uint64_t a = 0; a < 200; ++a)
        for (std::uint64_t b = 0; b < 200; ++b) CHECK(gcd_u64(a, b) == std::gcd(a, b));
    for (std::uint64_t r = 0; r < 3000; ++r) {
        CHECK(is_perfect_square(r * r));
        if (r > 1) CHECK_FALSE(is_perfect_square(r * r + 1));
    }
    CHECK(is_perfect_square(4294967295ull * 4294967295ull));
    CHECK_FALSE(is_perfect_square(4294967295ull * 4294967295ull - 1));
}
