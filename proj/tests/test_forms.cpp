#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "twistlab/arith.hpp"
#include "twistlab/error.hpp"
#include "twistlab/forms.hpp"

using namespace twistlab;


TEST_CASE("registry") {
    CHECK(registry().size() == 5);
    CHECK(find_form("11a").level == 11);
    CHECK(find_form("Delta").kappa == 12);
    CHECK_THROWS_AS(find_form("nope"), Error);
    try {
        find_form("nope");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unknown_form);
    }
}

TEST_CASE("curves have the registered conductor's bad primes") {
    for (const auto& f : registry()) {
        if (f.source != SourceKind::elliptic) continue;
        const std::int64_t disc = f.curve.discriminant();
        CHECK(disc != 0);
        for (std::uint64_t p = 2; p < 100; ++p)
            if (tw_test::is_prime_oracle(p) && f.level % p == 0) CHECK(disc % std::int64_t(p) == 0);
    }
}

TEST_CASE("point counting: naive and BSGS against enumeration") {
    for (const char* label : {"11a", "19a", "37a", "49a"}) {
        const FormSpec f = find_form(label);
        for (std::uint64_t p = 2; p < 400; ++p) {
            if (!tw_test::is_prime_oracle(p)) continue;
            const std::int64_t oracle = std::int64_t(p) + 1 - tw_test::count_points_oracle(f.curve, std::int64_t(p));
            CHECK(ap_naive(f.curve, p) == oracle);
            CHECK(ap_integer(f.curve, p) == oracle);
        }
    }
}

TEST_CASE("BSGS against point counting") {
    for (const char* label : {"11a", "19a", "37a", "49a"}) {
        const FormSpec f = find_form(label);
        const PrimeTable t = sieve(4000);
        for (std::uint32_t p : t.primes())
            if (p > 229 && f.level % p != 0)
                CHECK(ap_bsgs(f.curve, p) == std::int64_t(p) + 1 - tw_test::count_points_oracle(f.curve, p));
    }
}

TEST_CASE("BSGS against naive counting at larger primes, within the Hasse bound") {
    const FormSpec f = find_form("37a");
    const PrimeTable t = sieve(30000);
    for (std::uint32_t p : t.primes()) {
        if (p < 20000 || p % 7 != 1) continue;
        const std::int64_t a = ap_bsgs(f.curve, p);
        CHECK(a == ap_naive(f.curve, p));
        CHECK(double(a * a) <= 4.0 * p);
    }
}

TEST_CASE("tau from the q-expansion") {
    const auto oracle = tw_test::tau_by_q_expansion(300);
    const auto tau = tau_table(300);
    CHECK(tau[1] == 1);
    CHECK(tau[2] == -24);
    CHECK(tau[3] == 252);
    for (std::size_t n = 1; n <= 300; ++n) CHECK(tau[n] == oracle[n]);
}

TEST_CASE("tau is multiplicative with the Hecke recursion at prime powers") {
    const auto tau = tau_table(kDeltaCap);
    for (std::uint64_t m = 2; m <= 100; ++m)
        for (std::uint64_t n = 2; m * n <= kDeltaCap; ++n)
            if (gcd_u64(m, n) == 1) CHECK(tau[m * n] == tau[m] * tau[n]);
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull}) {
        __int128 p11 = 1;
        for (int i = 0; i < 11; ++i) p11 *= p;
        for (std::uint64_t q = p * p; q <= kDeltaCap; q *= p) CHECK(tau[q] == tau[p] * tau[q / p] - p11 * tau[q / p / p]);
    }
}

TEST_CASE("Delta table normalization and cap") {
    const auto t = sieve_coefficients(find_form("Delta"), 1000);
    const auto tau = tau_table(1000);
    for (std::uint64_t n = 1; n <= 1000; ++n)
        CHECK(std::abs(t->lambda[n] - double(tau[n]) / std::pow(double(n), 5.5)) < 1e-12);
    CHECK_THROWS_AS(sieve_coefficients(find_form("Delta"), kDeltaCap + 1), Error);
}

TEST_CASE("11a table matches the Euler-product expansion exactly") {
    const FormSpec f = find_form("11a");
    const auto oracle = tw_test::euler_expansion(f, 10000);
    const auto a = elliptic_coefficients(f, 10000, 1);
    const auto t = sieve_coefficients(f, 10000);
    for (std::uint64_t n = 1; n <= 10000; ++n) {
        INFO("n=" << n);
        CHECK(a[n] == oracle[n]);
        CHECK(t->lambda[n] == double(oracle[n]) / std::sqrt(double(n)));
    }
}

TEST_CASE("threaded sieve is identical to the serial sieve") {
    const FormSpec f = find_form("19a");
    const auto a1 = elliptic_coefficients(f, 50000, 1);
    const auto a3 = elliptic_coefficients(f, 50000, 3);
    CHECK(a1 == a3);
}

TEST_CASE("coefficient cache round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "twistlab-test-cache";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const FormSpec f = find_form("37a");
    SieveOptions o;
    o.cache_dir = dir.string();
    const auto t = sieve_coefficients(f, 5000, o);
    CHECK_FALSE(t->from_cache);
    write_cache(dir.string(), *t);
    const auto r = read_cache(dir.string(), f, 5000);
    REQUIRE(r);
    CHECK(r->from_cache);
    CHECK(r->lambda == t->lambda);
    const auto again = sieve_coefficients(f, 5000, o);
    CHECK(again->from_cache);

    // Truncated file is rejected rather than trusted.
    const fs::path p = dir / cache_file_name("37a", 5000);
    fs::resize_file(p, fs::file_size(p) - 8);
    CHECK_FALSE(read_cache(dir.string(), f, 5000));
    fs::remove_all(dir);
}

TEST_CASE("memory budget is enforced") {
    SieveOptions o;
    o.memory_budget = 1000;
    try {
        sieve_coefficients(find_form("11a"), 100000, o);
        FAIL("expected a resource error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::resource);
    }
}
