#include <doctest.h>

#include <json.hpp>

#include "support.hpp"
#include "twistlab/arith.hpp"
#include "twistlab/verify.hpp"

using namespace twistlab;

TEST_CASE("Gauss sums: explicit formula against the definition") {
    for (std::uint64_t n = 1; n < 200; n += 2)
        for (std::int64_t k = -12; k <= 12; ++k) {
            INFO("n=" << n << " k=" << k);
            CHECK(std::abs(gauss_explicit(k, n) - gauss_bruteforce(k, n)) < 1e-9);
        }
}

TEST_CASE("Gauss sums: size for squarefree n coprime to k") {
    for (std::uint64_t n : {3ull, 15ull, 105ull, 231ull})
        for (std::int64_t k : {1, 2, 4, -1, 8})
            if (gcd_u64(std::uint64_t(std::abs(k)), n) == 1) CHECK(std::abs(gauss_explicit(k, n)) == doctest::Approx(std::sqrt(double(n))).epsilon(1e-12));
}

TEST_CASE("Fourier transform of the bump against Simpson") {
    const BumpSpec b = poisson_test_bump();
    for (double y : {0.0, 0.3, 1.0, 2.5, 6.0}) {
        const double s = tw_test::simpson([&](double x) { return (std::cos(2 * kPi * x * y) + std::sin(2 * kPi * x * y)) * bump_F(x, b); }, 0.0, 1.0, 40000);
        CHECK(std::abs(fourier_cs(y, b) - s) < 1e-10);
    }
}

TEST_CASE("Poisson summation on a few pairs") {
    for (auto [n, Z] : std::vector<std::pair<std::uint64_t, double>>{{1, 50.0}, {9, 80.0}, {15, 120.0}}) {
        const PoissonResult r = verify_poisson(n, Z, poisson_test_bump());
        CHECK(r.discrepancy < 1e-8);
        CHECK(r.truncation < 1e-8);
    }
    const auto pairs = default_poisson_pairs();
    CHECK(pairs.size() == 25);
    for (std::uint64_t n : {1ull, 9ull, 15ull, 105ull})
        CHECK(std::any_of(pairs.begin(), pairs.end(), [n](const auto& p) { return p.first == n; }));
}

TEST_CASE("suite verdict formatting") {
    const SuiteResult r = run_gauss_suite(45, 5, 2);
    CHECK(r.passed());
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["passed"] == true);
    CHECK(j["verdicts"].size() == r.verdicts.size());
    CHECK(r.to_text().find("PASS") != std::string::npos);
}

TEST_CASE("AFE suite on 37a") {
    const FormSpec f = tw_test::form("37a");
    AfeSuiteOptions o;
    o.twists = 12;
    o.d_limit = 400;
    const auto t = tw_test::session().coefficients(f, 200000);
    const SuiteResult r = run_afe_suite(f, *t, o);
    CHECK(r.passed());
}
