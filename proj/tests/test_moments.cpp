#include <doctest.h>

#include <json.hpp>
#include <set>

#include "support.hpp"
#include "twistlab/arith.hpp"
#include "twistlab/error.hpp"
#include "twistlab/moments.hpp"

using namespace twistlab;

namespace {

// Members straight from the definition: odd squarefree d, coprime to every
// level, F(8d/X) > 0, root number -1 for every form.
std::vector<std::uint64_t> family_oracle(const std::vector<FormSpec>& forms, double X, const BumpSpec& b) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 1; 8 * d < X; d += 2) {
        if (mobius(d) == 0) continue;
        bool ok = bump_F(8.0 * d / X, b) > 0.0;
        for (const auto& f : forms) {
            ok = ok && f.level % 2 != 0 && gcd_u64(d, f.level) == 1;
            ok = ok && f.i_pow_kappa() * f.eta * kronecker(std::int64_t(8 * d), std::int64_t(f.level)) == -1;
        }
        if (ok) out.push_back(d);
    }
    return out;
}

}  // namespace

TEST_CASE("moment kinds parse") {
    CHECK(parse_moment_kind("second") == MomentKind::second);
    CHECK(parse_moment_kind("mixed") == MomentKind::mixed);
    CHECK(parse_moment_kind("first") == MomentKind::first);
    CHECK(std::string(to_string(MomentKind::first)) == "first");
    CHECK_THROWS_AS(parse_moment_kind("third"), Error);
}

TEST_CASE("family membership against the definition") {
    const BumpSpec b{};
    for (const auto& forms : std::vector<std::vector<FormSpec>>{
             {tw_test::form("11a")}, {tw_test::form("37a")}, {tw_test::form("11a"), tw_test::form("19a")}}) {
        const TwistFamily fam = enumerate_family(forms, 20000.0, b);
        CHECK(fam.d == family_oracle(forms, 20000.0, b));
        for (std::size_t i = 0; i < fam.size(); ++i) CHECK(fam.weight[i] == bump_F(8.0 * fam.d[i] / 20000.0, b));
    }
}

TEST_CASE("family density is roughly the local proportion") {
    // odd squarefree d coprime to 11 with chi_8d(11) fixed: about (4/pi^2)(11/12)(1/2) of d < X/8.
    const double X = 80000.0;
    const TwistFamily fam = enumerate_family({tw_test::form("11a")}, X, BumpSpec{0.01});
    const double expected = (4.0 / (kPi * kPi)) * (11.0 / 12.0) * 0.5 * (X / 8.0);
    CHECK(double(fam.size()) == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("degenerate families are empty") {
    const TwistFamily fam = enumerate_family({tw_test::form("49a")}, 1e4, BumpSpec{});
    CHECK(fam.degenerate);
    CHECK(fam.size() == 0);
    CHECK_THROWS_AS(enumerate_family({find_form("11a")}, 1e4, BumpSpec{}), Error);
    CHECK_THROWS_AS(enumerate_family({tw_test::form("11a"), tw_test::form("11a")}, 1e4, BumpSpec{}), Error);
}

TEST_CASE("sampling is deterministic and reweighted") {
    const FormSpec f = tw_test::form("11a");
    const TwistFamily all = enumerate_family({f}, 40000.0, BumpSpec{});
    const TwistFamily half = enumerate_family({f}, 40000.0, BumpSpec{}, SampleSpec{0.5, 9});
    const TwistFamily again = enumerate_family({f}, 40000.0, BumpSpec{}, SampleSpec{0.5, 9});
    CHECK(half.d == again.d);
    CHECK(double(half.size()) == doctest::Approx(0.5 * all.size()).epsilon(0.15));
    const std::set<std::uint64_t> full(all.d.begin(), all.d.end());
    for (std::size_t i = 0; i < half.size(); ++i) {
        CHECK(full.count(half.d[i]) == 1);
        CHECK(half.weight[i] == bump_F(8.0 * half.d[i] / 40000.0, BumpSpec{}) / 0.5);
    }
}

TEST_CASE("empirical moment is independent of thread count and memo") {
    const FormSpec f = tw_test::form("11a");
    const double X = 3000.0;
    const TwistFamily fam = enumerate_family({f}, X, BumpSpec{});
    const auto t = tw_test::session().coefficients(f, required_coefficients(f, X));
    EmpiricalOptions one;
    const auto a = empirical_moment(MomentKind::second, fam, {t.get()}, one);
    EmpiricalOptions three;
    three.threads = 3;
    const auto b = empirical_moment(MomentKind::second, fam, {t.get()}, three);
    CHECK(a.value == b.value);
    CHECK(a.evaluated == fam.size());
    LprimeMemo memo;
    three.memo = &memo;
    const auto c = empirical_moment(MomentKind::second, fam, {t.get()}, three);
    const auto d = empirical_moment(MomentKind::second, fam, {t.get()}, three);
    CHECK(c.value == a.value);
    CHECK(d.value == a.value);
    CHECK(d.memo_hits == fam.size());
    const auto first = empirical_moment(MomentKind::first, fam, {t.get()}, one);
    CHECK(first.value > 0.0);
}

TEST_CASE("short tables fail per member, or abort with fail-fast") {
    const FormSpec f = tw_test::form("11a");
    const TwistFamily fam = enumerate_family({f}, 3000.0, BumpSpec{});
    const auto t = sieve_coefficients(f, 2000);
    EmpiricalOptions skip;
    const auto r = empirical_moment(MomentKind::first, fam, {t.get()}, skip);
    CHECK(r.failures.size() > 0);
    CHECK(r.evaluated + r.failures.size() == fam.size());
    EmpiricalOptions fast;
    fast.policy = FailurePolicy::fail_fast;
    CHECK_THROWS_AS(empirical_moment(MomentKind::first, fam, {t.get()}, fast), Error);
}

TEST_CASE("predictions") {
    ConstantReport c;
    c.value = 2.0;
    c.components = {{"leading_coefficient", 2.0}, {"C2", -1.5}};
    const double X = 1e4, lx = std::log(X);
    const SecondPrediction p = predicted_second(c, X);
    CHECK(p.leading == doctest::Approx(2.0 * X * lx * lx * lx / 3.0));
    CHECK(p.with_secondary == doctest::Approx(2.0 * X * (lx * lx * lx / 3.0 - 1.5 * lx * lx)));
    c.degenerate = true;
    CHECK(predicted_second(c, X).leading == 0.0);
    CHECK(predicted_mixed(c, X) == 0.0);
}

TEST_CASE("experiment reports are reproducible and schema-stable") {
    ExperimentConfig cfg;
    cfg.prime_limit = 20000;
    cfg.threads = 2;
    const std::vector<FormSpec> forms{tw_test::form("19a")};
    const std::vector<double> grid{2000.0, 4000.0};
    auto provider = [](const FormSpec& f, std::uint64_t n) { return tw_test::session().coefficients(f, n); };
    const auto a = run_experiment(MomentKind::second, forms, grid, cfg, provider);
    const auto b = run_experiment(MomentKind::second, forms, grid, cfg, provider);
    cfg.threads = 1;
    const auto c = run_experiment(MomentKind::second, forms, grid, cfg, provider);
    REQUIRE(a.size() == 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(to_json(a[i], false) == to_json(b[i], false));
        CHECK(a[i].empirical == c[i].empirical);
        CHECK(to_csv_row(a[i]) == to_csv_row(b[i]));
    }
    const auto j = nlohmann::json::parse(to_json(a[1]));
    for (const char* key : {"kind", "forms", "X", "empirical", "predicted_leading", "predicted_with_secondary", "ratio",
                            "family_size", "degenerate", "constants", "provenance"})
        CHECK(j.contains(key));
    for (const char* key : {"runtime_seconds", "threads", "delta", "prime_limit", "n_max", "cache_hits", "sample_rate",
                            "sample_seed", "coefficient_version"})
        CHECK(j["provenance"].contains(key));
    CHECK_FALSE(nlohmann::json::parse(to_json(a[1], false))["provenance"].contains("runtime_seconds"));
    CHECK(csv_header() == "X,empirical,predicted_leading,predicted_with_secondary,ratio,family_size");
    CHECK(a[1].ratio_change.has_value());
}

TEST_CASE("degenerate experiment is exactly zero") {
    ExperimentConfig cfg;
    const auto r = run_experiment(MomentKind::first, {tw_test::form("49a")}, {1e4}, cfg,
                                  [](const FormSpec& f, std::uint64_t n) { return tw_test::session().coefficients(f, n); });
    REQUIRE(r.size() == 1);
    CHECK(r[0].degenerate);
    CHECK(r[0].empirical == 0.0);
    CHECK(r[0].predicted_leading == 0.0);
    CHECK(r[0].family_size == 0);
    CHECK_FALSE(r[0].ratio.has_value());
}
