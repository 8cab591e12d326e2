#include <doctest.h>

#include <random>

#include "support.hpp"
#include "twistlab/arith.hpp"
#include "twistlab/error.hpp"
#include "twistlab/lfunc.hpp"

using namespace twistlab;

namespace {

// Classical rank-0/1 series for a weight-2 newform twisted by chi_D:
//   L(1/2)  = 2 sum a_n chi(n)/n exp(-2 pi n / (D sqrt N))        (w = +1)
//   L'(1/2) = 2 sum a_n chi(n)/n E1(2 pi n / (D sqrt N))          (w = -1)
double series_oracle(const CoefficientTable& t, std::uint64_t D, bool derivative) {
    const double scale = 2.0 * kPi / (double(D) * std::sqrt(double(t.form.level)));
    double s = 0.0;
    for (std::uint64_t n = 1; n <= t.n_max; ++n) {
        const double y = scale * double(n);
        if (y > 40.0) break;
        const int chi = D == 1 ? 1 : kronecker(std::int64_t(D), std::int64_t(n));
        if (chi == 0) continue;
        const double w = derivative ? -std::expint(-y) : std::exp(-y);
        s += chi * t.lambda[n] / std::sqrt(double(n)) * w;
    }
    return 2.0 * s;
}

}  // namespace

TEST_CASE("admissibility and root numbers") {
    const FormSpec f = tw_test::form("11a");
    CHECK_THROWS_AS(check_admissible(f, 2), Error);
    CHECK_THROWS_AS(check_admissible(f, 9), Error);
    CHECK_THROWS_AS(check_admissible(f, 33), Error);
    CHECK_NOTHROW(check_admissible(f, 15));
    for (std::uint64_t d : admissible_d(f, 1, 40))
        CHECK(root_number(f, d) == f.i_pow_kappa() * f.eta * kronecker(std::int64_t(8 * d), std::int64_t(f.level)));
    FormSpec unknown = find_form("11a");
    CHECK_THROWS_AS(root_number(unknown, 3), Error);
    const TwistPoint u = make_untwisted(f);
    CHECK(u.D == 1);
    CHECK(u.w == f.sign());
}

TEST_CASE("eta inference matches the sign of the functional equation") {
    // L'(1/2) of 37a is the first rank-one example: w = -1 there, +1 for the others.
    CHECK(tw_test::form("37a").sign() == -1);
    for (const char* l : {"11a", "19a", "49a"}) CHECK(tw_test::form(l).sign() == 1);
    CHECK(tw_test::form("Delta").sign() == 1);
    for (const char* l : {"11a", "19a", "37a", "49a", "Delta"}) {
        const auto& inf = tw_test::session().eta_inference(l);
        CHECK(inf.worst_plus < 1e-10);
        CHECK(inf.worst_other > 1e-4);
    }
}

TEST_CASE("weight-2 AFE at Z = 1 agrees with the classical series") {
    for (const char* label : {"11a", "19a", "37a"}) {
        const FormSpec f = tw_test::form(label);
        const auto t = tw_test::session().coefficients(f, 200000);
        for (std::uint64_t d : admissible_d(f, 1, 25)) {
            const TwistPoint pt = make_twist(f, d);
            const bool deriv = pt.w == -1;
            const AfeEvaluator ev(f, 1.0, deriv ? CutoffKind::derivative : CutoffKind::value);
            if (ev.required_length(pt.D) > t->n_max) continue;
            const AfeValue v = ev.evaluate(pt, *t);
            INFO(label << " d=" << d << " w=" << pt.w);
            CHECK(std::abs(v.value - series_oracle(*t, pt.D, deriv)) < 1e-10);
        }
        const TwistPoint u = make_untwisted(f);
        const bool deriv = u.w == -1;
        const AfeValue v = AfeEvaluator(f, 1.0, deriv ? CutoffKind::derivative : CutoffKind::value).evaluate(u, *t);
        CHECK(std::abs(v.value - series_oracle(*t, 1, deriv)) < 1e-12);
    }
}

TEST_CASE("L'(1/2) of 37a is positive") {
    const FormSpec f = tw_test::form("37a");
    LValueRequest req;
    req.derivative = true;
    req.check_z_invariance = true;
    const LValueResult r = tw_test::session().lvalue("37a", 1, req);
    CHECK(r.untwisted);
    CHECK(r.value > 0.0);
    CHECK(r.z_difference < 1e-12);
}

TEST_CASE("Z-invariance of L'(1/2) on w = -1 twists") {
    std::mt19937_64 rng(5);
    for (const char* label : {"11a", "19a", "37a"}) {
        const FormSpec f = tw_test::form(label);
        const auto t = tw_test::session().coefficients(f, 200000);
        const AfeEvaluator a(f, 1.0, CutoffKind::derivative), b(f, probe_Z(f), CutoffKind::derivative),
            c(f, 0.7, CutoffKind::derivative);
        int done = 0;
        for (std::uint64_t d : admissible_d(f, 1, 200)) {
            const TwistPoint pt = make_twist(f, d);
            if (pt.w != -1 || rng() % 3 != 0) continue;
            if (std::max({a.required_length(pt.D), b.required_length(pt.D), c.required_length(pt.D)}) > t->n_max) break;
            const double va = a.evaluate(pt, *t).value;
            CHECK(std::abs(va - b.evaluate(pt, *t).value) < 1e-9);
            CHECK(std::abs(va - c.evaluate(pt, *t).value) < 1e-9);
            ++done;
        }
        CHECK(done >= 10);
    }
}

TEST_CASE("annihilation on w = +1 twists and vanishing L(1/2) on w = -1 twists") {
    const FormSpec f = tw_test::form("19a");
    const auto t = tw_test::session().coefficients(f, 200000);
    for (std::uint64_t d : admissible_d(f, 1, 60)) {
        const TwistPoint pt = make_twist(f, d);
        const double Z = probe_Z(f);
        if (AfeEvaluator(f, Z, CutoffKind::value).required_length(pt.D) > t->n_max) break;
        if (pt.w == 1) {
            const AfeValue v = afe_annihilation(pt, Z, *t);
            CHECK(annihilation_holds(v));
            CHECK_THROWS_AS(lprime_central(pt, Z, *t), Error);
        } else {
            CHECK(std::abs(l_central(pt, Z, *t).value) < 1e-9);
            CHECK_THROWS_AS(afe_annihilation(pt, Z, *t), Error);
        }
    }
}

TEST_CASE("short coefficient tables are refused") {
    const FormSpec f = tw_test::form("11a");
    const auto t = sieve_coefficients(f, 100);
    const TwistPoint pt = make_twist(f, 101);
    CHECK_THROWS_AS(AfeEvaluator(f, 1.0, CutoffKind::value).evaluate(pt, *t), Error);
}

TEST_CASE("session lvalue contract") {
    LValueRequest req;
    req.derivative = true;
    try {
        tw_test::session().lvalue("11a", 1, req);
        FAIL("expected a contract error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::contract);
    }
    req.derivative = false;
    const LValueResult r = tw_test::session().lvalue("11a", 1, req);
    CHECK(r.value > 0.0);
    CHECK(std::isfinite(r.value));
}
