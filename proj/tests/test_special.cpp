#include <doctest.h>

#include <random>

#include "support.hpp"
#include "twistlab/error.hpp"
#include "twistlab/numerics.hpp"
#include "twistlab/special.hpp"

using namespace twistlab;

TEST_CASE("log_gamma on the real axis matches lgamma") {
    for (double x = 0.05; x < 60.0; x *= 1.37) CHECK(log_gamma(cplx(x, 0.0)).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
}

TEST_CASE("log_gamma satisfies the recurrence off the axis") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> re(0.1, 20.0), im(-80.0, 80.0);
    for (int i = 0; i < 200; ++i) {
        const cplx z(re(rng), im(rng));
        const cplx lhs = log_gamma(z + 1.0) - log_gamma(z);
        const cplx rhs = std::log(z);
        // Equal modulo 2 pi i.
        CHECK(std::abs(lhs.real() - rhs.real()) < 1e-11);
        const double turns = (lhs.imag() - rhs.imag()) / (2.0 * kPi);
        CHECK(std::abs(turns - std::round(turns)) < 1e-11);
    }
}

TEST_CASE("log_gamma reflection on the critical line") {
    // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
    for (double t : {0.0, 0.5, 3.0, 10.0, 40.0})
        CHECK(2.0 * log_gamma(cplx(0.5, t)).real() == doctest::Approx(std::log(kPi / std::cosh(kPi * t))).epsilon(1e-12));
}

TEST_CASE("digamma against finite differences of lgamma") {
    for (double x : {0.3, 1.0, 2.5, 6.0, 17.0, 120.0}) {
        const double h = 1e-4 * std::max(1.0, x);
        const double fd = (std::lgamma(x + h) - std::lgamma(x - h)) / (2.0 * h);
        CHECK(digamma(x) == doctest::Approx(fd).epsilon(1e-7));
    }
    CHECK(digamma(1.0) == doctest::Approx(-kEulerGamma).epsilon(1e-14));
    // psi(x + 1) = psi(x) + 1/x
    for (double x : {0.7, 3.0, 11.5}) CHECK(digamma(x + 1.0) == doctest::Approx(digamma(x) + 1.0 / x).epsilon(1e-13));
}

TEST_CASE("cutoff paths agree where both converge") {
    for (CutoffKind kind : {CutoffKind::derivative, CutoffKind::value})
        for (int kappa : {2, 12}) {
            CutoffSpec s;
            s.kind = kind;
            s.kappa = kappa;
            s.level = kappa == 2 ? 11.0 : 1.0;
            s.Z = 1.3;
            for (double x : {0.01, 0.05, 0.2, 0.6}) {
                const CutoffEval a = cutoff_W_direct(x, s);
                const CutoffEval b = cutoff_W_residue(x, s);
                INFO("kind=" << int(kind) << " kappa=" << kappa << " x=" << x);
                CHECK(std::abs(a.value - b.value) < 1e-10);
                CHECK(std::abs(a.d1 - b.d1) < 1e-9);
            }
        }
}

TEST_CASE("weight-2 cutoffs in closed form") {
    // kappa = 2, Z = 1: the derivative kernel gives E1(y), the value kernel e^-y,
    // with y = 2 pi x / sqrt N.
    CutoffSpec s;
    s.level = 37.0;
    for (double x : {0.05, 0.5, 1.0, 3.0, 7.0}) {
        const double y = 2.0 * kPi * x / std::sqrt(37.0);
        s.kind = CutoffKind::derivative;
        CHECK(std::abs(cutoff_W(x, s) - (-std::expint(-y))) < 1e-11);
        s.kind = CutoffKind::value;
        CHECK(std::abs(cutoff_W(x, s) - std::exp(-y)) < 1e-11);
    }
}

TEST_CASE("cutoff table reproduces the quadrature") {
    std::mt19937_64 rng(11);
    for (int kappa : {2, 12}) {
        CutoffSpec s;
        s.kappa = kappa;
        s.level = kappa == 2 ? 19.0 : 1.0;
        s.Z = 0.8;
        const auto t = cutoff_table(s);
        CHECK(t->max_sampled_error() <= 1e-10);
        std::uniform_real_distribution<double> lx(std::log(2e-7), std::log(t->x_tail()));
        for (int i = 0; i < 300; ++i) {
            const double x = std::exp(lx(rng));
            CHECK(std::abs((*t)(x) - cutoff_W(x, s)) < 1e-10);
        }
        CHECK((*t)(t->x_tail() * 1.01) == 0.0);
        CHECK(std::abs(cutoff_W(t->x_tail(), s)) < 1e-15);
        CHECK(cutoff_table(s) == t);
    }
}

TEST_CASE("cutoff spec validation") {
    CutoffSpec s;
    s.Z = -1.0;
    CHECK_THROWS_AS(cutoff_W(1.0, s), Error);
    s = {};
    s.kappa = 3;
    CHECK_THROWS_AS(cutoff_W(1.0, s), Error);
    CHECK_THROWS_AS(cutoff_W(0.0, CutoffSpec{}), Error);
}

TEST_CASE("bump and its Mellin transform") {
    const BumpSpec b{0.1};
    CHECK(bump_F(0.0, b) == 0.0);
    CHECK(bump_F(1.0, b) == 0.0);
    CHECK(bump_F(0.5, b) == 1.0);
    CHECK(bump_F(0.1, b) == 1.0);
    CHECK(bump_F(0.05, b) > 0.0);
    CHECK(bump_F(0.05, b) < 1.0);
    CHECK(bump_F(-0.2, b) == 0.0);
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    for (double t = 0.01; t < 1.0; t += 0.01) CHECK(smooth_step(t) + smooth_step(1.0 - t) == doctest::Approx(1.0).epsilon(1e-14));

    auto F = [&](double x) { return bump_F(x, b); };
    const double f2 = tw_test::simpson([&](double x) { return F(x) * x; }, 0.0, 1.0, 20000);
    CHECK(mellin_F(cplx(2.0, 0.0), b).real() == doctest::Approx(f2).epsilon(1e-10));
    const double f1 = tw_test::simpson(F, 0.0, 1.0, 20000);
    CHECK(mellin_F(cplx(1.0, 0.0), b).real() == doctest::Approx(f1).epsilon(1e-10));
    const double flog = tw_test::simpson([&](double x) { return x <= 0.0 ? 0.0 : F(x) * std::log(x); }, 0.0, 1.0, 20000);
    CHECK(mellin_F_log_moment(b) == doctest::Approx(flog).epsilon(1e-8));
    const cplx z = mellin_F(cplx(1.5, 2.0), b);
    const double zr = tw_test::simpson([&](double x) { return x <= 0.0 ? 0.0 : F(x) * std::sqrt(x) * std::cos(2.0 * std::log(x)); }, 0.0, 1.0, 20000);
    CHECK(z.real() == doctest::Approx(zr).epsilon(1e-9));
    CHECK_THROWS_AS(validate(BumpSpec{0.3}), Error);
}

TEST_CASE("Gauss-Kronrod quadrature") {
    const auto r = integrate_gk<double>([](double x) { return std::exp(-x * x); }, -6.0, 6.0, 1e-14);
    CHECK(r.value == doctest::Approx(std::sqrt(kPi)).epsilon(1e-13));
    const auto c = integrate_gk<cplx>([](double x) { return std::exp(cplx(0.0, 3.0 * x)); }, 0.0, kPi, 1e-13);
    CHECK(std::abs(c.value - (std::exp(cplx(0.0, 3.0 * kPi)) - 1.0) / cplx(0.0, 3.0)) < 1e-12);
}

TEST_CASE("compensated sum and deterministic parallel_for") {
    std::vector<double> xs;
    for (int i = 0; i < 1000; ++i) {
        xs.push_back(1e16);
        xs.push_back(1.0);
        xs.push_back(-1e16);
    }
    CHECK(compensated_sum(xs) == 1000.0);

    std::vector<double> slots1(5000), slots4(5000);
    auto body = [](std::vector<double>& out) {
        return [&out](std::size_t i) { out[i] = std::sin(double(i)) / (1.0 + double(i)); };
    };
    parallel_for(5000, 1, body(slots1));
    parallel_for(5000, 4, body(slots4));
    CHECK(compensated_sum(slots1) == compensated_sum(slots4));
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }), std::runtime_error);
}
