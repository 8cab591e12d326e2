#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/forms.hpp"
#include "twistlab/special.hpp"

namespace twistlab {

/// lambda_f(p) for every prime p <= P.
struct LocalData {
    FormSpec form;
    std::uint64_t P = 0;
    std::vector<std::uint32_t> primes;
    std::vector<double> lambda_p;

    bool bad(std::size_t i) const { return form.level % primes[i] == 0; }
};

LocalData local_data(const CoefficientTable& coeffs, std::uint64_t P);

struct LocalRoots {
    std::uint64_t p = 0;
    cplx alpha, beta;
};
/// alpha + beta = lambda(p), alpha beta = 1 at good p; (lambda(p), 0) at bad p.
LocalRoots local_roots(double lambda_p, std::uint64_t p, bool bad);

/// Inverse local factor of L(s, sym^2 f) at p.
cplx sym2_local_inverse(double lambda_p, std::uint64_t p, cplx s, bool bad);
/// Inverse local factor of L(s, f x g) at p.
cplx rankin_local_inverse(double lf, bool bad_f, double lg, bool bad_g, std::uint64_t p, cplx s);

/// A truncated Euler product with its recorded tail.
struct ProductValue {
    cplx value;
    double tail_bound = 0.0;
    double fitted_C = 0.0;  // max of p^2 |log factor| over the last decade of primes
    std::uint64_t P = 0;
};

/// L(s, sym^2 f) and its log-derivative at a real s >= 1. At s = 1 the product
/// converges only conditionally, so the value is the mean of the partial
/// products over the last 10% of primes and tail_bound is half their spread.
struct Sym2Value {
    double value = 0.0;
    double tail_bound = 0.0;
    double log_derivative = 0.0;
    double log_derivative_error = 0.0;
    std::uint64_t P = 0;
};
Sym2Value sym2_L(const LocalData& f, double s);
/// Averaged product without the s >= 1 check; used by finite differences.
ProductValue sym2_product(const LocalData& f, cplx s);
/// d/ds log of the truncated (unaveraged) product, summed analytically.
double sym2_log_derivative_truncated(const LocalData& f, double s);

ProductValue rankin_L1(const LocalData& f, const LocalData& g);

/// Which level N' the product (Z_{N'}) refers to.
enum class LevelPart { one, n1, n2, full };

/// Z*_{N'}(u, v) for one form: the local factor of Z_{N'} divided by the local
/// factors of zeta(1+u+v) L(1+2u) L(1+u+v) L(1+2v) (symmetric squares).
ProductValue zstar_second_part(const LocalData& f, LevelPart part, cplx u, cplx v);
/// Z*(u, v) = Z_1* - i^kappa eta Z_N*.
ProductValue zstar_second(const LocalData& f, cplx u, cplx v);
/// Mixed products normalized by L(1+u+v, f x g) L(1+2u, sym^2 f) L(1+2v, sym^2 g).
ProductValue zstar_mixed_part(const LocalData& f, const LocalData& g, LevelPart part, cplx u, cplx v);
ProductValue zstar_mixed(const LocalData& f, const LocalData& g, cplx u, cplx v);
/// First-moment products normalized by L(1+2u, sym^2 f).
ProductValue zstar_first_part(const LocalData& f, LevelPart part, cplx u);
ProductValue zstar_first(const LocalData& f, cplx u);

/// Independent route for the factorization check: local factors expanded as
/// truncated Dirichlet series in lambda(p^j), and the normalizing L-factors.
ProductValue raw_second_series(const LocalData& f, LevelPart part, cplx u, cplx v);
ProductValue normalizer_second(const LocalData& f, cplx u, cplx v);
ProductValue raw_mixed_series(const LocalData& f, const LocalData& g, LevelPart part, cplx u, cplx v);
ProductValue normalizer_mixed(const LocalData& f, const LocalData& g, cplx u, cplx v);
ProductValue raw_first_series(const LocalData& f, LevelPart part, cplx u);
ProductValue normalizer_first(const LocalData& f, cplx u);

/// Every bracket (1 +- lambda p^{-1/2} + p^{-1})^{-1} (good p) and
/// (1 +- lambda p^{-1/2})^{-1} (bad p) with p <= limit is positive.
struct PositivityCheck {
    std::size_t brackets = 0;
    bool all_positive = true;
    double smallest = 0.0;
};
PositivityCheck bracket_positivity(const LocalData& f, std::uint64_t limit);

/// Derivative of a holomorphic function at 0 by central differences at h and
/// h/2 combined by one Richardson step.
template <class F>
cplx richardson_derivative(F&& fn, double h) {
    const cplx d1 = (fn(h) - fn(-h)) / (2.0 * h);
    const cplx d2 = (fn(0.5 * h) - fn(-0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

/// Flat, ordered list of named values.
struct ConstantReport {
    std::string name;
    std::uint64_t prime_limit = 0;
    double value = 0.0;
    double tail_bound = 0.0;
    bool degenerate = false;
    std::vector<std::pair<std::string, double>> components;

    double component(const std::string& key) const;
    std::string to_text() const;
};

ConstantReport constants_second(const LocalData& f, const BumpSpec& bump);
ConstantReport constants_mixed(const LocalData& f, const LocalData& g, const BumpSpec& bump);
ConstantReport constants_first(const LocalData& f, const BumpSpec& bump);

/// True when w(f) = +1 and the level is a perfect square.
bool degenerate_form(const FormSpec& f);

}  // namespace twistlab
