#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/forms.hpp"
#include "twistlab/special.hpp"

namespace twistlab {

/// ((1-i)/2 + (-1/n)(1+i)/2) sum_{a mod n} (a/n) e(ak/n), summed directly.
cplx gauss_bruteforce(std::int64_t k, std::uint64_t n);
/// Same value assembled multiplicatively from the prime-power cases.
cplx gauss_explicit(std::int64_t k, std::uint64_t n);

/// int (cos + sin)(2 pi x y) F(x) dx.
double fourier_cs(double y, const BumpSpec& bump);

struct PoissonResult {
    std::uint64_t n = 1;
    double Z = 1.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double discrepancy = 0.0;
    std::int64_t k_max = 0;
    double truncation = 0.0;  // sum of |terms| over k_max/2 < |k| <= k_max
};

/// Both sides of the quadratic Poisson formula
///   sum_{d odd} (d/n) F(d/Z) = (Z/2n)(2/n) sum_k (-1)^k G_k(n) F^(kZ/2n).
/// Precision error when the truncation estimate exceeds 1e-8.
PoissonResult verify_poisson(std::uint64_t n, double Z, const BumpSpec& bump);

/// The bump used by the Poisson suite.
inline BumpSpec poisson_test_bump() { return BumpSpec{0.25}; }
std::vector<std::pair<std::uint64_t, double>> default_poisson_pairs();

struct Verdict {
    std::string check;
    bool passed = false;
    double worst = 0.0;
    double tolerance = 0.0;
    std::size_t cases = 0;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<Verdict> verdicts;
    double runtime_seconds = 0.0;

    bool passed() const;
    std::string to_text() const;
    std::string to_json() const;
};

SuiteResult run_gauss_suite(std::uint64_t n_limit = 999, std::int64_t k_limit = 20, unsigned threads = 1);
SuiteResult run_poisson_suite(const std::vector<std::pair<std::uint64_t, double>>& pairs,
                              const BumpSpec& bump = poisson_test_bump());

struct AfeSuiteOptions {
    std::size_t twists = 50;
    std::uint64_t seed = 20240601;
    std::uint64_t d_limit = 2000;  // further capped by the coefficient table
    double tolerance = 1e-8;
    unsigned threads = 1;
};

/// Largest d whose twist evaluation at Z in {1, probe_Z} fits in n_max.
std::uint64_t afe_d_capacity(const FormSpec& form, std::uint64_t n_max);

/// Annihilation (w = +1), Z-invariance of L'(1/2) and vanishing of L(1/2)
/// (w = -1) over random admissible twists. The form must have eta set.
SuiteResult run_afe_suite(const FormSpec& form, const CoefficientTable& coeffs, const AfeSuiteOptions& options = {});

}  // namespace twistlab
