#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace twistlab {

struct PrimePower {
    std::uint64_t p;
    int e;
};

/// Prime factorization of n, factors sorted by increasing prime.
struct Factorization {
    std::uint64_t n = 1;
    std::vector<PrimePower> factors;

    std::uint64_t product() const;
    int order(std::uint64_t p) const;  // ord_p(n), 0 if p does not divide n
};

/// Primes up to `limit` together with a least-prime-factor table.
/// Immutable after construction; safe to share between threads.
class PrimeTable {
public:
    explicit PrimeTable(std::uint32_t limit);

    std::uint32_t limit() const { return limit_; }
    std::span<const std::uint32_t> primes() const { return primes_; }
    bool is_prime(std::uint64_t n) const;
    /// Least prime factor of 2 <= n <= limit.
    std::uint32_t smallest_factor(std::uint64_t n) const;
    /// Table lookup for n <= limit, trial division above.
    Factorization factor(std::uint64_t n) const;
    std::size_t prime_count_upto(std::uint64_t x) const;

private:
    std::uint32_t limit_;
    std::vector<std::uint32_t> primes_;
    std::vector<std::uint32_t> spf_;
};

PrimeTable sieve(std::uint64_t limit);

/// Trial-division factorization, usable without a table.
Factorization factor_trial(std::uint64_t n);

int mobius(std::uint64_t n);
bool is_squarefree(std::uint64_t n);

/// Kronecker symbol (a/n), total on Z x Z except (0/0).
int kronecker(std::int64_t a, std::int64_t n);

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);
bool is_perfect_square(std::uint64_t n);

}  // namespace twistlab
