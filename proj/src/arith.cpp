#include "twistlab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "twistlab/error.hpp"

namespace twistlab {

std::uint64_t Factorization::product() const {
    std::uint64_t r = 1;
    for (const auto& f : factors)
        for (int i = 0; i < f.e; ++i) r *= f.p;
    return r;
}

int Factorization::order(std::uint64_t p) const {
    for (const auto& f : factors)
        if (f.p == p) return f.e;
    return 0;
}

PrimeTable::PrimeTable(std::uint32_t limit) : limit_(limit) {
    require(limit >= 2, ErrorCode::invalid_argument,
            "sieve limit must be at least 2, got " + std::to_string(limit));
    spf_.assign(std::size_t(limit) + 1, 0);
    // Linear sieve: every composite is struck exactly once by its least prime.
    for (std::uint32_t i = 2; i <= limit; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = i;
            primes_.push_back(i);
        }
        for (std::uint32_t p : primes_) {
            if (p > spf_[i] || std::uint64_t(p) * i > limit) break;
            spf_[std::size_t(p) * i] = p;
        }
    }
}

bool PrimeTable::is_prime(std::uint64_t n) const {
    if (n < 2) return false;
    if (n <= limit_) return spf_[n] == n;
    const auto f = factor_trial(n);
    return f.factors.size() == 1 && f.factors[0].e == 1;
}

std::uint32_t PrimeTable::smallest_factor(std::uint64_t n) const {
    require(n >= 2 && n <= limit_, ErrorCode::invalid_argument,
            "smallest_factor: argument outside table range");
    return spf_[n];
}

Factorization PrimeTable::factor(std::uint64_t n) const {
    require(n >= 1, ErrorCode::invalid_argument, "cannot factor 0");
    if (n > limit_) return factor_trial(n);
    Factorization f;
    f.n = n;
    while (n > 1) {
        std::uint32_t p = spf_[n];
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.factors.push_back({p, e});
    }
    return f;
}

std::size_t PrimeTable::prime_count_upto(std::uint64_t x) const {
    return std::size_t(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
}

PrimeTable sieve(std::uint64_t limit) {
    require(limit >= 2, ErrorCode::invalid_argument,
            "sieve limit must be at least 2, got " + std::to_string(limit));
    require(limit <= 0xFFFFFFF0ull, ErrorCode::resource, "sieve limit too large");
    return PrimeTable(static_cast<std::uint32_t>(limit));
}

Factorization factor_trial(std::uint64_t n) {
    require(n >= 1, ErrorCode::invalid_argument, "cannot factor 0");
    Factorization f;
    f.n = n;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.factors.push_back({p, e});
    }
    if (n > 1) f.factors.push_back({n, 1});
    return f;
}

int mobius(std::uint64_t n) {
    require(n >= 1, ErrorCode::invalid_argument, "mobius(0) is undefined");
    int sign = 1;
    for (const auto& pp : factor_trial(n).factors) {
        if (pp.e > 1) return 0;
        sign = -sign;
    }
    return sign;
}

bool is_squarefree(std::uint64_t n) {
    if (n == 0) return false;
    for (const auto& pp : factor_trial(n).factors)
        if (pp.e > 1) return false;
    return true;
}

int kronecker(std::int64_t a, std::int64_t n) {
    require(!(a == 0 && n == 0), ErrorCode::invalid_argument, "kronecker(0, 0) is undefined");
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;

    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) result = -result;
    }
    // (a/2) = 0 for even a, +1 for a = +-1 mod 8, -1 for a = +-3 mod 8.
    int v = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++v;
    }
    if (v > 0) {
        if ((a & 1) == 0) return 0;
        const std::int64_t r = ((a % 8) + 8) % 8;
        if ((v & 1) && (r == 3 || r == 5)) result = -result;
    }

    // Jacobi symbol (a/n), n odd positive.
    std::int64_t m = a % n;
    if (m < 0) m += n;
    std::int64_t k = n;
    while (m != 0) {
        while ((m & 1) == 0) {
            m >>= 1;
            const std::int64_t r = k % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(m, k);
        if (m % 4 == 3 && k % 4 == 3) result = -result;
        m %= k;
    }
    return k == 1 ? result : 0;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

bool is_perfect_square(std::uint64_t n) {
    constexpr std::uint64_t kMaxRoot = 0xFFFFFFFFull;
    auto r = std::min(kMaxRoot, static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n))));
    while (r * r > n) --r;
    while (r < kMaxRoot && (r + 1) * (r + 1) <= n) ++r;
    return r * r == n;
}

}  // namespace twistlab
