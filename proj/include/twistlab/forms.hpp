#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace twistlab {

/// Integer Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
struct Curve {
    std::int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

    std::int64_t b2() const { return a1 * a1 + 4 * a2; }
    std::int64_t b4() const { return 2 * a4 + a1 * a3; }
    std::int64_t b6() const { return a3 * a3 + 4 * a6; }
    std::int64_t b8() const { return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4; }
    std::int64_t c4() const { return b2() * b2() - 24 * b4(); }
    std::int64_t c6() const { return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6(); }
    std::int64_t discriminant() const {
        return -b2() * b2() * b8() - 8 * b4() * b4() * b4() - 27 * b6() * b6() + 9 * b2() * b4() * b6();
    }
};

enum class SourceKind { elliptic, delta };

struct FormSpec {
    std::string label;
    int kappa = 2;
    std::uint64_t level = 1;
    int eta = 0;  // +1, -1, or 0 while unknown
    SourceKind source = SourceKind::elliptic;
    Curve curve;

    bool eta_known() const { return eta == 1 || eta == -1; }
    /// i^kappa, real because kappa is even.
    int i_pow_kappa() const { return (kappa / 2) % 2 == 0 ? 1 : -1; }
    /// w(f) = i^kappa eta.
    int sign() const { return i_pow_kappa() * eta; }
};

/// Built-in forms with eta unknown; infer_eta fills it in.
const std::vector<FormSpec>& registry();
/// Throws unknown_form listing the registered labels.
FormSpec find_form(std::string_view label);

inline constexpr std::uint64_t kDeltaCap = 10000;
inline constexpr int kCoefficientVersion = 1;

/// #E(F_p) including the point at infinity, by direct enumeration. Works for
/// bad p too, where the count includes the singular point.
std::int64_t count_points_naive(const Curve& e, std::uint64_t p);
/// a_p = p + 1 - #E(F_p) by naive counting.
std::int64_t ap_naive(const Curve& e, std::uint64_t p);
/// a_p by baby-step giant-step on the curve and its quadratic twist; good
/// reduction. Reliable for p > 229, where the curve or its twist always has a
/// point pinning the order down; below that it may fail with an internal error.
std::int64_t ap_bsgs(const Curve& e, std::uint64_t p);
/// Picks naive counting for small or bad p, BSGS otherwise.
std::int64_t ap_integer(const Curve& e, std::uint64_t p);
/// lambda_f(p) = a_p / sqrt(p).
double ap_elliptic(const Curve& e, std::uint64_t p);

/// Ramanujan tau(1..n_max), index 0 unused; n_max <= kDeltaCap.
std::vector<__int128> tau_table(std::uint64_t n_max);

/// Unnormalized integer coefficients a(1..n_max) of an elliptic newform,
/// index 0 unused.
std::vector<std::int64_t> elliptic_coefficients(const FormSpec& form, std::uint64_t n_max,
                                                unsigned threads);

struct CoefficientTable {
    FormSpec form;
    std::uint64_t n_max = 0;
    std::vector<double> lambda;          // lambda[n], n = 0..n_max, lambda[0] = 0
    std::vector<double> lambda_over_sqrt;  // lambda[n] / sqrt(n)
    bool from_cache = false;

    double operator[](std::uint64_t n) const { return lambda[n]; }
};

struct SieveOptions {
    unsigned threads = 1;
    std::uint64_t memory_budget = std::uint64_t(2) << 30;
    std::string cache_dir;  // empty disables the file cache
};

/// Bytes the sieve needs for a table of this length.
std::uint64_t sieve_memory_estimate(const FormSpec& form, std::uint64_t n_max);

std::shared_ptr<const CoefficientTable> sieve_coefficients(const FormSpec& form, std::uint64_t n_max,
                                                           const SieveOptions& options = {});

/// Cache directory from TWISTLAB_CACHE, or empty.
std::string cache_dir_from_env();
std::string cache_file_name(const std::string& label, std::uint64_t n_max);
/// Returns an empty pointer on a missing or malformed file.
std::shared_ptr<CoefficientTable> read_cache(const std::string& dir, const FormSpec& form, std::uint64_t n_max);
void write_cache(const std::string& dir, const CoefficientTable& table);

}  // namespace twistlab
