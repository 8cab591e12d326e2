#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <queue>
#include <thread>
#include <vector>

namespace twistlab {

/// Neumaier-compensated accumulator. Summation order is the caller's, so a
/// fixed order gives bit-identical totals.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(const std::vector<double>& xs) {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

inline unsigned default_thread_count() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work is handed
/// out in interleaved blocks; callers write results into per-index slots so
/// the outcome does not depend on scheduling. The first exception thrown by a
/// worker is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    threads = std::max(1u, threads);
    if (threads == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += threads) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGkWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }

template <class T, class F>
void gk15(F& f, double a, double b, T& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T k = fc * kGkWeights[7];
    T g = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kGkNodes[j];
        const T f1 = f(c - dx);
        const T f2 = f(c + dx);
        k += (f1 + f2) * kGkWeights[j];
        if (j % 2 == 1) g += (f1 + f2) * kGaussWeights[j / 2];
    }
    kronrod = k * h;
    err = magnitude((k - g) * h);
}

}  // namespace detail

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of f over [a, b].
/// Bisects the worst interval until the summed error estimate drops below
/// abs_tol or max_intervals is reached.
template <class T, class F>
QuadResult<T> integrate_gk(F&& f, double a, double b, double abs_tol, int max_intervals = 4000,
                           int initial_pieces = 1) {
    struct Piece {
        double a, b;
        T value;
        double err;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    std::priority_queue<Piece> heap;
    T total{};
    double total_err = 0.0;
    const double step = (b - a) / initial_pieces;
    for (int i = 0; i < initial_pieces; ++i) {
        const double lo = a + i * step;
        const double hi = (i + 1 == initial_pieces) ? b : lo + step;
        Piece p{lo, hi, T{}, 0.0};
        detail::gk15<T>(f, lo, hi, p.value, p.err);
        total += p.value;
        total_err += p.err;
        heap.push(p);
    }
    int count = initial_pieces;
    while (total_err > abs_tol && count < max_intervals) {
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Piece left{worst.a, mid, T{}, 0.0};
        Piece right{mid, worst.b, T{}, 0.0};
        detail::gk15<T>(f, left.a, left.b, left.value, left.err);
        detail::gk15<T>(f, right.a, right.b, right.value, right.err);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum from the pieces to shed drift from the incremental updates.
    T resum{};
    double err_sum = 0.0;
    while (!heap.empty()) {
        resum += heap.top().value;
        err_sum += heap.top().err;
        heap.pop();
    }
    return {resum, err_sum, count};
}

}  // namespace twistlab
