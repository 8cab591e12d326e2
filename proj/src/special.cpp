#include "twistlab/special.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "twistlab/error.hpp"
#include "twistlab/numerics.hpp"

namespace twistlab {

namespace {

// Lanczos coefficients for g = 607/128, 15 terms (Godfrey).
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5};
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

constexpr double kResidueSwitch = 1e-2;
constexpr double kQuadratureTolerance = 1e-10;
constexpr double kTailEpsilon = 1e-16;

}  // namespace

cplx log_gamma(cplx z) {
    if (!(z.real() > 0.0)) {
        std::ostringstream os;
        os << "log_gamma: Re z must be positive, got " << z;
        fail(ErrorCode::domain, os.str());
    }
    // Shift into Re z >= 1/2, where the rational part stays well away from 0.
    cplx shift = 0.0;
    while (z.real() < 0.5) {
        shift -= std::log(z);
        z += 1.0;
    }
    cplx series = kLanczos[0];
    for (int k = 1; k < 15; ++k) series += kLanczos[k] / (z + double(k - 1));
    const cplx t = z + kLanczosG - 0.5;
    return shift + kLogSqrt2Pi + (z - 0.5) * std::log(t) - t + std::log(series);
}

double digamma(double x) {
    require(x > 0.0, ErrorCode::domain, "digamma: argument must be positive");
    double acc = 0.0;
    while (x < 12.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double r = 1.0 / (x * x);
    const double series =
        r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12.0))))));
    return acc + std::log(x) - 0.5 / x - series;
}

void validate(const CutoffSpec& spec) {
    require(spec.Z > 0.0 && std::isfinite(spec.Z), ErrorCode::invalid_argument, "cutoff: Z must be positive");
    require(spec.kappa > 0 && spec.kappa % 2 == 0, ErrorCode::invalid_argument, "cutoff: weight must be even and positive");
    require(spec.level >= 1.0, ErrorCode::invalid_argument, "cutoff: level must be >= 1");
    require(spec.contour_sigma > 0.0, ErrorCode::invalid_argument, "cutoff: contour_sigma must be positive");
    require(spec.quad_step > 0.0 && spec.quad_step <= 0.25, ErrorCode::invalid_argument,
            "cutoff: quad_step must lie in (0, 1/4]");
    require(spec.t_cut >= 0.0, ErrorCode::invalid_argument, "cutoff: t_cut must be non-negative");
}

CutoffLine::CutoffLine(const CutoffSpec& spec, double sigma) : sigma_(sigma), step_(spec.quad_step) {
    const double half_k = 0.5 * spec.kappa;
    const double log_gamma_k = std::lgamma(half_k);
    t_cut_ = spec.t_cut;
    if (t_cut_ <= 0.0) {
        // Gamma decays like exp(-pi t/2); stop once it is 1e-16 of its value on the axis.
        const double base = log_gamma(cplx(sigma + half_k, 0.0)).real();
        double t = 1.0;
        while (log_gamma(cplx(sigma + half_k, t)).real() - base > std::log(1e-16)) t += 0.25;
        t_cut_ = t;
    }
    const double logZ = std::log(spec.Z);
    const std::size_t count = static_cast<std::size_t>(std::ceil(t_cut_ / step_)) + 1;
    weight_.reserve(count);
    node_.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        const cplx u(sigma, step_ * double(j));
        const cplx g = std::exp(log_gamma(u + half_k) - log_gamma_k);
        cplx kernel;
        if (spec.kind == CutoffKind::derivative)
            kernel = (1.0 - u * logZ) / (u * u);
        else
            kernel = 1.0 / u;
        const double w = (j == 0 ? 0.5 : 1.0) * step_ / kPi;
        weight_.push_back(w * g * kernel);
        node_.push_back(u);
    }
}

CutoffEval CutoffLine::evaluate(double log_y) const {
    const double scale = std::exp(-sigma_ * log_y);
    const cplx rotate = std::polar(1.0, -step_ * log_y);
    cplx phase = 1.0;
    cplx v = 0.0, d1 = 0.0, d2 = 0.0, coarse = 0.0;
    for (std::size_t j = 0; j < weight_.size(); ++j) {
        if (j % 64 == 0) phase = std::polar(1.0, -node_[j].imag() * log_y);
        const cplx term = weight_[j] * phase;
        v += term;
        d1 -= term * node_[j];
        d2 += term * node_[j] * node_[j];
        if (j % 2 == 0) coarse += term;
        phase *= rotate;
    }
    CutoffEval out;
    out.value = scale * v.real();
    out.d1 = scale * d1.real();
    out.d2 = scale * d2.real();
    const double tail = weight_.empty() ? 0.0 : std::abs(weight_.back()) * scale * (2.0 / (kPi * step_));
    out.error_estimate = std::abs(out.value - 2.0 * scale * coarse.real()) + tail;
    return out;
}

namespace {

double log_y_of(double x, const CutoffSpec& spec) {
    return std::log(2.0 * kPi * x / (spec.Z * std::sqrt(spec.level)));
}

struct LinePair {
    CutoffLine direct;
    CutoffLine shifted;
};

// Lines are cheap to build but not free; memoize per spec.
std::shared_ptr<const LinePair> lines_for(const CutoffSpec& spec) {
    using Key = std::tuple<double, int, double, double, double, double, int>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const LinePair>> cache;
    const Key key{spec.Z, spec.kappa, spec.level, spec.contour_sigma, spec.t_cut, spec.quad_step,
                  static_cast<int>(spec.kind)};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto made = std::make_shared<const LinePair>(
        LinePair{CutoffLine(spec, spec.contour_sigma), CutoffLine(spec, -0.25 * spec.kappa)});
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, made).first->second;
}

}  // namespace

CutoffEval cutoff_W_direct(double x, const CutoffSpec& spec) {
    validate(spec);
    require(x > 0.0, ErrorCode::domain, "cutoff_W: x must be positive");
    return lines_for(spec)->direct.evaluate(log_y_of(x, spec));
}

CutoffEval cutoff_W_residue(double x, const CutoffSpec& spec) {
    validate(spec);
    require(x > 0.0, ErrorCode::domain, "cutoff_W: x must be positive");
    const double L = log_y_of(x, spec);
    CutoffEval out = lines_for(spec)->shifted.evaluate(L);
    if (spec.kind == CutoffKind::derivative) {
        out.value += digamma(0.5 * spec.kappa) - L - std::log(spec.Z);
        out.d1 += -1.0;
    } else {
        out.value += 1.0;
    }
    return out;
}

namespace {

CutoffEval cutoff_auto(double x, const CutoffSpec& spec) {
    const double y = std::exp(log_y_of(x, spec));
    CutoffEval e = y < kResidueSwitch ? cutoff_W_residue(x, spec) : cutoff_W_direct(x, spec);
    if (e.error_estimate > kQuadratureTolerance) {
        std::ostringstream os;
        os << "cutoff_W: quadrature error estimate " << e.error_estimate << " exceeds "
           << kQuadratureTolerance << " at x=" << x << " (Z=" << spec.Z << ", kappa=" << spec.kappa
           << ", N=" << spec.level << ", step=" << spec.quad_step << ")";
        fail(ErrorCode::precision, os.str());
    }
    return e;
}

}  // namespace

double cutoff_W(double x, const CutoffSpec& spec) { return cutoff_auto(x, spec).value; }

namespace {

// Quintic Hermite coefficients on t in [0, 1]; m and a are first and second
// derivatives already scaled by the interval width.
void hermite5(double p0, double m0, double a0, double p1, double m1, double a1, double* c) {
    const double dp = p1 - p0;
    c[0] = p0;
    c[1] = m0;
    c[2] = 0.5 * a0;
    c[3] = 10.0 * dp - 6.0 * m0 - 4.0 * m1 - 0.5 * (3.0 * a0 - a1);
    c[4] = -15.0 * dp + 8.0 * m0 + 7.0 * m1 + 0.5 * (3.0 * a0 - 2.0 * a1);
    c[5] = 6.0 * dp - 3.0 * (m0 + m1) - 0.5 * (a0 - a1);
}

struct RegionFit {
    std::vector<double> coef;
    std::size_t count = 0;
    double inv_h = 0.0;
    double max_error = 0.0;
};

// Fits [lo, hi] in region variable r (r = log x when logarithmic, r = x
// otherwise), halving the spacing until midpoint errors are below target.
RegionFit fit_region(const CutoffSpec& spec, double lo, double hi, bool logarithmic, double target) {
    auto sample = [&](double r) {
        const double x = logarithmic ? std::exp(r) : r;
        CutoffEval e = cutoff_auto(x, spec);
        if (!logarithmic) {
            const double fx = e.d1 / x;
            const double fxx = (e.d2 - e.d1) / (x * x);
            e.d1 = fx;
            e.d2 = fxx;
        }
        return e;
    };
    auto horner = [](const double* c, double t) {
        return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
    };
    std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) * 32.0)));
    RegionFit fit;
    for (int round = 0; round < 6; ++round, count *= 2) {
        const double h = (hi - lo) / double(count);
        std::vector<CutoffEval> node(count + 1);
        for (std::size_t i = 0; i <= count; ++i) node[i] = sample(lo + h * double(i));
        fit.coef.assign(6 * count, 0.0);
        for (std::size_t i = 0; i < count; ++i)
            hermite5(node[i].value, h * node[i].d1, h * h * node[i].d2, node[i + 1].value,
                     h * node[i + 1].d1, h * h * node[i + 1].d2, &fit.coef[6 * i]);
        fit.count = count;
        fit.inv_h = 1.0 / h;
        fit.max_error = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double exact = sample(lo + h * (double(i) + 0.5)).value;
            fit.max_error = std::max(fit.max_error, std::abs(horner(&fit.coef[6 * i], 0.5) - exact));
        }
        if (fit.max_error <= target) break;
    }
    return fit;
}

}  // namespace

CutoffTable::CutoffTable(const CutoffSpec& spec, double target_error) : spec_(spec) {
    validate(spec);
    // Scan upward for the last point where the cutoff is still visible.
    const double y_to_x = spec.Z * std::sqrt(spec.level) / (2.0 * kPi);
    double x = x_lo_;
    double last_visible = x_lo_;
    while (x / y_to_x < 400.0) {
        const CutoffEval e = cutoff_auto(x, spec);
        if (std::abs(e.value) >= kTailEpsilon || std::abs(e.d1) >= kTailEpsilon) last_visible = x;
        x *= 1.03;
    }
    x_tail_ = last_visible * 1.03;

    const double log_hi = std::log(std::min(1.0, x_tail_));
    log_lo_ = std::log(x_lo_);
    RegionFit lg = fit_region(spec, log_lo_, log_hi, true, target_error);
    log_coef_ = std::move(lg.coef);
    log_count_ = lg.count;
    log_inv_h_ = lg.inv_h;
    max_error_ = lg.max_error;

    if (x_tail_ > 1.0) {
        RegionFit ln = fit_region(spec, 1.0, x_tail_, false, target_error);
        lin_coef_ = std::move(ln.coef);
        lin_count_ = ln.count;
        lin_inv_h_ = ln.inv_h;
        lin_start_ = 1.0;
        max_error_ = std::max(max_error_, ln.max_error);
    } else {
        lin_start_ = x_tail_;
        lin_count_ = 1;
        lin_coef_.assign(6, 0.0);
        lin_inv_h_ = 1.0;
    }
    if (max_error_ > 1e-10) {
        std::ostringstream os;
        os << "cutoff table: interpolation error " << max_error_ << " above 1e-10";
        fail(ErrorCode::precision, os.str());
    }
}

double CutoffTable::slow(double x) const { return cutoff_W(x, spec_); }

std::shared_ptr<const CutoffTable> cutoff_table(const CutoffSpec& spec) {
    using Key = std::tuple<double, int, double, double, double, double, int>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const CutoffTable>> cache;
    const Key key{spec.Z, spec.kappa, spec.level, spec.contour_sigma, spec.t_cut, spec.quad_step,
                  static_cast<int>(spec.kind)};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto made = std::make_shared<const CutoffTable>(spec);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, made).first->second;
}

void validate(const BumpSpec& spec) {
    require(spec.delta > 0.0 && spec.delta <= 0.25, ErrorCode::invalid_argument,
            "bump: delta must lie in (0, 1/4]");
}

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double bump_F(double x, const BumpSpec& spec) {
    validate(spec);
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return smooth_step(x / spec.delta) * smooth_step((1.0 - x) / spec.delta);
}

namespace {

constexpr double kBumpTolerance = 1e-14;

}  // namespace

cplx mellin_F(cplx s, const BumpSpec& spec) {
    validate(spec);
    require(s.real() > 0.0, ErrorCode::domain, "mellin_F: Re s must be positive");
    const double d = spec.delta;
    const cplx sm1 = s - 1.0;
    const cplx plateau = (std::exp(s * std::log1p(-d)) - std::exp(s * std::log(d))) / s;
    auto left = integrate_gk<cplx>(
        [&](double t) { return t <= 0.0 ? cplx(0.0) : smooth_step(t) * std::exp(sm1 * std::log(d * t)); },
        0.0, 1.0, kBumpTolerance, 2000, 4);
    auto right = integrate_gk<cplx>(
        [&](double t) { return smooth_step(t) * std::exp(sm1 * std::log1p(-d * t)); }, 0.0, 1.0,
        kBumpTolerance, 2000, 4);
    return plateau + d * (left.value + right.value);
}

double mellin_F_log_moment(const BumpSpec& spec) {
    validate(spec);
    const double d = spec.delta;
    auto prim = [](double x) { return x * std::log(x) - x; };
    const double plateau = prim(1.0 - d) - prim(d);
    auto left = integrate_gk<double>(
        [&](double t) { return t <= 0.0 ? 0.0 : smooth_step(t) * std::log(d * t); }, 0.0, 1.0,
        kBumpTolerance, 2000, 4);
    auto right = integrate_gk<double>([&](double t) { return smooth_step(t) * std::log1p(-d * t); }, 0.0,
                                      1.0, kBumpTolerance, 2000, 4);
    return plateau + d * (left.value + right.value);
}

}  // namespace twistlab
