#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace twistlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Principal branch of log Gamma(z) for Re z > 0.
cplx log_gamma(cplx z);

/// psi(x) = Gamma'(x)/Gamma(x) for x > 0.
double digamma(double x);

/// Which smoothed cutoff the approximate functional equation uses.
///  derivative: kernel (1 - u log Z)/u^2, gives L'(1/2)
///  value:      kernel 1/u,               gives L(1/2)
enum class CutoffKind { derivative, value };

/// Parameters of the cutoff integral
///   W(x) = (1/2 pi i) int_(sigma) Gamma(u + k/2)/Gamma(k/2) (2 pi x / (Z sqrt N))^(-u) K(u) du.
struct CutoffSpec {
    double Z = 1.0;
    int kappa = 2;
    double level = 1.0;
    double contour_sigma = 1.5;
    double t_cut = 0.0;  // 0 selects the Gamma-decay default
    double quad_step = 1.0 / 64.0;
    CutoffKind kind = CutoffKind::derivative;

    CutoffSpec inverted() const {
        CutoffSpec s = *this;
        s.Z = 1.0 / Z;
        return s;
    }
};

void validate(const CutoffSpec& spec);

/// Value of the cutoff and its first two derivatives in s = log x.
struct CutoffEval {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double error_estimate = 0.0;
};

/// Trapezoid nodes on one vertical line, with the x-independent part of the
/// integrand folded into complex weights.
class CutoffLine {
public:
    CutoffLine(const CutoffSpec& spec, double sigma);

    double sigma() const { return sigma_; }
    double t_cut() const { return t_cut_; }
    /// Integral along the line at log y = log_y, with derivatives in log x.
    CutoffEval evaluate(double log_y) const;

private:
    double sigma_;
    double step_;
    double t_cut_;
    std::vector<cplx> weight_;  // (h/pi) * w_j * Gamma(u_j + k/2)/Gamma(k/2) * K(u_j)
    std::vector<cplx> node_;    // u_j
};

/// Direct line integral along Re u = contour_sigma.
CutoffEval cutoff_W_direct(double x, const CutoffSpec& spec);
/// Double- (or simple-) pole residue at u = 0 plus the line Re u = -kappa/4.
CutoffEval cutoff_W_residue(double x, const CutoffSpec& spec);
/// Residue path when 2 pi x/(Z sqrt N) < 1e-2, direct path otherwise.
/// Throws a precision error when the quadrature estimate exceeds 1e-10.
double cutoff_W(double x, const CutoffSpec& spec);

/// Piecewise quintic Hermite table of the cutoff: log-spaced nodes on
/// [x_lo, 1], uniform nodes on [1, x_tail], zero beyond x_tail. Node spacing is
/// halved (at most six times) until midpoint samples agree with the direct
/// quadrature to `target_error`; construction fails above 1e-10.
class CutoffTable {
public:
    explicit CutoffTable(const CutoffSpec& spec, double target_error = 1e-12);

    const CutoffSpec& spec() const { return spec_; }
    double x_tail() const { return x_tail_; }
    double x_lo() const { return x_lo_; }
    double max_sampled_error() const { return max_error_; }
    std::size_t node_count() const { return log_coef_.size() / 6 + lin_coef_.size() / 6 + 2; }

    double operator()(double x) const {
        if (x >= x_tail_) return 0.0;
        if (x >= lin_start_) {
            const double t = (x - lin_start_) * lin_inv_h_;
            std::size_t i = static_cast<std::size_t>(t);
            if (i >= lin_count_) i = lin_count_ - 1;
            return horner(&lin_coef_[6 * i], t - double(i));
        }
        if (x >= x_lo_) {
            const double t = (std::log(x) - log_lo_) * log_inv_h_;
            std::size_t i = static_cast<std::size_t>(t);
            if (i >= log_count_) i = log_count_ - 1;
            return horner(&log_coef_[6 * i], t - double(i));
        }
        return slow(x);
    }

private:
    static double horner(const double* c, double t) {
        return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
    }
    double slow(double x) const;

    CutoffSpec spec_;
    double x_lo_ = 1e-7;
    double x_tail_ = 0.0;
    double lin_start_ = 1.0;
    double lin_inv_h_ = 0.0;
    std::size_t lin_count_ = 0;
    double log_lo_ = 0.0;
    double log_inv_h_ = 0.0;
    std::size_t log_count_ = 0;
    double max_error_ = 0.0;
    std::vector<double> lin_coef_;
    std::vector<double> log_coef_;
};

/// Shared, lazily built tables keyed by the full spec. Thread-safe.
std::shared_ptr<const CutoffTable> cutoff_table(const CutoffSpec& spec);

/// Smooth bump: F = 1 on [delta, 1 - delta], 0 outside (0, 1), exp(-1/t)
/// transitions in between.
struct BumpSpec {
    double delta = 0.05;
};

void validate(const BumpSpec& spec);
double smooth_step(double t);
double bump_F(double x, const BumpSpec& spec);
/// Mellin transform int_0^1 F(x) x^(s-1) dx, Re s > 0.
cplx mellin_F(cplx s, const BumpSpec& spec);
/// F~'(1) = int_0^1 F(x) log x dx.
double mellin_F_log_moment(const BumpSpec& spec);

}  // namespace twistlab
