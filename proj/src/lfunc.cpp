#include "twistlab/lfunc.hpp"

#include <cmath>
#include <sstream>

#include "twistlab/arith.hpp"
#include "twistlab/error.hpp"
#include "twistlab/numerics.hpp"

namespace twistlab {

void check_admissible(const FormSpec& form, std::uint64_t d) {
    require(d >= 1, ErrorCode::invalid_argument, "d must be positive");
    require(d % 2 == 1, ErrorCode::invalid_argument, "d = " + std::to_string(d) + " is even");
    require(is_squarefree(d), ErrorCode::invalid_argument, "d = " + std::to_string(d) + " is not squarefree");
    require(gcd_u64(d, form.level) == 1, ErrorCode::invalid_argument,
            "d = " + std::to_string(d) + " shares a factor with the level " + std::to_string(form.level));
}

int root_number(const FormSpec& form, std::uint64_t d) {
    check_admissible(form, d);
    require(form.eta_known(), ErrorCode::contract, "root number of " + form.label + " needs eta");
    const int chi = kronecker(static_cast<std::int64_t>(8 * d), static_cast<std::int64_t>(form.level));
    return form.sign() * chi;
}

TwistPoint make_twist(const FormSpec& form, std::uint64_t d) {
    TwistPoint t;
    t.d = d;
    t.D = 8 * d;
    t.w = root_number(form, d);
    return t;
}

TwistPoint make_untwisted(const FormSpec& form) {
    require(form.eta_known(), ErrorCode::contract, "root number of " + form.label + " needs eta");
    TwistPoint t;
    t.d = 1;
    t.D = 1;
    t.w = form.sign();
    t.untwisted = true;
    return t;
}

double probe_Z(const FormSpec& form) { return form.level > 1 ? std::sqrt(double(form.level)) : 1.15; }

AfeEvaluator::AfeEvaluator(const FormSpec& form, double Z, CutoffKind kind, const CutoffSpec& base)
    : form_(form), Z_(Z), kind_(kind) {
    require(Z > 0.0 && std::isfinite(Z), ErrorCode::invalid_argument, "Z must be positive");
    CutoffSpec spec = base;
    spec.Z = Z;
    spec.kappa = form.kappa;
    spec.level = double(form.level);
    spec.kind = kind;
    direct_ = cutoff_table(spec);
    dual_ = Z == 1.0 ? direct_ : cutoff_table(spec.inverted());
}

std::uint64_t AfeEvaluator::required_length(std::uint64_t D) const {
    const double x = std::max(direct_->x_tail(), dual_->x_tail());
    return static_cast<std::uint64_t>(std::ceil(x * double(D)));
}

AfeValue AfeEvaluator::evaluate(const TwistPoint& point, const CoefficientTable& coeffs) const {
    const std::uint64_t D = point.untwisted ? 1 : point.D;
    const std::uint64_t length = required_length(D);
    if (coeffs.n_max < length) {
        std::ostringstream os;
        os << "coefficient table for " << coeffs.form.label << " has n_max = " << coeffs.n_max
           << ", the evaluation at D = " << D << " needs " << length;
        fail(ErrorCode::resource, os.str());
    }
    std::vector<signed char> chi;
    if (!point.untwisted) {
        chi.resize(D);
        for (std::uint64_t r = 0; r < D; ++r)
            chi[r] = static_cast<signed char>(kronecker(static_cast<std::int64_t>(D), static_cast<std::int64_t>(r)));
    }
    const double invD = 1.0 / double(D);
    const bool same = direct_ == dual_;
    CompensatedSum s1, s2, mag;
    std::uint64_t r = 1;
    for (std::uint64_t n = 1; n <= length; ++n, ++r) {
        if (r == D) r = 0;
        double c = coeffs.lambda_over_sqrt[n];
        if (!point.untwisted) {
            if (chi[r] == 0 || c == 0.0) continue;
            if (chi[r] < 0) c = -c;
        }
        const double x = double(n) * invD;
        const double a = c * (*direct_)(x);
        s1.add(a);
        if (same) {
            mag.add(2.0 * std::abs(a));
        } else {
            const double b = c * (*dual_)(x);
            s2.add(b);
            mag.add(std::abs(a) + std::abs(b));
        }
    }
    AfeValue out;
    out.direct = s1.value();
    out.dual = same ? out.direct : s2.value();
    out.abs_terms = mag.value();
    out.length = length;
    out.Z = Z_;
    const double eps = double(point.w);
    out.value = kind_ == CutoffKind::derivative ? out.direct - eps * out.dual : out.direct + eps * out.dual;
    return out;
}

AfeValue lprime_central(const TwistPoint& point, double Z, const CoefficientTable& coeffs) {
    if (point.w != -1)
        fail(ErrorCode::contract,
             "L'(1/2) requested at a twist with root number +1 (d = " + std::to_string(point.d) +
                 "); there the two-sum combination is identically 0, use afe_annihilation or l_central");
    return AfeEvaluator(coeffs.form, Z, CutoffKind::derivative).evaluate(point, coeffs);
}

AfeValue afe_annihilation(const TwistPoint& point, double Z, const CoefficientTable& coeffs) {
    if (point.w != 1)
        fail(ErrorCode::contract, "afe_annihilation needs a twist with root number +1 (d = " +
                                      std::to_string(point.d) + " has -1)");
    return AfeEvaluator(coeffs.form, Z, CutoffKind::derivative).evaluate(point, coeffs);
}

AfeValue l_central(const TwistPoint& point, double Z, const CoefficientTable& coeffs) {
    return AfeEvaluator(coeffs.form, Z, CutoffKind::value).evaluate(point, coeffs);
}

bool annihilation_holds(const AfeValue& v, double rel) { return std::abs(v.value) < rel * (1.0 + v.abs_terms); }

std::vector<std::uint64_t> admissible_d(const FormSpec& form, std::uint64_t start, std::size_t count) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = std::max<std::uint64_t>(start, 1); out.size() < count; ++d) {
        if (d % 2 == 0 || !is_squarefree(d) || gcd_u64(d, form.level) != 1) continue;
        out.push_back(d);
    }
    return out;
}

EtaInference infer_eta(const FormSpec& form, const std::vector<std::uint64_t>& probes,
                       const CoefficientTable& coeffs) {
    require(!probes.empty(), ErrorCode::invalid_argument, "infer_eta needs at least one probe");
    constexpr double kTol = 1e-6;
    const double Zp = probe_Z(form);
    double worst[2] = {0.0, 0.0};
    bool ok[2] = {true, true};
    for (int c = 0; c < 2; ++c) {
        FormSpec trial = form;
        trial.eta = c == 0 ? 1 : -1;
        const AfeEvaluator at_one(trial, 1.0, CutoffKind::derivative);
        const AfeEvaluator at_probe(trial, Zp, CutoffKind::derivative);
        for (std::uint64_t d : probes) {
            const TwistPoint t = make_twist(trial, d);
            const AfeValue v = at_probe.evaluate(t, coeffs);
            double residual;
            if (t.w == 1) {
                residual = std::abs(v.value) / (1.0 + v.abs_terms);
            } else {
                residual = std::abs(v.value - at_one.evaluate(t, coeffs).value);
            }
            worst[c] = std::max(worst[c], residual);
            if (!(residual < kTol)) ok[c] = false;
        }
    }
    if (ok[0] == ok[1]) {
        std::ostringstream os;
        os << "infer_eta(" << form.label << "): " << (ok[0] ? "both signs" : "neither sign")
           << " consistent across probes (worst residuals: eta=+1 " << worst[0] << ", eta=-1 " << worst[1] << ")";
        fail(ErrorCode::inconsistent, os.str());
    }
    EtaInference r;
    r.eta = ok[0] ? 1 : -1;
    r.probes = probes;
    r.worst_plus = ok[0] ? worst[0] : worst[1];
    r.worst_other = ok[0] ? worst[1] : worst[0];
    return r;
}

}  // namespace twistlab
