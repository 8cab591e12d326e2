#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "twistlab/forms.hpp"
#include "twistlab/special.hpp"

namespace twistlab {

/// A quadratic twist by chi_D with D = 8d, or the untwisted form (d = 1, D = 1).
struct TwistPoint {
    std::uint64_t d = 1;
    std::uint64_t D = 8;
    int w = 0;
    bool untwisted = false;
};

/// Throws invalid_argument unless d is odd, squarefree and coprime to 2N.
void check_admissible(const FormSpec& form, std::uint64_t d);
/// i^kappa eta kronecker(8d, N). Requires eta to be known.
int root_number(const FormSpec& form, std::uint64_t d);
TwistPoint make_twist(const FormSpec& form, std::uint64_t d);
TwistPoint make_untwisted(const FormSpec& form);

/// Z used when a check needs Z != 1: sqrt(N) when N > 1, otherwise 1.15.
double probe_Z(const FormSpec& form);

/// Result of one approximate-functional-equation evaluation.
struct AfeValue {
    double value = 0.0;
    double direct = 0.0;     // sum against the cutoff with parameter Z
    double dual = 0.0;       // sum against the cutoff with parameter 1/Z
    double abs_terms = 0.0;  // sum of |terms| over both sums
    std::uint64_t length = 0;
    double Z = 1.0;
};

/// Evaluates the two-sum combinations for one form at one Z, sharing the
/// cutoff tables between twists.
class AfeEvaluator {
public:
    AfeEvaluator(const FormSpec& form, double Z, CutoffKind kind, const CutoffSpec& base = {});

    const FormSpec& form() const { return form_; }
    double Z() const { return Z_; }
    CutoffKind kind() const { return kind_; }
    /// Number of coefficients the evaluation at discriminant D reads.
    std::uint64_t required_length(std::uint64_t D) const;
    /// Raw combination sum_Z - eps * sum_{1/Z} for the derivative kernel and
    /// sum_Z + eps * sum_{1/Z} for the value kernel, with eps = point.w.
    AfeValue evaluate(const TwistPoint& point, const CoefficientTable& coeffs) const;

private:
    FormSpec form_;
    double Z_;
    CutoffKind kind_;
    std::shared_ptr<const CutoffTable> direct_;
    std::shared_ptr<const CutoffTable> dual_;
};

/// L'(1/2, f x chi_8d); contract error when w = +1.
AfeValue lprime_central(const TwistPoint& point, double Z, const CoefficientTable& coeffs);
/// Same combination for w = +1 points; contract error if w = -1.
AfeValue afe_annihilation(const TwistPoint& point, double Z, const CoefficientTable& coeffs);
/// L(1/2, f x chi_8d) with the first-power cutoff.
AfeValue l_central(const TwistPoint& point, double Z, const CoefficientTable& coeffs);

/// |value| < 1e-8 (1 + sum |terms|).
bool annihilation_holds(const AfeValue& v, double rel = 1e-8);

/// Picks the eta for which every probe is self-consistent: annihilation for
/// probes that would have w = +1, Z-invariance of L' for the rest.
struct EtaInference {
    int eta = 0;
    std::vector<std::uint64_t> probes;
    double worst_plus = 0.0;   // largest residual for the chosen eta
    double worst_other = 0.0;  // smallest failure for the rejected eta
};

EtaInference infer_eta(const FormSpec& form, const std::vector<std::uint64_t>& probes,
                       const CoefficientTable& coeffs);
/// First `count` admissible d >= start.
std::vector<std::uint64_t> admissible_d(const FormSpec& form, std::uint64_t start, std::size_t count);

}  // namespace twistlab
