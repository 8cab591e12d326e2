#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/eulerprod.hpp"
#include "twistlab/forms.hpp"
#include "twistlab/lfunc.hpp"
#include "twistlab/special.hpp"

namespace twistlab {

enum class MomentKind { second, mixed, first };

const char* to_string(MomentKind kind);
MomentKind parse_moment_kind(const std::string& text);

/// Deterministic thinning: member d is kept iff hash(d, seed) < rate.
struct SampleSpec {
    double rate = 1.0;
    std::uint64_t seed = 0;
};

struct TwistFamily {
    std::vector<FormSpec> forms;  // one form, or (f, g) for the mixed kind
    double X = 0.0;
    BumpSpec bump;
    SampleSpec sample;
    bool degenerate = false;  // some form has w(f) = +1 and square level
    std::vector<std::uint64_t> d;
    std::vector<double> weight;  // F(8d/X) / sample.rate

    std::size_t size() const { return d.size(); }
};

/// Odd squarefree d coprime to 2N (2 N1 N2), F(8d/X) > 0, every root number -1.
TwistFamily enumerate_family(const std::vector<FormSpec>& forms, double X, const BumpSpec& bump,
                             const SampleSpec& sample = {});

/// Largest coefficient index any member of a family at X can touch, at Z = 1.
std::uint64_t required_coefficients(const FormSpec& form, double X);

enum class FailurePolicy { skip_and_log, fail_fast };

/// L'(1/2) values by (label, d), reused across an X grid. Not thread-safe.
class LprimeMemo {
public:
    std::optional<double> find(const std::string& label, std::uint64_t d) const;
    void store(const std::string& label, std::uint64_t d, double value);
    std::size_t size() const { return values_.size(); }

private:
    std::map<std::pair<std::string, std::uint64_t>, double> values_;
};

struct MemberFailure {
    std::uint64_t d = 0;
    std::string message;
};

struct EmpiricalOptions {
    unsigned threads = 1;
    FailurePolicy policy = FailurePolicy::skip_and_log;
    LprimeMemo* memo = nullptr;
};

struct EmpiricalResult {
    double value = 0.0;
    std::size_t evaluated = 0;  // members whose values entered the sum
    std::size_t memo_hits = 0;
    std::vector<MemberFailure> failures;
};

/// Weighted sum of L'^2, L'_f L'_g or L' over the family, summed in member
/// order whatever the thread count.
EmpiricalResult empirical_moment(MomentKind kind, const TwistFamily& family,
                                 const std::vector<const CoefficientTable*>& coeffs, const EmpiricalOptions& options);

struct SecondPrediction {
    double leading = 0.0;
    double with_secondary = 0.0;
};
SecondPrediction predicted_second(const ConstantReport& constants, double X);
double predicted_mixed(const ConstantReport& constants, double X);

struct FirstPrediction {
    double leading = 0.0;    // C3 X log(X kappa sqrt(N) / 2pi)
    double full = 0.0;       // C3 X (log(X kappa sqrt(N) / 2pi) + 2 L'/L + Z*'/Z*)
    double u_bracket = 0.0;  // same with X inside the log replaced by U
    double U = 0.0;
};
/// U = X / (log(X kappa N))^(17 (A + 6) / 4) with A = 1.
FirstPrediction predicted_first(const ConstantReport& constants, const FormSpec& form, double X);

struct MomentReport {
    MomentKind kind = MomentKind::second;
    std::vector<std::string> forms;
    double X = 0.0;
    double empirical = 0.0;
    double predicted_leading = 0.0;
    std::optional<double> predicted_with_secondary;
    std::optional<double> ratio;          // empirical over the fullest prediction
    std::optional<double> ratio_leading;  // empirical over predicted_leading
    std::optional<double> predicted_u_bracket;
    std::optional<double> ratio_u_bracket;
    std::optional<double> ratio_change;  // ratio minus the previous grid point's ratio
    std::vector<ConstantReport> constants;
    std::size_t family_size = 0;
    std::size_t evaluated = 0;
    bool degenerate = false;
    std::vector<MemberFailure> failures;
    // provenance
    double runtime_seconds = 0.0;
    unsigned threads = 1;
    double delta = 0.0;
    std::uint64_t prime_limit = 0;
    std::uint64_t n_max = 0;  // coefficients the run needs, whatever table length served them
    std::size_t cache_hits = 0;
    std::size_t memo_hits = 0;
    double sample_rate = 1.0;
    std::uint64_t sample_seed = 0;
    double Z = 1.0;
};

struct ExperimentConfig {
    BumpSpec bump;
    std::uint64_t prime_limit = 100000;
    unsigned threads = 1;
    SampleSpec sample;
    FailurePolicy policy = FailurePolicy::skip_and_log;
    SieveOptions sieve;  // threads is overridden by `threads`
};

/// Supplies a table with n_max >= the requested length.
using CoefficientProvider = std::function<std::shared_ptr<const CoefficientTable>(const FormSpec&, std::uint64_t)>;

/// One report per X. Forms must have eta set. Without a provider the tables
/// are sieved with config.sieve.
std::vector<MomentReport> run_experiment(MomentKind kind, const std::vector<FormSpec>& forms,
                                         const std::vector<double>& xgrid, const ExperimentConfig& config,
                                         const CoefficientProvider& provider = {});

/// JSON object with the MomentReport field names; runtime_seconds is the only
/// field that varies between identical runs.
std::string to_json(const MomentReport& report, bool include_runtime = true);
std::string csv_header();
std::string to_csv_row(const MomentReport& report);
std::string to_json(const ConstantReport& report);

}  // namespace twistlab
