#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "twistlab/eulerprod.hpp"
#include "twistlab/forms.hpp"
#include "twistlab/lfunc.hpp"
#include "twistlab/moments.hpp"
#include "twistlab/verify.hpp"

namespace twistlab {

struct SessionOptions {
    unsigned threads = 1;
    std::string cache_dir;  // empty: no file cache
    std::uint64_t memory_budget = std::uint64_t(2) << 30;
    BumpSpec bump;
    std::uint64_t prime_limit = 100000;
    SampleSpec sample;
    FailurePolicy policy = FailurePolicy::skip_and_log;
};

struct LValueRequest {
    bool derivative = false;
    bool untwisted = false;  // d is ignored; also implied by d = 1
    double Z = 1.0;
    bool check_z_invariance = false;
};

struct LValueResult {
    std::string label;
    std::uint64_t d = 1;
    std::uint64_t D = 1;
    bool untwisted = false;
    bool derivative = false;
    int w = 0;
    double Z = 1.0;
    double value = 0.0;
    double abs_terms = 0.0;
    std::uint64_t length = 0;
    bool checked = false;  // Z-invariance requested
    double Z_other = 0.0;
    double value_other = 0.0;
    double z_difference = 0.0;
};

struct CacheEntry {
    std::string path;
    std::string label;
    std::uint64_t n_max = 0;
    std::uint64_t bytes = 0;
};

/// Memoizes coefficient tables and inferred eta per form. Not thread-safe;
/// the parallelism lives inside each call.
class Session {
public:
    explicit Session(SessionOptions options = {});

    const SessionOptions& options() const { return options_; }

    /// Registry form with eta inferred from AFE self-consistency.
    FormSpec resolve(const std::string& label);
    const EtaInference& eta_inference(const std::string& label);

    /// A table covering n_min: the largest held so far, a cached file, or a new sieve.
    std::shared_ptr<const CoefficientTable> coefficients(const FormSpec& form, std::uint64_t n_min);
    /// Prime limit after the Delta cap.
    std::uint64_t prime_limit_for(const FormSpec& form) const;
    LocalData local(const FormSpec& form);

    ConstantReport constants(MomentKind kind, const std::vector<std::string>& labels);
    LValueResult lvalue(const std::string& label, std::uint64_t d, const LValueRequest& request);
    std::vector<MomentReport> moment(MomentKind kind, const std::vector<std::string>& labels,
                                     const std::vector<double>& xgrid);
    /// suite: gauss, poisson, afe (needs a label).
    SuiteResult verify(const std::string& suite, const std::string& label);

    std::vector<CacheEntry> cache_list() const;
    std::size_t cache_clear();
    CacheEntry cache_warm(const std::string& label, std::uint64_t n_max);

private:
    SieveOptions sieve_options() const;

    SessionOptions options_;
    std::map<std::string, std::shared_ptr<const CoefficientTable>> tables_;
    std::map<std::string, EtaInference> eta_;
};

/// Number of probe twists used by eta inference.
inline constexpr std::size_t kEtaProbes = 10;

std::string to_json(const LValueResult& r);
std::string to_text(const LValueResult& r);

}  // namespace twistlab
