#include "twistlab/twistlab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "twistlab/error.hpp"
#include "twistlab/session.hpp"

struct twl_session {
    twistlab::Session impl;
    std::string error;

    explicit twl_session(twistlab::SessionOptions o) : impl(std::move(o)) {}
};

namespace {

thread_local std::string g_create_error;

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

twl_status code_of(twistlab::ErrorCode c) { return static_cast<twl_status>(static_cast<int>(c)); }

template <class F>
twl_status guarded(twl_session* s, F&& body) {
    if (!s) return TWL_E_INVALID_ARGUMENT;
    s->error.clear();
    try {
        body();
        return TWL_OK;
    } catch (const twistlab::Error& e) {
        s->error = e.what();
        return code_of(e.code());
    } catch (const std::bad_alloc&) {
        s->error = "out of memory";
        return TWL_E_RESOURCE;
    } catch (const std::exception& e) {
        s->error = e.what();
        return TWL_E_INTERNAL;
    }
}

std::string str(const char* p) { return p ? std::string(p) : std::string(); }

std::vector<std::string> labels_of(const char* kind, const char* label, const char* label2) {
    std::vector<std::string> out{str(label)};
    if (std::string(kind ? kind : "") == "mixed") out.push_back(str(label2));
    for (const auto& l : out)
        twistlab::require(!l.empty(), twistlab::ErrorCode::invalid_argument, "missing form label");
    return out;
}

}  // namespace

extern "C" {

int twl_api_version(void) { return TWL_API_VERSION; }

const char* twl_status_name(twl_status status) {
    switch (status) {
        case TWL_OK: return "ok";
        case TWL_E_INVALID_ARGUMENT: return "invalid-argument";
        case TWL_E_DOMAIN: return "domain";
        case TWL_E_RESOURCE: return "resource";
        case TWL_E_CONTRACT: return "contract";
        case TWL_E_PRECISION: return "precision";
        case TWL_E_INCONSISTENT: return "inconsistent";
        case TWL_E_UNKNOWN_FORM: return "unknown-form";
        case TWL_E_IO: return "io";
        case TWL_E_INTERNAL: return "internal";
    }
    return "unknown-status";
}

void twl_config_default(twl_config* c) {
    if (!c) return;
    const twistlab::SessionOptions d;
    c->threads = 0;
    c->cache_dir = nullptr;
    c->memory_budget = d.memory_budget;
    c->delta = d.bump.delta;
    c->prime_limit = d.prime_limit;
    c->sample_rate = 1.0;
    c->sample_seed = 0;
    c->fail_fast = 0;
}

twl_status twl_session_create(const twl_config* config, twl_session** out) {
    if (!out) return TWL_E_INVALID_ARGUMENT;
    *out = nullptr;
    g_create_error.clear();
    twl_config c;
    twl_config_default(&c);
    if (config) c = *config;
    try {
        twistlab::SessionOptions o;
        o.threads = c.threads;
        o.cache_dir = str(c.cache_dir);
        o.memory_budget = c.memory_budget;
        o.bump.delta = c.delta;
        o.prime_limit = c.prime_limit;
        o.sample.rate = c.sample_rate;
        o.sample.seed = c.sample_seed;
        o.policy = c.fail_fast ? twistlab::FailurePolicy::fail_fast : twistlab::FailurePolicy::skip_and_log;
        *out = new twl_session(std::move(o));
        return TWL_OK;
    } catch (const twistlab::Error& e) {
        g_create_error = e.what();
        return code_of(e.code());
    } catch (const std::exception& e) {
        g_create_error = e.what();
        return TWL_E_INTERNAL;
    }
}

void twl_session_destroy(twl_session* s) { delete s; }

const char* twl_last_error(const twl_session* s) { return s ? s->error.c_str() : "null session"; }

const char* twl_create_error(void) { return g_create_error.c_str(); }

const char* twl_registry_labels(void) {
    static const std::string labels = [] {
        std::string out;
        for (const auto& f : twistlab::registry()) out += (out.empty() ? "" : ",") + f.label;
        return out;
    }();
    return labels.c_str();
}

twl_status twl_form_info_get(twl_session* s, const char* label, twl_form_info* out) {
    return guarded(s, [&] {
        twistlab::require(out != nullptr, twistlab::ErrorCode::invalid_argument, "null output");
        const auto f = s->impl.resolve(str(label));
        const auto& inf = s->impl.eta_inference(str(label));
        out->kappa = f.kappa;
        out->level = f.level;
        out->eta = f.eta;
        out->root_number = f.sign();
        out->eta_residual = inf.worst_plus;
        out->eta_rejected_residual = inf.worst_other;
    });
}

twl_status twl_constants(twl_session* s, const char* kind, const char* label, const char* label2, twl_format format,
                         char** out) {
    return guarded(s, [&] {
        twistlab::require(out != nullptr, twistlab::ErrorCode::invalid_argument, "null output");
        const auto k = twistlab::parse_moment_kind(str(kind));
        const auto r = s->impl.constants(k, labels_of(kind, label, label2));
        *out = dup(format == TWL_FORMAT_JSON ? twistlab::to_json(r) : r.to_text());
    });
}

twl_status twl_lvalue_eval(twl_session* s, const char* label, uint64_t d, double Z, int flags, twl_lvalue* out) {
    return guarded(s, [&] {
        twistlab::require(out != nullptr, twistlab::ErrorCode::invalid_argument, "null output");
        twistlab::LValueRequest req;
        req.derivative = flags & TWL_LV_DERIV;
        req.untwisted = flags & TWL_LV_UNTWISTED;
        req.check_z_invariance = flags & TWL_LV_CHECK_Z;
        req.Z = Z;
        const auto r = s->impl.lvalue(str(label), d, req);
        out->d = r.d;
        out->D = r.D;
        out->untwisted = r.untwisted;
        out->root_number = r.w;
        out->Z = r.Z;
        out->value = r.value;
        out->abs_terms = r.abs_terms;
        out->length = r.length;
        out->checked = r.checked;
        out->Z_other = r.Z_other;
        out->value_other = r.value_other;
        out->z_difference = r.z_difference;
    });
}

twl_status twl_moment(twl_session* s, const char* kind, const char* label, const char* label2, const double* xgrid,
                      size_t count, int include_runtime, char** jsonl, char** csv) {
    return guarded(s, [&] {
        twistlab::require(xgrid != nullptr && count > 0, twistlab::ErrorCode::invalid_argument, "empty X grid");
        const auto k = twistlab::parse_moment_kind(str(kind));
        const auto reports = s->impl.moment(k, labels_of(kind, label, label2), std::vector<double>(xgrid, xgrid + count));
        std::string j, c = twistlab::csv_header() + "\n";
        for (const auto& r : reports) {
            j += twistlab::to_json(r, include_runtime != 0) + "\n";
            c += twistlab::to_csv_row(r) + "\n";
        }
        if (jsonl) *jsonl = dup(j);
        if (csv) *csv = dup(c);
    });
}

twl_status twl_verify(twl_session* s, const char* suite, const char* label, twl_format format, char** out,
                      int* passed) {
    return guarded(s, [&] {
        const auto r = s->impl.verify(str(suite), str(label));
        if (passed) *passed = r.passed() ? 1 : 0;
        if (out) *out = dup(format == TWL_FORMAT_JSON ? r.to_json() : r.to_text());
    });
}

twl_status twl_cache_list(twl_session* s, char** out) {
    return guarded(s, [&] {
        twistlab::require(out != nullptr, twistlab::ErrorCode::invalid_argument, "null output");
        std::ostringstream os;
        for (const auto& e : s->impl.cache_list())
            os << e.label << '\t' << e.n_max << '\t' << e.bytes << '\t' << e.path << '\n';
        *out = dup(os.str());
    });
}

twl_status twl_cache_clear(twl_session* s, size_t* removed) {
    return guarded(s, [&] {
        const std::size_t n = s->impl.cache_clear();
        if (removed) *removed = n;
    });
}

twl_status twl_cache_warm(twl_session* s, const char* label, uint64_t n_max, char** path) {
    return guarded(s, [&] {
        const auto e = s->impl.cache_warm(str(label), n_max);
        if (path) *path = dup(e.path);
    });
}

void twl_string_free(char* p) { std::free(p); }

}  // extern "C"
