#pragma once

/**
 * @file harness.hpp
 * @brief Configuration ingestion, energy-grid sweeps, verification suites,
 *        and result emission.
 *
 * A sweep is described by a TOML-compatible config with four parts: the
 * problem (which Weyl function), the coupling (which boundary parameter or
 * lead family), the energy grid, and the requested outputs. Each grid point
 * becomes one SweepRow carrying the requested matrices/residuals plus
 * diagnostics; rows are computed independently (optionally in parallel) and
 * always assembled in ascending-λ order, so identical configs produce
 * identical output bytes regardless of worker count.
 *
 * Grid points where a guard fires (Dirichlet pole, singular solve, condition
 * number above cond_max) are flagged, never nudged and never silently
 * extrapolated; under the abort policy the first offending point stops the
 * sweep instead.
 *
 * The verification suites re-run the library's identity checks (unitarity,
 * Adamyan–Arov, the λ=μ coincidence of the coupled and energy-parameterized
 * scattering matrices, Nevanlinna properties, Wronskian conservation, and
 * closed-form/dual-path oracles) over a config's grid and report
 * machine-readable pass/fail results.
 */

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "herglotz.hpp"
#include "matkit.hpp"
#include "relspace.hpp"
#include "scatter.hpp"
#include "sturm.hpp"

namespace weylscatter {

// ---------------------------------------------------------------------------
// Config model
// ---------------------------------------------------------------------------

struct GridSpec {
    double min = 0.0;
    double max = 1.0;
    int count = 1;
    enum class Scale { linear, log };
    Scale scale = Scale::linear;

    std::vector<double> points() const {
        std::vector<double> xs;
        xs.reserve(static_cast<std::size_t>(count));
        if (count == 1) {
            xs.push_back(min);
            return xs;
        }
        if (scale == Scale::linear) {
            const double h = (max - min) / (count - 1);
            for (int i = 0; i < count; ++i) xs.push_back(min + i * h);
        } else {
            const double a = std::log(min), b = std::log(max);
            const double h = (b - a) / (count - 1);
            for (int i = 0; i < count; ++i) xs.push_back(std::exp(a + i * h));
        }
        return xs;
    }
};

struct GuardSpec {
    double tol_pole = 1e-10;
    double cond_max = 1e12;
    enum class Policy { skip_and_flag, abort };
    Policy policy = Policy::skip_and_flag;
};

struct ProblemSpec {
    enum class Type { sl, delta, const_interval };
    Type type = Type::delta;
    double x_l = 0.0, x_r = 1.0;
    std::optional<CoefficientProfile> mass;
    std::optional<CoefficientProfile> potential;

    /// Boundary-space dimension of the problem's Weyl function.
    int dim() const { return type == Type::delta ? 1 : 2; }
};

struct CouplingSpec {
    enum class Type { dissipative, leads, energy_dep };
    Type type = Type::dissipative;
    CMatrix D;                    ///< dissipative boundary parameter
    double v_l = 0.0, v_r = 0.0;  ///< lead thresholds
    double m_l = 0.5, m_r = 0.5;  ///< lead masses
    std::vector<double> mu_list;  ///< fixed energies for the parameterized family
};

/// Output kinds a sweep can request.
enum class OutputKind {
    weyl,
    s_dilation,
    s_dissipative,
    s_laxphillips,
    s_coupled,
    s_energydep,
    char_function,
    residual_adamyan_arov,
    residual_theorem_main,
    residual_relation_consistency,
    eigenvalues,
};

inline const char* output_kind_name(OutputKind k) {
    switch (k) {
        case OutputKind::weyl: return "weyl";
        case OutputKind::s_dilation: return "s_dilation";
        case OutputKind::s_dissipative: return "s_dissipative";
        case OutputKind::s_laxphillips: return "s_laxphillips";
        case OutputKind::s_coupled: return "s_coupled";
        case OutputKind::s_energydep: return "s_energydep";
        case OutputKind::char_function: return "char_function";
        case OutputKind::residual_adamyan_arov: return "residual_adamyan_arov";
        case OutputKind::residual_theorem_main: return "residual_theorem_main";
        case OutputKind::residual_relation_consistency: return "residual_relation_consistency";
        case OutputKind::eigenvalues: return "eigenvalues";
    }
    return "unknown";
}

struct SweepConfig {
    ProblemSpec problem;
    CouplingSpec coupling;
    GridSpec grid;
    GuardSpec guards;
    std::vector<OutputKind> outputs;
    enum class Format { csv, jsonl };
    Format format = Format::csv;
    std::string out_path = "-";
};

// ---------------------------------------------------------------------------
// TOML-compatible parsing (the subset the schema needs: sections, dotted
// keys, numbers, strings, nested arrays; arrays may span lines)
// ---------------------------------------------------------------------------

namespace detail {

struct TomlValue {
    enum class Kind { number, string, array };
    Kind kind = Kind::number;
    double num = 0.0;
    std::string str;
    std::vector<TomlValue> items;
    int line = 0;
};

class TomlParser {
public:
    explicit TomlParser(const std::string& text) : s_(text) {}

    std::map<std::string, TomlValue> parse() {
        std::map<std::string, TomlValue> out;
        std::string section;
        for (;;) {
            skip_space_and_comments(true);
            if (eof()) break;
            if (peek() == '[') {
                get();
                section = bare_key();
                skip_space_and_comments(false);
                if (eof() || get() != ']') fail("expected ']' closing section header");
                continue;
            }
            std::string key = bare_key();
            skip_space_and_comments(false);
            if (eof() || get() != '=') fail("expected '=' after key '" + key + "'");
            TomlValue v = value();
            const std::string path = section.empty() ? key : section + "." + key;
            if (out.count(path)) fail("duplicate key '" + path + "'");
            out[path] = std::move(v);
        }
        return out;
    }

private:
    bool eof() const { return i_ >= s_.size(); }
    char peek() const { return s_[i_]; }
    char get() {
        const char c = s_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(errc::parse_error,
                    msg + " at line " + std::to_string(line_) + ", column " + std::to_string(col_));
    }

    void skip_space_and_comments(bool cross_lines) {
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') {
                get();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else if (c == '\n' && cross_lines) {
                get();
            } else {
                break;
            }
        }
    }

    std::string bare_key() {
        skip_space_and_comments(false);
        std::string k;
        while (!eof()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') {
                k.push_back(get());
            } else {
                break;
            }
        }
        if (k.empty()) fail("expected a key");
        return k;
    }

    TomlValue value() {
        skip_space_and_comments(true);  // values may start on the next line
        if (eof()) fail("expected a value");
        TomlValue v;
        v.line = line_;
        const char c = peek();
        if (c == '"') {
            get();
            v.kind = TomlValue::Kind::string;
            while (!eof() && peek() != '"') {
                char d = get();
                if (d == '\\' && !eof()) d = get();
                v.str.push_back(d);
            }
            if (eof()) fail("unterminated string");
            get();
        } else if (c == '[') {
            get();
            v.kind = TomlValue::Kind::array;
            skip_space_and_comments(true);
            while (!eof() && peek() != ']') {
                v.items.push_back(value());
                skip_space_and_comments(true);
                if (!eof() && peek() == ',') {
                    get();
                    skip_space_and_comments(true);
                }
            }
            if (eof()) fail("unterminated array");
            get();
        } else {
            std::string tok;
            while (!eof()) {
                const char d = peek();
                if (std::isspace(static_cast<unsigned char>(d)) || d == ',' || d == ']' || d == '#') break;
                tok.push_back(get());
            }
            if (tok.empty()) fail("expected a value");
            try {
                std::size_t used = 0;
                v.num = std::stod(tok, &used);
                if (used != tok.size()) fail("malformed number '" + tok + "'");
            } catch (const Error&) {
                throw;
            } catch (...) {
                fail("malformed number '" + tok + "'");
            }
            if (!std::isfinite(v.num)) fail("non-finite number '" + tok + "'");
        }
        return v;
    }

    const std::string& s_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

[[noreturn]] inline void invalid(const std::string& field, const std::string& why) {
    throw Error(errc::validation_error, "field '" + field + "': " + why);
}

inline const TomlValue* find(const std::map<std::string, TomlValue>& kv, const std::string& key) {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
}

inline double want_number(const std::map<std::string, TomlValue>& kv, const std::string& key) {
    const TomlValue* v = find(kv, key);
    if (!v) invalid(key, "missing");
    if (v->kind != TomlValue::Kind::number) invalid(key, "expected a number");
    return v->num;
}

inline double number_or(const std::map<std::string, TomlValue>& kv, const std::string& key, double dflt) {
    const TomlValue* v = find(kv, key);
    if (!v) return dflt;
    if (v->kind != TomlValue::Kind::number) invalid(key, "expected a number");
    return v->num;
}

inline std::string want_string(const std::map<std::string, TomlValue>& kv, const std::string& key) {
    const TomlValue* v = find(kv, key);
    if (!v) invalid(key, "missing");
    if (v->kind != TomlValue::Kind::string) invalid(key, "expected a string");
    return v->str;
}

inline std::string string_or(const std::map<std::string, TomlValue>& kv, const std::string& key,
                             const std::string& dflt) {
    const TomlValue* v = find(kv, key);
    if (!v) return dflt;
    if (v->kind != TomlValue::Kind::string) invalid(key, "expected a string");
    return v->str;
}

inline int want_int(const std::map<std::string, TomlValue>& kv, const std::string& key) {
    const double x = want_number(kv, key);
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9) invalid(key, "expected an integer");
    return static_cast<int>(r);
}

/// [[a, b], [c, d], …] → list of pairs.
inline std::vector<std::pair<double, double>> want_pair_list(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::array) invalid(key, "expected an array of [a, b] pairs");
    std::vector<std::pair<double, double>> out;
    for (const TomlValue& row : v.items) {
        if (row.kind != TomlValue::Kind::array || row.items.size() != 2 ||
            row.items[0].kind != TomlValue::Kind::number || row.items[1].kind != TomlValue::Kind::number)
            invalid(key, "each entry must be a pair of numbers");
        out.emplace_back(row.items[0].num, row.items[1].num);
    }
    if (out.empty()) invalid(key, "must not be empty");
    return out;
}

/// Nested [[ [re,im], … ], …] → square complex matrix.
inline CMatrix want_matrix(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::array || v.items.empty())
        invalid(key, "expected a nested array of [re, im] pairs");
    const int n = static_cast<int>(v.items.size());
    CMatrix A(n, n);
    for (int i = 0; i < n; ++i) {
        const TomlValue& row = v.items[static_cast<std::size_t>(i)];
        if (row.kind != TomlValue::Kind::array || static_cast<int>(row.items.size()) != n)
            invalid(key, "matrix must be square");
        for (int j = 0; j < n; ++j) {
            const TomlValue& e = row.items[static_cast<std::size_t>(j)];
            if (e.kind != TomlValue::Kind::array || e.items.size() != 2 ||
                e.items[0].kind != TomlValue::Kind::number || e.items[1].kind != TomlValue::Kind::number)
                invalid(key, "entries must be [re, im] pairs");
            A(i, j) = cplx(e.items[0].num, e.items[1].num);
        }
    }
    return A;
}

inline CoefficientProfile want_profile(const std::map<std::string, TomlValue>& kv, const std::string& base) {
    const TomlValue* segs = find(kv, base + ".segments");
    const TomlValue* samp = find(kv, base + ".samples");
    if (segs && samp) invalid(base, "give segments or samples, not both");
    if (segs) return CoefficientProfile::piecewise(want_pair_list(*segs, base + ".segments"));
    if (samp)
        return CoefficientProfile::sampled(want_pair_list(*samp, base + ".samples"),
                                           CoefficientProfile::Interpolation::step);
    invalid(base, "missing (need " + base + ".segments or " + base + ".samples)");
}

}  // namespace detail

/**
 * @brief Parse and validate a sweep config. Defaults filled: guards
 *        (tol_pole 1e-10, cond_max 1e12, skip_and_flag), grid.scale linear,
 *        output (kinds [], format csv, path "-").
 *
 * Throws parse_error with line/column for malformed text, validation_error
 * naming the offending field otherwise.
 */
inline SweepConfig load_config(const std::string& text) {
    using detail::TomlValue;
    const std::map<std::string, TomlValue> kv = detail::TomlParser(text).parse();

    static const std::set<std::string> known = {
        "problem.type",          "problem.x_l",
        "problem.x_r",           "problem.mass.segments",
        "problem.mass.samples",  "problem.potential.segments",
        "problem.potential.samples", "coupling.type",
        "coupling.D",            "coupling.v_l",
        "coupling.v_r",          "coupling.m_l",
        "coupling.m_r",          "coupling.mu_list",
        "grid.min",              "grid.max",
        "grid.count",            "grid.scale",
        "guards.tol_pole",       "guards.cond_max",
        "guards.skip_policy",    "output.kinds",
        "output.format",         "output.path",
    };
    for (const auto& [key, val] : kv)
        if (!known.count(key)) detail::invalid(key, "unknown key");

    SweepConfig cfg;

    // [problem]
    const std::string ptype = detail::want_string(kv, "problem.type");
    if (ptype == "delta") {
        cfg.problem.type = ProblemSpec::Type::delta;
    } else if (ptype == "sl" || ptype == "const_interval") {
        cfg.problem.type = ptype == "sl" ? ProblemSpec::Type::sl : ProblemSpec::Type::const_interval;
        cfg.problem.x_l = detail::want_number(kv, "problem.x_l");
        cfg.problem.x_r = detail::want_number(kv, "problem.x_r");
        if (!(cfg.problem.x_l < cfg.problem.x_r)) detail::invalid("problem.x_l", "need x_l < x_r");
        try {
            cfg.problem.mass = detail::want_profile(kv, "problem.mass");
            cfg.problem.potential = detail::want_profile(kv, "problem.potential");
        } catch (const Error& e) {
            if (e.code() == errc::invalid_profile || e.code() == errc::non_finite)
                detail::invalid("problem", e.what());
            throw;
        }
        if (cfg.problem.type == ProblemSpec::Type::const_interval) {
            const auto& m = *cfg.problem.mass;
            const auto& V = *cfg.problem.potential;
            if (m.kind != CoefficientProfile::Kind::piecewise_constant || m.segments.size() != 1)
                detail::invalid("problem.mass", "const_interval needs exactly one constant segment");
            if (V.kind != CoefficientProfile::Kind::piecewise_constant || V.segments.size() != 1)
                detail::invalid("problem.potential", "const_interval needs exactly one constant segment");
        }
    } else {
        detail::invalid("problem.type", "expected sl, delta, or const_interval");
    }

    // [coupling]
    const std::string ctype = detail::want_string(kv, "coupling.type");
    if (ctype == "dissipative") {
        cfg.coupling.type = CouplingSpec::Type::dissipative;
        const TomlValue* d = detail::find(kv, "coupling.D");
        if (!d) detail::invalid("coupling.D", "missing");
        cfg.coupling.D = detail::want_matrix(*d, "coupling.D");
        if (cfg.coupling.D.rows() != cfg.problem.dim())
            detail::invalid("coupling.D", "dimension must match the problem boundary space (" +
                                               std::to_string(cfg.problem.dim()) + ")");
        try {
            dilation_relation(cfg.coupling.D);
        } catch (const Error& e) {
            detail::invalid("coupling.D", e.what());
        }
    } else if (ctype == "leads" || ctype == "energy_dep") {
        cfg.coupling.type =
            ctype == "leads" ? CouplingSpec::Type::leads : CouplingSpec::Type::energy_dep;
        if (cfg.problem.dim() != 2)
            detail::invalid("coupling.type", "lead coupling needs a two-sided (interval) problem");
        cfg.coupling.v_l = detail::want_number(kv, "coupling.v_l");
        cfg.coupling.v_r = detail::want_number(kv, "coupling.v_r");
        cfg.coupling.m_l = detail::want_number(kv, "coupling.m_l");
        cfg.coupling.m_r = detail::want_number(kv, "coupling.m_r");
        if (!(cfg.coupling.m_l > 0.0)) detail::invalid("coupling.m_l", "must be positive");
        if (!(cfg.coupling.m_r > 0.0)) detail::invalid("coupling.m_r", "must be positive");
        if (cfg.coupling.type == CouplingSpec::Type::energy_dep) {
            const TomlValue* mus = detail::find(kv, "coupling.mu_list");
            if (!mus || mus->kind != TomlValue::Kind::array || mus->items.empty())
                detail::invalid("coupling.mu_list", "need a non-empty array of energies");
            for (const TomlValue& m : mus->items) {
                if (m.kind != TomlValue::Kind::number) detail::invalid("coupling.mu_list", "entries must be numbers");
                cfg.coupling.mu_list.push_back(m.num);
            }
        }
    } else {
        detail::invalid("coupling.type", "expected dissipative, leads, or energy_dep");
    }

    // [grid]
    cfg.grid.min = detail::want_number(kv, "grid.min");
    cfg.grid.max = detail::want_number(kv, "grid.max");
    cfg.grid.count = detail::want_int(kv, "grid.count");
    if (!(cfg.grid.min < cfg.grid.max)) detail::invalid("grid.min", "need min < max");
    if (cfg.grid.count < 1) detail::invalid("grid.count", "need count >= 1");
    const std::string scale = detail::string_or(kv, "grid.scale", "linear");
    if (scale == "linear") {
        cfg.grid.scale = GridSpec::Scale::linear;
    } else if (scale == "log") {
        cfg.grid.scale = GridSpec::Scale::log;
        if (!(cfg.grid.min > 0.0)) detail::invalid("grid.scale", "log scale needs min > 0");
    } else {
        detail::invalid("grid.scale", "expected linear or log");
    }

    // [guards]
    cfg.guards.tol_pole = detail::number_or(kv, "guards.tol_pole", 1e-10);
    cfg.guards.cond_max = detail::number_or(kv, "guards.cond_max", 1e12);
    if (!(cfg.guards.tol_pole > 0.0)) detail::invalid("guards.tol_pole", "must be positive");
    if (!(cfg.guards.cond_max > 1.0)) detail::invalid("guards.cond_max", "must exceed 1");
    const std::string policy = detail::string_or(kv, "guards.skip_policy", "skip_and_flag");
    if (policy == "skip_and_flag") {
        cfg.guards.policy = GuardSpec::Policy::skip_and_flag;
    } else if (policy == "abort") {
        cfg.guards.policy = GuardSpec::Policy::abort;
    } else {
        detail::invalid("guards.skip_policy", "expected skip_and_flag or abort");
    }

    // [output]
    if (const TomlValue* kinds = detail::find(kv, "output.kinds")) {
        if (kinds->kind != TomlValue::Kind::array) detail::invalid("output.kinds", "expected an array");
        for (const TomlValue& k : kinds->items) {
            if (k.kind != TomlValue::Kind::string) detail::invalid("output.kinds", "entries must be strings");
            bool matched = false;
            for (OutputKind ok : {OutputKind::weyl, OutputKind::s_dilation, OutputKind::s_dissipative,
                                  OutputKind::s_laxphillips, OutputKind::s_coupled, OutputKind::s_energydep,
                                  OutputKind::char_function, OutputKind::residual_adamyan_arov,
                                  OutputKind::residual_theorem_main,
                                  OutputKind::residual_relation_consistency, OutputKind::eigenvalues}) {
                if (k.str == output_kind_name(ok)) {
                    cfg.outputs.push_back(ok);
                    matched = true;
                    break;
                }
            }
            if (!matched) detail::invalid("output.kinds", "unknown kind '" + k.str + "'");
        }
    }
    const std::string fmt = detail::string_or(kv, "output.format", "csv");
    if (fmt == "csv") {
        cfg.format = SweepConfig::Format::csv;
    } else if (fmt == "jsonl") {
        cfg.format = SweepConfig::Format::jsonl;
    } else {
        detail::invalid("output.format", "expected csv or jsonl");
    }
    cfg.out_path = detail::string_or(kv, "output.path", "-");

    // Output/coupling compatibility.
    const bool has_D = cfg.coupling.type == CouplingSpec::Type::dissipative;
    const bool has_leads = !has_D;
    for (OutputKind k : cfg.outputs) {
        const bool needs_D = k == OutputKind::s_dilation || k == OutputKind::s_dissipative ||
                             k == OutputKind::s_laxphillips || k == OutputKind::char_function;
        const bool needs_leads = k == OutputKind::s_coupled || k == OutputKind::s_energydep ||
                                 k == OutputKind::residual_theorem_main;
        if (needs_D && !has_D)
            detail::invalid("output.kinds", std::string(output_kind_name(k)) + " needs coupling.type = dissipative");
        if (needs_leads && !has_leads)
            detail::invalid("output.kinds", std::string(output_kind_name(k)) + " needs lead coupling");
        if (k == OutputKind::s_energydep && cfg.coupling.type != CouplingSpec::Type::energy_dep)
            detail::invalid("output.kinds", "s_energydep needs coupling.type = energy_dep");
        if (k == OutputKind::eigenvalues && cfg.problem.type == ProblemSpec::Type::delta)
            detail::invalid("output.kinds", "eigenvalues needs an interval problem");
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

/// One computed output slot of a row: a labeled matrix set or a scalar.
struct OutputCell {
    std::string label;           ///< expanded kind, e.g. "s_energydep_mu0"
    bool present = false;        ///< false when skipped/guarded (see row flags)
    bool scalar = false;
    double value = 0.0;          ///< scalar residual value
    std::vector<CMatrix> blocks; ///< matrix blocks, parallel to the layout slot
};

/// One grid point's results and diagnostics.
struct SweepRow {
    double lambda = 0.0;
    std::vector<OutputCell> cells;
    double unitarity_defect = 0.0;
    double contraction_excess = 0.0;
    double cond = 1.0;
    int rank_M = 0;
    int rank_tau = 0;
    std::vector<std::string> flags;
};

/// Fixed column allocation of one output slot (CSV columns never vary by row;
/// blocks smaller than the allocation leave trailing cells empty).
struct BlockLayout {
    std::string label;  ///< "00", "01", "10", "11"
    int rows = 0, cols = 0;
};

struct OutputSlot {
    OutputKind kind = OutputKind::weyl;
    int mu_index = -1;   ///< ≥ 0 for s_energydep expansion
    std::string label;   ///< column-group name
    bool scalar = false;
    std::vector<BlockLayout> blocks;
};

/// Sweep result: ordered rows plus grid-independent metadata.
struct SweepOutput {
    std::vector<SweepRow> rows;
    std::vector<OutputSlot> layout;
    std::vector<double> eigenvalues;  ///< filled iff eigenvalues requested
    bool has_eigenvalues = false;
};

namespace detail {

/// Evaluation context shared by all rows of one sweep.
struct SweepContext {
    const SweepConfig& cfg;
    HerglotzFamily m_family;
    std::optional<HerglotzFamily> tau_family;
    std::optional<SLProblem> sl;
    int hd_rank = 0;                 ///< rank of H_D for a dissipative coupling
    std::vector<CMatrix> tau_at_mu;  ///< τ(μ_k) boundary values, energy_dep only
};

inline SLProblem build_sl_problem(const ProblemSpec& p) {
    return SLProblem(p.x_l, p.x_r, *p.mass, *p.potential);
}

inline SweepContext build_context(const SweepConfig& cfg) {
    SweepContext ctx{cfg, {}, {}, {}, 0, {}};
    switch (cfg.problem.type) {
        case ProblemSpec::Type::delta:
            ctx.m_family = delta_weyl_family();
            break;
        case ProblemSpec::Type::const_interval: {
            ctx.sl = build_sl_problem(cfg.problem);
            const double L = cfg.problem.x_r - cfg.problem.x_l;
            ctx.m_family = const_interval_weyl_family(L, cfg.problem.potential->segments[0].second,
                                                      cfg.problem.mass->segments[0].second);
            break;
        }
        case ProblemSpec::Type::sl:
            ctx.sl = build_sl_problem(cfg.problem);
            ctx.m_family = sl_weyl_family(*ctx.sl, cfg.guards.tol_pole);
            break;
    }
    if (cfg.coupling.type == CouplingSpec::Type::dissipative) {
        ctx.hd_rank = dilation_relation(cfg.coupling.D).hd_rank;
    } else {
        ctx.tau_family =
            lead_tau_family(cfg.coupling.v_l, cfg.coupling.v_r, cfg.coupling.m_l, cfg.coupling.m_r);
        for (double mu : cfg.coupling.mu_list)
            ctx.tau_at_mu.push_back(boundary_value(*ctx.tau_family, mu));
    }
    return ctx;
}

inline std::vector<OutputSlot> build_layout(const SweepConfig& cfg, const SweepContext& ctx) {
    std::vector<OutputSlot> slots;
    const int n = cfg.problem.dim();
    const int rd = ctx.hd_rank;
    const auto two_channel = [](int ra, int rb) {
        return std::vector<BlockLayout>{{"00", ra, ra}, {"01", ra, rb}, {"10", rb, ra}, {"11", rb, rb}};
    };
    for (OutputKind k : cfg.outputs) {
        if (k == OutputKind::eigenvalues) continue;  // metadata, not a per-row slot
        OutputSlot slot;
        slot.kind = k;
        slot.label = output_kind_name(k);
        switch (k) {
            case OutputKind::weyl:
                slot.blocks = {{"00", n, n}};
                break;
            case OutputKind::s_dilation:
                slot.blocks = two_channel(n, rd);
                break;
            case OutputKind::s_dissipative:
                slot.blocks = {{"00", n, n}};
                break;
            case OutputKind::s_laxphillips:
            case OutputKind::char_function:
                slot.blocks = {{"00", rd, rd}};
                break;
            case OutputKind::s_coupled:
                slot.blocks = two_channel(n, 2);
                break;
            case OutputKind::s_energydep:
                for (std::size_t kmu = 0; kmu < ctx.tau_at_mu.size(); ++kmu) {
                    OutputSlot mslot;
                    mslot.kind = k;
                    mslot.mu_index = static_cast<int>(kmu);
                    mslot.label = "s_energydep_mu" + std::to_string(kmu);
                    const int rk = make_channel(imag_part(ctx.tau_at_mu[kmu]), 1e-10, "").rank;
                    mslot.blocks = two_channel(n, rk);
                    slots.push_back(std::move(mslot));
                }
                continue;
            case OutputKind::residual_adamyan_arov:
            case OutputKind::residual_theorem_main:
            case OutputKind::residual_relation_consistency:
                slot.scalar = true;
                break;
            case OutputKind::eigenvalues:
                continue;
        }
        slots.push_back(std::move(slot));
    }
    return slots;
}

/// Track the row-level diagnostic aggregates from one scattering result.
inline void absorb_diagnostics(SweepRow& row, const ScatteringMatrix& sm, bool unitary_kind) {
    if (unitary_kind) row.unitarity_defect = std::max(row.unitarity_defect, sm.unitarity_defect);
    row.contraction_excess = std::max(row.contraction_excess, sm.contraction_excess);
    row.cond = std::max(row.cond, sm.cond);
}

inline SweepRow compute_row(const SweepContext& ctx, const std::vector<OutputSlot>& layout,
                            double lambda) {
    const SweepConfig& cfg = ctx.cfg;
    SweepRow row;
    row.lambda = lambda;
    row.cells.reserve(layout.size());

    const auto guard_fail = [&](const std::string& where, const Error& e) {
        row.flags.push_back(where + ":" + errc_name(e.code()));
        if (cfg.guards.policy == GuardSpec::Policy::abort)
            throw Error(errc::aborted,
                        "guard fired at lambda=" + std::to_string(lambda) + " (" + where + "): " + e.what());
    };

    // Boundary value of the problem's Weyl function at λ+i0.
    CMatrix M;
    bool m_ok = false;
    if (!ctx.m_family.real_domain(lambda)) {
        guard_fail("weyl_domain", Error(errc::near_pole, "lambda outside the evaluable real domain"));
    } else {
        try {
            M = boundary_value(ctx.m_family, lambda);
            m_ok = true;
        } catch (const Error& e) {
            guard_fail("weyl_eval", e);
        }
    }
    if (m_ok) row.rank_M = make_channel(imag_part(M), 1e-10, "").rank;

    CMatrix tau;
    bool tau_ok = false;
    if (ctx.tau_family) {
        tau = boundary_value(*ctx.tau_family, lambda);
        tau_ok = true;
        row.rank_tau = make_channel(imag_part(tau), 1e-10, "").rank;
    } else {
        row.rank_tau = ctx.hd_rank;
    }

    for (const OutputSlot& slot : layout) {
        OutputCell cell;
        cell.label = slot.label;
        cell.scalar = slot.scalar;
        if (!m_ok) {
            row.flags.push_back(slot.label + ":skipped");
            row.cells.push_back(std::move(cell));
            continue;
        }
        try {
            switch (slot.kind) {
                case OutputKind::weyl: {
                    cell.blocks = {M};
                    cell.present = true;
                    break;
                }
                case OutputKind::s_dilation: {
                    ScatteringMatrix sm = s_dilation(M, cfg.coupling.D);
                    if (sm.cond > cfg.guards.cond_max)
                        throw Error(errc::singular, "condition number above cond_max");
                    absorb_diagnostics(row, sm, true);
                    cell.blocks = {sm.blocks[0][0], sm.blocks[0][1], sm.blocks[1][0], sm.blocks[1][1]};
                    cell.present = true;
                    break;
                }
                case OutputKind::s_dissipative: {
                    ScatteringMatrix sm = s_dissipative(M, cfg.coupling.D);
                    if (sm.cond > cfg.guards.cond_max)
                        throw Error(errc::singular, "condition number above cond_max");
                    absorb_diagnostics(row, sm, false);
                    cell.blocks = {sm.value};
                    cell.present = true;
                    break;
                }
                case OutputKind::s_laxphillips: {
                    ScatteringMatrix sm = s_laxphillips(M, cfg.coupling.D);
                    if (sm.cond > cfg.guards.cond_max)
                        throw Error(errc::singular, "condition number above cond_max");
                    absorb_diagnostics(row, sm, false);
                    cell.blocks = {sm.value};
                    cell.present = true;
                    break;
                }
                case OutputKind::char_function: {
                    const CMatrix W = char_function(M.adjoint(), cfg.coupling.D);
                    row.contraction_excess =
                        std::max(row.contraction_excess, std::max(0.0, spectral_norm(W) - 1.0));
                    cell.blocks = {W};
                    cell.present = true;
                    break;
                }
                case OutputKind::s_coupled: {
                    if (!tau_ok) throw Error(errc::evaluation_failed, "lead function unavailable");
                    ScatteringMatrix sm = s_coupled(M, tau);
                    if (sm.cond > cfg.guards.cond_max)
                        throw Error(errc::singular, "condition number above cond_max");
                    absorb_diagnostics(row, sm, true);
                    cell.blocks = {sm.blocks[0][0], sm.blocks[0][1], sm.blocks[1][0], sm.blocks[1][1]};
                    cell.present = true;
                    break;
                }
                case OutputKind::s_energydep: {
                    ScatteringMatrix sm =
                        s_energydep(M, ctx.tau_at_mu[static_cast<std::size_t>(slot.mu_index)]);
                    if (sm.cond > cfg.guards.cond_max)
                        throw Error(errc::singular, "condition number above cond_max");
                    absorb_diagnostics(row, sm, true);
                    cell.blocks = {sm.blocks[0][0], sm.blocks[0][1], sm.blocks[1][0], sm.blocks[1][1]};
                    cell.present = true;
                    break;
                }
                case OutputKind::residual_adamyan_arov: {
                    cell.value = ctx.tau_family
                                     ? residual_adamyan_arov_energydep(ctx.m_family, *ctx.tau_family, lambda)
                                     : residual_adamyan_arov(ctx.m_family, cfg.coupling.D, lambda);
                    cell.present = true;
                    break;
                }
                case OutputKind::residual_theorem_main: {
                    cell.value = residual_theorem_main(ctx.m_family, *ctx.tau_family, lambda);
                    cell.present = true;
                    break;
                }
                case OutputKind::residual_relation_consistency: {
                    cell.value = ctx.tau_family
                                     ? residual_relation_consistency(M, tau, RelationRoute::coupling)
                                     : residual_relation_consistency(M, cfg.coupling.D, RelationRoute::dilation);
                    cell.present = true;
                    break;
                }
                case OutputKind::eigenvalues:
                    break;
            }
        } catch (const Error& e) {
            if (e.code() == errc::aborted) throw;
            cell.present = false;
            cell.blocks.clear();
            guard_fail(slot.label, e);
        }
        row.cells.push_back(std::move(cell));
    }
    return row;
}

}  // namespace detail

/**
 * @brief Run a sweep: one row per grid point, ascending λ, deterministic
 *        regardless of worker count (jobs 0 = hardware default, 1 = serial).
 *
 * Guarded points carry flags instead of values under skip_and_flag; under
 * abort, the lowest-λ offending point raises errc::aborted.
 */
inline SweepOutput run_sweep_full(const SweepConfig& cfg, int jobs = 0) {
    detail::SweepContext ctx = detail::build_context(cfg);
    SweepOutput out;
    out.layout = detail::build_layout(cfg, ctx);

    for (OutputKind k : cfg.outputs) {
        if (k == OutputKind::eigenvalues) {
            out.has_eigenvalues = true;
            out.eigenvalues = dirichlet_eigenvalues(*ctx.sl, cfg.grid.max);
        }
    }

    const std::vector<double> grid = cfg.grid.points();
    out.rows.resize(grid.size());

    unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                                : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.size()));
    workers = std::min(workers, 16u);

    if (workers <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            out.rows[i] = detail::compute_row(ctx, out.layout, grid[i]);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::pair<std::size_t, std::string>> aborts;  // (index, message)
    std::mutex abort_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            try {
                out.rows[i] = detail::compute_row(ctx, out.layout, grid[i]);
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(abort_mutex);
                aborts.emplace_back(i, e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (!aborts.empty()) {
        std::sort(aborts.begin(), aborts.end());
        throw Error(errc::aborted, aborts.front().second);
    }
    return out;
}

/// Rows-only convenience wrapper.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg, int jobs = 0) {
    return run_sweep_full(cfg, jobs).rows;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace detail {

/// Shortest text that round-trips a double exactly (17 significant digits).
inline std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string join_flags(const std::vector<std::string>& flags) {
    std::string s;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i) s += ";";
        s += flags[i];
    }
    return s;
}

}  // namespace detail

/**
 * @brief Emit sweep results: CSV with one fixed header (matrix entries as
 *        <kind>.<block>.<row>.<col>.re/.im, absent entries empty) or JSONL
 *        with one object per λ. Floats carry 17 significant digits; ordering
 *        is ascending λ with entries block-row-column, so identical sweeps
 *        emit identical bytes.
 */
inline void emit(const SweepOutput& out, const SweepConfig& cfg, std::ostream& os) {
    if (cfg.format == SweepConfig::Format::csv) {
        os << "lambda";
        for (const OutputSlot& slot : out.layout) {
            if (slot.scalar) {
                os << "," << slot.label << ".value";
                continue;
            }
            for (const BlockLayout& b : slot.blocks)
                for (int i = 0; i < b.rows; ++i)
                    for (int j = 0; j < b.cols; ++j)
                        os << "," << slot.label << "." << b.label << "." << i << "." << j << ".re,"
                           << slot.label << "." << b.label << "." << i << "." << j << ".im";
        }
        os << ",unitarity_defect,contraction_excess,cond,rank_M,rank_tau,flags\n";
        if (out.has_eigenvalues) {
            os << "# eigenvalues";
            for (double e : out.eigenvalues) os << " " << detail::fmt17(e);
            os << "\n";
        }
        for (const SweepRow& row : out.rows) {
            os << detail::fmt17(row.lambda);
            for (std::size_t s = 0; s < out.layout.size(); ++s) {
                const OutputSlot& slot = out.layout[s];
                const OutputCell& cell = row.cells[s];
                if (slot.scalar) {
                    os << ",";
                    if (cell.present) os << detail::fmt17(cell.value);
                    continue;
                }
                for (std::size_t b = 0; b < slot.blocks.size(); ++b) {
                    const BlockLayout& lay = slot.blocks[b];
                    const CMatrix* B = cell.present ? &cell.blocks[b] : nullptr;
                    for (int i = 0; i < lay.rows; ++i)
                        for (int j = 0; j < lay.cols; ++j) {
                            if (B && i < B->rows() && j < B->cols()) {
                                os << "," << detail::fmt17((*B)(i, j).real()) << ","
                                   << detail::fmt17((*B)(i, j).imag());
                            } else {
                                os << ",,";
                            }
                        }
                }
            }
            os << "," << detail::fmt17(row.unitarity_defect) << ","
               << detail::fmt17(row.contraction_excess) << "," << detail::fmt17(row.cond) << ","
               << row.rank_M << "," << row.rank_tau << "," << detail::join_flags(row.flags) << "\n";
        }
        return;
    }

    // JSONL: optional metadata object first, then one object per λ.
    using nlohmann::json;
    if (out.has_eigenvalues) {
        json meta;
        meta["eigenvalues"] = out.eigenvalues;
        os << meta.dump() << "\n";
    }
    for (const SweepRow& row : out.rows) {
        json j;
        j["lambda"] = row.lambda;
        json outputs = json::object();
        for (std::size_t s = 0; s < out.layout.size(); ++s) {
            const OutputSlot& slot = out.layout[s];
            const OutputCell& cell = row.cells[s];
            if (!cell.present) {
                outputs[slot.label] = nullptr;
                continue;
            }
            if (slot.scalar) {
                outputs[slot.label] = cell.value;
                continue;
            }
            json blocks = json::object();
            for (std::size_t b = 0; b < slot.blocks.size(); ++b) {
                const CMatrix& B = cell.blocks[b];
                json rows = json::array();
                for (int i = 0; i < B.rows(); ++i) {
                    json r = json::array();
                    for (int j2 = 0; j2 < B.cols(); ++j2)
                        r.push_back({B(i, j2).real(), B(i, j2).imag()});
                    rows.push_back(std::move(r));
                }
                blocks[slot.blocks[b].label] = std::move(rows);
            }
            outputs[slot.label] = std::move(blocks);
        }
        j["outputs"] = std::move(outputs);
        j["unitarity_defect"] = row.unitarity_defect;
        j["contraction_excess"] = row.contraction_excess;
        j["cond"] = row.cond;
        j["rank_M"] = row.rank_M;
        j["rank_tau"] = row.rank_tau;
        j["flags"] = row.flags;
        os << j.dump() << "\n";
    }
}

/// Emit to the config's out_path ("-" = stdout). Throws io_error on failure.
inline void emit_to_path(const SweepOutput& out, const SweepConfig& cfg) {
    if (cfg.out_path.empty() || cfg.out_path == "-") {
        emit(out, cfg, std::cout);
        return;
    }
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) throw Error(errc::io_error, "cannot open '" + cfg.out_path + "' for writing");
    emit(out, cfg, f);
    if (!f) throw Error(errc::io_error, "write to '" + cfg.out_path + "' failed");
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

struct VerifyOptions {
    std::set<std::string> suites;   ///< empty = all
    bool inject_sign_error = false; ///< control fixture: corrupts the AA comparison
    int jobs = 0;
};

struct SuiteResult {
    std::string name;
    bool applicable = true;
    bool pass = true;
    int checks = 0;
    int skipped = 0;          ///< guarded/flagged points
    double max_residual = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct VerifyReport {
    std::vector<SuiteResult> suites;
    bool all_pass = true;
    double runtime_seconds = 0.0;
};

inline const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names = {"unitarity",  "adamyan-arov", "theorem-main",
                                                   "nevanlinna", "wronskian",    "oracle"};
    return names;
}

namespace detail {

inline bool suite_selected(const VerifyOptions& opt, const std::string& name) {
    return opt.suites.empty() || opt.suites.count(name) > 0 || opt.suites.count("all") > 0;
}

/// Valid real grid points of the config (inside the family's real domain).
inline std::vector<double> valid_points(const SweepContext& ctx, int limit = 0) {
    std::vector<double> pts;
    for (double x : ctx.cfg.grid.points()) {
        if (ctx.m_family.real_domain(x)) pts.push_back(x);
        if (limit > 0 && static_cast<int>(pts.size()) >= limit) break;
    }
    return pts;
}

inline SuiteResult suite_unitarity(const SweepContext& ctx) {
    SuiteResult r;
    r.name = "unitarity";
    r.threshold = 1e-8;
    for (double x : ctx.cfg.grid.points()) {
        if (!ctx.m_family.real_domain(x)) {
            ++r.skipped;
            continue;
        }
        try {
            const CMatrix M = boundary_value(ctx.m_family, x);
            double defect = 0.0;
            if (ctx.cfg.coupling.type == CouplingSpec::Type::dissipative) {
                defect = s_dilation(M, ctx.cfg.coupling.D).unitarity_defect;
            } else {
                const CMatrix tau = boundary_value(*ctx.tau_family, x);
                defect = s_coupled(M, tau).unitarity_defect;
                for (const CMatrix& tmu : ctx.tau_at_mu)
                    defect = std::max(defect, s_energydep(M, tmu).unitarity_defect);
            }
            r.max_residual = std::max(r.max_residual, defect);
            ++r.checks;
        } catch (const Error&) {
            ++r.skipped;
        }
    }
    r.pass = r.checks > 0 && r.max_residual < r.threshold;
    if (r.checks == 0) r.note = "no valid grid points";
    return r;
}

inline SuiteResult suite_adamyan_arov(const SweepContext& ctx, bool inject_sign_error) {
    SuiteResult r;
    r.name = "adamyan-arov";
    r.threshold = 1e-10;
    const bool leads = ctx.cfg.coupling.type != CouplingSpec::Type::dissipative;
    for (double x : ctx.cfg.grid.points()) {
        if (!ctx.m_family.real_domain(x)) {
            ++r.skipped;
            continue;
        }
        try {
            double res;
            if (!inject_sign_error) {
                res = leads ? residual_adamyan_arov_energydep(ctx.m_family, *ctx.tau_family, x)
                            : residual_adamyan_arov(ctx.m_family, ctx.cfg.coupling.D, x);
            } else {
                // Control fixture: compare against the NEGATED characteristic
                // adjoint — the suite must fail on any open channel.
                const CMatrix Mplus = boundary_value(ctx.m_family, x);
                const CMatrix D =
                    leads ? CMatrix(cplx(-1.0) * boundary_value(*ctx.tau_family, x)) : ctx.cfg.coupling.D;
                const CMatrix slp = s_laxphillips(Mplus, D).value;
                const CMatrix W = char_function(Mplus.adjoint(), D);
                res = spectral_norm(slp + W.adjoint());
            }
            r.max_residual = std::max(r.max_residual, res);
            ++r.checks;
        } catch (const Error&) {
            ++r.skipped;
        }
    }
    r.pass = r.checks > 0 && r.max_residual < r.threshold;
    if (r.checks == 0) r.note = "no valid grid points";
    if (inject_sign_error) r.note = "sign-injection control fixture active";
    return r;
}

inline SuiteResult suite_theorem_main(const SweepContext& ctx) {
    SuiteResult r;
    r.name = "theorem-main";
    r.threshold = 1e-10;
    if (ctx.cfg.coupling.type == CouplingSpec::Type::dissipative) {
        r.applicable = false;
        r.note = "needs lead coupling";
        return r;
    }
    for (double x : ctx.cfg.grid.points()) {
        if (!ctx.m_family.real_domain(x)) {
            ++r.skipped;
            continue;
        }
        try {
            r.max_residual =
                std::max(r.max_residual, residual_theorem_main(ctx.m_family, *ctx.tau_family, x));
            ++r.checks;
        } catch (const Error&) {
            ++r.skipped;
        }
    }
    r.pass = r.checks > 0 && r.max_residual < r.threshold;
    if (r.checks == 0) r.note = "no valid grid points";
    return r;
}

inline SuiteResult suite_nevanlinna(const SweepContext& ctx) {
    SuiteResult r;
    r.name = "nevanlinna";
    r.threshold = 1e-10;  // relative positivity defect; symmetry held to 1e-12
    std::vector<const HerglotzFamily*> fams = {&ctx.m_family};
    if (ctx.tau_family) fams.push_back(&*ctx.tau_family);
    const double lo = ctx.cfg.grid.min, hi = ctx.cfg.grid.max;
    for (const HerglotzFamily* fam : fams) {
        for (int i = 0; i < 15; ++i) {
            const double re = lo + (hi - lo) * i / 14.0;
            for (double im : {0.3, 1.0, -0.7}) {
                const cplx z(re, im);
                try {
                    const CMatrix F = fam->evaluator(z);
                    const CMatrix G = fam->evaluator(std::conj(z));
                    const double scale = std::max(1e-300, spectral_norm(F));
                    const double sign = im > 0 ? 1.0 : -1.0;
                    const auto eigs = hermitian_eigen(cplx(sign) * imag_part(F)).eigenvalues;
                    const double neg = eigs.empty() ? 0.0 : std::max(0.0, -eigs.front());
                    const double sym = spectral_norm(G - F.adjoint());
                    r.max_residual = std::max(r.max_residual, neg / scale);
                    if (sym > 1e-12 * std::max(1.0, scale)) r.pass = false;
                    ++r.checks;
                } catch (const Error&) {
                    ++r.skipped;
                }
            }
        }
    }
    if (r.max_residual >= r.threshold) r.pass = false;
    if (r.checks == 0) {
        r.pass = false;
        r.note = "no evaluable samples";
    }
    return r;
}

inline SuiteResult suite_wronskian(const SweepContext& ctx) {
    SuiteResult r;
    r.name = "wronskian";
    r.threshold = 1e-9;
    if (!ctx.sl) {
        r.applicable = false;
        r.note = "needs an interval problem";
        return r;
    }
    std::vector<cplx> samples;
    for (double x : valid_points(ctx, 40)) samples.emplace_back(x, 0.0);
    const double mid = 0.5 * (ctx.cfg.grid.min + ctx.cfg.grid.max);
    for (double im : {0.3, 1.0, 2.5}) samples.emplace_back(mid, im);
    for (const cplx& z : samples) {
        try {
            const ShootingResult sh = propagate(*ctx.sl, z);
            // Cancellation in φw_ψ − ψw_φ scales like ~1e-16·‖solution‖², so the
            // absolute budget widens accordingly for strongly grown solutions.
            const double budget = r.threshold + 1e-13 * sh.scale() * sh.scale();
            if (sh.wronskian_defect > budget) r.pass = false;
            r.max_residual = std::max(r.max_residual, sh.wronskian_defect);
            ++r.checks;
        } catch (const Error&) {
            ++r.skipped;
        }
    }
    if (r.checks == 0) {
        r.pass = false;
        r.note = "no evaluable samples";
    }
    return r;
}

inline SuiteResult suite_oracle(const SweepContext& ctx) {
    SuiteResult r;
    r.name = "oracle";
    r.threshold = 1e-6;  // ladder-vs-direct agreement; path oracles held to 1e-8
    int ladder_checks = 0;

    // Boundary-limit machinery: direct vs ε-ladder at up to 20 valid points.
    std::vector<const HerglotzFamily*> fams = {&ctx.m_family};
    if (ctx.tau_family) fams.push_back(&*ctx.tau_family);
    for (const HerglotzFamily* fam : fams) {
        for (double x : valid_points(ctx, 20)) {
            try {
                const CMatrix direct = boundary_value(*fam, x, BoundaryMode::direct());
                const CMatrix ladder = boundary_value(*fam, x, BoundaryMode::ladder());
                r.max_residual = std::max(r.max_residual, (direct - ladder).max_abs());
                ++r.checks;
                ++ladder_checks;
            } catch (const Error&) {
                ++r.skipped;
            }
        }
    }
    if (r.max_residual >= r.threshold) r.pass = false;

    // Dual-path propagation oracle for interval problems: exact segment
    // propagators vs adaptive Runge–Kutta over an equivalent sampled profile.
    if (ctx.sl && ctx.sl->mass.kind == CoefficientProfile::Kind::piecewise_constant &&
        ctx.sl->potential.kind == CoefficientProfile::Kind::piecewise_constant) {
        const auto to_sampled = [&](const CoefficientProfile& p) {
            std::vector<std::pair<double, double>> pts;
            double pos = ctx.sl->x_l;
            for (const auto& [len, val] : p.segments) {
                pts.emplace_back(pos, val);
                if (!std::isfinite(len)) break;
                pos += len;
            }
            return CoefficientProfile::sampled(std::move(pts), CoefficientProfile::Interpolation::step);
        };
        const SLProblem rk_problem(ctx.sl->x_l, ctx.sl->x_r, to_sampled(ctx.sl->mass),
                                   to_sampled(ctx.sl->potential));
        int done = 0;
        for (double x : valid_points(ctx)) {
            if (done >= 10) break;
            const cplx z(x, 0.5);  // off-axis: both paths smooth, no pole risk
            try {
                const CMatrix a = weyl_matrix(*ctx.sl, z);
                const CMatrix b = weyl_matrix(rk_problem, z);
                const double rel = spectral_norm(a - b) / std::max(1e-300, spectral_norm(a));
                if (rel >= 1e-8) r.pass = false;
                r.max_residual = std::max(r.max_residual, rel);
                ++r.checks;
                ++done;
            } catch (const Error&) {
                ++r.skipped;
            }
        }
    }

    // Closed-form oracle for the constant-coefficient problem: the shooting
    // path must reproduce the closed-form family.
    if (ctx.cfg.problem.type == ProblemSpec::Type::const_interval) {
        int done = 0;
        for (double x : valid_points(ctx)) {
            if (done >= 10) break;
            const cplx z(x, 0.8);
            try {
                const CMatrix a = ctx.m_family.evaluator(z);
                const CMatrix b = weyl_matrix(*ctx.sl, z);
                const double rel = spectral_norm(a - b) / std::max(1e-300, spectral_norm(a));
                if (rel >= 1e-8) r.pass = false;
                r.max_residual = std::max(r.max_residual, rel);
                ++r.checks;
                ++done;
            } catch (const Error&) {
                ++r.skipped;
            }
        }
    }

    if (ladder_checks == 0) {
        r.pass = false;
        r.note = "no evaluable points for the boundary-limit oracle";
    }
    return r;
}

}  // namespace detail

/**
 * @brief Run the verification suites over a config. Failures are report
 *        content, never exceptions. The sign-injection option corrupts the
 *        Adamyan–Arov comparison on purpose (control fixture proving the
 *        suite can fail).
 */
inline VerifyReport verify_suite(const SweepConfig& cfg, const VerifyOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    detail::SweepContext ctx = detail::build_context(cfg);

    VerifyReport report;
    if (detail::suite_selected(opt, "unitarity")) report.suites.push_back(detail::suite_unitarity(ctx));
    if (detail::suite_selected(opt, "adamyan-arov"))
        report.suites.push_back(detail::suite_adamyan_arov(ctx, opt.inject_sign_error));
    if (detail::suite_selected(opt, "theorem-main"))
        report.suites.push_back(detail::suite_theorem_main(ctx));
    if (detail::suite_selected(opt, "nevanlinna")) report.suites.push_back(detail::suite_nevanlinna(ctx));
    if (detail::suite_selected(opt, "wronskian")) report.suites.push_back(detail::suite_wronskian(ctx));
    if (detail::suite_selected(opt, "oracle")) report.suites.push_back(detail::suite_oracle(ctx));

    for (const SuiteResult& s : report.suites)
        if (s.applicable && !s.pass) report.all_pass = false;
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

/// Machine-readable form of a verification report.
inline nlohmann::json verify_report_json(const VerifyReport& report) {
    nlohmann::json j;
    j["suites"] = nlohmann::json::array();
    for (const SuiteResult& s : report.suites) {
        nlohmann::json e;
        e["name"] = s.name;
        e["applicable"] = s.applicable;
        e["pass"] = s.pass;
        e["checks"] = s.checks;
        e["skipped"] = s.skipped;
        e["max_residual"] = s.max_residual;
        e["threshold"] = s.threshold;
        e["note"] = s.note;
        j["suites"].push_back(std::move(e));
    }
    j["all_pass"] = report.all_pass;
    j["runtime_seconds"] = report.runtime_seconds;
    return j;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

struct Preset {
    std::string name;
    std::string description;
    std::string toml;
};

/// Built-in configurations exercising the main setups end to end.
inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = {
        {"buslaev_fomin_free",
         "free interval (0, pi) with equal free leads: full transmission benchmark",
         "[problem]\n"
         "type = \"sl\"\n"
         "x_l = 0.0\n"
         "x_r = 3.141592653589793\n"
         "mass.segments = [[3.141592653589793, 0.5]]\n"
         "potential.segments = [[3.141592653589793, 0.0]]\n"
         "[coupling]\n"
         "type = \"leads\"\n"
         "v_l = 0.0\n"
         "v_r = 0.0\n"
         "m_l = 0.5\n"
         "m_r = 0.5\n"
         "[grid]\n"
         "min = 0.01\n"
         "max = 0.9\n"
         "count = 100\n"
         "scale = \"linear\"\n"
         "[output]\n"
         "kinds = [\"weyl\", \"s_coupled\", \"residual_theorem_main\"]\n"
         "format = \"csv\"\n"
         "path = \"-\"\n"},
        {"delta_absorber",
         "half-line delta problem with the absorbing boundary parameter D = -i/2",
         "[problem]\n"
         "type = \"delta\"\n"
         "[coupling]\n"
         "type = \"dissipative\"\n"
         "D = [[[0.0, -0.5]]]\n"
         "[grid]\n"
         "min = 0.01\n"
         "max = 4.0\n"
         "count = 100\n"
         "scale = \"linear\"\n"
         "[output]\n"
         "kinds = [\"weyl\", \"s_dilation\", \"s_dissipative\", \"s_laxphillips\", \"char_function\", "
         "\"residual_adamyan_arov\", \"residual_relation_consistency\"]\n"
         "format = \"csv\"\n"
         "path = \"-\"\n"},
        {"barrier_dissipative",
         "three-segment barrier with a diagonal dissipative boundary parameter",
         "[problem]\n"
         "type = \"sl\"\n"
         "x_l = 0.0\n"
         "x_r = 3.0\n"
         "mass.segments = [[1.0, 0.5], [1.0, 0.8], [1.0, 0.5]]\n"
         "potential.segments = [[1.0, 0.0], [1.0, 2.0], [1.0, 0.0]]\n"
         "[coupling]\n"
         "type = \"dissipative\"\n"
         "D = [[[-0.3, -0.4], [0.0, 0.0]], [[0.0, 0.0], [0.2, -0.7]]]\n"
         "[grid]\n"
         "min = 0.05\n"
         "max = 6.0\n"
         "count = 120\n"
         "scale = \"linear\"\n"
         "[output]\n"
         "kinds = [\"weyl\", \"s_dilation\", \"s_dissipative\", \"s_laxphillips\", \"char_function\", "
         "\"residual_adamyan_arov\", \"residual_relation_consistency\", \"eigenvalues\"]\n"
         "format = \"csv\"\n"
         "path = \"-\"\n"},
        {"barrier_transmitting",
         "three-segment barrier coupled to unequal leads, with two fixed-energy families",
         "[problem]\n"
         "type = \"sl\"\n"
         "x_l = 0.0\n"
         "x_r = 3.0\n"
         "mass.segments = [[1.0, 0.5], [1.0, 0.8], [1.0, 0.5]]\n"
         "potential.segments = [[1.0, 0.0], [1.0, 2.0], [1.0, 0.0]]\n"
         "[coupling]\n"
         "type = \"energy_dep\"\n"
         "v_l = 0.0\n"
         "v_r = 0.5\n"
         "m_l = 0.5\n"
         "m_r = 0.6\n"
         "mu_list = [0.8, 2.5]\n"
         "[grid]\n"
         "min = 0.05\n"
         "max = 6.0\n"
         "count = 120\n"
         "scale = \"linear\"\n"
         "[output]\n"
         "kinds = [\"weyl\", \"s_coupled\", \"s_energydep\", \"residual_theorem_main\", "
         "\"residual_adamyan_arov\", \"residual_relation_consistency\", \"eigenvalues\"]\n"
         "format = \"csv\"\n"
         "path = \"-\"\n"},
    };
    return list;
}

inline const Preset* find_preset(const std::string& name) {
    for (const Preset& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

/// Resolve a CLI config argument: "preset:<name>" or a filesystem path.
inline std::string resolve_config_text(const std::string& arg) {
    if (arg.rfind("preset:", 0) == 0) {
        const std::string name = arg.substr(7);
        const Preset* p = find_preset(name);
        if (!p) throw Error(errc::validation_error, "unknown preset '" + name + "'");
        return p->toml;
    }
    std::ifstream f(arg, std::ios::binary);
    if (!f) throw Error(errc::io_error, "cannot open config file '" + arg + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace weylscatter
