#pragma once

#include <cstdint>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaoscope/classify.hpp"
#include "chaoscope/errors.hpp"
#include "chaoscope/operators.hpp"
#include "chaoscope/spaces.hpp"

namespace chaoscope {

inline constexpr const char* kToolVersion = "0.1.0";

namespace io_detail {

inline SpecError bad_field(const std::string& field, const std::string& why) {
    return SpecError("field \"" + field + "\": " + why);
}

inline const json& need(const json& j, const char* field) {
    if (!j.contains(field)) throw bad_field(field, "missing");
    return j.at(field);
}

inline std::string need_string(const json& j, const char* field) {
    const json& v = need(j, field);
    if (!v.is_string()) throw bad_field(field, "expected a string");
    return v.get<std::string>();
}

inline double need_number(const json& j, const char* field) {
    const json& v = need(j, field);
    if (!v.is_number()) throw bad_field(field, "expected a number");
    return v.get<double>();
}

inline std::int64_t need_integer(const json& j, const char* field) {
    const json& v = need(j, field);
    if (!v.is_number_integer()) throw bad_field(field, "expected an integer");
    return v.get<std::int64_t>();
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Space / metric specs
// ---------------------------------------------------------------------------

inline SpaceTag parse_space(const json& j) {
    using namespace io_detail;
    if (!j.is_object()) throw SpecError("space spec must be an object");
    std::string kind = need_string(j, "kind");
    if (kind == "lp") {
        double p = j.contains("p") ? need_number(j, "p") : 2.0;
        if (p < 1.0) throw bad_field("p", "need p >= 1");
        return SpaceTag::lp(p);
    }
    if (kind == "frechet") return SpaceTag::frechet();
    if (kind == "torus") {
        std::int64_t d = j.contains("dim") ? need_integer(j, "dim") : 1;
        if (d < 1) throw bad_field("dim", "need dim >= 1");
        return SpaceTag::torus(static_cast<int>(d));
    }
    throw bad_field("kind", "unknown space kind \"" + kind + "\"");
}

inline json space_to_json(const SpaceTag& s) {
    switch (s.kind) {
        case SpaceKind::Lp: return json{{"kind", "lp"}, {"p", s.p}};
        case SpaceKind::Frechet: return json{{"kind", "frechet"}};
        case SpaceKind::Torus: return json{{"kind", "torus"}, {"dim", s.torus_dim}};
    }
    throw SpecError("unserializable space tag");
}

/// Metric selector strings: "l2", "lp:2.5", "linf", "frechet", "bounded",
/// "torus". The operator's space decides dimensions.
inline MetricSpec parse_metric(const std::string& name, const SpaceTag& space) {
    if (space.kind == SpaceKind::Torus) {
        if (!name.empty() && name != "torus")
            throw io_detail::bad_field("metric", "torus operators use the torus metric");
        return MetricSpec::torus(space.torus_dim);
    }
    if (name.empty() || name == "l2") return MetricSpec::banach(2.0);
    if (name == "linf") return MetricSpec::banach(std::numeric_limits<double>::infinity());
    if (name.rfind("lp:", 0) == 0) {
        double p = std::stod(name.substr(3));
        if (p < 1.0) throw io_detail::bad_field("metric", "need p >= 1");
        return MetricSpec::banach(p);
    }
    if (name == "frechet") return MetricSpec::frechet();
    if (name == "bounded") return MetricSpec::bounded(2.0);
    throw io_detail::bad_field("metric", "unknown metric \"" + name + "\"");
}

// ---------------------------------------------------------------------------
// Operator specs
// ---------------------------------------------------------------------------

inline WeightRule parse_weight_rule(const json& j) {
    using namespace io_detail;
    if (j.is_number()) return WeightRule::constant(j.get<double>());
    if (!j.is_object()) throw SpecError("weight rule must be an object or a number");
    std::string kind = need_string(j, "kind");
    if (kind == "constant") return WeightRule::constant(need_number(j, "value"));
    if (kind == "periodic") {
        const json& vals = need(j, "values");
        if (!vals.is_array() || vals.empty())
            throw bad_field("values", "expected a nonempty array");
        std::vector<double> v;
        for (const auto& e : vals) {
            if (!e.is_number()) throw bad_field("values", "expected numbers");
            v.push_back(e.get<double>());
        }
        return WeightRule::periodic(std::move(v));
    }
    if (kind == "table") {
        const json& vals = need(j, "values");
        if (!vals.is_array()) throw bad_field("values", "expected an array");
        std::vector<double> v;
        for (const auto& e : vals) {
            if (!e.is_number()) throw bad_field("values", "expected numbers");
            v.push_back(e.get<double>());
        }
        double dflt = j.contains("default") ? need_number(j, "default") : 1.0;
        return WeightRule::table(std::move(v), dflt);
    }
    throw bad_field("kind", "unknown weight rule \"" + kind + "\"");
}

inline json weight_rule_to_json(const WeightRule& w) {
    switch (w.kind) {
        case WeightRule::Kind::Constant:
            return json{{"kind", "constant"}, {"value", w.value}};
        case WeightRule::Kind::Periodic:
            return json{{"kind", "periodic"}, {"values", w.values}};
        case WeightRule::Kind::Table:
            return json{{"kind", "table"}, {"values", w.values},
                        {"default", w.default_value}};
    }
    throw SpecError("unserializable weight rule");
}

inline OperatorSpec parse_operator(const json& j) {
    using namespace io_detail;
    if (!j.is_object()) throw SpecError("operator spec must be an object");
    std::string kind = need_string(j, "kind");
    if (kind == "weighted_backward_shift") {
        WeightRule w = parse_weight_rule(need(j, "weights"));
        return OperatorSpec::backward_shift(std::move(w), parse_space(need(j, "space")));
    }
    if (kind == "scalar_multiple")
        return OperatorSpec::scalar_multiple(need_number(j, "value"),
                                             parse_operator(need(j, "inner")));
    if (kind == "diagonal") {
        WeightRule w = parse_weight_rule(need(j, "weights"));
        return OperatorSpec::diagonal(std::move(w), parse_space(need(j, "space")));
    }
    if (kind == "direct_sum") {
        const json& parts = need(j, "summands");
        if (!parts.is_array() || parts.empty())
            throw bad_field("summands", "expected a nonempty array");
        std::vector<OperatorSpec> ops;
        for (const auto& p : parts) ops.push_back(parse_operator(p));
        return OperatorSpec::direct_sum(std::move(ops));
    }
    if (kind == "torus_matrix") {
        const json& rows = need(j, "matrix");
        if (!rows.is_array() || rows.empty())
            throw bad_field("matrix", "expected a nonempty array of rows");
        std::vector<std::vector<std::int64_t>> A;
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != rows.size())
                throw bad_field("matrix", "expected a square integer matrix");
            std::vector<std::int64_t> r;
            for (const auto& e : row) {
                if (!e.is_number_integer())
                    throw bad_field("matrix", "entries must be integers");
                r.push_back(e.get<std::int64_t>());
            }
            A.push_back(std::move(r));
        }
        return OperatorSpec::torus_matrix(std::move(A));
    }
    if (kind == "identity") return OperatorSpec::identity(parse_space(need(j, "space")));
    if (kind == "zero") return OperatorSpec::zero(parse_space(need(j, "space")));
    throw bad_field("kind", "unknown operator kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// Vector specs
// ---------------------------------------------------------------------------

namespace io_detail {

struct PatternExpr {
    bool linear_prefactor = false;  // leading "k*"
    double base = 2.0;
    bool squared = false;  // exponent -k^2 vs -k
    bool constant = false;
    double constant_value = 0.0;
};

/// Grammar: "<number>" | "[k*]<base>^(-k)" | "[k*]<base>^(-k^2)".
inline PatternExpr parse_amplitude(const std::string& s) {
    PatternExpr e;
    static const std::regex num_re(R"(^-?[0-9]+(\.[0-9]+)?$)");
    static const std::regex pow_re(R"(^(k\*)?([0-9]+(?:\.[0-9]+)?)\^\(-k(\^2)?\)$)");
    std::smatch m;
    if (std::regex_match(s, m, num_re)) {
        e.constant = true;
        e.constant_value = std::stod(s);
        return e;
    }
    if (std::regex_match(s, m, pow_re)) {
        e.linear_prefactor = m[1].matched;
        e.base = std::stod(m[2].str());
        e.squared = m[3].matched;
        if (e.base <= 0.0) throw bad_field("amplitude", "base must be positive");
        return e;
    }
    throw bad_field("amplitude", "unrecognized expression \"" + s + "\"");
}

/// Grammar: "k" | "k^2".
inline bool parse_index_squared(const std::string& s) {
    if (s == "k") return false;
    if (s == "k^2") return true;
    throw bad_field("index", "unrecognized expression \"" + s + "\"");
}

inline Rational parse_rational(const std::string& s) {
    static const std::regex rat_re(R"(^(-?[0-9]+)(?:/([0-9]+))?$)");
    std::smatch m;
    if (!std::regex_match(s, m, rat_re))
        throw bad_field("coords", "not a rational: \"" + s + "\"");
    Integer num(m[1].str());
    Integer den = m[2].matched ? Integer(m[2].str()) : Integer(1);
    if (den == 0) throw bad_field("coords", "zero denominator");
    return Rational(num, den);
}

}  // namespace io_detail

inline Point parse_vector(const json& j, const SpaceTag& space) {
    using namespace io_detail;

    // shorthand strings: "e<j>" (basis), "0", or rational torus coordinates
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (space.kind == SpaceKind::Torus) {
            std::vector<Rational> coords;
            std::size_t pos = 0;
            while (pos <= s.size()) {
                std::size_t comma = s.find(',', pos);
                std::string tok = s.substr(pos, comma == std::string::npos
                                                    ? std::string::npos
                                                    : comma - pos);
                coords.push_back(parse_rational(tok));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            if (static_cast<std::int64_t>(coords.size()) != space.torus_dim)
                throw bad_field("x", "expected " + std::to_string(space.torus_dim) +
                                         " torus coordinates");
            return TorusPoint::from_rationals(std::move(coords));
        }
        static const std::regex basis_re(R"(^e([0-9]+)$)");
        std::smatch m;
        if (std::regex_match(s, m, basis_re)) {
            std::int64_t idx = std::stoll(m[1].str());
            if (idx < 1) throw bad_field("x", "basis index must be >= 1");
            return SparseVec::basis(idx, space);
        }
        if (s == "0") return SparseVec::zero(space);
        throw bad_field("x", "unrecognized vector shorthand \"" + s + "\"");
    }

    if (!j.is_object()) throw SpecError("vector spec must be an object or a string");
    std::string kind = need_string(j, "kind");

    if (kind == "finite") {
        if (space.kind == SpaceKind::Torus)
            throw bad_field("kind", "finite vectors live in sequence spaces");
        const json& ents = need(j, "entries");
        if (!ents.is_array()) throw bad_field("entries", "expected an array");
        std::vector<std::pair<std::int64_t, double>> plain;
        std::vector<SparseVec::Entry> scaled;
        bool any_scaled = false;
        for (const auto& e : ents) {
            if (!e.is_array() || e.size() != 2 || !e.at(0).is_number_integer())
                throw bad_field("entries", "expected [index, value] pairs");
            std::int64_t idx = e.at(0).get<std::int64_t>();
            if (idx < 1) throw bad_field("entries", "indices must be >= 1");
            const json& val = e.at(1);
            if (val.is_number()) {
                plain.emplace_back(idx, val.get<double>());
                scaled.push_back({idx, ScaledReal::from_double(val.get<double>())});
            } else if (val.is_object() && val.contains("frac") && val.contains("exp2")) {
                any_scaled = true;
                scaled.push_back({idx, ScaledReal::make(val.at("frac").get<double>(),
                                                        val.at("exp2").get<std::int64_t>())});
            } else {
                throw bad_field("entries", "values must be numbers or {frac, exp2}");
            }
        }
        if (!any_scaled) return SparseVec::finite(std::move(plain), space);
        std::vector<std::pair<std::int64_t, double>> dummy;
        SparseVec v = SparseVec::finite(std::move(dummy), space);
        for (auto& e : scaled)
            if (!e.value.is_zero())
                v = v + SparseVec::basis(e.index, space).scaled(e.value);
        return v;
    }

    if (kind == "pattern") {
        if (space.kind == SpaceKind::Torus)
            throw bad_field("kind", "pattern vectors live in sequence spaces");
        bool idx_sq = parse_index_squared(need_string(j, "index"));
        PatternExpr amp = parse_amplitude(need_string(j, "amplitude"));
        std::int64_t k_min = j.contains("k_min") ? need_integer(j, "k_min") : 1;
        std::int64_t k_max = need_integer(j, "k_max");
        if (k_min < 1 || k_max < k_min)
            throw bad_field("k_max", "need 1 <= k_min <= k_max");
        ScaledReal base = ScaledReal::from_double(amp.base);
        return SparseVec::pattern(
            [idx_sq](std::int64_t k) { return idx_sq ? k * k : k; },
            [amp, base](std::int64_t k) {
                if (amp.constant) return ScaledReal::from_double(amp.constant_value);
                std::int64_t e = amp.squared ? k * k : k;
                ScaledReal a = base.ipow(-e);
                if (amp.linear_prefactor)
                    a *= ScaledReal::from_double(static_cast<double>(k));
                return a;
            },
            k_min, k_max, space);
    }

    if (kind == "dyadic_torus") {
        if (space.kind != SpaceKind::Torus)
            throw bad_field("kind", "dyadic_torus needs a torus operator");
        const json& bits = need(j, "bits");
        if (!bits.is_array()) throw bad_field("bits", "expected an array");
        std::vector<std::int64_t> b;
        for (const auto& e : bits) {
            if (!e.is_number_integer() || e.get<std::int64_t>() < 1)
                throw bad_field("bits", "bit positions must be integers >= 1");
            b.push_back(e.get<std::int64_t>());
        }
        return TorusPoint::dyadic(b);
    }

    if (kind == "rational_torus") {
        if (space.kind != SpaceKind::Torus)
            throw bad_field("kind", "rational_torus needs a torus operator");
        const json& coords = need(j, "coords");
        if (!coords.is_array() ||
            static_cast<std::int64_t>(coords.size()) != space.torus_dim)
            throw bad_field("coords", "expected " + std::to_string(space.torus_dim) +
                                          " coordinates");
        std::vector<Rational> r;
        for (const auto& c : coords) {
            if (!c.is_string()) throw bad_field("coords", "expected rational strings");
            r.push_back(parse_rational(c.get<std::string>()));
        }
        return TorusPoint::from_rationals(std::move(r));
    }

    throw bad_field("kind", "unknown vector kind \"" + kind + "\"");
}

inline json vector_to_json(const Point& x) {
    if (std::holds_alternative<TorusPoint>(x)) {
        const auto& t = std::get<TorusPoint>(x);
        json coords = json::array();
        for (const auto& c : t.coords) {
            coords.push_back(c.str());
        }
        return json{{"kind", "rational_torus"}, {"coords", coords}};
    }
    const auto& v = std::get<SparseVec>(x);
    json ents = json::array();
    for (const auto& e : v.entries) {
        if (e.value.exp > -900 && e.value.exp < 900)
            ents.push_back(json::array({e.index, e.value.to_double()}));
        else
            ents.push_back(json::array(
                {e.index, json{{"frac", e.value.frac}, {"exp2", e.value.exp}}}));
    }
    return json{{"kind", "finite"}, {"entries", ents}};
}

// ---------------------------------------------------------------------------
// Classifier config
// ---------------------------------------------------------------------------

inline ClassifierConfig parse_config(const json& j) {
    using namespace io_detail;
    if (!j.is_object()) throw SpecError("config must be an object");
    ClassifierConfig cfg;
    for (const auto& [key, val] : j.items()) {
        if (key == "horizon") cfg.horizon = need_integer(j, "horizon");
        else if (key == "window_start") cfg.window_start = need_integer(j, "window_start");
        else if (key == "eps_small") cfg.eps_small = need_number(j, "eps_small");
        else if (key == "delta_sep") cfg.delta_sep = need_number(j, "delta_sep");
        else if (key == "eta") cfg.eta = need_number(j, "eta");
        else if (key == "seminorm_index")
            cfg.seminorm_index = need_integer(j, "seminorm_index");
        else if (key == "unbounded_threshold")
            cfg.unbounded_threshold = need_number(j, "unbounded_threshold");
        else if (key == "growth_factor") cfg.growth_factor = need_number(j, "growth_factor");
        else if (key == "stability_factor")
            cfg.stability_factor = static_cast<int>(need_integer(j, "stability_factor"));
        else if (key == "eps_levels")
            cfg.eps_levels = static_cast<int>(need_integer(j, "eps_levels"));
        else if (key == "unbounded_levels")
            cfg.unbounded_levels = static_cast<int>(need_integer(j, "unbounded_levels"));
        else throw bad_field(key, "unknown config key");
        (void)val;
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Run manifest and reports
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Everything that determines a run's output. Reports embed the manifest, so
/// identical manifests reproduce identical reports bitwise.
struct RunManifest {
    std::string command;
    json operator_spec;
    json vector_specs = json::array();
    json config;
    std::string metric;
    std::uint64_t seed = 1;

    json to_json() const {
        json body{{"command", command},
                  {"operator", operator_spec},
                  {"vectors", vector_specs},
                  {"config", config},
                  {"metric", metric},
                  {"seed", seed},
                  {"tool_version", kToolVersion}};
        body["config_hash"] = fnv1a64(body.dump());
        return body;
    }
};

inline json make_report(const RunManifest& manifest, json result) {
    return json{{"manifest", manifest.to_json()}, {"result", std::move(result)}};
}

}  // namespace chaoscope
