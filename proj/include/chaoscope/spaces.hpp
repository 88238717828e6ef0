#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "chaoscope/errors.hpp"
#include "chaoscope/scaled_real.hpp"

namespace chaoscope {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Space tags
// ---------------------------------------------------------------------------

enum class SpaceKind { Lp, Frechet, Torus };

struct SpaceTag {
    SpaceKind kind = SpaceKind::Lp;
    double p = 2.0;     // exponent for Lp; infinity() means sup
    int torus_dim = 1;  // for Torus

    static SpaceTag lp(double p_exp = 2.0) { return {SpaceKind::Lp, p_exp, 1}; }
    static SpaceTag frechet() { return {SpaceKind::Frechet, 2.0, 1}; }
    static SpaceTag torus(int dim) { return {SpaceKind::Torus, 2.0, dim}; }

    friend bool operator==(const SpaceTag& a, const SpaceTag& b) {
        if (a.kind != b.kind) return false;
        if (a.kind == SpaceKind::Lp) return a.p == b.p;
        if (a.kind == SpaceKind::Torus) return a.torus_dim == b.torus_dim;
        return true;
    }
};

// ---------------------------------------------------------------------------
// Sequence-space vectors
// ---------------------------------------------------------------------------

/// Sparse element of a sequence space. Entries are sorted by index (>= 1)
/// and never hold an exact zero. Values carry their own wide exponent so
/// block patterns with super-exponentially small amplitudes stay nonzero.
struct SparseVec {
    struct Entry {
        std::int64_t index;
        ScaledReal value;
    };

    SpaceTag space = SpaceTag::lp(2.0);
    std::vector<Entry> entries;

    bool is_zero() const { return entries.empty(); }

    static SparseVec zero(SpaceTag tag = SpaceTag::lp(2.0)) {
        SparseVec v;
        v.space = tag;
        return v;
    }

    static SparseVec basis(std::int64_t j, SpaceTag tag = SpaceTag::lp(2.0)) {
        SparseVec v;
        v.space = tag;
        v.entries.push_back({j, ScaledReal::from_double(1.0)});
        return v;
    }

    static SparseVec finite(std::vector<std::pair<std::int64_t, double>> ents,
                            SpaceTag tag = SpaceTag::lp(2.0)) {
        SparseVec v;
        v.space = tag;
        std::sort(ents.begin(), ents.end());
        for (auto& [j, x] : ents) {
            if (j < 1) throw SpecError("vector entry index must be >= 1");
            if (x != 0.0) v.entries.push_back({j, ScaledReal::from_double(x)});
        }
        return v;
    }

    /// x = sum_k amplitude(k) * e_{index(k)}, k = k_min..k_max.
    static SparseVec pattern(const std::function<std::int64_t(std::int64_t)>& index,
                             const std::function<ScaledReal(std::int64_t)>& amplitude,
                             std::int64_t k_min, std::int64_t k_max,
                             SpaceTag tag = SpaceTag::lp(2.0)) {
        SparseVec v;
        v.space = tag;
        for (std::int64_t k = k_min; k <= k_max; ++k) {
            ScaledReal a = amplitude(k);
            if (!a.is_zero()) v.entries.push_back({index(k), a});
        }
        std::sort(v.entries.begin(), v.entries.end(),
                  [](const Entry& a, const Entry& b) { return a.index < b.index; });
        return v;
    }

    ScaledReal at(std::int64_t j) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), j,
                                   [](const Entry& e, std::int64_t idx) { return e.index < idx; });
        if (it != entries.end() && it->index == j) return it->value;
        return {};
    }

    SparseVec scaled(const ScaledReal& alpha) const {
        SparseVec r;
        r.space = space;
        if (alpha.is_zero()) return r;
        r.entries.reserve(entries.size());
        for (const auto& e : entries) r.entries.push_back({e.index, e.value * alpha});
        return r;
    }

    SparseVec scaled(double alpha) const { return scaled(ScaledReal::from_double(alpha)); }

    /// Support shifted upward: e_j -> e_{j+offset}.
    SparseVec shifted_support(std::int64_t offset) const {
        SparseVec r;
        r.space = space;
        r.entries.reserve(entries.size());
        for (const auto& e : entries) {
            if (e.index + offset < 1) throw SpecError("support shift would leave index range");
            r.entries.push_back({e.index + offset, e.value});
        }
        return r;
    }

    friend SparseVec operator+(const SparseVec& a, const SparseVec& b) {
        if (!(a.space == b.space)) throw IncompatibleSpaceError("vector space tags differ");
        SparseVec r;
        r.space = a.space;
        std::size_t i = 0, j = 0;
        while (i < a.entries.size() || j < b.entries.size()) {
            if (j >= b.entries.size() ||
                (i < a.entries.size() && a.entries[i].index < b.entries[j].index)) {
                r.entries.push_back(a.entries[i++]);
            } else if (i >= a.entries.size() || b.entries[j].index < a.entries[i].index) {
                r.entries.push_back(b.entries[j++]);
            } else {
                ScaledReal s = a.entries[i].value + b.entries[j].value;
                if (!s.is_zero()) r.entries.push_back({a.entries[i].index, s});
                ++i;
                ++j;
            }
        }
        return r;
    }

    friend SparseVec operator-(const SparseVec& a, const SparseVec& b) {
        return a + b.scaled(ScaledReal::from_double(-1.0));
    }

    friend bool operator==(const SparseVec& a, const SparseVec& b) {
        if (!(a.space == b.space) || a.entries.size() != b.entries.size()) return false;
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            if (a.entries[i].index != b.entries[i].index) return false;
            if (a.entries[i].value != b.entries[i].value) return false;
        }
        return true;
    }
};

/// lp norm (p = infinity() gives the sup norm); result keeps the wide exponent.
inline ScaledReal lp_norm(const SparseVec& v, double p) {
    if (v.entries.size() == 1) return v.entries[0].value.abs();
    if (std::isinf(p)) {
        ScaledReal m;
        for (const auto& e : v.entries)
            if (mag_less(m, e.value)) m = e.value.abs();
        return m;
    }
    if (p == 2.0) {
        ScaledReal s;
        for (const auto& e : v.entries) s += e.value * e.value;
        return s.sqrt();
    }
    ScaledReal s;
    for (const auto& e : v.entries) s += e.value.abs().pow(p);
    return s.pow(1.0 / p);
}

/// Prefix lp seminorm over coordinates <= j.
inline ScaledReal prefix_norm(const SparseVec& v, std::int64_t j, double p) {
    SparseVec head;
    head.space = v.space;
    for (const auto& e : v.entries) {
        if (e.index > j) break;
        head.entries.push_back(e);
    }
    return lp_norm(head, p);
}

// ---------------------------------------------------------------------------
// Torus points (exact arithmetic)
// ---------------------------------------------------------------------------

/// Canonical representative of a rational in [0,1).
inline Rational torus_reduce(const Rational& x) {
    Integer num = boost::multiprecision::numerator(x);
    Integer den = boost::multiprecision::denominator(x);
    Integer q = num / den;
    Integer rem = num - q * den;
    if (rem < 0) rem += den;
    return Rational(rem, den);
}

/// Point of T^k, each coordinate an exact rational in [0,1).
struct TorusPoint {
    std::vector<Rational> coords;

    static TorusPoint zero(int dim) {
        TorusPoint p;
        p.coords.assign(static_cast<std::size_t>(dim), Rational(0));
        return p;
    }

    /// Dyadic point sum_{b in bits} 2^{-b} on T^1.
    static TorusPoint dyadic(const std::vector<std::int64_t>& bits) {
        Rational x(0);
        for (auto b : bits) {
            Integer den = Integer(1) << static_cast<unsigned>(b);
            x += Rational(1, den);
        }
        TorusPoint p;
        p.coords.push_back(torus_reduce(x));
        return p;
    }

    static TorusPoint from_rationals(std::vector<Rational> cs) {
        TorusPoint p;
        for (auto& c : cs) p.coords.push_back(torus_reduce(c));
        return p;
    }

    int dim() const { return static_cast<int>(coords.size()); }

    bool is_zero() const {
        for (const auto& c : coords)
            if (c != 0) return false;
        return true;
    }

    friend TorusPoint operator+(const TorusPoint& a, const TorusPoint& b) {
        if (a.dim() != b.dim()) throw IncompatibleSpaceError("torus dimensions differ");
        TorusPoint r;
        for (int i = 0; i < a.dim(); ++i)
            r.coords.push_back(torus_reduce(a.coords[static_cast<std::size_t>(i)] +
                                            b.coords[static_cast<std::size_t>(i)]));
        return r;
    }

    friend TorusPoint operator-(const TorusPoint& a, const TorusPoint& b) {
        if (a.dim() != b.dim()) throw IncompatibleSpaceError("torus dimensions differ");
        TorusPoint r;
        for (int i = 0; i < a.dim(); ++i)
            r.coords.push_back(torus_reduce(a.coords[static_cast<std::size_t>(i)] -
                                            b.coords[static_cast<std::size_t>(i)]));
        return r;
    }

    friend bool operator==(const TorusPoint& a, const TorusPoint& b) {
        return a.coords == b.coords;
    }
};

/// Circle distance min(t, 1-t) for t in [0,1), exact.
inline Rational circle_distance(const Rational& t) {
    Rational one_minus = Rational(1) - t;
    return t < one_minus ? t : one_minus;
}

/// Position of the leading binary digit of a dyadic in (0,1): the b with
/// 2^{-b} <= x < 2^{-b+1}.
inline std::int64_t leading_bit_position(const Rational& x) {
    if (x <= 0 || x >= 1) throw ConfigError("leading_bit_position expects x in (0,1)");
    Integer num = boost::multiprecision::numerator(x);
    Integer den = boost::multiprecision::denominator(x);
    std::int64_t bn = static_cast<std::int64_t>(boost::multiprecision::msb(num));
    std::int64_t bd = static_cast<std::int64_t>(boost::multiprecision::msb(den));
    return bd - bn;  // den = 2^bd for dyadics
}

// ---------------------------------------------------------------------------
// Points (either space family)
// ---------------------------------------------------------------------------

using Point = std::variant<SparseVec, TorusPoint>;

inline bool point_is_zero(const Point& p) {
    return std::visit([](const auto& v) { return v.is_zero(); }, p);
}

inline bool points_equal(const Point& a, const Point& b) {
    if (a.index() != b.index()) return false;
    if (std::holds_alternative<SparseVec>(a))
        return std::get<SparseVec>(a) == std::get<SparseVec>(b);
    return std::get<TorusPoint>(a) == std::get<TorusPoint>(b);
}

/// Group difference y - x (the reduction target of left-invariant metrics).
inline Point point_difference(const Point& x, const Point& y) {
    if (x.index() != y.index()) throw IncompatibleSpaceError("points live in different spaces");
    if (std::holds_alternative<SparseVec>(x))
        return std::get<SparseVec>(y) - std::get<SparseVec>(x);
    return std::get<TorusPoint>(y) - std::get<TorusPoint>(x);
}

// ---------------------------------------------------------------------------
// Seminorm families and metrics
// ---------------------------------------------------------------------------

/// Finite slice p_1..p_{j_max} of a separating seminorm sequence.
struct SeminormFamily {
    std::function<ScaledReal(std::int64_t j, const SparseVec&)> eval;
    bool monotone = true;
    std::int64_t j_max = 20;

    /// Default family p_j(x) = (sum_{i<=j} |x_i|^2)^{1/2}: increasing and separating.
    static SeminormFamily prefix_l2(std::int64_t jmax = 20) {
        SeminormFamily f;
        f.j_max = jmax;
        f.monotone = true;
        f.eval = [](std::int64_t j, const SparseVec& v) { return prefix_norm(v, j, 2.0); };
        return f;
    }
};

struct MetricSpec {
    enum class Kind { BanachNorm, Frechet, BoundedNorm, Torus };

    Kind kind = Kind::BanachNorm;
    double p = 2.0;           // norm exponent for BanachNorm/BoundedNorm
    std::int64_t j_max = 20;  // Frechet truncation
    int torus_dim = 1;

    static MetricSpec banach(double p_exp = 2.0) {
        MetricSpec m;
        m.kind = Kind::BanachNorm;
        m.p = p_exp;
        return m;
    }
    static MetricSpec bounded(double p_exp = 2.0) {
        MetricSpec m;
        m.kind = Kind::BoundedNorm;
        m.p = p_exp;
        return m;
    }
    static MetricSpec frechet(std::int64_t jmax = 20) {
        MetricSpec m;
        m.kind = Kind::Frechet;
        m.j_max = jmax;
        return m;
    }
    static MetricSpec torus(int dim = 1) {
        MetricSpec m;
        m.kind = Kind::Torus;
        m.torus_dim = dim;
        return m;
    }

    bool bounded_by_one() const { return kind == Kind::BoundedNorm || kind == Kind::Frechet ||
                                         kind == Kind::Torus; }
};

struct MetricValue {
    double value = 0.0;
    double error_bound = 0.0;  // rigorous truncation bound (Frechet only)
};

/// Distance of a point from the identity/zero under the metric.
inline MetricValue metric_from_identity(const MetricSpec& m, const Point& x) {
    switch (m.kind) {
        case MetricSpec::Kind::BanachNorm: {
            const auto& v = std::get<SparseVec>(x);
            return {lp_norm(v, m.p).to_double(), 0.0};
        }
        case MetricSpec::Kind::BoundedNorm: {
            const auto& v = std::get<SparseVec>(x);
            double d = lp_norm(v, m.p).to_double();
            return {std::min(d, 1.0), 0.0};
        }
        case MetricSpec::Kind::Frechet: {
            const auto& v = std::get<SparseVec>(x);
            // sum_{j<=J} 2^{-j} min(1, p_j(x)); truncation error <= 2^{-J}
            double sum = 0.0;
            for (std::int64_t j = m.j_max; j >= 1; --j) {
                double pj = prefix_norm(v, j, 2.0).to_double();
                sum += std::ldexp(std::min(1.0, pj), static_cast<int>(-j));
            }
            return {sum, std::ldexp(1.0, static_cast<int>(-m.j_max))};
        }
        case MetricSpec::Kind::Torus: {
            const auto& t = std::get<TorusPoint>(x);
            if (t.dim() != m.torus_dim)
                throw IncompatibleSpaceError("torus point dimension does not match metric");
            Rational best(0);
            for (const auto& c : t.coords) {
                Rational d = circle_distance(c);
                if (d > best) best = d;
            }
            return {best.convert_to<double>(), 0.0};
        }
    }
    throw ConfigError("unknown metric kind");
}

/// Distance between two points. Throws on incompatible space tags.
inline MetricValue evaluate_metric(const MetricSpec& m, const Point& x, const Point& y) {
    if (x.index() != y.index()) throw IncompatibleSpaceError("points live in different spaces");
    if (std::holds_alternative<SparseVec>(x)) {
        const auto& a = std::get<SparseVec>(x);
        const auto& b = std::get<SparseVec>(y);
        if (!(a.space == b.space)) throw IncompatibleSpaceError("vector space tags differ");
        if (m.kind == MetricSpec::Kind::Torus)
            throw IncompatibleSpaceError("torus metric on sequence-space vectors");
        return metric_from_identity(m, Point{a - b});
    }
    if (m.kind != MetricSpec::Kind::Torus)
        throw IncompatibleSpaceError("norm metric on torus points");
    return metric_from_identity(m, point_difference(y, x));
}

/// Seminorm trace value rho(x) used by the extreme/irregular notions:
/// full norm for Banach metrics, p_m for Frechet, the metric itself on tori.
inline double rho_value(const MetricSpec& m, std::int64_t seminorm_index, const Point& x) {
    switch (m.kind) {
        case MetricSpec::Kind::BanachNorm:
        case MetricSpec::Kind::BoundedNorm:
            return lp_norm(std::get<SparseVec>(x), m.p).to_double();
        case MetricSpec::Kind::Frechet: {
            std::int64_t j = seminorm_index > 0 ? seminorm_index : 8;
            return prefix_norm(std::get<SparseVec>(x), j, 2.0).to_double();
        }
        case MetricSpec::Kind::Torus:
            return metric_from_identity(m, x).value;
    }
    return 0.0;
}

}  // namespace chaoscope
