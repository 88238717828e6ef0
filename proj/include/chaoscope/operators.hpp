#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "chaoscope/errors.hpp"
#include "chaoscope/spaces.hpp"

namespace chaoscope {

/// Pure index function i -> w_i used for shift weights and diagonal entries.
struct WeightRule {
    enum class Kind { Constant, Periodic, Table };
    Kind kind = Kind::Constant;
    double value = 1.0;
    std::vector<double> values;
    double default_value = 1.0;  // Table entries beyond the table

    static WeightRule constant(double v) {
        WeightRule r;
        r.kind = Kind::Constant;
        r.value = v;
        return r;
    }
    static WeightRule periodic(std::vector<double> vs) {
        if (vs.empty()) throw SpecError("periodic weight rule needs at least one value");
        WeightRule r;
        r.kind = Kind::Periodic;
        r.values = std::move(vs);
        return r;
    }
    static WeightRule table(std::vector<double> vs, double beyond = 1.0) {
        WeightRule r;
        r.kind = Kind::Table;
        r.values = std::move(vs);
        r.default_value = beyond;
        return r;
    }

    double at(std::int64_t i) const {
        switch (kind) {
            case Kind::Constant: return value;
            case Kind::Periodic:
                return values[static_cast<std::size_t>((i - 1) % static_cast<std::int64_t>(
                                                                     values.size()))];
            case Kind::Table:
                return i >= 1 && i <= static_cast<std::int64_t>(values.size())
                           ? values[static_cast<std::size_t>(i - 1)]
                           : default_value;
        }
        return 1.0;
    }

    /// sup_{i<=I} |w_i|, reported with the spec of the operator.
    double sup_abs(std::int64_t I) const {
        double m = 0.0;
        for (std::int64_t i = 1; i <= I; ++i) m = std::max(m, std::fabs(at(i)));
        return m;
    }
};

/// Member of the operator zoo. Immutable; apply/orbit_oracle are pure.
struct OperatorSpec {
    enum class Kind {
        WeightedBackwardShift,
        ScalarMultiple,
        Diagonal,
        DirectSum,
        TorusMatrix,
        Identity,
        Zero
    };

    Kind kind = Kind::Identity;
    SpaceTag space = SpaceTag::lp(2.0);
    WeightRule rule;                                    // shift weights / diagonal entries
    double scalar = 1.0;                                // ScalarMultiple
    std::vector<OperatorSpec> summands;                 // DirectSum
    std::vector<std::vector<std::int64_t>> matrix;      // TorusMatrix (integer entries)

    static OperatorSpec backward_shift(WeightRule w, SpaceTag tag = SpaceTag::lp(2.0)) {
        OperatorSpec op;
        op.kind = Kind::WeightedBackwardShift;
        op.rule = std::move(w);
        op.space = tag;
        return op;
    }
    static OperatorSpec scalar_multiple(double lambda, OperatorSpec inner) {
        OperatorSpec op;
        op.kind = Kind::ScalarMultiple;
        op.scalar = lambda;
        op.space = inner.space;
        op.summands.push_back(std::move(inner));
        return op;
    }
    static OperatorSpec diagonal(WeightRule d, SpaceTag tag = SpaceTag::lp(2.0)) {
        OperatorSpec op;
        op.kind = Kind::Diagonal;
        op.rule = std::move(d);
        op.space = tag;
        return op;
    }
    static OperatorSpec direct_sum(std::vector<OperatorSpec> parts) {
        if (parts.empty()) throw SpecError("direct_sum needs at least one summand");
        OperatorSpec op;
        op.kind = Kind::DirectSum;
        op.space = parts.front().space;
        op.summands = std::move(parts);
        return op;
    }
    static OperatorSpec torus_matrix(std::vector<std::vector<std::int64_t>> A) {
        if (A.empty()) throw SpecError("torus matrix must be nonempty");
        for (const auto& row : A)
            if (row.size() != A.size()) throw SpecError("torus matrix must be square");
        OperatorSpec op;
        op.kind = Kind::TorusMatrix;
        op.matrix = std::move(A);
        op.space = SpaceTag::torus(static_cast<int>(op.matrix.size()));
        return op;
    }
    static OperatorSpec identity(SpaceTag tag = SpaceTag::lp(2.0)) {
        OperatorSpec op;
        op.kind = Kind::Identity;
        op.space = tag;
        return op;
    }
    static OperatorSpec zero(SpaceTag tag = SpaceTag::lp(2.0)) {
        OperatorSpec op;
        op.kind = Kind::Zero;
        op.space = tag;
        return op;
    }

    bool is_torus() const { return space.kind == SpaceKind::Torus; }
};

namespace detail {

inline SparseVec apply_sparse(const OperatorSpec& T, const SparseVec& x);

/// Direct sum realized on one sequence space by residue classes mod k:
/// summand c acts on the subsequence of global indices c+1, c+1+k, ...
inline SparseVec apply_direct_sum(const OperatorSpec& T, const SparseVec& x) {
    std::int64_t k = static_cast<std::int64_t>(T.summands.size());
    std::vector<SparseVec> parts(static_cast<std::size_t>(k), SparseVec::zero(x.space));
    for (const auto& e : x.entries) {
        std::int64_t c = (e.index - 1) % k;
        std::int64_t q = (e.index - 1) / k + 1;
        parts[static_cast<std::size_t>(c)].entries.push_back({q, e.value});
    }
    SparseVec out = SparseVec::zero(x.space);
    for (std::int64_t c = 0; c < k; ++c) {
        SparseVec img = apply_sparse(T.summands[static_cast<std::size_t>(c)],
                                     parts[static_cast<std::size_t>(c)]);
        for (const auto& e : img.entries)
            out.entries.push_back({(e.index - 1) * k + c + 1, e.value});
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const SparseVec::Entry& a, const SparseVec::Entry& b) {
                  return a.index < b.index;
              });
    return out;
}

inline SparseVec apply_sparse(const OperatorSpec& T, const SparseVec& x) {
    switch (T.kind) {
        case OperatorSpec::Kind::Identity:
            return x;
        case OperatorSpec::Kind::Zero:
            return SparseVec::zero(x.space);
        case OperatorSpec::Kind::WeightedBackwardShift: {
            // (B_w x)_j = w_j x_{j+1}
            SparseVec r = SparseVec::zero(x.space);
            r.entries.reserve(x.entries.size());
            for (const auto& e : x.entries) {
                if (e.index <= 1) continue;
                ScaledReal v = e.value * ScaledReal::from_double(T.rule.at(e.index - 1));
                if (!v.is_zero()) r.entries.push_back({e.index - 1, v});
            }
            return r;
        }
        case OperatorSpec::Kind::Diagonal: {
            SparseVec r = SparseVec::zero(x.space);
            r.entries.reserve(x.entries.size());
            for (const auto& e : x.entries) {
                ScaledReal v = e.value * ScaledReal::from_double(T.rule.at(e.index));
                if (!v.is_zero()) r.entries.push_back({e.index, v});
            }
            return r;
        }
        case OperatorSpec::Kind::ScalarMultiple:
            return apply_sparse(T.summands.front(), x).scaled(T.scalar);
        case OperatorSpec::Kind::DirectSum:
            return apply_direct_sum(T, x);
        default:
            throw IncompatibleSpaceError("operator kind does not act on sequence spaces");
    }
}

inline TorusPoint apply_torus(const OperatorSpec& T, const TorusPoint& x) {
    switch (T.kind) {
        case OperatorSpec::Kind::Identity:
            return x;
        case OperatorSpec::Kind::Zero:
            return TorusPoint::zero(x.dim());
        case OperatorSpec::Kind::TorusMatrix: {
            int k = static_cast<int>(T.matrix.size());
            if (x.dim() != k)
                throw IncompatibleSpaceError("torus point dimension does not match matrix");
            TorusPoint r;
            for (int i = 0; i < k; ++i) {
                Rational s(0);
                for (int j = 0; j < k; ++j)
                    s += Rational(T.matrix[static_cast<std::size_t>(i)]
                                          [static_cast<std::size_t>(j)]) *
                         x.coords[static_cast<std::size_t>(j)];
                r.coords.push_back(torus_reduce(s));
            }
            return r;
        }
        default:
            throw IncompatibleSpaceError("operator kind does not act on the torus");
    }
}

/// Exact integer matrix power by repeated squaring.
inline std::vector<std::vector<Integer>> matrix_power(
    const std::vector<std::vector<std::int64_t>>& A, std::int64_t n) {
    std::size_t k = A.size();
    std::vector<std::vector<Integer>> base(k, std::vector<Integer>(k));
    std::vector<std::vector<Integer>> res(k, std::vector<Integer>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            base[i][j] = A[i][j];
            res[i][j] = (i == j) ? 1 : 0;
        }
    auto mul = [&](const auto& X, const auto& Y) {
        std::vector<std::vector<Integer>> Z(k, std::vector<Integer>(k, Integer(0)));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t l = 0; l < k; ++l)
                if (X[i][l] != 0)
                    for (std::size_t j = 0; j < k; ++j) Z[i][j] += X[i][l] * Y[l][j];
        return Z;
    };
    while (n > 0) {
        if (n & 1) res = mul(res, base);
        base = mul(base, base);
        n >>= 1;
    }
    return res;
}

inline SparseVec oracle_sparse(const OperatorSpec& T, const SparseVec& x, std::int64_t n);

inline SparseVec oracle_direct_sum(const OperatorSpec& T, const SparseVec& x, std::int64_t n) {
    std::int64_t k = static_cast<std::int64_t>(T.summands.size());
    std::vector<SparseVec> parts(static_cast<std::size_t>(k), SparseVec::zero(x.space));
    for (const auto& e : x.entries) {
        std::int64_t c = (e.index - 1) % k;
        std::int64_t q = (e.index - 1) / k + 1;
        parts[static_cast<std::size_t>(c)].entries.push_back({q, e.value});
    }
    SparseVec out = SparseVec::zero(x.space);
    for (std::int64_t c = 0; c < k; ++c) {
        SparseVec img = oracle_sparse(T.summands[static_cast<std::size_t>(c)],
                                      parts[static_cast<std::size_t>(c)], n);
        for (const auto& e : img.entries)
            out.entries.push_back({(e.index - 1) * k + c + 1, e.value});
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const SparseVec::Entry& a, const SparseVec::Entry& b) {
                  return a.index < b.index;
              });
    return out;
}

inline SparseVec oracle_sparse(const OperatorSpec& T, const SparseVec& x, std::int64_t n) {
    switch (T.kind) {
        case OperatorSpec::Kind::Identity:
            return x;
        case OperatorSpec::Kind::Zero:
            return n == 0 ? x : SparseVec::zero(x.space);
        case OperatorSpec::Kind::WeightedBackwardShift: {
            // ((B_w)^n x)_j = (prod_{i=j}^{j+n-1} w_i) x_{j+n}
            SparseVec r = SparseVec::zero(x.space);
            for (const auto& e : x.entries) {
                std::int64_t j = e.index - n;
                if (j < 1) continue;
                ScaledReal prod = ScaledReal::from_double(1.0);
                for (std::int64_t i = j; i <= j + n - 1; ++i)
                    prod *= ScaledReal::from_double(T.rule.at(i));
                ScaledReal v = prod * e.value;
                if (!v.is_zero()) r.entries.push_back({j, v});
            }
            return r;
        }
        case OperatorSpec::Kind::Diagonal: {
            SparseVec r = SparseVec::zero(x.space);
            for (const auto& e : x.entries) {
                ScaledReal p = ScaledReal::from_double(1.0);
                ScaledReal d = ScaledReal::from_double(T.rule.at(e.index));
                std::int64_t m = n;
                ScaledReal b = d;
                while (m > 0) {  // power by squaring
                    if (m & 1) p *= b;
                    b *= b;
                    m >>= 1;
                }
                ScaledReal v = p * e.value;
                if (!v.is_zero()) r.entries.push_back({e.index, v});
            }
            return r;
        }
        case OperatorSpec::Kind::ScalarMultiple: {
            ScaledReal lam = ScaledReal::from_double(T.scalar);
            ScaledReal p = ScaledReal::from_double(1.0);
            std::int64_t m = n;
            ScaledReal b = lam;
            while (m > 0) {
                if (m & 1) p *= b;
                b *= b;
                m >>= 1;
            }
            return oracle_sparse(T.summands.front(), x, n).scaled(p);
        }
        case OperatorSpec::Kind::DirectSum:
            return oracle_direct_sum(T, x, n);
        default:
            throw UnsupportedOracleError("no closed-form orbit for this kind");
    }
}

}  // namespace detail

/// One application of the operator. Exact on torus points.
inline Point apply(const OperatorSpec& T, const Point& x) {
    if (std::holds_alternative<SparseVec>(x)) {
        if (T.is_torus()) throw IncompatibleSpaceError("torus operator on sequence vector");
        return detail::apply_sparse(T, std::get<SparseVec>(x));
    }
    if (!T.is_torus() && T.kind != OperatorSpec::Kind::Identity &&
        T.kind != OperatorSpec::Kind::Zero)
        throw IncompatibleSpaceError("sequence-space operator on torus point");
    return detail::apply_torus(T, std::get<TorusPoint>(x));
}

inline bool has_oracle(const OperatorSpec& T) {
    switch (T.kind) {
        case OperatorSpec::Kind::DirectSum:
            for (const auto& s : T.summands)
                if (!has_oracle(s)) return false;
            return true;
        case OperatorSpec::Kind::ScalarMultiple:
            return has_oracle(T.summands.front());
        default:
            return true;
    }
}

/// Closed-form T^n x without iteration. Exact on exact inputs; throws
/// UnsupportedOracleError for kinds without a closed form.
inline Point orbit_oracle(const OperatorSpec& T, const Point& x, std::int64_t n) {
    if (n < 0) throw ConfigError("orbit step must be nonnegative");
    if (std::holds_alternative<SparseVec>(x)) {
        if (T.is_torus()) throw IncompatibleSpaceError("torus operator on sequence vector");
        return detail::oracle_sparse(T, std::get<SparseVec>(x), n);
    }
    const auto& t = std::get<TorusPoint>(x);
    switch (T.kind) {
        case OperatorSpec::Kind::Identity:
            return t;
        case OperatorSpec::Kind::Zero:
            return n == 0 ? Point{t} : Point{TorusPoint::zero(t.dim())};
        case OperatorSpec::Kind::TorusMatrix: {
            auto An = detail::matrix_power(T.matrix, n);
            int k = t.dim();
            TorusPoint r;
            for (int i = 0; i < k; ++i) {
                Rational s(0);
                for (int j = 0; j < k; ++j)
                    s += Rational(An[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) *
                         t.coords[static_cast<std::size_t>(j)];
                r.coords.push_back(torus_reduce(s));
            }
            return r;
        }
        default:
            throw UnsupportedOracleError("no closed-form orbit for this kind");
    }
}

/// Geometric growth rate of the weight products over a probe window,
/// including scalar multipliers. Drives the block-construction amplitudes.
inline double growth_rate(const OperatorSpec& T, std::int64_t window = 64) {
    switch (T.kind) {
        case OperatorSpec::Kind::WeightedBackwardShift: {
            double s = 0.0;
            for (std::int64_t i = 1; i <= window; ++i)
                s += std::log(std::max(std::fabs(T.rule.at(i)), 1e-300));
            return std::exp(s / static_cast<double>(window));
        }
        case OperatorSpec::Kind::ScalarMultiple:
            return std::fabs(T.scalar) * growth_rate(T.summands.front(), window);
        case OperatorSpec::Kind::DirectSum: {
            double r = 0.0;
            for (const auto& p : T.summands) r = std::max(r, growth_rate(p, window));
            return r;
        }
        case OperatorSpec::Kind::Identity:
            return 1.0;
        default:
            return 0.0;
    }
}

}  // namespace chaoscope
