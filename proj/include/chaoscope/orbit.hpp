#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "chaoscope/errors.hpp"
#include "chaoscope/operators.hpp"
#include "chaoscope/spaces.hpp"

namespace chaoscope {

/// Default separation grid {2^-10, ..., 2^3}: the small-eps proximal side and
/// the large-delta separation side in one pass.
inline std::vector<double> default_delta_grid() {
    std::vector<double> g;
    for (int e = -10; e <= 3; ++e) g.push_back(std::ldexp(1.0, e));
    return g;
}

/// Streams the scalar orbit series s_n = d(T^n x, identity) together with the
/// seminorm series rho_n, calling back once per step. The orbit itself is
/// advanced incrementally; overflow saturates to +inf markers rather than
/// aborting (unbounded series are data here, not failures).
inline void orbit_scan(const OperatorSpec& T, const Point& x, const MetricSpec& m,
                       std::int64_t N, std::int64_t seminorm_index,
                       const std::function<void(std::int64_t n, double s, double rho)>& cb) {
    if (N < 1) throw ConfigError("horizon must be >= 1");
    Point cur = x;
    for (std::int64_t n = 1; n <= N; ++n) {
        cur = chaoscope::apply(T, cur);
        double s = metric_from_identity(m, cur).value;
        double rho = rho_value(m, seminorm_index, cur);
        cb(n, s, rho);
    }
}

/// Per-step orbit statistics: the distance series, its Cesaro means, and
/// exact separation counts over a delta grid.
struct OrbitTrace {
    std::vector<double> s;       // s[n-1] = d(T^n x, e)
    std::vector<double> cesaro;  // A_n = (1/n) sum_{i<=n} s_i, compensated
    std::vector<double> delta_grid;
    std::vector<std::vector<std::int32_t>> sep_counts;  // [d][n-1] = card{i<=n : s_i > delta_d}
    MetricSpec metric;
    std::int64_t horizon = 0;

    double cesaro_at(std::int64_t n) const { return cesaro[static_cast<std::size_t>(n - 1)]; }
    std::int32_t sep_count(std::size_t d, std::int64_t n) const {
        return sep_counts[d][static_cast<std::size_t>(n - 1)];
    }
};

inline OrbitTrace trace(const OperatorSpec& T, const Point& x, const MetricSpec& m,
                        std::int64_t N, std::vector<double> delta_grid = default_delta_grid(),
                        std::int64_t seminorm_index = 0) {
    if (N < 2) throw ConfigError("trace horizon must be >= 2");
    OrbitTrace tr;
    tr.metric = m;
    tr.horizon = N;
    tr.delta_grid = std::move(delta_grid);
    tr.s.reserve(static_cast<std::size_t>(N));
    tr.cesaro.reserve(static_cast<std::size_t>(N));
    tr.sep_counts.assign(tr.delta_grid.size(), {});
    for (auto& c : tr.sep_counts) c.reserve(static_cast<std::size_t>(N));

    double sum = 0.0, comp = 0.0;  // Kahan
    std::vector<std::int32_t> counts(tr.delta_grid.size(), 0);
    orbit_scan(T, x, m, N, seminorm_index, [&](std::int64_t n, double s, double) {
        tr.s.push_back(s);
        double y = s - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        tr.cesaro.push_back(sum / static_cast<double>(n));
        for (std::size_t d = 0; d < tr.delta_grid.size(); ++d) {
            if (s > tr.delta_grid[d]) ++counts[d];
            tr.sep_counts[d].push_back(counts[d]);
        }
    });
    return tr;
}

/// Pair series d(T^n x, T^n y). Every metric in the zoo is translation
/// invariant, so this is trace(T, y - x) bitwise (group: x^{-1}y).
inline OrbitTrace pair_trace(const OperatorSpec& T, const Point& x, const Point& y,
                             const MetricSpec& m, std::int64_t N,
                             std::vector<double> delta_grid = default_delta_grid(),
                             std::int64_t seminorm_index = 0) {
    return trace(T, point_difference(x, y), m, N, std::move(delta_grid), seminorm_index);
}

/// CSV export: n, s_n, A_n, then one count column per grid delta.
inline void write_trace_csv(const OrbitTrace& tr, std::ostream& os) {
    os << "n,s_n,A_n";
    for (double d : tr.delta_grid) os << ",c_" << d;
    os << "\n";
    for (std::int64_t n = 1; n <= tr.horizon; ++n) {
        os << n << ',' << tr.s[static_cast<std::size_t>(n - 1)] << ','
           << tr.cesaro[static_cast<std::size_t>(n - 1)];
        for (std::size_t d = 0; d < tr.delta_grid.size(); ++d)
            os << ',' << tr.sep_counts[d][static_cast<std::size_t>(n - 1)];
        os << "\n";
    }
}

}  // namespace chaoscope
