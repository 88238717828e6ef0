#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "chaoscope/errors.hpp"

namespace chaoscope {

/// Subset of the positive integers, materialized up to a horizon.
struct NatSubset {
    std::vector<std::int64_t> indices;  // strictly increasing, >= 1, <= horizon
    std::int64_t horizon = 0;

    static NatSubset from_indices(std::vector<std::int64_t> idx, std::int64_t N) {
        NatSubset s;
        s.horizon = N;
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        for (auto i : idx) {
            if (i < 1) throw ConfigError("NatSubset index < 1");
            if (i <= N) s.indices.push_back(i);
        }
        return s;
    }

    static NatSubset from_predicate(const std::function<bool(std::int64_t)>& pred,
                                    std::int64_t N) {
        NatSubset s;
        s.horizon = N;
        for (std::int64_t n = 1; n <= N; ++n)
            if (pred(n)) s.indices.push_back(n);
        return s;
    }

    NatSubset complement() const {
        NatSubset c;
        c.horizon = horizon;
        std::size_t k = 0;
        for (std::int64_t n = 1; n <= horizon; ++n) {
            if (k < indices.size() && indices[k] == n) {
                ++k;
            } else {
                c.indices.push_back(n);
            }
        }
        return c;
    }

    NatSubset intersect(const NatSubset& o) const {
        NatSubset r;
        r.horizon = std::min(horizon, o.horizon);
        std::set_intersection(indices.begin(), indices.end(), o.indices.begin(),
                              o.indices.end(), std::back_inserter(r.indices));
        while (!r.indices.empty() && r.indices.back() > r.horizon) r.indices.pop_back();
        return r;
    }
};

/// Finite-horizon view of upper/lower density: the full integer count profile
/// plus ratio extrema over the tail window [window_start, horizon].
struct DensityEstimate {
    std::vector<std::int64_t> counts;  // counts[n-1] = card(A n [1,n])
    double upper_at_tail = 0.0;
    double lower_at_tail = 0.0;
    std::int64_t window_start = 1;
    std::int64_t horizon = 0;
    std::int64_t upper_witness = 0;  // n attaining the max ratio
    std::int64_t lower_witness = 0;

    double ratio(std::int64_t n) const {
        return static_cast<double>(counts[static_cast<std::size_t>(n - 1)]) /
               static_cast<double>(n);
    }
};

/// Exact integer counting of card(A n [1,n]) with tail extrema of the ratio.
inline DensityEstimate density_profile(const NatSubset& A, std::int64_t N,
                                       std::int64_t N0) {
    if (N0 < 1 || N0 > N) throw ConfigError("density window empty: need 1 <= N0 <= N");
    DensityEstimate est;
    est.horizon = N;
    est.window_start = N0;
    est.counts.resize(static_cast<std::size_t>(N));
    std::size_t k = 0;
    std::int64_t c = 0;
    est.upper_at_tail = 0.0;
    est.lower_at_tail = 1.0;
    for (std::int64_t n = 1; n <= N; ++n) {
        while (k < A.indices.size() && A.indices[k] == n) {
            ++c;
            ++k;
        }
        est.counts[static_cast<std::size_t>(n - 1)] = c;
        if (n >= N0) {
            double r = static_cast<double>(c) / static_cast<double>(n);
            if (r > est.upper_at_tail) {
                est.upper_at_tail = r;
                est.upper_witness = n;
            }
            if (r < est.lower_at_tail) {
                est.lower_at_tail = r;
                est.lower_witness = n;
            }
        }
    }
    return est;
}

/// Lightweight tail upper-density estimate of a level set {n : pred(n)} read
/// off a scalar series, without materializing the subset.
inline double tail_upper_density(std::span<const double> series, std::int64_t N0,
                                 std::int64_t N,
                                 const std::function<bool(double)>& pred) {
    std::int64_t c = 0;
    double best = 0.0;
    for (std::int64_t n = 1; n <= N; ++n) {
        if (pred(series[static_cast<std::size_t>(n - 1)])) ++c;
        if (n >= N0) best = std::max(best, static_cast<double>(c) / static_cast<double>(n));
    }
    return best;
}

enum class DensityFlag { Certified, Refuted, Undecided };

/// Result of the density-one extraction: the constructed subset, the direction
/// of the equivalence certified at horizon, and per-level evidence.
struct DensityOneResult {
    NatSubset subset;
    DensityFlag flag = DensityFlag::Undecided;
    struct LevelEvidence {
        double epsilon;
        double tail_upper;  // tail upper density of {n : |a_n| < epsilon}
    };
    std::vector<LevelEvidence> levels;
};

/// Default geometric refinement schedule eps_k = 2^{-k}, k = 1..ceil(log2 N).
inline std::vector<double> default_eps_schedule(std::int64_t N) {
    std::vector<double> eps;
    std::int64_t K = static_cast<std::int64_t>(std::ceil(std::log2(static_cast<double>(N))));
    for (std::int64_t k = 1; k <= K; ++k) eps.push_back(std::ldexp(1.0, static_cast<int>(-k)));
    return eps;
}

/// Union construction behind the limit-along-density-one-subset equivalence:
/// for each level eps_k the set A_k = {n : |a_n| < eps_k} is profiled; the
/// output subset follows A_k on the segment (m_{k-1}, m_k] where m_k is the
/// first index past m_{k-1} at which the running ratio of A_{k+1} has climbed
/// back above 1 - margin. The flag certifies |a_n| -> 0 along the subset iff
/// every level set keeps tail upper density >= 1 - margin.
inline DensityOneResult extract_density_one_subset(std::span<const double> a,
                                                   std::span<const double> eps_schedule,
                                                   double margin = 0.1,
                                                   std::int64_t N0 = 0) {
    std::int64_t N = static_cast<std::int64_t>(a.size());
    if (N < 1) throw ConfigError("empty series");
    if (N0 <= 0) N0 = (N + 1) / 2;

    DensityOneResult out;
    bool all_ok = true;

    std::vector<NatSubset> levels;
    for (double eps : eps_schedule) {
        NatSubset L = NatSubset::from_predicate(
            [&](std::int64_t n) { return std::fabs(a[static_cast<std::size_t>(n - 1)]) < eps; },
            N);
        double u = density_profile(L, N, N0).upper_at_tail;
        out.levels.push_back({eps, u});
        if (u < 1.0 - margin) all_ok = false;
        levels.push_back(std::move(L));
    }

    // Assemble the union subset by segments.
    std::vector<std::int64_t> picked;
    std::int64_t seg_start = 1;
    for (std::size_t k = 0; k < levels.size() && seg_start <= N; ++k) {
        std::int64_t seg_end = N;
        if (k + 1 < levels.size()) {
            // advance until the next level's running ratio recovers
            std::int64_t c = 0;
            std::size_t j = 0;
            const auto& next = levels[k + 1];
            seg_end = N;
            for (std::int64_t n = 1; n <= N; ++n) {
                if (j < next.indices.size() && next.indices[j] == n) {
                    ++c;
                    ++j;
                }
                if (n > seg_start &&
                    static_cast<double>(c) >= (1.0 - margin) * static_cast<double>(n)) {
                    seg_end = n;
                    break;
                }
            }
            if (seg_end <= seg_start) seg_end = seg_start;
        }
        for (auto n : levels[k].indices)
            if (n >= seg_start && n <= seg_end) picked.push_back(n);
        seg_start = seg_end + 1;
    }
    out.subset = NatSubset::from_indices(std::move(picked), N);
    out.flag = all_ok ? DensityFlag::Certified : DensityFlag::Refuted;
    return out;
}

}  // namespace chaoscope
