#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "chaoscope/classify.hpp"
#include "chaoscope/density.hpp"
#include "chaoscope/errors.hpp"
#include "chaoscope/operators.hpp"
#include "chaoscope/orbit.hpp"

namespace chaoscope {

// ---------------------------------------------------------------------------
// Probe sets
// ---------------------------------------------------------------------------

/// Sampled stand-in for the "for every x" quantifiers: basis vectors, seeded
/// random unit vectors, block-pattern vectors, and a near-identity scaling
/// ladder on the torus side.
struct ProbeSet {
    std::vector<Point> vectors;
    std::vector<double> ladder;  // near-identity scales (torus probing)

    static ProbeSet defaults(const OperatorSpec& T, std::int64_t basis_count = 256,
                             std::uint64_t seed = 1) {
        ProbeSet ps;
        if (T.is_torus()) {
            for (int j = 1; j <= 16; ++j) {
                ps.vectors.push_back(TorusPoint::dyadic({j}));
                ps.ladder.push_back(std::ldexp(1.0, -j));
            }
            return ps;
        }
        SpaceTag tag = T.space;
        for (std::int64_t j = 1; j <= basis_count; ++j)
            ps.vectors.push_back(SparseVec::basis(j, tag));
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_int_distribution<std::int64_t> idx(1, 64);
        for (int r = 0; r < 8; ++r) {
            std::vector<std::pair<std::int64_t, double>> ents;
            for (int t = 0; t < 12; ++t) ents.emplace_back(idx(rng), gauss(rng));
            SparseVec v = SparseVec::finite(std::move(ents), tag);
            if (v.is_zero()) continue;
            double nrm = lp_norm(v, 2.0).to_double();
            ps.vectors.push_back(v.scaled(1.0 / nrm));
        }
        // block-pattern probe on fresh support
        SparseVec blk = SparseVec::pattern(
            [](std::int64_t k) { return k * k; },
            [](std::int64_t k) {
                return ScaledReal::from_double(static_cast<double>(k)) *
                       ScaledReal::pow2(-k * k);
            },
            2, 48, tag);
        double bn = lp_norm(blk, 2.0).to_double();
        if (bn > 0.0) ps.vectors.push_back(blk.scaled(1.0 / bn));
        return ps;
    }
};

// ---------------------------------------------------------------------------
// Dichotomies
// ---------------------------------------------------------------------------

struct DichotomyVerdict {
    enum class Side { EquicontinuousLike, SensitiveLike };
    Side side = Side::EquicontinuousLike;
    double bound = 0.0;        // achieved sup over probes (equicontinuous side)
    int witness = -1;          // probe index (sensitive side)
    double witness_max = 0.0;  // largest orbit seminorm of the witness
    std::int64_t witness_argmax = 0;
    std::int64_t first_step_over_target = -1;  // first n with orbit norm > target
    json evidence;
};

/// Orbit-boundedness dichotomy: on linear kinds the Banach-Steinhaus
/// reduction makes "some probe orbit unbounded" the sensitivity certificate;
/// torus kinds are probed directly near the identity.
inline DichotomyVerdict equicontinuity_dichotomy(const OperatorSpec& T, const ProbeSet& probes,
                                                 const ClassifierConfig& cfg,
                                                 double target = 1e6) {
    cfg.validate();
    DichotomyVerdict v;
    const std::int64_t N = cfg.horizon;
    if (T.is_torus()) {
        // sensitive iff arbitrarily small probes still separate by delta_sep
        MetricSpec m = MetricSpec::torus(T.space.torus_dim);
        bool all_separate = true;
        double last_max = 0.0;
        for (const auto& p : probes.vectors) {
            Point cur = p;
            double mx = metric_from_identity(m, cur).value;
            for (std::int64_t n = 1; n <= N; ++n) {
                cur = chaoscope::apply(T, cur);
                mx = std::max(mx, metric_from_identity(m, cur).value);
            }
            last_max = mx;
            if (mx < cfg.delta_sep) all_separate = false;
        }
        v.side = all_separate ? DichotomyVerdict::Side::SensitiveLike
                              : DichotomyVerdict::Side::EquicontinuousLike;
        v.bound = last_max;
        v.evidence = json{{"probe_count", probes.vectors.size()}};
        return v;
    }

    MetricSpec m = MetricSpec::banach(T.space.kind == SpaceKind::Lp ? T.space.p : 2.0);
    double global_sup = 0.0;
    for (std::size_t pi = 0; pi < probes.vectors.size(); ++pi) {
        Point cur = probes.vectors[pi];
        double mx = 0.0;
        std::int64_t amx = 0, first_over = -1;
        for (std::int64_t n = 1; n <= N; ++n) {
            cur = chaoscope::apply(T, cur);
            if (std::get<SparseVec>(cur).is_zero()) break;  // finite support consumed
            double nn = rho_value(m, cfg.seminorm_index, cur);
            if (nn > mx) {
                mx = nn;
                amx = n;
            }
            if (first_over < 0 && nn > target) first_over = n;
        }
        global_sup = std::max(global_sup, mx);
        if (mx > v.witness_max) {
            v.witness_max = mx;
            v.witness = static_cast<int>(pi);
            v.witness_argmax = amx;
            v.first_step_over_target = first_over;
        }
    }
    bool sensitive = global_sup > 1.0 / cfg.eps_small;
    v.side = sensitive ? DichotomyVerdict::Side::SensitiveLike
                       : DichotomyVerdict::Side::EquicontinuousLike;
    v.bound = global_sup;
    if (!sensitive) {
        v.witness = -1;
        v.first_step_over_target = -1;
    }
    v.evidence = json{{"sup_over_probes", global_sup}, {"target", target}};
    return v;
}

// ---------------------------------------------------------------------------
// Absolute Cesaro boundedness
// ---------------------------------------------------------------------------

struct CesaroBoundReport {
    bool bounded = true;
    double bound = 0.0;  // sup over probes of max_n A_n(x)/||x||
    int counter_witness = -1;
    double witness_ratio = 0.0;
    std::int64_t witness_at_n = 0;
    std::vector<double> per_probe;  // max ratio per probe
    std::vector<std::int64_t> per_probe_argmax;
};

/// sup_n (1/n) sum ||T^i x|| / ||x|| over the probe set; a single probe whose
/// averages blow past 1/eps_small refutes absolute Cesaro boundedness.
inline CesaroBoundReport absolutely_cesaro_bounded(const OperatorSpec& T,
                                                   const ProbeSet& probes,
                                                   const ClassifierConfig& cfg) {
    cfg.validate();
    if (T.is_torus()) throw ConfigError("absolute Cesaro boundedness needs a Banach norm");
    MetricSpec m = MetricSpec::banach(T.space.kind == SpaceKind::Lp ? T.space.p : 2.0);
    CesaroBoundReport rep;
    for (std::size_t pi = 0; pi < probes.vectors.size(); ++pi) {
        const auto& x = probes.vectors[pi];
        double nx = lp_norm(std::get<SparseVec>(x), m.p).to_double();
        if (nx == 0.0) continue;
        Point cur = x;
        double sum = 0.0, comp = 0.0, best = 0.0;
        std::int64_t best_n = 0;
        for (std::int64_t n = 1; n <= cfg.horizon; ++n) {
            cur = chaoscope::apply(T, cur);
            double s = lp_norm(std::get<SparseVec>(cur), m.p).to_double();
            double y = s - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            double a = sum / static_cast<double>(n) / nx;
            if (a > best) {
                best = a;
                best_n = n;
            }
            if (s == 0.0 && std::get<SparseVec>(cur).is_zero()) {
                // averages only decay from here
                break;
            }
        }
        rep.per_probe.push_back(best);
        rep.per_probe_argmax.push_back(best_n);
        if (best > rep.bound) {
            rep.bound = best;
            rep.witness_ratio = best;
            rep.witness_at_n = best_n;
            rep.counter_witness = static_cast<int>(pi);
        }
    }
    rep.bounded = rep.bound <= 1.0 / cfg.eps_small;
    if (rep.bounded) rep.counter_witness = -1;
    return rep;
}

// ---------------------------------------------------------------------------
// Chaos criteria
// ---------------------------------------------------------------------------

struct CriterionReport {
    Status status = Status::Undecided;
    json evidence;
};

namespace detail {

inline void require_nonzero_seeds(const std::vector<SparseVec>& X0) {
    if (X0.empty()) throw RejectedInputError("criterion seed set is empty");
    for (const auto& x : X0)
        if (x.is_zero())
            throw RejectedInputError("zero vector is not a valid criterion seed");
}

/// Support containment in the union support of the seed set stands in for
/// span membership (exact for the basis-style seed sets used here).
inline void require_in_span(const SparseVec& a, const std::vector<SparseVec>& X0,
                            const char* what) {
    for (const auto& e : a.entries) {
        bool covered = false;
        for (const auto& x : X0) {
            if (!x.at(e.index).is_zero()) {
                covered = true;
                break;
            }
        }
        if (!covered)
            throw RejectedInputError(std::string(what) + " is not in the declared span");
    }
}

inline double min_orbit_norm(const OperatorSpec& T, const SparseVec& x, double p,
                             std::int64_t N) {
    Point cur{x};
    double mn = std::numeric_limits<double>::infinity();
    for (std::int64_t n = 1; n <= N; ++n) {
        cur = chaoscope::apply(T, cur);
        double s = lp_norm(std::get<SparseVec>(cur), p).to_double();
        mn = std::min(mn, s);
        if (mn == 0.0) break;
    }
    return mn;
}

}  // namespace detail

/// Li-Yorke chaos criterion: every seed orbit dips near zero, while the
/// diagonal sequence (T^n a_n)_n escapes.
inline CriterionReport check_LY_criterion(const OperatorSpec& T,
                                          const std::vector<SparseVec>& X0,
                                          const std::vector<SparseVec>& a_seq,
                                          const ClassifierConfig& cfg) {
    cfg.validate();
    detail::require_nonzero_seeds(X0);
    if (a_seq.empty()) throw RejectedInputError("criterion needs a probe sequence");
    for (const auto& a : a_seq) detail::require_in_span(a, X0, "a_n");
    double p = X0.front().space.kind == SpaceKind::Lp ? X0.front().space.p : 2.0;

    double worst_dip = 0.0;
    bool cond1 = true;
    for (const auto& x : X0) {
        double mn = detail::min_orbit_norm(T, x, p, cfg.horizon);
        worst_dip = std::max(worst_dip, mn);
        if (mn > cfg.eps_small) cond1 = false;
    }

    double sup_a = 0.0, max_escape = 0.0;
    std::int64_t escape_n = 0;
    for (std::size_t i = 0; i < a_seq.size(); ++i) {
        std::int64_t n = static_cast<std::int64_t>(i) + 1;
        sup_a = std::max(sup_a, lp_norm(a_seq[i], p).to_double());
        Point img = orbit_oracle(T, Point{a_seq[i]}, n);
        double t = lp_norm(std::get<SparseVec>(img), p).to_double();
        if (t > max_escape) {
            max_escape = t;
            escape_n = n;
        }
    }
    bool cond2 = max_escape >= 1.0 / cfg.eps_small;

    CriterionReport rep;
    rep.status = (cond1 && cond2) ? Status::Certified : Status::Refuted;
    rep.evidence = json{{"worst_orbit_dip", worst_dip},
                        {"sup_probe_norm", sup_a},
                        {"max_diagonal_norm", max_escape},
                        {"escape_step", escape_n}};
    return rep;
}

/// Mean Li-Yorke chaos criterion: seed Cesaro averages dip near zero while
/// the supplied (y_k, N_k) satisfy A_{N_k}(y_k) >= k ||y_k||.
inline CriterionReport check_mean_LY_criterion(const OperatorSpec& T,
                                               const std::vector<SparseVec>& X0,
                                               const std::vector<SparseVec>& y_seq,
                                               const std::vector<std::int64_t>& N_seq,
                                               const ClassifierConfig& cfg) {
    cfg.validate();
    detail::require_nonzero_seeds(X0);
    if (y_seq.empty() || y_seq.size() != N_seq.size())
        throw RejectedInputError("need matching (y_k, N_k) sequences");
    for (const auto& y : y_seq) detail::require_in_span(y, X0, "y_k");
    double p = X0.front().space.kind == SpaceKind::Lp ? X0.front().space.p : 2.0;

    bool cond1 = true;
    double worst_mean_dip = 0.0;
    for (const auto& x : X0) {
        Point cur{x};
        double sum = 0.0, comp = 0.0;
        double mn = std::numeric_limits<double>::infinity();
        for (std::int64_t n = 1; n <= cfg.horizon; ++n) {
            cur = chaoscope::apply(T, cur);
            if (std::get<SparseVec>(cur).is_zero()) {
                // dead orbit: A_n = sum/n only decreases, so the tail min is
                // attained at the horizon
                mn = std::min(mn, sum / static_cast<double>(cfg.horizon));
                break;
            }
            double s = lp_norm(std::get<SparseVec>(cur), p).to_double();
            double yk = s - comp;
            double t = sum + yk;
            comp = (t - sum) - yk;
            sum = t;
            mn = std::min(mn, sum / static_cast<double>(n));
        }
        worst_mean_dip = std::max(worst_mean_dip, mn);
        if (mn > cfg.eps_small) cond1 = false;
    }

    bool cond2 = true;
    json ratios = json::array();
    for (std::size_t i = 0; i < y_seq.size(); ++i) {
        std::int64_t k = static_cast<std::int64_t>(i) + 1;
        std::int64_t Nk = N_seq[i];
        if (Nk < 1) throw RejectedInputError("N_k must be positive");
        double ny = lp_norm(y_seq[i], p).to_double();
        if (ny == 0.0) throw RejectedInputError("y_k must be nonzero");
        Point cur{y_seq[i]};
        double sum = 0.0;
        for (std::int64_t n = 1; n <= Nk; ++n) {
            cur = chaoscope::apply(T, cur);
            sum += lp_norm(std::get<SparseVec>(cur), p).to_double();
        }
        double A = sum / static_cast<double>(Nk);
        ratios.push_back(A / ny);
        if (A < static_cast<double>(k) * ny) cond2 = false;
    }

    CriterionReport rep;
    rep.status = (cond1 && cond2) ? Status::Certified : Status::Refuted;
    rep.evidence = json{{"worst_mean_dip", worst_mean_dip}, {"cesaro_ratios", ratios}};
    return rep;
}

/// Distributional chaos criterion: a common density-one vanishing set for the
/// x_k orbits, plus exact separation counts for the y_k blocks.
inline CriterionReport check_DC_criterion(const OperatorSpec& T,
                                          const std::vector<SparseVec>& x_seq,
                                          const std::vector<SparseVec>& y_seq,
                                          const std::vector<std::int64_t>& N_seq,
                                          const ClassifierConfig& cfg) {
    cfg.validate();
    if (x_seq.empty()) throw RejectedInputError("criterion seed set is empty");
    detail::require_nonzero_seeds(x_seq);
    if (y_seq.empty() || y_seq.size() != N_seq.size())
        throw RejectedInputError("need matching (y_k, N_k) sequences");
    for (const auto& y : y_seq) detail::require_in_span(y, x_seq, "y_k");
    double p = x_seq.front().space.kind == SpaceKind::Lp ? x_seq.front().space.p : 2.0;
    const std::int64_t N = cfg.horizon;
    const std::int64_t N0 = cfg.window();

    // (1) density-one vanishing, intersected across seeds
    auto schedule = default_eps_schedule(N);
    std::optional<NatSubset> common;
    bool cond1 = true;
    for (const auto& x : x_seq) {
        std::vector<double> s;
        s.reserve(static_cast<std::size_t>(N));
        Point cur{x};
        for (std::int64_t n = 1; n <= N; ++n) {
            cur = chaoscope::apply(T, cur);
            s.push_back(lp_norm(std::get<SparseVec>(cur), p).to_double());
        }
        auto res = extract_density_one_subset(s, schedule, cfg.eta, N0);
        if (res.flag != DensityFlag::Certified) cond1 = false;
        common = common ? common->intersect(res.subset) : res.subset;
    }
    double common_udens = 0.0;
    if (common && !common->indices.empty())
        common_udens = density_profile(*common, N, N0).upper_at_tail;
    if (common_udens < 1.0 - cfg.eta) cond1 = false;

    // (2) exact integer separation counts per block, and vanishing block norms
    bool cond2 = true;
    double ny1 = lp_norm(y_seq.front(), p).to_double();
    json counts = json::array();
    for (std::size_t i = 0; i < y_seq.size(); ++i) {
        std::int64_t k = static_cast<std::int64_t>(i) + 1;
        std::int64_t Nk = N_seq[i];
        if (Nk < 1) throw RejectedInputError("N_k must be positive");
        double ny = lp_norm(y_seq[i], p).to_double();
        if (ny > 2.0 * std::max(1.0, ny1) / static_cast<double>(k)) cond2 = false;
        Point cur{y_seq[i]};
        std::int64_t c = 0;
        for (std::int64_t n = 1; n <= Nk; ++n) {
            cur = chaoscope::apply(T, cur);
            if (lp_norm(std::get<SparseVec>(cur), p).to_double() > cfg.delta_sep) ++c;
        }
        counts.push_back(c);
        // c >= N_k (1 - 1/k), integer form
        if (c * k < Nk * k - Nk) cond2 = false;
    }

    CriterionReport rep;
    rep.status = (cond1 && cond2) ? Status::Certified : Status::Refuted;
    rep.evidence = json{{"common_vanishing_udens", common_udens},
                        {"separation_counts", counts}};
    return rep;
}

// ---------------------------------------------------------------------------
// Irregular-vector search
// ---------------------------------------------------------------------------

enum class SearchStrategy { Block, Random, Basis };

struct SearchResult {
    std::optional<Point> candidate;
    PointVerdict verdict;
    bool found = false;  // irregular (or semi-irregular) certified
    json info;
};

/// Block-pattern candidate sum_k a_k e_{k^2} with a_k = k r^{-k^2} tuned to
/// the operator's weight growth rate r.
inline SparseVec block_candidate(const OperatorSpec& T, const ClassifierConfig& cfg) {
    double r = growth_rate(T);
    if (r <= 0.0) throw UnsupportedOracleError("block strategy needs a shift-like operator");
    std::int64_t h2 = cfg.horizon * cfg.stability_factor;
    std::int64_t k_max =
        static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(h2)))) + 2;
    ScaledReal rs = ScaledReal::from_double(r);
    return SparseVec::pattern(
        [](std::int64_t k) { return k * k; },
        [rs](std::int64_t k) {
            return ScaledReal::from_double(static_cast<double>(k)) * rs.ipow(-k * k);
        },
        2, k_max, T.space);
}

inline SearchResult search_irregular(const OperatorSpec& T, SearchStrategy strategy,
                                     const MetricSpec& m, const ClassifierConfig& cfg,
                                     std::uint64_t seed = 1) {
    cfg.validate();
    auto classify_candidate = [&](const Point& c) {
        SearchResult r;
        r.candidate = c;
        r.verdict = classify_point(T, c, m, cfg);
        bool irr = r.verdict.certified("irregular");
        bool semi = r.verdict.certified("semi_irregular");
        r.found = irr || semi;
        r.info = json{{"irregular", irr}, {"semi_irregular", semi}};
        return r;
    };

    switch (strategy) {
        case SearchStrategy::Block: {
            if (T.is_torus()) {
                std::int64_t h2 = cfg.horizon * cfg.stability_factor;
                std::int64_t k_max = static_cast<std::int64_t>(
                                         std::ceil(std::sqrt(static_cast<double>(h2)))) +
                                     1;
                std::vector<std::int64_t> bits;
                for (std::int64_t k = 1; k <= k_max; ++k) bits.push_back(k * k);
                return classify_candidate(TorusPoint::dyadic(bits));
            }
            double r = growth_rate(T);
            if (r <= 0.0 || T.kind == OperatorSpec::Kind::Identity ||
                T.kind == OperatorSpec::Kind::Zero ||
                T.kind == OperatorSpec::Kind::Diagonal) {
                // no support translation to exploit; fall back to basis probing
                return search_irregular(T, SearchStrategy::Basis, m, cfg, seed);
            }
            return classify_candidate(block_candidate(T, cfg));
        }
        case SearchStrategy::Basis: {
            SearchResult best;
            for (std::int64_t j = 1; j <= 16; ++j) {
                auto r = classify_candidate(SparseVec::basis(j, T.space));
                if (r.found) return r;
                if (j == 1) best = r;
            }
            best.info["exhausted"] = true;
            return best;
        }
        case SearchStrategy::Random: {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::uniform_int_distribution<std::int64_t> idx(1, 256);
            SearchResult best;
            for (int trial = 0; trial < 8; ++trial) {
                std::vector<std::pair<std::int64_t, double>> ents;
                for (int t = 0; t < 16; ++t) ents.emplace_back(idx(rng), gauss(rng));
                SparseVec v = SparseVec::finite(std::move(ents), T.space);
                if (v.is_zero()) continue;
                auto r = classify_candidate(v);
                if (r.found) return r;
                if (trial == 0) best = r;
            }
            best.info["exhausted"] = true;
            return best;
        }
    }
    throw ConfigError("unknown search strategy");
}

// ---------------------------------------------------------------------------
// Dense irregular manifold construction
// ---------------------------------------------------------------------------

struct ManifoldResult {
    bool success = false;
    std::vector<SparseVec> basis;
    int samples_certified = 0;
    int samples_total = 0;
    json diagnostics;
};

/// Inductive finite-scale version of the dense-irregular-manifold argument:
/// each x_i approximates its target within 1/i by adding a scaled irregular
/// block on fresh support, with nested vanishing-index bookkeeping, and the
/// output span is certified by classifying random unit-sphere combinations.
inline ManifoldResult construct_irregular_manifold(const OperatorSpec& T,
                                                   const std::vector<SparseVec>& targets,
                                                   const MetricSpec& m,
                                                   const ClassifierConfig& cfg,
                                                   std::uint64_t seed = 1,
                                                   int samples = 100) {
    cfg.validate();
    ManifoldResult out;
    out.samples_total = samples;
    if (targets.empty()) {
        out.success = true;
        out.diagnostics = json{{"note", "empty target list; trivially certified"}};
        return out;
    }

    auto base = search_irregular(T, SearchStrategy::Block, m, cfg, seed);
    if (!base.verdict.certified("irregular")) {
        out.diagnostics = json{{"failure", "no certified irregular candidate"},
                               {"search", base.verdict.to_json()}};
        return out;
    }
    const SparseVec& w = std::get<SparseVec>(*base.candidate);
    double p = m.p;
    const std::int64_t k = static_cast<std::int64_t>(targets.size());
    const std::int64_t N0 = cfg.window();

    std::vector<std::vector<std::int64_t>> vanishing;  // nested bookkeeping
    for (std::int64_t i = 1; i <= k; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 8 && !placed; ++attempt) {
            std::int64_t offset = i + attempt * k;
            SparseVec wi = w.shifted_support(offset);
            double nw = lp_norm(wi, p).to_double();
            double ci = 1.0 / (2.0 * static_cast<double>(i) * nw);
            SparseVec xi = targets[static_cast<std::size_t>(i - 1)] + wi.scaled(ci);
            double dist = lp_norm(xi - targets[static_cast<std::size_t>(i - 1)], p).to_double();
            if (!(dist < 1.0 / static_cast<double>(i))) continue;

            // vanishing indices of the new pick over the tail window
            std::vector<std::int64_t> vi;
            Point cur{xi};
            for (std::int64_t n = 1; n <= cfg.horizon; ++n) {
                cur = chaoscope::apply(T, cur);
                if (n >= N0 &&
                    lp_norm(std::get<SparseVec>(cur), p).to_double() <= cfg.eps_small)
                    vi.push_back(n);
            }
            // refinement: the common vanishing set must survive
            std::vector<std::int64_t> refined = vi;
            for (const auto& prev : vanishing) {
                std::vector<std::int64_t> tmp;
                std::set_intersection(refined.begin(), refined.end(), prev.begin(),
                                      prev.end(), std::back_inserter(tmp));
                refined.swap(tmp);
            }
            if (refined.empty()) continue;
            vanishing.push_back(std::move(vi));
            out.basis.push_back(std::move(xi));
            placed = true;
        }
        if (!placed) {
            out.diagnostics =
                json{{"failure", "candidate pool exhausted without 1/i proximity"},
                     {"at_target", i}};
            out.basis.clear();
            return out;
        }
    }

    // certification by sampled unit-sphere combinations
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < samples; ++t) {
        std::vector<double> alpha(static_cast<std::size_t>(k));
        double nrm = 0.0;
        do {
            nrm = 0.0;
            for (auto& a : alpha) {
                a = gauss(rng);
                nrm += a * a;
            }
        } while (nrm < 1e-12);
        nrm = std::sqrt(nrm);
        SparseVec v = SparseVec::zero(out.basis.front().space);
        for (std::int64_t i = 0; i < k; ++i)
            v = v + out.basis[static_cast<std::size_t>(i)].scaled(
                        alpha[static_cast<std::size_t>(i)] / nrm);
        PointVerdict pv = classify_point(T, v, m, cfg);
        if (pv.certified("irregular")) ++out.samples_certified;
    }
    out.success = out.samples_certified == samples;
    out.diagnostics = json{{"samples_certified", out.samples_certified},
                           {"samples_total", samples}};
    return out;
}

// ---------------------------------------------------------------------------
// Distributional sensitivity
// ---------------------------------------------------------------------------

struct DistributionalSensitivityVerdict {
    Status status = Status::Undecided;
    std::optional<Point> witness;
    bool mean_L_unstable = false;  // Banach equivalence rider
    json evidence;
};

inline Point block_candidate_or_basis(const OperatorSpec& T, const ClassifierConfig& cfg) {
    if (growth_rate(T) > 0.0 && T.kind != OperatorSpec::Kind::Identity &&
        T.kind != OperatorSpec::Kind::Zero && T.kind != OperatorSpec::Kind::Diagonal)
        return block_candidate(T, cfg);
    return SparseVec::basis(1, T.space);
}

/// Searches the probe family for a distributionally m-unbounded orbit; a
/// certified witness simultaneously reports distributional sensitivity and,
/// on Banach spaces, mean-L-unstability.
inline DistributionalSensitivityVerdict distributional_sensitivity_probe(
    const OperatorSpec& T, const MetricSpec& m, const ClassifierConfig& cfg) {
    cfg.validate();
    DistributionalSensitivityVerdict v;
    std::vector<Point> probes;
    if (T.is_torus()) {
        probes.push_back(TorusPoint::dyadic({1}));
    } else {
        std::int64_t h2 = cfg.horizon * cfg.stability_factor;
        probes.push_back(SparseVec::basis(2 * h2 + 1, T.space));
        probes.push_back(SparseVec::basis(h2 + 1, T.space));
        probes.push_back(SparseVec::basis(64, T.space));
        probes.push_back(block_candidate_or_basis(T, cfg));
    }
    bool any_undecided = false;
    for (const auto& pr : probes) {
        PointVerdict pv = classify_point(T, pr, m, cfg);
        Status st = pv.at("dist_unbounded").status;
        if (st == Status::Certified) {
            v.status = Status::Certified;
            v.witness = pr;
            v.mean_L_unstable = m.kind == MetricSpec::Kind::BanachNorm;
            v.evidence = pv.at("dist_unbounded").evidence;
            return v;
        }
        if (st == Status::Undecided) any_undecided = true;
    }
    v.status = any_undecided ? Status::Undecided : Status::Refuted;
    v.evidence = json{{"probes_checked", probes.size()}};
    return v;
}

// ---------------------------------------------------------------------------
// Parameter sweep (library side of the CLI sweep)
// ---------------------------------------------------------------------------

struct SweepRow {
    double lambda = 0.0;
    DichotomyVerdict dichotomy;
    CesaroBoundReport cesaro;
};

/// One row per scalar multiple lambda*T, evaluated in deterministic order.
inline std::vector<SweepRow> sweep_scalar(const OperatorSpec& base,
                                          const std::vector<double>& lambdas,
                                          const ClassifierConfig& cfg) {
    std::vector<SweepRow> rows(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        OperatorSpec T = OperatorSpec::scalar_multiple(lambdas[i], base);
        ProbeSet ps = ProbeSet::defaults(T);
        rows[i].lambda = lambdas[i];
        rows[i].dichotomy = equicontinuity_dichotomy(T, ps, cfg);
        rows[i].cesaro = absolutely_cesaro_bounded(T, ps, cfg);
    }
    return rows;
}

}  // namespace chaoscope
