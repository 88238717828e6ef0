#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaoscope/density.hpp"
#include "chaoscope/errors.hpp"
#include "chaoscope/orbit.hpp"

namespace chaoscope {

using json = nlohmann::ordered_json;

enum class Status { Certified, Refuted, Undecided };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Certified: return "certified";
        case Status::Refuted: return "refuted";
        case Status::Undecided: return "undecided";
    }
    return "undecided";
}

/// Quantifier-discharge policy for the limsup/liminf definitions: tail-window
/// extrema at horizon N, re-checked at horizon stability_factor*N.
struct ClassifierConfig {
    std::int64_t horizon = 1 << 14;
    std::int64_t window_start = 0;  // 0 means ceil(horizon/2)
    double eps_small = 1e-3;
    double delta_sep = 0.1;
    double eta = 0.1;                   // density margin
    std::int64_t seminorm_index = 0;    // 0 means space default
    double unbounded_threshold = 20.0;  // discharge level for "= infinity" clauses
    double growth_factor = 1.3;         // required max growth across horizons
    int stability_factor = 2;
    int eps_levels = 10;        // distributional-proximal levels 2^-1..2^-eps_levels
    int unbounded_levels = 10;  // M grid 2^1..2^{unbounded_levels}

    std::int64_t window() const { return window_start > 0 ? window_start : (horizon + 1) / 2; }

    void validate() const {
        if (horizon < 4) throw ConfigError("horizon too small");
        if (window() >= horizon) throw ConfigError("window start must precede horizon");
        if (!(eps_small > 0.0 && eps_small < delta_sep))
            throw ConfigError("need 0 < eps_small < delta_sep");
        if (!(eta > 0.0 && eta < 0.5)) throw ConfigError("need 0 < eta < 1/2");
        if (stability_factor < 2) throw ConfigError("stability factor must be >= 2");
    }

    json to_json() const {
        return json{{"horizon", horizon},
                    {"window_start", window()},
                    {"eps_small", eps_small},
                    {"delta_sep", delta_sep},
                    {"eta", eta},
                    {"seminorm_index", seminorm_index},
                    {"unbounded_threshold", unbounded_threshold},
                    {"growth_factor", growth_factor},
                    {"stability_factor", stability_factor},
                    {"eps_levels", eps_levels},
                    {"unbounded_levels", unbounded_levels}};
    }
};

struct PredicateResult {
    Status status = Status::Undecided;
    json evidence;
    std::vector<std::int64_t> witnesses;
};

/// Verdicts for every pair/point notion evaluated from one orbit trace.
struct PointVerdict {
    std::map<std::string, PredicateResult> entries;
    ClassifierConfig config;

    const PredicateResult& at(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) throw ConfigError("unknown predicate: " + key);
        return it->second;
    }
    bool certified(const std::string& key) const {
        return at(key).status == Status::Certified;
    }

    json to_json() const {
        json arr = json::array();
        for (const auto& [name, r] : entries) {
            arr.push_back(json{{"predicate", name},
                               {"verdict", to_string(r.status)},
                               {"evidence", r.evidence},
                               {"witnesses", r.witnesses}});
        }
        return json{{"config", config.to_json()}, {"verdicts", arr}};
    }
};

namespace detail {

struct SeriesStats {
    double min_v = std::numeric_limits<double>::infinity();
    double max_v = 0.0;
    std::int64_t argmin = 0;
    std::int64_t argmax = 0;
};

inline SeriesStats window_stats(std::span<const double> v, std::int64_t lo, std::int64_t hi) {
    SeriesStats st;
    for (std::int64_t n = lo; n <= hi; ++n) {
        double x = v[static_cast<std::size_t>(n - 1)];
        if (x < st.min_v) {
            st.min_v = x;
            st.argmin = n;
        }
        if (x > st.max_v || st.argmax == 0) {
            st.max_v = x;
            st.argmax = n;
        }
    }
    return st;
}

/// One horizon's worth of predicate evaluations over [N0, h].
struct HorizonEval {
    SeriesStats s;        // metric series
    SeriesStats mean;     // Cesaro of metric series
    SeriesStats rho;      // seminorm series
    SeriesStats mean_rho; // Cesaro of seminorm series
    double min_level_prox = 1.0;  // min over eps levels of udens({s<eps})
    double sep_udens = 0.0;       // udens({s > delta_sep})
    double min_level_unbnd = 1.0; // min over M levels of udens({rho>M})
};

inline HorizonEval evaluate_horizon(std::span<const double> s, std::span<const double> mean_s,
                                    std::span<const double> rho,
                                    std::span<const double> mean_rho, std::int64_t N0,
                                    std::int64_t h, const ClassifierConfig& cfg) {
    HorizonEval ev;
    ev.s = window_stats(s, N0, h);
    ev.mean = window_stats(mean_s, N0, h);
    ev.rho = window_stats(rho, N0, h);
    ev.mean_rho = window_stats(mean_rho, N0, h);
    for (int k = 1; k <= cfg.eps_levels; ++k) {
        double eps = std::ldexp(1.0, -k);
        double u = tail_upper_density(s.subspan(0, static_cast<std::size_t>(h)), N0, h,
                                      [eps](double v) { return v < eps; });
        ev.min_level_prox = std::min(ev.min_level_prox, u);
    }
    ev.sep_udens = tail_upper_density(s.subspan(0, static_cast<std::size_t>(h)), N0, h,
                                      [&](double v) { return v > cfg.delta_sep; });
    for (int k = 1; k <= cfg.unbounded_levels; ++k) {
        double M = std::ldexp(1.0, k);
        double u = tail_upper_density(rho.subspan(0, static_cast<std::size_t>(h)), N0, h,
                                      [M](double v) { return v > M; });
        ev.min_level_unbnd = std::min(ev.min_level_unbnd, u);
    }
    return ev;
}

inline Status combine(bool at_n, bool at_2n) {
    if (at_n && at_2n) return Status::Certified;
    if (!at_n && !at_2n) return Status::Refuted;
    return Status::Undecided;
}

inline std::vector<double> running_cesaro(std::span<const double> v) {
    std::vector<double> out;
    out.reserve(v.size());
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double y = v[i] - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        out.push_back(sum / static_cast<double>(i + 1));
    }
    return out;
}

}  // namespace detail

/// Finite-horizon classifier for every point notion tied to the identity:
/// asymptotic, proximal, (semi-)irregular, their mean versions, and the
/// distributional family. Each entry is Certified/Refuted only when the
/// evidence at horizons N and stability_factor*N agrees.
inline PointVerdict classify_point(const OperatorSpec& T, const Point& x, const MetricSpec& m,
                                   const ClassifierConfig& cfg) {
    cfg.validate();
    const std::int64_t N = cfg.horizon;
    const std::int64_t h2 = N * cfg.stability_factor;
    const std::int64_t N0 = cfg.window();

    std::vector<double> s, rho;
    s.reserve(static_cast<std::size_t>(h2));
    rho.reserve(static_cast<std::size_t>(h2));
    orbit_scan(T, x, m, h2, cfg.seminorm_index,
               [&](std::int64_t, double sv, double rv) {
                   s.push_back(sv);
                   rho.push_back(rv);
               });
    std::vector<double> mean_s = detail::running_cesaro(s);
    std::vector<double> mean_rho = detail::running_cesaro(rho);

    auto e1 = detail::evaluate_horizon(s, mean_s, rho, mean_rho, N0, N, cfg);
    auto e2 = detail::evaluate_horizon(s, mean_s, rho, mean_rho, N0, h2, cfg);

    PointVerdict out;
    out.config = cfg;

    auto put = [&](const std::string& name, Status st, json ev,
                   std::vector<std::int64_t> wit) {
        PredicateResult r;
        r.status = st;
        r.evidence = std::move(ev);
        r.witnesses = std::move(wit);
        out.entries[name] = std::move(r);
    };

    const double eps = cfg.eps_small;
    const double dsep = cfg.delta_sep;
    const double ubt = cfg.unbounded_threshold;
    const double eta = cfg.eta;

    // (a) asymptotic to identity: limsup estimate vanishes.
    put("asymptotic", detail::combine(e1.s.max_v <= eps, e2.s.max_v <= eps),
        json{{"limsup_est", e1.s.max_v}, {"limsup_est_2n", e2.s.max_v}}, {e1.s.argmax});

    // (b) proximal to identity: liminf estimate vanishes.
    bool prox1 = e1.s.min_v <= eps, prox2 = e2.s.min_v <= eps;
    put("proximal", detail::combine(prox1, prox2),
        json{{"liminf_est", e1.s.min_v}, {"liminf_est_2n", e2.s.min_v}}, {e1.s.argmin});

    // (c) semi-irregular: proximal with separated limsup.
    bool semi1 = prox1 && e1.s.max_v >= dsep;
    bool semi2 = prox2 && e2.s.max_v >= dsep;
    Status semi_st = detail::combine(semi1, semi2);
    put("semi_irregular", semi_st,
        json{{"liminf_est", e1.s.min_v}, {"limsup_est", e1.s.max_v},
             {"limsup_est_2n", e2.s.max_v}},
        {e1.s.argmin, e1.s.argmax});

    // (d) irregular w.r.t. p_m: proximal and seminorm maxima that keep growing
    // across horizons (the finite discharge of limsup rho = infinity).
    bool irr1 = prox1 && e1.rho.max_v >= ubt;
    bool irr2 = prox2 && e2.rho.max_v >= ubt;
    bool growth = e2.rho.max_v >= cfg.growth_factor * e1.rho.max_v;
    Status irr_st = detail::combine(irr1, irr2);
    if (irr_st == Status::Certified && !growth) irr_st = Status::Undecided;
    if (irr_st == Status::Certified && semi_st != Status::Certified) irr_st = Status::Undecided;
    put("irregular", irr_st,
        json{{"rho_max", e1.rho.max_v}, {"rho_max_2n", e2.rho.max_v},
             {"growth_ok", growth}, {"threshold", ubt}},
        {e1.rho.argmax, e2.rho.argmax});

    // (e) mean semi-irregular: Cesaro means both vanish and separate.
    bool mprox1 = e1.mean.min_v <= eps, mprox2 = e2.mean.min_v <= eps;
    bool msemi1 = mprox1 && e1.mean.max_v >= dsep;
    bool msemi2 = mprox2 && e2.mean.max_v >= dsep;
    Status msemi_st = detail::combine(msemi1, msemi2);
    put("mean_semi_irregular", msemi_st,
        json{{"mean_liminf_est", e1.mean.min_v}, {"mean_limsup_est", e1.mean.max_v},
             {"mean_liminf_est_2n", e2.mean.min_v}, {"mean_limsup_est_2n", e2.mean.max_v}},
        {e1.mean.argmin, e1.mean.argmax});

    // (f) mean irregular: mean-proximal with unbounded Cesaro seminorm means.
    bool mirr1 = mprox1 && e1.mean_rho.max_v >= ubt;
    bool mirr2 = mprox2 && e2.mean_rho.max_v >= ubt;
    bool mgrowth = e2.mean_rho.max_v >= cfg.growth_factor * e1.mean_rho.max_v;
    Status mirr_st = detail::combine(mirr1, mirr2);
    if (mirr_st == Status::Certified && !mgrowth) mirr_st = Status::Undecided;
    if (mirr_st == Status::Certified && msemi_st != Status::Certified)
        mirr_st = Status::Undecided;
    put("mean_irregular", mirr_st,
        json{{"mean_rho_max", e1.mean_rho.max_v}, {"mean_rho_max_2n", e2.mean_rho.max_v},
             {"growth_ok", mgrowth}},
        {e1.mean_rho.argmax});

    // (g) distributionally proximal: every small-separation level set has tail
    // upper density >= 1 - eta.
    bool dp1 = e1.min_level_prox >= 1.0 - eta;
    bool dp2 = e2.min_level_prox >= 1.0 - eta;
    Status dp_st = detail::combine(dp1, dp2);
    put("dist_proximal", dp_st,
        json{{"min_level_udens", e1.min_level_prox}, {"min_level_udens_2n", e2.min_level_prox},
             {"eta", eta}},
        {});

    // (h)/(i) distributional semi-irregularity of type 2 / type 1.
    bool dc2_1 = dp1 && e1.sep_udens >= eta;
    bool dc2_2 = dp2 && e2.sep_udens >= eta;
    put("dc2_semi_irregular", detail::combine(dc2_1, dc2_2),
        json{{"sep_udens", e1.sep_udens}, {"sep_udens_2n", e2.sep_udens}}, {});
    bool dc1_1 = dp1 && e1.sep_udens >= 1.0 - eta;
    bool dc1_2 = dp2 && e2.sep_udens >= 1.0 - eta;
    put("dc1_semi_irregular", detail::combine(dc1_1, dc1_2),
        json{{"sep_udens", e1.sep_udens}, {"sep_udens_2n", e2.sep_udens}}, {});

    // (j) distributionally unbounded: every M level exceeded on density ~1.
    bool du1 = e1.min_level_unbnd >= 1.0 - eta;
    bool du2 = e2.min_level_unbnd >= 1.0 - eta;
    put("dist_unbounded", detail::combine(du1, du2),
        json{{"min_level_udens", e1.min_level_unbnd},
             {"min_level_udens_2n", e2.min_level_unbnd}},
        {});

    return out;
}

/// A pair is scrambled iff its group difference is the corresponding kind of
/// semi-irregular point (left invariance), so delegate to classify_point.
inline PointVerdict classify_pair(const OperatorSpec& T, const Point& x, const Point& y,
                                  const MetricSpec& m, const ClassifierConfig& cfg) {
    return classify_point(T, point_difference(x, y), m, cfg);
}

enum class ScrambleKind { LiYorke, LiYorkeDelta, Mean, DC1, DC2 };

inline const char* predicate_for(ScrambleKind k) {
    switch (k) {
        case ScrambleKind::LiYorke:
        case ScrambleKind::LiYorkeDelta: return "semi_irregular";
        case ScrambleKind::Mean: return "mean_semi_irregular";
        case ScrambleKind::DC1: return "dc1_semi_irregular";
        case ScrambleKind::DC2: return "dc2_semi_irregular";
    }
    return "semi_irregular";
}

struct FamilyVerdict {
    Status family = Status::Undecided;
    std::vector<std::vector<Status>> pair_status;  // square, diagonal excluded
    std::string predicate;
};

/// Pairwise check of a finite candidate scrambled family. The diagonal is
/// excluded; duplicate points are rejected.
inline FamilyVerdict scrambled_family_check(const OperatorSpec& T,
                                            const std::vector<Point>& points,
                                            ScrambleKind kind, const MetricSpec& m,
                                            ClassifierConfig cfg, double delta = 0.0) {
    if (points.size() < 2) throw RejectedInputError("scrambled family needs >= 2 points");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points_equal(points[i], points[j]))
                throw RejectedInputError("duplicate points in scrambled family");
    if (kind == ScrambleKind::LiYorkeDelta) {
        if (delta <= 0.0) throw ConfigError("LY-delta family needs delta > 0");
        cfg.delta_sep = delta;
    }

    FamilyVerdict fv;
    fv.predicate = predicate_for(kind);
    std::size_t n = points.size();
    fv.pair_status.assign(n, std::vector<Status>(n, Status::Certified));
    bool all_cert = true, any_ref = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            PointVerdict pv = classify_pair(T, points[i], points[j], m, cfg);
            Status st = pv.at(fv.predicate).status;
            fv.pair_status[i][j] = fv.pair_status[j][i] = st;
            if (st != Status::Certified) all_cert = false;
            if (st == Status::Refuted) any_ref = true;
        }
    }
    fv.family = all_cert ? Status::Certified : (any_ref ? Status::Refuted : Status::Undecided);
    return fv;
}

}  // namespace chaoscope
