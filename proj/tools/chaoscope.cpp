#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "chaoscope/chaoscope.hpp"

namespace cc = chaoscope;
using cc::json;

namespace {

json load_json_arg(const std::string& arg, const char* what) {
    try {
        if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) return json::parse(arg);
        std::ifstream in(arg);
        if (in.good()) return json::parse(in);
    } catch (const json::parse_error& e) {
        throw cc::SpecError(std::string(what) + ": " + e.what());
    }
    // not a file and not inline JSON: treat as shorthand (vectors only)
    return json(arg);
}

cc::OperatorSpec require_operator(const std::string& op_arg) {
    if (op_arg.empty()) throw cc::SpecError("operator spec required");
    json j = load_json_arg(op_arg, "operator spec");
    if (!j.is_object()) throw cc::SpecError("operator spec required");
    return cc::parse_operator(j);
}

cc::ClassifierConfig build_config(const std::string& config_arg, std::int64_t horizon,
                                  json& config_json_out) {
    json j = json::object();
    if (!config_arg.empty()) {
        j = load_json_arg(config_arg, "config");
        if (!j.is_object()) throw cc::SpecError("config must be a JSON object");
    }
    if (horizon > 0) j["horizon"] = horizon;
    cc::ClassifierConfig cfg = cc::parse_config(j);
    config_json_out = cfg.to_json();
    return cfg;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cc::SpecError("cannot open output file: " + path);
    out << content;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CHAOSCOPE_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

json dichotomy_json(const cc::DichotomyVerdict& d) {
    return json{{"side", d.side == cc::DichotomyVerdict::Side::SensitiveLike
                             ? "sensitive-like"
                             : "equicontinuous-like"},
                {"bound", d.bound},
                {"witness", d.witness},
                {"witness_max", d.witness_max},
                {"witness_argmax", d.witness_argmax},
                {"first_step_over_target", d.first_step_over_target},
                {"evidence", d.evidence}};
}

json cesaro_json(const cc::CesaroBoundReport& r) {
    return json{{"bounded", r.bounded},
                {"C", r.bound},
                {"counter_witness", r.counter_witness},
                {"witness_ratio", r.witness_ratio},
                {"witness_at_n", r.witness_at_n}};
}

struct CommonArgs {
    std::string op;
    std::string metric;
    std::string config;
    std::string out;
    std::int64_t horizon = 0;
    std::uint64_t seed = 1;
};

void add_common(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--op", a.op, "operator spec (JSON file or inline)");
    sub->add_option("--metric", a.metric, "metric: l2, lp:<p>, linf, frechet, bounded");
    sub->add_option("--config", a.config, "classifier config (JSON file or inline)");
    sub->add_option("--out", a.out, "output file (default stdout)");
    sub->add_option("--horizon", a.horizon, "horizon override");
    sub->add_option("--seed", a.seed, "random seed");
}

int cmd_classify(const CommonArgs& a, const std::string& x_arg, const std::string& y_arg,
                 const std::string& trace_path, bool pair_required) {
    cc::OperatorSpec T = require_operator(a.op);
    if (x_arg.empty()) throw cc::SpecError("vector spec required (--x)");
    if (pair_required && y_arg.empty()) throw cc::SpecError("second vector required (--y)");
    json xj = load_json_arg(x_arg, "vector spec");
    cc::Point x = cc::parse_vector(xj, T.space);

    cc::RunManifest man;
    man.command = y_arg.empty() ? "classify" : "classify-pair";
    man.operator_spec = load_json_arg(a.op, "operator spec");
    man.vector_specs.push_back(xj);
    man.metric = a.metric;
    man.seed = a.seed;
    cc::ClassifierConfig cfg = build_config(a.config, a.horizon, man.config);
    cc::MetricSpec m = cc::parse_metric(a.metric, T.space);

    cc::PointVerdict pv;
    cc::Point subject = x;
    if (!y_arg.empty()) {
        json yj = load_json_arg(y_arg, "vector spec");
        cc::Point y = cc::parse_vector(yj, T.space);
        man.vector_specs.push_back(yj);
        subject = cc::point_difference(x, y);
        pv = cc::classify_pair(T, x, y, m, cfg);
    } else {
        pv = cc::classify_point(T, x, m, cfg);
    }

    if (!trace_path.empty()) {
        cc::OrbitTrace tr = cc::trace(T, subject, m, cfg.horizon);
        std::ostringstream csv;
        cc::write_trace_csv(tr, csv);
        write_output(trace_path, csv.str());
    }
    write_output(a.out, dump_report(cc::make_report(man, pv.to_json())));
    return 0;
}

int cmd_sweep(const CommonArgs& a, const std::string& param, double start, double stop,
              double step) {
    cc::OperatorSpec base = require_operator(a.op);
    if (param != "lambda") throw cc::SpecError("only the lambda parameter is supported");
    if (step == 0.0) throw cc::SpecError("sweep step must be nonzero");
    std::vector<double> lambdas;
    if (step > 0.0)
        for (double v = start; v <= stop + 1e-12; v += step) lambdas.push_back(v);
    else
        for (double v = start; v >= stop - 1e-12; v += step) lambdas.push_back(v);
    if (lambdas.empty()) throw cc::SpecError("empty sweep range");

    json cfg_json;
    cc::ClassifierConfig cfg = build_config(a.config, a.horizon, cfg_json);

    std::vector<cc::SweepRow> rows(lambdas.size());
    unsigned W = std::min<unsigned>(worker_count(), static_cast<unsigned>(lambdas.size()));
    std::vector<std::future<void>> tasks;
    for (unsigned w = 0; w < W; ++w) {
        tasks.push_back(std::async(std::launch::async, [&, w]() {
            for (std::size_t i = w; i < lambdas.size(); i += W) {
                cc::OperatorSpec T = cc::OperatorSpec::scalar_multiple(lambdas[i], base);
                cc::ProbeSet ps = cc::ProbeSet::defaults(T, 256, 1);
                rows[i].lambda = lambdas[i];
                rows[i].dichotomy = cc::equicontinuity_dichotomy(T, ps, cfg);
                rows[i].cesaro = cc::absolutely_cesaro_bounded(T, ps, cfg);
            }
        }));
    }
    for (auto& t : tasks) t.get();

    std::ostringstream csv;
    csv << "lambda,side,bound,witness,witness_max,first_step_over_1e6,acb_bounded,acb_C,"
           "acb_witness,acb_argmax\n";
    for (const auto& r : rows) {
        csv << r.lambda << ','
            << (r.dichotomy.side == cc::DichotomyVerdict::Side::SensitiveLike
                    ? "sensitive-like"
                    : "equicontinuous-like")
            << ',' << r.dichotomy.bound << ',' << r.dichotomy.witness << ','
            << r.dichotomy.witness_max << ',' << r.dichotomy.first_step_over_target << ','
            << (r.cesaro.bounded ? 1 : 0) << ',' << r.cesaro.bound << ','
            << r.cesaro.counter_witness << ',' << r.cesaro.witness_at_n << "\n";
    }
    write_output(a.out, csv.str());
    return 0;
}

int cmd_criterion(const CommonArgs& a, const std::string& which, int cap) {
    cc::OperatorSpec T = require_operator(a.op);
    if (T.is_torus()) throw cc::SpecError("criterion checks need a sequence-space operator");
    if (cap < 1) throw cc::SpecError("cap must be >= 1");
    cc::RunManifest man;
    man.command = "criterion " + which;
    man.operator_spec = load_json_arg(a.op, "operator spec");
    man.metric = a.metric;
    man.seed = a.seed;
    cc::ClassifierConfig cfg = build_config(a.config, a.horizon, man.config);

    cc::CriterionReport rep;
    if (which == "ly") {
        std::vector<cc::SparseVec> X0, a_seq;
        for (std::int64_t j = 1; j <= 20; ++j) X0.push_back(cc::SparseVec::basis(j, T.space));
        for (std::int64_t n = 1; n <= 19; ++n)
            a_seq.push_back(cc::SparseVec::basis(n + 1, T.space));
        rep = cc::check_LY_criterion(T, X0, a_seq, cfg);
    } else if (which == "mean-ly") {
        std::int64_t J = cap + 1;
        double r = cc::growth_rate(T);
        if (r > 1.0) {
            // the span seeds' average dips only like (sum of orbit norms)/N
            double need = 4.0 * std::pow(r, static_cast<double>(J)) / cfg.eps_small;
            cfg.horizon = std::max<std::int64_t>(
                cfg.horizon,
                std::min<std::int64_t>(static_cast<std::int64_t>(need), std::int64_t(1) << 24));
            cfg.window_start = 0;
            man.config = cfg.to_json();
        }
        std::vector<cc::SparseVec> X0, y_seq;
        std::vector<std::int64_t> N_seq;
        for (std::int64_t j = 1; j <= J; ++j) X0.push_back(cc::SparseVec::basis(j, T.space));
        for (std::int64_t k = 1; k <= cap; ++k) {
            y_seq.push_back(cc::SparseVec::basis(k + 1, T.space));
            N_seq.push_back(k);
        }
        rep = cc::check_mean_LY_criterion(T, X0, y_seq, N_seq, cfg);
    } else if (which == "dc") {
        std::vector<cc::SparseVec> x_seq, y_seq;
        std::vector<std::int64_t> N_seq;
        std::int64_t J = static_cast<std::int64_t>(cap) * cap + 1;
        for (std::int64_t j = 1; j <= J; ++j)
            x_seq.push_back(cc::SparseVec::basis(j, T.space));
        for (std::int64_t k = 1; k <= cap; ++k) {
            y_seq.push_back(
                cc::SparseVec::basis(k * k + 1, T.space).scaled(1.0 / static_cast<double>(k)));
            N_seq.push_back(k * k);
        }
        rep = cc::check_DC_criterion(T, x_seq, y_seq, N_seq, cfg);
    } else {
        throw cc::SpecError("unknown criterion: " + which);
    }
    json result{{"criterion", which}, {"verdict", cc::to_string(rep.status)},
                {"evidence", rep.evidence}};
    write_output(a.out, dump_report(cc::make_report(man, result)));
    return 0;
}

int cmd_search(const CommonArgs& a, const std::string& strategy) {
    cc::OperatorSpec T = require_operator(a.op);
    cc::SearchStrategy st;
    if (strategy == "block") st = cc::SearchStrategy::Block;
    else if (strategy == "random") st = cc::SearchStrategy::Random;
    else if (strategy == "basis") st = cc::SearchStrategy::Basis;
    else throw cc::SpecError("unknown strategy: " + strategy);

    cc::RunManifest man;
    man.command = "search-irregular " + strategy;
    man.operator_spec = load_json_arg(a.op, "operator spec");
    man.metric = a.metric;
    man.seed = a.seed;
    cc::ClassifierConfig cfg = build_config(a.config, a.horizon, man.config);
    cc::MetricSpec m = cc::parse_metric(a.metric, T.space);

    cc::SearchResult res = cc::search_irregular(T, st, m, cfg, a.seed);
    json result{{"found", res.found},
                {"candidate", res.candidate ? cc::vector_to_json(*res.candidate) : json()},
                {"info", res.info},
                {"verdict", res.verdict.to_json()}};
    write_output(a.out, dump_report(cc::make_report(man, result)));
    return 0;
}

int cmd_construct(const CommonArgs& a, const std::string& targets_arg, int samples) {
    cc::OperatorSpec T = require_operator(a.op);
    if (T.is_torus()) throw cc::SpecError("manifold construction needs a sequence space");
    std::vector<cc::SparseVec> targets;
    json target_specs = json::array();
    if (!targets_arg.empty()) {
        std::stringstream ss(targets_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            json tj = load_json_arg(tok, "target spec");
            target_specs.push_back(tj);
            targets.push_back(std::get<cc::SparseVec>(cc::parse_vector(tj, T.space)));
        }
    }
    cc::RunManifest man;
    man.command = "construct";
    man.operator_spec = load_json_arg(a.op, "operator spec");
    man.vector_specs = target_specs;
    man.metric = a.metric;
    man.seed = a.seed;
    cc::ClassifierConfig cfg = build_config(a.config, a.horizon, man.config);
    cc::MetricSpec m = cc::parse_metric(a.metric, T.space);

    cc::ManifoldResult res =
        cc::construct_irregular_manifold(T, targets, m, cfg, a.seed, samples);
    json basis = json::array();
    for (const auto& b : res.basis) basis.push_back(cc::vector_to_json(cc::Point{b}));
    json result{{"success", res.success},
                {"basis", basis},
                {"samples_certified", res.samples_certified},
                {"samples_total", res.samples_total},
                {"diagnostics", res.diagnostics}};
    write_output(a.out, dump_report(cc::make_report(man, result)));
    return 0;
}

int cmd_export_trace(const CommonArgs& a, const std::string& x_arg, const std::string& y_arg) {
    cc::OperatorSpec T = require_operator(a.op);
    if (x_arg.empty()) throw cc::SpecError("vector spec required (--x)");
    cc::Point x = cc::parse_vector(load_json_arg(x_arg, "vector spec"), T.space);
    json cfg_json;
    cc::ClassifierConfig cfg = build_config(a.config, a.horizon, cfg_json);
    cc::MetricSpec m = cc::parse_metric(a.metric, T.space);
    cc::OrbitTrace tr;
    if (!y_arg.empty()) {
        cc::Point y = cc::parse_vector(load_json_arg(y_arg, "vector spec"), T.space);
        tr = cc::pair_trace(T, x, y, m, cfg.horizon);
    } else {
        tr = cc::trace(T, x, m, cfg.horizon);
    }
    std::ostringstream csv;
    cc::write_trace_csv(tr, csv);
    write_output(a.out, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chaoscope: finite-horizon chaos detectors for linear operators and "
                 "torus endomorphisms"};
    app.require_subcommand(1);

    CommonArgs classify_args, pair_args, sweep_args, crit_args, search_args, construct_args,
        trace_args;
    std::string classify_x, classify_y, classify_trace;
    std::string pair_x, pair_y;
    std::string sweep_param = "lambda";
    double sweep_start = 0.0, sweep_stop = 0.0, sweep_step = 0.0;
    std::string crit_which;
    int crit_cap = 10;
    std::string search_strategy = "block";
    std::string construct_targets;
    int construct_samples = 100;
    std::string trace_x, trace_y;

    CLI::App* c = app.add_subcommand("classify", "classify a point (or pair with --y)");
    add_common(c, classify_args);
    c->add_option("--x", classify_x, "vector spec");
    c->add_option("--y", classify_y, "second vector (pair mode)");
    c->add_option("--trace", classify_trace, "also write the orbit trace CSV here");

    CLI::App* cp = app.add_subcommand("classify-pair", "classify a pair of points");
    add_common(cp, pair_args);
    cp->add_option("--x", pair_x, "first vector spec");
    cp->add_option("--y", pair_y, "second vector spec");

    CLI::App* sw = app.add_subcommand("sweep", "parameter sweep producing a CSV phase table");
    add_common(sw, sweep_args);
    sw->add_option("--param", sweep_param, "parameter name (lambda)");
    sw->add_option("--start", sweep_start, "range start")->required();
    sw->add_option("--stop", sweep_stop, "range stop")->required();
    sw->add_option("--step", sweep_step, "range step")->required();

    CLI::App* cr = app.add_subcommand("criterion", "run a chaos criterion check");
    add_common(cr, crit_args);
    cr->add_option("which", crit_which, "ly | mean-ly | dc")->required();
    cr->add_option("--cap", crit_cap, "sequence cap k <= cap");

    CLI::App* se = app.add_subcommand("search-irregular", "search for an irregular vector");
    add_common(se, search_args);
    se->add_option("--strategy", search_strategy, "block | random | basis");

    CLI::App* co = app.add_subcommand("construct", "construct a dense irregular manifold");
    add_common(co, construct_args);
    co->add_option("--targets", construct_targets, "comma-separated target vector specs");
    co->add_option("--samples", construct_samples, "unit-sphere certification samples");

    CLI::App* et = app.add_subcommand("export-trace", "write an orbit trace CSV");
    add_common(et, trace_args);
    et->add_option("--x", trace_x, "vector spec");
    et->add_option("--y", trace_y, "second vector (pair trace)");

    try {
        app.parse(argc, argv);
        if (c->parsed()) return cmd_classify(classify_args, classify_x, classify_y,
                                             classify_trace, false);
        if (cp->parsed()) return cmd_classify(pair_args, pair_x, pair_y, "", true);
        if (sw->parsed())
            return cmd_sweep(sweep_args, sweep_param, sweep_start, sweep_stop, sweep_step);
        if (cr->parsed()) return cmd_criterion(crit_args, crit_which, crit_cap);
        if (se->parsed()) return cmd_search(search_args, search_strategy);
        if (co->parsed()) return cmd_construct(construct_args, construct_targets,
                                               construct_samples);
        if (et->parsed()) return cmd_export_trace(trace_args, trace_x, trace_y);
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    } catch (const cc::SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cc::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cc::RejectedInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
