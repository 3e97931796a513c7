#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cascadelab/analysis.hpp"
#include "cascadelab/criticality.hpp"
#include "cascadelab/distribution.hpp"
#include "cascadelab/errors.hpp"
#include "cascadelab/exact_moments.hpp"
#include "cascadelab/monte_carlo.hpp"
#include "cascadelab/numeric.hpp"
#include "cascadelab/oracle.hpp"
#include "cascadelab/reduction.hpp"
#include "cascadelab/tree.hpp"

using namespace cascade;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

WeightDistribution load_dist(const std::string& literal, const std::string& json_path,
                             bool require_mean_one) {
    if (!literal.empty() && !json_path.empty())
        throw ConfigError("give either --dist or --dist-json, not both");
    if (!literal.empty())
        return WeightDistribution::parse_literal(literal, require_mean_one);
    if (json_path.empty())
        throw ConfigError("a weight law is required: --dist or --dist-json");
    return WeightDistribution::parse_json(read_file(json_path), require_mean_one);
}

ordered_json law_json(const WeightDistribution& dist) {
    ordered_json j;
    j["atoms"] = dist.atoms();
    j["probs"] = dist.probs();
    return j;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        double v{};
        const auto res = std::from_chars(text.data() + pos, text.data() + text.size(), v);
        if (res.ec != std::errc())
            throw ConfigError(std::string(what) + ": expected a number at position " +
                              std::to_string(pos) + " in \"" + text + "\"");
        out.push_back(v);
        pos = static_cast<std::size_t>(res.ptr - text.data());
        if (pos == text.size()) break;
        if (text[pos] != ',')
            throw ConfigError(std::string(what) + ": expected ',' at position " +
                              std::to_string(pos) + " in \"" + text + "\"");
        ++pos;
    }
    if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
    return out;
}

std::string config_comment(const ordered_json& cfg) {
    return "# config: " + cfg.dump() + "\n";
}

// ---------------------------------------------------------------------------
// critical-q

int run_critical_q(unsigned b, const WeightDistribution& dist,
                   const std::vector<double>& grid, double q_max,
                   const std::string& out) {
    const StructureFunction sf(b, dist);
    ordered_json doc;
    doc["config"] = {{"command", "critical-q"}, {"branching", b},
                     {"dist", law_json(dist)}, {"grid", grid}, {"q_max", q_max}};
    ordered_json phi_rows = ordered_json::array();
    for (double q : grid) {
        ordered_json row;
        row["q"] = q;
        row["phi"] = sf.phi(q);
        row["regime"] = to_string(sf.classify(std::max(q, 1.0)).regime);
        phi_rows.push_back(row);
    }
    doc["phi"] = phi_rows;
    doc["totally_critical"] = sf.is_totally_critical();
    const CriticalRootResult root = sf.find_critical_exponent(q_max);
    ordered_json rj;
    rj["kind"] = to_string(root.kind);
    if (root.q_crit) rj["q_crit"] = *root.q_crit;
    switch (root.kind) {
        case CriticalRootKind::totally_critical:
            rj["message"] = "totally critical: phi vanishes at every exponent";
            break;
        case CriticalRootKind::root:
            rj["message"] = "critical exponent at q = " + format_double(*root.q_crit);
            break;
        case CriticalRootKind::none_subcritical:
            rj["message"] = "no critical exponent <= " + format_double(q_max) +
                            ": phi stays negative";
            break;
        case CriticalRootKind::none_supercritical:
            rj["message"] = "no second root: phi turns positive immediately above 1";
            break;
    }
    doc["root"] = rj;
    emit(out, doc.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// exact-moments

int run_exact_moments(unsigned b, const WeightDistribution& dist, unsigned q_max,
                      unsigned N, const std::string& out) {
    const ordered_json cfg = {{"command", "exact-moments"}, {"branching", b},
                              {"dist", law_json(dist)}, {"q_max", q_max}, {"N", N}};
    const MomentTable table = cascade_moments(b, dist, q_max, N);
    emit(out, config_comment(cfg) + to_csv(table));
    return 0;
}

// ---------------------------------------------------------------------------
// theta-moments

std::string moment_row_csv(const MomentRow& row) {
    std::string out = "k,value,log_value,domain\n";
    for (std::size_t k = 0; k < row.value.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += format_double(row.value[k]);
        out += ',';
        out += format_double(row.log_value[k]);
        out += ',';
        out += row.log_domain ? "log" : "linear";
        out += '\n';
    }
    return out;
}

int run_theta_moments(unsigned b, const WeightDistribution& dist,
                      const std::string& profile_text, const std::string& tree_path,
                      unsigned q_max, const std::string& out) {
    if (!profile_text.empty() && !tree_path.empty())
        throw ConfigError("give either --profile or --tree, not both");
    ordered_json cfg = {{"command", "theta-moments"}, {"branching", b},
                        {"dist", law_json(dist)}, {"q_max", q_max}};
    MomentRow row;
    if (!tree_path.empty()) {
        const WeightedTree t = parse_tree_text(b, read_file(tree_path));
        cfg["tree"] = serialize_tree_text(t);
        row = theta_moments(t.shape, t.weights, dist, q_max);
    } else if (!profile_text.empty()) {
        const LevelProfile profile{b, parse_double_list(profile_text, "--profile")};
        cfg["profile"] = profile.coeffs;
        row = theta_moments(profile, dist, q_max);
    } else {
        throw ConfigError("a coefficient layout is required: --profile or --tree");
    }
    emit(out, config_comment(cfg) + moment_row_csv(row));
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

int run_simulate(unsigned b, const WeightDistribution& dist,
                 const std::vector<unsigned>& depths, double q, std::uint64_t seed,
                 std::uint64_t samples, unsigned batches, unsigned threads,
                 const std::string& out) {
    const ordered_json cfg = {{"command", "simulate"}, {"branching", b},
                              {"dist", law_json(dist)}, {"depths", depths},
                              {"q", q}, {"seed", seed}, {"samples", samples},
                              {"batches", batches}};
    std::string body = config_comment(cfg) + mc_csv_header();
    for (unsigned n : depths) {
        const McConfig mc{b, dist, n, q, seed, samples, batches};
        body += mc_csv_row(mc, estimate_moment(mc, threads));
    }
    emit(out, body);
    return 0;
}

// ---------------------------------------------------------------------------
// reduce

ordered_json profile_stage_json(const PipelineStage& stage) {
    ordered_json j;
    j["stage"] = stage.index;
    j["exponent"] = stage.exponent;
    j["profile"] = stage.profile.coeffs;
    j["atoms"] = stage.dist.atoms();
    j["probs"] = stage.dist.probs();
    j["ratio_to_ideal"] = stage.ratio_to_ideal;
    return j;
}

int run_reduce(unsigned b, const WeightDistribution& dist,
               const std::string& profile_text, const std::string& tree_path,
               std::optional<double> q, std::optional<unsigned> depth,
               const std::string& out) {
    ordered_json doc;
    if (!tree_path.empty()) {
        const WeightedTree t = parse_tree_text(b, read_file(tree_path));
        doc["config"] = {{"command", "reduce"}, {"branching", b},
                         {"dist", law_json(dist)}, {"tree", serialize_tree_text(t)}};
        const SparseWeightsReduction red = reduce(t.shape, t.weights, dist);
        doc["mean_x"] = red.mean_x;
        doc["var_x"] = red.var_x;
        doc["squared_law"] = law_json(red.squared_dist);
        ordered_json support = ordered_json::array();
        for (VertexId v = 0; v < red.shape.vertex_count(); ++v) {
            ordered_json entry;
            entry["path"] = red.shape.path_of(v);
            entry["beta"] = red.beta[v];
            support.push_back(entry);
        }
        doc["beta"] = support;
    } else if (q.has_value()) {
        if (!depth.has_value())
            throw ConfigError("pipeline mode needs both --q and --depth");
        doc["config"] = {{"command", "reduce"}, {"branching", b},
                         {"dist", law_json(dist)}, {"q", *q}, {"depth", *depth}};
        const StructureFunction sf(b, dist);
        const PipelineResult res = reduction_pipeline(sf, *q, *depth);
        ordered_json pre;
        pre["regime"] = to_string(res.preflight.regime);
        pre["phi"] = res.preflight.phi_value;
        pre["totally_critical"] = res.preflight.totally_critical;
        if (res.preflight.q_crit) pre["q_crit"] = *res.preflight.q_crit;
        doc["preflight"] = pre;
        ordered_json stages = ordered_json::array();
        for (const PipelineStage& stage : res.stages)
            stages.push_back(profile_stage_json(stage));
        doc["stages"] = stages;
    } else if (!profile_text.empty()) {
        const LevelProfile profile{b, parse_double_list(profile_text, "--profile")};
        doc["config"] = {{"command", "reduce"}, {"branching", b},
                         {"dist", law_json(dist)}, {"profile", profile.coeffs}};
        const ProfileReduction red = reduce(profile, dist);
        doc["mean_x"] = red.mean_x;
        doc["var_x"] = red.var_x;
        doc["squared_law"] = law_json(red.squared_dist);
        doc["beta"] = red.beta.coeffs;
    } else {
        throw ConfigError("reduce needs --tree, --profile, or --q with --depth");
    }
    emit(out, doc.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// bounds

int run_bounds(unsigned b, const WeightDistribution& dist,
               const std::string& profile_text, const std::string& tree_path,
               double q, const std::string& out) {
    if (!profile_text.empty() && !tree_path.empty())
        throw ConfigError("give either --profile or --tree, not both");
    ordered_json doc;
    BoundsReport rep{};
    if (!tree_path.empty()) {
        const WeightedTree t = parse_tree_text(b, read_file(tree_path));
        doc["config"] = {{"command", "bounds"}, {"branching", b},
                         {"dist", law_json(dist)}, {"q", q},
                         {"tree", serialize_tree_text(t)}};
        rep = evaluate_bounds_sparse(t.shape, t.weights, dist, q);
    } else if (!profile_text.empty()) {
        const LevelProfile profile{b, parse_double_list(profile_text, "--profile")};
        doc["config"] = {{"command", "bounds"}, {"branching", b},
                         {"dist", law_json(dist)}, {"q", q},
                         {"profile", profile.coeffs}};
        rep = evaluate_bounds_profile(profile, dist, q);
    } else {
        throw ConfigError("a coefficient layout is required: --profile or --tree");
    }
    doc["q"] = rep.q;
    doc["lower"] = rep.lower;
    doc["log_lower"] = rep.log_lower;
    if (rep.upper_core) {
        doc["upper_core"] = *rep.upper_core;
        doc["log_upper_core"] = *rep.log_upper_core;
    }
    emit(out, doc.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// oracle-check

int run_oracle_check(unsigned b, const WeightDistribution& dist, unsigned depth,
                     double q, const std::string& profile_text, unsigned threads,
                     const std::string& out) {
    const LevelProfile profile =
        profile_text.empty() ? cascade_profile(b, depth)
                             : LevelProfile{b, parse_double_list(profile_text, "--profile")};
    ordered_json doc;
    doc["config"] = {{"command", "oracle-check"}, {"branching", b},
                     {"dist", law_json(dist)}, {"depth", depth}, {"q", q},
                     {"profile", profile.coeffs}};
    const WeightedTree t = expand_profile(profile, depth);
    const EnumeratedSpace<double> space(t.shape, to_basic_law(dist));
    doc["outcome_count"] = space.outcome_count();
    const double moment = exact_moment_by_enumeration(space, t.weights, q, threads);
    doc["moment"] = moment;
    doc["log_moment"] = std::log(moment);

    int rc = 0;
    const double rounded = std::round(q);
    if (std::abs(q - rounded) <= 1e-12 && rounded >= 1.0 &&
        rounded <= double(kMaxMomentOrder)) {
        const unsigned k = static_cast<unsigned>(rounded);
        const MomentRow row = theta_moments(profile, dist, k);
        const double dp = row.value[k];
        doc["dp_value"] = dp;
        const double scale = std::max({std::abs(moment), std::abs(dp), 1e-300});
        const double rel = std::abs(moment - dp) / scale;
        doc["rel_diff"] = rel;
        const bool agrees = rel <= 1e-10;
        doc["agrees"] = agrees;
        if (!agrees) rc = 1;
    }
    emit(out, doc.dump(2) + "\n");
    return rc;
}

// ---------------------------------------------------------------------------
// verify-theorems

struct Experiment {
    std::string name;
    unsigned branching;
    WeightDistribution dist;
    double q;
    unsigned N;
    ReportConfig report;
    std::optional<std::string> expect_regime;
    ordered_json echo;  // fully-resolved parameters, threads excluded
};

Experiment parse_experiment(const nlohmann::json& j) {
    if (!j.contains("name") || !j.contains("branching") || !j.contains("dist") ||
        !j.contains("q") || !j.contains("N"))
        throw ConfigError("experiment entries need name, branching, dist, q, N");
    Experiment e{j.at("name").get<std::string>(),
                 j.at("branching").get<unsigned>(),
                 WeightDistribution::parse_literal(j.at("dist").get<std::string>()),
                 j.at("q").get<double>(),
                 j.at("N").get<unsigned>(),
                 {},
                 std::nullopt,
                 {}};
    const std::string engine = j.value("engine", std::string("exact"));
    if (engine == "exact")
        e.report.engine = Engine::exact;
    else if (engine == "mc")
        e.report.engine = Engine::mc;
    else
        throw ConfigError("experiment " + e.name + ": unknown engine \"" + engine + "\"");
    e.report.tolerance = j.value("tolerance", 0.1);
    if (j.contains("window")) {
        const auto w = j.at("window");
        if (!w.is_array() || w.size() != 2)
            throw ConfigError("experiment " + e.name + ": window must be [min, max]");
        e.report.window_min = w[0].get<unsigned>();
        e.report.window_max = w[1].get<unsigned>();
    }
    e.report.seed = j.value("seed", std::uint64_t(0));
    e.report.samples = j.value("samples", std::uint64_t(10'000));
    e.report.batches = j.value("batches", 32u);
    if (j.contains("expect_regime"))
        e.expect_regime = j.at("expect_regime").get<std::string>();

    e.echo = {{"name", e.name}, {"branching", e.branching},
              {"dist", law_json(e.dist)}, {"q", e.q}, {"N", e.N},
              {"engine", engine}, {"tolerance", e.report.tolerance}};
    if (j.contains("window"))
        e.echo["window"] = {e.report.window_min, e.report.window_max};
    if (e.report.engine == Engine::mc) {
        e.echo["seed"] = e.report.seed;
        e.echo["samples"] = e.report.samples;
        e.echo["batches"] = e.report.batches;
    }
    if (e.expect_regime) e.echo["expect_regime"] = *e.expect_regime;
    return e;
}

std::string series_csv(const Experiment& e, const Verdict& v) {
    std::string body = config_comment(e.echo);
    if (v.mc_series.empty()) {
        body += "n,log_moment\n";
        for (const auto& [n, y] : v.series) {
            body += std::to_string(n);
            body += ',';
            body += format_double(y);
            body += '\n';
        }
    } else {
        body += mc_csv_header();
        for (const auto& [n, est] : v.mc_series) {
            const McConfig mc{e.branching, e.dist, n, e.q, e.report.seed,
                              e.report.samples, e.report.batches};
            body += mc_csv_row(mc, est);
        }
    }
    return body;
}

int run_verify(const std::string& config_path, const std::string& out_dir,
               unsigned threads) {
    const nlohmann::json config = nlohmann::json::parse(read_file(config_path));
    if (!config.contains("experiments") || !config.at("experiments").is_array())
        throw ConfigError("theorem bundle: config needs an \"experiments\" array");

    std::filesystem::create_directories(out_dir);
    ordered_json bundle;
    ordered_json results = ordered_json::array();
    bool all_pass = true;
    std::vector<std::string> failures;

    for (const auto& entry : config.at("experiments")) {
        Experiment e = parse_experiment(entry);
        e.report.threads = threads;
        const Verdict v = theorem_report(e.branching, e.dist, e.q, e.N, e.report);
        if (e.expect_regime && *e.expect_regime != v.regime)
            throw PreconditionError("experiment " + e.name + ": labeled " +
                                    *e.expect_regime + " but the pair is " + v.regime);

        ordered_json file;
        file["name"] = e.name;
        file["config"] = e.echo;
        file["verdict"] = ordered_json::parse(to_json(v));
        emit(out_dir + "/" + e.name + ".verdict.json", file.dump(2) + "\n");
        emit(out_dir + "/" + e.name + ".series.csv", series_csv(e, v));

        ordered_json summary;
        summary["name"] = e.name;
        summary["theorem"] = v.theorem;
        summary["regime"] = v.regime;
        summary["slope"] = v.slope;
        summary["target"] = v.target;
        summary["tolerance"] = v.tolerance;
        summary["pass"] = v.pass;
        results.push_back(summary);

        std::cout << (v.pass ? "PASS " : "FAIL ") << e.name
                  << "  slope=" << format_double(v.slope)
                  << " target=" << format_double(v.target)
                  << " tol=" << format_double(v.tolerance) << "\n";
        if (!v.pass) {
            all_pass = false;
            failures.push_back(e.name);
        }
    }

    bundle["results"] = results;
    bundle["pass"] = all_pass;
    emit(out_dir + "/bundle.json", bundle.dump(2) + "\n");

    if (!all_pass) {
        std::cerr << "verdict failure:";
        for (const auto& name : failures) std::cerr << " " << name;
        std::cerr << "\n";
        return 1;
    }
    std::cout << "ALL PASS (" << results.size() << " experiments)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for multiplicative cascades on b-ary trees"};
    app.require_subcommand(1);

    // Shared option storage; every subcommand registers the subset it needs.
    std::string dist_literal, dist_json_path, out_path, profile_text, tree_path;
    std::string config_path, out_dir = "artifacts";
    unsigned branching = 2, q_max_u = 4, big_n = 16, depth = 4, batches = 32;
    unsigned threads = 1;
    std::vector<unsigned> depths;
    std::vector<double> grid = {1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 8.0};
    double q = 2.0, root_q_max = 128.0;
    std::uint64_t seed = 1, samples = 10'000;

    const auto add_dist = [&](CLI::App* sub) {
        sub->add_option("--dist", dist_literal,
                        "weight law literal, e.g. atoms=0,2;probs=0.5,0.5");
        sub->add_option("--dist-json", dist_json_path,
                        "path to a JSON weight law {\"atoms\":[...],\"probs\":[...]}");
    };
    const auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", out_path, "output file (default: stdout)");
    };

    CLI::App* critical = app.add_subcommand(
        "critical-q", "evaluate the structure function and locate its second root");
    add_dist(critical);
    add_out(critical);
    critical->add_option("--b", branching, "branching factor")->capture_default_str();
    critical->add_option("--grid", grid, "exponents to tabulate phi on")
        ->delimiter(',');
    critical->add_option("--q-max", root_q_max, "root search upper limit")
        ->capture_default_str();

    CLI::App* moments = app.add_subcommand(
        "exact-moments", "integer moments of the depth-n cascade average");
    add_dist(moments);
    add_out(moments);
    moments->add_option("--b", branching, "branching factor")->capture_default_str();
    moments->add_option("--q-max", q_max_u, "highest moment order")->capture_default_str();
    moments->add_option("--N", big_n, "deepest level")->capture_default_str();

    CLI::App* theta = app.add_subcommand(
        "theta-moments", "integer moments of a weighted tree sum");
    add_dist(theta);
    add_out(theta);
    theta->add_option("--b", branching, "branching factor")->capture_default_str();
    theta->add_option("--q-max", q_max_u, "highest moment order")->capture_default_str();
    theta->add_option("--profile", profile_text, "level coefficients c0,c1,...");
    theta->add_option("--tree", tree_path, "path<TAB>weight file");

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo moments of the cascade average");
    add_dist(simulate);
    add_out(simulate);
    simulate->add_option("--b", branching, "branching factor")->capture_default_str();
    simulate->add_option("--depth", depths, "tree depths to sample (repeatable)")
        ->required()
        ->delimiter(',');
    simulate->add_option("--q", q, "moment exponent")->capture_default_str();
    simulate->add_option("--seed", seed, "stream seed")->capture_default_str();
    simulate->add_option("--samples", samples, "draw count")->capture_default_str();
    simulate->add_option("--batches", batches, "batch-means batches")
        ->capture_default_str();
    simulate->add_option("--threads", threads, "worker cap")->capture_default_str();

    CLI::App* reduce_cmd = app.add_subcommand(
        "reduce", "weight-reduction step or full exponent-halving pipeline");
    add_dist(reduce_cmd);
    add_out(reduce_cmd);
    reduce_cmd->add_option("--b", branching, "branching factor")->capture_default_str();
    reduce_cmd->add_option("--profile", profile_text, "level coefficients c0,c1,...");
    reduce_cmd->add_option("--tree", tree_path, "path<TAB>weight file");
    double pipeline_q = 0.0;
    unsigned pipeline_depth = 0;
    CLI::Option* opt_q = reduce_cmd->add_option("--q", pipeline_q,
                                                "pipeline target exponent (>= 2)");
    CLI::Option* opt_depth = reduce_cmd->add_option("--depth", pipeline_depth,
                                                    "pipeline cascade depth");

    CLI::App* bounds_cmd = app.add_subcommand(
        "bounds", "moment bounds for a weighted tree sum");
    add_dist(bounds_cmd);
    add_out(bounds_cmd);
    bounds_cmd->add_option("--b", branching, "branching factor")->capture_default_str();
    bounds_cmd->add_option("--q", q, "moment exponent")->capture_default_str();
    bounds_cmd->add_option("--profile", profile_text, "level coefficients c0,c1,...");
    bounds_cmd->add_option("--tree", tree_path, "path<TAB>weight file");

    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle-check", "brute-force enumeration cross-check on a tiny instance");
    add_dist(oracle_cmd);
    add_out(oracle_cmd);
    oracle_cmd->add_option("--b", branching, "branching factor")->capture_default_str();
    oracle_cmd->add_option("--depth", depth, "tree depth")->capture_default_str();
    oracle_cmd->add_option("--q", q, "moment exponent")->capture_default_str();
    oracle_cmd->add_option("--profile", profile_text,
                           "level coefficients (default: cascade average)");
    oracle_cmd->add_option("--threads", threads, "worker cap")->capture_default_str();

    CLI::App* verify = app.add_subcommand(
        "verify-theorems", "run the committed growth-law suite");
    verify->add_option("--config", config_path, "experiment bundle JSON")->required();
    verify->add_option("--out-dir", out_dir, "artifact directory")
        ->capture_default_str();
    verify->add_option("--threads", threads, "worker cap")->capture_default_str();

    try {
        app.parse(argc, argv);

        if (critical->parsed())
            return run_critical_q(branching, load_dist(dist_literal, dist_json_path, true),
                                  grid, root_q_max, out_path);
        if (moments->parsed())
            return run_exact_moments(branching,
                                     load_dist(dist_literal, dist_json_path, true),
                                     q_max_u, big_n, out_path);
        if (theta->parsed())
            return run_theta_moments(branching,
                                     load_dist(dist_literal, dist_json_path, false),
                                     profile_text, tree_path, q_max_u, out_path);
        if (simulate->parsed())
            return run_simulate(branching, load_dist(dist_literal, dist_json_path, true),
                                depths, q, seed, samples, batches, threads, out_path);
        if (reduce_cmd->parsed()) {
            const bool pipeline = opt_q->count() > 0;
            return run_reduce(branching,
                              load_dist(dist_literal, dist_json_path, pipeline),
                              profile_text, tree_path,
                              pipeline ? std::optional<double>(pipeline_q) : std::nullopt,
                              opt_depth->count() > 0
                                  ? std::optional<unsigned>(pipeline_depth)
                                  : std::nullopt,
                              out_path);
        }
        if (bounds_cmd->parsed())
            return run_bounds(branching, load_dist(dist_literal, dist_json_path, false),
                              profile_text, tree_path, q, out_path);
        if (oracle_cmd->parsed())
            return run_oracle_check(branching,
                                    load_dist(dist_literal, dist_json_path, false),
                                    depth, q, profile_text, threads, out_path);
        if (verify->parsed()) return run_verify(config_path, out_dir, threads);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "resource refusal: " << e.what() << "\n";
        return 3;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violation: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
