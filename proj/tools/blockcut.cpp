#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blockcut/dl.hpp"
#include "blockcut/errors.hpp"
#include "blockcut/graph.hpp"
#include "blockcut/inference.hpp"
#include "blockcut/io.hpp"
#include "blockcut/metrics.hpp"
#include "blockcut/partition.hpp"
#include "blockcut/synthgen.hpp"
#include "blockcut/treatments.hpp"

namespace {

using namespace blockcut;

/// Thrown for argument problems detected after CLI11 parsing (exit 1).
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic log sink: stderr by default, or a log file. Timing lines
/// always go to stderr so log files stay byte-stable across runs.
struct Logger {
    int level = 1;
    std::ofstream file;
    bool use_file = false;

    void open(const std::string& path) {
        file.open(path);
        if (!file) throw io_error("cannot open log file: " + path);
        use_file = true;
    }
    void line(int lvl, const std::string& msg) {
        if (lvl > level) return;
        (use_file ? static_cast<std::ostream&>(file) : std::cerr) << msg << '\n';
    }
    void timing(const std::string& msg) {
        if (level >= 1) std::cerr << msg << '\n';
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string format_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", s);
    return buf;
}

bool all_labels_match_dense_ids(const std::vector<std::string>& labels) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != std::to_string(i)) return false;
    return true;
}

/// Sidecar mapping from dense output cluster ids to the labels of the input
/// clusters they refine; emitted when the input used its own labeling.
void maybe_write_cluster_map(const std::string& output_path, const Partition& input,
                             const Partition& output,
                             const std::vector<std::string>& input_labels, Logger& log) {
    if (all_labels_match_dense_ids(input_labels)) return;
    std::vector<std::string> source(output.num_clusters());
    for (NodeId v = 0; v < static_cast<NodeId>(output.num_nodes()); ++v)
        source[output.assignment()[v]] = input_labels[input.assignment()[v]];
    std::ostringstream out;
    for (std::size_t c = 0; c < source.size(); ++c) out << c << '\t' << source[c] << '\n';
    std::string path = output_path + ".clustermap.tsv";
    atomic_write_file(path, out.str());
    log.line(1, "wrote cluster label mapping: " + path);
}

struct TreatArgs {
    std::string edgelist, clustering, output;
    std::string criterion = "wcc";
    std::string rule_text = "log10";
    int num_processors = 1;
};

int run_treat(const TreatArgs& args, Logger& log) {
    auto t_load = std::chrono::steady_clock::now();
    auto loaded = load_graph_and_clustering(args.edgelist, args.clustering);
    double load_seconds = seconds_since(t_load);
    const Graph& g = loaded.graph;
    log.line(1, "loaded " + std::to_string(g.num_nodes()) + " nodes, " +
                    std::to_string(g.num_edges()) + " edges, " +
                    std::to_string(loaded.partition.num_clusters()) + " clusters");
    if (loaded.isolated_nodes_added > 0)
        log.line(1, "added " + std::to_string(loaded.isolated_nodes_added) +
                        " isolated nodes present only in the clustering");
    if (loaded.defaulted_singletons > 0)
        log.line(1, "flagged " + std::to_string(loaded.defaulted_singletons) +
                        " unclustered nodes as singletons");

    ThresholdRule rule = ThresholdRule::parse(args.rule_text);
    auto t_treat = std::chrono::steady_clock::now();
    Partition treated = args.criterion == "cc"
                            ? treat_cc(g, loaded.partition, args.num_processors)
                            : treat_wcc(g, loaded.partition, rule, args.num_processors);
    double treat_seconds = seconds_since(t_treat);

    // Per-input-cluster split counts (output refines input).
    std::vector<std::size_t> pieces(loaded.partition.num_clusters(), 0);
    {
        std::vector<char> seen(treated.num_clusters(), 0);
        for (NodeId v = 0; v < static_cast<NodeId>(g.num_nodes()); ++v) {
            ClusterId out_c = treated.assignment()[v];
            if (!seen[out_c]) {
                seen[out_c] = 1;
                ++pieces[loaded.partition.assignment()[v]];
            }
        }
    }
    std::size_t split_clusters = 0;
    for (std::size_t c = 0; c < pieces.size(); ++c) {
        if (pieces[c] > 1) {
            ++split_clusters;
            log.line(2, "cluster " + loaded.cluster_labels[c] + " split into " +
                            std::to_string(pieces[c]) + " pieces");
        }
    }
    log.line(1, "treatment " + args.criterion + ": " +
                    std::to_string(loaded.partition.num_clusters()) + " -> " +
                    std::to_string(treated.num_clusters()) + " clusters (" +
                    std::to_string(split_clusters) + " split)");
    log.timing("load time: " + format_seconds(load_seconds) + "s, treatment time: " +
               format_seconds(treat_seconds) + "s");

    save_clustering(g, treated, args.output);
    maybe_write_cluster_map(args.output, loaded.partition, treated, loaded.cluster_labels, log);
    return 0;
}

struct DlArgs {
    std::string edgelist, clustering, output;
    std::string model = "dc";
    double beta = 1.0;
    bool no_edges_dl = false;
};

int run_dl(const DlArgs& args, Logger& log) {
    auto loaded = load_graph_and_clustering(args.edgelist, args.clustering);
    DlConfig cfg{args.model == "dc" ? SbmModel::dc : SbmModel::ndc, args.beta,
                 !args.no_edges_dl};
    DlReport report = compute_dl(loaded.graph, loaded.partition, cfg);
    atomic_write_file(args.output, dl_report_to_json(report).dump(2) + "\n");
    log.line(1, "description length (" + args.model + "): total " +
                    std::to_string(report.total) + " nats over " +
                    std::to_string(report.num_blocks) + " blocks");
    return 0;
}

struct InferArgs {
    std::string edgelist, output_clustering, output_report;
    std::string model = "chosen";
    double beta = 1.0;
    bool no_edges_dl = false;
    std::uint64_t seed = 0;
    std::size_t restarts = 5;
    std::size_t sweep_limit = 16;
    int num_processors = 1;
};

int run_infer(const InferArgs& args, Logger& log) {
    Graph g = load_edgelist(args.edgelist);
    if (g.num_nodes() == 0) throw domain_error("infer: the edge list is empty");
    InferenceConfig cfg;
    cfg.model = args.model == "dc"    ? FitModel::dc
                : args.model == "ndc" ? FitModel::ndc
                                      : FitModel::chosen;
    cfg.beta = args.beta;
    cfg.edges_dl = !args.no_edges_dl;
    cfg.seed = args.seed;
    cfg.restarts = args.restarts;
    cfg.move_sweep_limit = args.sweep_limit;
    cfg.num_threads = args.num_processors;

    auto t0 = std::chrono::steady_clock::now();
    FitResult result = fit(g, cfg);
    log.timing("inference time: " + format_seconds(seconds_since(t0)) + "s");
    log.line(1, "selected " + std::string(to_string(result.model_selected)) + " with total " +
                    std::to_string(result.report.total) + " nats, " +
                    std::to_string(result.report.num_blocks) + " blocks");

    save_clustering(g, result.partition, args.output_clustering);
    nlohmann::json report{{"model_requested", args.model},
                          {"model_selected", to_string(result.model_selected)},
                          // PP-Flat has no published description length, so
                          // chosen selects between these two models only.
                          {"model_candidates", args.model == "chosen"
                                                   ? nlohmann::json::array({"dc", "ndc"})
                                                   : nlohmann::json::array({args.model})},
                          {"chosen_tie", result.chosen_tie},
                          {"seed", args.seed},
                          {"restarts", args.restarts},
                          {"restart_totals", result.restart_totals},
                          {"report", dl_report_to_json(result.report)}};
    if (result.alternative_total)
        report["alternative_total"] = *result.alternative_total;
    else
        report["alternative_total"] = nullptr;
    atomic_write_file(args.output_report, report.dump(2) + "\n");
    return 0;
}

struct ProfileArgs {
    std::string edgelist, clustering, output;
    std::string rule_text = "log10";
    int num_processors = 1;
};

int run_profile(const ProfileArgs& args, Logger& log) {
    auto loaded = load_graph_and_clustering(args.edgelist, args.clustering);
    ThresholdRule rule = ThresholdRule::parse(args.rule_text);
    ConnectivityProfile prof = profile(loaded.graph, loaded.partition, rule,
                                       args.num_processors);
    atomic_write_file(args.output, profile_to_json(prof, rule).dump(2) + "\n");
    std::ostringstream summary;
    summary << "profiled " << prof.clusters.size() << " clusters";
    if (prof.pct_disconnected)
        summary << ": " << *prof.pct_disconnected << "% disconnected, "
                << *prof.pct_poorly_connected << "% poorly connected, "
                << *prof.pct_well_connected << "% well connected (non-singletons)";
    log.line(1, summary.str());
    return 0;
}

struct EvalArgs {
    std::string edgelist, gt_clustering, est_clustering, output_prefix;
    std::string thresholds_text = "0.0";
};

std::vector<double> parse_thresholds(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            double value = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            out.push_back(value);
        } catch (const std::logic_error&) {
            throw usage_error("invalid threshold '" + item + "'");
        }
    }
    if (out.empty()) throw usage_error("no thresholds given");
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
        if (out[i] > out[i + 1]) throw usage_error("thresholds must be ascending");
    for (double t : out)
        if (t < 0.0 || t > 1.0) throw usage_error("thresholds must lie in [0, 1]");
    return out;
}

int run_eval(const EvalArgs& args, Logger& log) {
    auto thresholds = parse_thresholds(args.thresholds_text);
    auto gt_rows = parse_clustering_file(args.gt_clustering);
    auto est_rows = parse_clustering_file(args.est_clustering);
    Graph g = build_graph_with_clustering_labels(args.edgelist, {&gt_rows, &est_rows});
    auto gt = resolve_clustering(g, gt_rows);
    auto est = resolve_clustering(g, est_rows);
    if (gt.defaulted_singletons > 0)
        log.line(1, "ground truth: " + std::to_string(gt.defaulted_singletons) +
                        " unclustered nodes treated as singletons");
    if (est.defaulted_singletons > 0)
        log.line(1, "estimate: " + std::to_string(est.defaulted_singletons) +
                        " unclustered nodes treated as singletons");
    auto rows = filtered_eval(g, gt.partition, est.partition, thresholds);
    atomic_write_file(args.output_prefix + ".csv", eval_rows_to_csv(rows));
    atomic_write_file(args.output_prefix + ".json", eval_rows_to_json(rows).dump(2) + "\n");
    log.line(1, "evaluated " + std::to_string(rows.size()) + " thresholds over " +
                    std::to_string(g.num_nodes()) + " nodes");
    return 0;
}

struct GenCliquesArgs {
    std::size_t num_cliques = 1;
    std::size_t clique_size = 2;
    std::size_t bridges = 0;
    std::uint64_t seed = 0;
    std::string output_edgelist, output_clustering;
};

struct GenPlantedArgs {
    std::string block_sizes_text;
    double p_in = 0.0;
    double p_out = 0.0;
    std::uint64_t seed = 0;
    std::string output_edgelist, output_clustering;
};

void write_fixture(const Fixture& fixture, const std::string& edgelist_path,
                   const std::string& clustering_path) {
    atomic_write_file(edgelist_path, edgelist_to_string(fixture.graph));
    save_clustering(fixture.graph, fixture.ground_truth, clustering_path);
    std::cout << "nodes=" << fixture.graph.num_nodes() << " edges=" << fixture.graph.num_edges()
              << " clusters=" << fixture.ground_truth.num_clusters() << '\n';
}

int run_gen_cliques(const GenCliquesArgs& args) {
    CliqueFixtureSpec spec{args.num_cliques, args.clique_size, args.bridges, args.seed};
    write_fixture(gen_cliques(spec), args.output_edgelist, args.output_clustering);
    return 0;
}

int run_gen_planted(const GenPlantedArgs& args) {
    PlantedSpec spec;
    std::stringstream ss(args.block_sizes_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            long long value = std::stoll(item, &pos);
            if (pos != item.size() || value <= 0) throw std::invalid_argument(item);
            spec.block_sizes.push_back(static_cast<std::size_t>(value));
        } catch (const std::logic_error&) {
            throw usage_error("invalid block size '" + item + "'");
        }
    }
    if (spec.block_sizes.empty()) throw usage_error("no block sizes given");
    spec.p_in = args.p_in;
    spec.p_out = args.p_out;
    spec.seed = args.seed;
    write_fixture(gen_planted(spec), args.output_edgelist, args.output_clustering);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-connectivity treatments, SBM description lengths, flat SBM fitting,\n"
                 "and clustering evaluation for tab-separated edge lists"};
    app.require_subcommand(1);

    Logger log;
    std::string log_file;
    app.add_option("--log-level", log.level, "0 = quiet, 1 = summary (default), 2 = per-cluster trace")
        ->check(CLI::Range(0, 2));
    app.add_option("--log-file", log_file, "Write log lines to this file instead of stderr");

    TreatArgs treat_args;
    auto* treat = app.add_subcommand("treat", "Post-process a clustering with CC or WCC");
    treat->add_option("--edgelist", treat_args.edgelist, "Network edge-list file")->required();
    treat->add_option("--existing-clustering", treat_args.clustering,
                      "Cluster assignment file to post-process")
        ->required();
    treat->add_option("--output-file", treat_args.output, "Treated clustering file")->required();
    treat->add_option("--connectedness-criterion", treat_args.criterion,
                      "cc (connected components) or wcc (well-connected clusters)")
        ->check(CLI::IsMember({"cc", "wcc"}));
    treat->add_option("--threshold-rule", treat_args.rule_text,
                      "Well-connectedness bound: log10, none, or a constant");
    treat->add_option("--num-processors", treat_args.num_processors,
                      "Parallel per-cluster workers")
        ->check(CLI::PositiveNumber);

    DlArgs dl_args;
    auto* dl = app.add_subcommand("dl", "Compute the description length of a clustering");
    dl->add_option("--edgelist", dl_args.edgelist, "Network edge-list file")->required();
    dl->add_option("--clustering", dl_args.clustering, "Cluster assignment file")->required();
    dl->add_option("--model", dl_args.model, "dc or ndc")
        ->check(CLI::IsMember({"dc", "ndc"}));
    dl->add_option("--beta", dl_args.beta, "Prior weight in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
    dl->add_flag("--no-edges-dl", dl_args.no_edges_dl, "Drop the edge count matrix prior");
    dl->add_option("--output", dl_args.output, "Output JSON file")->required();

    InferArgs infer_args;
    auto* infer = app.add_subcommand("infer", "Fit a flat SBM by DL minimization");
    infer->add_option("--edgelist", infer_args.edgelist, "Network edge-list file")->required();
    infer->add_option("--model", infer_args.model, "dc, ndc, or chosen")
        ->check(CLI::IsMember({"dc", "ndc", "chosen"}));
    infer->add_option("--beta", infer_args.beta, "Prior weight in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
    infer->add_flag("--no-edges-dl", infer_args.no_edges_dl, "Drop the edge count matrix prior");
    infer->add_option("--seed", infer_args.seed, "Master seed");
    infer->add_option("--restarts", infer_args.restarts, "Independent restarts (>= 1)")
        ->check(CLI::PositiveNumber);
    infer->add_option("--sweep-limit", infer_args.sweep_limit,
                      "Maximum move sweeps per phase");
    infer->add_option("--num-processors", infer_args.num_processors,
                      "Parallel restart workers")
        ->check(CLI::PositiveNumber);
    infer->add_option("--output-clustering", infer_args.output_clustering,
                      "Inferred clustering file")
        ->required();
    infer->add_option("--output-report", infer_args.output_report, "Fit report JSON file")
        ->required();

    ProfileArgs profile_args;
    auto* profile_cmd =
        app.add_subcommand("profile", "Classify cluster connectivity and report percentages");
    profile_cmd->add_option("--edgelist", profile_args.edgelist, "Network edge-list file")
        ->required();
    profile_cmd->add_option("--clustering", profile_args.clustering, "Cluster assignment file")
        ->required();
    profile_cmd->add_option("--threshold-rule", profile_args.rule_text,
                            "Well-connectedness bound: log10, none, or a constant");
    profile_cmd->add_option("--num-processors", profile_args.num_processors,
                            "Parallel per-cluster workers")
        ->check(CLI::PositiveNumber);
    profile_cmd->add_option("--output", profile_args.output, "Output JSON file")->required();

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Density-thresholded accuracy vs a ground truth");
    eval->add_option("--edgelist", eval_args.edgelist, "Network edge-list file")->required();
    eval->add_option("--gt-clustering", eval_args.gt_clustering, "Ground-truth clustering file")
        ->required();
    eval->add_option("--est-clustering", eval_args.est_clustering, "Estimated clustering file")
        ->required();
    eval->add_option("--thresholds", eval_args.thresholds_text,
                     "Comma-separated ascending density thresholds (default 0.0)");
    eval->add_option("--output-prefix", eval_args.output_prefix,
                     "Writes <prefix>.csv and <prefix>.json")
        ->required();

    auto* gen = app.add_subcommand("gen", "Generate synthetic test fixtures");
    gen->require_subcommand(1);
    GenCliquesArgs cliques_args;
    auto* gen_cliques_cmd = gen->add_subcommand("cliques", "Disjoint or bridged clique assembly");
    gen_cliques_cmd->add_option("--num-cliques", cliques_args.num_cliques, "Number of cliques")
        ->required()
        ->check(CLI::PositiveNumber);
    gen_cliques_cmd->add_option("--clique-size", cliques_args.clique_size, "Nodes per clique")
        ->required()
        ->check(CLI::Range(static_cast<std::size_t>(2), std::numeric_limits<std::size_t>::max()));
    gen_cliques_cmd->add_option("--bridges", cliques_args.bridges,
                                "Random inter-clique edges (0 = disjoint)");
    gen_cliques_cmd->add_option("--seed", cliques_args.seed, "RNG seed");
    gen_cliques_cmd
        ->add_option("--output-edgelist", cliques_args.output_edgelist, "Edge-list output")
        ->required();
    gen_cliques_cmd
        ->add_option("--output-clustering", cliques_args.output_clustering,
                     "Ground-truth clustering output")
        ->required();

    GenPlantedArgs planted_args;
    auto* gen_planted_cmd = gen->add_subcommand("planted", "Planted-partition sampler");
    gen_planted_cmd
        ->add_option("--block-sizes", planted_args.block_sizes_text,
                     "Comma-separated block sizes, e.g. 50,50")
        ->required();
    gen_planted_cmd->add_option("--p-in", planted_args.p_in, "Within-block edge probability")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    gen_planted_cmd->add_option("--p-out", planted_args.p_out, "Between-block edge probability")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    gen_planted_cmd->add_option("--seed", planted_args.seed, "RNG seed");
    gen_planted_cmd
        ->add_option("--output-edgelist", planted_args.output_edgelist, "Edge-list output")
        ->required();
    gen_planted_cmd
        ->add_option("--output-clustering", planted_args.output_clustering,
                     "Ground-truth clustering output")
        ->required();

    try {
        app.parse(argc, argv);
        if (!log_file.empty()) log.open(log_file);
        if (treat->parsed()) return run_treat(treat_args, log);
        if (dl->parsed()) return run_dl(dl_args, log);
        if (infer->parsed()) return run_infer(infer_args, log);
        if (profile_cmd->parsed()) return run_profile(profile_args, log);
        if (eval->parsed()) return run_eval(eval_args, log);
        if (gen->parsed()) {
            if (gen_cliques_cmd->parsed()) return run_gen_cliques(cliques_args);
            if (gen_planted_cmd->parsed()) return run_gen_planted(planted_args);
        }
        std::cerr << "no subcommand given\n";
        return 1;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
