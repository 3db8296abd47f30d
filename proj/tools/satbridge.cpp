// Command-line surface over the satbridge library. A JSON config file
// (--config) can set any flag; explicit command-line values win.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "satbridge/bench.hpp"
#include "satbridge/dataset.hpp"
#include "satbridge/decode.hpp"
#include "satbridge/error.hpp"
#include "satbridge/pipeline.hpp"
#include "satbridge/rng.hpp"
#include "satbridge/satgen.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace satbridge;

namespace {

json load_config(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") {
            std::ifstream f(argv[i + 1]);
            if (!f) throw IoError(std::string("cannot open config file: ") + argv[i + 1]);
            return json::parse(f);
        }
    return json::object();
}

template <typename T>
void from_cfg(const json& cfg, const char* key, T& field) {
    if (cfg.contains(key)) field = cfg.at(key).get<T>();
}

GenSpec gen_spec_from_config(const json& cfg) {
    GenSpec spec;
    if (cfg.contains("distribution"))
        spec.distribution = gen_distribution_from_string(cfg.at("distribution").get<std::string>());
    from_cfg(cfg, "n_vars", spec.n_vars);
    from_cfg(cfg, "n_clauses", spec.n_clauses);
    from_cfg(cfg, "k_min", spec.k_min);
    from_cfg(cfg, "k_max", spec.k_max);
    from_cfg(cfg, "var_exponent", spec.var_exponent);
    from_cfg(cfg, "size_exponent", spec.size_exponent);
    from_cfg(cfg, "seed", spec.seed);
    from_cfg(cfg, "hard_fraction", spec.hard_fraction);
    return spec;
}

void add_gen_flags(CLI::App* sub, GenSpec& spec, std::string& distribution) {
    sub->add_option("--distribution", distribution, "uniform | powerlaw | double-powerlaw");
    sub->add_option("--n-vars", spec.n_vars);
    sub->add_option("--n-clauses", spec.n_clauses);
    sub->add_option("--k-min", spec.k_min);
    sub->add_option("--k-max", spec.k_max);
    sub->add_option("--var-exponent", spec.var_exponent);
    sub->add_option("--size-exponent", spec.size_exponent);
    sub->add_option("--seed", spec.seed);
    sub->add_option("--hard-fraction", spec.hard_fraction);
}

void add_train_flags(CLI::App* sub, TrainConfig& cfg) {
    sub->add_option("--d", cfg.d);
    sub->add_option("--layers", cfg.layers);
    sub->add_option("--heads", cfg.heads);
    sub->add_option("--d-head", cfg.d_head);
    sub->add_option("--lr", cfg.lr);
    sub->add_option("--weight-decay", cfg.weight_decay);
    sub->add_option("--epochs-pretrain", cfg.epochs_pretrain);
    sub->add_option("--epochs-finetune", cfg.epochs_finetune);
    sub->add_option("--warmup-epochs", cfg.warmup_epochs);
    sub->add_option("--lambda", cfg.lambda);
    sub->add_option("--frozen-layers", cfg.frozen_layers);
    sub->add_option("--seed", cfg.seed);
    sub->add_option("--precision", cfg.precision);
    sub->add_option("--batch-size", cfg.batch_size);
    sub->add_flag("--degree-channel,!--no-degree-channel", cfg.degree_channel);
    sub->add_flag("--polarity-edges,!--no-polarity-edges", cfg.polarity_edges);
    sub->add_flag("--unsupervised-target", cfg.unsupervised_target);
}

CoInstance load_instance(const std::string& path, const std::string& format,
                         const std::string& kind) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open graph file: " + path);
    CoInstance inst;
    inst.graph = format == "dimacs" ? parse_dimacs(f) : parse_gset(f);
    inst.kind = problem_kind_from_string(kind);
    inst.name = fs::path(path).filename().string();
    return inst;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write " + path);
    f << text;
}

int run(int argc, char** argv) {
    json file_cfg = load_config(argc, argv);

    CLI::App app{"satbridge: CO -> Max-SAT -> bipartite attention pipeline"};
    app.require_subcommand(1);
    std::string config_path;

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate random Max-SAT formulas");
    GenSpec gen_spec = gen_spec_from_config(file_cfg);
    std::string gen_distribution = to_string(gen_spec.distribution);
    int gen_count = file_cfg.value("count", 1);
    std::string gen_out = file_cfg.value("out", std::string("-"));
    add_gen_flags(gen, gen_spec, gen_distribution);
    gen->add_option("--count", gen_count);
    gen->add_option("--out", gen_out, "output file, directory (count > 1), or - for stdout");
    gen->add_option("--config", config_path);

    // ---- reduce ----
    auto* reduce = app.add_subcommand("reduce", "reduce a CO graph instance to WCNF");
    std::string red_input = file_cfg.value("input", std::string());
    std::string red_format = file_cfg.value("format", std::string("gset"));
    std::string red_kind = file_cfg.value("kind", std::string("maxcut"));
    std::string red_mds_mode = file_cfg.value("mds_mode", std::string("per-node"));
    std::string red_out = file_cfg.value("out", std::string("-"));
    reduce->add_option("--input", red_input)->required();
    reduce->add_option("--format", red_format, "gset | dimacs");
    reduce->add_option("--kind", red_kind, "maxcut | mis | mds");
    reduce->add_option("--mds-mode", red_mds_mode, "per-node | per-edge");
    reduce->add_option("--out", red_out);
    reduce->add_option("--config", config_path);

    // ---- oracle ----
    auto* oracle = app.add_subcommand("oracle", "solve a WCNF exactly");
    std::string ora_input;
    std::uint64_t ora_budget = kDefaultOracleBudget;
    oracle->add_option("--input", ora_input)->required();
    oracle->add_option("--budget", ora_budget);
    oracle->add_option("--config", config_path);

    // ---- label ----
    auto* label = app.add_subcommand("label", "generate and oracle-label a dataset");
    GenSpec label_spec = gen_spec_from_config(file_cfg);
    std::string label_distribution = to_string(label_spec.distribution);
    int label_count = file_cfg.value("count", 100);
    std::uint64_t label_budget = file_cfg.value("budget", kDefaultOracleBudget);
    std::string label_out = file_cfg.value("out", std::string());
    add_gen_flags(label, label_spec, label_distribution);
    label->add_option("--count", label_count);
    label->add_option("--budget", label_budget);
    label->add_option("--out", label_out)->required();
    label->add_option("--config", config_path);

    // ---- pretrain ----
    auto* pre = app.add_subcommand("pretrain", "supervised pre-training");
    TrainConfig pre_cfg = config_from_json(file_cfg);
    std::string pre_data = file_cfg.value("data", std::string());
    std::string pre_out = file_cfg.value("out", std::string());
    std::string pre_metrics = file_cfg.value("metrics", std::string());
    add_train_flags(pre, pre_cfg);
    pre->add_option("--data", pre_data)->required();
    pre->add_option("--out", pre_out)->required();
    pre->add_option("--metrics", pre_metrics);
    pre->add_option("--config", config_path);

    // ---- finetune ----
    auto* fine = app.add_subcommand("finetune", "domain-adversarial fine-tuning");
    TrainConfig fine_cfg = config_from_json(file_cfg);
    std::string fine_src = file_cfg.value("source", std::string());
    std::string fine_tgt = file_cfg.value("target", std::string());
    std::string fine_in = file_cfg.value("checkpoint", std::string());
    std::string fine_out = file_cfg.value("out", std::string());
    std::string fine_metrics = file_cfg.value("metrics", std::string());
    add_train_flags(fine, fine_cfg);
    fine->add_option("--source", fine_src)->required();
    fine->add_option("--target", fine_tgt)->required();
    fine->add_option("--checkpoint", fine_in)->required();
    fine->add_option("--out", fine_out)->required();
    fine->add_option("--metrics", fine_metrics);
    fine->add_option("--config", config_path);

    // ---- predict ----
    auto* pred = app.add_subcommand("predict", "per-node probabilities for a CO instance");
    std::string pred_ckpt, pred_input, pred_format = "gset", pred_kind = "maxcut";
    pred->add_option("--checkpoint", pred_ckpt)->required();
    pred->add_option("--input", pred_input)->required();
    pred->add_option("--format", pred_format);
    pred->add_option("--kind", pred_kind);
    pred->add_option("--config", config_path);

    // ---- decode ----
    auto* dec = app.add_subcommand("decode", "predict and decode a feasible solution");
    std::string dec_ckpt, dec_input, dec_format = "gset", dec_kind = "maxcut";
    int dec_steps = 120;
    bool dec_flip = true;
    dec->add_option("--checkpoint", dec_ckpt)->required();
    dec->add_option("--input", dec_input)->required();
    dec->add_option("--format", dec_format);
    dec->add_option("--kind", dec_kind);
    dec->add_option("--steps", dec_steps);
    dec->add_flag("--maxcut-flip,!--no-maxcut-flip", dec_flip);
    dec->add_option("--config", config_path);

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "benchmark run with verified reporting");
    BenchConfig bench_cfg = bench_config_from_json(file_cfg);
    std::string bench_kind = to_string(bench_cfg.kind);
    std::string bench_out = file_cfg.value("out", std::string("-"));
    bool bench_table = false;
    bench->add_option("--kind", bench_kind);
    bench->add_option("--source", bench_cfg.source, "regular | graph file path");
    bench->add_option("--graph-format", bench_cfg.graph_format);
    bench->add_option("--n", bench_cfg.n);
    bench->add_option("--gamma", bench_cfg.gamma);
    bench->add_option("--count", bench_cfg.count);
    bench->add_option("--seed", bench_cfg.seed);
    bench->add_option("--checkpoint", bench_cfg.checkpoint);
    bench->add_option("--local-search-steps", bench_cfg.local_search_steps);
    bench->add_flag("--maxcut-flip,!--no-maxcut-flip", bench_cfg.maxcut_flip);
    bench->add_option("--threads", bench_cfg.threads);
    bench->add_flag("--record-timing", bench_cfg.record_timing);
    bench->add_option("--out", bench_out);
    bench->add_flag("--table", bench_table, "print the rendered table to stderr");
    bench->add_option("--config", config_path);

    // ---- fetch ----
    auto* fetch = app.add_subcommand("fetch", "download and verify benchmark datasets");
    std::string fetch_manifest, fetch_dest;
    bool fetch_offline = false;
    int fetch_retries = 2;
    fetch->add_option("--manifest", fetch_manifest, "JSON manifest; default: built-in list");
    fetch->add_option("--dest", fetch_dest, "default: $SATBRIDGE_DATA_DIR or ./data");
    fetch->add_flag("--offline", fetch_offline);
    fetch->add_option("--retries", fetch_retries);
    fetch->add_option("--config", config_path);

    // ---- gradcheck ----
    auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient check");
    TrainConfig gc_cfg = config_from_json(file_cfg);
    std::uint64_t gc_seed = 1;
    add_train_flags(gc, gc_cfg);
    gc->add_option("--check-seed", gc_seed);
    gc->add_option("--config", config_path);

    CLI11_PARSE(app, argc, argv);

    if (*gen) {
        gen_spec.distribution = gen_distribution_from_string(gen_distribution);
        if (gen_count == 1) {
            write_text(gen_out, emit_wcnf(generate(gen_spec)));
        } else {
            fs::create_directories(gen_out);
            for (int i = 0; i < gen_count; ++i) {
                GenSpec s = gen_spec;
                s.seed = split_seed(gen_spec.seed, i);
                char name[32];
                std::snprintf(name, sizeof(name), "%04d.wcnf", i);
                write_text((fs::path(gen_out) / name).string(), emit_wcnf(generate(s)));
            }
        }
    } else if (*reduce) {
        CoInstance inst = load_instance(red_input, red_format, red_kind);
        ReduceOptions opts;
        if (red_mds_mode == "per-edge") opts.mds_mode = MdsClauseMode::PerEdge;
        else if (red_mds_mode != "per-node") throw ArgumentError("unknown mds mode: " + red_mds_mode);
        write_text(red_out, emit_wcnf(reduce_to_maxsat(inst, opts)));
    } else if (*oracle) {
        std::ifstream f(ora_input);
        if (!f) throw IoError("cannot open " + ora_input);
        Formula formula = parse_wcnf(f);
        OracleResult res = solve_exact(formula, ora_budget);
        std::cout << "o " << (formula.total_soft_weight() - res.soft_optimum) << "\n";
        std::cout << "s " << (res.proven ? "OPTIMUM FOUND" : "UNKNOWN") << "\n";
        std::cout << "v ";
        for (auto b : res.assignment) std::cout << (b ? '1' : '0');
        std::cout << "\n";
    } else if (*label) {
        label_spec.distribution = gen_distribution_from_string(label_distribution);
        std::vector<Formula> formulas;
        for (int i = 0; i < label_count; ++i) {
            GenSpec s = label_spec;
            s.seed = split_seed(label_spec.seed, i);
            formulas.push_back(generate(s));
        }
        LabelStats stats;
        auto labeled = label_dataset(formulas, label_budget, &stats,
                                     to_string(label_spec.distribution));
        save_labeled(label_out, labeled);
        std::cerr << "labeled " << stats.labeled << ", dropped " << stats.dropped << "\n";
    } else if (*pre) {
        auto dataset = load_labeled(pre_data, pre_cfg.polarity_edges);
        MetricsLog log;
        std::ofstream metrics;
        if (!pre_metrics.empty()) {
            metrics.open(pre_metrics, std::ios::trunc);
            log.sink = &metrics;
        } else {
            log.sink = &std::cerr;
        }
        TrainResult result = pretrain(dataset, pre_cfg, &log);
        save_checkpoint(result.checkpoint, pre_out);
    } else if (*fine) {
        DomainBatch batch;
        batch.source = load_labeled(fine_src, fine_cfg.polarity_edges);
        batch.target = load_labeled(fine_tgt, fine_cfg.polarity_edges);
        Checkpoint pretrained = load_checkpoint(fine_in);
        MetricsLog log;
        std::ofstream metrics;
        if (!fine_metrics.empty()) {
            metrics.open(fine_metrics, std::ios::trunc);
            log.sink = &metrics;
        } else {
            log.sink = &std::cerr;
        }
        TrainResult result = finetune(batch, pretrained, fine_cfg, &log);
        save_checkpoint(result.checkpoint, fine_out);
    } else if (*pred) {
        CoInstance inst = load_instance(pred_input, pred_format, pred_kind);
        Checkpoint ckpt = load_checkpoint(pred_ckpt);
        for (double p : predict(ckpt, inst)) std::cout << p << "\n";
    } else if (*dec) {
        CoInstance inst = load_instance(dec_input, dec_format, dec_kind);
        Checkpoint ckpt = load_checkpoint(dec_ckpt);
        std::vector<double> probs = predict(ckpt, inst);
        NodeSet set = threshold_decode(probs, inst);
        if (inst.kind == ProblemKind::MaxCut) {
            if (dec_flip) set = local_search_maxcut(inst.graph, set, dec_steps);
        } else {
            set = repair(inst, set, probs);
            set = local_search_2improve(inst, set, dec_steps, probs);
        }
        Assignment mask(inst.graph.n_nodes(), 0);
        for (int v : set) mask[v] = 1;
        SolutionReport report = recover_solution(inst, mask);
        std::cout << "objective " << report.objective << (report.feasible ? "" : " INFEASIBLE")
                  << "\nselected";
        for (int v : report.selected) std::cout << ' ' << v;
        std::cout << "\n";
    } else if (*bench) {
        bench_cfg.kind = problem_kind_from_string(bench_kind);
        BenchReport report = run_benchmark(bench_cfg);
        write_text(bench_out, report.to_jsonl());
        if (bench_table) std::cerr << report.render_table();
    } else if (*fetch) {
        std::vector<DatasetEntry> manifest;
        if (fetch_manifest.empty()) {
            manifest = builtin_manifest();
        } else {
            std::ifstream f(fetch_manifest);
            if (!f) throw IoError("cannot open manifest: " + fetch_manifest);
            manifest = parse_manifest(json::parse(f));
        }
        FetchReport report =
            fetch_datasets(manifest, dataset_dir(fetch_dest), fetch_offline, fetch_retries);
        for (const auto& item : report.items)
            std::cout << item.name << ": " << item.status
                      << (item.detail.empty() ? "" : " (" + item.detail + ")") << "\n";
        if (report.failed > 0) return 1;
    } else if (*gc) {
        GenSpec spec;
        spec.n_vars = 6;
        spec.n_clauses = 10;
        spec.seed = gc_seed;
        Formula source = generate(spec);
        spec.seed = gc_seed + 1;
        Formula target = generate(spec);
        BipartiteGraph sbg = build_bipartite(source, gc_cfg.polarity_edges);
        BipartiteGraph tbg = build_bipartite(target, gc_cfg.polarity_edges);
        std::vector<std::uint8_t> slabels(source.n_vars), tlabels(target.n_vars);
        Rng rng(gc_seed);
        for (auto& b : slabels) b = rng.next_bool();
        for (auto& b : tlabels) b = rng.next_bool();
        ModelParams params = ModelParams::init(gc_cfg);
        GradCheckInput input;
        input.source = &sbg;
        input.source_labels = &slabels;
        double bce_err = grad_check(params, GradCheckLoss::Bce, input);
        params.has_target_head = true;
        params.target_head = params.classifier;
        input.target = &tbg;
        input.target_labels = &tlabels;
        double ft_err = grad_check(params, GradCheckLoss::FineTune, input);
        std::cout << "bce max relative error " << bce_err << "\n";
        std::cout << "finetune max relative error " << ft_err << "\n";
        if (bce_err >= 1e-4 || ft_err >= 1e-4) {
            std::cerr << "gradient check FAILED\n";
            return 1;
        }
        std::cout << "gradient check passed\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
