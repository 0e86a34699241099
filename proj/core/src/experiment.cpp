#include "uqq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "uqq/stats.hpp"

namespace uqq {

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        // trim
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
    auto as_int = [&]() { return std::stoi(value); };
    auto as_double = [&]() { return std::stod(value); };
    auto as_u64 = [&]() { return static_cast<std::uint64_t>(std::stoull(value)); };

    if (key == "sizes") {
        cfg.sizes.clear();
        for (const auto& s : split_list(value)) cfg.sizes.push_back(std::stoi(s));
    } else if (key == "train_n") {
        cfg.train_n = as_int();
    } else if (key == "train_per_family") {
        cfg.train_per_family = as_int();
    } else if (key == "val_per_family") {
        cfg.val_per_family = as_int();
    } else if (key == "test_per_family") {
        cfg.test_per_family = as_int();
    } else if (key == "t_base") {
        cfg.t_base = as_int();
    } else if (key == "alpha") {
        cfg.alpha = as_double();
    } else if (key == "conformal") {
        cfg.conformal = (value == "1" || value == "true");
    } else if (key == "shots") {
        if (value == "none" || value == "0")
            cfg.shots.reset();
        else
            cfg.shots = as_int();
    } else if (key == "epsilon") {
        cfg.epsilon = as_double();
    } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& s : split_list(value)) cfg.seeds.push_back(std::stoull(s));
    } else if (key == "methods") {
        cfg.methods = split_list(value);
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "master_seed") {
        cfg.master_seed = as_u64();
    } else if (key == "epochs") {
        cfg.epochs = as_int();
    } else if (key == "k") {
        cfg.k = as_int();
    } else if (key == "hidden") {
        cfg.hidden = as_int();
    } else if (key == "lambda_w") {
        cfg.lambda_w = as_double();
    } else if (key == "lambda_c") {
        cfg.lambda_c = as_double();
    } else if (key == "tau_w") {
        cfg.tau_w = as_double();
    } else if (key == "tau_c") {
        cfg.tau_c = as_double();
    } else if (key == "target_restarts") {
        cfg.target_restarts = as_int();
    } else if (key == "target_iters") {
        cfg.target_iters = as_int();
    } else if (key == "random_restarts") {
        cfg.random_restarts_count = as_int();
    } else if (key == "restart_iters") {
        cfg.restart_iters = as_int();
    } else if (key == "knn_k") {
        cfg.knn_k = as_int();
    } else if (key == "tqa_delta") {
        cfg.tqa_delta = as_double();
    } else if (key == "heuristic_jitter") {
        cfg.heuristic_jitter = as_double();
    } else if (key == "p") {
        cfg.p = as_int();
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_config_file: cannot open " + path);
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::invalid_argument("config: malformed line '" + line + "'");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

DatasetFiles stage_generate(const ExperimentConfig& cfg) {
    DatasetSpec spec;
    spec.train_n = cfg.train_n;
    spec.train_per_family = cfg.train_per_family;
    spec.val_per_family = cfg.val_per_family;
    spec.test_per_family = cfg.test_per_family;
    spec.test_sizes = cfg.sizes;
    spec.master_seed = cfg.master_seed;
    return gen_dataset(spec, cfg.out_dir);
}

void stage_targets(const ExperimentConfig& cfg) {
    TargetOptions opts;
    opts.restarts = cfg.target_restarts;
    opts.iters_per_restart = cfg.target_iters;
    opts.seed = derive_seed(cfg.master_seed, "target-stage");
    gen_targets(cfg.out_dir + "/train.graphs", cfg.p, opts);
    gen_targets(cfg.out_dir + "/val.graphs", cfg.p, opts);
}

SeedArtifacts seed_artifact_paths(const ExperimentConfig& cfg, std::uint64_t seed) {
    SeedArtifacts a;
    a.model_path = cfg.out_dir + "/model_s" + std::to_string(seed) + ".ckpt";
    a.point_path = cfg.out_dir + "/point_s" + std::to_string(seed) + ".ckpt";
    a.calibration_path = cfg.out_dir + "/calib_s" + std::to_string(seed) + ".txt";
    return a;
}

namespace {

std::vector<TrainExample> load_examples(const std::string& path) {
    std::vector<TrainExample> out;
    for (auto& rec : read_records(path)) {
        if (!rec.target)
            throw std::runtime_error("load_examples: record without target in " + path +
                                     " (run the targets stage first)");
        out.push_back({std::move(rec.graph), std::move(*rec.target)});
    }
    return out;
}

CalibrationConstants calibrate_model(GinModel& model,
                                     const std::vector<TrainExample>& val_set) {
    std::vector<GaussianPrediction> preds;
    std::vector<std::vector<double>> targets;
    preds.reserve(val_set.size());
    for (const auto& ex : val_set) {
        preds.push_back(predict(model, ex.graph));
        targets.push_back(ex.target);
    }
    CalibrationConstants constants = fit_constants(preds, targets);
    model.u_med = constants.u_med;
    model.u_iqr = constants.u_iqr;
    return constants;
}

}  // namespace

SeedArtifacts stage_train_seed(const ExperimentConfig& cfg, std::uint64_t seed,
                               const TrainingConfig* overrides) {
    const auto train_set = load_examples(cfg.out_dir + "/train.graphs");
    const auto val_set = load_examples(cfg.out_dir + "/val.graphs");

    TrainingConfig tc;
    if (overrides) tc = *overrides;
    tc.seed = seed;
    if (!overrides) {
        tc.lambda_w = cfg.lambda_w;
        tc.lambda_c = cfg.lambda_c;
        tc.tau_w = cfg.tau_w;
        tc.tau_c = cfg.tau_c;
        tc.epochs = cfg.epochs;
        tc.k = cfg.k;
        tc.hidden = cfg.hidden;
    }

    const SeedArtifacts paths = seed_artifact_paths(cfg, seed);

    tc.point_model = false;
    TrainResult full = train(train_set, val_set, tc);
    const CalibrationConstants constants = calibrate_model(full.model, val_set);
    checkpoint_save(full.model, paths.model_path);
    write_calibration(constants, paths.calibration_path);
    write_training_log(full.log, cfg.out_dir + "/trainlog_s" + std::to_string(seed) + ".csv");

    TrainingConfig pc = tc;
    pc.point_model = true;
    TrainResult point = train(train_set, val_set, pc);
    checkpoint_save(point.model, paths.point_path);
    write_training_log(point.log,
                       cfg.out_dir + "/trainlog_point_s" + std::to_string(seed) + ".csv");
    return paths;
}

void stage_train(const ExperimentConfig& cfg) {
    for (const auto seed : cfg.seeds) stage_train_seed(cfg, seed);
}

void stage_calibrate(const ExperimentConfig& cfg, std::uint64_t seed) {
    const SeedArtifacts paths = seed_artifact_paths(cfg, seed);
    GinModel model = checkpoint_load(paths.model_path);
    const auto val_set = load_examples(cfg.out_dir + "/val.graphs");
    const CalibrationConstants constants = calibrate_model(model, val_set);
    checkpoint_save(model, paths.model_path);
    write_calibration(constants, paths.calibration_path);
}

MethodContext load_method_context(const ExperimentConfig& cfg, std::uint64_t seed) {
    const SeedArtifacts paths = seed_artifact_paths(cfg, seed);
    MethodContext ctx;
    ctx.model = checkpoint_load(paths.model_path);
    ctx.point_model = checkpoint_load(paths.point_path);
    ctx.calibration = read_calibration(paths.calibration_path);
    for (const auto& ex : load_examples(cfg.out_dir + "/train.graphs")) {
        ctx.train_targets.push_back(ex.target);
        ctx.train_features.push_back(handcrafted(ex.graph));
    }
    return ctx;
}

EvalRow run_method(const std::string& method, const GraphRecord& record,
                   const MethodContext& ctx, const ExperimentConfig& cfg,
                   std::uint64_t train_seed) {
    const Graph& g = record.graph;
    const std::uint64_t run_seed =
        derive_seed(cfg.master_seed, "eval/" + method + "/" + record.id, train_seed);

    NoiseModel noise;
    noise.epsilon = cfg.epsilon;
    noise.shots = cfg.shots;

    RunResult rr;
    if (method == "uq_qaoa" || method == "uq_qaoa_no_tr") {
        InferOptions opts;
        opts.t_base = cfg.t_base;
        opts.alpha = cfg.alpha;
        opts.noise = noise;
        opts.use_trust_region = method == "uq_qaoa";
        if (cfg.conformal)
            opts.conformal_q = conformal_quantile(ctx.calibration, 1.0 - cfg.alpha);
        rr = uq_qaoa_infer(g, ctx.model, opts, run_seed);
        rr.method = method;  // keep the ablation label distinct
    } else {
        BaselineOptions opts;
        opts.noise = noise;
        if (method == "random") {
            rr = random_restarts(g, cfg.p, cfg.random_restarts_count, cfg.restart_iters, opts,
                                 run_seed);
        } else if (method == "heuristic") {
            rr = concentration_heuristic(g, ctx.train_targets, cfg.restart_iters, opts,
                                         run_seed, cfg.heuristic_jitter);
        } else if (method == "knn") {
            rr = knn_run(g, ctx.train_features, ctx.train_targets, cfg.knn_k,
                         cfg.restart_iters, opts, run_seed);
        } else if (method == "tqa") {
            rr = tqa_run(g, cfg.p, cfg.tqa_delta, cfg.restart_iters, opts, run_seed);
        } else if (method == "gnn_point") {
            rr = gnn_point_run(g, ctx.point_model, 2 * cfg.t_base, opts, run_seed);
        } else {
            throw std::invalid_argument("run_method: unknown method '" + method + "'");
        }
    }

    EvalRow row;
    row.instance = record.id;
    row.family = family_name(g.family);
    row.n = g.n;
    row.method = rr.method;
    row.seed = train_seed;
    row.evals = rr.evals;
    row.best_f = rr.best_f;
    row.ratio = rr.ratio;
    row.wall_ms = rr.wall_ms;
    row.uncertainty = rr.uncertainty;
    row.z_score = rr.z_score;
    row.budget_k = rr.budget_k;
    row.budget_t = rr.budget_t;
    return row;
}

namespace {

std::vector<GraphRecord> load_test_records(const ExperimentConfig& cfg, int n) {
    return read_records(cfg.out_dir + "/test_n" + std::to_string(n) + ".graphs");
}

std::vector<EvalRow> evaluate_records(const ExperimentConfig& cfg,
                                      const std::vector<GraphRecord>& records,
                                      const MethodContext& ctx, std::uint64_t seed) {
    std::vector<EvalRow> rows;
    for (const auto& rec : records)
        for (const auto& method : cfg.methods)
            rows.push_back(run_method(method, rec, ctx, cfg, seed));
    return rows;
}

}  // namespace

std::vector<EvalRow> stage_evaluate(const ExperimentConfig& cfg, const std::string& suite) {
    std::vector<EvalRow> rows;

    if (suite == "main") {
        const auto records = load_test_records(cfg, cfg.train_n);
        for (const auto seed : cfg.seeds) {
            const MethodContext ctx = load_method_context(cfg, seed);
            auto batch = evaluate_records(cfg, records, ctx, seed);
            rows.insert(rows.end(), batch.begin(), batch.end());
        }
    } else if (suite == "crosssize") {
        const std::uint64_t seed = cfg.seeds.at(0);
        const MethodContext ctx = load_method_context(cfg, seed);
        for (int n : cfg.sizes) {
            const auto records = load_test_records(cfg, n);
            auto batch = evaluate_records(cfg, records, ctx, seed);
            rows.insert(rows.end(), batch.begin(), batch.end());
        }
    } else if (suite == "shots") {
        const std::uint64_t seed = cfg.seeds.at(0);
        const MethodContext ctx = load_method_context(cfg, seed);
        const auto records = load_test_records(cfg, cfg.train_n);
        for (int shots : {512, 1024, 4096, 8192}) {
            ExperimentConfig shot_cfg = cfg;
            shot_cfg.shots = shots;
            auto batch = evaluate_records(shot_cfg, records, ctx, seed);
            for (auto& row : batch) row.instance += "@s" + std::to_string(shots);
            rows.insert(rows.end(), batch.begin(), batch.end());
        }
    } else if (suite == "ablation") {
        const std::uint64_t seed = cfg.seeds.at(0);
        const auto records = load_test_records(cfg, cfg.train_n);

        // full model and the projection-free variant reuse one checkpoint
        {
            MethodContext ctx = load_method_context(cfg, seed);
            ExperimentConfig variant = cfg;
            variant.methods = {"uq_qaoa", "uq_qaoa_no_tr"};
            auto batch = evaluate_records(variant, records, ctx, seed);
            rows.insert(rows.end(), batch.begin(), batch.end());
        }
        // retrained loss/feature ablations
        struct Ablation {
            const char* tag;
            double lambda_w;
            double lambda_c;
            bool spectral_pe;
        };
        const Ablation ablations[] = {{"no_w2", 0.0, cfg.lambda_c, true},
                                      {"no_contrastive", cfg.lambda_w, 0.0, true},
                                      {"no_spectral_pe", cfg.lambda_w, cfg.lambda_c, false}};
        for (const auto& ab : ablations) {
            ExperimentConfig variant = cfg;
            variant.out_dir = cfg.out_dir + "/ablation_" + ab.tag;
            std::filesystem::create_directories(variant.out_dir);
            for (const char* f : {"train.graphs", "val.graphs"})
                std::filesystem::copy_file(cfg.out_dir + "/" + std::string(f),
                                           variant.out_dir + "/" + std::string(f),
                                           std::filesystem::copy_options::overwrite_existing);
            TrainingConfig tc;
            tc.lambda_w = ab.lambda_w;
            tc.lambda_c = ab.lambda_c;
            tc.tau_w = cfg.tau_w;
            tc.tau_c = cfg.tau_c;
            tc.epochs = cfg.epochs;
            tc.k = cfg.k;
            tc.hidden = cfg.hidden;
            tc.spectral_pe = ab.spectral_pe;
            stage_train_seed(variant, seed, &tc);
            MethodContext ctx = load_method_context(variant, seed);
            ExperimentConfig run_cfg = variant;
            run_cfg.methods = {"uq_qaoa"};
            auto batch = evaluate_records(run_cfg, records, ctx, seed);
            for (auto& row : batch) row.method = std::string("uq_qaoa_") + ab.tag;
            rows.insert(rows.end(), batch.begin(), batch.end());
        }
    } else if (suite == "lofo") {
        const std::uint64_t seed = cfg.seeds.at(0);
        const auto records = load_test_records(cfg, cfg.train_n);
        for (const auto family :
             {GraphFamily::ER, GraphFamily::REG3, GraphFamily::BA, GraphFamily::WS}) {
            ExperimentConfig variant = cfg;
            variant.out_dir = cfg.out_dir + "/lofo_" + family_name(family);
            std::filesystem::create_directories(variant.out_dir);
            for (const char* f : {"train.graphs", "val.graphs"}) {
                auto recs = read_records(cfg.out_dir + "/" + std::string(f));
                std::vector<GraphRecord> kept;
                for (auto& rec : recs)
                    if (rec.graph.family != family) kept.push_back(std::move(rec));
                write_records(kept, variant.out_dir + "/" + std::string(f));
            }
            stage_train_seed(variant, seed);
            MethodContext ctx = load_method_context(variant, seed);
            ExperimentConfig run_cfg = variant;
            run_cfg.methods = {"uq_qaoa"};
            auto batch = evaluate_records(run_cfg, records, ctx, seed);
            for (auto& row : batch)
                row.method = "uq_qaoa_lofo_" + family_name(family);
            rows.insert(rows.end(), batch.begin(), batch.end());
        }
    } else {
        throw std::invalid_argument("stage_evaluate: unknown suite '" + suite + "'");
    }
    return rows;
}

void write_results_csv(const std::vector<EvalRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_results_csv: cannot open " + path);
    out << "instance,family,n,method,seed,evals,best_f,ratio,wall_ms\n";
    char buf[256];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%s,%llu,%ld,%.9g,%.6f,%.3f\n",
                      row.instance.c_str(), row.family.c_str(), row.n, row.method.c_str(),
                      static_cast<unsigned long long>(row.seed), row.evals, row.best_f,
                      row.ratio, row.wall_ms);
        out << buf;
    }
}

std::vector<EvalRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_results_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("read_results_csv: empty file " + path);
    std::vector<EvalRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> parts;
        std::istringstream ss(line);
        std::string part;
        while (std::getline(ss, part, ',')) parts.push_back(part);
        if (parts.size() != 9)
            throw std::runtime_error("read_results_csv: malformed row in " + path);
        EvalRow row;
        row.instance = parts[0];
        row.family = parts[1];
        row.n = std::stoi(parts[2]);
        row.method = parts[3];
        row.seed = std::stoull(parts[4]);
        row.evals = std::stol(parts[5]);
        row.best_f = std::stod(parts[6]);
        row.ratio = std::stod(parts[7]);
        row.wall_ms = std::stod(parts[8]);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

struct MethodAgg {
    std::vector<double> evals, ratios, wall;
};

std::map<std::string, MethodAgg> aggregate(const std::vector<EvalRow>& rows,
                                           int n_filter = -1) {
    std::map<std::string, MethodAgg> by_method;
    for (const auto& row : rows) {
        if (n_filter > 0 && row.n != n_filter) continue;
        auto& agg = by_method[row.method];
        agg.evals.push_back(static_cast<double>(row.evals));
        agg.ratios.push_back(row.ratio);
        agg.wall.push_back(row.wall_ms);
    }
    return by_method;
}

}  // namespace

void write_summary_tables(const std::vector<EvalRow>& rows, const ExperimentConfig& cfg,
                          const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    char buf[256];

    // efficiency table at the training size
    auto by_method = aggregate(rows, cfg.train_n);
    double random_median_ms = 0.0, random_mean_evals = 0.0;
    if (by_method.count("random")) {
        random_median_ms = median(by_method["random"].wall);
        random_mean_evals = mean(by_method["random"].evals);
    }
    {
        std::ofstream out(out_dir + "/summary_efficiency.csv");
        out << "method,ratio_mean,ratio_std,evals_mean,evals_std,wall_ms_median,speedup\n";
        for (const auto& [method, agg] : by_method) {
            const double med_ms = median(agg.wall);
            const double speedup = med_ms > 0.0 && random_median_ms > 0.0
                                       ? random_median_ms / med_ms
                                       : 0.0;
            std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.3f,%.3f,%.3f,%.3f\n",
                          method.c_str(), mean(agg.ratios), sample_std(agg.ratios),
                          mean(agg.evals), sample_std(agg.evals), med_ms, speedup);
            out << buf;
        }
    }
    {
        // efficiency-adjusted quality: r per 100 evals, r per modeled second,
        // per-instance evaluation reduction vs the random mean
        std::ofstream out(out_dir + "/summary_quality.csv");
        out << "method,r_per_100evals,r_per_s,eval_reduction\n";
        for (const auto& [method, agg] : by_method) {
            std::vector<double> r100, rps, red;
            for (std::size_t i = 0; i < agg.ratios.size(); ++i) {
                r100.push_back(agg.ratios[i] / (agg.evals[i] / 100.0));
                rps.push_back(agg.ratios[i] / (agg.wall[i] / 1000.0));
                if (random_mean_evals > 0.0)
                    red.push_back(1.0 - agg.evals[i] / random_mean_evals);
            }
            std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f\n", method.c_str(),
                          mean(r100), mean(rps), red.empty() ? 0.0 : mean(red));
            out << buf;
        }
    }
    {
        // per-family breakdown at the training size
        std::ofstream out(out_dir + "/summary_perfamily.csv");
        out << "family,method,ratio_mean,evals_mean\n";
        std::map<std::pair<std::string, std::string>, MethodAgg> by_fm;
        for (const auto& row : rows) {
            if (row.n != cfg.train_n) continue;
            auto& agg = by_fm[{row.family, row.method}];
            agg.evals.push_back(static_cast<double>(row.evals));
            agg.ratios.push_back(row.ratio);
        }
        for (const auto& [key, agg] : by_fm) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.3f\n", key.first.c_str(),
                          key.second.c_str(), mean(agg.ratios), mean(agg.evals));
            out << buf;
        }
    }
    {
        // cross-size speedups (only meaningful for multi-size row sets)
        std::ofstream out(out_dir + "/summary_crosssize.csv");
        out << "n,method,evals_mean,wall_ms_median,speedup\n";
        std::set<int> ns;
        for (const auto& row : rows) ns.insert(row.n);
        for (int n : ns) {
            auto by_m = aggregate(rows, n);
            double rnd_ms = by_m.count("random") ? median(by_m["random"].wall) : 0.0;
            for (const auto& [method, agg] : by_m) {
                const double med_ms = median(agg.wall);
                std::snprintf(buf, sizeof(buf), "%d,%s,%.3f,%.3f,%.3f\n", n, method.c_str(),
                              mean(agg.evals), med_ms,
                              rnd_ms > 0.0 && med_ms > 0.0 ? rnd_ms / med_ms : 0.0);
                out << buf;
            }
        }
    }
    {
        // per-seed table (multi-seed stability)
        std::ofstream out(out_dir + "/summary_multiseed.csv");
        out << "seed,method,ratio_mean,evals_mean\n";
        std::map<std::pair<std::uint64_t, std::string>, MethodAgg> by_sm;
        for (const auto& row : rows) {
            if (row.n != cfg.train_n) continue;
            auto& agg = by_sm[{row.seed, row.method}];
            agg.evals.push_back(static_cast<double>(row.evals));
            agg.ratios.push_back(row.ratio);
        }
        for (const auto& [key, agg] : by_sm) {
            std::snprintf(buf, sizeof(buf), "%llu,%s,%.6f,%.3f\n",
                          static_cast<unsigned long long>(key.first), key.second.c_str(),
                          mean(agg.ratios), mean(agg.evals));
            out << buf;
        }
    }
    {
        // paired significance tests on the training-size instances
        std::ofstream out(out_dir + "/significance.csv");
        out << "comparison,metric,statistic,z,p_value,effect_size,n\n";
        auto paired = [&](const std::string& a, const std::string& b,
                          auto metric, const char* metric_name) {
            std::map<std::pair<std::string, std::uint64_t>, double> va, vb;
            for (const auto& row : rows) {
                if (row.n != cfg.train_n) continue;
                if (row.method == a) va[{row.instance, row.seed}] = metric(row);
                if (row.method == b) vb[{row.instance, row.seed}] = metric(row);
            }
            std::vector<double> xs, ys;
            for (const auto& [key, value] : va) {
                auto it = vb.find(key);
                if (it != vb.end()) {
                    xs.push_back(value);
                    ys.push_back(it->second);
                }
            }
            if (xs.size() < 10) return;
            try {
                const WilcoxonResult w = wilcoxon_signed_rank(xs, ys);
                std::snprintf(buf, sizeof(buf), "%s_vs_%s,%s,%.3f,%.4f,%.6g,%.4f,%d\n",
                              a.c_str(), b.c_str(), metric_name, w.statistic, w.z, w.p_value,
                              w.effect_size, w.n_used);
                out << buf;
            } catch (const std::invalid_argument&) {
                // identical metric vectors carry no information; skip the row
            }
        };
        auto get_evals = [](const EvalRow& r) { return static_cast<double>(r.evals); };
        auto get_wall = [](const EvalRow& r) { return r.wall_ms; };
        paired("uq_qaoa", "random", get_evals, "evals");
        paired("uq_qaoa", "random", get_wall, "wall_ms");
        paired("uq_qaoa", "gnn_point", get_evals, "evals");
    }
    {
        // budget allocation diagnostics for the uncertainty pipeline
        std::ofstream out(out_dir + "/budget.csv");
        out << "instance,seed,uncertainty,z,K,T,evals\n";
        for (const auto& row : rows) {
            if (row.method != "uq_qaoa") continue;
            std::snprintf(buf, sizeof(buf), "%s,%llu,%.9g,%.6f,%d,%d,%ld\n",
                          row.instance.c_str(), static_cast<unsigned long long>(row.seed),
                          row.uncertainty, row.z_score, row.budget_k, row.budget_t,
                          row.evals);
            out << buf;
        }
    }
}

void stage_report(const ExperimentConfig& cfg) {
    const auto rows = read_results_csv(cfg.out_dir + "/results.csv");
    const std::string fig_dir = cfg.out_dir + "/figures";
    std::filesystem::create_directories(fig_dir);
    char buf[256];

    auto by_method = aggregate(rows, cfg.train_n);
    {
        std::ofstream out(fig_dir + "/fig_runtime_bars.csv");
        out << "method,wall_ms_median\n";
        for (const auto& [method, agg] : by_method) {
            std::snprintf(buf, sizeof(buf), "%s,%.3f\n", method.c_str(), median(agg.wall));
            out << buf;
        }
    }
    {
        std::ofstream out(fig_dir + "/fig_eval_bars.csv");
        out << "method,evals_mean\n";
        for (const auto& [method, agg] : by_method) {
            std::snprintf(buf, sizeof(buf), "%s,%.3f\n", method.c_str(), mean(agg.evals));
            out << buf;
        }
    }
    {
        std::ofstream out(fig_dir + "/fig_speedup_vs_n.csv");
        out << "n,method,speedup\n";
        std::set<int> ns;
        for (const auto& row : rows) ns.insert(row.n);
        for (int n : ns) {
            auto by_m = aggregate(rows, n);
            if (!by_m.count("random")) continue;
            const double rnd = median(by_m["random"].wall);
            for (const auto& [method, agg] : by_m) {
                std::snprintf(buf, sizeof(buf), "%d,%s,%.3f\n", n, method.c_str(),
                              rnd / median(agg.wall));
                out << buf;
            }
        }
    }
    {
        // reliability deciles from the uncertainty runs
        std::vector<double> us, errs;
        std::map<std::pair<std::string, std::uint64_t>, double> ratio_of;
        std::ifstream budget(cfg.out_dir + "/budget.csv");
        for (const auto& row : rows)
            if (row.method == "uq_qaoa") ratio_of[{row.instance, row.seed}] = row.ratio;
        if (budget) {
            std::string line;
            std::getline(budget, line);
            while (std::getline(budget, line)) {
                std::istringstream ss(line);
                std::string instance, seed_s, u_s;
                std::getline(ss, instance, ',');
                std::getline(ss, seed_s, ',');
                std::getline(ss, u_s, ',');
                auto it = ratio_of.find({instance, std::stoull(seed_s)});
                if (it == ratio_of.end()) continue;
                us.push_back(std::stod(u_s));
                errs.push_back(1.0 - it->second);
            }
        }
        std::ofstream out(fig_dir + "/fig_reliability_deciles.csv");
        out << "decile,mean_predicted,mean_observed,count\n";
        if (us.size() >= 10) {
            const auto bins = reliability_bins(us, errs, 10);
            for (std::size_t b = 0; b < bins.size(); ++b) {
                std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%d\n", b + 1,
                              bins[b].mean_predicted, bins[b].mean_observed, bins[b].count);
                out << buf;
            }
        }
    }
    {
        // cumulative evaluations per method over the instance stream
        std::ofstream out(fig_dir + "/fig_cumulative_evals.csv");
        out << "index,method,cumulative_evals\n";
        std::map<std::string, long> totals;
        std::map<std::string, int> index;
        for (const auto& row : rows) {
            if (row.n != cfg.train_n) continue;
            totals[row.method] += row.evals;
            ++index[row.method];
            std::snprintf(buf, sizeof(buf), "%d,%s,%ld\n", index[row.method],
                          row.method.c_str(), totals[row.method]);
            out << buf;
        }
    }
    {
        // budget vs uncertainty scatter: copy-through of budget.csv columns
        std::ifstream in(cfg.out_dir + "/budget.csv");
        std::ofstream out(fig_dir + "/fig_budget_scatter.csv");
        out << "uncertainty,z,K,T,evals\n";
        if (in) {
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                std::istringstream ss(line);
                std::string skip, seed_s, u, z, k, t, evals;
                std::getline(ss, skip, ',');
                std::getline(ss, seed_s, ',');
                std::getline(ss, u, ',');
                std::getline(ss, z, ',');
                std::getline(ss, k, ',');
                std::getline(ss, t, ',');
                std::getline(ss, evals, ',');
                out << u << "," << z << "," << k << "," << t << "," << evals << "\n";
            }
        }
    }
}

void stage_sensitivity(const ExperimentConfig& cfg) {
    struct Setting {
        const char* name;
        double lambda_w, lambda_c, tau_w;
    };
    const Setting settings[] = {
        {"default", cfg.lambda_w, cfg.lambda_c, cfg.tau_w},
        {"lambda_w_0.01", 0.01, cfg.lambda_c, cfg.tau_w},
        {"lambda_w_0.5", 0.5, cfg.lambda_c, cfg.tau_w},
        {"lambda_c_0", cfg.lambda_w, 0.0, cfg.tau_w},
        {"lambda_c_0.2", cfg.lambda_w, 0.2, cfg.tau_w},
        {"tau_w_0.2", cfg.lambda_w, cfg.lambda_c, 0.2},
        {"tau_w_1.0", cfg.lambda_w, cfg.lambda_c, 1.0},
    };
    const std::uint64_t seed = cfg.seeds.at(0);
    const auto records = load_test_records(cfg, cfg.train_n);

    std::ofstream out(cfg.out_dir + "/sensitivity.csv");
    out << "setting,spearman_rho,evals_mean,wall_ms_median\n";
    char buf[192];
    for (const auto& s : settings) {
        ExperimentConfig variant = cfg;
        variant.out_dir = cfg.out_dir + "/sens_" + s.name;
        std::filesystem::create_directories(variant.out_dir);
        for (const char* f : {"train.graphs", "val.graphs"})
            std::filesystem::copy_file(cfg.out_dir + "/" + std::string(f),
                                       variant.out_dir + "/" + std::string(f),
                                       std::filesystem::copy_options::overwrite_existing);
        TrainingConfig tc;
        tc.lambda_w = s.lambda_w;
        tc.lambda_c = s.lambda_c;
        tc.tau_w = s.tau_w;
        tc.tau_c = cfg.tau_c;
        tc.epochs = cfg.epochs;
        tc.k = cfg.k;
        tc.hidden = cfg.hidden;
        stage_train_seed(variant, seed, &tc);

        MethodContext ctx = load_method_context(variant, seed);
        ExperimentConfig run_cfg = variant;
        run_cfg.methods = {"uq_qaoa"};
        const auto batch = evaluate_records(run_cfg, records, ctx, seed);

        std::vector<double> us, errs, evals, wall;
        for (const auto& row : batch) {
            us.push_back(row.uncertainty);
            errs.push_back(1.0 - row.ratio);
            evals.push_back(static_cast<double>(row.evals));
            wall.push_back(row.wall_ms);
        }
        double rho = 0.0;
        try {
            rho = spearman_rho(us, errs);
        } catch (const std::invalid_argument&) {
            rho = 0.0;  // constant signal at tiny scales
        }
        std::snprintf(buf, sizeof(buf), "%s,%.4f,%.3f,%.3f\n", s.name, rho, mean(evals),
                      median(wall));
        out << buf;
    }
}

void run_full_pipeline(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    stage_generate(cfg);
    stage_targets(cfg);
    stage_train(cfg);
    const auto rows = stage_evaluate(cfg, "main");
    write_results_csv(rows, cfg.out_dir + "/results.csv");
    write_summary_tables(rows, cfg, cfg.out_dir);
    stage_report(cfg);
}

}  // namespace uqq
