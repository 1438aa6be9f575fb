// SPDX-License-Identifier: Apache-2.0
// jssr: dataset generation, training, calibration, baselines and sweeps.
#include "jssr/bench.hpp"
#include "jssr/checkpoint.hpp"
#include "jssr/config.hpp"
#include "jssr/dataset_io.hpp"
#include "jssr/error.hpp"
#include "jssr/training.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

using namespace jssr;

namespace {

void log_line(const std::string& s) { std::cerr << s << std::endl; }

void apply_thread_cap() {
    if (const char* env = std::getenv("JSSR_THREADS")) {
        const int n = std::atoi(env);
        if (n < 1) throw ConfigError("JSSR_THREADS must be a positive integer");
        omp_set_num_threads(n);
    }
}

ExperimentConfig base_config(const std::string& path, bool paper_full) {
    ExperimentConfig base = named_config(paper_full ? "paper-full" : "desk");
    return path.empty() ? base : load_config(path, base);
}

Dataset split_or_file(const std::string& path, const ExperimentConfig& cfg, std::uint64_t seed, Index count) {
    if (!path.empty()) return read_dataset(path).data;
    return generate_dataset(cfg.group(), cfg.M, count, seed);
}

void check_compatible(const ExperimentConfig& cfg, const Dataset& ds, const std::string& what) {
    if (ds.N() != cfg.N || ds.M != cfg.M) {
        throw ConfigError(what + " has N=" + std::to_string(ds.N()) + ", M=" + std::to_string(ds.M) +
                          " but the config has N=" + std::to_string(cfg.N) + ", M=" + std::to_string(cfg.M));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jointly sparse support recovery: learned pilots, covariance decoder and baselines"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a dataset file");
    std::string gen_config, gen_out;
    std::uint64_t gen_seed = 1;
    Index gen_count = 0;
    gen->add_option("--config", gen_config, "Config file")->check(CLI::ExistingFile);
    gen->add_option("--out", gen_out, "Output dataset")->required();
    gen->add_option("--seed", gen_seed, "Dataset seed")->required();
    gen->add_option("--count", gen_count, "Number of samples")->required();

    // train
    auto* tr = app.add_subcommand("train", "Train the autoencoder");
    std::string tr_config, tr_out, tr_log, tr_train, tr_val;
    bool tr_naive = false;
    tr->add_option("--config", tr_config, "Config file")->check(CLI::ExistingFile);
    tr->add_option("--out", tr_out, "Output checkpoint")->required();
    tr->add_option("--log", tr_log, "Training log CSV (default: <out>.log.csv)");
    tr->add_option("--train-data", tr_train, "Training dataset (default: generated from the config seed)");
    tr->add_option("--val-data", tr_val, "Validation dataset (default: generated from the config seed)");
    tr->add_flag("--naive", tr_naive, "Raw-measurement decoder instead of covariance features");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Store the error-minimizing threshold in a checkpoint");
    std::string cal_model, cal_data;
    cal->add_option("--model", cal_model, "Checkpoint")->required()->check(CLI::ExistingFile);
    cal->add_option("--data", cal_data, "Validation dataset")->required()->check(CLI::ExistingFile);

    // baseline
    auto* bl = app.add_subcommand("baseline", "Evaluate one scheme on a test set and print a CSV row");
    std::string bl_scheme, bl_data, bl_model, bl_val, bl_config, bl_out;
    bl->add_option("--scheme", bl_scheme, "lasso, glasso, amp, ml, naive or proposed")
        ->required()
        ->check(CLI::IsMember({"lasso", "glasso", "amp", "ml", "naive", "proposed"}));
    bl->add_option("--data", bl_data, "Test dataset")->required()->check(CLI::ExistingFile);
    bl->add_option("--model", bl_model, "Checkpoint (naive, proposed)")->check(CLI::ExistingFile);
    bl->add_option("--val", bl_val, "Validation dataset for lambda and threshold selection")
        ->check(CLI::ExistingFile);
    bl->add_option("--config", bl_config, "Config file")->check(CLI::ExistingFile);
    bl->add_option("--out", bl_out, "Write CSV here instead of stdout");

    // bench
    auto* be = app.add_subcommand("bench", "Run a sweep");
    std::string be_spec, be_out, be_decisions;
    bool be_desk = false, be_full = false;
    be->add_option("--spec", be_spec, "Sweep spec")->required()->check(CLI::ExistingFile);
    be->add_option("--out", be_out, "Results CSV")->required();
    be->add_option("--decisions", be_decisions, "Decision sidecar (default: <out>.decisions.jsonl)");
    auto* desk_flag = be->add_flag("--desk", be_desk, "Start from the desk config (default)");
    be->add_flag("--paper-full", be_full, "Start from the paper-full config")->excludes(desk_flag);

    // verify
    auto* ve = app.add_subcommand("verify", "Recompute error rates from a decision sidecar");
    std::string ve_csv, ve_decisions;
    ve->add_option("--csv", ve_csv, "Results CSV")->required()->check(CLI::ExistingFile);
    ve->add_option("--decisions", ve_decisions, "Decision sidecar (default: <csv>.decisions.jsonl)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        apply_thread_cap();

        if (*gen) {
            const ExperimentConfig cfg = base_config(gen_config, false);
            write_generated_dataset(gen_out, cfg.group(), cfg.M, gen_count, gen_seed, cfg.sigma2);
            log_line("wrote " + std::to_string(gen_count) + " samples to " + gen_out);
            return 0;
        }

        if (*tr) {
            const ExperimentConfig cfg = base_config(tr_config, false);
            const PointSeeds seeds = PointSeeds::from(cfg.seed);
            const Dataset train_set = split_or_file(tr_train, cfg, seeds.train, cfg.train);
            const Dataset val_set = split_or_file(tr_val, cfg, seeds.val, cfg.val);
            check_compatible(cfg, train_set, "training data");
            check_compatible(cfg, val_set, "validation data");
            std::ofstream log(tr_log.empty() ? tr_out + ".log.csv" : tr_log);
            log << "epoch,train_loss,val_loss,wall_seconds\n" << std::setprecision(10);
            const TrainResult res =
                train(train_set, val_set, cfg.training(derive_seed(seeds.model, StreamDomain::Split, tr_naive ? 1 : 0)),
                      cfg.decoder(tr_naive ? FeatureKind::Raw : FeatureKind::Covariance), [&](const EpochLog& e) {
                          log << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ',' << e.wall_seconds << '\n';
                          log.flush();
                          std::cerr << "epoch " << e.epoch << " train " << e.train_loss << " val " << e.val_loss
                                    << '\n';
                      });
            save_checkpoint(tr_out, res.best);
            log_line("best epoch " + std::to_string(res.best_epoch) + ", checkpoint " + tr_out);
            return 0;
        }

        if (*cal) {
            ModelParams params = load_checkpoint(cal_model);
            const DatasetFile file = read_dataset(cal_data);
            if (file.data.N() != params.arch.N || file.data.M != params.arch.M) {
                throw ConfigError("dataset shape does not match the model");
            }
            const Eigen::MatrixXd scores = score_dataset(params, file.data, params.sigma2);
            std::vector<ActivityVector> truth;
            for (const auto& s : file.data.samples) truth.push_back(s.activity);
            const Calibration c = calibrate_threshold(scores, truth, default_grid());
            params.threshold = c.threshold;
            save_checkpoint(cal_model, params);
            std::cout << "threshold " << c.threshold << " validation error rate " << c.error_rate << '\n';
            return 0;
        }

        if (*bl) {
            ExperimentConfig cfg = base_config(bl_config, false);
            const DatasetFile test = read_dataset(bl_data);
            cfg.N = test.data.N();
            cfg.M = test.data.M;
            cfg.sigma2 = test.sigma2;
            cfg.G = test.data.cfg.G;
            cfg.p = test.data.cfg.mean_activity();
            if (test.data.cfg.p2 > 0.0) cfg.p1_over_p2 = test.data.cfg.p1 / test.data.cfg.p2;
            cfg.seed = test.data.seed;
            const PointSeeds seeds = PointSeeds::from(cfg.seed);
            const Dataset val = bl_val.empty() ? generate_dataset(test.data.cfg, cfg.M, cfg.val, seeds.val)
                                               : read_dataset(bl_val).data;
            check_compatible(cfg, val, "validation data");

            const Scheme scheme = parse_scheme(bl_scheme);
            std::unique_ptr<Detector> det;
            std::optional<double> threshold;
            std::string note;
            if (scheme == Scheme::Naive || scheme == Scheme::Proposed) {
                if (bl_model.empty()) throw ConfigError("--model is required for scheme " + bl_scheme);
                ModelParams params = load_checkpoint(bl_model);
                const bool raw = params.arch.features == FeatureKind::Raw;
                if (raw != (scheme == Scheme::Naive)) throw ConfigError("checkpoint features do not match the scheme");
                if (params.arch.N != cfg.N || params.arch.M != cfg.M) throw ConfigError("model shape mismatch");
                cfg.L_over_N = static_cast<double>(params.arch.L) / static_cast<double>(cfg.N);
                threshold = params.threshold;
                det = make_autoencoder_detector(std::move(params), bl_scheme);
            } else {
                det = make_baseline_detector(scheme, cfg, gaussian_pilots(cfg.N, cfg.L(), seeds.pilots), val, note,
                                             log_line);
            }
            SweepRecord rec = make_record(cfg, bl_scheme, "none", 0.0);
            rec.solver_flags = note;
            evaluate_detector(*det, val, test.data, cfg.sigma2, cfg.timing_reps, rec, threshold);
            if (bl_out.empty()) {
                std::cout << csv_header() << '\n' << csv_row(rec) << '\n';
            } else {
                write_csv(bl_out, {rec});
            }
            return 0;
        }

        if (*be) {
            const ExperimentConfig base = named_config(be_full ? "paper-full" : "desk");
            const SweepSpec spec = load_sweep_spec(be_spec, base);
            const SweepResult result = run_sweep(spec, log_line);
            write_csv(be_out, result.records);
            write_decisions(be_decisions.empty() ? be_out + ".decisions.jsonl" : be_decisions, result.records);
            for (const auto& a : aggregate(result.records)) {
                std::cerr << a.scheme << " " << spec.axis << "=" << a.axis_value << ": mean error " << a.mean_error
                          << " (se " << a.std_error << ", " << a.seeds << " seeds, " << a.failed << " failed)\n";
            }
            for (const auto& f : result.audit_failures) std::cerr << "audit: " << f << '\n';
            return result.audit_failures.empty() ? 0 : 1;
        }

        if (*ve) {
            const auto failures =
                verify_decisions(ve_csv, ve_decisions.empty() ? ve_csv + ".decisions.jsonl" : ve_decisions);
            for (const auto& f : failures) std::cerr << "audit: " << f << '\n';
            std::cout << (failures.empty() ? "ok" : "FAILED") << '\n';
            return failures.empty() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
