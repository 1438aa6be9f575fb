// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jssr/autoencoder.hpp"
#include "jssr/baselines.hpp"
#include "jssr/config.hpp"
#include "jssr/thresholding.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jssr {

enum class Scheme {
    Proposed,  // covariance-feature autoencoder with learned pilots
    Naive,     // raw-measurement autoencoder with learned pilots
    Lasso,     // covariance LASSO, Gaussian pilots
    GroupLasso,
    Amp,
    Ml,
    Oracle,    // returns the truth; harness plumbing probe
    Constant,  // returns a constant score; timing floor probe
};

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct Detection {
    Eigen::VectorXd scores;
    bool flagged = false;  // solver did not converge or diverged
};

/// Maps one measurement matrix to per-device scores in [0, 1].
class Detector {
public:
    virtual ~Detector() = default;
    virtual std::string name() const = 0;
    /// Pilot matrix the measurements must be taken with.
    virtual const ComplexMatrix& pilots() const = 0;
    /// `truth` is only consulted by probe detectors.
    virtual Detection detect(const ComplexMatrix& Y, const ActivityVector* truth = nullptr) const = 0;
};

/// Trained autoencoder (covariance or raw features) with its learned pilots.
std::unique_ptr<Detector> make_autoencoder_detector(ModelParams params, std::string name);
std::unique_ptr<Detector> make_lasso_detector(const ComplexMatrix& A, SolverConfig cfg, double lambda_fraction);
std::unique_ptr<Detector> make_group_lasso_detector(const ComplexMatrix& A, SolverConfig cfg, double lambda_fraction);
std::unique_ptr<Detector> make_amp_detector(const ComplexMatrix& A, AmpPrior prior, SolverConfig cfg);
std::unique_ptr<Detector> make_ml_detector(const ComplexMatrix& A, double sigma2, SolverConfig cfg);
std::unique_ptr<Detector> make_oracle_detector(Index N);
std::unique_ptr<Detector> make_constant_detector(const ComplexMatrix& A, double value = 0.5);

/// Measurements for every sample of a dataset under the detector's pilots,
/// with the dataset's shared per-sample noise.
std::vector<ComplexMatrix> measure_all(const ComplexMatrix& A, const Dataset& ds, double sigma2);

struct ScoreSet {
    Eigen::MatrixXd scores;  // N x T
    Index flagged = 0;
};

ScoreSet detect_all(const Detector& d, const std::vector<ComplexMatrix>& Y, const Dataset& truth);

/// Median over `reps` timed passes (after one untimed warm-up) of pass time
/// divided by the sample count. Runs single-threaded and holds an exclusive
/// timing token, so timed sections never overlap.
double time_detection(const Detector& d, const std::vector<ComplexMatrix>& Y, const Dataset& truth, int reps);

/// Threshold candidates used for every scheme.
ThresholdGrid default_grid();

struct SweepRecord {
    std::string scheme;
    std::string axis;
    double axis_value = 0.0;
    Index N = 0;
    Index L = 0;
    Index M = 0;
    double p = 0.0;
    double p1_over_p2 = 0.0;
    Index G = 0;
    double sigma2 = 0.0;
    std::uint64_t seed = 0;
    double error_rate = 0.0;
    double time_per_sample_s = 0.0;
    double threshold_used = 0.0;
    std::string solver_flags;
    bool failed = false;

    // Kept in memory for audits; not written to the CSV.
    std::vector<ActivityVector> truth;
    std::vector<ActivityVector> decisions;
    std::uint64_t test_fingerprint = 0;
};

inline constexpr int kCsvSchemaVersion = 1;

/// Header row of the results CSV.
std::string csv_header();
std::string csv_row(const SweepRecord& r);
void write_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records);
/// Parse rows written by write_csv (audit fields left empty).
std::vector<SweepRecord> read_csv(const std::filesystem::path& path);

/// Per-record decisions sidecar (JSON lines) consumed by `jssr verify`.
void write_decisions(const std::filesystem::path& path, const std::vector<SweepRecord>& records);
/// Re-derive each record's error rate from the sidecar; returns audit failures.
std::vector<std::string> verify_decisions(const std::filesystem::path& csv, const std::filesystem::path& decisions);

struct SweepSpec {
    ExperimentConfig base;
    std::string axis;  // a config key: L_over_N, p, M, p1_over_p2, G, ...
    std::vector<double> values;
    std::vector<Scheme> schemes;
    std::vector<std::uint64_t> seeds;

    void validate() const;
};

/// Reads [sweep] (axis, values, schemes, seeds) plus config sections applied
/// on top of `base`.
SweepSpec load_sweep_spec(const std::filesystem::path& path, const ExperimentConfig& base);

struct SweepResult {
    std::vector<SweepRecord> records;
    std::vector<std::string> audit_failures;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Every (value, seed) point: train learned schemes, calibrate thresholds on
/// validation data, evaluate all schemes on one shared test set. A scheme
/// that throws yields a failed row instead of aborting the sweep.
SweepResult run_sweep(const SweepSpec& spec, const ProgressFn& progress = {});

/// Seeds derived for one experiment point.
struct PointSeeds {
    std::uint64_t train, val, test, pilots, model;
    static PointSeeds from(std::uint64_t seed);
};

/// Datasets and Gaussian pilots shared by every scheme at one point.
class PointData {
public:
    explicit PointData(const ExperimentConfig& cfg);

    const ExperimentConfig& config() const { return cfg_; }
    const PointSeeds& seeds() const { return seeds_; }
    const Dataset& val() const { return val_; }
    const Dataset& test() const { return test_; }
    const ComplexMatrix& gaussian_pilots() const { return gaussian_; }
    /// Generated on first use.
    const Dataset& train();

private:
    ExperimentConfig cfg_;
    PointSeeds seeds_;
    Dataset test_;
    Dataset val_;
    ComplexMatrix gaussian_;
    std::optional<Dataset> train_;
};

/// Trains (learned schemes) or tunes (baselines) the detector for one scheme.
/// `note` receives the chosen lambda or best epoch.
std::unique_ptr<Detector> make_detector(Scheme scheme, PointData& point, std::string& note,
                                        const ProgressFn& progress = {});

/// Records for a single experiment point.
std::vector<SweepRecord> run_point(const ExperimentConfig& cfg, const std::vector<Scheme>& schemes,
                                   const std::string& axis, double axis_value, const ProgressFn& progress = {});

/// Detector for a scheme other than the learned ones. Lasso and glasso pick
/// lambda on the first cfg.lambda_val samples of `val`; `note` records the choice.
std::unique_ptr<Detector> make_baseline_detector(Scheme scheme, const ExperimentConfig& cfg,
                                                 const ComplexMatrix& pilots, const Dataset& val, std::string& note,
                                                 const ProgressFn& progress = {});

/// Config columns of a record for one point.
SweepRecord make_record(const ExperimentConfig& cfg, const std::string& scheme, const std::string& axis,
                        double axis_value);

/// Calibrate on `val` (unless a threshold is given), decide and time on
/// `test`. Fills the result and audit fields of `rec`.
void evaluate_detector(const Detector& d, const Dataset& val, const Dataset& test, double sigma2, int reps,
                       SweepRecord& rec, std::optional<double> threshold = std::nullopt);

/// Invariant audits over a finished sweep (error-rate recomputation, range
/// checks, shared test sets).
std::vector<std::string> audit_records(const std::vector<SweepRecord>& records);

struct Aggregate {
    std::string scheme;
    double axis_value = 0.0;
    double mean_error = 0.0;
    double std_error = 0.0;   // standard error over seeds
    int seeds = 0;
    int failed = 0;
};

/// Mean error per (scheme, axis value) over seeds; failed rows are excluded
/// and counted.
std::vector<Aggregate> aggregate(const std::vector<SweepRecord>& records);


} // namespace jssr
