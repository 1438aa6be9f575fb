// SPDX-License-Identifier: Apache-2.0
#include "jssr/bench.hpp"

#include "jssr/covariance_model.hpp"
#include "jssr/error.hpp"
#include "jssr/training.hpp"

#include "json.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>

namespace jssr {

std::string scheme_name(Scheme s) {
    switch (s) {
    case Scheme::Proposed: return "proposed";
    case Scheme::Naive: return "naive";
    case Scheme::Lasso: return "lasso";
    case Scheme::GroupLasso: return "glasso";
    case Scheme::Amp: return "amp";
    case Scheme::Ml: return "ml";
    case Scheme::Oracle: return "oracle";
    case Scheme::Constant: return "constant";
    }
    throw InternalError("unknown scheme");
}

Scheme parse_scheme(const std::string& name) {
    for (Scheme s : {Scheme::Proposed, Scheme::Naive, Scheme::Lasso, Scheme::GroupLasso, Scheme::Amp, Scheme::Ml,
                     Scheme::Oracle, Scheme::Constant}) {
        if (scheme_name(s) == name) return s;
    }
    throw ConfigError("unknown scheme '" + name + "'");
}

PointSeeds PointSeeds::from(std::uint64_t seed) {
    return {derive_seed(seed, StreamDomain::Split, 0), derive_seed(seed, StreamDomain::Split, 1),
            derive_seed(seed, StreamDomain::Split, 2), derive_seed(seed, StreamDomain::Split, 3),
            derive_seed(seed, StreamDomain::Split, 4)};
}

ThresholdGrid default_grid() { return ThresholdGrid::uniform_default(); }

// ---------------------------------------------------------------------------
// Detectors

namespace {

class AutoencoderDetector final : public Detector {
public:
    AutoencoderDetector(ModelParams params, std::string name)
        : params_(std::move(params)), name_(std::move(name)), pilots_(extract_sensing_matrix(params_.encoder)) {}

    std::string name() const override { return name_; }
    const ComplexMatrix& pilots() const override { return pilots_; }
    Detection detect(const ComplexMatrix& Y, const ActivityVector*) const override {
        return {infer(params_, Y), false};
    }

private:
    ModelParams params_;
    std::string name_;
    ComplexMatrix pilots_;
};

class LassoDetector final : public Detector {
public:
    LassoDetector(const ComplexMatrix& A, SolverConfig cfg, double fraction)
        : A_(A), solver_(A), cfg_(cfg), fraction_(fraction) {}

    std::string name() const override { return "lasso"; }
    const ComplexMatrix& pilots() const override { return A_; }
    Detection detect(const ComplexMatrix& Y, const ActivityVector*) const override {
        const ComplexMatrix S = sample_covariance(Y);
        SolverConfig cfg = cfg_;
        cfg.lambda = fraction_ * solver_.lambda_max(S);
        const PowerEstimate est = solver_.solve(S, cfg);
        return {est.values.unaryExpr([](double r) { return power_score(r); }), !est.converged};
    }

private:
    ComplexMatrix A_;
    CovarianceLasso solver_;
    SolverConfig cfg_;
    double fraction_;
};

class GroupLassoDetector final : public Detector {
public:
    GroupLassoDetector(const ComplexMatrix& A, SolverConfig cfg, double fraction)
        : A_(A), solver_(A), cfg_(cfg), fraction_(fraction) {}

    std::string name() const override { return "glasso"; }
    const ComplexMatrix& pilots() const override { return A_; }
    Detection detect(const ComplexMatrix& Y, const ActivityVector*) const override {
        SolverConfig cfg = cfg_;
        cfg.lambda = fraction_ * solver_.lambda_max(Y);
        const GroupLassoResult res = solver_.solve(Y, cfg);
        const double inv_m = 1.0 / static_cast<double>(Y.cols());
        return {res.row_norms.unaryExpr([inv_m](double v) { return power_score(v * v * inv_m); }), !res.converged};
    }

private:
    ComplexMatrix A_;
    GroupLasso solver_;
    SolverConfig cfg_;
    double fraction_;
};

class AmpDetector final : public Detector {
public:
    AmpDetector(const ComplexMatrix& A, AmpPrior prior, SolverConfig cfg) : A_(A), prior_(prior), cfg_(cfg) {}

    std::string name() const override { return "amp"; }
    const ComplexMatrix& pilots() const override { return A_; }
    Detection detect(const ComplexMatrix& Y, const ActivityVector*) const override {
        AmpResult res = mmv_amp(Y, A_, prior_, cfg_);
        return {std::move(res.posterior), res.diverged};
    }

private:
    ComplexMatrix A_;
    AmpPrior prior_;
    SolverConfig cfg_;
};

class MlDetector final : public Detector {
public:
    MlDetector(const ComplexMatrix& A, double sigma2, SolverConfig cfg) : A_(A), sigma2_(sigma2), cfg_(cfg) {}

    std::string name() const override { return "ml"; }
    const ComplexMatrix& pilots() const override { return A_; }
    Detection detect(const ComplexMatrix& Y, const ActivityVector*) const override {
        const MlResult res = cov_ml(sample_covariance(Y), A_, sigma2_, cfg_);
        const bool finite = res.gamma.allFinite();
        return {res.gamma.unaryExpr([](double g) { return power_score(g); }), !finite};
    }

private:
    ComplexMatrix A_;
    double sigma2_;
    SolverConfig cfg_;
};

class OracleDetector final : public Detector {
public:
    explicit OracleDetector(Index N) : A_(1, N) { A_.re.setOnes(); }

    std::string name() const override { return "oracle"; }
    const ComplexMatrix& pilots() const override { return A_; }
    Detection detect(const ComplexMatrix&, const ActivityVector* truth) const override {
        if (truth == nullptr) throw ConfigError("oracle detector needs the true activity");
        Eigen::VectorXd s(truth->size());
        for (Index n = 0; n < truth->size(); ++n) s(n) = (*truth)[n];
        return {s, false};
    }

private:
    ComplexMatrix A_;
};

class ConstantDetector final : public Detector {
public:
    ConstantDetector(const ComplexMatrix& A, double value) : A_(A), value_(value) {}

    std::string name() const override { return "constant"; }
    const ComplexMatrix& pilots() const override { return A_; }
    Detection detect(const ComplexMatrix& Y, const ActivityVector*) const override {
        // Touch the data so timing reflects one traversal.
        const double touch = Y.re.sum() * 0.0;
        return {Eigen::VectorXd::Constant(A_.cols(), value_ + touch), false};
    }

private:
    ComplexMatrix A_;
    double value_;
};

} // namespace

std::unique_ptr<Detector> make_autoencoder_detector(ModelParams params, std::string name) {
    return std::make_unique<AutoencoderDetector>(std::move(params), std::move(name));
}
std::unique_ptr<Detector> make_lasso_detector(const ComplexMatrix& A, SolverConfig cfg, double lambda_fraction) {
    return std::make_unique<LassoDetector>(A, cfg, lambda_fraction);
}
std::unique_ptr<Detector> make_group_lasso_detector(const ComplexMatrix& A, SolverConfig cfg, double lambda_fraction) {
    return std::make_unique<GroupLassoDetector>(A, cfg, lambda_fraction);
}
std::unique_ptr<Detector> make_amp_detector(const ComplexMatrix& A, AmpPrior prior, SolverConfig cfg) {
    return std::make_unique<AmpDetector>(A, prior, cfg);
}
std::unique_ptr<Detector> make_ml_detector(const ComplexMatrix& A, double sigma2, SolverConfig cfg) {
    return std::make_unique<MlDetector>(A, sigma2, cfg);
}
std::unique_ptr<Detector> make_oracle_detector(Index N) { return std::make_unique<OracleDetector>(N); }
std::unique_ptr<Detector> make_constant_detector(const ComplexMatrix& A, double value) {
    return std::make_unique<ConstantDetector>(A, value);
}

// ---------------------------------------------------------------------------
// Detection passes and timing

std::vector<ComplexMatrix> measure_all(const ComplexMatrix& A, const Dataset& ds, double sigma2) {
    if (A.cols() != ds.N()) throw DimensionError("measure_all: pilots do not match N");
    std::vector<ComplexMatrix> out(static_cast<std::size_t>(ds.size()));
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < ds.size(); ++i) {
        const ComplexMatrix Z = sample_noise_for(A.rows(), ds.M, sigma2, ds.seed, i);
        out[static_cast<std::size_t>(i)] = apply_sensing(A, ds.samples[static_cast<std::size_t>(i)].X, Z);
    }
    return out;
}

ScoreSet detect_all(const Detector& d, const std::vector<ComplexMatrix>& Y, const Dataset& truth) {
    if (static_cast<Index>(Y.size()) != truth.size()) throw DimensionError("detect_all: sample counts differ");
    ScoreSet out;
    out.scores.resize(truth.N(), truth.size());
    Index flagged = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : flagged)
    for (Index i = 0; i < truth.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        const Detection det = d.detect(Y[k], &truth.samples[k].activity);
        out.scores.col(i) = det.scores;
        flagged += det.flagged ? 1 : 0;
    }
    out.flagged = flagged;
    return out;
}

namespace {

std::mutex& timing_token() {
    static std::mutex m;
    return m;
}

} // namespace

double time_detection(const Detector& d, const std::vector<ComplexMatrix>& Y, const Dataset& truth, int reps) {
    if (reps < 1) throw ConfigError("time_detection: reps must be positive");
    if (Y.empty()) throw ConfigError("time_detection: empty test set");
    std::lock_guard lock(timing_token());
    const int threads = omp_get_max_threads();
    omp_set_num_threads(1);

    auto pass = [&] {
        double sink = 0.0;
        for (std::size_t i = 0; i < Y.size(); ++i) sink += d.detect(Y[i], &truth.samples[i].activity).scores(0);
        return sink;
    };
    volatile double guard = pass();  // warm-up
    std::vector<double> times;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        guard = guard + pass();
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(Y.size()));
    }
    omp_set_num_threads(threads);
    std::sort(times.begin(), times.end());
    const std::size_t mid = times.size() / 2;
    return times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
}

// ---------------------------------------------------------------------------
// Experiment points

namespace {

std::uint64_t fingerprint(const Dataset& ds) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const void* data, std::size_t bytes) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < bytes; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& s : ds.samples) {
        feed(s.X.re.data(), static_cast<std::size_t>(s.X.re.size()) * sizeof(double));
        feed(s.X.im.data(), static_cast<std::size_t>(s.X.im.size()) * sizeof(double));
        feed(s.activity.values.data(), s.activity.values.size());
    }
    return h;
}

std::vector<ActivityVector> truths(const Dataset& ds, Index count = -1) {
    if (count < 0) count = ds.size();
    std::vector<ActivityVector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) out.push_back(ds.samples[static_cast<std::size_t>(i)].activity);
    return out;
}

Dataset head(const Dataset& ds, Index count) {
    Dataset out{ds.cfg, ds.M, ds.seed, {}};
    out.samples.assign(ds.samples.begin(), ds.samples.begin() + std::min(count, ds.size()));
    return out;
}

SolverConfig solver(int iterations, double tol) {
    SolverConfig c;
    c.max_iterations = iterations;
    c.tolerance = tol;
    return c;
}

template <class Make>
std::unique_ptr<Detector> select_lambda(const ExperimentConfig& cfg, const ComplexMatrix& A, const Dataset& val,
                                        const ProgressFn& progress, const Make& make, std::string& note) {
    const Dataset sub = head(val, cfg.lambda_val);
    const auto sub_truth = truths(sub);
    const auto Y = measure_all(A, sub, cfg.sigma2);
    double best_err = 2.0;
    int best_k = 0;
    for (int k = cfg.lambda_k_min; k <= 0; ++k) {
        const auto det = make(std::ldexp(1.0, k));
        const ScoreSet s = detect_all(*det, Y, sub);
        const double err = calibrate_threshold(s.scores, sub_truth, default_grid()).error_rate;
        if (err < best_err) {
            best_err = err;
            best_k = k;
        }
    }
    note = "lambda=2^" + std::to_string(best_k) + "*lambda_max";
    if (progress) progress("  selected " + note);
    return make(std::ldexp(1.0, best_k));
}

} // namespace

PointData::PointData(const ExperimentConfig& cfg)
    : cfg_(cfg), seeds_(PointSeeds::from(cfg.seed)) {
    cfg_.validate();
    const GroupSparsityConfig group = cfg_.group();
    test_ = generate_dataset(group, cfg_.M, cfg_.test, seeds_.test);
    val_ = generate_dataset(group, cfg_.M, cfg_.val, seeds_.val);
    gaussian_ = jssr::gaussian_pilots(cfg_.N, cfg_.L(), seeds_.pilots);
}

const Dataset& PointData::train() {
    if (!train_) train_ = generate_dataset(cfg_.group(), cfg_.M, cfg_.train, seeds_.train);
    return *train_;
}

std::unique_ptr<Detector> make_detector(Scheme scheme, PointData& point, std::string& note,
                                        const ProgressFn& progress) {
    const auto& cfg = point.config();
    if (scheme != Scheme::Proposed && scheme != Scheme::Naive) {
        return make_baseline_detector(scheme, cfg, point.gaussian_pilots(), point.val(), note, progress);
    }
    const FeatureKind kind = scheme == Scheme::Proposed ? FeatureKind::Covariance : FeatureKind::Raw;
    const TrainConfig tc =
        cfg.training(derive_seed(point.seeds().model, StreamDomain::Split, scheme == Scheme::Proposed ? 0 : 1));
    const std::string name = scheme_name(scheme);
    const TrainResult res = train(point.train(), point.val(), tc, cfg.decoder(kind), [&](const EpochLog& e) {
        if (progress && (e.epoch % 10 == 0 || e.epoch == 1)) {
            std::ostringstream msg;
            msg << "  " << name << " epoch " << e.epoch << " train " << e.train_loss << " val " << e.val_loss << " ("
                << e.wall_seconds << " s)";
            progress(msg.str());
        }
    });
    note = "best_epoch=" + std::to_string(res.best_epoch);
    return make_autoencoder_detector(res.best, name);
}

std::unique_ptr<Detector> make_baseline_detector(Scheme scheme, const ExperimentConfig& cfg,
                                                 const ComplexMatrix& pilots, const Dataset& val, std::string& note,
                                                 const ProgressFn& progress) {
    switch (scheme) {
    case Scheme::Lasso: {
        const SolverConfig sc = solver(cfg.lasso_iterations, cfg.solver_tolerance);
        return select_lambda(cfg, pilots, val, progress,
                             [&](double f) { return make_lasso_detector(pilots, sc, f); }, note);
    }
    case Scheme::GroupLasso: {
        const SolverConfig sc = solver(cfg.glasso_iterations, cfg.solver_tolerance);
        return select_lambda(cfg, pilots, val, progress,
                             [&](double f) { return make_group_lasso_detector(pilots, sc, f); }, note);
    }
    case Scheme::Amp:
        return make_amp_detector(pilots, AmpPrior{cfg.p, 1.0}, solver(cfg.amp_iterations, 1e-8));
    case Scheme::Ml:
        return make_ml_detector(pilots, cfg.sigma2, solver(cfg.ml_sweeps, cfg.ml_tolerance));
    case Scheme::Oracle:
        return make_oracle_detector(cfg.N);
    case Scheme::Constant:
        return make_constant_detector(pilots);
    case Scheme::Proposed:
    case Scheme::Naive:
        break;
    }
    throw ConfigError("scheme '" + scheme_name(scheme) + "' needs a trained model");
}

SweepRecord make_record(const ExperimentConfig& cfg, const std::string& scheme, const std::string& axis,
                        double axis_value) {
    SweepRecord rec;
    rec.scheme = scheme;
    rec.axis = axis;
    rec.axis_value = axis_value;
    rec.N = cfg.N;
    rec.L = cfg.L();
    rec.M = cfg.M;
    rec.p = cfg.p;
    rec.p1_over_p2 = cfg.p1_over_p2;
    rec.G = cfg.G;
    rec.sigma2 = cfg.sigma2;
    rec.seed = cfg.seed;
    return rec;
}

void evaluate_detector(const Detector& d, const Dataset& val, const Dataset& test, double sigma2, int reps,
                       SweepRecord& rec, std::optional<double> threshold) {
    if (!threshold) {
        const ScoreSet val_scores = detect_all(d, measure_all(d.pilots(), val, sigma2), val);
        threshold = calibrate_threshold(val_scores.scores, truths(val), default_grid()).threshold;
    }
    const auto Y = measure_all(d.pilots(), test, sigma2);
    const ScoreSet test_scores = detect_all(d, Y, test);
    rec.truth = truths(test);
    rec.decisions = apply_threshold(test_scores.scores, *threshold);
    rec.error_rate = error_rate(rec.truth, rec.decisions);
    rec.threshold_used = *threshold;
    rec.time_per_sample_s = time_detection(d, Y, test, reps);
    rec.test_fingerprint = fingerprint(test);
    if (test_scores.flagged > 0) {
        if (!rec.solver_flags.empty()) rec.solver_flags += ";";
        rec.solver_flags += "flagged=" + std::to_string(test_scores.flagged);
    }
}

std::vector<SweepRecord> run_point(const ExperimentConfig& cfg, const std::vector<Scheme>& schemes,
                                   const std::string& axis, double axis_value, const ProgressFn& progress) {
    PointData point(cfg);

    std::vector<SweepRecord> out;
    for (Scheme scheme : schemes) {
        SweepRecord rec = make_record(cfg, scheme_name(scheme), axis, axis_value);
        if (progress) {
            std::ostringstream msg;
            msg << rec.scheme << " @ " << axis << "=" << axis_value << " seed " << cfg.seed;
            progress(msg.str());
        }
        try {
            const auto det = make_detector(scheme, point, rec.solver_flags, progress);
            evaluate_detector(*det, point.val(), point.test(), cfg.sigma2, cfg.timing_reps, rec);
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.error_rate = std::nan("");
            rec.time_per_sample_s = std::nan("");
            rec.threshold_used = std::nan("");
            rec.solver_flags = std::string("failed: ") + e.what();
            rec.truth.clear();
            rec.decisions.clear();
            rec.test_fingerprint = fingerprint(point.test());
        }
        if (progress) {
            std::ostringstream msg;
            msg << "  -> error_rate " << rec.error_rate << " time/sample " << rec.time_per_sample_s << " s";
            progress(msg.str());
        }
        out.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

void SweepSpec::validate() const {
    base.validate();
    if (axis.empty()) throw ConfigError("sweep: no axis given");
    if (values.empty()) throw ConfigError("sweep: no axis values given");
    if (schemes.empty()) throw ConfigError("sweep: no schemes given");
    if (seeds.empty()) throw ConfigError("sweep: no seeds given");
    for (double v : values) {
        ExperimentConfig c = base;
        std::ostringstream text;
        text << std::setprecision(17) << v;
        c.set(axis, text.str());
        c.validate();
    }
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto first = item.find_first_not_of(" \t[]\"");
        const auto last = item.find_last_not_of(" \t[]\"");
        if (first != std::string::npos) out.push_back(item.substr(first, last - first + 1));
    }
    return out;
}

} // namespace

SweepSpec load_sweep_spec(const std::filesystem::path& path, const ExperimentConfig& base) {
    const IniSections sections = read_ini(path);
    SweepSpec spec;
    spec.base = base;
    apply_sections(spec.base, sections, {"sweep"});
    const auto it = sections.find("sweep");
    if (it == sections.end()) throw ConfigError("sweep spec has no [sweep] section");
    for (const auto& [key, value] : it->second) {
        if (key == "axis") {
            spec.axis = value;
        } else if (key == "values") {
            for (const auto& v : split_list(value)) spec.values.push_back(std::stod(v));
        } else if (key == "schemes") {
            for (const auto& v : split_list(value)) spec.schemes.push_back(parse_scheme(v));
        } else if (key == "seeds") {
            for (const auto& v : split_list(value)) spec.seeds.push_back(std::stoull(v));
        } else {
            throw ConfigError("unknown [sweep] key '" + key + "'");
        }
    }
    if (spec.seeds.empty()) spec.seeds.push_back(spec.base.seed);
    spec.validate();
    return spec;
}

SweepResult run_sweep(const SweepSpec& spec, const ProgressFn& progress) {
    spec.validate();
    SweepResult result;
    for (double value : spec.values) {
        for (std::uint64_t seed : spec.seeds) {
            ExperimentConfig cfg = spec.base;
            std::ostringstream text;
            text << std::setprecision(17) << value;
            cfg.set(spec.axis, text.str());
            cfg.seed = seed;
            auto rows = run_point(cfg, spec.schemes, spec.axis, value, progress);
            std::move(rows.begin(), rows.end(), std::back_inserter(result.records));
        }
    }
    result.audit_failures = audit_records(result.records);
    return result;
}

std::vector<std::string> audit_records(const std::vector<SweepRecord>& records) {
    std::vector<std::string> failures;
    std::map<std::pair<double, std::uint64_t>, std::uint64_t> prints;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const std::string where = "row " + std::to_string(i) + " (" + r.scheme + ")";
        const auto key = std::make_pair(r.axis_value, r.seed);
        const auto [it, inserted] = prints.emplace(key, r.test_fingerprint);
        if (!inserted && it->second != r.test_fingerprint) failures.push_back(where + ": test set differs across schemes");
        if (r.failed) continue;
        if (!(r.error_rate >= 0.0 && r.error_rate <= 1.0)) failures.push_back(where + ": error rate outside [0, 1]");
        if (!(r.time_per_sample_s > 0.0)) failures.push_back(where + ": non-positive time");
        if (r.decisions.empty() || error_rate(r.truth, r.decisions) != r.error_rate) {
            failures.push_back(where + ": error rate does not match stored decisions");
        }
    }
    return failures;
}

std::vector<Aggregate> aggregate(const std::vector<SweepRecord>& records) {
    std::map<std::pair<std::string, double>, std::vector<const SweepRecord*>> groups;
    std::vector<std::pair<std::string, double>> order;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.scheme, r.axis_value);
        if (!groups.contains(key)) order.push_back(key);
        groups[key].push_back(&r);
    }
    std::vector<Aggregate> out;
    for (const auto& key : order) {
        Aggregate a;
        a.scheme = key.first;
        a.axis_value = key.second;
        std::vector<double> errs;
        for (const auto* r : groups[key]) {
            if (r->failed) {
                ++a.failed;
            } else {
                errs.push_back(r->error_rate);
            }
        }
        a.seeds = static_cast<int>(errs.size());
        if (errs.empty()) {
            a.mean_error = std::nan("");
            a.std_error = std::nan("");
        } else {
            double sum = 0.0;
            for (double e : errs) sum += e;
            a.mean_error = sum / static_cast<double>(errs.size());
            if (errs.size() > 1) {
                double ss = 0.0;
                for (double e : errs) ss += (e - a.mean_error) * (e - a.mean_error);
                a.std_error = std::sqrt(ss / static_cast<double>(errs.size() - 1) / static_cast<double>(errs.size()));
            }
        }
        out.push_back(a);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV and decision sidecar

namespace {

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "schema_version", "scheme", "axis", "axis_value", "N", "L", "L_over_N", "M", "p", "p1_over_p2", "G",
        "sigma2", "seed", "error_rate", "time_per_sample_s", "threshold_used", "solver_flags"};
    return cols;
}

std::string num(double v, int precision = 10) {
    std::ostringstream out;
    out << std::setprecision(precision) << v;
    return out.str();
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string bits(const std::vector<ActivityVector>& v) {
    std::string s;
    for (const auto& a : v) {
        for (auto x : a.values) s += x ? '1' : '0';
    }
    return s;
}

std::vector<ActivityVector> unbits(const std::string& s, Index N) {
    if (N < 1 || s.size() % static_cast<std::size_t>(N) != 0) throw FormatError("decision string length");
    std::vector<ActivityVector> out;
    for (std::size_t i = 0; i < s.size(); i += static_cast<std::size_t>(N)) {
        ActivityVector a(N);
        for (Index n = 0; n < N; ++n) {
            const char c = s[i + static_cast<std::size_t>(n)];
            if (c != '0' && c != '1') throw FormatError("decision string is not binary");
            a[n] = c == '1' ? 1 : 0;
        }
        out.push_back(std::move(a));
    }
    return out;
}

} // namespace

std::string csv_header() {
    std::string h;
    for (const auto& c : csv_columns()) h += (h.empty() ? "" : ",") + c;
    return h;
}

std::string csv_row(const SweepRecord& r) {
    const double l_over_n = static_cast<double>(r.L) / static_cast<double>(r.N);
    std::ostringstream out;
    out << kCsvSchemaVersion << ',' << r.scheme << ',' << r.axis << ',' << num(r.axis_value) << ',' << r.N << ','
        << r.L << ',' << num(l_over_n) << ',' << r.M << ',' << num(r.p) << ',' << num(r.p1_over_p2) << ',' << r.G
        << ',' << num(r.sigma2) << ',' << r.seed << ',' << num(r.error_rate, 17) << ','
        << num(r.time_per_sample_s) << ',' << num(r.threshold_used) << ',' << quote(r.solver_flags);
    return out.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out << csv_header() << '\n';
    for (const auto& r : records) out << csv_row(r) << '\n';
}

std::vector<SweepRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != csv_header()) throw FormatError("unexpected CSV header in " + path.string());
    std::vector<SweepRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != csv_columns().size()) throw FormatError("CSV row has the wrong number of fields");
        if (std::stoi(f[0]) != kCsvSchemaVersion) throw FormatError("unsupported CSV schema version");
        SweepRecord r;
        r.scheme = f[1];
        r.axis = f[2];
        r.axis_value = std::stod(f[3]);
        r.N = std::stoll(f[4]);
        r.L = std::stoll(f[5]);
        r.M = std::stoll(f[7]);
        r.p = std::stod(f[8]);
        r.p1_over_p2 = std::stod(f[9]);
        r.G = std::stoll(f[10]);
        r.sigma2 = std::stod(f[11]);
        r.seed = std::stoull(f[12]);
        r.error_rate = std::stod(f[13]);
        r.time_per_sample_s = std::stod(f[14]);
        r.threshold_used = std::stod(f[15]);
        r.solver_flags = f[16];
        r.failed = r.solver_flags.rfind("failed", 0) == 0;
        out.push_back(std::move(r));
    }
    return out;
}

void write_decisions(const std::filesystem::path& path, const std::vector<SweepRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.failed) continue;
        const nlohmann::json line = {{"row", i}, {"scheme", r.scheme}, {"N", r.N},
                                     {"truth", bits(r.truth)}, {"decisions", bits(r.decisions)}};
        out << line.dump() << '\n';
    }
}

std::vector<std::string> verify_decisions(const std::filesystem::path& csv, const std::filesystem::path& decisions) {
    const auto rows = read_csv(csv);
    std::ifstream in(decisions);
    if (!in) throw FormatError("cannot open " + decisions.string());
    std::vector<std::string> failures;
    std::vector<bool> seen(rows.size(), false);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const auto row = j.at("row").get<std::size_t>();
        if (row >= rows.size()) {
            failures.push_back("decision row " + std::to_string(row) + " has no CSV row");
            continue;
        }
        seen[row] = true;
        const Index N = j.at("N").get<Index>();
        const auto truth = unbits(j.at("truth").get<std::string>(), N);
        const auto est = unbits(j.at("decisions").get<std::string>(), N);
        const double recomputed = error_rate(truth, est);
        if (j.at("scheme").get<std::string>() != rows[row].scheme || recomputed != rows[row].error_rate) {
            failures.push_back("row " + std::to_string(row) + ": CSV error rate " + num(rows[row].error_rate, 17) +
                               " vs recomputed " + num(recomputed, 17));
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!seen[i] && !rows[i].failed) failures.push_back("row " + std::to_string(i) + ": no stored decisions");
    }
    return failures;
}

} // namespace jssr
