// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jssr/autoencoder.hpp"
#include "jssr/baselines.hpp"
#include "jssr/signal_model.hpp"
#include "jssr/training.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace jssr {

inline constexpr int kConfigFormatVersion = 1;

/// One experiment point. Serialized as flat key/value pairs in sections
/// ([config] [signal] [samples] [autoencoder] [baselines] [timing]).
struct ExperimentConfig {
    std::string name = "desk";

    // [signal]
    Index N = 100;
    Index G = 10;
    double p = 0.1;
    double p1_over_p2 = 3.0;
    Index M = 4;
    double L_over_N = 0.14;
    double sigma2 = 0.1;

    // [samples]
    Index train = 20000;
    Index val = 2000;
    Index test = 2000;
    std::uint64_t seed = 1;

    // [autoencoder]
    int V = 1;
    Index Q = 0;  // 0 selects 2N
    double lr = 1e-3;
    Index batch = 128;
    int epochs = 200;
    int patience = 20;

    // [baselines]
    Index lambda_val = 1000;
    int lambda_k_min = -10;
    int lasso_iterations = 2000;
    int glasso_iterations = 1000;
    double solver_tolerance = 1e-6;
    int amp_iterations = 50;
    int ml_sweeps = 15;
    double ml_tolerance = 1e-6;

    // [timing]
    int timing_reps = 5;

    Index L() const;
    GroupSparsityConfig group() const { return GroupSparsityConfig::from_mean(N, G, p, p1_over_p2); }
    DecoderConfig decoder(FeatureKind features) const;
    TrainConfig training(std::uint64_t train_seed) const;
    void validate() const;

    /// Set a value by its config key ("N", "L_over_N", "p", ...). Throws on unknown keys.
    void set(const std::string& key, const std::string& value);
    /// Current value of a numeric key, formatted for CSV/sweep bookkeeping.
    double get(const std::string& key) const;
};

using IniSections = std::map<std::string, std::map<std::string, std::string>>;

/// Parse a flat INI/TOML-style file ("[section]" headers, "key = value" lines).
IniSections read_ini(const std::filesystem::path& path);

/// Apply every section except those listed in `skip`. Section names must
/// match the key's home section.
void apply_sections(ExperimentConfig& cfg, const IniSections& sections, const std::vector<std::string>& skip = {});

/// "desk" (N = 100 scale) or "paper-full" (N = 500 scale).
ExperimentConfig named_config(const std::string& name);
std::vector<std::string> named_config_names();

/// Apply a config file on top of `base`. Unknown sections or keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

} // namespace jssr
