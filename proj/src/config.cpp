// SPDX-License-Identifier: Apache-2.0
#include "jssr/config.hpp"

#include "jssr/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace jssr {

namespace {

struct Field {
    const char* section;
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
T parse_as(const std::string& key, const std::string& text) {
    std::istringstream in(text);
    T value{};
    in >> value;
    if (in.fail() || !(in >> std::ws).eof()) throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
    return value;
}

template <class T>
std::string format(const T& v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

template <class T>
Field field(const char* section, const char* key, T ExperimentConfig::*member) {
    return {section, key,
            [member, key](ExperimentConfig& c, const std::string& v) { c.*member = parse_as<T>(key, v); },
            [member](const ExperimentConfig& c) { return format(c.*member); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"config", "name", [](ExperimentConfig& c, const std::string& v) { c.name = v; },
         [](const ExperimentConfig& c) { return c.name; }},
        field("signal", "N", &ExperimentConfig::N),
        field("signal", "G", &ExperimentConfig::G),
        field("signal", "p", &ExperimentConfig::p),
        field("signal", "p1_over_p2", &ExperimentConfig::p1_over_p2),
        field("signal", "M", &ExperimentConfig::M),
        field("signal", "L_over_N", &ExperimentConfig::L_over_N),
        field("signal", "sigma2", &ExperimentConfig::sigma2),
        field("samples", "train", &ExperimentConfig::train),
        field("samples", "val", &ExperimentConfig::val),
        field("samples", "test", &ExperimentConfig::test),
        field("samples", "seed", &ExperimentConfig::seed),
        field("autoencoder", "V", &ExperimentConfig::V),
        field("autoencoder", "Q", &ExperimentConfig::Q),
        field("autoencoder", "lr", &ExperimentConfig::lr),
        field("autoencoder", "batch", &ExperimentConfig::batch),
        field("autoencoder", "epochs", &ExperimentConfig::epochs),
        field("autoencoder", "patience", &ExperimentConfig::patience),
        field("baselines", "lambda_val", &ExperimentConfig::lambda_val),
        field("baselines", "lambda_k_min", &ExperimentConfig::lambda_k_min),
        field("baselines", "lasso_iterations", &ExperimentConfig::lasso_iterations),
        field("baselines", "glasso_iterations", &ExperimentConfig::glasso_iterations),
        field("baselines", "solver_tolerance", &ExperimentConfig::solver_tolerance),
        field("baselines", "amp_iterations", &ExperimentConfig::amp_iterations),
        field("baselines", "ml_sweeps", &ExperimentConfig::ml_sweeps),
        field("baselines", "ml_tolerance", &ExperimentConfig::ml_tolerance),
        field("timing", "reps", &ExperimentConfig::timing_reps),
    };
    return table;
}

const Field& lookup(const std::string& key) {
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    return *it;
}

} // namespace

Index ExperimentConfig::L() const {
    return static_cast<Index>(std::llround(L_over_N * static_cast<double>(N)));
}

DecoderConfig ExperimentConfig::decoder(FeatureKind features) const {
    DecoderConfig d;
    d.L = L();
    d.N = N;
    d.M = M;
    d.hidden_layers = V;
    d.width = Q;
    d.features = features;
    return d;
}

TrainConfig ExperimentConfig::training(std::uint64_t train_seed) const {
    TrainConfig t;
    t.adam.lr = lr;
    t.batch = batch;
    t.epochs = epochs;
    t.patience = patience;
    t.seed = train_seed;
    t.sigma2 = sigma2;
    return t;
}

void ExperimentConfig::validate() const {
    group().validate();
    if (M < 1) throw ConfigError("M must be positive");
    if (L() < 1) throw ConfigError("L_over_N * N rounds to zero measurements");
    if (sigma2 < 0.0) throw ConfigError("sigma2 must be non-negative");
    if (train < 1 || val < 1 || test < 1) throw ConfigError("sample counts must be positive");
    if (lambda_val < 1) throw ConfigError("lambda_val must be positive");
    if (timing_reps < 1) throw ConfigError("timing reps must be positive");
    decoder(FeatureKind::Covariance).validate();
    training(seed).validate();
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    lookup(key).set(*this, value);
}

double ExperimentConfig::get(const std::string& key) const {
    if (key == "name") throw ConfigError("'name' is not numeric");
    return parse_as<double>(key, lookup(key).get(*this));
}

ExperimentConfig named_config(const std::string& name) {
    ExperimentConfig c;
    if (name == "desk") {
        c.name = "desk";
        return c;
    }
    if (name == "paper-full") {
        c.name = "paper-full";
        c.N = 500;
        c.G = 50;
        c.train = 90000;
        c.val = 10000;
        c.test = 10000;
        return c;
    }
    throw ConfigError("unknown named config '" + name + "'");
}

std::vector<std::string> named_config_names() { return {"desk", "paper-full"}; }

IniSections read_ini(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    IniSections out;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("top-level key '" + section + "' outside any section");
        auto& dst = out[section];
        for (const auto& [key, value] : body) {
            std::string v = value.get_value<std::string>();
            if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
            dst[key] = v;
        }
    }
    return out;
}

void apply_sections(ExperimentConfig& cfg, const IniSections& sections, const std::vector<std::string>& skip) {
    for (const auto& [section, entries] : sections) {
        if (std::find(skip.begin(), skip.end(), section) != skip.end()) continue;
        for (const auto& [key, value] : entries) {
            if (section == "config" && key == "version") {
                if (parse_as<int>(key, value) != kConfigFormatVersion) throw ConfigError("unsupported config version");
                continue;
            }
            const Field& f = lookup(key);
            if (section != f.section) {
                throw ConfigError("key '" + key + "' belongs in [" + f.section + "], found in [" + section + "]");
            }
            f.set(cfg, value);
        }
    }
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    apply_sections(base, read_ini(path));
    base.validate();
    return base;
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    std::string current;
    out << "[config]\nversion = " << kConfigFormatVersion << '\n';
    current = "config";
    for (const auto& f : fields()) {
        if (current != f.section) {
            current = f.section;
            out << "\n[" << current << "]\n";
        }
        out << f.key << " = " << f.get(cfg) << '\n';
    }
}

} // namespace jssr
