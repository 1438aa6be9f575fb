// SPDX-License-Identifier: Apache-2.0
#include "jssr/checkpoint.hpp"

#include "jssr/dataset_io.hpp"
#include "jssr/error.hpp"

#include "json.hpp"

#include <fstream>

namespace jssr {

namespace {

const char* feature_name(FeatureKind k) { return k == FeatureKind::Covariance ? "covariance" : "raw"; }

FeatureKind parse_feature(const std::string& s) {
    if (s == "covariance") return FeatureKind::Covariance;
    if (s == "raw") return FeatureKind::Raw;
    throw FormatError("unknown decoder feature kind '" + s + "'");
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : params.decoder.layers) {
        layers.push_back({layer.weight.rows(), layer.weight.cols()});
    }
    nlohmann::json header = {
        {"format", "jssr-checkpoint"}, {"version", kCheckpointFormatVersion},
        {"N", params.arch.N}, {"L", params.arch.L}, {"M", params.arch.M},
        {"V", params.arch.hidden_layers}, {"Q", params.arch.hidden_width()},
        {"features", feature_name(params.arch.features)}, {"sigma2", params.sigma2},
        {"threshold", params.threshold ? nlohmann::json(*params.threshold) : nlohmann::json(nullptr)},
        {"seed", params.seed}, {"layers", layers}};

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out << header.dump() << '\n';
    detail::write_row_major(out, params.encoder.re);
    detail::write_row_major(out, params.encoder.im);
    for (const auto& layer : params.decoder.layers) {
        detail::write_row_major(out, layer.weight);
        detail::write_f64(out, {layer.bias.data(), static_cast<std::size_t>(layer.bias.size())});
    }
    if (!out) throw FormatError("write failed: " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("checkpoint header is not JSON: " + std::string(e.what()));
    }
    if (h.value("format", "") != "jssr-checkpoint") throw FormatError("not a jssr checkpoint");
    if (h.at("version").get<int>() != kCheckpointFormatVersion) throw FormatError("unsupported checkpoint version");

    ModelParams p;
    p.arch.N = h.at("N").get<Index>();
    p.arch.L = h.at("L").get<Index>();
    p.arch.M = h.at("M").get<Index>();
    p.arch.hidden_layers = h.at("V").get<int>();
    p.arch.width = h.at("Q").get<Index>();
    p.arch.features = parse_feature(h.at("features").get<std::string>());
    p.arch.validate();
    p.sigma2 = h.at("sigma2").get<double>();
    if (!h.at("threshold").is_null()) p.threshold = h.at("threshold").get<double>();
    p.seed = h.at("seed").get<std::uint64_t>();

    p.encoder.re.resize(p.arch.L, p.arch.N);
    p.encoder.im.resize(p.arch.L, p.arch.N);
    detail::read_row_major(in, p.encoder.re);
    detail::read_row_major(in, p.encoder.im);
    const auto& layers = h.at("layers");
    if (layers.size() != static_cast<std::size_t>(p.arch.hidden_layers + 1)) {
        throw FormatError("checkpoint layer count does not match V");
    }
    for (const auto& shape : layers) {
        DenseLayer layer{Eigen::MatrixXd(shape.at(0).get<Index>(), shape.at(1).get<Index>()), {}};
        layer.bias.resize(layer.weight.rows());
        detail::read_row_major(in, layer.weight);
        detail::read_f64(in, {layer.bias.data(), static_cast<std::size_t>(layer.bias.size())});
        p.decoder.layers.push_back(std::move(layer));
    }
    if (p.decoder.layers.front().weight.cols() != p.arch.input_width() ||
        p.decoder.layers.back().weight.rows() != p.arch.N) {
        throw FormatError("checkpoint layer shapes do not match the declared architecture");
    }
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after checkpoint payload");
    return p;
}

} // namespace jssr
