// SPDX-License-Identifier: Apache-2.0
#include "jssr/dataset_io.hpp"

#include "jssr/error.hpp"

#include "json.hpp"

#include <bit>
#include <fstream>
#include <string>
#include <vector>

namespace jssr {

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

namespace detail {

void write_f64(std::ostream& out, std::span<const double> values) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
}

void read_f64(std::istream& in, std::span<double> values) {
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    if (!in) throw FormatError("unexpected end of file while reading float64 payload");
}

void write_row_major(std::ostream& out, const Eigen::MatrixXd& m) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    write_f64(out, {rm.data(), static_cast<std::size_t>(rm.size())});
}

void read_row_major(std::istream& in, Eigen::MatrixXd& m) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(m.rows(), m.cols());
    read_f64(in, {rm.data(), static_cast<std::size_t>(rm.size())});
    m = rm;
}

} // namespace detail

namespace {

nlohmann::json dataset_header(const GroupSparsityConfig& cfg, Index M, Index count, std::uint64_t seed,
                              double sigma2) {
    return {{"format", "jssr-dataset"}, {"version", kDatasetFormatVersion},
            {"N", cfg.N}, {"M", M}, {"G", cfg.G}, {"p1", cfg.p1}, {"p2", cfg.p2},
            {"sigma2", sigma2}, {"count", count}, {"seed", seed}, {"layout", "row-major"}};
}

void write_sample(std::ostream& out, const JointSignal& s) {
    detail::write_row_major(out, s.X.re);
    detail::write_row_major(out, s.X.im);
    std::vector<double> alpha(s.activity.values.begin(), s.activity.values.end());
    detail::write_f64(out, alpha);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    return out;
}

} // namespace

void write_dataset(const std::filesystem::path& path, const Dataset& ds, double sigma2) {
    auto out = open_for_write(path);
    out << dataset_header(ds.cfg, ds.M, ds.size(), ds.seed, sigma2).dump() << '\n';
    for (const auto& s : ds.samples) write_sample(out, s);
    if (!out) throw FormatError("write failed: " + path.string());
}

void write_generated_dataset(const std::filesystem::path& path, const GroupSparsityConfig& cfg, Index M, Index count,
                             std::uint64_t seed, double sigma2, Index chunk) {
    if (count < 1) throw ConfigError("dataset count must be at least 1");
    auto out = open_for_write(path);
    out << dataset_header(cfg, M, count, seed, sigma2).dump() << '\n';
    generate_chunks(cfg, M, count, seed, chunk, [&](Index, std::vector<JointSignal>& part) {
        for (const auto& s : part) write_sample(out, s);
    });
    if (!out) throw FormatError("write failed: " + path.string());
}

DatasetFile read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("dataset header is not JSON: " + std::string(e.what()));
    }
    if (header.value("format", "") != "jssr-dataset") throw FormatError("not a jssr dataset file");
    if (header.at("version").get<int>() != kDatasetFormatVersion) throw FormatError("unsupported dataset version");

    DatasetFile file;
    auto& ds = file.data;
    ds.cfg = {header.at("N").get<Index>(), header.at("G").get<Index>(), header.at("p1").get<double>(),
              header.at("p2").get<double>()};
    ds.cfg.validate();
    ds.M = header.at("M").get<Index>();
    ds.seed = header.at("seed").get<std::uint64_t>();
    file.sigma2 = header.at("sigma2").get<double>();
    const auto count = header.at("count").get<Index>();
    ds.samples.resize(static_cast<std::size_t>(count));
    std::vector<double> alpha(static_cast<std::size_t>(ds.cfg.N));
    for (auto& s : ds.samples) {
        s.X = ComplexMatrix(ds.cfg.N, ds.M);
        detail::read_row_major(in, s.X.re);
        detail::read_row_major(in, s.X.im);
        detail::read_f64(in, alpha);
        s.activity = ActivityVector(ds.cfg.N);
        for (std::size_t n = 0; n < alpha.size(); ++n) {
            if (alpha[n] != 0.0 && alpha[n] != 1.0) throw FormatError("activity entry is not binary");
            s.activity.values[n] = alpha[n] == 1.0 ? 1 : 0;
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after dataset payload");
    return file;
}

} // namespace jssr
