// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jssr/signal_model.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>

namespace jssr {

inline constexpr int kDatasetFormatVersion = 1;

/// Dataset file: one line of compact JSON
/// {"format","version","N","M","G","p1","p2","sigma2","count","seed","layout"}
/// then, per sample, X.re (N x M), X.im (N x M) and alpha (N) as float64
/// little-endian, matrices row-major.
struct DatasetFile {
    Dataset data;
    double sigma2 = 0.0;
};

void write_dataset(const std::filesystem::path& path, const Dataset& ds, double sigma2);

/// Generate and write without holding more than `chunk` samples in memory.
void write_generated_dataset(const std::filesystem::path& path, const GroupSparsityConfig& cfg, Index M, Index count,
                             std::uint64_t seed, double sigma2, Index chunk = kDefaultChunk);

DatasetFile read_dataset(const std::filesystem::path& path);

namespace detail {
void write_f64(std::ostream& out, std::span<const double> values);
void read_f64(std::istream& in, std::span<double> values);
void write_row_major(std::ostream& out, const Eigen::MatrixXd& m);
void read_row_major(std::istream& in, Eigen::MatrixXd& m);
} // namespace detail

} // namespace jssr
