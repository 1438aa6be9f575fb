// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jssr/autoencoder.hpp"

#include <filesystem>

namespace jssr {

inline constexpr int kCheckpointFormatVersion = 1;

/// Checkpoint file: one line of compact JSON
/// {"format","version","N","L","M","V","Q","features","sigma2","threshold","seed","layers"}
/// then float64 little-endian arrays: Re(A), Im(A), and per decoder layer
/// weight then bias. Matrices are stored row-major.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& path);

} // namespace jssr
