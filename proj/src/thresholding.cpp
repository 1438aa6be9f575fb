// SPDX-License-Identifier: Apache-2.0
#include "jssr/thresholding.hpp"

#include "jssr/error.hpp"

#include <algorithm>
#include <string>

namespace jssr {

void ThresholdGrid::validate() const {
    if (points.empty()) throw ConfigError("threshold grid is empty");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i] < 0.0 || points[i] > 1.0) throw ConfigError("threshold grid point outside [0, 1]");
        if (i > 0 && !(points[i] > points[i - 1])) throw ConfigError("threshold grid must be strictly increasing");
    }
}

ThresholdGrid ThresholdGrid::uniform_default() {
    ThresholdGrid g;
    for (int k = 1; k <= 99; ++k) g.points.push_back(k / 100.0);
    return g;
}

ActivityVector apply_threshold(const Eigen::VectorXd& scores, double r) {
    ActivityVector out(scores.size());
    for (Index n = 0; n < scores.size(); ++n) out[n] = scores(n) >= r ? 1 : 0;
    return out;
}

std::vector<ActivityVector> apply_threshold(const Eigen::MatrixXd& scores, double r) {
    std::vector<ActivityVector> out;
    out.reserve(static_cast<std::size_t>(scores.cols()));
    for (Index t = 0; t < scores.cols(); ++t) out.push_back(apply_threshold(Eigen::VectorXd(scores.col(t)), r));
    return out;
}

double error_rate(std::span<const ActivityVector> truth, std::span<const ActivityVector> estimate) {
    if (truth.size() != estimate.size()) throw DimensionError("error_rate: sample counts differ");
    if (truth.empty()) throw DimensionError("error_rate: no samples");
    double total = 0.0;
    for (std::size_t t = 0; t < truth.size(); ++t) {
        const auto& a = truth[t].values;
        const auto& b = estimate[t].values;
        if (a.size() != b.size() || a.empty()) throw DimensionError("error_rate: vector lengths differ");
        std::size_t wrong = 0;
        for (std::size_t n = 0; n < a.size(); ++n) {
            if (a[n] > 1 || b[n] > 1) throw ConfigError("error_rate: entries must be binary");
            wrong += a[n] != b[n];
        }
        total += static_cast<double>(wrong) / static_cast<double>(a.size());
    }
    return total / static_cast<double>(truth.size());
}

double error_rate_at(const Eigen::MatrixXd& scores, std::span<const ActivityVector> truth, double r) {
    if (static_cast<std::size_t>(scores.cols()) != truth.size()) throw DimensionError("error_rate_at: sample counts");
    if (truth.empty()) throw DimensionError("error_rate_at: no samples");
    double total = 0.0;
    for (Index t = 0; t < scores.cols(); ++t) {
        const auto& a = truth[static_cast<std::size_t>(t)];
        if (a.size() != scores.rows()) throw DimensionError("error_rate_at: vector lengths differ");
        Index wrong = 0;
        for (Index n = 0; n < scores.rows(); ++n) wrong += (scores(n, t) >= r ? 1 : 0) != a[n];
        total += static_cast<double>(wrong) / static_cast<double>(scores.rows());
    }
    return total / static_cast<double>(scores.cols());
}

Calibration calibrate_threshold(const Eigen::MatrixXd& scores, std::span<const ActivityVector> truth,
                                const ThresholdGrid& grid) {
    grid.validate();
    if (truth.empty() || scores.cols() == 0) throw ConfigError("calibrate_threshold: empty batch");
    Calibration best{grid.points.front(), error_rate_at(scores, truth, grid.points.front())};
    for (std::size_t i = 1; i < grid.points.size(); ++i) {
        const double e = error_rate_at(scores, truth, grid.points[i]);
        if (e < best.error_rate) best = {grid.points[i], e};
    }
    return best;
}

} // namespace jssr
