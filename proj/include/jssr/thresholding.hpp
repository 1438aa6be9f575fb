// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jssr/signal_model.hpp"

#include <span>
#include <vector>

namespace jssr {

/// Candidate thresholds, strictly increasing inside [0, 1].
struct ThresholdGrid {
    std::vector<double> points;

    void validate() const;
    /// {0.01, 0.02, ..., 0.99}.
    static ThresholdGrid uniform_default();
};

/// alpha_hat(n) = 1 iff score(n) >= r.
ActivityVector apply_threshold(const Eigen::VectorXd& scores, double r);

/// Apply to every column of an N x T score matrix.
std::vector<ActivityVector> apply_threshold(const Eigen::MatrixXd& scores, double r);

/// Mean per-device Hamming error over T samples.
double error_rate(std::span<const ActivityVector> truth, std::span<const ActivityVector> estimate);

/// Error rate of thresholding `scores` (N x T) at r.
double error_rate_at(const Eigen::MatrixXd& scores, std::span<const ActivityVector> truth, double r);

struct Calibration {
    double threshold = 0.0;
    double error_rate = 0.0;
};

/// Grid point minimizing the error rate; ties go to the smallest r.
Calibration calibrate_threshold(const Eigen::MatrixXd& scores, std::span<const ActivityVector> truth,
                                const ThresholdGrid& grid = ThresholdGrid::uniform_default());

} // namespace jssr
