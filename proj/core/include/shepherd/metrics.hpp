#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shepherd {

struct CurvePoint {
    std::int64_t iteration = 0;
    double success = 0.0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

using LearningCurve = std::vector<CurvePoint>;

/// Throws DomainError unless iterations strictly increase and every success
/// value lies in [0, 100].
void validate_curve(std::span<const CurvePoint> curve);

/// Trapezoidal area under the curve over its sampled iterations.
double curve_auc(std::span<const CurvePoint> curve);

/// (AUC_with - AUC_without) / AUC_without. Both curves must share the same
/// iteration grid (DomainError otherwise). nullopt when AUC_without is 0.
std::optional<double> transfer_rate(std::span<const CurvePoint> with, std::span<const CurvePoint> without);

/// Mean success over the first ceil(fraction * n) samples. Throws DomainError
/// when that window holds fewer than two samples.
double jumpstart(std::span<const CurvePoint> curve, double window_fraction = 0.05);

/// First sampled iteration after which the trailing moving average (window
/// `smooth_window` samples) stays within `tolerance` points of its final
/// value. Throws DomainError on an empty curve.
std::int64_t convergence_iteration(std::span<const CurvePoint> curve, double tolerance = 2.0,
                                   int smooth_window = 20);

}  // namespace shepherd
