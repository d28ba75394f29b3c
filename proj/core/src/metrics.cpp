#include "shepherd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shepherd/errors.hpp"

namespace shepherd {

void validate_curve(std::span<const CurvePoint> curve) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!(curve[i].success >= 0.0 && curve[i].success <= 100.0))
            throw DomainError("curve: success outside [0, 100] at sample " + std::to_string(i));
        if (i > 0 && curve[i].iteration <= curve[i - 1].iteration)
            throw DomainError("curve: iterations not strictly increasing at sample " + std::to_string(i));
    }
}

double curve_auc(std::span<const CurvePoint> curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto width = static_cast<double>(curve[i].iteration - curve[i - 1].iteration);
        area += 0.5 * width * (curve[i].success + curve[i - 1].success);
    }
    return area;
}

std::optional<double> transfer_rate(std::span<const CurvePoint> with, std::span<const CurvePoint> without) {
    if (with.size() != without.size()) throw DomainError("transfer_rate: curves have different lengths");
    for (std::size_t i = 0; i < with.size(); ++i) {
        if (with[i].iteration != without[i].iteration)
            throw DomainError("transfer_rate: curves sampled on different iteration grids");
    }
    const double base = curve_auc(without);
    if (base == 0.0) return std::nullopt;
    return (curve_auc(with) - base) / base;
}

double jumpstart(std::span<const CurvePoint> curve, double window_fraction) {
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw DomainError("jumpstart: window fraction must be in (0, 1]");
    const auto n = static_cast<std::size_t>(
        std::ceil(window_fraction * static_cast<double>(curve.size()) - 1e-9));
    if (n < 2) throw DomainError("jumpstart: window holds fewer than two samples");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += curve[i].success;
    return sum / static_cast<double>(n);
}

std::int64_t convergence_iteration(std::span<const CurvePoint> curve, double tolerance, int smooth_window) {
    if (curve.empty()) throw DomainError("convergence_iteration: empty curve");
    if (smooth_window < 1) throw DomainError("convergence_iteration: window must be positive");
    const std::size_t n = curve.size();
    const auto w = static_cast<std::size_t>(smooth_window);
    std::vector<double> avg(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += curve[i].success;
        if (i >= w) sum -= curve[i - w].success;
        avg[i] = sum / static_cast<double>(std::min(i + 1, w));
    }
    const double final_value = avg.back();
    std::size_t first = n - 1;
    while (first > 0 && std::abs(avg[first - 1] - final_value) <= tolerance) --first;
    return curve[first].iteration;
}

}  // namespace shepherd
