#include "shepherd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shepherd/errors.hpp"

namespace shepherd {

namespace {

constexpr double kZeroLength = 1e-12;

constexpr std::array<std::string_view, kMoveCount> kMoveNames = {
    "Skip", "North", "NorthEast", "East", "SouthEast", "South", "SouthWest", "West", "NorthWest",
};

}  // namespace

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

double distance(Vec2 a, Vec2 b) { return norm(a - b); }

std::optional<Vec2> unit(Vec2 v) {
    const double n = norm(v);
    if (n < kZeroLength) return std::nullopt;
    return Vec2{v.x / n, v.y / n};
}

Vec2 rotate(Vec2 v, double degrees) {
    const double r = degrees * std::numbers::pi / 180.0;
    const double c = std::cos(r);
    const double s = std::sin(r);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double vertex_angle_deg(Vec2 vertex, Vec2 a, Vec2 b) {
    const Vec2 u = a - vertex;
    const Vec2 v = b - vertex;
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu < kZeroLength || nv < kZeroLength) return 0.0;
    // atan2 of cross/dot is accurate near 0 and 180 degrees, unlike acos.
    const double cross = u.x * v.y - u.y * v.x;
    const double angle = std::atan2(std::abs(cross), dot(u, v)) * 180.0 / std::numbers::pi;
    return std::clamp(angle, 0.0, 180.0);
}

double angular_distance_deg(double a, double b) {
    double d = std::fmod(std::abs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

MoveAction move_from_index(int index) {
    if (index < 0 || index >= kMoveCount) {
        throw DomainError("move index out of range: " + std::to_string(index));
    }
    return static_cast<MoveAction>(index);
}

std::string_view to_string(MoveAction m) { return kMoveNames[static_cast<std::size_t>(m)]; }

std::optional<MoveAction> parse_move(std::string_view name) {
    for (int i = 0; i < kMoveCount; ++i) {
        if (kMoveNames[static_cast<std::size_t>(i)] == name) return static_cast<MoveAction>(i);
    }
    return std::nullopt;
}

MoveAction quantize_nearest(Vec2 v) {
    MoveAction best = MoveAction::Skip;
    double best_d = norm(v);
    for (MoveAction m : kAllMoves) {
        const double d = distance(v, Vec2{displacement(m)});
        if (d < best_d) {
            best_d = d;
            best = m;
        }
    }
    return best;
}

MoveAction quantize_direction(Vec2 v) {
    if (norm(v) < kZeroLength) return MoveAction::Skip;
    const double heading = std::atan2(v.y, v.x) * 180.0 / std::numbers::pi;
    MoveAction best = MoveAction::Skip;
    double best_d = 1e9;
    for (int i = 1; i < kMoveCount; ++i) {
        const MoveAction m = static_cast<MoveAction>(i);
        const Cell d = displacement(m);
        const double h = std::atan2(static_cast<double>(d.y), static_cast<double>(d.x)) * 180.0 /
                         std::numbers::pi;
        const double diff = angular_distance_deg(heading, h);
        if (diff < best_d - 1e-9) {
            best_d = diff;
            best = m;
        }
    }
    return best;
}

double chebyshev(Cell a, Cell b) {
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

}  // namespace shepherd
