#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace shepherd {

/// Integer grid coordinate. North is +y.
struct Cell {
    int x = 0;
    int y = 0;

    friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
    friend constexpr Cell operator+(Cell a, Cell b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Cell operator-(Cell a, Cell b) { return {a.x - b.x, a.y - b.y}; }
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}
    constexpr explicit Vec2(Cell c) : x(c.x), y(c.y) {}

    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    constexpr Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
};

double dot(Vec2 a, Vec2 b);
double norm(Vec2 v);
double distance(Vec2 a, Vec2 b);
/// Unit vector along v, or nullopt when v is (numerically) zero.
std::optional<Vec2> unit(Vec2 v);
/// Rotates v counter-clockwise by the given angle in degrees.
Vec2 rotate(Vec2 v, double degrees);

/// Angle in degrees, in [0, 180], at `vertex` between rays vertex->a and
/// vertex->b. Degenerate geometry (either ray of zero length) yields 0.
double vertex_angle_deg(Vec2 vertex, Vec2 a, Vec2 b);

/// Smallest absolute difference between two directions, in degrees [0, 180].
double angular_distance_deg(double a, double b);

/// Inclusive axis-aligned cell rectangle.
struct Rect {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    friend constexpr bool operator==(const Rect&, const Rect&) = default;

    constexpr bool contains(Cell c) const {
        return c.x >= x_min && c.x <= x_max && c.y >= y_min && c.y <= y_max;
    }
    constexpr int width() const { return x_max - x_min + 1; }
    constexpr int height() const { return y_max - y_min + 1; }
    constexpr long long area() const { return static_cast<long long>(width()) * height(); }
    constexpr bool valid() const { return x_min <= x_max && y_min <= y_max; }
    Vec2 center() const {
        return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)};
    }
};

/// The nine agent/cow moves. The numeric value is the action index used by
/// Q-tables and tie-breaking; Skip is index 0.
enum class MoveAction : std::uint8_t {
    Skip = 0,
    North,
    NorthEast,
    East,
    SouthEast,
    South,
    SouthWest,
    West,
    NorthWest,
};

inline constexpr int kMoveCount = 9;

inline constexpr std::array<MoveAction, kMoveCount> kAllMoves = {
    MoveAction::Skip,      MoveAction::North, MoveAction::NorthEast,
    MoveAction::East,      MoveAction::SouthEast, MoveAction::South,
    MoveAction::SouthWest, MoveAction::West,  MoveAction::NorthWest,
};

constexpr int index_of(MoveAction m) { return static_cast<int>(m); }
MoveAction move_from_index(int index);

constexpr Cell displacement(MoveAction m) {
    constexpr std::array<Cell, kMoveCount> table = {{
        {0, 0}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1},
    }};
    return table[static_cast<std::size_t>(m)];
}

std::string_view to_string(MoveAction m);
std::optional<MoveAction> parse_move(std::string_view name);

/// Nearest of the nine displacement vectors (including Skip) to v under
/// Euclidean distance; ties go to the lower action index.
MoveAction quantize_nearest(Vec2 v);

/// Nearest of the eight compass directions to v by angle; a zero vector maps
/// to Skip and angular ties go to the lower action index.
MoveAction quantize_direction(Vec2 v);

double chebyshev(Cell a, Cell b);

}  // namespace shepherd
