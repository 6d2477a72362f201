#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace covsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(const Vec2& o) const noexcept { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const noexcept { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const noexcept { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const noexcept { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const noexcept { return {x / s, y / s}; }
    constexpr Vec2& operator+=(const Vec2& o) noexcept {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr bool operator==(const Vec2&) const noexcept = default;

    [[nodiscard]] constexpr double dot(const Vec2& o) const noexcept { return x * o.x + y * o.y; }
    /// z-component of the 3-D cross product.
    [[nodiscard]] constexpr double cross(const Vec2& o) const noexcept { return x * o.y - y * o.x; }
    [[nodiscard]] double norm() const noexcept { return std::hypot(x, y); }
    /// Rotated +90 degrees (counterclockwise).
    [[nodiscard]] constexpr Vec2 perp() const noexcept { return {-y, x}; }
};

constexpr Vec2 operator*(double s, const Vec2& v) noexcept { return v * s; }

/// Closed axis-aligned rectangle in world meters (x right, y up).
struct Rect {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    constexpr bool operator==(const Rect&) const noexcept = default;

    [[nodiscard]] constexpr double width() const noexcept { return x_max - x_min; }
    [[nodiscard]] constexpr double height() const noexcept { return y_max - y_min; }
    [[nodiscard]] constexpr double area() const noexcept { return width() * height(); }
    [[nodiscard]] constexpr Vec2 center() const noexcept {
        return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)};
    }
    /// Top-left / bottom-right corners in the y-up world frame.
    [[nodiscard]] constexpr Vec2 top_left() const noexcept { return {x_min, y_max}; }
    [[nodiscard]] constexpr Vec2 bottom_right() const noexcept { return {x_max, y_min}; }
    [[nodiscard]] bool valid() const noexcept {
        return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
               std::isfinite(y_max) && x_min < x_max && y_min < y_max;
    }

    static constexpr Rect centered(Vec2 c, double side) noexcept {
        const double h = 0.5 * side;
        return {c.x - h, c.y - h, c.x + h, c.y + h};
    }
};

/// Fragments with a side shorter than this are dropped by subtraction.
inline constexpr double kSliverEpsilon = 1e-6;

/// Unordered collection of rectangles with a cached total area.  Sets built
/// through rect_set_subtract / union_insert keep their members pairwise
/// interior-disjoint, so the cached area is the sum of member areas.
class RectSet {
public:
    RectSet() = default;
    explicit RectSet(std::vector<Rect> rects);

    [[nodiscard]] std::span<const Rect> rects() const noexcept { return rects_; }
    [[nodiscard]] double area() const noexcept { return area_; }
    [[nodiscard]] std::size_t size() const noexcept { return rects_.size(); }
    [[nodiscard]] bool empty() const noexcept { return rects_.empty(); }
    [[nodiscard]] auto begin() const noexcept { return rects_.begin(); }
    [[nodiscard]] auto end() const noexcept { return rects_.end(); }
    [[nodiscard]] const Rect& operator[](std::size_t i) const { return rects_[i]; }

    /// Appends without any overlap handling.
    void push_back(const Rect& r);

    bool operator==(const RectSet& o) const noexcept { return rects_ == o.rects_; }

private:
    std::vector<Rect> rects_;
    double area_ = 0.0;
};

/// A maximal group of touching rectangles.
struct Zone {
    RectSet rects;
    Vec2 centroid;  // area-weighted mean of member centers
    Rect bbox;
    double area = 0.0;
};

/// Closed intersection with positive area, or nothing.
[[nodiscard]] std::optional<Rect> rect_intersection(const Rect& a, const Rect& b) noexcept;

/// Closed rectangles share at least one point (edge and corner contact count).
[[nodiscard]] bool rects_touch(const Rect& a, const Rect& b) noexcept;

/// target minus cutter as up to four interior-disjoint pieces, in the order
/// top strip, bottom strip, left middle, right middle.  Strips are
/// full-width; slivers thinner than kSliverEpsilon are dropped.
[[nodiscard]] std::vector<Rect> rect_subtract(const Rect& target, const Rect& cutter);

[[nodiscard]] RectSet rect_set_subtract(const RectSet& set, const Rect& cutter);

/// Adds `r` to an interior-disjoint set, keeping only the parts of `r` not
/// already covered.  The result represents the union.
[[nodiscard]] RectSet union_insert(const RectSet& set, const Rect& r);

/// Clips every member to `bounds`, dropping members that vanish.
[[nodiscard]] RectSet rect_set_clip(const RectSet& set, const Rect& bounds);

/// Connected components under closed-rectangle contact.  Zones are ordered
/// by their lowest member index; members keep input order.
[[nodiscard]] std::vector<Zone> group_zones(const RectSet& set);

[[nodiscard]] constexpr bool point_in_rect(Vec2 p, const Rect& r) noexcept {
    return r.x_min <= p.x && p.x <= r.x_max && r.y_min <= p.y && p.y <= r.y_max;
}

/// Euclidean distance from p to the closed rectangle (0 inside).
[[nodiscard]] double distance_to_rect(Vec2 p, const Rect& r) noexcept;

}  // namespace covsim
