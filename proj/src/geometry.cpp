#include "covsim/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace covsim {

RectSet::RectSet(std::vector<Rect> rects) : rects_(std::move(rects)) {
    for (const auto& r : rects_) area_ += r.area();
}

void RectSet::push_back(const Rect& r) {
    rects_.push_back(r);
    area_ += r.area();
}

std::optional<Rect> rect_intersection(const Rect& a, const Rect& b) noexcept {
    const Rect r{std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min),
                 std::min(a.x_max, b.x_max), std::min(a.y_max, b.y_max)};
    if (r.x_min < r.x_max && r.y_min < r.y_max) return r;
    return std::nullopt;
}

bool rects_touch(const Rect& a, const Rect& b) noexcept {
    return a.x_min <= b.x_max && b.x_min <= a.x_max && a.y_min <= b.y_max && b.y_min <= a.y_max;
}

namespace {

void push_if_solid(std::vector<Rect>& out, const Rect& r) {
    if (r.width() >= kSliverEpsilon && r.height() >= kSliverEpsilon) out.push_back(r);
}

}  // namespace

std::vector<Rect> rect_subtract(const Rect& target, const Rect& cutter) {
    const auto overlap = rect_intersection(target, cutter);
    if (!overlap) return {target};
    const Rect& o = *overlap;

    std::vector<Rect> out;
    out.reserve(4);
    push_if_solid(out, {target.x_min, o.y_max, target.x_max, target.y_max});
    push_if_solid(out, {target.x_min, target.y_min, target.x_max, o.y_min});
    push_if_solid(out, {target.x_min, o.y_min, o.x_min, o.y_max});
    push_if_solid(out, {o.x_max, o.y_min, target.x_max, o.y_max});
    return out;
}

RectSet rect_set_subtract(const RectSet& set, const Rect& cutter) {
    std::vector<Rect> out;
    out.reserve(set.size() + 3);
    for (const auto& r : set) {
        if (!rect_intersection(r, cutter)) {
            out.push_back(r);
            continue;
        }
        for (const auto& piece : rect_subtract(r, cutter)) out.push_back(piece);
    }
    return RectSet(std::move(out));
}

RectSet union_insert(const RectSet& set, const Rect& r) {
    std::vector<Rect> pieces{r};
    for (const auto& existing : set) {
        std::vector<Rect> next;
        next.reserve(pieces.size() + 3);
        for (const auto& p : pieces) {
            for (const auto& q : rect_subtract(p, existing)) next.push_back(q);
        }
        pieces = std::move(next);
        if (pieces.empty()) break;
    }
    std::vector<Rect> out(set.begin(), set.end());
    out.insert(out.end(), pieces.begin(), pieces.end());
    return RectSet(std::move(out));
}

RectSet rect_set_clip(const RectSet& set, const Rect& bounds) {
    std::vector<Rect> out;
    for (const auto& r : set) {
        if (auto c = rect_intersection(r, bounds)) {
            if (c->width() >= kSliverEpsilon && c->height() >= kSliverEpsilon) out.push_back(*c);
        }
    }
    return RectSet(std::move(out));
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        // Keep the smaller index as root so zone order follows input order.
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[b] = a;
    }
};

}  // namespace

std::vector<Zone> group_zones(const RectSet& set) {
    const std::size_t n = set.size();
    DisjointSets ds(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rects_touch(set[i], set[j])) ds.unite(i, j);
        }
    }

    std::vector<Zone> zones;
    std::vector<std::ptrdiff_t> zone_of_root(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = ds.find(i);
        if (zone_of_root[root] < 0) {
            zone_of_root[root] = static_cast<std::ptrdiff_t>(zones.size());
            zones.push_back(Zone{RectSet{}, {}, set[i], 0.0});
        }
        Zone& z = zones[static_cast<std::size_t>(zone_of_root[root])];
        const Rect& r = set[i];
        z.rects.push_back(r);
        z.bbox = {std::min(z.bbox.x_min, r.x_min), std::min(z.bbox.y_min, r.y_min),
                  std::max(z.bbox.x_max, r.x_max), std::max(z.bbox.y_max, r.y_max)};
    }
    for (auto& z : zones) {
        Vec2 weighted{};
        for (const auto& r : z.rects) weighted += r.center() * r.area();
        z.area = z.rects.area();
        z.centroid = weighted / z.area;
    }
    return zones;
}

double distance_to_rect(Vec2 p, const Rect& r) noexcept {
    const double dx = std::max({r.x_min - p.x, 0.0, p.x - r.x_max});
    const double dy = std::max({r.y_min - p.y, 0.0, p.y - r.y_max});
    return std::hypot(dx, dy);
}

}  // namespace covsim
