#include "covsim/svg.hpp"

#include <cstdio>
#include <string>

namespace covsim {

namespace {

class SvgWriter {
public:
    SvgWriter(const Rect& map, const SvgStyle& style) : map_(map), style_(style) {}

    [[nodiscard]] double sx(double x) const { return style_.margin_px + (x - map_.x_min) * style_.pixels_per_meter; }
    [[nodiscard]] double sy(double y) const { return style_.margin_px + (map_.y_max - y) * style_.pixels_per_meter; }

    void rect(const Rect& r, const char* fill, const char* stroke, double opacity) {
        append("<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"%s\" fill-opacity=\"%.2f\" "
               "stroke=\"%s\"/>\n",
               sx(r.x_min), sy(r.y_max), r.width() * style_.pixels_per_meter, r.height() * style_.pixels_per_meter,
               fill, opacity, stroke);
    }

    template <typename... Args>
    void append(const char* fmt, Args... args) {
        char buf[512];
        const int n = std::snprintf(buf, sizeof buf, fmt, args...);
        out_.append(buf, static_cast<std::size_t>(n < 0 ? 0 : std::min<int>(n, sizeof buf - 1)));
    }

    void raw(const std::string& s) { out_ += s; }
    [[nodiscard]] std::string take() { return std::move(out_); }

private:
    Rect map_;
    SvgStyle style_;
    std::string out_;
};

}  // namespace

std::string render_svg(const Trace& trace, const SvgStyle& style) {
    const Rect& map = trace.scenario.map;
    SvgWriter w(map, style);
    const double width = map.width() * style.pixels_per_meter + 2.0 * style.margin_px;
    const double height = map.height() * style.pixels_per_meter + 2.0 * style.margin_px;

    w.append("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.3f\" height=\"%.3f\" viewBox=\"0 0 %.3f %.3f\">\n",
             width, height, width, height);
    w.raw("<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    w.raw("<g id=\"covered\">\n");
    for (const auto& r : trace.scenario.tzs) w.rect(r, style.covered_fill, "none", 1.0);
    w.raw("</g>\n<g id=\"targets\">\n");
    for (const auto& r : trace.final_tzs) w.rect(r, style.target_fill, "none", 0.8);
    w.raw("</g>\n<g id=\"nfzs\">\n");
    for (const auto& r : trace.scenario.nfzs) w.rect(r, style.nfz_fill, "none", 0.7);
    w.raw("</g>\n");
    w.rect(map, "none", "black", 0.0);

    std::string points;
    const auto add_point = [&](Vec2 p) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", points.empty() ? "" : " ", w.sx(p.x), w.sy(p.y));
        points += buf;
    };
    for (const auto& step : trace.steps) {
        for (std::size_t i = 0; i < step.path.size(); ++i) {
            // Consecutive segments share their joint point.
            if (i == 0 && !points.empty()) continue;
            add_point(step.path[i]);
        }
    }
    if (!points.empty()) {
        w.append("<polyline id=\"path\" fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"", style.path_stroke);
        w.raw(points);
        w.raw("\"/>\n");
    }

    const UavPose& last = trace.steps.empty() ? trace.scenario.start_pose : trace.steps.back().pose;
    w.raw("<g id=\"fov\">\n");
    w.rect(fov_rect(last.position, trace.env.camera), "none", style.fov_stroke, 0.0);
    w.raw("</g>\n");

    const Vec2 s = trace.scenario.start_pose.position;
    w.append("<circle id=\"start\" cx=\"%.3f\" cy=\"%.3f\" r=\"4\" fill=\"black\"/>\n", w.sx(s.x), w.sy(s.y));
    w.raw("</svg>\n");
    return w.take();
}

}  // namespace covsim
