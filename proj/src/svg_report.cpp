#include "anomgait/svg_report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "anomgait/errors.hpp"

namespace anomgait {

namespace {

struct BoxStats {
    double lo, q1, med, q3, hi;
    std::vector<double> values;
};

double quantile_sorted(const std::vector<double>& v, double q) {
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    const std::size_t i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= v.size()) return v.back();
    return v[i] + frac * (v[i + 1] - v[i]);
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void save_box_plot_svg(const std::vector<ScoreRecord>& records, ScoreKind kind,
                       const std::string& title, const std::string& path) {
    std::map<std::string, std::vector<double>> groups;
    for (const auto& r : records) {
        const double v = kind == ScoreKind::enc
                             ? r.score_enc
                             : (kind == ScoreKind::con ? r.score_con : r.score_adv);
        std::string key = r.class_label;
        if (!r.stage_label.empty()) key += " / " + r.stage_label;
        groups[key].push_back(v);
    }
    if (groups.empty()) throw std::invalid_argument("svg: no records to plot");

    std::vector<std::pair<std::string, BoxStats>> boxes;
    double vmin = 0.0, vmax = 0.0;
    bool first = true;
    for (auto& [key, values] : groups) {
        std::sort(values.begin(), values.end());
        BoxStats b{values.front(), quantile_sorted(values, 0.25),
                   quantile_sorted(values, 0.5), quantile_sorted(values, 0.75),
                   values.back(), values};
        if (first || b.lo < vmin) vmin = first ? b.lo : std::min(vmin, b.lo);
        if (first || b.hi > vmax) vmax = first ? b.hi : std::max(vmax, b.hi);
        first = false;
        boxes.emplace_back(key, std::move(b));
    }
    if (vmax <= vmin) vmax = vmin + 1.0;
    const double pad = 0.05 * (vmax - vmin);
    vmin -= pad;
    vmax += pad;

    const double plot_w = 120.0 * static_cast<double>(boxes.size());
    const double width = plot_w + 100.0;
    const double height = 360.0;
    const double top = 50.0, bottom = 320.0;
    const auto y_of = [&](double v) {
        return bottom - (v - vmin) / (vmax - vmin) * (bottom - top);
    };

    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("svg: cannot open for write: " + path);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
       << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " "
       << fmt(height) << "\">\n";
    os << "  <rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\""
       << fmt(height) << "\" fill=\"white\"/>\n";
    os << "  <text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"15\">"
       << xml_escape(title) << "</text>\n";
    os << "  <line x1=\"60\" y1=\"" << fmt(top) << "\" x2=\"60\" y2=\"" << fmt(bottom)
       << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = vmin + (vmax - vmin) * tick / 4.0;
        const double y = y_of(v);
        os << "  <line x1=\"56\" y1=\"" << fmt(y) << "\" x2=\"60\" y2=\"" << fmt(y)
           << "\" stroke=\"black\"/>\n";
        os << "  <text x=\"52\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\" "
              "font-family=\"sans-serif\" font-size=\"10\">"
           << fmt(v) << "</text>\n";
    }

    double cx = 60.0 + 60.0;
    for (const auto& [key, b] : boxes) {
        const double half = 28.0;
        os << "  <g class=\"box\">\n";
        os << "    <line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y_of(b.lo)) << "\" x2=\""
           << fmt(cx) << "\" y2=\"" << fmt(y_of(b.hi)) << "\" stroke=\"black\"/>\n";
        os << "    <line x1=\"" << fmt(cx - half / 2) << "\" y1=\"" << fmt(y_of(b.lo))
           << "\" x2=\"" << fmt(cx + half / 2) << "\" y2=\"" << fmt(y_of(b.lo))
           << "\" stroke=\"black\"/>\n";
        os << "    <line x1=\"" << fmt(cx - half / 2) << "\" y1=\"" << fmt(y_of(b.hi))
           << "\" x2=\"" << fmt(cx + half / 2) << "\" y2=\"" << fmt(y_of(b.hi))
           << "\" stroke=\"black\"/>\n";
        os << "    <rect x=\"" << fmt(cx - half) << "\" y=\"" << fmt(y_of(b.q3))
           << "\" width=\"" << fmt(2 * half) << "\" height=\""
           << fmt(std::max(1.0, y_of(b.q1) - y_of(b.q3)))
           << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
        os << "    <line x1=\"" << fmt(cx - half) << "\" y1=\"" << fmt(y_of(b.med))
           << "\" x2=\"" << fmt(cx + half) << "\" y2=\"" << fmt(y_of(b.med))
           << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        for (double v : b.values) {
            os << "    <circle cx=\"" << fmt(cx + half + 8) << "\" cy=\"" << fmt(y_of(v))
               << "\" r=\"1.5\" fill=\"#3182bd\" fill-opacity=\"0.5\"/>\n";
        }
        os << "    <text x=\"" << fmt(cx) << "\" y=\"" << fmt(bottom + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << xml_escape(key) << "</text>\n";
        os << "  </g>\n";
        cx += 120.0;
    }
    os << "</svg>\n";
    if (!os) throw io_error("svg: write failed: " + path);
}

}  // namespace anomgait
