#include "kakeya/svg.hpp"

#include "kakeya/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace kakeya {

namespace {

constexpr double kW = 640, kH = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

struct Axes {
    double x0, x1, y0, y1;

    double sx(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); }
    double sy(double y) const { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); }
};

void widen(double& lo, double& hi) {
    if (hi > lo) return;
    double pad = lo == 0 ? 1 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
}

void frame(std::ostringstream& os, const Axes& ax, const std::string& title, const std::string& xl,
           const std::string& yl) {
    os << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(kW - kLeft - kRight)
       << "\" height=\"" << fmt(kH - kTop - kBottom) << "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double x = ax.x0 + (ax.x1 - ax.x0) * i / 4, y = ax.y0 + (ax.y1 - ax.y0) * i / 4;
        os << "<text x=\"" << fmt(ax.sx(x)) << "\" y=\"" << fmt(kH - kBottom + 16)
           << "\" font-size=\"11\" text-anchor=\"middle\">" << label(x) << "</text>\n";
        os << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(ax.sy(y) + 4)
           << "\" font-size=\"11\" text-anchor=\"end\">" << label(y) << "</text>\n";
    }
    os << "<text x=\"" << fmt(kW / 2) << "\" y=\"" << fmt(kH - 10) << "\" font-size=\"12\" text-anchor=\"middle\">"
       << escape(xl) << "</text>\n";
    os << "<text x=\"14\" y=\"" << fmt(kH / 2) << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << fmt(kH / 2) << ")\">" << escape(yl) << "</text>\n";
    if (!title.empty())
        os << "<text x=\"" << fmt(kW / 2) << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" << escape(title)
           << "</text>\n";
}

std::string shade(double t) {
    t = std::clamp(t, 0.0, 1.0);
    int r = static_cast<int>(std::lround(255 * (1 - t * 0.85)));
    int g = static_cast<int>(std::lround(255 * (1 - t * 0.65)));
    int b = static_cast<int>(std::lround(255 * (1 - t * 0.25)));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::stringstream ss(text);
    std::string line;
    bool first = true;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        if (first) {
            t.header = cells;
            first = false;
            continue;
        }
        require(cells.size() == t.header.size(), "csv: row width differs from the header");
        std::vector<double> row;
        for (const auto& v : cells) {
            char* end = nullptr;
            double x = std::strtod(v.c_str(), &end);
            require(!v.empty() && end == v.c_str() + v.size(), "csv: non-numeric cell '" + v + "'");
            row.push_back(x);
        }
        t.rows.push_back(row);
    }
    return t;
}

PlotKind parse_plot_kind(const std::string& name) {
    if (name == "series") return PlotKind::Series;
    if (name == "field") return PlotKind::Field;
    if (name == "cells") return PlotKind::Cells;
    throw PreconditionError("plot kind must be series, field or cells");
}

std::string emit_plot(const std::string& csv, PlotKind kind, const std::string& title) {
    CsvTable t = parse_csv(csv);
    require(t.header.size() >= 2, "emit_plot: need at least two columns");
    require(!t.rows.empty(), "emit_plot: no data rows");
    if (kind != PlotKind::Series) require(t.header.size() >= 3, "emit_plot: field plots need x,y,value");

    Axes ax{t.rows[0][0], t.rows[0][0], t.rows[0][1], t.rows[0][1]};
    double vmin = 0, vmax = 0;
    for (const auto& r : t.rows) {
        ax.x0 = std::min(ax.x0, r[0]);
        ax.x1 = std::max(ax.x1, r[0]);
        for (std::size_t c = 1; c < (kind == PlotKind::Series ? r.size() : 2); ++c) {
            ax.y0 = std::min(ax.y0, r[c]);
            ax.y1 = std::max(ax.y1, r[c]);
        }
    }
    if (kind != PlotKind::Series) {
        vmin = vmax = t.rows[0][2];
        for (const auto& r : t.rows) {
            vmin = std::min(vmin, r[2]);
            vmax = std::max(vmax, r[2]);
        }
    }
    widen(ax.x0, ax.x1);
    widen(ax.y0, ax.y1);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
    os << "<rect width=\"640\" height=\"480\" fill=\"#fff\"/>\n";
    frame(os, ax, title, t.header[0], kind == PlotKind::Series ? (t.header.size() == 2 ? t.header[1] : "") : t.header[1]);

    if (kind == PlotKind::Series) {
        for (std::size_t c = 1; c < t.header.size(); ++c) {
            const char* color = kPalette[(c - 1) % 10];
            if (t.rows.size() > 1) {
                os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
                for (std::size_t i = 0; i < t.rows.size(); ++i)
                    os << (i ? " " : "") << fmt(ax.sx(t.rows[i][0])) << ',' << fmt(ax.sy(t.rows[i][c]));
                os << "\"/>\n";
            }
            for (const auto& r : t.rows)
                os << "<circle cx=\"" << fmt(ax.sx(r[0])) << "\" cy=\"" << fmt(ax.sy(r[c])) << "\" r=\"3\" fill=\""
                   << color << "\"/>\n";
            os << "<text x=\"" << fmt(kW - kRight - 4) << "\" y=\"" << fmt(kTop + 14 * c)
               << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(t.header[c])
               << "</text>\n";
        }
    } else {
        // Cell size from the smallest positive coordinate gaps.
        std::set<double> xs, ys;
        for (const auto& r : t.rows) {
            xs.insert(r[0]);
            ys.insert(r[1]);
        }
        auto gap = [](const std::set<double>& s, double span) {
            double g = span;
            for (auto it = s.begin(), nx = std::next(s.begin()); nx != s.end(); ++it, ++nx) g = std::min(g, *nx - *it);
            return g;
        };
        double gx = gap(xs, ax.x1 - ax.x0), gy = gap(ys, ax.y1 - ax.y0);
        double w = std::abs(ax.sx(ax.x0 + gx) - ax.sx(ax.x0)), h = std::abs(ax.sy(ax.y0 + gy) - ax.sy(ax.y0));
        for (const auto& r : t.rows) {
            std::string color;
            if (kind == PlotKind::Field) {
                color = shade(vmax > vmin ? (r[2] - vmin) / (vmax - vmin) : 1.0);
            } else {
                long id = std::lround(r[2]);
                color = id < 0 ? "#dddddd" : kPalette[id % 10];
            }
            os << "<rect x=\"" << fmt(ax.sx(r[0]) - w / 2) << "\" y=\"" << fmt(ax.sy(r[1]) - h / 2) << "\" width=\""
               << fmt(w) << "\" height=\"" << fmt(h) << "\" fill=\"" << color << "\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace kakeya
