#pragma once

#include <string>
#include <vector>

namespace kakeya {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Numeric CSV with a header line. Non-numeric cells are rejected.
CsvTable parse_csv(const std::string& text);

enum class PlotKind {
    Series,  // first column on x, every other column a polyline with markers
    Field,   // x,y,value as shaded squares
    Cells,   // x,y,id colored by id
};

PlotKind parse_plot_kind(const std::string& name);

// Deterministic SVG: fixed 640x480 viewport, fixed number formatting, no timestamps.
std::string emit_plot(const std::string& csv, PlotKind kind, const std::string& title = "");

}  // namespace kakeya
