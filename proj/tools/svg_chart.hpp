#pragma once

#include <string>
#include <vector>

struct ChartSeries {
  std::string name;
  std::vector<double> x, y;
};

// Static SVG line plot with one polyline per series and a legend.
std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<ChartSeries>& series);
void write_line_chart(const std::string& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<ChartSeries>& series);
