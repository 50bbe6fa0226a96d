#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "kdml/numerics.hpp"

namespace kdml::svg {

// Class k (1-based) is drawn with palette[(k - 1) % 8].
inline constexpr std::array<std::string_view, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct ScatterOptions {
  double width = 640.0;
  double height = 640.0;
  double radius = 3.5;
  double margin_fraction = 0.05;
  std::string title;
};

/// Static SVG 1.1 scatter plot of 2-D points: one <circle> per point, filled
/// by class, axes autoscaled to the data range plus a 5% margin.
std::string scatter(const RowMatrix& points, const std::vector<int>& labels,
                    const std::vector<std::string>& class_names, const ScatterOptions& options = {});

}  // namespace kdml::svg
