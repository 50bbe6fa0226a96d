#include "kdml/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "kdml/errors.hpp"

namespace kdml::svg {
namespace {

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct Range {
  double lo;
  double hi;

  // Data range widened by `margin` of its span on each side.
  static Range of(const RowMatrix& points, Eigen::Index col, double margin) {
    double lo = points.col(col).minCoeff();
    double hi = points.col(col).maxCoeff();
    double span = hi - lo;
    if (span <= 0.0) span = std::max(1.0, std::abs(lo));
    if (hi == lo) {
      lo -= 0.5 * span;
      hi += 0.5 * span;
    }
    return {lo - margin * span, hi + margin * span};
  }
};

}  // namespace

std::string scatter(const RowMatrix& points, const std::vector<int>& labels,
                    const std::vector<std::string>& class_names, const ScatterOptions& options) {
  if (points.cols() != 2) throw ConfigError("scatter plots need 2-D points");
  if (static_cast<std::size_t>(points.rows()) != labels.size()) throw DataError("scatter: label count mismatch");
  if (points.rows() == 0) throw DataError("scatter: no points");

  const Range xr = Range::of(points, 0, options.margin_fraction);
  const Range yr = Range::of(points, 1, options.margin_fraction);
  const double w = options.width;
  const double h = options.height;
  auto px = [&](double x) { return (x - xr.lo) / (xr.hi - xr.lo) * w; };
  auto py = [&](double y) { return h - (y - yr.lo) / (yr.hi - yr.lo) * h; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
      << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(w) << "\" height=\"" << fmt(h) << "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    out << "<title>" << escape(options.title) << "</title>\n";
  }
  // Axes through the origin when it is in view, otherwise along the frame.
  const double ax = std::clamp(py(0.0), 0.0, h);
  const double ay = std::clamp(px(0.0), 0.0, w);
  out << "<g stroke=\"#999999\" stroke-width=\"1\">\n"
      << "<line x1=\"0\" y1=\"" << fmt(ax) << "\" x2=\"" << fmt(w) << "\" y2=\"" << fmt(ax) << "\"/>\n"
      << "<line x1=\"" << fmt(ay) << "\" y1=\"0\" x2=\"" << fmt(ay) << "\" y2=\"" << fmt(h) << "\"/>\n"
      << "</g>\n";

  out << "<g stroke=\"none\" fill-opacity=\"0.85\">\n";
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    const auto color = kPalette[static_cast<std::size_t>(std::max(label, 1) - 1) % kPalette.size()];
    out << "<circle cx=\"" << fmt(px(points(i, 0))) << "\" cy=\"" << fmt(py(points(i, 1))) << "\" r=\""
        << fmt(options.radius) << "\" fill=\"" << color << "\"/>\n";
  }
  out << "</g>\n";

  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < class_names.size(); ++k) {
    const double y = 16.0 + 16.0 * static_cast<double>(k);
    out << "<rect x=\"8\" y=\"" << fmt(y - 9.0) << "\" width=\"10\" height=\"10\" fill=\""
        << kPalette[k % kPalette.size()] << "\"/>"
        << "<text x=\"22\" y=\"" << fmt(y) << "\">" << escape(class_names[k]) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace kdml::svg
