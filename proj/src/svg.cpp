#include <algorithm>
#include <cmath>
#include <string>

#include "fmds/io.hpp"
#include "fmds/metrics.hpp"

namespace fmds {

namespace {

constexpr int kCanvas = 640;
constexpr double kMargin = 48.0;

const char* const kPalette[] = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};

const char* color_for(int label) {
  return kPalette[static_cast<std::size_t>(label) % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

}  // namespace

std::vector<int> write_scatter_svg(const std::filesystem::path& path, const Embedding& emb,
                                   const LabelVector& labels, double ellipse_level) {
  require_same_ids(emb.sample_ids, labels.sample_ids, "scatter plot");
  const int n = emb.n();

  struct GroupEllipse {
    int label;
    Ellipse ellipse;
  };
  std::vector<GroupEllipse> ellipses;
  std::vector<int> skipped;
  for (const auto& members : group_members(labels.y)) {
    int label = labels.y[static_cast<std::size_t>(members.front())];
    if (members.size() < 3) {
      skipped.push_back(label);
      continue;
    }
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (int idx : members) mean += emb.z.row(idx).transpose();
    mean /= static_cast<double>(members.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (int idx : members) {
      Eigen::Vector2d c = emb.z.row(idx).transpose() - mean;
      cov += c * c.transpose();
    }
    cov /= static_cast<double>(members.size() - 1);
    ellipses.push_back({label, confidence_ellipse(mean, cov, ellipse_level)});
  }

  // Data bounds, padded by ellipse extents.
  double min_x = emb.z.col(0).minCoeff();
  double max_x = emb.z.col(0).maxCoeff();
  double min_y = emb.z.col(1).minCoeff();
  double max_y = emb.z.col(1).maxCoeff();
  for (const auto& ge : ellipses) {
    min_x = std::min(min_x, ge.ellipse.center(0) - ge.ellipse.semi_major);
    max_x = std::max(max_x, ge.ellipse.center(0) + ge.ellipse.semi_major);
    min_y = std::min(min_y, ge.ellipse.center(1) - ge.ellipse.semi_major);
    max_y = std::max(max_y, ge.ellipse.center(1) + ge.ellipse.semi_major);
  }
  double span = std::max(max_x - min_x, max_y - min_y);
  if (!(span > 0.0)) span = 1.0;
  const double scale = (kCanvas - 2.0 * kMargin) / span;
  const double cx_data = 0.5 * (min_x + max_x);
  const double cy_data = 0.5 * (min_y + max_y);

  auto to_screen_x = [&](double x) { return kCanvas / 2.0 + (x - cx_data) * scale; };
  auto to_screen_y = [&](double y) { return kCanvas / 2.0 - (y - cy_data) * scale; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kCanvas) +
         "\" height=\"" + std::to_string(kCanvas) + "\" viewBox=\"0 0 " +
         std::to_string(kCanvas) + " " + std::to_string(kCanvas) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const auto& ge : ellipses) {
    double ex = to_screen_x(ge.ellipse.center(0));
    double ey = to_screen_y(ge.ellipse.center(1));
    double rx = ge.ellipse.semi_major * scale;
    double ry = ge.ellipse.semi_minor * scale;
    // Screen y points down, so the rotation angle flips sign.
    double angle = -ge.ellipse.rotation_radians * 180.0 / M_PI;
    svg += "<ellipse cx=\"" + format_double(ex) + "\" cy=\"" + format_double(ey) +
           "\" rx=\"" + format_double(rx) + "\" ry=\"" + format_double(ry) +
           "\" fill=\"none\" stroke=\"" + color_for(ge.label) +
           "\" stroke-width=\"1.5\" transform=\"rotate(" + format_double(angle) + " " +
           format_double(ex) + " " + format_double(ey) + ")\"/>\n";
  }

  for (int i = 0; i < n; ++i) {
    svg += "<circle cx=\"" + format_double(to_screen_x(emb.z(i, 0))) + "\" cy=\"" +
           format_double(to_screen_y(emb.z(i, 1))) + "\" r=\"3\" fill=\"" +
           color_for(labels.y[static_cast<std::size_t>(i)]) + "\" fill-opacity=\"0.75\"/>\n";
  }

  // Legend, one swatch per present label.
  double ly = 20.0;
  for (const auto& members : group_members(labels.y)) {
    int label = labels.y[static_cast<std::size_t>(members.front())];
    svg += "<circle cx=\"20\" cy=\"" + format_double(ly) + "\" r=\"4\" fill=\"" +
           color_for(label) + "\"/>\n";
    svg += "<text x=\"30\" y=\"" + format_double(ly + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\">group " + std::to_string(label) +
           "</text>\n";
    ly += 18.0;
  }

  svg += "</svg>\n";
  write_text_file(path, svg);
  return skipped;
}

}  // namespace fmds
