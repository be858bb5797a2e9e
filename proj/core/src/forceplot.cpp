#include "dip/forceplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dip/common.hpp"

namespace dip {

namespace {

struct Segment {
  double contribution;
  const char* color;
};

struct PlotEntry {
  std::string label;
  std::vector<Segment> main;  // stack from zero; sums to `total`
  double total = 0.0;
  std::vector<Segment> slim;  // dependency split; sums to `slim_total`
  double slim_total = 0.0;
  bool has_slim = false;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string join_names(const nlohmann::ordered_json& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += "+";
    out += n.get<std::string>();
  }
  return out;
}

std::vector<PlotEntry> collect_entries(const Report& report) {
  const std::string command = report.body.value("command", "");
  std::vector<PlotEntry> out;
  if (!report.body.contains("entries")) return out;

  for (const auto& e : report.body["entries"]) {
    PlotEntry entry;
    if (command == "decompose" || command == "pairwise") {
      entry.label = join_names(e["group_a"]) + " | " + join_names(e["group_b"]);
      entry.main = {{e.value("v_j", 0.0), kStandaloneGray},
                    {e.value("v_jbar", 0.0), kStandaloneGray},
                    {e.value("interaction_surplus", 0.0), kInteractionGreen},
                    {-e.value("dep", 0.0), kDependencePurple}};
      entry.total = e.value("v_joint", 0.0);
      entry.slim = {{e.value("cross_pred", 0.0), kCrossPredPurple},
                    {e.value("covariance", 0.0), kCovariancePurple}};
      entry.slim_total = e.value("dep", 0.0);
      entry.has_slim = true;
    } else if (command == "loco") {
      entry.label = e.value("feature", "");
      entry.main = {{e.value("standalone", 0.0), kStandaloneGray},
                    {e.value("interaction", 0.0), kInteractionGreen},
                    {-e.value("dependencies", 0.0), kDependencePurple}};
      entry.total = e.value("loco", 0.0);
      entry.slim = {{e.value("cross_pred", 0.0), kCrossPredPurple},
                    {e.value("covariance", 0.0), kCovariancePurple}};
      entry.slim_total = e.value("dependencies", 0.0);
      entry.has_slim = true;
    } else if (command == "sage") {
      entry.label = e.value("feature", "");
      entry.main = {{e.value("standalone", 0.0), kStandaloneGray},
                    {e.value("avg_interaction", 0.0), kInteractionGreen},
                    {-e.value("avg_dependencies", 0.0), kDependencePurple}};
      entry.total = e.value("phi", 0.0);
      entry.has_slim = false;
    }
    if (!entry.main.empty()) out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace

std::string forceplot_svg(const Report& report) {
  const std::vector<PlotEntry> entries = collect_entries(report);
  if (entries.empty()) {
    throw ConfigError("forceplot: report contains no plottable entries");
  }

  // Fixed 1000x600 viewbox.
  const double width = 1000.0, height = 600.0;
  const double left = 70.0, right = 20.0, top = 50.0, bottom = 70.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  // Value range over every stack endpoint, reference line and zero.
  double lo = 0.0, hi = 0.0;
  for (const PlotEntry& entry : entries) {
    double cum = 0.0;
    for (const Segment& s : entry.main) {
      cum += s.contribution;
      lo = std::min(lo, cum);
      hi = std::max(hi, cum);
    }
    lo = std::min(lo, entry.total);
    hi = std::max(hi, entry.total);
    if (entry.has_slim) {
      double scum = 0.0;
      for (const Segment& s : entry.slim) {
        scum += s.contribution;
        lo = std::min(lo, scum);
        hi = std::max(hi, scum);
      }
      lo = std::min(lo, entry.slim_total);
      hi = std::max(hi, entry.slim_total);
    }
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto y_of = [&](double v) {
    return top + (hi - v) / (hi - lo) * plot_h;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 600\" "
         "width=\"1000\" height=\"600\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"600\" fill=\"#ffffff\"/>\n";

  // Horizontal gridlines and axis labels.
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    const double y = y_of(v);
    svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y) + "\" x2=\"" +
           fmt(width - right) + "\" y2=\"" + fmt(y) +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(left - 8.0) + "\" y=\"" + fmt(y + 4.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
           fmt(v) + "</text>\n";
  }
  // Zero line.
  svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y_of(0.0)) + "\" x2=\"" +
         fmt(width - right) + "\" y2=\"" + fmt(y_of(0.0)) +
         "\" stroke=\"#757575\" stroke-width=\"1\"/>\n";

  const double slot = plot_w / static_cast<double>(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const PlotEntry& entry = entries[i];
    const double x0 = left + slot * static_cast<double>(i);
    const double main_w = slot * 0.4;
    const double main_x = x0 + slot * 0.08;

    double cum = 0.0;
    for (const Segment& s : entry.main) {
      const double from = cum;
      cum += s.contribution;
      const double y_top = y_of(std::max(from, cum));
      const double seg_h = std::abs(y_of(from) - y_of(cum));
      svg += "<rect x=\"" + fmt(main_x) + "\" y=\"" + fmt(y_top) +
             "\" width=\"" + fmt(main_w) + "\" height=\"" + fmt(seg_h) +
             "\" fill=\"" + s.color + "\" stroke=\"#ffffff\" "
             "stroke-width=\"0.5\"/>\n";
    }
    // Reference line at the entry total (the joint value / score).
    svg += "<line x1=\"" + fmt(main_x - slot * 0.04) + "\" y1=\"" +
           fmt(y_of(entry.total)) + "\" x2=\"" +
           fmt(main_x + main_w + slot * 0.04) + "\" y2=\"" +
           fmt(y_of(entry.total)) +
           "\" stroke=\"#000000\" stroke-width=\"2\"/>\n";

    if (entry.has_slim) {
      const double slim_w = slot * 0.14;
      const double slim_x = main_x + main_w + slot * 0.1;
      double scum = 0.0;
      for (const Segment& s : entry.slim) {
        const double from = scum;
        scum += s.contribution;
        const double y_top = y_of(std::max(from, scum));
        const double seg_h = std::abs(y_of(from) - y_of(scum));
        svg += "<rect x=\"" + fmt(slim_x) + "\" y=\"" + fmt(y_top) +
               "\" width=\"" + fmt(slim_w) + "\" height=\"" + fmt(seg_h) +
               "\" fill=\"" + s.color + "\" stroke=\"#ffffff\" "
               "stroke-width=\"0.5\"/>\n";
      }
      svg += "<line x1=\"" + fmt(slim_x - slot * 0.02) + "\" y1=\"" +
             fmt(y_of(entry.slim_total)) + "\" x2=\"" +
             fmt(slim_x + slim_w + slot * 0.02) + "\" y2=\"" +
             fmt(y_of(entry.slim_total)) + "\" stroke=\"" + kDependencePurple +
             "\" stroke-width=\"2\"/>\n";
    }

    std::string label = entry.label;
    if (label.size() > 18) label = label.substr(0, 17) + "…";
    svg += "<text x=\"" + fmt(x0 + slot / 2.0) + "\" y=\"" +
           fmt(height - bottom + 24.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" + label + "</text>\n";
  }

  // Legend.
  struct LegendItem {
    const char* color;
    const char* text;
  };
  const LegendItem legend[] = {{kStandaloneGray, "standalone"},
                               {kInteractionGreen, "interaction surplus"},
                               {kDependencePurple, "dependencies (neg.)"},
                               {kCrossPredPurple, "cross-predictability"},
                               {kCovariancePurple, "covariance"}};
  double lx = left;
  for (const LegendItem& item : legend) {
    svg += "<rect x=\"" + fmt(lx) + "\" y=\"16\" width=\"12\" height=\"12\" fill=\"" +
           std::string(item.color) + "\"/>\n";
    svg += "<text x=\"" + fmt(lx + 16.0) +
           "\" y=\"26\" font-family=\"sans-serif\" font-size=\"12\">" +
           item.text + "</text>\n";
    lx += 16.0 + 7.0 * static_cast<double>(std::string(item.text).size()) + 24.0;
  }

  svg += "</svg>\n";
  return svg;
}

void render_forceplot(const Report& report, const std::string& out_path) {
  atomic_write_file(out_path, forceplot_svg(report));
}

}  // namespace dip
