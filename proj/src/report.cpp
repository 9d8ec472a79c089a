#include "okb/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "okb/util.hpp"

namespace okb {

std::string config_hash(const Json& config) { return hex64(fnv1a64(config.dump())); }

Json base_report(const std::string& command, const Json& config) {
  Json report;
  report["command"] = command;
  report["version"] = kVersion;
  report["config_hash"] = config_hash(config);
  report["config"] = config;
  return report;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table parse_csv(const std::string& csv) {
  Table t;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("plot: empty table");
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.header.size())
      throw std::invalid_argument("plot: ragged CSV row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string svg_plot_from_csv(const std::string& csv, const std::string& kind) {
  Table t = parse_csv(csv);
  int xcol = 0, ycol = 1;
  std::vector<std::pair<double, double>> pts;
  if (kind == "ladder") {
    if (t.header.size() < 2) throw std::invalid_argument("plot: ladder needs 2 columns");
    for (const auto& r : t.rows) pts.push_back({r[0], r[1]});
  } else if (kind == "field") {
    // field CSV: coords..., value, missing
    if (t.header.size() < 3) throw std::invalid_argument("plot: field needs 3 columns");
    ycol = int(t.header.size()) - 2;
    int misscol = int(t.header.size()) - 1;
    for (const auto& r : t.rows)
      if (r[std::size_t(misscol)] == 0.0) pts.push_back({r[std::size_t(xcol)], r[std::size_t(ycol)]});
  } else {
    throw std::invalid_argument("plot: kind must be 'ladder' or 'field'");
  }
  if (pts.empty()) throw std::invalid_argument("plot: no data rows");
  double xmin = pts[0].first, xmax = pts[0].first;
  double ymin = pts[0].second, ymax = pts[0].second;
  for (const auto& [x, y] : pts) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double w = 640, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%s\" y1=\"%s\" x2=\"%s\" y2=\"%s\" stroke=\"black\"/>\n",
                fmt(ml).c_str(), fmt(h - mb).c_str(), fmt(w - mr).c_str(),
                fmt(h - mb).c_str());
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%s\" y1=\"%s\" x2=\"%s\" y2=\"%s\" stroke=\"black\"/>\n",
                fmt(ml).c_str(), fmt(mt).c_str(), fmt(ml).c_str(), fmt(h - mb).c_str());
  svg += buf;
  auto text = [&](double x, double y, const std::string& s, const char* anchor) {
    char b2[256];
    std::snprintf(b2, sizeof(b2),
                  "<text x=\"%s\" y=\"%s\" font-size=\"12\" text-anchor=\"%s\">%s</text>\n",
                  fmt(x).c_str(), fmt(y).c_str(), anchor, s.c_str());
    svg += b2;
  };
  text(ml, h - mb + 18, fmt(xmin), "middle");
  text(w - mr, h - mb + 18, fmt(xmax), "middle");
  text(ml - 6, h - mb, fmt(ymin), "end");
  text(ml - 6, mt + 10, fmt(ymax), "end");
  text((ml + w - mr) / 2, h - 12, t.header[std::size_t(xcol)], "middle");
  text(ml + 6, mt + 10, t.header[std::size_t(ycol)], "start");
  svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (const auto& [x, y] : pts) svg += fmt(px(x)) + "," + fmt(py(y)) + " ";
  svg += "\"/>\n";
  for (const auto& [x, y] : pts) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%s\" cy=\"%s\" r=\"2.5\" fill=\"#1f77b4\"/>\n",
                  fmt(px(x)).c_str(), fmt(py(y)).c_str());
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace okb
