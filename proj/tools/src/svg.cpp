#include "safecorridor_tools/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace safecorridor::tools {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

SvgCanvas::SvgCanvas(double width, double height, Eigen::Vector2d data_min, Eigen::Vector2d data_max, double pad)
    : width_(width), height_(height), pad_(pad), min_(data_min), max_(data_max) {
  for (int i = 0; i < 2; ++i) {
    if (!(max_[i] > min_[i])) max_[i] = min_[i] + 1.0;
  }
}

Eigen::Vector2d SvgCanvas::map(const Eigen::Vector2d& p) const {
  const double sx = (width_ - 2 * pad_) / (max_.x() - min_.x());
  const double sy = (height_ - 2 * pad_) / (max_.y() - min_.y());
  return {pad_ + (p.x() - min_.x()) * sx, height_ - pad_ - (p.y() - min_.y()) * sy};
}

void SvgCanvas::line(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const std::string& stroke, double width) {
  const Eigen::Vector2d pa = map(a);
  const Eigen::Vector2d pb = map(b);
  body_ += "<line x1=\"" + num(pa.x()) + "\" y1=\"" + num(pa.y()) + "\" x2=\"" + num(pb.x()) + "\" y2=\"" +
           num(pb.y()) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<Eigen::Vector2d>& points, const std::string& stroke, double width) {
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\" points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector2d p = map(points[i]);
    body_ += (i ? " " : "") + num(p.x()) + "," + num(p.y());
  }
  body_ += "\"/>\n";
}

void SvgCanvas::circle(const Eigen::Vector2d& c, double data_radius, const std::string& fill) {
  const Eigen::Vector2d pc = map(c);
  const double r = std::abs(map(c + Eigen::Vector2d(data_radius, 0.0)).x() - pc.x());
  body_ += "<circle cx=\"" + num(pc.x()) + "\" cy=\"" + num(pc.y()) + "\" r=\"" + num(r) + "\" fill=\"" + fill +
           "\"/>\n";
}

void SvgCanvas::dot(const Eigen::Vector2d& c, double pixel_radius, const std::string& fill) {
  const Eigen::Vector2d pc = map(c);
  body_ += "<circle cx=\"" + num(pc.x()) + "\" cy=\"" + num(pc.y()) + "\" r=\"" + num(pixel_radius) +
           "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::rect(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, const std::string& fill) {
  const Eigen::Vector2d a = map(lo);
  const Eigen::Vector2d b = map(hi);
  body_ += "<rect x=\"" + num(std::min(a.x(), b.x())) + "\" y=\"" + num(std::min(a.y(), b.y())) + "\" width=\"" +
           num(std::abs(b.x() - a.x())) + "\" height=\"" + num(std::abs(b.y() - a.y())) + "\" fill=\"" + fill +
           "\"/>\n";
}

void SvgCanvas::text(const Eigen::Vector2d& p, const std::string& label, double size, const std::string& anchor) {
  const Eigen::Vector2d q = map(p);
  raw_text(q.x(), q.y(), label, size, anchor);
}

void SvgCanvas::raw_text(double x, double y, const std::string& label, double size, const std::string& anchor) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" + num(size) +
           "\" text-anchor=\"" + anchor + "\">" + escape_xml(label) + "</text>\n";
}

void SvgCanvas::frame() {
  body_ += "<rect x=\"" + num(pad_) + "\" y=\"" + num(pad_) + "\" width=\"" + num(width_ - 2 * pad_) +
           "\" height=\"" + num(height_ - 2 * pad_) + "\" fill=\"none\" stroke=\"#444\"/>\n";
}

std::string SvgCanvas::str() const {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
      << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_ << "</svg>\n";
  return out.str();
}

}  // namespace safecorridor::tools
