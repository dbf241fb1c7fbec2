#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace safecorridor::tools {

/// Minimal SVG canvas with a data-to-pixel mapping (y up in data space).
class SvgCanvas {
 public:
  SvgCanvas(double width, double height, Eigen::Vector2d data_min, Eigen::Vector2d data_max, double pad = 40.0);

  Eigen::Vector2d map(const Eigen::Vector2d& p) const;

  void line(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const std::string& stroke, double width = 1.0);
  void polyline(const std::vector<Eigen::Vector2d>& points, const std::string& stroke, double width = 1.5);
  void circle(const Eigen::Vector2d& c, double data_radius, const std::string& fill);
  void dot(const Eigen::Vector2d& c, double pixel_radius, const std::string& fill);
  void rect(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, const std::string& fill);
  void text(const Eigen::Vector2d& p, const std::string& label, double size = 12.0, const std::string& anchor = "middle");
  /// Pixel-space text, unaffected by the data mapping.
  void raw_text(double x, double y, const std::string& label, double size = 12.0, const std::string& anchor = "middle");
  void frame();

  std::string str() const;

 private:
  double width_;
  double height_;
  double pad_;
  Eigen::Vector2d min_;
  Eigen::Vector2d max_;
  std::string body_;
};

std::string escape_xml(const std::string& s);

}  // namespace safecorridor::tools
