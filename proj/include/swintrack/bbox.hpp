#pragma once

#include <string>

namespace swintrack {

// Axis-aligned box, top-left corner plus extent, in pixels.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }
  double area() const { return w * h; }
  // Finite with positive width and height.
  bool valid() const;

  static BBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, w, h};
  }
  friend bool operator==(const BBox&, const BBox&) = default;
};

// Intersection over union in [0, 1].
double iou(const BBox& a, const BBox& b);
// Generalised IoU in (-1, 1]: iou - (enclosing - union) / enclosing.
double giou(const BBox& a, const BBox& b);
double center_distance(const BBox& a, const BBox& b);

std::string to_string(const BBox& box);

}  // namespace swintrack
