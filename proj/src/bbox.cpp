#include "swintrack/bbox.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swintrack {

bool BBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) && w > 0.0 &&
         h > 0.0;
}

namespace {

double intersection(const BBox& a, const BBox& b) {
  const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  return iw * ih;
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const double inter = intersection(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double giou(const BBox& a, const BBox& b) {
  const double inter = intersection(a, b);
  const double uni = a.area() + b.area() - inter;
  const double enclosing = (std::max(a.right(), b.right()) - std::min(a.x, b.x)) *
                           (std::max(a.bottom(), b.bottom()) - std::min(a.y, b.y));
  if (uni <= 0.0 || enclosing <= 0.0) return 0.0;
  return inter / uni - (enclosing - uni) / enclosing;
}

double center_distance(const BBox& a, const BBox& b) {
  return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

std::string to_string(const BBox& box) {
  std::ostringstream os;
  os << box.x << ',' << box.y << ',' << box.w << ',' << box.h;
  return os.str();
}

}  // namespace swintrack
