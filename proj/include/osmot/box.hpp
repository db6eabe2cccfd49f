#pragma once

namespace osmot {

/// Axis-aligned box in centre form, pixels.
struct Box {
  double cx = 0;
  double cy = 0;
  double w = 0;
  double h = 0;

  static Box from_tlwh(double left, double top, double width, double height) {
    return {left + width / 2, top + height / 2, width, height};
  }

  double left() const { return cx - w / 2; }
  double top() const { return cy - h / 2; }
  double right() const { return cx + w / 2; }
  double bottom() const { return cy + h / 2; }
  double area() const { return w * h; }

  bool operator==(const Box&) const = default;
};

/// Intersection over union; 0 for disjoint or empty boxes.
double iou(const Box& a, const Box& b);

}  // namespace osmot
