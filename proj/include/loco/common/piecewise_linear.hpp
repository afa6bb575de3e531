#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace loco {

struct Knot {
  double x = 0.0;
  double y = 0.0;
};

// Piecewise-linear map over sorted knots. Inputs beyond either end hold
// the end value.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw std::invalid_argument("piecewise-linear map needs at least 2 knots");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (!(knots_[i].x > knots_[i - 1].x)) {
        throw std::invalid_argument("piecewise-linear knots must have strictly increasing x");
      }
    }
  }

  double operator()(double x) const {
    if (x <= knots_.front().x) return knots_.front().y;
    if (x >= knots_.back().x) return knots_.back().y;
    std::size_t hi = 1;
    while (knots_[hi].x < x) ++hi;
    const Knot& a = knots_[hi - 1];
    const Knot& b = knots_[hi];
    const double t = (x - a.x) / (b.x - a.x);
    return a.y + t * (b.y - a.y);
  }

  bool non_decreasing() const {
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (knots_[i].y < knots_[i - 1].y) return false;
    }
    return true;
  }

  const std::vector<Knot>& knots() const { return knots_; }
  bool empty() const { return knots_.empty(); }

 private:
  std::vector<Knot> knots_;
};

}  // namespace loco
