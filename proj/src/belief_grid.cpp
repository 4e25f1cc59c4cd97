#include "osa/belief_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osa/error.hpp"

namespace osa {

namespace {

constexpr double kMergeTol = 1e-12;

} // namespace

BeliefGrid::BeliefGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "belief grid needs at least 2 points");
  }
  if (points_.front() != 0.0 || points_.back() != 1.0) {
    throw Error(ErrorKind::InvalidArgument, "belief grid must span [0,1]");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) {
      throw Error(ErrorKind::InvalidArgument,
                  "belief grid must be strictly increasing (index " +
                      std::to_string(i) + ")");
    }
  }
}

BeliefGrid BeliefGrid::uniform(std::size_t intervals,
                               std::initializer_list<double> extras) {
  if (intervals < 1) {
    throw Error(ErrorKind::InvalidArgument, "belief grid needs >= 1 interval");
  }
  std::vector<double> pts;
  pts.reserve(intervals + 1 + extras.size());
  for (std::size_t i = 0; i <= intervals; ++i) {
    pts.push_back(static_cast<double>(i) / static_cast<double>(intervals));
  }
  for (double x : extras) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "grid extra outside [0,1]");
    }
    auto it = std::lower_bound(pts.begin(), pts.end(), x - kMergeTol);
    if (it != pts.end() && std::abs(*it - x) <= kMergeTol) {
      // Endpoints stay exact so the grid still spans [0,1].
      if (*it != 0.0 && *it != 1.0) {
        *it = x;
      }
    } else {
      pts.insert(it, x);
    }
  }
  return BeliefGrid(std::move(pts));
}

BeliefGrid BeliefGrid::for_channel(const ChannelParams &p,
                                   std::size_t intervals) {
  return uniform(intervals, {p.alpha, p.beta, stationary_idle(p)});
}

std::size_t BeliefGrid::index_of(double belief) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), belief);
  if (it == points_.end() || *it != belief) {
    throw Error(ErrorKind::InvalidArgument,
                "belief " + std::to_string(belief) + " is not a grid point");
  }
  return static_cast<std::size_t>(it - points_.begin());
}

std::size_t BeliefGrid::nearest(double belief) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), belief);
  if (it == points_.begin()) {
    return 0;
  }
  if (it == points_.end()) {
    return points_.size() - 1;
  }
  const auto hi = static_cast<std::size_t>(it - points_.begin());
  return (belief - points_[hi - 1] <= points_[hi] - belief) ? hi - 1 : hi;
}

BeliefGrid::Bracket BeliefGrid::locate(double belief) const {
  const double x = std::clamp(belief, 0.0, 1.0);
  auto it = std::upper_bound(points_.begin(), points_.end(), x);
  std::size_t lo = it == points_.begin()
                       ? 0
                       : static_cast<std::size_t>(it - points_.begin()) - 1;
  lo = std::min(lo, points_.size() - 2);
  const double w = (x - points_[lo]) / (points_[lo + 1] - points_[lo]);
  return {lo, w};
}

double BeliefGrid::resolution() const {
  double r = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    r = std::max(r, points_[i] - points_[i - 1]);
  }
  return r;
}

} // namespace osa
