#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "osa/channel.hpp"

namespace osa {

/// Strictly increasing belief points covering [0, 1].
class BeliefGrid {
public:
  /// Position of a belief between two adjacent points: value = (1-w) v[lo] + w v[lo+1].
  struct Bracket {
    std::size_t lo = 0;
    double weight = 0.0;
  };

  explicit BeliefGrid(std::vector<double> points);

  /// `intervals + 1` evenly spaced points with `extras` inserted exactly.
  /// Uniform points within 1e-12 of an extra are replaced by the extra.
  static BeliefGrid uniform(std::size_t intervals,
                            std::initializer_list<double> extras = {});

  /// Uniform grid with alpha, beta and pi(0) inserted.
  static BeliefGrid for_channel(const ChannelParams &p,
                                std::size_t intervals = 1000);

  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  std::span<const double> points() const { return points_; }

  /// Index of a point equal to `belief`; throws InvalidArgument if absent.
  std::size_t index_of(double belief) const;
  std::size_t nearest(double belief) const;
  Bracket locate(double belief) const;

  /// Largest spacing between adjacent points.
  double resolution() const;

private:
  std::vector<double> points_;
};

} // namespace osa
