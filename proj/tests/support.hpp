#pragma once

// Conversions between library types and the oracle's plain vectors.

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "maximin/kernel.hpp"
#include "oracle.hpp"

namespace support {

inline oracle::Vec to_vec(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return oracle::Vec(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd to_eigen(const oracle::Vec& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Eigen::VectorXd pt(std::initializer_list<double> xs) {
  return to_eigen(oracle::Vec(xs));
}

struct RandomSet {
  oracle::Points xs;
  oracle::Vec ys;
  maximin::LabeledSet set;
};

/// n distinct uniform points in [0, scale]^d with random labels.
inline RandomSet random_set(std::mt19937_64& rng, std::size_t n, std::size_t d, double scale = 1.0) {
  std::uniform_real_distribution<double> unit(0.0, scale);
  RandomSet out;
  for (std::size_t i = 0; i < n; ++i) {
    oracle::Vec x(d);
    for (auto& c : x) c = unit(rng);
    const int y = rng() % 2 == 0 ? 1 : -1;
    out.set.add(to_eigen(x), y);
    out.xs.push_back(x);
    out.ys.push_back(y);
  }
  return out;
}

}  // namespace support
