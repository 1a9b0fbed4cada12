#include "core/interferogram.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace spm {

Interferogram::Interferogram(FrequencyGrid g1, FrequencyGrid g2,
                             Eigen::ArrayXXd counts)
    : g1_(g1), g2_(g2) {
  planes_.push_back(std::move(counts));
  validate();
}

Interferogram::Interferogram(FrequencyGrid g1, FrequencyGrid g2,
                             FrequencyGrid herald_grid,
                             std::vector<Eigen::ArrayXXd> planes)
    : g1_(g1), g2_(g2), herald_(herald_grid), planes_(std::move(planes)) {
  if (static_cast<int>(planes_.size()) != herald_grid.n_bins())
    throw ConfigError("interferogram: plane count does not match herald grid");
  validate();
}

void Interferogram::validate() const {
  for (const auto& p : planes_) {
    if (p.rows() != g1_.n_bins() || p.cols() != g2_.n_bins())
      throw ConfigError("interferogram: plane dimensions do not match grids");
    if (!p.isFinite().all() || (p < 0.0).any())
      throw ConfigError("interferogram: counts must be finite and nonnegative");
  }
}

const FrequencyGrid& Interferogram::herald_grid() const {
  if (!herald_) throw ConfigError("interferogram: no herald axis");
  return *herald_;
}

Eigen::ArrayXXd Interferogram::counts() const {
  Eigen::ArrayXXd sum = Eigen::ArrayXXd::Zero(g1_.n_bins(), g2_.n_bins());
  for (const auto& p : planes_) sum += p;
  return sum;
}

double Interferogram::total() const {
  double t = 0.0;
  for (const auto& p : planes_) t += p.sum();
  return t;
}

Interferogram Interferogram::herald_slice(int j) const {
  if (!herald_) throw ConfigError("interferogram: no herald axis");
  return Interferogram(g1_, g2_, planes_.at(j));
}

}  // namespace spm
