#pragma once

#include <vector>

#include "priorreg/mlp.hpp"

namespace priorreg {

// Augmented forward pass over a batch of points: the value stream plus, per
// requested direction, first (and optionally second) Taylor-coefficient
// streams. Caches enough intermediates to reverse-accumulate exact parameter
// gradients of any scalar assembled from the outputs, including terms that
// flow through second-order input derivatives.
class MlpTape {
 public:
  // dirs entries must already have length params.input_dim(); they are used
  // as given (normalization policy lives in mlp_jet).
  MlpTape(const MlpParams& params, const Matrix& x,
          const std::vector<Direction>& dirs, int order);

  const Matrix& value() const { return h_.back(); }
  const Matrix& d1(std::size_t dir_index) const { return d1_[dir_index].back(); }
  const Matrix& d2(std::size_t dir_index) const { return d2_[dir_index].back(); }
  int order() const { return order_; }
  std::size_t dir_count() const { return dirs_.size(); }
  Eigen::Index point_count() const { return h_.front().cols(); }

  // Seeds are d(scalar)/d(output stream); empty matrices mean zero seed.
  // Accumulates into grad.
  void backward(const Matrix& seed_value, const std::vector<Matrix>& seed_d1,
                const std::vector<Matrix>& seed_d2, ParamGradient& grad) const;

 private:
  const MlpParams& params_;
  std::vector<Direction> dirs_;
  int order_;
  // h_[k]: stream values entering layer k (h_[0] is the input batch,
  // h_[layers] the network output).
  std::vector<Matrix> h_;
  std::vector<std::vector<Matrix>> d1_, d2_;   // per direction, per interface
  std::vector<std::vector<Matrix>> zp_, zpp_;  // pre-activation derivative
                                               // streams at hidden layers
};

}  // namespace priorreg
