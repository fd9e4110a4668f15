#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace priorreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { Tanh };

// Trainable weights of the surrogate network. Hidden layers apply the
// activation, the final layer is affine.
struct MlpParams {
  std::vector<Matrix> weights;  // out_dim x in_dim per layer
  std::vector<Vector> biases;
  Activation activation = Activation::Tanh;

  int input_dim() const;
  int output_dim() const;
  std::size_t layer_count() const { return weights.size(); }
  std::size_t scalar_count() const;

  // Throws std::invalid_argument on shape mismatch or non-finite entries.
  void validate() const;

  Vector flatten() const;
  void assign_from_flat(const Vector& flat);
};

// Glorot-uniform weights, zero biases. layer_dims = {in, hidden..., out}.
MlpParams glorot_init(const std::vector<int>& layer_dims, std::uint64_t seed,
                      Activation activation = Activation::Tanh);

// One real per trainable scalar, shape-congruent with the MlpParams it
// differentiates.
struct ParamGradient {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static ParamGradient zeros_like(const MlpParams& params);
  void set_zero();
  Vector flatten() const;
  bool all_finite() const;
};

struct Direction {
  std::string label;
  Vector dir;
};

// Network value plus first/second directional input derivatives at one point.
struct Jet2 {
  Vector value;
  std::map<std::string, Vector> d1;
  std::map<std::string, Vector> d2;
  bool normalized_direction = false;  // a non-unit direction was rescaled
};

Vector mlp_forward(const MlpParams& params, const Vector& x);

// Batched forward; points are columns of x.
Matrix mlp_forward_batch(const MlpParams& params, const Matrix& x);

// Exact directional derivatives (no finite differencing): propagates
// truncated Taylor coefficients through the forward pass per direction.
// order 1 fills d1 only; order 2 fills d1 and d2.
Jet2 mlp_jet(const MlpParams& params, const Vector& x,
             const std::vector<Direction>& dirs, int order);

}  // namespace priorreg
