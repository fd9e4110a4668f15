#include "priorreg/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "priorreg/rng.hpp"
#include "priorreg/tape.hpp"

namespace priorreg {

int MlpParams::input_dim() const {
  if (weights.empty()) throw std::invalid_argument("MlpParams: no layers");
  return static_cast<int>(weights.front().cols());
}

int MlpParams::output_dim() const {
  if (weights.empty()) throw std::invalid_argument("MlpParams: no layers");
  return static_cast<int>(weights.back().rows());
}

std::size_t MlpParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

void MlpParams::validate() const {
  if (weights.empty() || weights.size() != biases.size())
    throw std::invalid_argument("MlpParams: layer weight/bias lists must be non-empty and equal length");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (biases[l].size() != weights[l].rows())
      throw std::invalid_argument("MlpParams: bias length mismatch at layer " + std::to_string(l));
    if (l + 1 < weights.size() && weights[l + 1].cols() != weights[l].rows())
      throw std::invalid_argument("MlpParams: layer shapes do not chain at layer " + std::to_string(l));
    if (!weights[l].allFinite() || !biases[l].allFinite())
      throw std::invalid_argument("MlpParams: non-finite entry at layer " + std::to_string(l));
  }
}

Vector MlpParams::flatten() const {
  Vector flat(scalar_count());
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.segment(at, weights[l].size()) = Eigen::Map<const Vector>(weights[l].data(), weights[l].size());
    at += weights[l].size();
    flat.segment(at, biases[l].size()) = biases[l];
    at += biases[l].size();
  }
  return flat;
}

void MlpParams::assign_from_flat(const Vector& flat) {
  if (flat.size() != static_cast<Eigen::Index>(scalar_count()))
    throw std::invalid_argument("assign_from_flat: size mismatch");
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::Map<Vector>(weights[l].data(), weights[l].size()) = flat.segment(at, weights[l].size());
    at += weights[l].size();
    biases[l] = flat.segment(at, biases[l].size());
    at += biases[l].size();
  }
}

MlpParams glorot_init(const std::vector<int>& layer_dims, std::uint64_t seed,
                      Activation activation) {
  if (layer_dims.size() < 2)
    throw std::invalid_argument("glorot_init: need at least input and output dims");
  Rng rng(seed);
  MlpParams params;
  params.activation = activation;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-a, a);
    params.weights.push_back(std::move(w));
    params.biases.push_back(Vector::Zero(fan_out));
  }
  return params;
}

ParamGradient ParamGradient::zeros_like(const MlpParams& params) {
  ParamGradient g;
  for (const auto& w : params.weights) g.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : params.biases) g.biases.push_back(Vector::Zero(b.size()));
  return g;
}

void ParamGradient::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

Vector ParamGradient::flatten() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  Vector flat(n);
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.segment(at, weights[l].size()) = Eigen::Map<const Vector>(weights[l].data(), weights[l].size());
    at += weights[l].size();
    flat.segment(at, biases[l].size()) = biases[l];
    at += biases[l].size();
  }
  return flat;
}

bool ParamGradient::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

Matrix mlp_forward_batch(const MlpParams& params, const Matrix& x) {
  params.validate();
  if (x.rows() != params.input_dim())
    throw std::invalid_argument("mlp_forward: input dim mismatch");
  Matrix h = x;
  const std::size_t layers = params.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix z = (params.weights[l] * h).colwise() + params.biases[l];
    if (l + 1 < layers)
      h = z.array().tanh().matrix();
    else
      h = std::move(z);
  }
  return h;
}

Vector mlp_forward(const MlpParams& params, const Vector& x) {
  return mlp_forward_batch(params, x);
}

Jet2 mlp_jet(const MlpParams& params, const Vector& x,
             const std::vector<Direction>& dirs, int order) {
  params.validate();
  if (order != 1 && order != 2) throw std::invalid_argument("mlp_jet: order must be 1 or 2");
  if (!x.allFinite()) throw std::domain_error("mlp_jet: non-finite input point");

  Jet2 jet;
  std::vector<Direction> unit_dirs;
  unit_dirs.reserve(dirs.size());
  for (const auto& d : dirs) {
    if (d.dir.size() != params.input_dim())
      throw std::invalid_argument("mlp_jet: direction length mismatch for '" + d.label + "'");
    const double norm = d.dir.norm();
    if (norm == 0.0) throw std::invalid_argument("mlp_jet: zero direction '" + d.label + "'");
    Direction u = d;
    if (std::abs(norm - 1.0) > 1e-12) {
      u.dir /= norm;
      jet.normalized_direction = true;
    }
    unit_dirs.push_back(std::move(u));
  }

  MlpTape tape(params, x, unit_dirs, order);
  jet.value = tape.value();
  for (std::size_t i = 0; i < unit_dirs.size(); ++i) {
    jet.d1[unit_dirs[i].label] = tape.d1(i);
    if (order == 2) jet.d2[unit_dirs[i].label] = tape.d2(i);
  }
  return jet;
}

namespace {

inline Matrix tanh_d1(const Matrix& t) { return (1.0 - t.array().square()).matrix(); }

}  // namespace

MlpTape::MlpTape(const MlpParams& params, const Matrix& x,
                 const std::vector<Direction>& dirs, int order)
    : params_(params), dirs_(dirs), order_(order) {
  const std::size_t layers = params.layer_count();
  const Eigen::Index n = x.cols();
  const std::size_t ndir = dirs.size();

  h_.resize(layers + 1);
  h_[0] = x;
  d1_.assign(ndir, {});
  d2_.assign(ndir, {});
  zp_.assign(ndir, std::vector<Matrix>(layers));
  zpp_.assign(ndir, std::vector<Matrix>(layers));
  for (std::size_t i = 0; i < ndir; ++i) {
    d1_[i].resize(layers + 1);
    d1_[i][0] = dirs[i].dir.replicate(1, n);
    if (order_ == 2) {
      d2_[i].resize(layers + 1);
      d2_[i][0] = Matrix::Zero(x.rows(), n);
    }
  }

  for (std::size_t l = 0; l < layers; ++l) {
    const Matrix& w = params.weights[l];
    const bool hidden = l + 1 < layers;
    Matrix z = (w * h_[l]).colwise() + params.biases[l];
    if (!hidden) {
      h_[l + 1] = std::move(z);
      for (std::size_t i = 0; i < ndir; ++i) {
        d1_[i][l + 1].noalias() = w * d1_[i][l];
        if (order_ == 2) d2_[i][l + 1].noalias() = w * d2_[i][l];
      }
      continue;
    }
    const Matrix t = z.array().tanh().matrix();
    h_[l + 1] = t;
    const Matrix s = tanh_d1(t);                       // sigma'
    const Matrix a2 = (-2.0 * t.array() * s.array()).matrix();  // sigma''
    for (std::size_t i = 0; i < ndir; ++i) {
      Matrix& zp = zp_[i][l];
      zp.noalias() = w * d1_[i][l];
      d1_[i][l + 1] = (s.array() * zp.array()).matrix();
      if (order_ == 2) {
        Matrix& zpp = zpp_[i][l];
        zpp.noalias() = w * d2_[i][l];
        d2_[i][l + 1] =
            (a2.array() * zp.array().square() + s.array() * zpp.array()).matrix();
      }
    }
  }
}

void MlpTape::backward(const Matrix& seed_value, const std::vector<Matrix>& seed_d1,
                       const std::vector<Matrix>& seed_d2, ParamGradient& grad) const {
  const std::size_t layers = params_.layer_count();
  const std::size_t ndir = dirs_.size();
  const Eigen::Index n = h_[0].cols();
  const Eigen::Index out = params_.output_dim();

  auto seed_or_zero = [&](const Matrix& m) {
    return m.size() == 0 ? Matrix::Zero(out, n).eval() : m;
  };

  Matrix ah = seed_or_zero(seed_value);
  std::vector<Matrix> ad1(ndir), ad2(ndir);
  for (std::size_t i = 0; i < ndir; ++i) {
    ad1[i] = seed_or_zero(i < seed_d1.size() ? seed_d1[i] : Matrix());
    if (order_ == 2) ad2[i] = seed_or_zero(i < seed_d2.size() ? seed_d2[i] : Matrix());
  }

  Matrix az;
  std::vector<Matrix> az1(ndir), az2(ndir);
  for (std::size_t li = layers; li-- > 0;) {
    const Matrix& w = params_.weights[li];
    const bool hidden = li + 1 < layers;
    if (!hidden) {
      az = std::move(ah);
      for (std::size_t i = 0; i < ndir; ++i) {
        az1[i] = std::move(ad1[i]);
        if (order_ == 2) az2[i] = std::move(ad2[i]);
      }
    } else {
      const Matrix& t = h_[li + 1];
      const Eigen::ArrayXXd s = 1.0 - t.array().square();
      const Eigen::ArrayXXd a2 = -2.0 * t.array() * s;
      const Eigen::ArrayXXd a3 = (6.0 * t.array().square() - 2.0) * s;  // sigma'''
      Eigen::ArrayXXd az_acc = ah.array() * s;
      for (std::size_t i = 0; i < ndir; ++i) {
        const Eigen::ArrayXXd zp = zp_[i][li].array();
        az_acc += ad1[i].array() * a2 * zp;
        az1[i] = (ad1[i].array() * s).matrix();
        if (order_ == 2) {
          const Eigen::ArrayXXd zpp = zpp_[i][li].array();
          az_acc += ad2[i].array() * (a3 * zp.square() + a2 * zpp);
          az1[i] += (2.0 * ad2[i].array() * a2 * zp).matrix();
          az2[i] = (ad2[i].array() * s).matrix();
        }
      }
      az = az_acc.matrix();
    }

    grad.weights[li].noalias() += az * h_[li].transpose();
    grad.biases[li] += az.rowwise().sum();
    for (std::size_t i = 0; i < ndir; ++i) {
      grad.weights[li].noalias() += az1[i] * d1_[i][li].transpose();
      if (order_ == 2) grad.weights[li].noalias() += az2[i] * d2_[i][li].transpose();
    }

    if (li > 0) {
      ah = w.transpose() * az;
      for (std::size_t i = 0; i < ndir; ++i) {
        ad1[i] = w.transpose() * az1[i];
        if (order_ == 2) ad2[i] = w.transpose() * az2[i];
      }
    }
  }
}

}  // namespace priorreg
