// src/fullsum/acoustic_model.cc
//
// Copyright 2026 The fullsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fullsum/acoustic_model.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "fullsum/models.h"
#include "fullsum/text_util.h"

namespace fullsum {

namespace {

void PutU32(std::ostream &out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void PutU64(std::ostream &out, std::uint64_t v) {
  PutU32(out, static_cast<std::uint32_t>(v));
  PutU32(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t GetU32(std::istream &in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char *>(b), 4)) DataError("truncated checkpoint");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t GetU64(std::istream &in) {
  std::uint64_t lo = GetU32(in);
  std::uint64_t hi = GetU32(in);
  return lo | (hi << 32);
}

void PutTensor(std::ostream &out, const Matrix &m) {
  PutU32(out, static_cast<std::uint32_t>(m.rows()));
  PutU32(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i)
    PutU64(out, std::bit_cast<std::uint64_t>(m.data()[i]));
}

Matrix GetTensor(std::istream &in) {
  std::uint32_t rows = GetU32(in), cols = GetU32(in);
  if (static_cast<std::uint64_t>(rows) * cols > (1u << 28))
    DataError("checkpoint tensor too large");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = std::bit_cast<double>(GetU64(in));
  return m;
}

}  // namespace

void AcousticModel::Params::SetZeroLike(const Params &other) {
  w1 = Matrix::Zero(other.w1.rows(), other.w1.cols());
  b1 = Vector::Zero(other.b1.size());
  w2 = Matrix::Zero(other.w2.rows(), other.w2.cols());
  b2 = Vector::Zero(other.b2.size());
}

void AcousticModel::Params::AddScaled(const Params &other, double scale) {
  w1 += scale * other.w1;
  b1 += scale * other.b1;
  w2 += scale * other.w2;
  b2 += scale * other.b2;
}

void AcousticModel::Params::Scale(double scale) {
  w1 *= scale;
  b1 *= scale;
  w2 *= scale;
  b2 *= scale;
}

double AcousticModel::Params::SquaredNorm() const {
  return w1.squaredNorm() + b1.squaredNorm() + w2.squaredNorm() +
         b2.squaredNorm();
}

AcousticModel::AcousticModel(const AcousticModelShape &shape,
                             std::uint64_t seed)
    : shape_(shape) {
  if (shape.input_dim < 1 || shape.hidden_dim < 1 || shape.num_labels < 2 ||
      shape.subsample < 1)
    ConfigError("invalid acoustic model shape");
  std::mt19937_64 rng(seed);
  auto fill = [&rng](Matrix &m, int fan_in, int fan_out) {
    double r = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-r, r);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  };
  params_.w1.resize(shape.input_dim, shape.hidden_dim);
  params_.w2.resize(shape.hidden_dim, shape.num_labels);
  fill(params_.w1, shape.input_dim, shape.hidden_dim);
  fill(params_.w2, shape.hidden_dim, shape.num_labels);
  params_.b1 = Vector::Zero(shape.hidden_dim);
  params_.b2 = Vector::Zero(shape.num_labels);
}

AcousticModel::Activations AcousticModel::Forward(
    const Matrix &features) const {
  if (features.cols() != shape_.input_dim)
    DataError("feature dimension " + std::to_string(features.cols()) +
              " does not match model input " +
              std::to_string(shape_.input_dim));
  if (features.rows() < 1) DataError("utterance has no frames");
  Activations act;
  act.hidden = features * params_.w1;
  act.hidden.rowwise() += params_.b1.transpose();
  act.hidden = act.hidden.array().tanh().matrix();

  const int t_in = static_cast<int>(features.rows());
  const int f = shape_.subsample;
  const int t_out = (t_in + f - 1) / f;
  const int h = shape_.hidden_dim;
  act.pooled.resize(t_out, h);
  act.argmax.resize(t_out, h);
  for (int u = 0; u < t_out; ++u) {
    int lo = u * f, hi = std::min(t_in, lo + f);
    for (int j = 0; j < h; ++j) {
      int best = lo;
      for (int t = lo + 1; t < hi; ++t)
        if (act.hidden(t, j) > act.hidden(best, j)) best = t;
      act.pooled(u, j) = act.hidden(best, j);
      act.argmax(u, j) = best;
    }
  }
  act.logits = act.pooled * params_.w2;
  act.logits.rowwise() += params_.b2.transpose();
  return act;
}

FrameScores AcousticModel::LogPosteriors(const Matrix &features,
                                         double frame_shift_ms) const {
  FrameScores out;
  out.scores = LogSoftmax(Forward(features).logits);
  out.frame_shift_ms = frame_shift_ms * shape_.subsample;
  return out;
}

void AcousticModel::Backward(const Matrix &features, const Activations &act,
                             const Matrix &dlogits, Params *grads) const {
  grads->w2.noalias() += act.pooled.transpose() * dlogits;
  grads->b2 += dlogits.colwise().sum().transpose();
  Matrix dpooled = dlogits * params_.w2.transpose();
  Matrix dhidden = Matrix::Zero(act.hidden.rows(), act.hidden.cols());
  for (Eigen::Index u = 0; u < dpooled.rows(); ++u)
    for (Eigen::Index j = 0; j < dpooled.cols(); ++j)
      dhidden(act.argmax(u, j), j) += dpooled(u, j);
  Matrix dpre =
      (dhidden.array() * (1.0 - act.hidden.array().square())).matrix();
  grads->w1.noalias() += features.transpose() * dpre;
  grads->b1 += dpre.colwise().sum().transpose();
}

void AcousticModel::Save(const std::string &path, std::uint64_t fingerprint,
                         const std::string &config_text) const {
  std::ostringstream out(std::ios::binary);
  out.write("AMD1", 4);
  PutU64(out, fingerprint);
  PutU32(out, static_cast<std::uint32_t>(config_text.size()));
  out.write(config_text.data(), static_cast<std::streamsize>(config_text.size()));
  Matrix shape(1, 4);
  shape << shape_.input_dim, shape_.hidden_dim, shape_.num_labels,
      shape_.subsample;
  PutU32(out, 5);
  PutTensor(out, shape);
  PutTensor(out, params_.w1);
  PutTensor(out, params_.b1.transpose());
  PutTensor(out, params_.w2);
  PutTensor(out, params_.b2.transpose());
  WriteFileAtomic(path, out.str());
}

AcousticModel AcousticModel::Load(const std::string &path,
                                  std::uint64_t *fingerprint,
                                  std::string *config_text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) DataError("cannot open checkpoint '" + path + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "AMD1")
    DataError("'" + path + "' is not an AMD1 checkpoint");
  std::uint64_t fp = GetU64(in);
  std::uint32_t len = GetU32(in);
  if (len > (1u << 20)) DataError("checkpoint config text too large");
  std::string text(len, '\0');
  if (!in.read(text.data(), len)) DataError("truncated checkpoint");
  if (GetU32(in) != 5) DataError("checkpoint has unexpected tensor count");
  Matrix shape = GetTensor(in);
  if (shape.rows() != 1 || shape.cols() != 4)
    DataError("checkpoint shape tensor malformed");
  AcousticModel model;
  model.shape_.input_dim = static_cast<int>(shape(0, 0));
  model.shape_.hidden_dim = static_cast<int>(shape(0, 1));
  model.shape_.num_labels = static_cast<int>(shape(0, 2));
  model.shape_.subsample = static_cast<int>(shape(0, 3));
  model.params_.w1 = GetTensor(in);
  model.params_.b1 = GetTensor(in).transpose();
  model.params_.w2 = GetTensor(in);
  model.params_.b2 = GetTensor(in).transpose();
  const auto &s = model.shape_;
  const auto &p = model.params_;
  if (p.w1.rows() != s.input_dim || p.w1.cols() != s.hidden_dim ||
      p.b1.size() != s.hidden_dim || p.w2.rows() != s.hidden_dim ||
      p.w2.cols() != s.num_labels || p.b2.size() != s.num_labels ||
      s.subsample < 1)
    DataError("checkpoint tensors inconsistent with declared shape");
  if (fingerprint) *fingerprint = fp;
  if (config_text) *config_text = std::move(text);
  return model;
}

}  // namespace fullsum
