// src/fullsum/acoustic_model.h
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

#ifndef FULLSUM_ACOUSTIC_MODEL_H_
#define FULLSUM_ACOUSTIC_MODEL_H_

#include <cstdint>
#include <string>

#include "fullsum/common.h"
#include "fullsum/lattice.h"

namespace fullsum {

struct AcousticModelShape {
  int input_dim = 0;
  int hidden_dim = 32;
  int num_labels = 0;
  int subsample = 1;  // max-pool factor applied to hidden activations
};

// Framewise toy model: tanh(x W1 + b1), max-pooled over |subsample| frames,
// then an affine map to label logits and a log-softmax.
class AcousticModel {
 public:
  struct Params {
    Matrix w1;  // D x H
    Vector b1;
    Matrix w2;  // H x L
    Vector b2;

    void SetZeroLike(const Params &other);
    void AddScaled(const Params &other, double scale);
    void Scale(double scale);
    double SquaredNorm() const;
  };

  struct Activations {
    Matrix hidden;   // T x H, after tanh
    Matrix pooled;   // T' x H
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        argmax;      // T' x H source frame of each pooled value
    Matrix logits;   // T' x L
  };

  AcousticModel() = default;
  AcousticModel(const AcousticModelShape &shape, std::uint64_t seed);

  const AcousticModelShape &shape() const { return shape_; }
  const Params &params() const { return params_; }
  Params &mutable_params() { return params_; }

  Activations Forward(const Matrix &features) const;
  // Log posteriors at the subsampled rate; frame shift is multiplied by the
  // subsample factor.
  FrameScores LogPosteriors(const Matrix &features,
                            double frame_shift_ms) const;
  // Backpropagates d loss / d logits into |grads| (accumulating).
  void Backward(const Matrix &features, const Activations &act,
                const Matrix &dlogits, Params *grads) const;

  // AMD1 container: magic, u64 fingerprint, u32 length + config text,
  // u32 tensor count, then per tensor u32 rows, u32 cols, f64 data.
  void Save(const std::string &path, std::uint64_t fingerprint,
            const std::string &config_text) const;
  static AcousticModel Load(const std::string &path,
                            std::uint64_t *fingerprint = nullptr,
                            std::string *config_text = nullptr);

 private:
  AcousticModelShape shape_;
  Params params_;
};

}  // namespace fullsum

#endif  // FULLSUM_ACOUSTIC_MODEL_H_
