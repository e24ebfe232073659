// Copyright 2026 The SRKD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SRKD_LOSSES_HPP_
#define SRKD_LOSSES_HPP_

#include <cstddef>
#include <string>

#include "srkd/tensor.hpp"

namespace srkd {

enum class KDMode { kSparse, kDefault };
enum class KLDirection { kTeacherFirst, kStudentFirst };

const char* to_string(KDMode mode);
const char* to_string(KLDirection direction);
KDMode kd_mode_from_string(const std::string& name);
KLDirection kl_direction_from_string(const std::string& name);

// Distillation hyperparameters. `loss_alpha` weighs the KL term against the
// hard-label cross-entropy. `harmonized` makes the virtual-teacher loss use
// the same T^2-scaled, softened student as the pruned-teacher loss.
struct KDConfig {
  KDMode mode = KDMode::kSparse;
  double temperature = 4.0;
  double loss_alpha = 0.9;
  KLDirection kl_direction = KLDirection::kTeacherFirst;
  bool harmonized = false;

  void validate() const;
  friend bool operator==(const KDConfig&, const KDConfig&) = default;
};

// Hand-designed teacher: probability teacher_alpha on the true class and the
// remaining mass spread evenly over the other C-1 classes.
struct VirtualTeacher {
  std::size_t num_classes = 2;
  double teacher_alpha = 0.95;

  static constexpr double kMaxAlpha = 1.0 - 1e-6;
  void validate() const;
};

Tensor virtual_teacher_dist(const VirtualTeacher& vt, std::size_t target);

// A scalar loss together with its gradient w.r.t. the student logits.
struct LossWithGrad {
  double value = 0.0;
  Tensor grad;
};

// CE(softmax(logits), label).
LossWithGrad cross_entropy_loss(const Tensor& logits, std::size_t label);

// alpha T^2 KL(Q_T^T || Q_S^T) + (1 - alpha) CE(Q_S, y), with Q_X^T the
// temperature-T softmax of X's logits (KL order per cfg.kl_direction).
double sparse_kd_loss(const Tensor& student_logits, const Tensor& teacher_logits, std::size_t label,
                      const KDConfig& cfg);
LossWithGrad sparse_kd_loss_grad(const Tensor& student_logits, const Tensor& teacher_logits,
                                 std::size_t label, const KDConfig& cfg);

// alpha KL(Q_T^T || Q_S) + (1 - alpha) CE(Q_S, y), where Q_T^T is
// softmax(ln(teacher_probs) / T) and Q_S is the unsoftened student. No T^2
// factor unless cfg.harmonized.
double default_kd_loss(const Tensor& student_logits, const Tensor& teacher_probs, std::size_t label,
                       const KDConfig& cfg);
LossWithGrad default_kd_loss_grad(const Tensor& student_logits, const Tensor& teacher_probs,
                                  std::size_t label, const KDConfig& cfg);

// softmax(ln(p) / T): the temperature-flattened form of a distribution.
Tensor flatten_distribution(const Tensor& probs, double temperature);

}  // namespace srkd

#endif  // SRKD_LOSSES_HPP_
