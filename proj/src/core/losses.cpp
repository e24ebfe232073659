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

#include "srkd/losses.hpp"

#include <cmath>

#include "srkd/error.hpp"
#include "srkd/ops.hpp"

namespace srkd {

const char* to_string(KDMode mode) { return mode == KDMode::kSparse ? "sparse" : "default"; }

const char* to_string(KLDirection direction) {
  return direction == KLDirection::kTeacherFirst ? "teacher-first" : "student-first";
}

KDMode kd_mode_from_string(const std::string& name) {
  if (name == "sparse") return KDMode::kSparse;
  if (name == "default") return KDMode::kDefault;
  fail(ErrorKind::kUsage, "unknown KD mode '" + name + "' (expected sparse or default)");
}

KLDirection kl_direction_from_string(const std::string& name) {
  if (name == "teacher-first") return KLDirection::kTeacherFirst;
  if (name == "student-first") return KLDirection::kStudentFirst;
  fail(ErrorKind::kUsage, "unknown KL direction '" + name + "'");
}

void KDConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) fail(ErrorKind::kParameter, "temperature must be > 0");
  if (!(loss_alpha >= 0.0 && loss_alpha <= 1.0)) fail(ErrorKind::kParameter, "loss_alpha must be in [0, 1]");
}

void VirtualTeacher::validate() const {
  if (num_classes < 2) fail(ErrorKind::kParameter, "virtual teacher needs at least 2 classes");
  if (!(teacher_alpha > 0.9)) {
    fail(ErrorKind::kParameter, "teacher_alpha must be > 0.9, got " + std::to_string(teacher_alpha));
  }
  if (!(teacher_alpha <= kMaxAlpha)) {
    fail(ErrorKind::kParameter, "teacher_alpha must be < 1 (at most 1 - 1e-6)");
  }
}

Tensor virtual_teacher_dist(const VirtualTeacher& vt, std::size_t target) {
  vt.validate();
  if (target >= vt.num_classes) {
    fail(ErrorKind::kIndex, "target class " + std::to_string(target) + " out of range");
  }
  const double off = (1.0 - vt.teacher_alpha) / static_cast<double>(vt.num_classes - 1);
  Tensor p({vt.num_classes}, off);
  p[target] = vt.teacher_alpha;
  return p;
}

Tensor flatten_distribution(const Tensor& probs, double temperature) {
  Tensor logp(probs.shape());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0)) fail(ErrorKind::kParameter, "cannot flatten a distribution with zero entries");
    logp[i] = std::log(probs[i]);
  }
  return softmax_temperature(logp, temperature);
}

namespace {

void check_label(const Tensor& logits, std::size_t label) {
  if (logits.rank() != 1) fail(ErrorKind::kDimension, "logits must be 1-D");
  if (label >= logits.size()) {
    fail(ErrorKind::kIndex, "label " + std::to_string(label) + " out of range for " +
                                std::to_string(logits.size()) + " classes");
  }
}

// KL between a fixed target distribution and softmax(student / temp), with
// the gradient w.r.t. the student logits.
LossWithGrad kl_term(const Tensor& student_logits, const Tensor& target, double temp, KLDirection dir) {
  const Tensor s = softmax_temperature(student_logits, temp);
  LossWithGrad r{0.0, Tensor(student_logits.shape())};
  if (dir == KLDirection::kTeacherFirst) {
    r.value = kl_divergence(target, s);
    for (std::size_t i = 0; i < s.size(); ++i) r.grad[i] = (s[i] - target[i]) / temp;
  } else {
    const double kl = kl_divergence(s, target);
    r.value = kl;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double term = s[i] == 0.0 ? 0.0 : std::log(s[i]) - std::log(target[i]) - kl;
      r.grad[i] = s[i] * term / temp;
    }
  }
  return r;
}

LossWithGrad mix(double alpha, double kl_scale, const LossWithGrad& kl, const LossWithGrad& ce) {
  LossWithGrad r{0.0, Tensor(ce.grad.shape())};
  const double w_kl = alpha * kl_scale;
  const double w_ce = 1.0 - alpha;
  r.value = w_kl * kl.value + w_ce * ce.value;
  for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] = w_kl * kl.grad[i] + w_ce * ce.grad[i];
  return r;
}

}  // namespace

LossWithGrad cross_entropy_loss(const Tensor& logits, std::size_t label) {
  check_label(logits, label);
  const Tensor q = softmax_temperature(logits, 1.0);
  LossWithGrad r{cross_entropy(q, label), q};
  if (q[label] >= kProbabilityFloor) {
    r.grad[label] -= 1.0;
  } else {
    r.grad.fill(0.0);  // clamped region: the loss is locally constant
  }
  return r;
}

LossWithGrad sparse_kd_loss_grad(const Tensor& student_logits, const Tensor& teacher_logits,
                                 std::size_t label, const KDConfig& cfg) {
  cfg.validate();
  check_label(student_logits, label);
  require_same_shape(student_logits, teacher_logits, "sparse_kd_loss");
  const LossWithGrad ce = cross_entropy_loss(student_logits, label);
  if (cfg.loss_alpha == 0.0) return ce;
  const double T = cfg.temperature;
  const Tensor teacher = softmax_temperature(teacher_logits, T);
  const LossWithGrad kl = kl_term(student_logits, teacher, T, cfg.kl_direction);
  return mix(cfg.loss_alpha, T * T, kl, ce);
}

double sparse_kd_loss(const Tensor& student_logits, const Tensor& teacher_logits, std::size_t label,
                      const KDConfig& cfg) {
  return sparse_kd_loss_grad(student_logits, teacher_logits, label, cfg).value;
}

LossWithGrad default_kd_loss_grad(const Tensor& student_logits, const Tensor& teacher_probs,
                                  std::size_t label, const KDConfig& cfg) {
  cfg.validate();
  check_label(student_logits, label);
  require_same_shape(student_logits, teacher_probs, "default_kd_loss");
  const LossWithGrad ce = cross_entropy_loss(student_logits, label);
  if (cfg.loss_alpha == 0.0) return ce;
  const double T = cfg.temperature;
  const Tensor soft = flatten_distribution(teacher_probs, T);
  const double student_temp = cfg.harmonized ? T : 1.0;
  const double scale = cfg.harmonized ? T * T : 1.0;
  const LossWithGrad kl = kl_term(student_logits, soft, student_temp, cfg.kl_direction);
  return mix(cfg.loss_alpha, scale, kl, ce);
}

double default_kd_loss(const Tensor& student_logits, const Tensor& teacher_probs, std::size_t label,
                       const KDConfig& cfg) {
  return default_kd_loss_grad(student_logits, teacher_probs, label, cfg).value;
}

}  // namespace srkd
