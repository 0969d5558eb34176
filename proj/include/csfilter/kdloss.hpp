// Copyright 2026 The csfilter Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "csfilter/error.hpp"

namespace csfilter::kd {

/// k positions by v vocabulary entries; every row is a probability distribution.
template <typename Scalar>
using DistributionSequence = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using DistributionSequenced = DistributionSequence<double>;
using TargetSequence = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1>;

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kSimplexTolerance = 1e-9;

enum class Reduction { sum, mean };

struct KDLossConfig {
  double beta = 0.8;
  double gamma = 1.0;
  Reduction reduction = Reduction::sum;

  void validate() const {
    if (!(beta >= 0.0) || !(gamma >= 0.0)) throw ValidationError("kdloss.beta and kdloss.gamma must be >= 0");
  }
};

template <typename Scalar>
struct KDLoss {
  Scalar total = 0;
  Scalar ce = 0;
  Scalar kl = 0;
  Eigen::Index positions = 0;

  Scalar total_per_token() const { return positions ? total / static_cast<Scalar>(positions) : Scalar(0); }
  Scalar ce_per_token() const { return positions ? ce / static_cast<Scalar>(positions) : Scalar(0); }
  Scalar kl_per_token() const { return positions ? kl / static_cast<Scalar>(positions) : Scalar(0); }
};

/// Throws unless every entry is >= 0 and every row sums to 1 within `tol`.
template <typename Derived>
void check_distributions(const Eigen::MatrixBase<Derived>& probs, const std::string& what,
                         double tol = kSimplexTolerance) {
  if (!probs.allFinite()) throw ValidationError(what + ": non-finite probability");
  if ((probs.array() < 0).any()) throw ValidationError(what + ": negative probability");
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const double s = static_cast<double>(probs.row(i).sum());
    if (std::abs(s - 1.0) > tol) {
      throw ValidationError(what + ": row " + std::to_string(i) + " sums to " + std::to_string(s));
    }
  }
}

template <typename Scalar>
Scalar floored_log(Scalar p) {
  return std::log(std::max(p, static_cast<Scalar>(kProbabilityFloor)));
}

/// Teacher-forced sequence cross-entropy: -sum_i log student(i, target_i), in nats.
template <typename Derived, typename TargetDerived>
typename Derived::Scalar cross_entropy(const Eigen::MatrixBase<Derived>& student,
                                       const Eigen::MatrixBase<TargetDerived>& targets) {
  using Scalar = typename Derived::Scalar;
  if (targets.size() != student.rows()) {
    throw ValidationError("cross_entropy: " + std::to_string(targets.size()) + " targets for " +
                          std::to_string(student.rows()) + " positions");
  }
  Scalar loss = 0;
  for (Eigen::Index i = 0; i < student.rows(); ++i) {
    const auto t = static_cast<Eigen::Index>(targets(i));
    if (t < 0 || t >= student.cols()) {
      throw ValidationError("cross_entropy: target " + std::to_string(t) + " outside vocabulary");
    }
    loss -= floored_log(student(i, t));
  }
  return loss;
}

/// Sum over positions of KL(teacher_i || student_i), in nats, with 0 log 0 = 0.
template <typename TeacherDerived, typename StudentDerived>
typename TeacherDerived::Scalar kl_divergence(const Eigen::MatrixBase<TeacherDerived>& teacher,
                                              const Eigen::MatrixBase<StudentDerived>& student) {
  using Scalar = typename TeacherDerived::Scalar;
  if (teacher.rows() != student.rows() || teacher.cols() != student.cols()) {
    throw ValidationError("kl_divergence: teacher is " + std::to_string(teacher.rows()) + "x" +
                          std::to_string(teacher.cols()) + ", student is " + std::to_string(student.rows()) + "x" +
                          std::to_string(student.cols()));
  }
  Scalar loss = 0;
  for (Eigen::Index i = 0; i < teacher.rows(); ++i) {
    for (Eigen::Index j = 0; j < teacher.cols(); ++j) {
      const Scalar q = teacher(i, j);
      if (q > 0) loss += q * (std::log(q) - floored_log(static_cast<Scalar>(student(i, j))));
    }
  }
  return loss;
}

/// beta * CE + gamma * KL. With Reduction::mean both terms are divided by the
/// number of positions before weighting.
template <typename StudentDerived, typename TeacherDerived, typename TargetDerived>
KDLoss<typename StudentDerived::Scalar> kd_loss(const Eigen::MatrixBase<StudentDerived>& student,
                                                const Eigen::MatrixBase<TeacherDerived>& teacher,
                                                const Eigen::MatrixBase<TargetDerived>& targets,
                                                const KDLossConfig& cfg = {}) {
  using Scalar = typename StudentDerived::Scalar;
  cfg.validate();
  KDLoss<Scalar> out;
  out.positions = student.rows();
  out.ce = cross_entropy(student, targets);
  out.kl = kl_divergence(teacher, student);
  if (cfg.reduction == Reduction::mean && out.positions > 0) {
    out.ce /= static_cast<Scalar>(out.positions);
    out.kl /= static_cast<Scalar>(out.positions);
  }
  out.total = static_cast<Scalar>(cfg.beta) * out.ce + static_cast<Scalar>(cfg.gamma) * out.kl;
  return out;
}

}  // namespace csfilter::kd
