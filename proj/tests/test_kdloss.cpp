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

#include <doctest.h>

#include <cmath>

#include "csfilter/error.hpp"
#include "csfilter/kdloss.hpp"
#include "support.hpp"

using namespace csfilter;
using namespace csfilter::kd;
using namespace csfilter::testing;

namespace {

DistributionSequenced random_simplex(Eigen::Index k, Eigen::Index v, bool sparse = false) {
  DistributionSequenced m(k, v);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < v; ++j) m(i, j) = sparse && pick(3) == 0 ? 0.0 : -std::log(uniform(1e-9, 1.0));
    if (m.row(i).sum() == 0.0) m(i, 0) = 1.0;
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

long double oracle_kl(const DistributionSequenced& q, const DistributionSequenced& p) {
  long double s = 0;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      const long double a = q(i, j);
      if (a > 0) s += a * (std::log(a) - std::log(std::max<long double>(p(i, j), 1e-12L)));
    }
  }
  return s;
}

long double oracle_ce(const DistributionSequenced& p, const TargetSequence& t) {
  long double s = 0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) s -= std::log(std::max<long double>(p(i, t(i)), 1e-12L));
  return s;
}

}  // namespace

TEST_SUITE("kdloss") {
  TEST_CASE("cross-entropy closed forms") {
    DistributionSequenced one_hot = DistributionSequenced::Zero(3, 4);
    TargetSequence t(3);
    t << 2, 0, 3;
    for (Eigen::Index i = 0; i < 3; ++i) one_hot(i, t(i)) = 1.0;
    CHECK(cross_entropy(one_hot, t) == 0.0);
    DistributionSequenced half(1, 2);
    half << 0.5, 0.5;
    TargetSequence t0(1);
    t0 << 0;
    CHECK(cross_entropy(half, t0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    TargetSequence bad(1);
    bad << 2;
    CHECK_THROWS_AS(cross_entropy(half, bad), ValidationError);
  }

  TEST_CASE("cross-entropy matches a summation oracle") {
    for (int i = 0; i < 50; ++i) {
      const auto p = random_simplex(4, 5);
      TargetSequence t(4);
      for (Eigen::Index k = 0; k < 4; ++k) t(k) = static_cast<Eigen::Index>(pick(5));
      CHECK(std::abs(cross_entropy(p, t) - static_cast<double>(oracle_ce(p, t))) < 1e-9);
    }
  }

  TEST_CASE("KL closed form and oracle") {
    DistributionSequenced q(1, 3), p(1, 3);
    q << 0.5, 0.25, 0.25;
    p << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    const double expected = 0.5 * std::log(1.5) + 0.5 * std::log(0.75);
    CHECK(kl_divergence(q, p) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(kl_divergence(q, p) == doctest::Approx(0.0588915).epsilon(1e-6));
    CHECK(kl_divergence(q, q) == 0.0);
    for (int i = 0; i < 50; ++i) {
      const auto a = random_simplex(4, 5, true);
      const auto b = random_simplex(4, 5);
      CHECK(std::abs(kl_divergence(a, b) - static_cast<double>(oracle_kl(a, b))) < 1e-9);
    }
  }

  TEST_CASE("KL is non-negative and zero only on equal rows") {
    for (int i = 0; i < 1000; ++i) {
      const auto a = random_simplex(3, 4, pick(2) == 0);
      const auto b = random_simplex(3, 4);
      CHECK(kl_divergence(a, b) >= 0.0);
      CHECK(std::abs(kl_divergence(a, a)) <= 1e-12);
    }
  }

  TEST_CASE("weighted total") {
    const auto s = random_simplex(6, 7);
    const auto q = random_simplex(6, 7);
    TargetSequence t(6);
    for (Eigen::Index k = 0; k < 6; ++k) t(k) = static_cast<Eigen::Index>(pick(7));
    const auto l = kd_loss(s, q, t);
    CHECK(l.positions == 6);
    CHECK(std::abs(l.total - (0.8 * cross_entropy(s, t) + 1.0 * kl_divergence(q, s))) <= 1e-12);
    KDLossConfig only_kl;
    only_kl.beta = 0.0;
    CHECK(kd_loss(s, q, t, only_kl).total == doctest::Approx(kl_divergence(q, s)));
    KDLossConfig mean;
    mean.reduction = Reduction::mean;
    CHECK(kd_loss(s, q, t, mean).ce == doctest::Approx(l.ce / 6));
    KDLossConfig bad;
    bad.gamma = -1;
    CHECK_THROWS_AS(kd_loss(s, q, t, bad), ValidationError);
  }

  TEST_CASE("perfect student scores zero") {
    DistributionSequenced one_hot = DistributionSequenced::Zero(2, 3);
    TargetSequence t(2);
    t << 1, 2;
    one_hot(0, 1) = one_hot(1, 2) = 1.0;
    CHECK(kd_loss(one_hot, one_hot, t).total == 0.0);
  }

  TEST_CASE("losses add over positions") {
    const auto s = random_simplex(5, 4);
    const auto q = random_simplex(5, 4);
    TargetSequence t(5);
    for (Eigen::Index k = 0; k < 5; ++k) t(k) = static_cast<Eigen::Index>(pick(4));
    const auto whole = kd_loss(s, q, t);
    const auto head = kd_loss(s.topRows(2), q.topRows(2), t.head(2));
    const auto tail = kd_loss(s.bottomRows(3), q.bottomRows(3), t.tail(3));
    CHECK(std::abs(whole.total - (head.total + tail.total)) < 1e-12);
  }

  TEST_CASE("distribution checks") {
    DistributionSequenced bad(1, 2);
    bad << 0.7, 0.7;
    CHECK_THROWS_AS(check_distributions(bad, "x"), ValidationError);
    bad << -0.1, 1.1;
    CHECK_THROWS_AS(check_distributions(bad, "x"), ValidationError);
    CHECK_THROWS_AS(kl_divergence(DistributionSequenced::Constant(1, 2, 0.5), DistributionSequenced::Constant(2, 2, 0.5)),
                    ValidationError);
  }

  TEST_CASE("single precision") {
    DistributionSequence<float> q(1, 2), p(1, 2);
    q << 0.5f, 0.5f;
    p << 0.5f, 0.5f;
    CHECK(kl_divergence(q, p) == 0.0f);
  }
}
