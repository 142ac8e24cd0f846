// Copyright 2026 The FastDPM Authors.
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


#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fastdpm/error.hpp"
#include "fastdpm/metrics.hpp"
#include "fastdpm/random.hpp"

namespace fastdpm {
namespace {

Moments isotropic(const Eigen::VectorXd& mean, double variance) {
  return {mean, variance * Eigen::MatrixXd::Identity(mean.size(), mean.size())};
}

Eigen::MatrixXd gaussian_samples(int n, int d, RandomStream& rng) {
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) x.row(i) = rng.normal_vector(d).transpose();
  return x;
}

TEST(Frechet, IdenticalSetsAreZero) {
  RandomStream rng(1);
  const Eigen::MatrixXd x = gaussian_samples(500, 3, rng);
  EXPECT_NEAR(frechet_distance(x, x), 0.0, 1e-10);
}

TEST(Frechet, MeanShift) {
  for (int d : {1, 2, 5}) {
    const Eigen::VectorXd m = Eigen::VectorXd::LinSpaced(d, 0.5, 2.0);
    EXPECT_NEAR(frechet_distance(isotropic(Eigen::VectorXd::Zero(d), 1.0), isotropic(m, 1.0)),
                m.squaredNorm(), 1e-12);
  }
}

TEST(Frechet, IsotropicScale) {
  for (int d : {1, 2, 5}) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
    EXPECT_NEAR(frechet_distance(isotropic(zero, 1.0), isotropic(zero, 4.0)), double(d),
                1e-12);
  }
}

TEST(Frechet, CommutingCovariances) {
  // Diagonal covariances: sum of (sqrt(a_i) − sqrt(b_i))².
  const Eigen::Vector3d a(0.5, 2.0, 1.0);
  const Eigen::Vector3d b(1.5, 0.25, 9.0);
  const Moments ma{Eigen::Vector3d(1, 0, 0), a.asDiagonal()};
  const Moments mb{Eigen::Vector3d(0, 0, 2), b.asDiagonal()};
  const double expected =
      5.0 + (a.cwiseSqrt() - b.cwiseSqrt()).squaredNorm();
  EXPECT_NEAR(frechet_distance(ma, mb), expected, 1e-12);
}

TEST(Frechet, Symmetric) {
  RandomStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = gaussian_samples(50, 4, rng);
    Eigen::MatrixXd y = gaussian_samples(60, 4, rng);
    y.col(1) *= 3.0;
    y.col(2) += 0.5 * y.col(0);
    EXPECT_NEAR(frechet_distance(x, y), frechet_distance(y, x), 1e-9);
  }
}

TEST(Frechet, UnbiasedCovariance) {
  Eigen::MatrixXd x(3, 1);
  x << 1.0, 2.0, 3.0;
  const Moments m = sample_moments(x);
  EXPECT_DOUBLE_EQ(m.mean(0), 2.0);
  EXPECT_DOUBLE_EQ(m.covariance(0, 0), 1.0);
}

TEST(Frechet, InsufficientSamples) {
  EXPECT_THROW(sample_moments(Eigen::MatrixXd::Zero(2, 2)), ValidationError);
  EXPECT_NO_THROW(sample_moments(Eigen::MatrixXd::Zero(3, 2)));
}

TEST(PsdSqrt, ClampsTinyNegativeEigenvalues) {
  Eigen::Matrix2d m;
  m << 1.0, 0.0, 0.0, -5e-11;
  const Eigen::MatrixXd r = psd_sqrt(m);
  EXPECT_NEAR(r(0, 0), 1.0, 1e-15);
  EXPECT_EQ(r(1, 1), 0.0);
  m(1, 1) = -1e-8;
  EXPECT_THROW(psd_sqrt(m), NumericError);
}

TEST(PsdSqrt, SquaresBack) {
  Eigen::Matrix3d a;
  a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  const Eigen::MatrixXd r = psd_sqrt(a);
  EXPECT_LE((r * r - a).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(InceptionScore, UniformRows) {
  EXPECT_NEAR(inception_score(Eigen::MatrixXd::Constant(10, 4, 0.25)), 1.0, 1e-15);
}

TEST(InceptionScore, BalancedOneHot) {
  for (int K : {2, 3, 10}) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(5 * K, K);
    for (int i = 0; i < 5 * K; ++i) p(i, i % K) = 1.0;
    EXPECT_NEAR(inception_score(p), double(K), 1e-12);
  }
}

TEST(InceptionScore, IdenticalRows) {
  Eigen::MatrixXd p(6, 3);
  p.rowwise() = Eigen::RowVector3d(0.2, 0.5, 0.3);
  EXPECT_NEAR(inception_score(p), 1.0, 1e-15);
}

TEST(InceptionScore, BoundedByClassCount) {
  RandomStream rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd p(20, 4);
    for (int i = 0; i < 20; ++i) {
      for (int k = 0; k < 4; ++k) p(i, k) = std::pow(rng.uniform(), 4.0);
      p.row(i) /= p.row(i).sum();
    }
    const double is = inception_score(p);
    EXPECT_GE(is, 1.0 - 1e-12);
    EXPECT_LE(is, 4.0 + 1e-12);
  }
}

TEST(InceptionScore, RejectsInvalidRows) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(2, 2, 0.5);
  p(1, 0) = 0.6;
  EXPECT_THROW(inception_score(p), ValidationError);
  p(1, 0) = -0.5;
  p(1, 1) = 1.5;
  EXPECT_THROW(inception_score(p), ValidationError);
}

TEST(Accuracy, CountsMatches) {
  Eigen::MatrixXd p(4, 2);
  p << 0.9, 0.1, 0.2, 0.8, 0.7, 0.3, 0.4, 0.6;
  EXPECT_DOUBLE_EQ(accuracy(p, {0, 1, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(p, {1, 0, 1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(accuracy(p, {0, 1, 1, 0}), 0.5);
}

TEST(Accuracy, TiesGoToLowestIndex) {
  Eigen::MatrixXd p(2, 3);
  p << 0.4, 0.4, 0.2, 0.1, 0.45, 0.45;
  EXPECT_DOUBLE_EQ(accuracy(p, {0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(p, {1, 2}), 0.0);
}

TEST(Accuracy, LengthMismatch) {
  EXPECT_THROW(accuracy(Eigen::MatrixXd::Constant(3, 2, 0.5), {0, 1}), ValidationError);
}

}  // namespace
}  // namespace fastdpm
