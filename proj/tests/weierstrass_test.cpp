#include <gtest/gtest.h>

#include "descriptor/weierstrass.hpp"
#include "support.hpp"

namespace descriptor {
namespace {

using testing::code_of;
using testing::max_abs;
using testing::PencilFactory;
using testing::real_matrix;

double residual_scale(const WeierstrassDecomposition& d) {
  return (d.pencil.f().norm() + d.pencil.g().norm()) * num::singular_values(d.P).front() *
         num::singular_values(d.Q).front();
}

TEST(Decompose, TwoStateBlocks) {
  const Pencil pencil(testing::two_state_f(), testing::two_state_g());
  const auto d = decompose(pencil);
  EXPECT_EQ(d.p, 1);
  EXPECT_EQ(d.q, 1);
  EXPECT_EQ(d.q_star, 1);
  EXPECT_NEAR(std::abs(d.Jp(0, 0) - (-4.0 / 25)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(d.Hq(0, 0)), 0.0, 1e-12);
  // finite direction is (2, 3) up to scale
  const Vector qp = d.Qp();
  EXPECT_NEAR(std::abs(3.0 * qp(0) - 2.0 * qp(1)), 0.0, 1e-12 * qp.norm());

  const auto report = verify(d, pencil);
  EXPECT_LE(report.f_residual, 1e-12);
  EXPECT_LE(report.g_residual, 1e-12);
  EXPECT_LE(report.nilpotent_residual, 1e-12);
}

TEST(Decompose, FiveStateDeflatingSubspace) {
  const Pencil pencil(testing::five_state_f(), testing::five_state_g());
  const auto d = decompose(pencil);
  EXPECT_EQ(d.p, 3);
  EXPECT_EQ(d.q, 2);
  EXPECT_EQ(d.q_star, 2);
  const Matrix diff = testing::projector(d.Qp()) - testing::projector(testing::five_state_true_basis());
  EXPECT_LE(max_abs(diff), 1e-8);

  const auto report = verify(d, pencil);
  EXPECT_LE(report.f_residual, 1e-10 * residual_scale(d));
  EXPECT_LE(report.g_residual, 1e-10 * residual_scale(d));

  // finite block carries the eigenvalues 0, 2/5, 2/5
  Complex trace = d.Jp.trace();
  EXPECT_NEAR(std::abs(trace - 0.8), 0.0, 1e-7);
}

TEST(Decompose, RejectsSingularPencils) {
  EXPECT_EQ(code_of([] { decompose(Pencil(Matrix::Zero(2, 2), Matrix::Zero(2, 2))); }),
            ErrorCode::NotRegular);
  EXPECT_EQ(code_of([] { decompose(Pencil(Matrix::Zero(3, 2), Matrix::Zero(3, 2))); }),
            ErrorCode::NotRegular);
}

TEST(Decompose, PureFiniteAndPureInfinite) {
  const Matrix a = real_matrix({{0.5, 1}, {0, -0.25}});
  const auto finite = decompose(Pencil(Matrix::Identity(2, 2), a));
  EXPECT_EQ(finite.p, 2);
  EXPECT_EQ(finite.q_star, 0);
  EXPECT_NEAR(std::abs(finite.Jp.trace() - 0.25), 0.0, 1e-14);

  const Matrix chain = real_matrix({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  const auto infinite = decompose(Pencil(chain, Matrix::Identity(3, 3)));
  EXPECT_EQ(infinite.p, 0);
  EXPECT_EQ(infinite.q, 3);
  EXPECT_EQ(infinite.q_star, 3);
}

TEST(NilpotencyIndex, ChainsAndFailures) {
  EXPECT_EQ(nilpotency_index(Matrix(0, 0)), 0);
  EXPECT_EQ(nilpotency_index(Matrix::Zero(3, 3)), 1);
  EXPECT_EQ(nilpotency_index(real_matrix({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}})), 3);
  EXPECT_EQ(nilpotency_index(real_matrix({{0, 1, 0}, {0, 0, 0}, {0, 0, 0}})), 2);
  EXPECT_EQ(code_of([] { nilpotency_index(real_matrix({{1, 0}, {0, 0}})); }), ErrorCode::NotNilpotent);
}

TEST(Verify, RejectsMismatchedShapes) {
  const Pencil pencil(testing::two_state_f(), testing::two_state_g());
  auto d = decompose(pencil);
  const Pencil other(Matrix::Identity(3, 3), Matrix::Zero(3, 3));
  EXPECT_EQ(code_of([&] { verify(d, other); }), ErrorCode::ShapeMismatch);
}

TEST(Decompose, PlantedPencilsRoundTrip) {
  PencilFactory rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = rng.integer(1, 8);
    const auto pl = rng.planted(m, rng.integer(0, m));
    const Pencil pencil(pl.f, pl.g);
    const auto d = decompose(pencil);
    ASSERT_EQ(d.p, pl.p) << "trial " << trial;
    EXPECT_EQ(d.q_star, pl.q_star) << "trial " << trial;

    const auto report = verify(d, pencil);
    EXPECT_LE(report.f_residual, 1e-8 * residual_scale(d)) << "trial " << trial;
    EXPECT_LE(report.g_residual, 1e-8 * residual_scale(d)) << "trial " << trial;
    EXPECT_LE(max_abs(testing::projector(d.Qp()) - testing::projector(pl.qp())), 1e-7)
        << "trial " << trial;
  }
}

}  // namespace
}  // namespace descriptor
