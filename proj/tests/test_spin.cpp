#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spinwitness/spin.hpp"
#include "test_support.hpp"

using namespace spinwitness;
using testing_support::max_diff;

TEST(SpinMatrices, QubitIsHalfPauli) {
  const auto j = spin_matrices(kQubit);
  EXPECT_DOUBLE_EQ(j.x(0, 1).real(), 0.5);
  EXPECT_DOUBLE_EQ(j.y(0, 1).imag(), -0.5);
  EXPECT_DOUBLE_EQ(j.y(1, 0).imag(), 0.5);
  EXPECT_DOUBLE_EQ(j.z(0, 0).real(), 0.5);
  EXPECT_DOUBLE_EQ(j.z(1, 1).real(), -0.5);
}

class SpinAlgebra : public ::testing::TestWithParam<int> {};

TEST_P(SpinAlgebra, CommutationCasimirAndHermiticity) {
  const SpinQuantum s(GetParam());
  const auto j = spin_matrices(s);
  EXPECT_TRUE(j.is_hermitian());
  for (int u = 0; u < 3; ++u) {
    const int v = (u + 1) % 3, w = (u + 2) % 3;
    EXPECT_LT(max_diff(commutator(j[u], j[v]), j[w] * kI), 1e-12);
  }
  const auto c2 = j.x * j.x + j.y * j.y + j.z * j.z;
  EXPECT_LT(max_diff(c2, ComplexMatrix::identity(s.dim()) * cplx{s.j() * (s.j() + 1)}), 1e-12);
  // Spectrum of each component is {-j, ..., j}.
  for (int u = 0; u < 3; ++u) {
    const auto ev = eigvals_hermitian(j[u]);
    for (std::size_t k = 0; k < ev.size(); ++k) EXPECT_NEAR(ev[k], -s.j() + static_cast<double>(k), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(TwoJ, SpinAlgebra, ::testing::Range(1, 9));

TEST(SpinQuantum, RejectsNegative) { EXPECT_THROW(SpinQuantum(-1), std::invalid_argument); }

TEST(SiteList, DimensionsAndStrides) {
  const SiteList s({kQubit, kQutrit, kQubit});
  EXPECT_EQ(s.total_dim(), 12u);
  EXPECT_EQ(s.stride(0), 6u);
  EXPECT_EQ(s.stride(1), 2u);
  EXPECT_EQ(s.stride(2), 1u);
  EXPECT_FALSE(s.all_qubits());
  EXPECT_DOUBLE_EQ(s.j_product(), 0.25);
}

TEST(Embed, MatchesExplicitKron) {
  const SiteList s({kQubit, kQutrit, kQubit});
  const auto jz = spin_matrices(kQutrit).z;
  const auto e = embed_site(jz, 1, s);
  EXPECT_EQ(max_diff(e, kron(kron(ComplexMatrix::identity(2), jz), ComplexMatrix::identity(2))), 0.0);
  EXPECT_THROW(embed_site(jz, 0, s), DimensionError);
  EXPECT_THROW(embed_site(jz, 3, s), std::out_of_range);
}

TEST(Embed, ApplySiteOperatorMatchesEmbedding) {
  std::mt19937_64 rng(11);
  const SiteList s({kQutrit, kQubit, kQutrit});
  const auto op = testing_support::random_matrix(rng, 2);
  std::normal_distribution<double> g;
  StateVector psi(s.total_dim());
  for (auto& a : psi) a = cplx{g(rng), g(rng)};
  const auto expect = embed_site(op, 1, s) * psi;
  apply_site_operator(psi, op, 1, s);
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_LT(std::abs(psi[i] - expect[i]), 1e-12);
}

TEST(Embed, ConjugateLocalMatchesFullUnitary) {
  std::mt19937_64 rng(12);
  const SiteList s({kQubit, kQutrit});
  const auto rho = testing_support::random_hermitian(rng, 6);
  const auto u0 = local_unitary(AxisAngle{{0.3, -1.1, 0.7}}, kQubit);
  const auto u1 = local_unitary(AxisAngle{{-0.4, 0.2, 1.9}}, kQutrit);
  const auto u = kron(u0, u1);
  EXPECT_LT(max_diff(conjugate_local(rho, {u0, u1}, s), u * rho * u.adjoint()), 1e-12);
}

TEST(TotalSpin, TwoQubitCasimirHasSingletAndTriplet) {
  const auto jt = total_spin(SiteList::uniform(2, kQubit));
  const auto c2 = jt.x * jt.x + jt.y * jt.y + jt.z * jt.z;
  const auto ev = eigvals_hermitian(c2);
  EXPECT_NEAR(ev[0], 0.0, 1e-12);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(ev[k], 2.0, 1e-12);
}

// Property: U J_v U† = Σ_u R_{uv} J_u with R = so3_rotation, which pins the
// sign convention: expectation vectors transform as ⟨J⟩ ↦ R⟨J⟩.
TEST(Rotation, SO3ImageMatchesSU2Action) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int tj : {1, 2, 3}) {
    const SpinQuantum s(tj);
    const auto j = spin_matrices(s);
    for (int trial = 0; trial < 10; ++trial) {
      const AxisAngle a{{g(rng), g(rng), g(rng)}};
      const auto u = local_unitary(a, s);
      const auto r = so3_rotation(a);
      for (int v = 0; v < 3; ++v) {
        ComplexMatrix expect(s.dim());
        for (int w = 0; w < 3; ++w) expect += j[w] * cplx{r[v][w]};
        EXPECT_LT(max_diff(u.adjoint() * j[v] * u, expect), 1e-10);
      }
    }
  }
}

TEST(Rotation, QuarterTurnAboutZSendsXToMinusY) {
  const auto r = so3_rotation(AxisAngle{{0, 0, std::numbers::pi / 2}});
  const auto v = spinwitness::apply(r, Vec3{1, 0, 0});
  EXPECT_NEAR(v[0], 0.0, 1e-15);
  EXPECT_NEAR(v[1], -1.0, 1e-15);
  EXPECT_NEAR(v[2], 0.0, 1e-15);
}

TEST(Rotation, OrthogonalWithUnitDeterminant) {
  const auto r = so3_rotation(AxisAngle{{0.3, -0.8, 2.1}});
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double d = 0.0;
      for (int k = 0; k < 3; ++k) d += r[k][a] * r[k][b];
      EXPECT_NEAR(d, a == b ? 1.0 : 0.0, 1e-14);
    }
  EXPECT_NEAR(dot(cross(Vec3{r[0][0], r[1][0], r[2][0]}, Vec3{r[0][1], r[1][1], r[2][1]}),
                  Vec3{r[0][2], r[1][2], r[2][2]}),
              1.0, 1e-14);
}

TEST(Rotation, ExpectationNormBoundedByJ) {
  // Property: ‖⟨J⟩‖ ≤ j for every single-site state.
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g;
  for (int tj = 1; tj <= 4; ++tj) {
    const SpinQuantum s(tj);
    const auto j = spin_matrices(s);
    for (int trial = 0; trial < 50; ++trial) {
      StateVector psi(s.dim());
      for (auto& a : psi) a = cplx{g(rng), g(rng)};
      const double n = norm2(psi);
      for (auto& a : psi) a /= n;
      const Vec3 m{expectation(psi, j.x), expectation(psi, j.y), expectation(psi, j.z)};
      EXPECT_LE(norm(m), s.j() + 1e-12);
    }
  }
}
