#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spinwitness/state.hpp"
#include "spinwitness/witness.hpp"
#include "test_support.hpp"

using namespace spinwitness;
using testing_support::max_diff;

namespace {

// Independent route to the witnesses: build every spin directly in the
// site-ordered space and nest with cross_op/dot_op, no basis permutation.
VectorOperator oracle_cross(const SiteList& sites, const OrderingSpec& ord, std::size_t count) {
  auto spin_at = [&](std::size_t role) {
    const std::size_t s = ord.roles()[role];
    return embed_vector(spin_matrices(sites[s]), s, sites);
  };
  VectorOperator c = spin_at(0);
  for (std::size_t k = 1; k < count; ++k) c = cross_op(spin_at(k), c);
  return c;
}

ComplexMatrix oracle_dot(const SiteList& sites, const OrderingSpec& ord) {
  const std::size_t n = sites.size();
  const std::size_t last = ord.roles()[n - 1];
  return dot_op(oracle_cross(sites, ord, n - 1), embed_vector(spin_matrices(sites[last]), last, sites)) *
         cplx{1.0 / sites.j_product()};
}

// F + iF̃ = ((1-i)/2)^{N-1} ⊗_k (A_k + iÃ_k), a closed form of the recursion.
ComplexMatrix oracle_mk(const MKSettings& s) {
  ComplexMatrix g = pauli_observable(s.a[0]) + pauli_observable(s.a_tilde[0]) * kI;
  for (std::size_t k = 1; k < s.size(); ++k)
    g = kron(g, pauli_observable(s.a[k]) + pauli_observable(s.a_tilde[k]) * kI) * cplx{0.5, -0.5};
  return (g + g.adjoint()) * cplx{0.5};
}

std::vector<double> random_product_params(std::mt19937_64& rng, const SiteList& sites) {
  std::normal_distribution<double> g;
  std::vector<double> p(product_state_param_count(sites, PartitionSpec::singletons(sites.size())));
  for (auto& x : p) x = g(rng);
  return p;
}

}  // namespace

TEST(DotChain, TwoQubitSpectrum) {
  const auto ev = eigvals_hermitian(build_dot_chain(SiteList::uniform(2, kQubit), OrderingSpec::identity(2)).matrix);
  ASSERT_EQ(ev.size(), 4u);
  EXPECT_NEAR(ev[0], -3.0, 1e-12);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(ev[k], 1.0, 1e-12);
}

TEST(Chains, SingleSiteCases) {
  const auto sites = SiteList::uniform(1, kQutrit);
  const auto c = build_cross_chain(sites, OrderingSpec::identity(1));
  EXPECT_LT(max_diff(c.components.z, spin_matrices(kQutrit).z), 1e-15);
  EXPECT_LT(max_diff(build_dot_chain(sites, OrderingSpec::identity(1)).matrix, ComplexMatrix::identity(3)), 0.0 + 1e-15);
}

class ChainOracle : public ::testing::TestWithParam<std::pair<std::vector<int>, std::string>> {};

TEST_P(ChainOracle, BuildersMatchDirectConstruction) {
  std::vector<SpinQuantum> spins;
  for (int tj : GetParam().first) spins.emplace_back(tj);
  const SiteList sites(spins);
  const auto ord = OrderingSpec::parse(GetParam().second);
  const auto c = build_cross_chain(sites, ord);
  const auto ref = oracle_cross(sites, ord, sites.size());
  for (int u = 0; u < 3; ++u)
    EXPECT_LT(max_diff(c.components[u], ref[u] * cplx{1.0 / sites.j_product()}), 1e-12);
  EXPECT_LT(max_diff(build_dot_chain(sites, ord).matrix, oracle_dot(sites, ord)), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(
    Orderings, ChainOracle,
    ::testing::Values(std::make_pair(std::vector<int>{1, 1}, std::string("2,1")),
                      std::make_pair(std::vector<int>{1, 1, 1}, std::string("1,2,3")),
                      std::make_pair(std::vector<int>{1, 1, 1}, std::string("3,1,2")),
                      std::make_pair(std::vector<int>{1, 2, 1}, std::string("2,3,1")),
                      std::make_pair(std::vector<int>{2, 1, 3}, std::string("1,3,2")),
                      std::make_pair(std::vector<int>{1, 1, 1, 1}, std::string("4,2,1,3")),
                      std::make_pair(std::vector<int>{1, 2, 1, 1}, std::string("3,2,1,4"))));

TEST(Chains, ValidationErrors) {
  const auto sites = SiteList::uniform(3, kQubit);
  EXPECT_THROW(build_dot_chain(sites, OrderingSpec::parse("1,2")), std::invalid_argument);
  EXPECT_THROW(OrderingSpec::parse("1,1,2").validate(3), std::invalid_argument);
  EXPECT_THROW(OrderingSpec::parse("0,1,2"), std::invalid_argument);
  EXPECT_THROW(build_cross_chain(SiteList::uniform(13, kQubit), OrderingSpec::identity(13)), DimensionCapExceeded);
  EXPECT_THROW(build_dot_chain(SiteList({kQubit, SpinQuantum(0)}), OrderingSpec::identity(2)), std::invalid_argument);
}

TEST(Chains, CrossOpRejectsSharedSupport) {
  const auto j = spin_matrices(kQubit);
  EXPECT_THROW(cross_op(j, j), std::invalid_argument);
  EXPECT_THROW(dot_op(j, j), std::invalid_argument);
}

TEST(OrderingSpec, AllIsLexicographicAndComplete) {
  const auto all = OrderingSpec::all(4);
  ASSERT_EQ(all.size(), 24u);
  EXPECT_EQ(all.front().to_string(), "1,2,3,4");
  EXPECT_EQ(all.back().to_string(), "4,3,2,1");
}

// Swapping the two innermost roles flips the sign of every chain.
TEST(Symmetry, InnermostSwapAntisymmetry) {
  for (auto s : {kQubit, kQutrit}) {
    const auto sites = SiteList::uniform(3, s);
    const auto a = build_dot_chain(sites, OrderingSpec::parse("1,2,3")).matrix;
    const auto b = build_dot_chain(sites, OrderingSpec::parse("2,1,3")).matrix;
    EXPECT_LT(max_diff(a, b * cplx{-1.0}), 1e-12);
    const auto ca = build_cross_chain(sites, OrderingSpec::parse("1,2,3")).components;
    const auto cb = build_cross_chain(sites, OrderingSpec::parse("2,1,3")).components;
    for (int u = 0; u < 3; ++u) EXPECT_LT(max_diff(ca[u], cb[u] * cplx{-1.0}), 1e-12);
  }
}

TEST(Spectra, TracelessAndPaired) {
  for (auto s : {kQubit, kQutrit})
    for (std::size_t n = 2; n <= 4; ++n) {
      const auto sites = SiteList::uniform(n, s);
      const auto d = build_dot_chain(sites, OrderingSpec::identity(n)).matrix;
      const auto cz = build_cross_chain(sites, OrderingSpec::identity(n)).components.z;
      EXPECT_NEAR(d.trace().real(), 0.0, 1e-10);
      EXPECT_NEAR(cz.trace().real(), 0.0, 1e-10);
      EXPECT_LT(pairing_defect(eigvals_hermitian(cz)), 1e-8);
      if (n >= 3) {
        EXPECT_LT(pairing_defect(eigvals_hermitian(d)), 1e-8);
      }
    }
}

TEST(Spectra, PairingDefectDetectsAsymmetry) {
  EXPECT_DOUBLE_EQ(pairing_defect({-2.0, 0.0, 2.0}), 0.0);
  EXPECT_DOUBLE_EQ(pairing_defect({-3.0, 1.0, 1.0, 1.0}), 2.0);
}

// [C_u, J_v] = iε_uvw C_w and [D, J_u] = 0 for the total spin.
TEST(Covariance, VectorAndScalarUnderJointRotations) {
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto sites = SiteList::uniform(n, kQubit);
    const auto jt = total_spin(sites);
    const auto c = build_cross_chain(sites, OrderingSpec::identity(n)).components;
    const auto d = build_dot_chain(sites, OrderingSpec::identity(n)).matrix;
    for (int u = 0; u < 3; ++u) {
      EXPECT_LT(commutator(d, jt[u]).max_abs(), 1e-10);
      const int v = (u + 1) % 3, w = (u + 2) % 3;
      EXPECT_LT(max_diff(commutator(c[u], jt[v]), c[w] * kI), 1e-10);
      EXPECT_LT(max_diff(commutator(c[v], jt[u]), c[w] * cplx{0.0, -1.0}), 1e-10);
      EXPECT_LT(commutator(c[u], jt[u]).max_abs(), 1e-10);
    }
  }
}

// Property: fully separable states respect |⟨D⟩| ≤ 1 and ‖⟨C⟩‖ ≤ 1.
TEST(SeparableBound, RandomProductStates) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
    const auto sites = SiteList::uniform(n, trial % 2 ? kQutrit : kQubit);
    const auto ord = OrderingSpec::all(n)[static_cast<std::size_t>(trial) % (n == 2 ? 2 : 6)];
    const auto st = product_state(sites, PartitionSpec::singletons(n), random_product_params(rng, sites));
    const auto c = build_cross_chain(sites, ord).components;
    EXPECT_LE(std::abs(expectation(st, build_dot_chain(sites, ord).matrix)), 1.0 + 1e-10);
    EXPECT_LE(norm(Vec3{expectation(st, c.x), expectation(st, c.y), expectation(st, c.z)}), 1.0 + 1e-10);
  }
}

TEST(Eigenstates, Psi4IsTopDotEigenvector) {
  const auto d = build_dot_chain(SiteList::uniform(4, kQubit), OrderingSpec::parse("3,2,1,4")).matrix;
  const auto psi4_state = psi4();
  const auto& psi = psi4_state.vector();
  const auto dpsi = d * psi;
  const double lambda = 4.0 * std::sqrt(3.0);
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_LT(std::abs(dpsi[i] - lambda * psi[i]), 1e-10);
  // ψ₄ has total spin zero.
  const auto jt = total_spin(SiteList::uniform(4, kQubit));
  const auto c2 = jt.x * jt.x + jt.y * jt.y + jt.z * jt.z;
  EXPECT_NEAR(expectation(psi, c2), 0.0, 1e-12);
}

TEST(Eigenstates, RotatedPhi4IsTopCrossEigenvector) {
  const auto sites = SiteList::uniform(4, kQubit);
  const auto cz = build_cross_chain(sites, OrderingSpec::parse("4,3,2,1")).components.z;
  StateVector phi = phi4().vector();
  const auto u = local_unitary(AxisAngle{{std::numbers::pi / 2, 0.0, 0.0}}, kQubit);
  for (std::size_t k = 0; k < 4; ++k) apply_site_operator(phi, u, k, sites);
  const auto cphi = cz * phi;
  const double lambda = 2.0 * std::sqrt(6.0);
  for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_LT(std::abs(cphi[i] - lambda * phi[i]), 1e-10);
}

TEST(Eigenstates, TopCrossEigenspaceHasDimensionFour) {
  const auto ev = eigvals_hermitian(
      build_cross_chain(SiteList::uniform(4, kQubit), OrderingSpec::identity(4)).components.z);
  const double top = 2.0 * std::sqrt(6.0);
  int plus = 0, minus = 0;
  for (double e : ev) {
    plus += std::abs(e - top) < 1e-8;
    minus += std::abs(e + top) < 1e-8;
  }
  EXPECT_EQ(plus, 2);
  EXPECT_EQ(minus, 2);
  EXPECT_EQ(plus + minus, 4);
}

TEST(MK, CanonicalTwoQubitGivesTsirelson) {
  const auto f = build_mk(MKSettings::canonical_two_qubit());
  const auto ev = eigvals_hermitian(f.f);
  EXPECT_NEAR(ev.back(), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ev.front(), -std::sqrt(2.0), 1e-12);
}

TEST(MK, RecursionMatchesClosedForm) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  for (std::size_t n = 1; n <= 5; ++n) {
    std::vector<double> angles(4 * n);
    for (auto& a : angles) a = u(rng);
    const auto s = MKSettings::from_angles(angles);
    EXPECT_LT(max_diff(build_mk(s).f, oracle_mk(s)), 1e-12) << "N=" << n;
  }
}

TEST(MK, QuantumBoundAttainedWithOrthogonalSettings) {
  for (std::size_t n = 2; n <= 5; ++n) {
    // Orthogonal A ⊥ Ã on every site reaches the bound.
    MKSettings s;
    for (std::size_t k = 0; k < n; ++k) {
      const double phi = k == 0 ? 0.0 : -std::numbers::pi / 4;
      s.a.push_back({std::cos(phi), std::sin(phi), 0});
      s.a_tilde.push_back({std::cos(phi + std::numbers::pi / 2), std::sin(phi + std::numbers::pi / 2), 0});
    }
    const auto f = build_mk(s, SiteList::uniform(n, kQubit));
    const auto ev = eigvals_hermitian(f.f);
    EXPECT_NEAR(ev.back(), mk_quantum_bound(n), 1e-10);
  }
}

TEST(MK, Validation) {
  MKSettings bad{{{1, 0, 0}}, {{0.5, 0, 0}}};
  EXPECT_THROW(build_mk(bad), std::invalid_argument);
  EXPECT_THROW(build_mk(MKSettings::canonical_two_qubit(), SiteList::uniform(2, kQutrit)), std::invalid_argument);
  EXPECT_THROW(MKSettings::from_angles(std::vector<double>(3)), std::invalid_argument);
}

TEST(MK, AnglesRoundTrip) {
  const std::vector<double> angles{0.3, 1.2, 2.0, -0.7, 1.1, 0.4, 0.9, 2.5};
  const auto s = MKSettings::from_angles(angles);
  const auto back = MKSettings::from_angles(s.to_angles());
  for (std::size_t k = 0; k < 2; ++k)
    for (int u = 0; u < 3; ++u) {
      EXPECT_NEAR(s.a[k][u], back.a[k][u], 1e-14);
      EXPECT_NEAR(s.a_tilde[k][u], back.a_tilde[k][u], 1e-14);
    }
}

// Property: local hidden-variable bound for product states.
TEST(MK, ProductStatesNeverExceedOne) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
    const auto sites = SiteList::uniform(n, kQubit);
    std::vector<double> angles(4 * n);
    for (auto& a : angles) a = u(rng);
    const auto st = product_state(sites, PartitionSpec::singletons(n), random_product_params(rng, sites));
    EXPECT_LE(expectation(st, build_mk(MKSettings::from_angles(angles)).f), 1.0 + 1e-9);
  }
}
