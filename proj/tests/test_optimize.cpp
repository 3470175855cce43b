#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spinwitness/optimize.hpp"
#include "test_support.hpp"

using namespace spinwitness;
using testing_support::max_diff;

namespace {

OptConfig small_config(int restarts = 8) {
  OptConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST(NelderMead, QuadraticMinimum) {
  auto f = [](std::span<const double> x) { return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 2.0) * (x[1] + 2.0); };
  const auto r = nelder_mead(f, {0.0, 0.0}, 0.5, 2000, 1e-14);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], -2.0, 1e-6);
}

TEST(NelderMead, Rosenbrock) {
  auto f = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const auto r = nelder_mead(f, {-1.2, 1.0}, 0.5, 5000, 1e-15);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(NelderMead, ZeroDimensional) {
  int calls = 0;
  auto f = [&](std::span<const double>) { return static_cast<double>(++calls); };
  const auto r = nelder_mead(f, {}, 1.0, 10, 1e-9);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(calls, 1);
}

TEST(Restarts, RejectsZeroRestarts) {
  EXPECT_THROW(optimize_frames(ghz(3), build_dot_chain(SiteList::uniform(3, kQubit), OrderingSpec::identity(3)),
                               small_config(0)),
               std::invalid_argument);
}

// Property: same seed gives identical results regardless of thread count.
TEST(Restarts, DeterministicAcrossThreadCounts) {
  const auto st = random_pure(SiteList::uniform(3, kQubit), 4);
  const auto w = build_cross_chain(st.sites(), OrderingSpec::identity(3));
  auto cfg = small_config(6);
  const auto a = optimize_frames(st, w, cfg);
  const auto b = optimize_frames(st, w, cfg);
  cfg.threads = 3;
  const auto c = optimize_frames(st, w, cfg);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.argument, b.argument);
  EXPECT_EQ(a.value, c.value);
  EXPECT_EQ(a.argument, c.argument);
}

// Property: restart r always uses seed + r, so more restarts never lose value.
TEST(Restarts, MonotoneInRestartCount) {
  const auto st = random_pure(SiteList::uniform(3, kQubit), 17);
  const auto w = build_dot_chain(st.sites(), OrderingSpec::identity(3));
  double prev = -1.0;
  for (int r : {1, 2, 4, 8}) {
    const double v = optimize_frames(st, w, small_config(r)).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Frames, ValueIsReproducibleFromArgument) {
  const auto st = ghz(3);
  const auto w = build_dot_chain(st.sites(), OrderingSpec::identity(3));
  const auto r = optimize_frames(st, w, small_config());
  EXPECT_DOUBLE_EQ(frame_value(st, w, r.argument), r.value);
  EXPECT_THROW(frame_value(ghz(2), w, r.argument), std::invalid_argument);
}

TEST(Frames, GhzThreeWithDot) {
  const auto st = ghz(3);
  const auto r = optimize_frames(st, build_dot_chain(st.sites(), OrderingSpec::identity(3)), small_config(16));
  EXPECT_NEAR(r.value, 1.5 * std::sqrt(3.0), 1e-6);
}

TEST(Frames, NeverExceedSpectralMaximum) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto st = random_pure(SiteList::uniform(3, kQubit), 100 + seed);
    const auto ord = OrderingSpec::identity(3);
    EXPECT_LE(optimize_frames(st, build_dot_chain(st.sites(), ord), small_config(4)).value,
              max_violation_dot(st.sites(), ord) + 1e-10);
    EXPECT_LE(optimize_frames(st, build_cross_chain(st.sites(), ord), small_config(4)).value,
              max_violation_cross(st.sites(), ord) + 1e-10);
  }
}

TEST(WPhases, EigenPhasesReachTopEigenvalue) {
  const auto p = find_w3_eigen_phases();
  EXPECT_NEAR(p.value, 2.0 * std::sqrt(3.0), 1e-9);
  // The phases are the cube roots of unity up to relabelling.
  EXPECT_NEAR(std::abs(std::exp(kI * p.alpha) + std::exp(kI * p.beta) + 1.0), 0.0, 1e-6);
}

TEST(MKSearch, GhzReachesQuantumBound) {
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto r = optimize_mk_settings(ghz(n), small_config(8));
    EXPECT_NEAR(r.value, mk_quantum_bound(n), 1e-6);
    EXPECT_NEAR(mk_value(ghz(n), r.argument), r.value, 1e-12);
  }
  EXPECT_THROW(optimize_mk_settings(random_pure(SiteList::uniform(2, kQutrit), 1), small_config()),
               std::invalid_argument);
}

TEST(PartitionBound, ExtremePartitions) {
  const auto sites = SiteList::uniform(3, kQubit);
  const auto ord = OrderingSpec::identity(3);
  const auto d = build_dot_chain(sites, ord);
  EXPECT_NEAR(partition_bound(d, PartitionSpec::singletons(3), small_config()).value, 1.0, 1e-6);
  EXPECT_NEAR(partition_bound(d, PartitionSpec::whole(3), small_config()).value, max_violation_dot(sites, ord), 1e-9);
  const auto c = build_cross_chain(sites, ord);
  EXPECT_NEAR(partition_bound(c, PartitionSpec::singletons(3), small_config()).value, 1.0, 1e-6);
  EXPECT_NEAR(partition_bound_mk(sites, PartitionSpec::singletons(3), small_config()).value, 1.0, 1e-6);
}

TEST(PartitionBound, ArgumentReproducesValue) {
  const auto sites = SiteList::uniform(4, kQubit);
  const auto part = PartitionSpec::parse("12|34");
  const auto d = build_dot_chain(sites, OrderingSpec::identity(4));
  const auto r = partition_bound(d, part, small_config(4));
  EXPECT_NEAR(partition_value(sites, part, WitnessKind::dot, r.argument, &d), r.value, 1e-9);
  const auto m = partition_bound_mk(sites, part, small_config(4));
  EXPECT_NEAR(partition_value(sites, part, WitnessKind::mk, m.argument), m.value, 1e-9);
}

TEST(PartitionBound, MKOrderingSweepHasSingleEntry) {
  const auto sweep = partition_bound_orderings(SiteList::uniform(4, kQubit), PartitionSpec::parse("12|34"),
                                               WitnessKind::mk, small_config(4));
  EXPECT_EQ(sweep.per_ordering.size(), 1u);
}

TEST(Noise, ThresholdsAgreeWithAnalyticForm) {
  const auto d3 = build_dot_chain(SiteList::uniform(3, kQubit), OrderingSpec::identity(3));
  const auto t = noise_threshold(ghz(3), d3, small_config(8));
  EXPECT_TRUE(t.violated);
  EXPECT_TRUE(t.consistent);
  EXPECT_NEAR(t.analytic, 1.0 - 2.0 / (3.0 * std::sqrt(3.0)), 1e-6);
  EXPECT_THROW(noise_threshold(ghz(3).to_mixed(), d3, small_config()), std::invalid_argument);
}

TEST(Noise, NonViolatingStateHasZeroThreshold) {
  const auto sites = SiteList::uniform(3, kQubit);
  const auto up = QuantumState::from_amplitudes(sites, {1, 0, 0, 0, 0, 0, 0, 0});
  const auto t = noise_threshold(up, build_dot_chain(sites, OrderingSpec::identity(3)), small_config(4));
  EXPECT_FALSE(t.violated);
  EXPECT_EQ(t.nu, 0.0);
}

TEST(Ratios, MKIsConstantSqrtTwo) {
  for (const auto& p : ratio_curve(6, kQubit, WitnessKind::mk)) EXPECT_NEAR(p.ratio, std::numbers::sqrt2, 1e-15);
}

TEST(Ratios, ProductReproducesMaxima) {
  const auto curve = ratio_curve(5, kQubit, WitnessKind::dot);
  double prod = 1.0;
  for (const auto& p : curve) prod *= p.ratio;
  EXPECT_NEAR(prod, max_violation_dot(SiteList::uniform(5, kQubit), OrderingSpec::identity(5)), 1e-9);
  EXPECT_THROW(ratio_curve(13, kQubit, WitnessKind::dot), DimensionCapExceeded);
}

// D = Σ_i J_i ⊗ C_i / j and C_z = ±(J_y ⊗ C_x - J_x ⊗ C_y)/j, with the last
// site carrying J and the others C^(N-1).
TEST(Structure, LastSiteDecomposition) {
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto inner = build_cross_chain(SiteList::uniform(n - 1, kQubit), OrderingSpec::identity(n - 1)).components;
    const auto j = spin_matrices(kQubit);
    const auto sites = SiteList::uniform(n, kQubit);
    const auto ord = OrderingSpec::identity(n);
    const double jn = 0.5;
    ComplexMatrix d = kron(inner.x, j.x) + kron(inner.y, j.y) + kron(inner.z, j.z);
    d *= 1.0 / jn;
    EXPECT_LT(max_diff(build_dot_chain(sites, ord).matrix, d), 1e-12);
    ComplexMatrix cz = kron(inner.x, j.y) - kron(inner.y, j.x);
    cz *= 1.0 / jn;
    const auto built = build_cross_chain(sites, ord).components.z;
    EXPECT_LT(std::min(max_diff(built, cz), max_diff(built, cz * cplx{-1.0})), 1e-12);
  }
}

// Property: optimized cross never beats optimized dot for the same order.
TEST(CrossDot, CrossBoundedByDot) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto st = random_pure(SiteList::uniform(3, kQubit), 300 + seed);
    const auto r = verify_cross_le_dot(st, OrderingSpec::identity(3), small_config(8));
    EXPECT_LE(r.c_max, r.d_max + 1e-3);
  }
}
