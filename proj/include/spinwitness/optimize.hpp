// optimize.hpp: derivative-free search over local frames and MK settings
// (Nelder-Mead with seeded restarts), see-saw search over
// partition-constrained product states, noise-threshold bisection and
// violation-ratio curves.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "spin.hpp"
#include "state.hpp"
#include "witness.hpp"

namespace spinwitness {

struct OptConfig {
  int restarts = 64;
  int max_iterations = 2000;
  double tolerance = 1e-9;
  std::uint64_t seed = 20050409;
  unsigned threads = 1;  ///< restarts run on this many threads; results do not depend on it
};

struct OptResult {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> argument;
  int restarts_used = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Nelder-Mead

struct SimplexResult {
  std::vector<double> x;
  double fx = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

/// Minimizes f from x0. Stops when the spread of simplex values is below
/// `tol` and the simplex has collapsed, or after `max_iter` iterations.
/// A converged simplex is rebuilt once around its best vertex to guard
/// against premature collapse.
template <class F>
SimplexResult nelder_mead(F&& f, std::vector<double> x0, double step, int max_iter, double tol) {
  const std::size_t n = x0.size();
  SimplexResult res;
  if (n == 0) {
    res.x = x0;
    res.fx = f(std::span<const double>(x0));
    res.converged = true;
    return res;
  }
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  auto build = [&](const std::vector<double>& base, double h) {
    pts.assign(n + 1, base);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += h;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(std::span<const double>(pts[i]));
  };
  build(x0, step);
  int it = 0;
  int rebuilds = 0;
  std::vector<std::size_t> idx(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (it < max_iter) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[n - 1];
    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(pts[i][k] - pts[best][k]));
    if (fv[worst] - fv[best] <= tol && size <= 1e-6) {
      if (rebuilds++ >= 1) {
        res.converged = true;
        break;
      }
      const double fb = fv[best];
      const auto xb = pts[best];
      build(xb, 0.05 * step);
      it += static_cast<int>(n);
      if (*std::min_element(fv.begin(), fv.end()) < fb - tol) rebuilds = 0;
      continue;
    }
    ++it;
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + (centroid[k] - pts[worst][k]);
    const double fr = f(std::span<const double>(xr));
    if (fr < fv[best]) {
      for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - pts[worst][k]);
      const double fe = f(std::span<const double>(xe));
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    for (std::size_t k = 0; k < n; ++k)
      xc[k] = outside ? centroid[k] + 0.5 * (xr[k] - centroid[k]) : centroid[k] + 0.5 * (pts[worst][k] - centroid[k]);
    const double fc = f(std::span<const double>(xc));
    if (fc < (outside ? fr : fv[worst])) {
      pts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
      fv[i] = f(std::span<const double>(pts[i]));
    }
  }
  const auto b = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = pts[b];
  res.fx = fv[b];
  res.iterations = it;
  return res;
}

namespace detail {

struct RestartOutcome {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> argument;
  bool converged = false;
};

/// Runs restart r = 0..restarts-1 with RNG seeded by seed + r and reduces
/// by max (ties go to the lowest restart index).
template <class Run>
OptResult run_restarts(const OptConfig& cfg, Run&& run) {
  if (cfg.restarts < 1) throw std::invalid_argument("OptConfig: restarts must be >= 1");
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t r = first; r < outcomes.size(); r += stride) {
      std::mt19937_64 rng(cfg.seed + r);
      outcomes[r] = run(rng, r);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(outcomes.size())));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  OptResult best;
  best.restarts_used = cfg.restarts;
  best.seed = cfg.seed;
  for (auto& o : outcomes)
    if (o.value > best.value) {
      best.value = o.value;
      best.argument = std::move(o.argument);
      best.converged = o.converged;
    }
  return best;
}

/// Nelder-Mead restarts maximizing `objective`; restart r starts from
/// extra_starts[r] when available, otherwise from `init(rng)`.
template <class Objective, class Init>
OptResult maximize_nm(Objective&& objective, Init&& init, const OptConfig& cfg, double step,
                      const std::vector<std::vector<double>>& extra_starts = {}) {
  return run_restarts(cfg, [&](std::mt19937_64& rng, std::size_t r) {
    std::vector<double> x0 = r < extra_starts.size() ? extra_starts[r] : init(rng);
    auto neg = [&](std::span<const double> x) { return -objective(x); };
    auto s = nelder_mead(neg, std::move(x0), step, cfg.max_iterations, cfg.tolerance);
    return RestartOutcome{-s.fx, std::move(s.x), s.converged};
  });
}

inline std::vector<double> uniform_angles(std::mt19937_64& rng, std::size_t count) {
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  std::vector<double> x(count);
  for (auto& v : x) v = u(rng);
  return x;
}

inline std::vector<ComplexMatrix> frame_unitaries(const SiteList& sites, std::span<const double> params) {
  std::vector<ComplexMatrix> us;
  us.reserve(sites.size());
  for (std::size_t k = 0; k < sites.size(); ++k)
    us.push_back(local_unitary(AxisAngle{{params[3 * k], params[3 * k + 1], params[3 * k + 2]}}, sites[k]));
  return us;
}

/// State with every site rotated into its local frame.
class RotatedState {
 public:
  explicit RotatedState(const QuantumState& s) : state_(s) {}

  void rotate(std::span<const double> params) {
    const auto& sites = state_.sites();
    const auto us = frame_unitaries(sites, params);
    if (state_.is_pure()) {
      psi_ = state_.vector();
      for (std::size_t k = 0; k < us.size(); ++k) apply_site_operator(psi_, us[k], k, sites);
    } else {
      rho_ = conjugate_local(state_.density(), us, sites);
    }
  }

  double expect(const ComplexMatrix& op) const {
    return state_.is_pure() ? expectation(std::span<const cplx>(psi_), op) : expectation(rho_, op);
  }

 private:
  const QuantumState& state_;
  StateVector psi_;
  ComplexMatrix rho_;
};

inline void check_state_matches(const QuantumState& state, const SiteList& sites) {
  if (!(state.sites() == sites)) throw DimensionError("state and witness act on different site lists");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Local frames

/// |⟨U† D U⟩| for frame parameters (α⃗_1, …, α⃗_N) flattened.
inline double frame_value(const QuantumState& state, const WitnessScalar& w, std::span<const double> params) {
  detail::check_state_matches(state, w.sites);
  detail::RotatedState rs(state);
  rs.rotate(params);
  return std::abs(rs.expect(w.matrix));
}

/// ‖⟨U† C⃗ U⟩‖ for frame parameters.
inline double frame_value(const QuantumState& state, const WitnessVector& w, std::span<const double> params) {
  detail::check_state_matches(state, w.sites);
  detail::RotatedState rs(state);
  rs.rotate(params);
  const Vec3 c{rs.expect(w.components.x), rs.expect(w.components.y), rs.expect(w.components.z)};
  return norm(c);
}

/// Maximizes the witness over all local frames of `state`. The vector
/// witness objective is ‖⟨C⃗⟩‖; its maximum over frames equals the maximum
/// of any single component since joint rotations are among the frames.
template <class Witness>
OptResult optimize_frames(const QuantumState& state, const Witness& w, const OptConfig& cfg,
                          const std::vector<std::vector<double>>& extra_starts = {}) {
  detail::check_state_matches(state, w.sites);
  const std::size_t np = 3 * state.sites().size();
  auto objective = [&](std::span<const double> x) { return frame_value(state, w, x); };
  auto init = [&](std::mt19937_64& rng) { return detail::uniform_angles(rng, np); };
  return detail::maximize_nm(objective, init, cfg, 0.6, extra_starts);
}

// ---------------------------------------------------------------------------
// Mermin-Klyshko settings

namespace detail {

/// ∂⟨F⟩/∂a_k and ∂⟨F⟩/∂ã_k (⟨F⟩ is linear in each setting vector).
inline std::pair<Vec3, Vec3> mk_setting_gradient(const QuantumState& state, const MKSettings& s, std::size_t k) {
  Vec3 ga{}, gt{};
  MKSettings probe = s;
  for (int u = 0; u < 3; ++u) {
    Vec3 e{};
    e[u] = 1.0;
    probe.a[k] = e;
    probe.a_tilde[k] = Vec3{};
    ga[u] = expectation(state, mk_recursion(probe).f);
    probe.a[k] = Vec3{};
    probe.a_tilde[k] = e;
    gt[u] = expectation(state, mk_recursion(probe).f);
  }
  return {ga, gt};
}

/// Coordinate ascent over setting vectors; each step is exact.
inline double polish_mk_settings(const QuantumState& state, MKSettings& s, int max_rounds) {
  double value = expectation(state, mk_recursion(s).f);
  for (int round = 0; round < max_rounds; ++round) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      for (int which = 0; which < 2; ++which) {
        const auto [ga, gt] = mk_setting_gradient(state, s, k);
        const Vec3& g = which == 0 ? ga : gt;
        const double gn = norm(g);
        if (gn < 1e-14) continue;
        (which == 0 ? s.a[k] : s.a_tilde[k]) = Vec3{g[0] / gn, g[1] / gn, g[2] / gn};
      }
    }
    const double next = expectation(state, mk_recursion(s).f);
    if (next - value < 1e-14) {
      value = std::max(value, next);
      break;
    }
    value = next;
  }
  return value;
}

inline std::vector<double> uniform_sphere_angles(std::mt19937_64& rng, std::size_t vectors) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), ph(-std::numbers::pi, std::numbers::pi);
  std::vector<double> x;
  for (std::size_t k = 0; k < vectors; ++k) {
    x.push_back(std::acos(u(rng)));
    x.push_back(ph(rng));
  }
  return x;
}

}  // namespace detail

/// ⟨F^(N)⟩ for settings given as (θ_a, φ_a, θ_ã, φ_ã) per site.
inline double mk_value(const QuantumState& state, std::span<const double> angles) {
  return expectation(state, detail::mk_recursion(MKSettings::from_angles(angles)).f);
}

/// Maximizes ⟨F^(N)⟩ over measurement settings: Nelder-Mead restarts on
/// polar/azimuthal angles, then exact coordinate ascent on the best.
inline OptResult optimize_mk_settings(const QuantumState& state, const OptConfig& cfg) {
  if (!state.sites().all_qubits()) throw std::invalid_argument("optimize_mk_settings: qubit sites only");
  const std::size_t n = state.sites().size();
  auto objective = [&](std::span<const double> x) { return mk_value(state, x); };
  auto init = [&](std::mt19937_64& rng) { return detail::uniform_sphere_angles(rng, 2 * n); };
  auto best = detail::maximize_nm(objective, init, cfg, 0.5);
  auto settings = MKSettings::from_angles(best.argument);
  detail::polish_mk_settings(state, settings, 500);
  auto polished = settings.to_angles();
  const double v = mk_value(state, polished);
  if (v > best.value) {
    best.value = v;
    best.argument = std::move(polished);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Partition-constrained product states

enum class WitnessKind { dot, cross, mk };

namespace detail {

/// Index bookkeeping for a product state over partition blocks.
class BlockLayout {
 public:
  BlockLayout(const SiteList& sites, const PartitionSpec& partition) : sites_(sites), partition_(partition) {
    partition.validate(sites.size());
    const std::size_t n = sites.size();
    const std::size_t dim = sites.total_dim();
    local_.assign(partition.blocks().size(), std::vector<std::size_t>(dim));
    std::vector<std::size_t> digit(n);
    for (std::size_t f = 0; f < dim; ++f) {
      std::size_t rest = f;
      for (std::size_t k = n; k-- > 0;) {
        digit[k] = rest % sites.site_dim(k);
        rest /= sites.site_dim(k);
      }
      for (std::size_t b = 0; b < partition.blocks().size(); ++b) {
        std::size_t l = 0;
        for (auto k : partition.blocks()[b]) l = l * sites.site_dim(k) + digit[k];
        local_[b][f] = l;
      }
    }
    for (const auto& b : partition.blocks()) dims_.push_back(block_dim(b, sites));
  }

  std::size_t blocks() const noexcept { return dims_.size(); }
  std::size_t block_dimension(std::size_t b) const { return dims_[b]; }

  StateVector assemble(const std::vector<StateVector>& v) const {
    const std::size_t dim = sites_.total_dim();
    StateVector psi(dim);
    for (std::size_t f = 0; f < dim; ++f) {
      cplx a = 1.0;
      for (std::size_t b = 0; b < v.size(); ++b) a *= v[b][local_[b][f]];
      psi[f] = a;
    }
    return psi;
  }

  /// ⟨rest| O |rest⟩ as an operator on block b, other blocks fixed.
  ComplexMatrix effective(const ComplexMatrix& op, const std::vector<StateVector>& v, std::size_t b) const {
    const std::size_t dim = sites_.total_dim();
    StateVector w(dim);
    for (std::size_t f = 0; f < dim; ++f) {
      cplx a = 1.0;
      for (std::size_t c = 0; c < v.size(); ++c)
        if (c != b) a *= v[c][local_[c][f]];
      w[f] = a;
    }
    const auto& lb = local_[b];
    ComplexMatrix m(dims_[b]);
    for (std::size_t f = 0; f < dim; ++f) {
      if (w[f] == cplx{}) continue;
      const cplx wf = std::conj(w[f]);
      const auto row = op.row(f);
      for (std::size_t g = 0; g < dim; ++g) {
        if (row[g] == cplx{} || w[g] == cplx{}) continue;
        m(lb[f], lb[g]) += wf * row[g] * w[g];
      }
    }
    return m.hermitian_part();
  }

  std::vector<double> to_params(const std::vector<StateVector>& v) const {
    std::vector<double> p;
    for (const auto& blk : v) {
      const auto g = gauge_fix(blk);
      for (const auto& a : g) p.push_back(a.real());
      for (const auto& a : g) p.push_back(a.imag());
    }
    return p;
  }

 private:
  const SiteList& sites_;
  const PartitionSpec& partition_;
  std::vector<std::vector<std::size_t>> local_;
  std::vector<std::size_t> dims_;
};

inline StateVector top_eigenvector(const ComplexMatrix& m) {
  const auto spec = eig_hermitian(m);
  const std::size_t n = m.dim();
  StateVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = spec.eigenvectors(i, n - 1);
  return v;
}

inline StateVector random_block(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  StateVector v(d);
  for (auto& a : v) {
    const double re = g(rng);
    const double im = g(rng);
    a = {re, im};
  }
  const double n = norm2(v);
  for (auto& a : v) a /= n;
  return v;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v{g(rng), g(rng), g(rng)};
  const double n = norm(v);
  return {v[0] / n, v[1] / n, v[2] / n};
}

/// One see-saw run: alternately replace each block by the top eigenvector
/// of its effective operator and refit the auxiliary variables (sign,
/// direction n⃗, or MK settings). Monotone in the objective.
struct SeeSaw {
  const SiteList& sites;
  const BlockLayout& layout;
  WitnessKind kind;
  const WitnessScalar* scalar = nullptr;
  const WitnessVector* vec = nullptr;
  int max_rounds = 500;

  RestartOutcome run(std::mt19937_64& rng, std::size_t restart) const {
    std::vector<StateVector> blocks;
    for (std::size_t b = 0; b < layout.blocks(); ++b) blocks.push_back(random_block(rng, layout.block_dimension(b)));
    const double sign = restart % 2 == 0 ? 1.0 : -1.0;
    Vec3 n = random_unit(rng);
    MKSettings mk;
    if (kind == WitnessKind::mk)
      for (std::size_t k = 0; k < sites.size(); ++k) {
        mk.a.push_back(random_unit(rng));
        mk.a_tilde.push_back(random_unit(rng));
      }

    auto current_op = [&]() -> ComplexMatrix {
      switch (kind) {
        case WitnessKind::dot: return scalar->matrix * cplx{sign};
        case WitnessKind::cross:
          return vec->components.x * cplx{n[0]} + vec->components.y * cplx{n[1]} + vec->components.z * cplx{n[2]};
        case WitnessKind::mk: return mk_recursion(mk).f;
      }
      return {};
    };

    double value = -std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int round = 0; round < max_rounds; ++round) {
      ComplexMatrix op = current_op();
      for (std::size_t b = 0; b < layout.blocks(); ++b) blocks[b] = top_eigenvector(layout.effective(op, blocks, b));
      const auto psi = layout.assemble(blocks);
      const auto st = QuantumState::from_amplitudes(sites, psi);
      if (kind == WitnessKind::cross) {
        const Vec3 c{expectation(st, vec->components.x), expectation(st, vec->components.y),
                     expectation(st, vec->components.z)};
        const double cn = norm(c);
        if (cn > 0) n = {c[0] / cn, c[1] / cn, c[2] / cn};
      } else if (kind == WitnessKind::mk) {
        polish_mk_settings(st, mk, 1);
      }
      const double next = expectation(st, current_op());
      if (next - value < 1e-13) {
        value = std::max(value, next);
        converged = true;
        break;
      }
      value = next;
    }
    auto params = layout.to_params(blocks);
    if (kind == WitnessKind::mk) {
      const auto ang = mk.to_angles();
      params.insert(params.end(), ang.begin(), ang.end());
    }
    // Report the witness magnitude of the final state, not the signed
    // surrogate objective.
    const auto st = QuantumState::from_amplitudes(sites, layout.assemble(blocks));
    double reported = value;
    if (kind == WitnessKind::dot) reported = std::abs(expectation(st, scalar->matrix));
    if (kind == WitnessKind::cross)
      reported = norm(Vec3{expectation(st, vec->components.x), expectation(st, vec->components.y),
                           expectation(st, vec->components.z)});
    if (kind == WitnessKind::mk) reported = expectation(st, mk_recursion(mk).f);
    return RestartOutcome{reported, std::move(params), converged};
  }
};

}  // namespace detail

/// Best |⟨D⟩| over product states of the partition (a lower bound on the
/// partition's true maximum).
inline OptResult partition_bound(const WitnessScalar& w, const PartitionSpec& partition, const OptConfig& cfg) {
  const detail::BlockLayout layout(w.sites, partition);
  const detail::SeeSaw ss{w.sites, layout, WitnessKind::dot, &w, nullptr, std::max(1, cfg.max_iterations / 4)};
  return detail::run_restarts(cfg, [&](std::mt19937_64& rng, std::size_t r) { return ss.run(rng, r); });
}

/// Best ‖⟨C⃗⟩‖ over product states of the partition.
inline OptResult partition_bound(const WitnessVector& w, const PartitionSpec& partition, const OptConfig& cfg) {
  const detail::BlockLayout layout(w.sites, partition);
  const detail::SeeSaw ss{w.sites, layout, WitnessKind::cross, nullptr, &w, std::max(1, cfg.max_iterations / 4)};
  return detail::run_restarts(cfg, [&](std::mt19937_64& rng, std::size_t r) { return ss.run(rng, r); });
}

/// Best ⟨F^(N)⟩ jointly over MK settings and product states of the
/// partition. The argument holds the state parameters followed by the
/// 4N setting angles.
inline OptResult partition_bound_mk(const SiteList& sites, const PartitionSpec& partition, const OptConfig& cfg) {
  if (!sites.all_qubits()) throw std::invalid_argument("partition_bound_mk: qubit sites only");
  const detail::BlockLayout layout(sites, partition);
  const detail::SeeSaw ss{sites, layout, WitnessKind::mk, nullptr, nullptr, std::max(1, cfg.max_iterations / 4)};
  return detail::run_restarts(cfg, [&](std::mt19937_64& rng, std::size_t r) { return ss.run(rng, r); });
}

/// Re-evaluates a partition_bound argument.
inline double partition_value(const SiteList& sites, const PartitionSpec& partition, WitnessKind kind,
                              std::span<const double> argument, const WitnessScalar* d = nullptr,
                              const WitnessVector* c = nullptr) {
  const std::size_t np = product_state_param_count(sites, partition);
  const auto st = product_state(sites, partition, argument.subspan(0, np));
  switch (kind) {
    case WitnessKind::dot: return std::abs(expectation(st, d->matrix));
    case WitnessKind::cross:
      return norm(Vec3{expectation(st, c->components.x), expectation(st, c->components.y),
                       expectation(st, c->components.z)});
    case WitnessKind::mk: return mk_value(st, argument.subspan(np));
  }
  return 0.0;
}

struct OrderingResult {
  OrderingSpec ordering;
  OptResult result;
};

struct OrderingSweep {
  std::vector<OrderingResult> per_ordering;
  std::size_t best = 0;
  double value() const { return per_ordering.at(best).result.value; }
};

/// partition_bound for every nesting order (MK is order independent and
/// yields a single entry).
inline OrderingSweep partition_bound_orderings(const SiteList& sites, const PartitionSpec& partition,
                                               WitnessKind kind, const OptConfig& cfg) {
  OrderingSweep sweep;
  if (kind == WitnessKind::mk) {
    sweep.per_ordering.push_back({OrderingSpec::identity(sites.size()), partition_bound_mk(sites, partition, cfg)});
    return sweep;
  }
  for (const auto& ord : OrderingSpec::all(sites.size())) {
    OptResult r = kind == WitnessKind::dot ? partition_bound(build_dot_chain(sites, ord), partition, cfg)
                                           : partition_bound(build_cross_chain(sites, ord), partition, cfg);
    sweep.per_ordering.push_back({ord, std::move(r)});
  }
  for (std::size_t i = 1; i < sweep.per_ordering.size(); ++i)
    if (sweep.per_ordering[i].result.value > sweep.per_ordering[sweep.best].result.value) sweep.best = i;
  return sweep;
}

// ---------------------------------------------------------------------------
// Noise thresholds

struct NoiseThreshold {
  double nu = 0.0;              ///< largest noise fraction that still violates
  double analytic = 0.0;        ///< 1 - 1/V from the pure-state violation V
  double pure_violation = 0.0;  ///< V
  bool violated = false;        ///< false when the pure state never violates
  bool consistent = false;      ///< |nu - analytic| <= 5e-3
};

namespace detail {

template <class Violation>
NoiseThreshold bisect_noise(const QuantumState& state, Violation&& violation) {
  if (!state.is_pure()) throw std::invalid_argument("noise_threshold: expects a pure input state");
  NoiseThreshold out;
  // Product states sit exactly on the bound; rounding must not count as a violation.
  constexpr double kMargin = 1e-9;
  out.pure_violation = violation(state.to_mixed());
  if (out.pure_violation <= 1.0 + kMargin) return out;
  out.violated = true;
  out.analytic = 1.0 - 1.0 / out.pure_violation;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 20; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (violation(mix_white_noise(state, mid)) > 1.0 + kMargin)
      lo = mid;
    else
      hi = mid;
  }
  out.nu = 0.5 * (lo + hi);
  out.consistent = std::abs(out.nu - out.analytic) <= 5e-3;
  return out;
}

}  // namespace detail

template <class Witness>
NoiseThreshold noise_threshold(const QuantumState& state, const Witness& w, const OptConfig& cfg) {
  return detail::bisect_noise(state, [&](const QuantumState& s) { return optimize_frames(s, w, cfg).value; });
}

inline NoiseThreshold noise_threshold_mk(const QuantumState& state, const OptConfig& cfg) {
  return detail::bisect_noise(state, [&](const QuantumState& s) { return optimize_mk_settings(s, cfg).value; });
}

// ---------------------------------------------------------------------------
// Ratio curves and the cross ≤ dot comparison

struct RatioPoint {
  std::size_t n = 0;
  double ratio = 0.0;
};

/// R(N) = Max(N)/Max(N-1) for N = 2…max_n, with Max(1) = 1.
inline std::vector<RatioPoint> ratio_curve(std::size_t max_n, SpinQuantum j, WitnessKind which,
                                           std::size_t cap = kDefaultDimensionCap) {
  if (which == WitnessKind::mk) {
    std::vector<RatioPoint> out;
    for (std::size_t n = 2; n <= max_n; ++n) out.push_back({n, mk_quantum_bound(n) / mk_quantum_bound(n - 1)});
    return out;
  }
  check_dimension_cap(SiteList::uniform(max_n, j), cap);
  std::vector<RatioPoint> out;
  double prev = 1.0;
  for (std::size_t n = 2; n <= max_n; ++n) {
    const auto sites = SiteList::uniform(n, j);
    const auto ord = OrderingSpec::identity(n);
    const double cur = which == WitnessKind::cross ? max_violation_cross(sites, ord, cap)
                                                   : max_violation_dot(sites, ord, cap);
    out.push_back({n, cur / prev});
    prev = cur;
  }
  return out;
}

struct CrossDot {
  double c_max = 0.0;
  double d_max = 0.0;
};

/// Optimized ‖⟨C⃗⟩‖ and |⟨D⟩| for the same state and nesting order. The
/// dot search is also started from the best cross frames.
inline CrossDot verify_cross_le_dot(const QuantumState& state, const OrderingSpec& ord, const OptConfig& cfg) {
  const auto& sites = state.sites();
  const auto c = optimize_frames(state, build_cross_chain(sites, ord), cfg);
  const auto d = optimize_frames(state, build_dot_chain(sites, ord), cfg, {c.argument});
  return {c.value, d.value};
}

// ---------------------------------------------------------------------------
// W-state phases

struct W3Phases {
  double alpha = 0.0;
  double beta = 0.0;
  double value = 0.0;  ///< |⟨W₃|D^(3)|W₃⟩|
};

/// Phases (α, β) maximizing |⟨W₃(α, β)|D^(3)|W₃(α, β)⟩| for the identity
/// ordering: 64×64 grid scan, then Nelder-Mead refinement from the best cell.
inline W3Phases find_w3_eigen_phases() {
  const auto d3 = build_dot_chain(SiteList::uniform(3, kQubit), OrderingSpec::identity(3));
  auto value = [&](double a, double b) { return std::abs(expectation(w3(a, b), d3.matrix)); };
  W3Phases best;
  constexpr int kGrid = 64;
  for (int i = 0; i < kGrid; ++i)
    for (int k = 0; k < kGrid; ++k) {
      const double a = 2.0 * std::numbers::pi * i / kGrid, b = 2.0 * std::numbers::pi * k / kGrid;
      const double v = value(a, b);
      if (v > best.value) best = {a, b, v};
    }
  auto neg = [&](std::span<const double> x) { return -value(x[0], x[1]); };
  const auto s = nelder_mead(neg, {best.alpha, best.beta}, 0.05, 2000, 1e-15);
  if (-s.fx > best.value) best = {s.x[0], s.x[1], -s.fx};
  return best;
}

}  // namespace spinwitness
