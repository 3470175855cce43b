// witness.hpp: the scalar witness D^(N) = J⃗^(N)·(J⃗^(N-1) × … (J⃗^(2) × J⃗^(1)))
// and the vector witness C⃗^(N) = J⃗^(N) × (… (J⃗^(2) × J⃗^(1))), both
// normalized by 1/(j_1…j_N), for any nesting order; plus the
// Mermin-Klyshko operator F^(N).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "spin.hpp"

namespace spinwitness {

inline constexpr std::size_t kDefaultDimensionCap = 4096;

class DimensionCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline void check_dimension_cap(const SiteList& sites, std::size_t cap) {
  if (sites.total_dim() > cap)
    throw DimensionCapExceeded("total dimension " + std::to_string(sites.total_dim()) + " exceeds cap " +
                               std::to_string(cap));
}

/// roles[k] is the 0-based site that plays role (k+1) in the nested
/// product; role 1 is innermost.
class OrderingSpec {
 public:
  OrderingSpec() = default;
  explicit OrderingSpec(std::vector<std::size_t> roles) : roles_(std::move(roles)) {}

  static OrderingSpec identity(std::size_t n) {
    std::vector<std::size_t> r(n);
    std::iota(r.begin(), r.end(), std::size_t{0});
    return OrderingSpec(std::move(r));
  }

  /// "2,1,3,4" with 1-based labels.
  static OrderingSpec parse(const std::string& text) {
    std::vector<std::size_t> roles;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::size_t pos = 0;
      const long v = std::stol(tok, &pos);
      if (v < 1) throw std::invalid_argument("OrderingSpec: labels are 1-based");
      roles.push_back(static_cast<std::size_t>(v - 1));
    }
    return OrderingSpec(std::move(roles));
  }

  /// All n! orderings in lexicographic order.
  static std::vector<OrderingSpec> all(std::size_t n) {
    std::vector<OrderingSpec> out;
    std::vector<std::size_t> r(n);
    std::iota(r.begin(), r.end(), std::size_t{0});
    do out.emplace_back(r);
    while (std::next_permutation(r.begin(), r.end()));
    return out;
  }

  void validate(std::size_t n) const {
    if (roles_.size() != n) throw std::invalid_argument("OrderingSpec: length differs from site count");
    std::vector<bool> seen(n, false);
    for (auto r : roles_) {
      if (r >= n || seen[r]) throw std::invalid_argument("OrderingSpec: not a permutation");
      seen[r] = true;
    }
  }

  const std::vector<std::size_t>& roles() const noexcept { return roles_; }
  std::size_t size() const noexcept { return roles_.size(); }

  std::string to_string() const {
    std::string s;
    for (std::size_t k = 0; k < roles_.size(); ++k) {
      if (k) s += ',';
      s += std::to_string(roles_[k] + 1);
    }
    return s;
  }

  friend bool operator==(const OrderingSpec&, const OrderingSpec&) = default;

 private:
  std::vector<std::size_t> roles_;
};

struct WitnessScalar {
  ComplexMatrix matrix;
  SiteList sites;
  OrderingSpec ordering;
  double normalization = 1.0;
};

struct WitnessVector {
  VectorOperator components;
  SiteList sites;
  OrderingSpec ordering;
  double normalization = 1.0;
};

namespace detail {

inline void require_commuting(const VectorOperator& a, const VectorOperator& b, const char* who) {
  for (int v = 0; v < 3; ++v)
    for (int w = 0; w < 3; ++w)
      if (commutator(a[v], b[w]).max_abs() > 1e-10)
        throw std::invalid_argument(std::string(who) + ": operands do not commute (overlapping site support)");
}

/// Symmetrize and insist the correction is at rounding level.
inline ComplexMatrix enforce_hermitian(const ComplexMatrix& m) {
  const double defect = m.hermitian_defect();
  if (defect > 1e-12 * std::max(1.0, m.max_abs()))
    throw NotHermitianError("witness construction produced a non-Hermitian operator");
  return m.hermitian_part();
}

/// Index map from role-ordered tensor space to site-ordered space.
inline std::vector<std::size_t> role_to_site_index(const SiteList& sites, const OrderingSpec& ord) {
  const std::size_t n = sites.size();
  const std::size_t dim = sites.total_dim();
  std::vector<std::size_t> site_stride(n);
  for (std::size_t k = 0; k < n; ++k) site_stride[k] = sites.stride(k);
  std::vector<std::size_t> map(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t rest = i, out = 0;
    for (std::size_t r = n; r-- > 0;) {
      const std::size_t s = ord.roles()[r];
      const std::size_t d = sites.site_dim(s);
      out += (rest % d) * site_stride[s];
      rest /= d;
    }
    map[i] = out;
  }
  return map;
}

inline ComplexMatrix permute_basis(const ComplexMatrix& m, const std::vector<std::size_t>& map) {
  const std::size_t n = m.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(map[i], map[j]) = m(i, j);
  return out;
}

/// T_k = J⃗^(k) × T_{k-1} in role order, roles [0, count), unnormalized.
inline VectorOperator cross_chain_roles(const SiteList& sites, const OrderingSpec& ord, std::size_t count) {
  VectorOperator t = spin_matrices(sites[ord.roles()[0]]);
  for (std::size_t k = 1; k < count; ++k) {
    const auto j = spin_matrices(sites[ord.roles()[k]]);
    VectorOperator next;
    next.x = kron(t.z, j.y) - kron(t.y, j.z);
    next.y = kron(t.x, j.z) - kron(t.z, j.x);
    next.z = kron(t.y, j.x) - kron(t.x, j.y);
    t = std::move(next);
  }
  return t;
}

inline void validate_chain_inputs(const SiteList& sites, const OrderingSpec& ord, std::size_t cap) {
  if (sites.size() == 0) throw std::invalid_argument("witness: need at least one site");
  ord.validate(sites.size());
  for (const auto& s : sites.sites())
    if (s.two_j == 0) throw std::invalid_argument("witness: spin-0 site has no normalization");
  check_dimension_cap(sites, cap);
}

}  // namespace detail

/// (a × b)_u = Σ ε_uvw a_v b_w; a and b must commute componentwise.
inline VectorOperator cross_op(const VectorOperator& a, const VectorOperator& b) {
  detail::require_commuting(a, b, "cross_op");
  VectorOperator c;
  c.x = a.y * b.z - a.z * b.y;
  c.y = a.z * b.x - a.x * b.z;
  c.z = a.x * b.y - a.y * b.x;
  return c;
}

/// Σ_u a_u b_u; a and b must commute componentwise.
inline ComplexMatrix dot_op(const VectorOperator& a, const VectorOperator& b) {
  detail::require_commuting(a, b, "dot_op");
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

/// C⃗^(N); for N = 1 this is J⃗/j.
inline WitnessVector build_cross_chain(const SiteList& sites, const OrderingSpec& ord,
                                       std::size_t cap = kDefaultDimensionCap) {
  detail::validate_chain_inputs(sites, ord, cap);
  const std::size_t n = sites.size();
  auto t = detail::cross_chain_roles(sites, ord, n);
  const double norm = 1.0 / sites.j_product();
  const auto map = detail::role_to_site_index(sites, ord);
  WitnessVector w;
  for (int u = 0; u < 3; ++u) {
    t[u] *= norm;
    w.components[u] = detail::enforce_hermitian(detail::permute_basis(t[u], map));
  }
  w.sites = sites;
  w.ordering = ord;
  w.normalization = norm;
  return w;
}

/// D^(N); for N = 1 this is the identity.
inline WitnessScalar build_dot_chain(const SiteList& sites, const OrderingSpec& ord,
                                     std::size_t cap = kDefaultDimensionCap) {
  detail::validate_chain_inputs(sites, ord, cap);
  const std::size_t n = sites.size();
  WitnessScalar w;
  w.sites = sites;
  w.ordering = ord;
  w.normalization = 1.0 / sites.j_product();
  if (n == 1) {
    w.matrix = ComplexMatrix::identity(sites.total_dim());
    return w;
  }
  const auto t = detail::cross_chain_roles(sites, ord, n - 1);
  const auto j = spin_matrices(sites[ord.roles()[n - 1]]);
  ComplexMatrix d = kron(t.x, j.x);
  d += kron(t.y, j.y);
  d += kron(t.z, j.z);
  d *= w.normalization;
  w.matrix = detail::enforce_hermitian(detail::permute_basis(d, detail::role_to_site_index(sites, ord)));
  return w;
}

/// max |λ(D^(N))|
inline double max_violation_dot(const SiteList& sites, const OrderingSpec& ord,
                                std::size_t cap = kDefaultDimensionCap) {
  const auto ev = eigvals_hermitian(build_dot_chain(sites, ord, cap).matrix);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

/// Largest eigenvalue of C_z^(N), which equals max ‖⟨C⃗^(N)⟩‖.
inline double max_violation_cross(const SiteList& sites, const OrderingSpec& ord,
                                  std::size_t cap = kDefaultDimensionCap) {
  const auto ev = eigvals_hermitian(build_cross_chain(sites, ord, cap).components.z);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

/// Largest |λ_k + λ_{n-1-k}| over an ascending spectrum: zero when the
/// multiset is symmetric under λ ↦ -λ.
inline double pairing_defect(const std::vector<double>& ascending) {
  double d = 0.0;
  const std::size_t n = ascending.size();
  for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(ascending[k] + ascending[n - 1 - k]));
  return d;
}

// ---------------------------------------------------------------------------
// Mermin-Klyshko

/// Per qubit two directions: A^(k) = a_k·σ⃗, Ã^(k) = ã_k·σ⃗.
struct MKSettings {
  std::vector<Vec3> a, a_tilde;

  std::size_t size() const noexcept { return a.size(); }

  /// N = 2: a = x̂, ã = ŷ, b = (x̂+ŷ)/√2, b̃ = (x̂-ŷ)/√2.
  static MKSettings canonical_two_qubit() {
    const double h = 1.0 / std::sqrt(2.0);
    return MKSettings{{{1, 0, 0}, {h, h, 0}}, {{0, 1, 0}, {h, -h, 0}}};
  }

  /// Unit vectors from polar/azimuthal pairs, laid out
  /// (θ_a, φ_a, θ_ã, φ_ã) per site.
  static MKSettings from_angles(std::span<const double> angles) {
    if (angles.size() % 4 != 0) throw std::invalid_argument("MKSettings: angle count must be a multiple of 4");
    MKSettings s;
    auto unit = [](double th, double ph) {
      return Vec3{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    };
    for (std::size_t k = 0; k < angles.size(); k += 4) {
      s.a.push_back(unit(angles[k], angles[k + 1]));
      s.a_tilde.push_back(unit(angles[k + 2], angles[k + 3]));
    }
    return s;
  }

  std::vector<double> to_angles() const {
    std::vector<double> out;
    auto push = [&](const Vec3& v) {
      const double r = norm(v);
      out.push_back(std::acos(std::clamp(v[2] / r, -1.0, 1.0)));
      out.push_back(std::atan2(v[1], v[0]));
    };
    for (std::size_t k = 0; k < a.size(); ++k) {
      push(a[k]);
      push(a_tilde[k]);
    }
    return out;
  }

  void validate() const {
    if (a.size() != a_tilde.size() || a.empty())
      throw std::invalid_argument("MKSettings: need one (a, ã) pair per site");
    for (std::size_t k = 0; k < a.size(); ++k)
      if (std::abs(norm(a[k]) - 1.0) > 1e-12 || std::abs(norm(a_tilde[k]) - 1.0) > 1e-12)
        throw std::invalid_argument("MKSettings: setting directions must be unit vectors");
  }
};

struct MKOperators {
  ComplexMatrix f;        ///< F^(N)
  ComplexMatrix f_tilde;  ///< F̃^(N), A ↔ Ã exchanged throughout
};

/// v·σ⃗ for an arbitrary real 3-vector.
inline ComplexMatrix pauli_observable(const Vec3& v) {
  const auto j = spin_matrices(kQubit);
  return j.x * cplx{2.0 * v[0]} + j.y * cplx{2.0 * v[1]} + j.z * cplx{2.0 * v[2]};
}

namespace detail {

/// MK recursion without the unit-vector check; F is linear in each
/// setting vector, which the optimizer exploits.
inline MKOperators mk_recursion(const MKSettings& s) {
  MKOperators f{pauli_observable(s.a[0]), pauli_observable(s.a_tilde[0])};
  for (std::size_t k = 1; k < s.size(); ++k) {
    const auto a = pauli_observable(s.a[k]);
    const auto at = pauli_observable(s.a_tilde[k]);
    const auto sum = a + at;
    const auto diff = a - at;
    MKOperators next;
    next.f = (kron(f.f, sum) + kron(f.f_tilde, diff)) * cplx{0.5};
    next.f_tilde = (kron(f.f_tilde, sum) - kron(f.f, diff)) * cplx{0.5};
    f = std::move(next);
  }
  return f;
}

}  // namespace detail

/// 2F^(N) = F^(N-1)⊗(A+Ã) + F̃^(N-1)⊗(A-Ã), F^(1) = A^(1).
inline MKOperators build_mk(const MKSettings& s) {
  s.validate();
  auto f = detail::mk_recursion(s);
  f.f = detail::enforce_hermitian(f.f);
  f.f_tilde = detail::enforce_hermitian(f.f_tilde);
  return f;
}

/// Rejects non-qubit sites before building F^(N).
inline MKOperators build_mk(const MKSettings& s, const SiteList& sites) {
  if (!sites.all_qubits()) throw std::invalid_argument("build_mk: Mermin-Klyshko operators need qubit sites");
  if (sites.size() != s.size()) throw std::invalid_argument("build_mk: settings/site count mismatch");
  return build_mk(s);
}

/// The quantum bound 2^{(N-1)/2}.
inline double mk_quantum_bound(std::size_t n) { return std::pow(2.0, 0.5 * (static_cast<double>(n) - 1.0)); }

}  // namespace spinwitness
