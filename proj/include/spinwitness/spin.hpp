// spin.hpp: angular-momentum matrices for arbitrary j, site embedding,
// local SU(2) frames and their SO(3) image.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace spinwitness {

/// Spin quantum number stored as 2j so half-integers are exact.
struct SpinQuantum {
  int two_j = 1;

  constexpr SpinQuantum() = default;
  constexpr explicit SpinQuantum(int twice_j) : two_j(twice_j) {
    if (twice_j < 0) throw std::invalid_argument("SpinQuantum: 2j must be non-negative");
  }

  constexpr double j() const noexcept { return 0.5 * two_j; }
  constexpr std::size_t dim() const noexcept { return static_cast<std::size_t>(two_j) + 1; }
  friend constexpr bool operator==(SpinQuantum, SpinQuantum) = default;
};

inline constexpr SpinQuantum kQubit{1};
inline constexpr SpinQuantum kQutrit{2};

/// Ordered sites; site 0 is the leftmost (most significant) tensor factor.
class SiteList {
 public:
  SiteList() = default;
  explicit SiteList(std::vector<SpinQuantum> sites) : sites_(std::move(sites)) {}

  static SiteList uniform(std::size_t n, SpinQuantum s) { return SiteList(std::vector<SpinQuantum>(n, s)); }

  std::size_t size() const noexcept { return sites_.size(); }
  const SpinQuantum& operator[](std::size_t k) const { return sites_.at(k); }
  const std::vector<SpinQuantum>& sites() const noexcept { return sites_; }

  std::size_t site_dim(std::size_t k) const { return sites_.at(k).dim(); }

  std::size_t total_dim() const noexcept {
    std::size_t d = 1;
    for (const auto& s : sites_) d *= s.dim();
    return d;
  }

  /// Product of site dimensions strictly to the right of k.
  std::size_t stride(std::size_t k) const {
    std::size_t d = 1;
    for (std::size_t i = k + 1; i < sites_.size(); ++i) d *= sites_[i].dim();
    return d;
  }

  bool all_qubits() const noexcept {
    return std::all_of(sites_.begin(), sites_.end(), [](SpinQuantum s) { return s.two_j == 1; });
  }

  /// Product of the j values (the witness normalization denominator).
  double j_product() const noexcept {
    double p = 1.0;
    for (const auto& s : sites_) p *= s.j();
    return p;
  }

  friend bool operator==(const SiteList&, const SiteList&) = default;

 private:
  std::vector<SpinQuantum> sites_;
};

/// (O_x, O_y, O_z)
struct VectorOperator {
  ComplexMatrix x, y, z;

  ComplexMatrix& operator[](int u) { return u == 0 ? x : (u == 1 ? y : z); }
  const ComplexMatrix& operator[](int u) const { return u == 0 ? x : (u == 1 ? y : z); }
  std::size_t dim() const noexcept { return x.dim(); }

  bool is_hermitian(double rel_tol = 1e-12) const {
    return x.is_hermitian(rel_tol) && y.is_hermitian(rel_tol) && z.is_hermitian(rel_tol);
  }
};

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// α⃗ of U(α⃗) = exp(i α⃗·J⃗); direction is the axis, norm the angle.
struct AxisAngle {
  Vec3 alpha{0.0, 0.0, 0.0};

  bool finite() const noexcept {
    return std::isfinite(alpha[0]) && std::isfinite(alpha[1]) && std::isfinite(alpha[2]);
  }
};

/// Basis ordered m = j, j-1, …, -j.
inline VectorOperator spin_matrices(SpinQuantum s) {
  const std::size_t d = s.dim();
  const double j = s.j();
  ComplexMatrix jp(d), jz(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double m = j - static_cast<double>(k);
    jz(k, k) = m;
    // J+ |m⟩ = sqrt(j(j+1) - m(m+1)) |m+1⟩, and |m+1⟩ sits at index k-1.
    if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const ComplexMatrix jm = jp.adjoint();
  VectorOperator out;
  out.x = (jp + jm) * cplx{0.5, 0.0};
  out.y = (jp - jm) * cplx{0.0, -0.5};
  out.z = std::move(jz);
  return out;
}

/// I ⊗ … ⊗ op ⊗ … ⊗ I with `op` at `site_index`.
inline ComplexMatrix embed_site(const ComplexMatrix& op, std::size_t site_index, const SiteList& sites) {
  if (site_index >= sites.size())
    throw std::out_of_range("embed_site: site index " + std::to_string(site_index) + " out of range");
  if (op.dim() != sites.site_dim(site_index))
    throw DimensionError("embed_site: operator dimension does not match site dimension");
  std::size_t left = 1;
  for (std::size_t k = 0; k < site_index; ++k) left *= sites.site_dim(k);
  const std::size_t right = sites.stride(site_index);
  return kron(kron(ComplexMatrix::identity(left), op), ComplexMatrix::identity(right));
}

inline VectorOperator embed_vector(const VectorOperator& op, std::size_t site_index, const SiteList& sites) {
  return {embed_site(op.x, site_index, sites), embed_site(op.y, site_index, sites),
          embed_site(op.z, site_index, sites)};
}

/// Σ_k J⃗^(k) embedded in the full space.
inline VectorOperator total_spin(const SiteList& sites) {
  const std::size_t d = sites.total_dim();
  VectorOperator total{ComplexMatrix(d), ComplexMatrix(d), ComplexMatrix(d)};
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const auto jk = embed_vector(spin_matrices(sites[k]), k, sites);
    for (int u = 0; u < 3; ++u) total[u] += jk[u];
  }
  return total;
}

/// exp(i α⃗·J⃗) on one site.
inline ComplexMatrix local_unitary(const AxisAngle& a, SpinQuantum s) {
  const auto j = spin_matrices(s);
  ComplexMatrix gen = j.x * cplx{a.alpha[0]} + j.y * cplx{a.alpha[1]} + j.z * cplx{a.alpha[2]};
  return unitary_exp(gen);
}

/// SO(3) image of U(α⃗): if |ψ⟩ ↦ U(α⃗)|ψ⟩ then ⟨J⃗⟩ ↦ R(α⃗)⟨J⃗⟩. This is a
/// right-handed rotation about α̂ by angle -‖α⃗‖ (checked against
/// local_unitary in the tests).
inline Mat3 so3_rotation(const AxisAngle& a) {
  const double theta = std::sqrt(a.alpha[0] * a.alpha[0] + a.alpha[1] * a.alpha[1] + a.alpha[2] * a.alpha[2]);
  Mat3 r{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  if (theta == 0.0) return r;
  const Vec3 n{a.alpha[0] / theta, a.alpha[1] / theta, a.alpha[2] / theta};
  const double c = std::cos(-theta), s = std::sin(-theta), omc = 1.0 - c;
  r[0] = {c + n[0] * n[0] * omc, n[0] * n[1] * omc - n[2] * s, n[0] * n[2] * omc + n[1] * s};
  r[1] = {n[1] * n[0] * omc + n[2] * s, c + n[1] * n[1] * omc, n[1] * n[2] * omc - n[0] * s};
  r[2] = {n[2] * n[0] * omc - n[1] * s, n[2] * n[1] * omc + n[0] * s, c + n[2] * n[2] * omc};
  return r;
}

inline Vec3 apply(const Mat3& r, const Vec3& v) noexcept {
  return {r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2], r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
          r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2]};
}

inline double norm(const Vec3& v) noexcept { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

inline Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double dot(const Vec3& a, const Vec3& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Apply a single-site operator to a state vector in place.
inline void apply_site_operator(StateVector& psi, const ComplexMatrix& op, std::size_t site, const SiteList& sites) {
  const std::size_t d = sites.site_dim(site);
  if (op.dim() != d) throw DimensionError("apply_site_operator: operator/site dimension mismatch");
  if (psi.size() != sites.total_dim()) throw DimensionError("apply_site_operator: state dimension mismatch");
  const std::size_t right = sites.stride(site);
  const std::size_t left = psi.size() / (d * right);
  std::vector<cplx> tmp(d);
  for (std::size_t l = 0; l < left; ++l)
    for (std::size_t r = 0; r < right; ++r) {
      const std::size_t base = l * d * right + r;
      for (std::size_t s = 0; s < d; ++s) {
        cplx acc{};
        for (std::size_t t = 0; t < d; ++t) acc += op(s, t) * psi[base + t * right];
        tmp[s] = acc;
      }
      for (std::size_t s = 0; s < d; ++s) psi[base + s * right] = tmp[s];
    }
}

/// M ← (op on `site`)·M, acting on the row index.
inline void apply_site_operator_left(ComplexMatrix& m, const ComplexMatrix& op, std::size_t site,
                                     const SiteList& sites) {
  const std::size_t d = sites.site_dim(site);
  if (op.dim() != d) throw DimensionError("apply_site_operator_left: operator/site dimension mismatch");
  const std::size_t n = m.dim();
  const std::size_t right = sites.stride(site);
  const std::size_t left = n / (d * right);
  std::vector<cplx> tmp(d * n);
  for (std::size_t l = 0; l < left; ++l)
    for (std::size_t r = 0; r < right; ++r) {
      const std::size_t base = l * d * right + r;
      std::fill(tmp.begin(), tmp.end(), cplx{});
      for (std::size_t s = 0; s < d; ++s)
        for (std::size_t t = 0; t < d; ++t) {
          const cplx o = op(s, t);
          if (o == cplx{}) continue;
          const auto src = m.row(base + t * right);
          for (std::size_t c = 0; c < n; ++c) tmp[s * n + c] += o * src[c];
        }
      for (std::size_t s = 0; s < d; ++s) std::copy_n(tmp.begin() + s * n, n, m.row(base + s * right).begin());
    }
}

/// ρ ↦ U ρ U† for U = ⊗_k unitaries[k].
inline ComplexMatrix conjugate_local(const ComplexMatrix& rho, const std::vector<ComplexMatrix>& unitaries,
                                     const SiteList& sites) {
  ComplexMatrix x = rho;
  for (std::size_t k = 0; k < unitaries.size(); ++k) apply_site_operator_left(x, unitaries[k], k, sites);
  x = x.adjoint();
  for (std::size_t k = 0; k < unitaries.size(); ++k) apply_site_operator_left(x, unitaries[k], k, sites);
  return x.adjoint();
}

}  // namespace spinwitness
