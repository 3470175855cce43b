// linalg.hpp: dense complex matrices, Kronecker products, Hermitian
// eigendecomposition (cyclic Jacobi) and unitary exponentials.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spinwitness {

using cplx = std::complex<double>;
using StateVector = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};

class NotHermitianError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  ComplexMatrix(std::size_t dim, std::vector<cplx> entries) : dim_(dim), data_(std::move(entries)) {
    if (data_.size() != dim_ * dim_)
      throw DimensionError("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                           " != dim^2 = " + std::to_string(dim_ * dim_));
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static ComplexMatrix diagonal(std::span<const cplx> d) {
    ComplexMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  /// |v><v|
  static ComplexMatrix outer(std::span<const cplx> v) {
    ComplexMatrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return dim_ == 0; }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }

  std::span<cplx> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
  std::span<const cplx> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }

  std::vector<cplx>& data() noexcept { return data_; }
  const std::vector<cplx>& data() const noexcept { return data_; }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    check_same(o, "+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    check_same(o, "-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) noexcept {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    a.check_same(b, "*");
    const std::size_t n = a.dim_;
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
      cplx* ci = c.data_.data() + i * n;
      for (std::size_t k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        const cplx* bk = b.data_.data() + k * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
      }
    }
    return c;
  }

  friend StateVector operator*(const ComplexMatrix& a, std::span<const cplx> v) {
    if (v.size() != a.dim_) throw DimensionError("matrix-vector: dimension mismatch");
    StateVector out(a.dim_);
    for (std::size_t i = 0; i < a.dim_; ++i) {
      cplx acc{};
      const cplx* ai = a.data_.data() + i * a.dim_;
      for (std::size_t j = 0; j < a.dim_; ++j) acc += ai[j] * v[j];
      out[i] = acc;
    }
    return out;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  cplx trace() const noexcept {
    cplx t{};
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const noexcept {
    double s = 0.0;
    for (const auto& x : data_) s += std::norm(x);
    return std::sqrt(s);
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  /// max |A_ij - conj(A_ji)|
  double hermitian_defect() const noexcept {
    double d = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j)
        d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
  }

  bool is_hermitian(double rel_tol = 1e-12) const noexcept {
    return hermitian_defect() <= rel_tol * std::max(max_abs(), 1e-300);
  }

  /// (A + A†)/2
  ComplexMatrix hermitian_part() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return m;
  }

 private:
  void check_same(const ComplexMatrix& o, const char* op) const {
    if (o.dim_ != dim_)
      throw DimensionError(std::string("ComplexMatrix ") + op + ": dimension mismatch " +
                           std::to_string(dim_) + " vs " + std::to_string(o.dim_));
  }

  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

/// (a⊗b)[(i·db+k)][(j·db+l)] = a[i][j]·b[k][l]
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t da = a.dim(), db = b.dim();
  ComplexMatrix out(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < db; ++k) {
        cplx* dst = &out(i * db + k, j * db);
        const cplx* src = &b(k, 0);
        for (std::size_t l = 0; l < db; ++l) dst[l] = aij * src[l];
      }
    }
  return out;
}

inline StateVector kron(std::span<const cplx> a, std::span<const cplx> b) {
  StateVector out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) out[i * b.size() + k] = a[i] * b[k];
  return out;
}

inline double norm2(std::span<const cplx> v) noexcept {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw DimensionError("inner: dimension mismatch");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// Eigenvalues ascending; column k of `eigenvectors` pairs with eigenvalues[k].
struct Spectrum {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;
};

namespace detail {

/// Groups of indices that are coupled through entries above `drop`. H is
/// exactly block diagonal in this grouping up to the dropped entries.
inline std::vector<std::vector<std::size_t>> coupled_index_groups(const ComplexMatrix& h, double drop) {
  const std::size_t n = h.dim();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(h(i, j)) > drop) {
        const auto ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = find(i);
    if (slot[r] == n) {
      slot[r] = groups.size();
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

/// Cyclic complex Jacobi on a Hermitian block, in place. On return the
/// diagonal of `a` holds the eigenvalues; `v` (if given) accumulates the
/// rotations so that H = V·diag·V†.
inline void jacobi_hermitian(ComplexMatrix& a, ComplexMatrix* v, double scale_fro) {
  const std::size_t n = a.dim();
  if (n < 2) return;
  const double target = 1e-12 * scale_fro;
  constexpr int kMaxSweeps = 100;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  double prev_off = off_norm();
  for (int sweep = 0; sweep < kMaxSweeps && prev_off > target; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        // Negligible against the convergence target.
        if (mag * static_cast<double>(n) <= 1e-3 * target || mag < 1e-300) continue;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        rotated = true;
        const cplx phase = apq / mag;  // e^{iφ}
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cplx sp = s * std::conj(phase);  // s·e^{-iφ}
        const cplx cp = c * std::conj(phase);  // c·e^{-iφ}

        // A ← A·J with J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sp * akq;
          a(k, q) = s * akp + cp * akq;
        }
        // A ← J†·A
        {
          cplx* rp = &a(p, 0);
          cplx* rq = &a(q, 0);
          const cplx spc = std::conj(sp), cpc = std::conj(cp);
          for (std::size_t k = 0; k < n; ++k) {
            const cplx x = rp[k], y = rq[k];
            rp[k] = c * x - spc * y;
            rq[k] = s * x + cpc * y;
          }
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        if (v) {
          for (std::size_t k = 0; k < n; ++k) {
            const cplx vkp = (*v)(k, p), vkq = (*v)(k, q);
            (*v)(k, p) = c * vkp - sp * vkq;
            (*v)(k, q) = s * vkp + cp * vkq;
          }
        }
      }
    }
    const double off = off_norm();
    if (!rotated || off >= prev_off) break;
    prev_off = off;
  }
}

inline Spectrum eig_impl(const ComplexMatrix& h, bool want_vectors) {
  if (!h.is_hermitian(1e-12)) throw NotHermitianError("eig_hermitian: matrix is not Hermitian");
  const std::size_t n = h.dim();
  const double fro = h.frobenius_norm();
  const double drop = 1e-15 * h.max_abs();
  const auto groups = coupled_index_groups(h, drop);

  std::vector<double> values(n);
  ComplexMatrix vectors(want_vectors ? n : 0);
  std::size_t col = 0;
  std::vector<std::size_t> column_of(n);
  for (const auto& g : groups) {
    const std::size_t m = g.size();
    ComplexMatrix block(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) block(i, j) = h(g[i], g[j]);
    block = block.hermitian_part();
    ComplexMatrix bv = want_vectors ? ComplexMatrix::identity(m) : ComplexMatrix();
    jacobi_hermitian(block, want_vectors ? &bv : nullptr, fro);
    for (std::size_t k = 0; k < m; ++k) {
      values[col + k] = block(k, k).real();
      if (want_vectors)
        for (std::size_t i = 0; i < m; ++i) vectors(g[i], col + k) = bv(i, k);
    }
    col += m;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return values[x] < values[y]; });

  Spectrum out;
  out.eigenvalues.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.eigenvalues[k] = values[order[k]];
  if (want_vectors) {
    out.eigenvectors = ComplexMatrix(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = vectors(i, order[k]);
  }
  return out;
}

}  // namespace detail

/// Full Hermitian eigendecomposition. Throws NotHermitianError on
/// asymmetric input.
inline Spectrum eig_hermitian(const ComplexMatrix& h) { return detail::eig_impl(h, true); }

/// Eigenvalues only, ascending.
inline std::vector<double> eigvals_hermitian(const ComplexMatrix& h) {
  return detail::eig_impl(h, false).eigenvalues;
}

/// exp(i·h) for Hermitian h.
inline ComplexMatrix unitary_exp(const ComplexMatrix& h) {
  const auto spec = eig_hermitian(h);
  const std::size_t n = h.dim();
  const auto& v = spec.eigenvectors;
  ComplexMatrix u(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx e = std::exp(kI * spec.eigenvalues[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vik = v(i, k) * e;
      if (vik == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) u(i, j) += vik * std::conj(v(j, k));
    }
  }
  return u;
}

/// ⟨ψ|op|ψ⟩
inline double expectation(std::span<const cplx> psi, const ComplexMatrix& op) {
  if (psi.size() != op.dim()) throw DimensionError("expectation: state/operator dimension mismatch");
  const cplx val = inner(psi, op * psi);
  if (std::abs(val.imag()) > 1e-10 * std::max(1.0, std::abs(val.real())))
    throw NotHermitianError("expectation: imaginary residue exceeds 1e-10");
  return val.real();
}

/// Tr(ρ·op)
inline double expectation(const ComplexMatrix& rho, const ComplexMatrix& op) {
  if (rho.dim() != op.dim()) throw DimensionError("expectation: state/operator dimension mismatch");
  const std::size_t n = rho.dim();
  cplx t{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t += rho(i, j) * op(j, i);
  if (std::abs(t.imag()) > 1e-10 * std::max(1.0, std::abs(t.real())))
    throw NotHermitianError("expectation: imaginary residue exceeds 1e-10");
  return t.real();
}

}  // namespace spinwitness
