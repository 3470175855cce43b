// state.hpp: pure/mixed states over a SiteList and the canonical state
// factory (GHZ, W, the explicit 4-qubit eigenstates, the Dür family,
// white-noise mixtures, block-product states), partial transpose and a
// plain-text import/export format.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "linalg.hpp"
#include "spin.hpp"

namespace spinwitness {

class QuantumState {
 public:
  enum class Kind { pure, mixed };

  /// Validated pure state; ‖ψ‖ must be 1 to 1e-12.
  static QuantumState pure(SiteList sites, StateVector psi) {
    if (psi.size() != sites.total_dim()) throw DimensionError("QuantumState: amplitude count != total_dim");
    if (std::abs(norm2(psi) - 1.0) > 1e-12) throw std::invalid_argument("QuantumState: pure state not normalized");
    return QuantumState(std::move(sites), std::move(psi));
  }

  /// Pure state from unnormalized amplitudes.
  static QuantumState from_amplitudes(SiteList sites, StateVector psi) {
    const double n = norm2(psi);
    if (n == 0.0) throw std::invalid_argument("QuantumState: zero vector");
    for (auto& a : psi) a /= n;
    return pure(std::move(sites), std::move(psi));
  }

  /// Validated density matrix: Hermitian, unit trace, PSD to -1e-10.
  static QuantumState mixed(SiteList sites, ComplexMatrix rho) {
    if (rho.dim() != sites.total_dim()) throw DimensionError("QuantumState: density dimension != total_dim");
    if (!rho.is_hermitian(1e-12)) throw std::invalid_argument("QuantumState: density matrix not Hermitian");
    if (std::abs(rho.trace() - cplx{1.0}) > 1e-12) throw std::invalid_argument("QuantumState: trace != 1");
    rho = rho.hermitian_part();
    const auto ev = eigvals_hermitian(rho);
    if (!ev.empty() && ev.front() < -1e-10)
      throw std::invalid_argument("QuantumState: density matrix has a negative eigenvalue");
    return QuantumState(std::move(sites), std::move(rho));
  }

  Kind kind() const noexcept { return std::holds_alternative<StateVector>(data_) ? Kind::pure : Kind::mixed; }
  bool is_pure() const noexcept { return kind() == Kind::pure; }
  const SiteList& sites() const noexcept { return sites_; }
  std::size_t dim() const noexcept { return sites_.total_dim(); }

  const StateVector& vector() const {
    if (!is_pure()) throw std::logic_error("QuantumState: not a pure state");
    return std::get<StateVector>(data_);
  }
  const ComplexMatrix& density() const {
    if (is_pure()) throw std::logic_error("QuantumState: pure state has no stored density; call to_mixed()");
    return std::get<ComplexMatrix>(data_);
  }

  /// Explicit promotion |ψ⟩ ↦ |ψ⟩⟨ψ|.
  QuantumState to_mixed() const {
    if (!is_pure()) return *this;
    return QuantumState(sites_, ComplexMatrix::outer(vector()));
  }

 private:
  QuantumState(SiteList s, StateVector v) : sites_(std::move(s)), data_(std::move(v)) {}
  QuantumState(SiteList s, ComplexMatrix m) : sites_(std::move(s)), data_(std::move(m)) {}

  SiteList sites_;
  std::variant<StateVector, ComplexMatrix> data_;
};

/// ⟨ψ|op|ψ⟩ or Tr(ρ·op).
inline double expectation(const QuantumState& state, const ComplexMatrix& op) {
  return state.is_pure() ? expectation(std::span<const cplx>(state.vector()), op)
                         : expectation(state.density(), op);
}

/// Disjoint blocks of 0-based site indices covering 0..N-1.
class PartitionSpec {
 public:
  PartitionSpec() = default;
  explicit PartitionSpec(std::vector<std::vector<std::size_t>> blocks) : blocks_(std::move(blocks)) {
    for (auto& b : blocks_) std::sort(b.begin(), b.end());
  }

  /// "12|34" (single-digit 1-based labels) or "1,2|3,4".
  static PartitionSpec parse(const std::string& text) {
    std::vector<std::vector<std::size_t>> blocks;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '|')) {
      std::vector<std::size_t> block;
      const bool commas = part.find(',') != std::string::npos;
      if (commas) {
        std::stringstream ps(part);
        std::string tok;
        while (std::getline(ps, tok, ',')) {
          tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
          if (tok.empty()) continue;
          block.push_back(parse_label(tok));
        }
      } else {
        for (char c : part) {
          if (std::isspace(static_cast<unsigned char>(c))) continue;
          block.push_back(parse_label(std::string(1, c)));
        }
      }
      if (block.empty()) throw std::invalid_argument("PartitionSpec: empty block in \"" + text + "\"");
      blocks.push_back(std::move(block));
    }
    return PartitionSpec(std::move(blocks));
  }

  static PartitionSpec singletons(std::size_t n) {
    std::vector<std::vector<std::size_t>> b;
    for (std::size_t k = 0; k < n; ++k) b.push_back({k});
    return PartitionSpec(std::move(b));
  }

  static PartitionSpec whole(std::size_t n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return PartitionSpec({all});
  }

  const std::vector<std::vector<std::size_t>>& blocks() const noexcept { return blocks_; }

  /// Throws unless the blocks partition {0,…,n-1}.
  void validate(std::size_t n) const {
    std::vector<int> seen(n, 0);
    for (const auto& b : blocks_) {
      if (b.empty()) throw std::invalid_argument("PartitionSpec: empty block");
      for (auto k : b) {
        if (k >= n) throw std::invalid_argument("PartitionSpec: site label out of range");
        if (seen[k]++) throw std::invalid_argument("PartitionSpec: site appears in two blocks");
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw std::invalid_argument("PartitionSpec: blocks do not cover every site");
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (b) out += '|';
      for (std::size_t i = 0; i < blocks_[b].size(); ++i) {
        if (i && blocks_[b].size() > 9) out += ',';
        out += std::to_string(blocks_[b][i] + 1);
      }
    }
    return out;
  }

 private:
  static std::size_t parse_label(const std::string& tok) {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size() || v < 1) throw std::invalid_argument("PartitionSpec: bad site label \"" + tok + "\"");
    return static_cast<std::size_t>(v - 1);
  }

  std::vector<std::vector<std::size_t>> blocks_;
};

/// (|↑…↑⟩ + |↓…↓⟩)/√2 on n qubits.
inline QuantumState ghz(std::size_t n) {
  if (n < 2) throw std::invalid_argument("ghz: need at least two qubits");
  const auto sites = SiteList::uniform(n, kQubit);
  StateVector psi(sites.total_dim());
  psi.front() = psi.back() = 1.0 / std::sqrt(2.0);
  return QuantumState::pure(sites, std::move(psi));
}

/// (|↑↑↓⟩ + e^{iα}|↑↓↑⟩ + e^{iβ}|↓↑↑⟩)/√3
inline QuantumState w3(double alpha, double beta) {
  const auto sites = SiteList::uniform(3, kQubit);
  StateVector psi(8);
  const double a = 1.0 / std::sqrt(3.0);
  psi[0b001] = a;
  psi[0b010] = a * std::exp(kI * alpha);
  psi[0b100] = a * std::exp(kI * beta);
  return QuantumState::pure(sites, std::move(psi));
}

namespace detail {
// Bit k (from the left) of a 4-qubit index is 1 for ↓.
inline std::size_t qubits4(const char* s) {
  std::size_t idx = 0;
  for (int k = 0; k < 4; ++k) idx = (idx << 1) | (s[k] == 'd' ? 1u : 0u);
  return idx;
}
}  // namespace detail

/// One of the two orthogonal J=0 states of four qubits; D^(4) eigenvalue 4√3.
inline QuantumState psi4() {
  using detail::qubits4;
  const double r3 = std::sqrt(3.0);
  StateVector psi(16);
  psi[qubits4("uudd")] = psi[qubits4("dduu")] = 1.0 + r3;
  psi[qubits4("dudu")] = psi[qubits4("udud")] = 1.0 - r3;
  psi[qubits4("duud")] = psi[qubits4("uddu")] = -2.0;
  for (auto& a : psi) a /= 2.0 * std::sqrt(6.0);
  return QuantumState::pure(SiteList::uniform(4, kQubit), std::move(psi));
}

/// A top eigenvector of C_z^(4), eigenvalue 2√6.
inline QuantumState phi4() {
  using detail::qubits4;
  const double r6 = std::sqrt(6.0);
  StateVector psi(16);
  psi[qubits4("uduu")] = 3.0;
  psi[qubits4("dudd")] = -3.0;
  psi[qubits4("uddu")] = r6;
  psi[qubits4("duud")] = r6;
  psi[qubits4("udud")] = -r6;
  psi[qubits4("dudu")] = -r6;
  psi[qubits4("dddu")] = 1.0;
  psi[qubits4("uuud")] = -1.0;
  psi[qubits4("ddud")] = 1.0;
  psi[qubits4("uudu")] = -1.0;
  psi[qubits4("uddd")] = 1.0;
  psi[qubits4("duuu")] = -1.0;
  for (auto& a : psi) a /= 4.0 * std::sqrt(3.0);
  return QuantumState::pure(SiteList::uniform(4, kQubit), std::move(psi));
}

/// ρ_N = (|GHZ⟩⟨GHZ| + ½ Σ_n (Π_n + Π_ñ)) / (N+1), where Π_n projects on
/// the basis state with only qubit n down and Π_ñ on its global flip.
inline QuantumState dur_state(std::size_t n) {
  if (n < 3) throw std::invalid_argument("dur_state: need at least three qubits");
  const auto g = ghz(n);
  ComplexMatrix rho = ComplexMatrix::outer(g.vector());
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t flipped = std::size_t{1} << (n - 1 - k);
    rho(flipped, flipped) += 0.5;
    rho(dim - 1 - flipped, dim - 1 - flipped) += 0.5;
  }
  rho *= 1.0 / static_cast<double>(n + 1);
  return QuantumState::mixed(SiteList::uniform(n, kQubit), std::move(rho));
}

/// (1-ν)ρ + ν·I/d
inline QuantumState mix_white_noise(const QuantumState& state, double nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("mix_white_noise: nu must lie in [0, 1]");
  ComplexMatrix rho = state.is_pure() ? ComplexMatrix::outer(state.vector()) : state.density();
  rho *= 1.0 - nu;
  const double w = nu / static_cast<double>(rho.dim());
  for (std::size_t i = 0; i < rho.dim(); ++i) rho(i, i) += w;
  return QuantumState::mixed(state.sites(), std::move(rho));
}

/// Total dimension of the sites in `block`.
inline std::size_t block_dim(const std::vector<std::size_t>& block, const SiteList& sites) {
  std::size_t d = 1;
  for (auto k : block) d *= sites.site_dim(k);
  return d;
}

/// Number of real parameters product_state expects.
inline std::size_t product_state_param_count(const SiteList& sites, const PartitionSpec& partition) {
  std::size_t n = 0;
  for (const auto& b : partition.blocks()) n += 2 * block_dim(b, sites);
  return n;
}

namespace detail {

/// Normalize and fix the global phase: first non-zero amplitude real ≥ 0.
inline StateVector gauge_fix(StateVector v) {
  const double n = norm2(v);
  if (n == 0.0) throw std::invalid_argument("product_state: zero block vector");
  for (auto& a : v) a /= n;
  for (const auto& a : v)
    if (std::abs(a) > 0.0) {
      const cplx ph = std::conj(a) / std::abs(a);
      for (auto& b : v) b *= ph;
      break;
    }
  return v;
}

/// Assemble the full amplitude vector from one vector per block. Block
/// amplitudes use the block's sites in ascending order, first most
/// significant.
inline StateVector assemble_blocks(const std::vector<StateVector>& block_vectors, const PartitionSpec& partition,
                                   const SiteList& sites) {
  const std::size_t n = sites.size();
  const std::size_t dim = sites.total_dim();
  StateVector psi(dim);
  std::vector<std::size_t> digit(n);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::size_t rest = idx;
    for (std::size_t k = n; k-- > 0;) {
      digit[k] = rest % sites.site_dim(k);
      rest /= sites.site_dim(k);
    }
    cplx amp = 1.0;
    for (std::size_t b = 0; b < partition.blocks().size(); ++b) {
      std::size_t local = 0;
      for (auto k : partition.blocks()[b]) local = local * sites.site_dim(k) + digit[k];
      amp *= block_vectors[b][local];
      if (amp == cplx{}) break;
    }
    psi[idx] = amp;
  }
  return psi;
}

}  // namespace detail

/// Tensor product of one pure state per partition block. `params` holds,
/// block after block, the real parts then the imaginary parts of each
/// block vector; each block is normalized and phase-fixed.
inline QuantumState product_state(const SiteList& sites, const PartitionSpec& partition,
                                  std::span<const double> params) {
  partition.validate(sites.size());
  if (params.size() != product_state_param_count(sites, partition))
    throw std::invalid_argument("product_state: parameter count mismatch");
  std::vector<StateVector> blocks;
  std::size_t off = 0;
  for (const auto& b : partition.blocks()) {
    const std::size_t d = block_dim(b, sites);
    StateVector v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = cplx{params[off + i], params[off + d + i]};
    off += 2 * d;
    blocks.push_back(detail::gauge_fix(std::move(v)));
  }
  return QuantumState::from_amplitudes(sites, detail::assemble_blocks(blocks, partition, sites));
}

/// Partial transpose on the sites in `block`.
inline ComplexMatrix partial_transpose(const QuantumState& state, const std::set<std::size_t>& block) {
  if (state.is_pure()) throw std::invalid_argument("partial_transpose: pure state; promote with to_mixed() first");
  const auto& sites = state.sites();
  const std::size_t n = sites.size();
  if (block.empty() || block.size() >= n) throw std::invalid_argument("partial_transpose: block must be a proper non-empty subset");
  for (auto k : block)
    if (k >= n) throw std::invalid_argument("partial_transpose: site label out of range");

  const auto& rho = state.density();
  const std::size_t dim = rho.dim();
  std::vector<std::vector<std::size_t>> digits(dim, std::vector<std::size_t>(n));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::size_t rest = idx;
    for (std::size_t k = n; k-- > 0;) {
      digits[idx][k] = rest % sites.site_dim(k);
      rest /= sites.site_dim(k);
    }
  }
  auto compose = [&](const std::vector<std::size_t>& d) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) idx = idx * sites.site_dim(k) + d[k];
    return idx;
  };
  ComplexMatrix out(dim);
  std::vector<std::size_t> di(n), dj(n);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      di = digits[i];
      dj = digits[j];
      for (auto k : block) std::swap(di[k], dj[k]);
      out(compose(di), compose(dj)) = rho(i, j);
    }
  return out;
}

/// Independent complex-normal amplitudes, normalized.
inline QuantumState random_pure(const SiteList& sites, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  StateVector psi(sites.total_dim());
  for (auto& a : psi) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    a = {re, im};
  }
  return QuantumState::from_amplitudes(sites, std::move(psi));
}

// Text format:
//   line 1: N twoJ_1 … twoJ_N pure|mixed
//   then one "re im" pair per line: amplitudes, or density entries row-major.
inline void write_state(std::ostream& os, const QuantumState& state) {
  const auto& s = state.sites();
  os << s.size();
  for (const auto& q : s.sites()) os << ' ' << q.two_j;
  os << (state.is_pure() ? " pure" : " mixed") << '\n';
  const auto old_prec = os.precision(17);
  auto put = [&](const cplx& c) { os << c.real() << ' ' << c.imag() << '\n'; };
  if (state.is_pure())
    for (const auto& a : state.vector()) put(a);
  else
    for (const auto& a : state.density().data()) put(a);
  os.precision(old_prec);
}

inline QuantumState read_state(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::invalid_argument("read_state: missing header");
  std::istringstream hs(header);
  std::size_t n = 0;
  if (!(hs >> n)) throw std::invalid_argument("read_state: bad site count");
  std::vector<SpinQuantum> q;
  for (std::size_t k = 0; k < n; ++k) {
    int tj = -1;
    if (!(hs >> tj) || tj < 0) throw std::invalid_argument("read_state: bad twoJ entry");
    q.emplace_back(tj);
  }
  std::string kind;
  if (!(hs >> kind) || (kind != "pure" && kind != "mixed"))
    throw std::invalid_argument("read_state: kind must be 'pure' or 'mixed'");
  SiteList sites(std::move(q));
  const std::size_t d = sites.total_dim();
  const std::size_t count = kind == "pure" ? d : d * d;
  std::vector<cplx> vals(count);
  for (auto& v : vals) {
    double re = 0, im = 0;
    if (!(is >> re >> im)) throw std::invalid_argument("read_state: truncated amplitude list");
    v = {re, im};
  }
  if (kind == "pure") return QuantumState::pure(std::move(sites), std::move(vals));
  return QuantumState::mixed(std::move(sites), ComplexMatrix(d, std::move(vals)));
}

}  // namespace spinwitness
