#include "lrent/fermion.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lrent::fermion {

namespace {

void require_valid_coupling(double j, std::size_t bond) {
  if (!(std::isnormal(j) && j > 0.0)) {
    std::ostringstream msg;
    msg << "coupling " << bond << " = " << j << " is not a positive normal number";
    throw std::invalid_argument(msg.str());
  }
}

void require_even_sites(std::size_t sites, const char* what) {
  if (sites < 2 || sites % 2 != 0)
    throw std::invalid_argument(std::string(what) + ": need an even number of sites >= 2, got " +
                                std::to_string(sites));
}

struct BlockMode {
  double energy;
  std::size_t offset;  // first site of the block
  Eigen::VectorXd vector;
};

void bipartite_block(const TridiagonalMatrix& h, std::size_t begin, std::size_t end,
                     std::vector<BlockMode>& out) {
  const std::size_t size = end - begin;
  const auto n = static_cast<lapack_int>(size / 2);
  // T[i][i] = h(2i, 2i+1), T[i+1][i] = h(2i+2, 2i+1) in block-local indices.
  std::vector<double> d(size / 2), e(std::max<std::size_t>(size / 2, 1), 0.0);
  for (std::size_t i = 0; i < size / 2; ++i) {
    d[i] = h.off_diagonal[begin + 2 * i];
    if (i + 1 < size / 2) e[i] = h.off_diagonal[begin + 2 * i + 1];
  }
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd vt = Eigen::MatrixXd::Identity(n, n);
  double unused_c = 0.0;
  const lapack_int info = LAPACKE_dbdsqr(LAPACK_COL_MAJOR, 'L', n, n, n, 0, d.data(), e.data(),
                                         vt.data(), n, u.data(), n, &unused_c, 1);
  if (info != 0) {
    std::ostringstream msg;
    msg << "dbdsqr failed with info " << info << " on a bipartite block of " << size
        << " sites starting at site " << begin;
    throw NumericalError(msg.str());
  }
  for (lapack_int a = 0; a < n; ++a) {
    Eigen::VectorXd plus(size), minus(size);
    for (lapack_int i = 0; i < n; ++i) {
      const double ua = u(i, a) * std::numbers::sqrt2 / 2.0;
      const double va = vt(a, i) * std::numbers::sqrt2 / 2.0;
      plus(2 * i) = ua;
      plus(2 * i + 1) = va;
      minus(2 * i) = ua;
      minus(2 * i + 1) = -va;
    }
    out.push_back({d[a], begin, std::move(plus)});
    out.push_back({-d[a], begin, std::move(minus)});
  }
}

void dense_block(const TridiagonalMatrix& h, std::size_t begin, std::size_t end,
                 std::vector<BlockMode>& out) {
  const auto size = static_cast<Eigen::Index>(end - begin);
  Eigen::VectorXd diag(size), sub(std::max<Eigen::Index>(size - 1, 0));
  for (Eigen::Index i = 0; i < size; ++i) diag(i) = h.diagonal[begin + i];
  for (Eigen::Index i = 0; i + 1 < size; ++i) sub(i) = h.off_diagonal[begin + i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "tridiagonal QR did not converge on a block of " << size << " sites starting at site "
        << begin << " (spectral radius bound " << diag.cwiseAbs().maxCoeff() + 2 * sub.cwiseAbs().maxCoeff() << ")";
    throw NumericalError(msg.str());
  }
  for (Eigen::Index a = 0; a < size; ++a)
    out.push_back({solver.eigenvalues()(a), begin, solver.eigenvectors().col(a)});
}

}  // namespace

DegenerateFermiLevel::DegenerateFermiLevel(std::size_t num_filled, double gap)
    : NumericalError("degenerate Fermi level at filling " + std::to_string(num_filled) +
                     " (gap " + std::to_string(gap) + ")"),
      gap_(gap) {}

CouplingChain::CouplingChain(std::vector<double> couplings)
    : CouplingChain(std::move(couplings), false) {}

CouplingChain::CouplingChain(std::vector<double> couplings, bool block_decomposable)
    : couplings_(std::move(couplings)), block_decomposable_(block_decomposable) {
  require_even_sites(num_sites(), "CouplingChain");
  for (std::size_t b = 0; b < couplings_.size(); ++b) {
    if (block_decomposable_ && couplings_[b] == 0.0) continue;
    require_valid_coupling(couplings_[b], b);
  }
  if (block_decomposable_)
    for (const auto& [begin, end] : blocks()) require_even_sites(end - begin, "CouplingChain block");
}

CouplingChain CouplingChain::block_decomposable(std::vector<double> couplings) {
  return CouplingChain(std::move(couplings), true);
}

std::vector<std::pair<std::size_t, std::size_t>> CouplingChain::blocks() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t begin = 0;
  for (std::size_t b = 0; b < couplings_.size(); ++b) {
    if (couplings_[b] == 0.0) {
      out.emplace_back(begin, b + 1);
      begin = b + 1;
    }
  }
  out.emplace_back(begin, num_sites());
  return out;
}

Eigen::MatrixXd TridiagonalMatrix::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diagonal[i];
  for (Eigen::Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = off_diagonal[i];
  return m;
}

TridiagonalMatrix single_particle_hamiltonian(const CouplingChain& chain) {
  TridiagonalMatrix h;
  h.diagonal.assign(chain.num_sites(), 0.0);
  h.off_diagonal.reserve(chain.num_sites() - 1);
  for (double j : chain.couplings()) h.off_diagonal.push_back(0.5 * j);
  return h;
}

SpectralDecomposition diagonalize(const TridiagonalMatrix& h) {
  const std::size_t size = h.size();
  if (size == 0) throw std::invalid_argument("diagonalize: empty matrix");
  if (h.off_diagonal.size() + 1 != size)
    throw std::invalid_argument("diagonalize: off-diagonal must have size() - 1 entries");

  std::vector<BlockMode> modes;
  modes.reserve(size);
  bool all_relative = true;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < size; ++i) {
    if (i + 1 < size && h.off_diagonal[i] != 0.0) continue;
    const std::size_t end = i + 1;
    const bool bipartite =
        (end - begin) % 2 == 0 &&
        std::all_of(h.diagonal.begin() + begin, h.diagonal.begin() + end, [](double x) { return x == 0.0; });
    if (bipartite) {
      bipartite_block(h, begin, end, modes);
    } else {
      all_relative = false;
      dense_block(h, begin, end, modes);
    }
    begin = end;
  }

  std::vector<std::size_t> order(modes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return modes[a].energy < modes[b].energy; });

  SpectralDecomposition out;
  const auto n = static_cast<Eigen::Index>(size);
  out.energies.resize(n);
  out.modes = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const BlockMode& m = modes[order[a]];
    out.energies(a) = m.energy;
    out.modes.col(a).segment(static_cast<Eigen::Index>(m.offset), m.vector.size()) = m.vector;
  }
  out.accuracy = all_relative ? SpectralDecomposition::Accuracy::Relative
                              : SpectralDecomposition::Accuracy::Absolute;
  return out;
}

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd entries, std::size_t num_filled)
    : entries_(std::move(entries)), num_filled_(num_filled) {
  if (entries_.rows() != entries_.cols())
    throw std::invalid_argument("CorrelationMatrix: matrix must be square");
}

CorrelationMatrix ground_state_correlations(const SpectralDecomposition& spectrum,
                                            std::size_t num_filled) {
  const std::size_t size = spectrum.size();
  if (num_filled > size)
    throw std::invalid_argument("ground_state_correlations: more particles than modes");
  if (num_filled > 0 && num_filled < size) {
    const double below = spectrum.energies(static_cast<Eigen::Index>(num_filled) - 1);
    const double above = spectrum.energies(static_cast<Eigen::Index>(num_filled));
    const double gap = above - below;
    const double scale = spectrum.accuracy == SpectralDecomposition::Accuracy::Relative
                             ? std::abs(below) + std::abs(above)
                             : spectrum.energies.cwiseAbs().maxCoeff();
    if (!(gap > 1e-12 * scale)) throw DegenerateFermiLevel(num_filled, gap);
  }
  const auto n = static_cast<Eigen::Index>(size);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  if (num_filled > 0) {
    c.selfadjointView<Eigen::Lower>().rankUpdate(
        spectrum.modes.leftCols(static_cast<Eigen::Index>(num_filled)));
    c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  }
  return CorrelationMatrix(std::move(c), num_filled);
}

CorrelationMatrix half_filled_ground_state(const CouplingChain& chain) {
  return ground_state_correlations(diagonalize(single_particle_hamiltonian(chain)),
                                   chain.num_sites() / 2);
}

double binary_entropy(double nu) {
  if (nu <= kOccupationCutoff || nu >= 1.0 - kOccupationCutoff) return 0.0;
  return -nu * std::log(nu) - (1.0 - nu) * std::log1p(-nu);
}

double subsystem_entropy(const CorrelationMatrix& c, std::span<const std::size_t> sites) {
  if (sites.empty()) throw std::invalid_argument("subsystem_entropy: empty site set");
  const std::size_t size = c.num_sites();
  std::vector<bool> seen(size, false);
  for (std::size_t s : sites) {
    if (s >= size)
      throw std::out_of_range("subsystem_entropy: site " + std::to_string(s) + " outside chain of " +
                              std::to_string(size) + " sites");
    if (seen[s]) throw std::invalid_argument("subsystem_entropy: repeated site");
    seen[s] = true;
  }
  if (sites.size() == 1) return binary_entropy(c(sites[0], sites[0]));

  const auto m = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = c(sites[a], sites[b]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("subsystem_entropy: eigensolver did not converge");
  double s = 0.0;
  for (Eigen::Index a = 0; a < m; ++a) s += binary_entropy(solver.eigenvalues()(a));
  return s;
}

namespace {

std::vector<std::size_t> disjoint_union(std::span<const std::size_t> a,
                                        std::span<const std::size_t> b, const char* what) {
  if (a.empty() || b.empty()) throw std::invalid_argument(std::string(what) + ": empty site set");
  for (std::size_t x : a)
    if (std::find(b.begin(), b.end(), x) != b.end())
      throw std::invalid_argument(std::string(what) + ": site sets overlap");
  // Sorted, so that S(A u B) is bit-identical for (A, B) and (B, A).
  std::vector<std::size_t> u(a.begin(), a.end());
  u.insert(u.end(), b.begin(), b.end());
  std::sort(u.begin(), u.end());
  return u;
}

}  // namespace

double coherent_info(const CorrelationMatrix& c, std::span<const std::size_t> a,
                     std::span<const std::size_t> b) {
  const auto ab = disjoint_union(a, b, "coherent_info");
  return subsystem_entropy(c, b) - subsystem_entropy(c, ab);
}

double coherent_info_sym(const CorrelationMatrix& c, std::span<const std::size_t> a,
                         std::span<const std::size_t> b) {
  const auto ab = disjoint_union(a, b, "coherent_info_sym");
  const double s_ab = subsystem_entropy(c, ab);
  const double best = std::max(subsystem_entropy(c, a), subsystem_entropy(c, b)) - s_ab;
  return std::max(best, 0.0);
}

double pair_coherent_info(const CorrelationMatrix& c, std::size_t j, std::size_t k) {
  if (j == k) throw std::invalid_argument("pair_coherent_info: sites must differ");
  if (j >= c.num_sites() || k >= c.num_sites())
    throw std::out_of_range("pair_coherent_info: site outside chain");
  const double c_jj = c(j, j), c_kk = c(k, k);
  return pair_coherent_info(c_jj, c_kk, c(j, k), binary_entropy(c_jj), binary_entropy(c_kk));
}

}  // namespace lrent::fermion
