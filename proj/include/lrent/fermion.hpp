#pragma once

// Ground states of open hopping chains H = 1/2 sum_j J_j (c_j^dag c_{j+1} + h.c.) and the
// entropies of their subsystems. Sites are 0-based matrix indices in this module.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lrent::fermion {

inline constexpr double kLn2 = std::numbers::ln2;
/// Occupations closer than this to 0 or 1 contribute no entropy.
inline constexpr double kOccupationCutoff = 1e-12;

/// A numerical routine failed (eigensolver did not converge, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Fermi level is degenerate to working precision, so the ground state is ambiguous.
class DegenerateFermiLevel : public NumericalError {
 public:
  DegenerateFermiLevel(std::size_t num_filled, double gap);
  double gap() const { return gap_; }

 private:
  double gap_;
};

/// Hopping amplitudes J_{j,j+1} of an open chain with an even number of sites.
class CouplingChain {
 public:
  /// All couplings must be positive, finite and normal doubles.
  explicit CouplingChain(std::vector<double> couplings);

  /// Chain made of independent even-length blocks separated by zero bonds.
  static CouplingChain block_decomposable(std::vector<double> couplings);

  std::size_t num_sites() const { return couplings_.size() + 1; }
  std::span<const double> couplings() const { return couplings_; }
  bool is_block_decomposable() const { return block_decomposable_; }

  /// Half-open site ranges [begin, end) of the blocks between zero bonds.
  std::vector<std::pair<std::size_t, std::size_t>> blocks() const;

 private:
  CouplingChain(std::vector<double> couplings, bool block_decomposable);

  std::vector<double> couplings_;
  bool block_decomposable_ = false;
};

/// Real symmetric tridiagonal matrix.
struct TridiagonalMatrix {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;  // size() - 1 entries

  std::size_t size() const { return diagonal.size(); }
  Eigen::MatrixXd dense() const;
};

/// h with H = sum_jk h_jk c_j^dag c_k: zero diagonal, h_{j,j+1} = J_j / 2.
TridiagonalMatrix single_particle_hamiltonian(const CouplingChain& chain);

struct SpectralDecomposition {
  enum class Accuracy {
    /// Every energy carries a small relative error (bidiagonal SVD of bipartite blocks).
    Relative,
    /// Energies are accurate to a multiple of machine precision times the spectral radius.
    Absolute,
  };

  Eigen::VectorXd energies;  ///< ascending
  Eigen::MatrixXd modes;     ///< column a is the mode of energies[a]
  Accuracy accuracy = Accuracy::Absolute;

  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
};

/// Full spectrum of a symmetric tridiagonal matrix.
///
/// The matrix is split at exact zeros of the off-diagonal. Blocks with zero diagonal and even
/// size are bipartite: with sublattices A (even local index) and B (odd) the block is
/// [[0, T], [T^T, 0]] with T square lower bidiagonal, and its eigenpairs are
/// (+-s, (u, +-v) / sqrt 2) for each singular triplet (s, u, v) of T. LAPACK's dbdsqr computes
/// those triplets to high relative accuracy, which keeps the modes next to exponentially small
/// gaps of strongly disordered chains exact; a dense solver mixes them. Other blocks go
/// through Eigen's tridiagonal QR solver.
///
/// Throws NumericalError if LAPACK reports non-convergence.
SpectralDecomposition diagonalize(const TridiagonalMatrix& h);

/// Ground-state two-point function C_jk = <c_j^dag c_k> with the lowest modes filled.
class CorrelationMatrix {
 public:
  CorrelationMatrix(Eigen::MatrixXd entries, std::size_t num_filled);

  const Eigen::MatrixXd& entries() const { return entries_; }
  std::size_t num_filled() const { return num_filled_; }
  std::size_t num_sites() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t j, std::size_t k) const {
    return entries_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  }

 private:
  Eigen::MatrixXd entries_;
  std::size_t num_filled_;
};

/// C = sum over the lowest num_filled modes of m m^T.
///
/// Throws DegenerateFermiLevel when the gap E[num_filled] - E[num_filled - 1] is not resolved:
/// below 1e-12 times the spectral radius for Absolute accuracy, or below 1e-12 times the
/// magnitude of the two energies for Relative accuracy.
CorrelationMatrix ground_state_correlations(const SpectralDecomposition& spectrum,
                                            std::size_t num_filled);

/// Half-filled ground state of a chain.
CorrelationMatrix half_filled_ground_state(const CouplingChain& chain);

/// -nu ln nu - (1 - nu) ln(1 - nu), zero within kOccupationCutoff of 0 and 1.
double binary_entropy(double nu);

/// Von Neumann entropy (nats) of the sites from the eigenvalues of the principal submatrix.
double subsystem_entropy(const CorrelationMatrix& c, std::span<const std::size_t> sites);

/// I_c(A > B) = S(B) - S(A u B).
double coherent_info(const CorrelationMatrix& c, std::span<const std::size_t> a,
                     std::span<const std::size_t> b);

/// max(I_c(A > B), I_c(B > A), 0).
double coherent_info_sym(const CorrelationMatrix& c, std::span<const std::size_t> a,
                         std::span<const std::size_t> b);

/// coherent_info_sym for single sites j != k, using the 2x2 closed form for the pair entropy.
double pair_coherent_info(const CorrelationMatrix& c, std::size_t j, std::size_t k);

/// Same, from precomputed single-site entropies h(C_jj), h(C_kk).
inline double pair_coherent_info(double c_jj, double c_kk, double c_jk, double s_j, double s_k) {
  const double mean = 0.5 * (c_jj + c_kk);
  const double half_diff = 0.5 * (c_jj - c_kk);
  const double radius = std::sqrt(half_diff * half_diff + c_jk * c_jk);
  const double s_jk = binary_entropy(mean + radius) + binary_entropy(mean - radius);
  const double best = std::max(s_j, s_k) - s_jk;
  return best > 0.0 ? best : 0.0;
}

}  // namespace lrent::fermion
