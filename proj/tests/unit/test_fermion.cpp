#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lrent/fermion.hpp"
#include "lrent/random.hpp"
#include "oracles/fock_oracle.hpp"

using namespace lrent;
using namespace lrent::fermion;

namespace {

std::vector<double> random_couplings(RandomStream& rng, std::size_t sites, double delta) {
  std::vector<double> j(sites - 1);
  for (auto& x : j) x = std::pow(rng.uniform_open_closed(), delta);
  return j;
}

std::vector<std::size_t> random_subset(RandomStream& rng, std::size_t sites) {
  std::vector<std::size_t> out;
  while (out.empty())
    for (std::size_t s = 0; s < sites; ++s)
      if (rng.below(2)) out.push_back(s);
  return out;
}

std::vector<std::size_t> complement_of(const std::vector<std::size_t>& a, std::size_t sites) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < sites; ++s)
    if (std::find(a.begin(), a.end(), s) == a.end()) out.push_back(s);
  return out;
}

std::vector<std::size_t> range(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> out;
  for (std::size_t s = begin; s < end; ++s) out.push_back(s);
  return out;
}

double dense_entropy_of_matrix(const Eigen::MatrixXd& sub) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < sub.rows(); ++i) {
    const double nu = es.eigenvalues()(i);
    if (nu > 1e-12 && nu < 1.0 - 1e-12) s -= nu * std::log(nu) + (1.0 - nu) * std::log1p(-nu);
  }
  return s;
}

}  // namespace

TEST_CASE("coupling chain validation") {
  CHECK_THROWS_AS(CouplingChain({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(CouplingChain({}), std::invalid_argument);
  CHECK_THROWS_AS(CouplingChain({1.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(CouplingChain({1.0, -0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(CouplingChain({std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
  CHECK_THROWS_AS(CouplingChain({std::numeric_limits<double>::infinity()}), std::invalid_argument);
  CHECK_THROWS_AS(CouplingChain({std::numeric_limits<double>::denorm_min()}), std::invalid_argument);
  const CouplingChain ok({0.3, 0.7, 0.2});
  CHECK(ok.num_sites() == 4);
  CHECK_FALSE(ok.is_block_decomposable());
  CHECK(ok.blocks() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 4}});
}

TEST_CASE("block-decomposable chains split at zero bonds") {
  const auto c = CouplingChain::block_decomposable({1.0, 0.0, 0.5, 0.2, 0.5});
  CHECK(c.is_block_decomposable());
  CHECK(c.blocks() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {2, 6}});
  // Odd blocks would leave a zero mode.
  CHECK_THROWS_AS(CouplingChain::block_decomposable({1.0, 1.0, 0.0, 1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("single-particle hamiltonian") {
  const auto h = single_particle_hamiltonian(CouplingChain({1.0}));
  const Eigen::MatrixXd dense = h.dense();
  CHECK(dense(0, 0) == 0.0);
  CHECK(dense(1, 1) == 0.0);
  CHECK(dense(0, 1) == 0.5);
  CHECK(dense(1, 0) == 0.5);
}

TEST_CASE("spectra of small chains") {
  const auto two = diagonalize(single_particle_hamiltonian(CouplingChain({1.0})));
  CHECK(two.energies(0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(two.energies(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(two.accuracy == SpectralDecomposition::Accuracy::Relative);

  const auto h4 = single_particle_hamiltonian(CouplingChain({1.0, 1.0, 1.0}));
  const auto four = diagonalize(h4);
  // Open chain with hopping 1/2: E_m = cos(m pi / 5).
  std::vector<double> expected;
  for (int m = 1; m <= 4; ++m) expected.push_back(std::cos(m * std::numbers::pi / 5.0));
  std::sort(expected.begin(), expected.end());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(h4.dense());
  for (int a = 0; a < 4; ++a) {
    CHECK(four.energies(a) == doctest::Approx(expected[static_cast<std::size_t>(a)]).epsilon(1e-14));
    CHECK(four.energies(a) == doctest::Approx(dense.eigenvalues()(a)).epsilon(1e-13));
  }
  CHECK(four.energies(3) == doctest::Approx(0.8090).epsilon(1e-4));
  CHECK(four.energies(2) == doctest::Approx(0.3090).epsilon(1e-3));
}

TEST_CASE("general tridiagonal matrices use the dense path") {
  TridiagonalMatrix h{{0.3, -1.0, 0.5}, {0.2, 0.7}};
  const auto spec = diagonalize(h);
  CHECK(spec.accuracy == SpectralDecomposition::Accuracy::Absolute);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(h.dense());
  for (int a = 0; a < 3; ++a) CHECK(spec.energies(a) == doctest::Approx(dense.eigenvalues()(a)).epsilon(1e-13));
  CHECK_THROWS_AS(diagonalize(TridiagonalMatrix{{}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(diagonalize(TridiagonalMatrix{{0.0, 0.0}, {}}), std::invalid_argument);
}

TEST_CASE("property: spectral invariants on random chains") {
  RandomStream rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t l = 2 * (1 + rng.below(60));
    const double delta = trial % 2 ? 3.0 : 1.0;
    const CouplingChain chain(random_couplings(rng, l, delta));
    const auto h = single_particle_hamiltonian(chain);
    const auto spec = diagonalize(h);
    const Eigen::MatrixXd dense = h.dense();
    const double emax = spec.energies.cwiseAbs().maxCoeff();
    const Eigen::MatrixXd gram = spec.modes.transpose() * spec.modes;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd resid = dense * spec.modes - spec.modes * spec.energies.asDiagonal();
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-8 * emax);
    for (std::size_t a = 0; a < l; ++a) {
      CHECK(std::abs(spec.energies(static_cast<Eigen::Index>(a)) +
                     spec.energies(static_cast<Eigen::Index>(l - 1 - a))) < 1e-10);
      if (a + 1 < l) CHECK(spec.energies(static_cast<Eigen::Index>(a)) <= spec.energies(static_cast<Eigen::Index>(a + 1)));
    }
  }
}

TEST_CASE("strong disorder keeps tiny gaps resolved") {
  // Couplings spanning 30 decades. A dense solver loses the smallest energies entirely; the
  // bidiagonal SVD keeps them to relative accuracy, checked through |det T| = prod s_a.
  std::vector<double> j{1.0, 1e-20, 1e-10, 1e-30, 1.0, 1e-25, 1e-5};
  const CouplingChain chain(j);
  const auto spec = diagonalize(single_particle_hamiltonian(chain));
  // T is lower bidiagonal with diagonal J_0/2, J_2/2, J_4/2, J_6/2, so prod |E_a| over the
  // positive half equals prod J_{2i} / 2.
  double prod_energies = 1.0, prod_diag = 1.0;
  for (Eigen::Index a = 4; a < 8; ++a) prod_energies *= spec.energies(a);
  for (std::size_t i = 0; i < 4; ++i) prod_diag *= j[2 * i] / 2.0;
  CHECK(prod_energies == doctest::Approx(prod_diag).epsilon(1e-12));
  CHECK(spec.accuracy == SpectralDecomposition::Accuracy::Relative);
  CHECK_NOTHROW(half_filled_ground_state(chain));
}

TEST_CASE("singlet correlation matrix and entropies") {
  const auto c = half_filled_ground_state(CouplingChain({1.0}));
  CHECK(std::abs(c(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(c(1, 1) - 0.5) < 1e-12);
  CHECK(std::abs(c(0, 1) + 0.5) < 1e-12);
  CHECK(std::abs(c(1, 0) + 0.5) < 1e-12);
  const std::vector<std::size_t> a{0}, b{1}, ab{0, 1};
  CHECK(std::abs(subsystem_entropy(c, a) - kLn2) < 1e-12);
  CHECK(std::abs(subsystem_entropy(c, ab)) < 1e-12);
  CHECK(std::abs(coherent_info(c, a, b) - kLn2) < 1e-12);
  CHECK(std::abs(coherent_info_sym(c, a, b) - kLn2) < 1e-12);
  CHECK(std::abs(pair_coherent_info(c, 0, 1) - kLn2) < 1e-12);
}

TEST_CASE("fillings at the edges") {
  const auto spec = diagonalize(single_particle_hamiltonian(CouplingChain({0.4, 0.9, 0.1})));
  CHECK(ground_state_correlations(spec, 0).entries().cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd full = ground_state_correlations(spec, 4).entries();
  CHECK((full - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(ground_state_correlations(spec, 5), std::invalid_argument);
}

TEST_CASE("degenerate Fermi levels are rejected") {
  const auto chain = CouplingChain::block_decomposable({1.0, 0.0, 1.0});
  const auto spec = diagonalize(single_particle_hamiltonian(chain));
  CHECK_THROWS_AS(ground_state_correlations(spec, 1), DegenerateFermiLevel);
  CHECK_NOTHROW(ground_state_correlations(spec, 2));
  try {
    ground_state_correlations(spec, 3);
    FAIL("expected a degenerate level");
  } catch (const DegenerateFermiLevel& e) {
    CHECK(e.gap() == doctest::Approx(0.0));
  }
}

TEST_CASE("binary entropy and cutoffs") {
  CHECK(binary_entropy(0.5) == doctest::Approx(kLn2).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(5e-13) == 0.0);
  CHECK(binary_entropy(1.0 - 5e-13) == 0.0);
  CHECK(binary_entropy(-1e-15) == 0.0);
  CHECK(binary_entropy(0.1) == doctest::Approx(-0.1 * std::log(0.1) - 0.9 * std::log(0.9)));
  CHECK(binary_entropy(0.3) == doctest::Approx(binary_entropy(0.7)).epsilon(1e-15));
}

TEST_CASE("entropy argument checks") {
  const auto c = half_filled_ground_state(CouplingChain({1.0, 0.5, 1.0}));
  const std::vector<std::size_t> bad{4}, twice{1, 1}, none{}, a{0}, b{0, 1};
  CHECK_THROWS_AS(subsystem_entropy(c, bad), std::out_of_range);
  CHECK_THROWS_AS(subsystem_entropy(c, twice), std::invalid_argument);
  CHECK_THROWS_AS(subsystem_entropy(c, none), std::invalid_argument);
  CHECK_THROWS_AS(coherent_info(c, a, b), std::invalid_argument);
  CHECK_THROWS_AS(coherent_info_sym(c, a, none), std::invalid_argument);
  CHECK_THROWS_AS(pair_coherent_info(c, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(pair_coherent_info(c, 0, 7), std::out_of_range);
}

TEST_CASE("product states carry no coherent information") {
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(4, 4);
  diag(0, 0) = 1.0;
  diag(2, 2) = 1.0;
  const CorrelationMatrix c(diag, 2);
  const std::vector<std::size_t> a{0, 1}, b{2, 3};
  CHECK(coherent_info(c, a, b) == 0.0);
  CHECK(coherent_info_sym(c, a, b) == 0.0);
  CHECK(pair_coherent_info(c, 0, 2) == 0.0);
  // Uncorrelated half-filled sites: ln 2 - 2 ln 2 < 0, clamped to zero.
  CHECK(pair_coherent_info(0.5, 0.5, 0.0, kLn2, kLn2) == 0.0);
}

TEST_CASE("half-chain entropy of the uniform four-site chain matches the Fock-space oracle") {
  const std::vector<double> j{1.0, 1.0, 1.0};
  const auto c = half_filled_ground_state(CouplingChain(j));
  const auto gs = oracle::fock_ground_state(j);
  const std::vector<std::size_t> half{0, 1};
  CHECK(std::abs(subsystem_entropy(c, half) - oracle::fock_entropy(gs, {0, 1})) < 1e-8);
  // Ground energy is the sum of the negative single-particle energies.
  CHECK(gs.energy == doctest::Approx(-std::cos(std::numbers::pi / 5) - std::cos(2 * std::numbers::pi / 5)));
}

TEST_CASE("property: correlation entropies match the Fock-space oracle") {
  RandomStream rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t l = 2 * (1 + rng.below(4));
    const auto j = random_couplings(rng, l, trial % 2 ? 3.0 : 1.0);
    const auto gs = oracle::fock_ground_state(j);
    if (gs.gap < 1e-9) continue;  // the many-body oracle cannot pick the state either
    const auto c = half_filled_ground_state(CouplingChain(j));
    for (int rep = 0; rep < 5; ++rep) {
      const auto sites = random_subset(rng, l);
      const std::vector<int> as_int(sites.begin(), sites.end());
      CHECK(std::abs(subsystem_entropy(c, sites) - oracle::fock_entropy(gs, as_int)) < 1e-8);
    }
  }
}

TEST_CASE("property: Gaussian-state invariants on random chains") {
  RandomStream rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t l = 2 * (1 + rng.below(40));
    const CouplingChain chain(random_couplings(rng, l, trial % 2 ? 3.0 : 1.0));
    const auto c = half_filled_ground_state(chain);
    const Eigen::MatrixXd& m = c.entries();
    CHECK((m * m - m).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(m.trace() - static_cast<double>(l) / 2.0) < 1e-8);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(subsystem_entropy(c, range(0, l)) < 1e-8);

    const auto a = random_subset(rng, l);
    const auto ac = complement_of(a, l);
    if (!ac.empty()) {
      CHECK(std::abs(subsystem_entropy(c, a) - subsystem_entropy(c, ac)) < 1e-8);
      const auto b = std::vector<std::size_t>(ac.begin(), ac.begin() + static_cast<std::ptrdiff_t>(1 + rng.below(ac.size())));
      CHECK(coherent_info(c, a, b) <= subsystem_entropy(c, a) + 1e-10);
      CHECK(coherent_info_sym(c, a, b) == coherent_info_sym(c, b, a));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.topLeftCorner(l / 2, l / 2), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-10);
    for (std::size_t jj = 0; jj < l; ++jj)
      for (std::size_t kk = jj + 1; kk < l; ++kk) {
        const double ic = pair_coherent_info(c, jj, kk);
        CHECK(ic <= kLn2 + 1e-10);
        const std::vector<std::size_t> x{jj}, y{kk};
        CHECK(std::abs(ic - coherent_info_sym(c, x, y)) < 1e-10);
      }
  }
}

TEST_CASE("property: pair fast path agrees with a general eigensolver on random 2x2 inputs") {
  RandomStream rng(61);
  for (int trial = 0; trial < 2000; ++trial) {
    // A random 2x2 block with spectrum in [0, 1]: R diag(n1, n2) R^T.
    const double n1 = rng.uniform_closed_open(), n2 = rng.uniform_closed_open();
    const double th = std::numbers::pi * rng.uniform_closed_open();
    Eigen::Matrix2d rot;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Eigen::Matrix2d m = rot * Eigen::Vector2d(n1, n2).asDiagonal() * rot.transpose();
    const double sj = binary_entropy(m(0, 0)), sk = binary_entropy(m(1, 1));
    const double fast = pair_coherent_info(m(0, 0), m(1, 1), m(0, 1), sj, sk);
    const double general = std::max({sj - dense_entropy_of_matrix(m), sk - dense_entropy_of_matrix(m), 0.0});
    CHECK(std::abs(fast - general) < 1e-10);
  }
}

TEST_CASE("property: coupling scale leaves the state unchanged") {
  RandomStream rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t l = 2 * (1 + rng.below(30));
    auto j = random_couplings(rng, l, 2.0);
    const auto c1 = half_filled_ground_state(CouplingChain(j));
    const double s = std::exp(10.0 * (rng.uniform_closed_open() - 0.5));
    for (auto& x : j) x *= s;
    const auto c2 = half_filled_ground_state(CouplingChain(j));
    CHECK((c1.entries() - c2.entries()).cwiseAbs().maxCoeff() < 1e-10);
  }
}
