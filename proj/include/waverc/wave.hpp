#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "waverc/fields.hpp"
#include "waverc/grid.hpp"

namespace waverc {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// One explicit FDTD step over the staggered grid, leapfrog order:
/// p is updated first from the old o-field, then o from the updated p.
/// The divergence coefficient per cell is (c/c_ref)^2 / 2, which puts the
/// 2-D stability limit exactly at c = c_ref.
WaveState fdtd_step(const WaveState& state, const SpeedField& c,
                    const DampingField& k, const GridSpec& spec);

/// Sparse matrix A with A*x == fdtd_step(x) for every stacked state x.
SparseMat build_coupling_matrix(const SpeedField& c, const DampingField& k,
                                const GridSpec& spec);

/// W = (A - (1 - alpha)*I) / alpha.
SparseMat coupling_to_reservoir_weights(const SparseMat& a, double alpha);

/// Spectral radius by dense eigendecomposition. Only for small matrices.
double spectral_radius_dense(const SparseMat& a);

/// Maximal eigenvalue modulus after removing the single eigenvalue closest
/// to +1. The scheme has an exact steady mode (constant p, zero o) pinned at
/// eigenvalue 1 for any damping, so damping comparisons are made on the rest
/// of the spectrum.
double resonant_radius_dense(const SparseMat& a);

/// Power-iteration estimate of the spectral radius (geometric mean growth
/// rate). Suitable for matrices too large for a dense solve.
double spectral_radius_power(const SparseMat& a, std::uint64_t seed,
                             int iters = 2000);

/// Discrete energy exactly conserved by the undamped leapfrog step:
///   sum p^2/coef + |o|^2 + <o, grad p>,  coef = (c/c_ref)^2 / 2.
double leapfrog_energy(const WaveState& state, const SpeedField& c,
                       const GridSpec& spec);

}  // namespace waverc
