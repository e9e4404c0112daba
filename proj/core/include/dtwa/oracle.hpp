#pragma once

// Independent exact references used to validate the trajectory method:
// closed-form Ising one- and two-point functions from an all +x product
// state, the analytic infinite-sample limit of the discrete sampling with
// its cos^2(2 t J_ij) error factor, and dense-state exact diagonalization
// for small N via a Krylov (Lanczos) matrix exponential.
//
// Spin operators are in Pauli normalization throughout: S_a = sum_n sigma_n^a
// with single-site eigenvalues +-1 (not 1/2), matching the classical +-1
// sampling. sigma^pm = (sigma^x +- i sigma^y)/2.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dtwa/dynamics.hpp"
#include "dtwa/lattice.hpp"
#include "dtwa/observables.hpp"
#include "dtwa/phase_space.hpp"

namespace dtwa::oracle {

// <sigma_n^x>(t) = prod_{i != n} cos(2 t Jz_in) for a pure Ising quench from
// all +x.
double exact_ising_sx(const CouplingMatrix& j_z, double t, int n);

// <sigma_i^{s1} sigma_j^{s2}>(t) for s1, s2 in {+1, -1} (sigma^+/sigma^-),
// same quench: (1/4) prod_{a != i,j} cos(2 t (s1 J_ia + s2 J_ja)).
// The product form is the analytically summed two-site solution; tests check
// it against the direct 2^(N-2)-term sum.
std::complex<double> exact_ising_corr(const CouplingMatrix& j_z, double t, int i, int j,
                                      int s1, int s2);

// Infinite-sample limit of the discrete-sampling estimate of the same
// correlator: exact_ising_corr * cos^2(2 t Jz_ij).
std::complex<double> dtwa_limit_ising_corr(const CouplingMatrix& j_z, double t, int i, int j,
                                           int s1, int s2);

// Exact Re<S_y S_z>(t) = sum_{i != j} sin(2 t J_ij) prod_{a != i,j} cos(2 t J_ia)
// for the same quench (the i sum runs over the sigma^y site).
double exact_ising_re_sysz(const CouplingMatrix& j_z, double t);

// Exact Delta S_x = <S_x^2> - <S_x>^2 assembled from the one- and two-point
// solutions above.
double exact_ising_var_sx(const CouplingMatrix& j_z, double t);

struct QuantumState {
    Eigen::VectorXcd amplitudes;  // length 2^N, unit norm
    int n_sites = 0;
};

struct EdOptions {
    int site_cap = 14;       // refuse larger Hilbert spaces (with a memory estimate)
    int krylov_dim = 30;     // Lanczos subspace size per substep
    double substep_tol = 1e-13;
};

// Matrix-free H = sum_{i<j} [ Jp_ij/2 (xx + yy) + Jz_ij zz ] + Omega sum_i x.
// Basis: bit b of the index is site b, bit value 0 means sigma^z = +1.
class SparseHamiltonian {
public:
    explicit SparseHamiltonian(const ModelParams& params);

    std::int64_t dim() const { return dim_; }
    int n_sites() const { return n_; }
    void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
    double norm_bound() const;  // cheap upper bound on ||H||

private:
    int n_ = 0;
    std::int64_t dim_ = 0;
    double omega_ = 0.0;
    Eigen::VectorXd diag_;  // zz part
    struct FlipFlop {
        std::int64_t mask;
        double coefficient;
    };
    std::vector<FlipFlop> flip_flops_;
    double norm_bound_ = 0.0;
};

// Product state with each site polarized along its configured axis.
QuantumState ed_initial_state(const ProductState& state);

// |psi(t_k)> = exp(-i H t_k) |psi(0)> for every requested time (nondecreasing,
// starting at >= 0). Throws ConfigError with a memory estimate above the cap.
std::vector<QuantumState> ed_evolve(const ModelParams& params, const ProductState& initial,
                                    const std::vector<double>& times,
                                    const EdOptions& options = {});

// Quantum expectation values matching the classical estimator layout.
struct EdObservables {
    Eigen::Vector3d collective = Eigen::Vector3d::Zero();       // <S_a>
    Eigen::Matrix3d second_moments = Eigen::Matrix3d::Zero();   // sym <S_a S_b>
    double xi = 0.0;
    Eigen::Vector3d xi_direction = Eigen::Vector3d::Zero();
    bool xi_defined = false;
    double energy = 0.0;  // <H> when a Hamiltonian is supplied
};

EdObservables ed_observables(const QuantumState& state, const ModelParams* params = nullptr);

// Symmetrized pair correlator 1/2 <{sigma_i^a, sigma_j^b}>.
double ed_pair_corr(const QuantumState& state, int i, Axis a, int j, Axis b);

}  // namespace dtwa::oracle
