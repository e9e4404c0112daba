#pragma once

// Classical mean-field dynamics for the XXZ + transverse-field model:
//
//   H_C = 1/2 sum_{i!=j} [ Jp_ij/2 (sx_i sx_j + sy_i sy_j) + Jz_ij sz_i sz_j ]
//         + Omega sum_i sx_i
//
// With beta^{x,y}_n = sum_m Jp_nm s^{x,y}_m and beta^z_n = sum_m Jz_nm s^z_m:
//
//   d sx_n =  sz_n beta^y_n - 2 sy_n beta^z_n
//   d sy_n = -sz_n beta^x_n + 2 sx_n beta^z_n - 2 Omega sz_n
//   d sz_n =  sy_n beta^x_n - sx_n beta^y_n   + 2 Omega sy_n
//
// plus the closed-form solution for the pure Ising limit, where each
// transverse spin simply precesses about z by phi_n = 2 t beta^z_n(0).

#include <functional>
#include <optional>
#include <vector>

#include "dtwa/lattice.hpp"
#include "dtwa/phase_space.hpp"

namespace dtwa {

struct ModelParams {
    CouplingMatrix j_perp;
    CouplingMatrix j_z;
    double omega = 0.0;

    ModelParams(CouplingMatrix perp, CouplingMatrix z, double omega_in = 0.0);

    int n_spins() const { return j_perp.n_spins(); }
    bool pure_ising() const { return j_perp.is_zero() && omega == 0.0; }
    double max_coupling() const;  // max |J| over both matrices
    // Omega + max_n sum_m (|Jp_nm| + |Jz_nm|): worst-case precession rate
    double max_field_bound() const;
};

struct IntegratorConfig {
    double dt = 0.0;  // <= 0: use default_dt
    bool force_integrator = false;  // disable the Ising closed-form fast path

    static double default_dt(const ModelParams& params);
    double effective_dt(const ModelParams& params) const;
};

// dt * (Omega + max row sum) > 0.1 produces a warning string.
std::optional<std::string> step_warning(const ModelParams& params, double dt);

// Time derivative of one configuration (allocating convenience wrapper).
SpinConfiguration eom_rhs(const SpinConfiguration& state, const ModelParams& params);

// Classical energy H_C; conserved along trajectories.
double classical_energy(const SpinConfiguration& state, const ModelParams& params);
Eigen::VectorXd classical_energy(const SpinBatch& state, const ModelParams& params);

// Fixed-step classical RK4 over a batch of trajectories. The coupling sums
// are evaluated as dense matrix products over the whole batch.
class BatchIntegrator {
public:
    BatchIntegrator(const ModelParams& params, int n_traj, double dt);

    // Advance from t_from to t_to with ceil(|t_to-t_from|/dt) equal steps
    // (backwards when t_to < t_from). Throws IntegrationDivergedError with
    // the failing time when the state stops being finite.
    void advance(SpinBatch& state, double t_from, double t_to);

    double dt() const { return dt_; }

private:
    void rhs(const SpinBatch& state, SpinBatch& out);

    const ModelParams& params_;
    double dt_;
    SpinBatch k1_, k2_, k3_, k4_, stage_;
    Eigen::MatrixXd bx_, by_, bz_;
};

// Integrate a single configuration, returning the state at each requested
// time. Times must be nondecreasing and start at >= 0; the initial state is
// the t = 0 state.
std::vector<SpinConfiguration> integrate(const SpinConfiguration& initial,
                                         const ModelParams& params,
                                         const IntegratorConfig& cfg,
                                         const std::vector<double>& times);

// Exact pure-Ising evolution: s^z frozen, transverse components rotated about
// z by phi_n = 2 t sum_j Jz_nj s^z_j(0).
SpinConfiguration ising_closed_form(const SpinConfiguration& initial,
                                    const CouplingMatrix& j_z, double t);

// Guarded variant: throws MisuseError unless params.pure_ising().
SpinConfiguration ising_closed_form(const SpinConfiguration& initial,
                                    const ModelParams& params, double t);

// Batched closed form: precomputes beta^z = Jz * Z once, then emits the state
// at each time through `emit(time_index, state)`.
void ising_closed_form_batch(const SpinBatch& initial, const CouplingMatrix& j_z,
                             const std::vector<double>& times,
                             const std::function<void(int, const SpinBatch&)>& emit);

}  // namespace dtwa
