#include "dtwa/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace dtwa {

ModelParams::ModelParams(CouplingMatrix perp, CouplingMatrix z, double omega_in)
    : j_perp(std::move(perp)), j_z(std::move(z)), omega(omega_in) {
    if (j_perp.n_spins() != j_z.n_spins())
        throw ConfigError("J_perp and J_z must have the same number of spins");
}

double ModelParams::max_coupling() const {
    return std::max(j_perp.values().cwiseAbs().maxCoeff(),
                    j_z.values().cwiseAbs().maxCoeff());
}

double ModelParams::max_field_bound() const {
    const Eigen::VectorXd row_sums =
        j_perp.values().cwiseAbs().rowwise().sum() + j_z.values().cwiseAbs().rowwise().sum();
    return std::abs(omega) + row_sums.maxCoeff();
}

double IntegratorConfig::default_dt(const ModelParams& params) {
    return 1e-3 / std::max({params.max_coupling(), std::abs(params.omega), 1.0});
}

double IntegratorConfig::effective_dt(const ModelParams& params) const {
    return dt > 0.0 ? dt : default_dt(params);
}

std::optional<std::string> step_warning(const ModelParams& params, double dt) {
    const double resolution = dt * params.max_field_bound();
    if (resolution > 0.1) {
        std::ostringstream msg;
        msg << "time step dt = " << dt << " resolves the worst-case field poorly "
            << "(dt * (Omega + max row sum) = " << resolution
            << " > 0.1); consider a smaller dt";
        return msg.str();
    }
    return std::nullopt;
}

SpinConfiguration eom_rhs(const SpinConfiguration& state, const ModelParams& params) {
    const int n = params.n_spins();
    if (state.n_sites() != n)
        throw ConfigError("state and model dimensions disagree");
    SpinConfiguration d(n);
    Eigen::VectorXd bx = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd by = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd bz = Eigen::VectorXd::Zero(n);
    if (!params.j_perp.is_zero()) {
        bx.noalias() = params.j_perp.values() * state.x;
        by.noalias() = params.j_perp.values() * state.y;
    }
    if (!params.j_z.is_zero()) bz.noalias() = params.j_z.values() * state.z;

    d.x = state.z.cwiseProduct(by) - 2.0 * state.y.cwiseProduct(bz);
    d.y = 2.0 * state.x.cwiseProduct(bz) - state.z.cwiseProduct(bx);
    d.z = state.y.cwiseProduct(bx) - state.x.cwiseProduct(by);
    if (params.omega != 0.0) {
        d.y -= 2.0 * params.omega * state.z;
        d.z += 2.0 * params.omega * state.y;
    }
    return d;
}

double classical_energy(const SpinConfiguration& state, const ModelParams& params) {
    double e = 0.0;
    if (!params.j_perp.is_zero()) {
        e += 0.25 * (state.x.dot(params.j_perp.values() * state.x) +
                     state.y.dot(params.j_perp.values() * state.y));
    }
    if (!params.j_z.is_zero()) e += 0.5 * state.z.dot(params.j_z.values() * state.z);
    if (params.omega != 0.0) e += params.omega * state.x.sum();
    return e;
}

Eigen::VectorXd classical_energy(const SpinBatch& state, const ModelParams& params) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(state.n_traj());
    if (!params.j_perp.is_zero()) {
        e += 0.25 * (state.x.cwiseProduct(params.j_perp.values() * state.x) +
                     state.y.cwiseProduct(params.j_perp.values() * state.y))
                        .colwise()
                        .sum()
                        .transpose();
    }
    if (!params.j_z.is_zero()) {
        e += 0.5 *
             state.z.cwiseProduct(params.j_z.values() * state.z).colwise().sum().transpose();
    }
    if (params.omega != 0.0) e += params.omega * state.x.colwise().sum().transpose();
    return e;
}

BatchIntegrator::BatchIntegrator(const ModelParams& params, int n_traj, double dt)
    : params_(params),
      dt_(dt),
      k1_(params.n_spins(), n_traj),
      k2_(params.n_spins(), n_traj),
      k3_(params.n_spins(), n_traj),
      k4_(params.n_spins(), n_traj),
      stage_(params.n_spins(), n_traj),
      bx_(params.n_spins(), n_traj),
      by_(params.n_spins(), n_traj),
      bz_(params.n_spins(), n_traj) {
    if (dt_ <= 0.0) throw ConfigError("integrator time step must be positive");
}

void BatchIntegrator::rhs(const SpinBatch& s, SpinBatch& out) {
    const bool perp = !params_.j_perp.is_zero();
    const bool zz = !params_.j_z.is_zero();
    if (perp) {
        bx_.noalias() = params_.j_perp.values() * s.x;
        by_.noalias() = params_.j_perp.values() * s.y;
    }
    if (zz) bz_.noalias() = params_.j_z.values() * s.z;

    if (perp && zz) {
        out.x = s.z.cwiseProduct(by_) - 2.0 * s.y.cwiseProduct(bz_);
        out.y = 2.0 * s.x.cwiseProduct(bz_) - s.z.cwiseProduct(bx_);
        out.z = s.y.cwiseProduct(bx_) - s.x.cwiseProduct(by_);
    } else if (perp) {
        out.x = s.z.cwiseProduct(by_);
        out.y = -s.z.cwiseProduct(bx_);
        out.z = s.y.cwiseProduct(bx_) - s.x.cwiseProduct(by_);
    } else if (zz) {
        out.x = -2.0 * s.y.cwiseProduct(bz_);
        out.y = 2.0 * s.x.cwiseProduct(bz_);
        out.z.setZero();
    } else {
        out.x.setZero();
        out.y.setZero();
        out.z.setZero();
    }
    if (params_.omega != 0.0) {
        out.y -= 2.0 * params_.omega * s.z;
        out.z += 2.0 * params_.omega * s.y;
    }
}

void BatchIntegrator::advance(SpinBatch& state, double t_from, double t_to) {
    const double span = t_to - t_from;
    if (span == 0.0) return;
    const auto steps = static_cast<long>(std::ceil(std::abs(span) / dt_ - 1e-12));
    const double h = span / static_cast<double>(std::max(steps, 1L));

    for (long step = 0; step < std::max(steps, 1L); ++step) {
        rhs(state, k1_);
        stage_.x = state.x + (0.5 * h) * k1_.x;
        stage_.y = state.y + (0.5 * h) * k1_.y;
        stage_.z = state.z + (0.5 * h) * k1_.z;
        rhs(stage_, k2_);
        stage_.x = state.x + (0.5 * h) * k2_.x;
        stage_.y = state.y + (0.5 * h) * k2_.y;
        stage_.z = state.z + (0.5 * h) * k2_.z;
        rhs(stage_, k3_);
        stage_.x = state.x + h * k3_.x;
        stage_.y = state.y + h * k3_.y;
        stage_.z = state.z + h * k3_.z;
        rhs(stage_, k4_);
        state.x += (h / 6.0) * (k1_.x + 2.0 * k2_.x + 2.0 * k3_.x + k4_.x);
        state.y += (h / 6.0) * (k1_.y + 2.0 * k2_.y + 2.0 * k3_.y + k4_.y);
        state.z += (h / 6.0) * (k1_.z + 2.0 * k2_.z + 2.0 * k3_.z + k4_.z);
    }
    if (!state.all_finite()) {
        std::ostringstream msg;
        msg << "integration diverged (non-finite state) near t = " << t_to;
        throw IntegrationDivergedError(msg.str(), t_to);
    }
}

std::vector<SpinConfiguration> integrate(const SpinConfiguration& initial,
                                         const ModelParams& params,
                                         const IntegratorConfig& cfg,
                                         const std::vector<double>& times) {
    if (initial.n_sites() != params.n_spins())
        throw ConfigError("state and model dimensions disagree");
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (times[k + 1] < times[k]) throw ConfigError("output times must be nondecreasing");
    if (!times.empty() && times.front() < 0.0)
        throw ConfigError("output times must be nonnegative");

    BatchIntegrator integrator(params, 1, cfg.effective_dt(params));
    SpinBatch state(initial.n_sites(), 1);
    state.set_column(0, initial);

    std::vector<SpinConfiguration> out;
    out.reserve(times.size());
    double t = 0.0;
    for (double target : times) {
        integrator.advance(state, t, target);
        t = target;
        out.push_back(state.column(0));
    }
    return out;
}

SpinConfiguration ising_closed_form(const SpinConfiguration& initial,
                                    const CouplingMatrix& j_z, double t) {
    if (initial.n_sites() != j_z.n_spins())
        throw ConfigError("state and coupling dimensions disagree");
    SpinConfiguration out(initial.n_sites());
    const Eigen::VectorXd phi = (2.0 * t) * (j_z.values() * initial.z);
    const Eigen::VectorXd c = phi.array().cos().matrix();
    const Eigen::VectorXd s = phi.array().sin().matrix();
    out.x = initial.x.cwiseProduct(c) - initial.y.cwiseProduct(s);
    out.y = initial.x.cwiseProduct(s) + initial.y.cwiseProduct(c);
    out.z = initial.z;
    return out;
}

SpinConfiguration ising_closed_form(const SpinConfiguration& initial,
                                    const ModelParams& params, double t) {
    if (!params.pure_ising())
        throw MisuseError(
            "ising_closed_form requires J_perp = 0 and Omega = 0; use the integrator");
    return ising_closed_form(initial, params.j_z, t);
}

void ising_closed_form_batch(const SpinBatch& initial, const CouplingMatrix& j_z,
                             const std::vector<double>& times,
                             const std::function<void(int, const SpinBatch&)>& emit) {
    Eigen::MatrixXd beta;
    beta.noalias() = j_z.values() * initial.z;
    SpinBatch state(initial.n_sites(), initial.n_traj());
    state.z = initial.z;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const Eigen::ArrayXXd phi = (2.0 * times[k]) * beta.array();
        const Eigen::ArrayXXd c = phi.cos();
        const Eigen::ArrayXXd s = phi.sin();
        state.x = (initial.x.array() * c - initial.y.array() * s).matrix();
        state.y = (initial.x.array() * s + initial.y.array() * c).matrix();
        emit(static_cast<int>(k), state);
    }
}

}  // namespace dtwa
