#include "dtwa/oracle.hpp"

#include <cmath>
#include <sstream>

namespace dtwa::oracle {

namespace {

using Complex = std::complex<double>;

void check_pair(const CouplingMatrix& j_z, int i, int j) {
    const int n = j_z.n_spins();
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw MisuseError("correlator site index outside the coupling matrix");
    if (i == j) throw MisuseError("correlator requires two distinct sites");
}

}  // namespace

double exact_ising_sx(const CouplingMatrix& j_z, double t, int n) {
    const int size = j_z.n_spins();
    if (n < 0 || n >= size) throw MisuseError("site index outside the coupling matrix");
    double product = 1.0;
    for (int i = 0; i < size; ++i) {
        if (i == n) continue;
        product *= std::cos(2.0 * t * j_z(i, n));
    }
    return product;
}

std::complex<double> exact_ising_corr(const CouplingMatrix& j_z, double t, int i, int j,
                                      int s1, int s2) {
    check_pair(j_z, i, j);
    if ((s1 != 1 && s1 != -1) || (s2 != 1 && s2 != -1))
        throw MisuseError("correlator signs must be +1 or -1");
    double product = 0.25;
    for (int a = 0; a < j_z.n_spins(); ++a) {
        if (a == i || a == j) continue;
        product *= std::cos(2.0 * t * (s1 * j_z(i, a) + s2 * j_z(j, a)));
    }
    return {product, 0.0};
}

std::complex<double> dtwa_limit_ising_corr(const CouplingMatrix& j_z, double t, int i, int j,
                                           int s1, int s2) {
    const double c = std::cos(2.0 * t * j_z(i, j));
    return exact_ising_corr(j_z, t, i, j, s1, s2) * (c * c);
}

double exact_ising_re_sysz(const CouplingMatrix& j_z, double t) {
    const int n = j_z.n_spins();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {      // sigma^y site
        for (int j = 0; j < n; ++j) {  // sigma^z site
            if (j == i) continue;
            double term = std::sin(2.0 * t * j_z(i, j));
            for (int a = 0; a < n; ++a) {
                if (a == i || a == j) continue;
                term *= std::cos(2.0 * t * j_z(i, a));
            }
            total += term;
        }
    }
    return total;
}

double exact_ising_var_sx(const CouplingMatrix& j_z, double t) {
    const int n = j_z.n_spins();
    double sx = 0.0;
    for (int i = 0; i < n; ++i) sx += exact_ising_sx(j_z, t, i);
    double sx2 = static_cast<double>(n);  // on-site (sigma^x)^2 = 1
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double pair = 0.0;
            for (int s1 : {+1, -1})
                for (int s2 : {+1, -1})
                    pair += exact_ising_corr(j_z, t, i, j, s1, s2).real();
            sx2 += pair;
        }
    }
    return sx2 - sx * sx;
}

SparseHamiltonian::SparseHamiltonian(const ModelParams& params)
    : n_(params.n_spins()), omega_(params.omega) {
    dim_ = std::int64_t{1} << n_;
    diag_ = Eigen::VectorXd::Zero(dim_);
    double offdiag_bound = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j < n_; ++j) {
            const double jp = params.j_perp(i, j);
            if (jp != 0.0) {
                flip_flops_.push_back(
                    {static_cast<std::int64_t>((1LL << i) | (1LL << j)), jp});
                offdiag_bound += std::abs(jp);
            }
        }
    }
    double zz_bound = 0.0;
    if (!params.j_z.is_zero()) {
        for (std::int64_t state = 0; state < dim_; ++state) {
            double e = 0.0;
            for (int i = 0; i < n_; ++i) {
                const double zi = ((state >> i) & 1) ? -1.0 : 1.0;
                for (int j = i + 1; j < n_; ++j) {
                    const double zj = ((state >> j) & 1) ? -1.0 : 1.0;
                    e += params.j_z(i, j) * zi * zj;
                }
            }
            diag_[state] = e;
        }
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) zz_bound += std::abs(params.j_z(i, j));
    }
    norm_bound_ = offdiag_bound + zz_bound + std::abs(omega_) * n_;
}

void SparseHamiltonian::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    out.resize(dim_);
    for (std::int64_t s = 0; s < dim_; ++s) out[s] = diag_[s] * in[s];
    // flip-flop terms act only between anti-aligned pairs
    for (const auto& ff : flip_flops_) {
        const std::int64_t mask = ff.mask;
        const std::int64_t low = mask & (-mask);
        const std::int64_t high = mask ^ low;
        for (std::int64_t state = 0; state < dim_; ++state) {
            const bool b_low = (state & low) != 0;
            const bool b_high = (state & high) != 0;
            if (b_low != b_high) out[state ^ mask] += ff.coefficient * in[state];
        }
    }
    if (omega_ != 0.0) {
        for (int i = 0; i < n_; ++i) {
            const std::int64_t mask = std::int64_t{1} << i;
            for (std::int64_t state = 0; state < dim_; ++state)
                out[state ^ mask] += omega_ * in[state];
        }
    }
}

double SparseHamiltonian::norm_bound() const { return std::max(norm_bound_, 1e-30); }

QuantumState ed_initial_state(const ProductState& state) {
    const int n = state.n_sites();
    const std::int64_t dim = std::int64_t{1} << n;
    // per-site amplitudes on |sigma^z = +1> (bit 0) and |sigma^z = -1> (bit 1)
    std::vector<std::array<Complex, 2>> factor(static_cast<std::size_t>(n));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        const auto& p = state.site(i);
        const double s = static_cast<double>(p.sign);
        switch (p.axis) {
            case Axis::x:
                factor[i] = {Complex(inv_sqrt2, 0.0), Complex(s * inv_sqrt2, 0.0)};
                break;
            case Axis::y:
                factor[i] = {Complex(inv_sqrt2, 0.0), Complex(0.0, s * inv_sqrt2)};
                break;
            default:
                factor[i] = p.sign > 0 ? std::array<Complex, 2>{Complex(1.0), Complex(0.0)}
                                       : std::array<Complex, 2>{Complex(0.0), Complex(1.0)};
                break;
        }
    }
    QuantumState out;
    out.n_sites = n;
    out.amplitudes.resize(dim);
    for (std::int64_t basis = 0; basis < dim; ++basis) {
        Complex amp(1.0, 0.0);
        for (int i = 0; i < n; ++i) amp *= factor[i][(basis >> i) & 1];
        out.amplitudes[basis] = amp;
    }
    return out;
}

namespace {

// exp(-i H dt) v via Lanczos with full reorthogonalization. dim is small
// enough here that the subspace either converges (||H|| dt of order a few)
// or breaks down happily.
void lanczos_exp_step(const SparseHamiltonian& h, Eigen::VectorXcd& v, double dt, int m_max) {
    const auto dim = h.dim();
    const int m_cap = static_cast<int>(std::min<std::int64_t>(m_max, dim));

    std::vector<Eigen::VectorXcd> basis;
    basis.reserve(static_cast<std::size_t>(m_cap));
    Eigen::VectorXd alpha(m_cap);
    Eigen::VectorXd beta(m_cap);  // beta[k] couples vector k and k+1

    const double v_norm = v.norm();
    basis.push_back(v / v_norm);
    Eigen::VectorXcd w(dim);
    int m = m_cap;
    for (int k = 0; k < m_cap; ++k) {
        h.apply(basis[static_cast<std::size_t>(k)], w);
        alpha[k] = basis[static_cast<std::size_t>(k)].dot(w).real();
        w -= alpha[k] * basis[static_cast<std::size_t>(k)];
        if (k > 0) w -= beta[k - 1] * basis[static_cast<std::size_t>(k - 1)];
        // full reorthogonalization keeps the basis orthonormal to roundoff
        for (int r = 0; r <= k; ++r) w -= basis[static_cast<std::size_t>(r)].dot(w) * basis[static_cast<std::size_t>(r)];
        const double b = w.norm();
        if (k + 1 == m_cap) break;
        if (b < 1e-13 * h.norm_bound()) {
            m = k + 1;  // happy breakdown: the subspace is invariant
            break;
        }
        beta[k] = b;
        basis.push_back(w / b);
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        tri(k, k) = alpha[k];
        if (k + 1 < m) {
            tri(k, k + 1) = beta[k];
            tri(k + 1, k) = beta[k];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
    const Eigen::VectorXd phases = eig.eigenvalues() * (-dt);
    Eigen::VectorXcd small = Eigen::VectorXcd::Zero(m);
    const Eigen::VectorXd first_row = eig.eigenvectors().row(0).transpose();
    for (int k = 0; k < m; ++k)
        small += (Complex(std::cos(phases[k]), std::sin(phases[k])) * first_row[k]) *
                 eig.eigenvectors().col(k).cast<Complex>();

    v.setZero();
    for (int k = 0; k < m; ++k) v += (v_norm * small[k]) * basis[static_cast<std::size_t>(k)];
}

}  // namespace

std::vector<QuantumState> ed_evolve(const ModelParams& params, const ProductState& initial,
                                    const std::vector<double>& times,
                                    const EdOptions& options) {
    const int n = params.n_spins();
    if (initial.n_sites() != n) throw ConfigError("initial state and model sizes disagree");
    if (n > options.site_cap) {
        const double mib = static_cast<double>(std::int64_t{1} << n) * 16.0 *
                           (options.krylov_dim + 4) / (1024.0 * 1024.0);
        std::ostringstream msg;
        msg << "exact diagonalization for N = " << n << " exceeds the cap of "
            << options.site_cap << " sites (state plus Krylov basis would need about " << mib
            << " MiB)";
        throw ConfigError(msg.str());
    }
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (times[k + 1] < times[k]) throw ConfigError("output times must be nondecreasing");
    if (!times.empty() && times.front() < 0.0)
        throw ConfigError("output times must be nonnegative");

    const SparseHamiltonian h(params);
    QuantumState state = ed_initial_state(initial);

    std::vector<QuantumState> out;
    out.reserve(times.size());
    double t = 0.0;
    for (double target : times) {
        double span = target - t;
        if (span > 0.0) {
            // keep ||H|| dt_sub <= 4 so a 30-dim subspace reaches roundoff
            const double max_span = 4.0 / h.norm_bound();
            const auto steps = static_cast<long>(std::ceil(span / max_span - 1e-12));
            const double dt_sub = span / static_cast<double>(std::max(steps, 1L));
            for (long s = 0; s < std::max(steps, 1L); ++s)
                lanczos_exp_step(h, state.amplitudes, dt_sub, options.krylov_dim);
        }
        t = target;
        out.push_back(state);
    }
    return out;
}

namespace {

void apply_sigma(const QuantumState& psi, int site, Axis axis, Eigen::VectorXcd& out) {
    const std::int64_t dim = psi.amplitudes.size();
    const std::int64_t mask = std::int64_t{1} << site;
    out.resize(dim);
    switch (axis) {
        case Axis::x:
            for (std::int64_t s = 0; s < dim; ++s) out[s ^ mask] = psi.amplitudes[s];
            break;
        case Axis::y:
            for (std::int64_t s = 0; s < dim; ++s) {
                const Complex c = (s & mask) ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
                out[s ^ mask] = c * psi.amplitudes[s];
            }
            break;
        default:
            for (std::int64_t s = 0; s < dim; ++s)
                out[s] = ((s & mask) ? -1.0 : 1.0) * psi.amplitudes[s];
            break;
    }
}

void apply_collective(const QuantumState& psi, Axis axis, Eigen::VectorXcd& out) {
    const std::int64_t dim = psi.amplitudes.size();
    out = Eigen::VectorXcd::Zero(dim);
    Eigen::VectorXcd tmp;
    for (int i = 0; i < psi.n_sites; ++i) {
        apply_sigma(psi, i, axis, tmp);
        out += tmp;
    }
}

}  // namespace

EdObservables ed_observables(const QuantumState& state, const ModelParams* params) {
    EdObservables out;
    Eigen::VectorXcd sv[3];
    apply_collective(state, Axis::x, sv[0]);
    apply_collective(state, Axis::y, sv[1]);
    apply_collective(state, Axis::z, sv[2]);
    for (int a = 0; a < 3; ++a) out.collective[a] = state.amplitudes.dot(sv[a]).real();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) out.second_moments(a, b) = sv[a].dot(sv[b]).real();
    out.second_moments = ((out.second_moments + out.second_moments.transpose()) / 2.0).eval();
    try {
        const Squeezing sq = squeezing_xi(out.collective, out.second_moments, state.n_sites);
        out.xi = sq.xi;
        out.xi_direction = sq.direction;
        out.xi_defined = true;
    } catch (const SqueezingUndefinedError&) {
        out.xi_defined = false;
    }
    if (params) {
        const SparseHamiltonian h(*params);
        Eigen::VectorXcd hv;
        h.apply(state.amplitudes, hv);
        out.energy = state.amplitudes.dot(hv).real();
    }
    return out;
}

double ed_pair_corr(const QuantumState& state, int i, Axis a, int j, Axis b) {
    Eigen::VectorXcd w1, w2;
    apply_sigma(state, j, b, w1);
    QuantumState tmp;
    tmp.amplitudes = std::move(w1);
    tmp.n_sites = state.n_sites;
    apply_sigma(tmp, i, a, w2);
    // 1/2 <{A,B}> = Re <A B> for Hermitian A, B
    return state.amplitudes.dot(w2).real();
}

}  // namespace dtwa::oracle
