#include "dtwa/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace dtwa {

int LatticeSpec::n_sites() const {
    return static_cast<int>(std::llround(filling * static_cast<double>(n_cells())));
}

void validate(const LatticeSpec& spec) {
    for (int e : spec.extents) {
        if (e < 1) throw ConfigError("lattice extents must be positive");
    }
    if (spec.n_cells() < 2) throw ConfigError("lattice must have at least 2 cells");
    if (!(spec.filling > 0.0) || spec.filling > 1.0)
        throw ConfigError("filling must lie in (0, 1]");
    if (spec.n_sites() < 2) {
        std::ostringstream msg;
        msg << "filling " << spec.filling << " on " << spec.n_cells()
            << " cells leaves fewer than 2 spins";
        throw ConfigError(msg.str());
    }
    if (spec.quantization_axis.norm() < 1e-12)
        throw ConfigError("quantization axis must be a nonzero vector");
}

std::vector<Eigen::Vector3d> build_sites(const LatticeSpec& spec, Xoshiro256pp& rng) {
    validate(spec);
    const int m = spec.n_cells();
    const int n = spec.n_sites();

    std::vector<int> chosen;
    if (n == m) {
        chosen.resize(m);
        std::iota(chosen.begin(), chosen.end(), 0);
    } else {
        // partial Fisher-Yates over linear cell indices, then restore
        // row-major order so site indexing is stable under dilution
        std::vector<int> cells(m);
        std::iota(cells.begin(), cells.end(), 0);
        for (int i = 0; i < n; ++i) {
            const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - i)));
            std::swap(cells[i], cells[j]);
        }
        chosen.assign(cells.begin(), cells.begin() + n);
        std::sort(chosen.begin(), chosen.end());
    }

    const int lx = spec.extents[0];
    const int ly = spec.extents[1];
    std::vector<Eigen::Vector3d> sites;
    sites.reserve(chosen.size());
    for (int idx : chosen) {
        const int x = idx % lx;
        const int y = (idx / lx) % ly;
        const int z = idx / (lx * ly);
        sites.emplace_back(static_cast<double>(x), static_cast<double>(y),
                           static_cast<double>(z));
    }
    return sites;
}

CouplingMode parse_coupling_mode(const std::string& name) {
    if (name == "isotropic") return CouplingMode::isotropic;
    if (name == "dipolar") return CouplingMode::dipolar;
    throw ConfigError("unknown coupling mode '" + name + "' (isotropic|dipolar)");
}

std::string to_string(CouplingMode mode) {
    return mode == CouplingMode::isotropic ? "isotropic" : "dipolar";
}

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols())
        throw ConfigError("coupling matrix must be square");
    if (values_.rows() < 1) throw ConfigError("coupling matrix must be nonempty");
    const double scale = std::max(1.0, values_.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        if (values_(i, i) != 0.0)
            throw ConfigError("coupling matrix diagonal must vanish");
        for (Eigen::Index j = i + 1; j < values_.cols(); ++j) {
            if (std::abs(values_(i, j) - values_(j, i)) > 1e-12 * scale)
                throw ConfigError("coupling matrix must be symmetric");
        }
    }
    // symmetrize exactly so downstream identities (total S^z conservation)
    // hold to roundoff
    values_ = ((values_ + values_.transpose()) / 2.0).eval();
    zero_ = values_.cwiseAbs().maxCoeff() == 0.0;
}

CouplingMatrix CouplingMatrix::zero(int n_spins) {
    return CouplingMatrix(Eigen::MatrixXd::Zero(n_spins, n_spins));
}

CouplingMatrix CouplingMatrix::scaled(double factor) const {
    return CouplingMatrix(values_ * factor);
}

CouplingMatrix build_couplings(const std::vector<Eigen::Vector3d>& sites, double j,
                               double alpha, CouplingMode mode,
                               const Eigen::Vector3d& quantization_axis) {
    const auto n = static_cast<Eigen::Index>(sites.size());
    if (n < 2) throw ConfigError("need at least 2 sites to build couplings");
    if (alpha < 0.0) throw ConfigError("decay exponent alpha must be >= 0");
    const Eigen::Vector3d axis = quantization_axis.normalized();

    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = i + 1; k < n; ++k) {
            const Eigen::Vector3d r = sites[k] - sites[i];
            const double dist = r.norm();
            if (dist < 1e-12) {
                std::ostringstream msg;
                msg << "sites " << i << " and " << k << " coincide";
                throw ConfigError(msg.str());
            }
            double v = j;
            if (mode == CouplingMode::dipolar) {
                const double cos_theta = r.dot(axis) / dist;
                v *= 1.0 - 3.0 * cos_theta * cos_theta;
            }
            if (alpha != 0.0) v /= std::pow(dist, alpha);
            values(i, k) = v;
            values(k, i) = v;
        }
    }
    return CouplingMatrix(std::move(values));
}

void write_sites_csv(std::ostream& out, const std::vector<Eigen::Vector3d>& sites) {
    out << "x,y,z\n";
    for (const auto& s : sites)
        out << s.x() << "," << s.y() << "," << s.z() << "\n";
}

}  // namespace dtwa
