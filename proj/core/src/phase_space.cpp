#include "dtwa/phase_space.hpp"

#include <cmath>
#include <sstream>

namespace dtwa {

const std::array<Eigen::Vector3d, 4>& phase_point_vectors() {
    static const std::array<Eigen::Vector3d, 4> r = {
        Eigen::Vector3d{1.0, 1.0, 1.0},    // (0,0)
        Eigen::Vector3d{-1.0, -1.0, 1.0},  // (0,1)
        Eigen::Vector3d{1.0, -1.0, -1.0},  // (1,0)
        Eigen::Vector3d{-1.0, 1.0, -1.0},  // (1,1)
    };
    return r;
}

std::array<std::string, 4> phase_point_labels() {
    return {"(0,0)", "(0,1)", "(1,0)", "(1,1)"};
}

std::array<double, 4> wigner_weights_unchecked(const Eigen::Vector3d& n_hat) {
    const auto& r = phase_point_vectors();
    std::array<double, 4> w{};
    for (int a = 0; a < 4; ++a) w[a] = (1.0 + n_hat.dot(r[a])) / 4.0;
    return w;
}

std::array<double, 4> wigner_weights(const Eigen::Vector3d& n_hat) {
    auto w = wigner_weights_unchecked(n_hat);
    const auto labels = phase_point_labels();
    for (int a = 0; a < 4; ++a) {
        if (w[a] < -1e-12) {
            std::ostringstream msg;
            msg << "state with direction (" << n_hat.x() << ", " << n_hat.y() << ", "
                << n_hat.z() << ") has negative quasiprobability " << w[a] << " at phase point "
                << labels[a] << "; only coordinate-axis polarized states can be sampled";
            throw UnsupportedStateError(msg.str());
        }
        if (w[a] < 0.0) w[a] = 0.0;
    }
    return w;
}

Eigen::Vector3d Polarization::direction() const {
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    n[static_cast<int>(axis)] = static_cast<double>(sign);
    return n;
}

Polarization parse_axis(const std::string& text) {
    std::string t = text;
    int sign = +1;
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
        sign = t[0] == '-' ? -1 : +1;
        t = t.substr(1);
    }
    if (t == "x") return {Axis::x, sign};
    if (t == "y") return {Axis::y, sign};
    if (t == "z") return {Axis::z, sign};
    throw ConfigError("cannot parse axis '" + text + "' (expected one of +x -x +y -y +z -z)");
}

std::string to_string(const Polarization& p) {
    static const char* names[3] = {"x", "y", "z"};
    return std::string(p.sign < 0 ? "-" : "+") + names[static_cast<int>(p.axis)];
}

Polarization axis_from_direction(const Eigen::Vector3d& n_hat, double tol) {
    if (std::abs(n_hat.norm() - 1.0) > 1e-9)
        throw UnsupportedStateError("initial-state direction must be a unit vector");
    int best = 0;
    n_hat.cwiseAbs().maxCoeff(&best);
    const int sign = n_hat[best] >= 0.0 ? +1 : -1;
    Eigen::Vector3d axis = Eigen::Vector3d::Zero();
    axis[best] = static_cast<double>(sign);
    if ((n_hat - axis).norm() > tol) {
        std::ostringstream msg;
        msg << "direction (" << n_hat.x() << ", " << n_hat.y() << ", " << n_hat.z()
            << ") is not a coordinate axis; its discrete Wigner weights are negative and "
               "cannot be sampled";
        throw UnsupportedStateError(msg.str());
    }
    return {static_cast<Axis>(best), sign};
}

ProductState::ProductState(int n_sites, Polarization uniform_axis) {
    if (n_sites < 1) throw ConfigError("product state needs at least one site");
    sites_.assign(static_cast<std::size_t>(n_sites), uniform_axis);
}

ProductState::ProductState(std::vector<Polarization> per_site) : sites_(std::move(per_site)) {
    if (sites_.empty()) throw ConfigError("product state needs at least one site");
}

std::array<double, 4> ProductState::tetrahedron_weights(int i) const {
    return wigner_weights(site(i).direction());
}

bool ProductState::all_transverse_to_z() const {
    for (const auto& p : sites_)
        if (p.axis == Axis::z) return false;
    return true;
}

namespace {

// corner k of the sampling support for a site polarized along `p`:
// pinned component p.sign, transverse components from the two bits of k
inline Eigen::Vector3d support_corner(const Polarization& p, unsigned k) {
    const double t0 = (k & 1u) ? 1.0 : -1.0;
    const double t1 = (k & 2u) ? 1.0 : -1.0;
    Eigen::Vector3d s;
    switch (p.axis) {
        case Axis::x:
            s = {static_cast<double>(p.sign), t0, t1};
            break;
        case Axis::y:
            s = {t0, static_cast<double>(p.sign), t1};
            break;
        default:
            s = {t0, t1, static_cast<double>(p.sign)};
            break;
    }
    return s;
}

}  // namespace

SpinConfiguration sample_initial(const ProductState& state, Xoshiro256pp& rng) {
    SpinConfiguration s(state.n_sites());
    for (int i = 0; i < state.n_sites(); ++i) {
        const auto& p = state.site(i);
        const double t0 = rng.sign();
        const double t1 = rng.sign();
        Eigen::Vector3d v;
        switch (p.axis) {
            case Axis::x:
                v = {static_cast<double>(p.sign), t0, t1};
                break;
            case Axis::y:
                v = {t0, static_cast<double>(p.sign), t1};
                break;
            default:
                v = {t0, t1, static_cast<double>(p.sign)};
                break;
        }
        s.x[i] = v.x();
        s.y[i] = v.y();
        s.z[i] = v.z();
    }
    return s;
}

void sample_initial_column(const ProductState& state, Xoshiro256pp& rng, SpinBatch& batch,
                           int column) {
    const SpinConfiguration s = sample_initial(state, rng);
    batch.set_column(column, s);
}

InitialEnumeration::InitialEnumeration(const ProductState& state, std::uint64_t cap)
    : state_(state) {
    const int n = state.n_sites();
    if (n > 31) {
        std::ostringstream msg;
        msg << "enumeration of 4^" << n << " configurations overflows; use sampling";
        throw EnumerationCapError(msg.str());
    }
    size_ = std::uint64_t{1} << (2 * n);
    if (size_ > cap) {
        std::ostringstream msg;
        msg << "enumeration support 4^" << n << " = " << size_ << " exceeds cap " << cap
            << "; raise the cap or use Monte Carlo sampling";
        throw EnumerationCapError(msg.str());
    }
    weight_ = std::pow(0.25, n);
}

void InitialEnumeration::configuration(std::uint64_t index, SpinConfiguration& out) const {
    const int n = state_.n_sites();
    if (out.n_sites() != n) out = SpinConfiguration(n);
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<unsigned>((index >> (2 * i)) & 3u);
        const Eigen::Vector3d v = support_corner(state_.site(i), k);
        out.x[i] = v.x();
        out.y[i] = v.y();
        out.z[i] = v.z();
    }
}

void InitialEnumeration::fill_column(std::uint64_t index, SpinBatch& batch, int column) const {
    const int n = state_.n_sites();
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<unsigned>((index >> (2 * i)) & 3u);
        const Eigen::Vector3d v = support_corner(state_.site(i), k);
        batch.x(i, column) = v.x();
        batch.y(i, column) = v.y();
        batch.z(i, column) = v.z();
    }
}

}  // namespace dtwa
