#pragma once

// Discrete single-qubit Wigner machinery: the four Wootters phase-point
// vectors, quasiprobability weights for product states, and sampling /
// exhaustive enumeration of initial classical spin configurations.
//
// Sampling convention: a site polarized along +a has its a component pinned
// to +1 while the two transverse components are drawn as independent fair
// +-1 coins (four corners of the +-1 cube, weight 1/4 each). This is the
// even mixture of the two Wootters tetrahedra and reproduces every single-site
// moment of the quantum state; it is the distribution whose exhaustive sum is
// tested against the analytic Ising limits.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dtwa/errors.hpp"
#include "dtwa/rng.hpp"

namespace dtwa {

// r_(0,0), r_(0,1), r_(1,0), r_(1,1): the Wootters set. Pairwise dot products
// are -1, each squared norm is 3, and the four vectors sum to zero.
const std::array<Eigen::Vector3d, 4>& phase_point_vectors();

// Labels in the fixed order used throughout: (0,0), (0,1), (1,0), (1,1).
std::array<std::string, 4> phase_point_labels();

// w_alpha = (1 + n.r_alpha)/4 for unit n; sums to 1 for any unit vector.
// No nonnegativity gate: exposed for tests and diagnostics.
std::array<double, 4> wigner_weights_unchecked(const Eigen::Vector3d& n_hat);

// As above, but throws UnsupportedStateError if any weight is negative
// beyond tolerance (the state cannot be sampled as a probability).
std::array<double, 4> wigner_weights(const Eigen::Vector3d& n_hat);

enum class Axis : int { x = 0, y = 1, z = 2 };

struct Polarization {
    Axis axis = Axis::x;
    int sign = +1;  // +1 or -1

    Eigen::Vector3d direction() const;
    bool operator==(const Polarization&) const = default;
};

// "+x", "-z", ... (also accepts "x" as "+x")
Polarization parse_axis(const std::string& text);
std::string to_string(const Polarization& p);

// Nearest coordinate axis of a unit vector, within tolerance; throws
// UnsupportedStateError otherwise (negative quasiprobabilities).
Polarization axis_from_direction(const Eigen::Vector3d& n_hat, double tol = 1e-9);

// Per-site product initial state. Each site may carry its own axis.
class ProductState {
public:
    ProductState(int n_sites, Polarization uniform_axis);
    explicit ProductState(std::vector<Polarization> per_site);

    int n_sites() const { return static_cast<int>(sites_.size()); }
    const Polarization& site(int i) const { return sites_[static_cast<std::size_t>(i)]; }
    const std::vector<Polarization>& sites() const { return sites_; }

    // Wootters weights of site i over the canonical tetrahedron
    std::array<double, 4> tetrahedron_weights(int i) const;

    bool all_transverse_to_z() const;  // every site polarized along +-x or +-y

private:
    std::vector<Polarization> sites_;
};

// Classical trajectory state, structure-of-arrays: all s^x, then s^y, then s^z.
struct SpinConfiguration {
    Eigen::VectorXd x, y, z;

    SpinConfiguration() = default;
    explicit SpinConfiguration(int n)
        : x(Eigen::VectorXd::Zero(n)), y(Eigen::VectorXd::Zero(n)), z(Eigen::VectorXd::Zero(n)) {}

    int n_sites() const { return static_cast<int>(x.size()); }
    Eigen::Vector3d site(int i) const { return {x[i], y[i], z[i]}; }
    double norm2(int i) const { return x[i] * x[i] + y[i] * y[i] + z[i] * z[i]; }
};

// A batch of trajectories evolved together; column c is one trajectory.
// Keeping trajectories in columns turns the mean-field sums into dense
// matrix-matrix products.
struct SpinBatch {
    Eigen::MatrixXd x, y, z;

    SpinBatch() = default;
    SpinBatch(int n_sites, int n_traj)
        : x(Eigen::MatrixXd::Zero(n_sites, n_traj)),
          y(Eigen::MatrixXd::Zero(n_sites, n_traj)),
          z(Eigen::MatrixXd::Zero(n_sites, n_traj)) {}

    int n_sites() const { return static_cast<int>(x.rows()); }
    int n_traj() const { return static_cast<int>(x.cols()); }

    void set_column(int c, const SpinConfiguration& s) {
        x.col(c) = s.x;
        y.col(c) = s.y;
        z.col(c) = s.z;
    }
    SpinConfiguration column(int c) const {
        SpinConfiguration s(n_sites());
        s.x = x.col(c);
        s.y = y.col(c);
        s.z = z.col(c);
        return s;
    }
    bool all_finite() const {
        return x.allFinite() && y.allFinite() && z.allFinite();
    }
};

// One phase-space draw: pinned component from the axis sign, independent
// fair +-1 transverse components.
SpinConfiguration sample_initial(const ProductState& state, Xoshiro256pp& rng);
void sample_initial_column(const ProductState& state, Xoshiro256pp& rng, SpinBatch& batch,
                           int column);

// Exhaustive weighted enumeration of the sampling support: 4 corners per
// site, uniform weight 4^-N. Configurations are indexedable so enumeration
// can be batched and parallelized deterministically.
class InitialEnumeration {
public:
    // Throws EnumerationCapError when 4^N exceeds `cap`.
    InitialEnumeration(const ProductState& state, std::uint64_t cap);

    std::uint64_t size() const { return size_; }
    double weight() const { return weight_; }  // identical for every configuration

    void configuration(std::uint64_t index, SpinConfiguration& out) const;
    void fill_column(std::uint64_t index, SpinBatch& batch, int column) const;

private:
    ProductState state_;
    std::uint64_t size_ = 0;
    double weight_ = 0.0;
};

}  // namespace dtwa
