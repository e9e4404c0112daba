#pragma once

// Site geometries on simple cubic lattices (1D/2D/3D slabs, open boundaries,
// optional random dilution) and the coupling matrices J_ij = J f(theta)/r^alpha
// built from them.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dtwa/errors.hpp"
#include "dtwa/rng.hpp"

namespace dtwa {

struct LatticeSpec {
    std::array<int, 3> extents{1, 1, 1};           // Lx, Ly, Lz, lattice spacing 1
    double filling = 1.0;                          // n_bar = N/M in (0, 1]
    Eigen::Vector3d quantization_axis{0.0, 0.0, 1.0};

    int n_cells() const { return extents[0] * extents[1] * extents[2]; }
    // number of occupied sites, round-to-nearest of filling * M
    int n_sites() const;
};

// Throws ConfigError on non-positive extents, filling outside (0,1],
// N < 2, or a zero quantization axis.
void validate(const LatticeSpec& spec);

// Occupied site coordinates in row-major order (x fastest, then y, then z).
// filling == 1 is deterministic; filling < 1 draws N sites uniformly without
// replacement using `rng`, then sorts them back into row-major order.
std::vector<Eigen::Vector3d> build_sites(const LatticeSpec& spec, Xoshiro256pp& rng);

enum class CouplingMode { isotropic, dipolar };

CouplingMode parse_coupling_mode(const std::string& name);
std::string to_string(CouplingMode mode);

// Symmetric N x N interaction table with zero diagonal, in units of energy
// (hbar = 1). Construction validates both invariants.
class CouplingMatrix {
public:
    explicit CouplingMatrix(Eigen::MatrixXd values);
    static CouplingMatrix zero(int n_spins);

    int n_spins() const { return static_cast<int>(values_.rows()); }
    const Eigen::MatrixXd& values() const { return values_; }
    double operator()(int i, int j) const { return values_(i, j); }
    bool is_zero() const { return zero_; }

    CouplingMatrix scaled(double factor) const;

private:
    Eigen::MatrixXd values_;
    bool zero_ = false;
};

// isotropic: J / r^alpha.  dipolar: J (1 - 3 cos^2 theta) / r^alpha, theta the
// angle between r_ij and the quantization axis.  alpha = 0 means all-to-all:
// the distance factor is 1 (the angular factor still applies in dipolar mode).
// No Kac normalization is applied. Throws on coincident sites.
CouplingMatrix build_couplings(const std::vector<Eigen::Vector3d>& sites, double j,
                               double alpha, CouplingMode mode,
                               const Eigen::Vector3d& quantization_axis);

// "x,y,z" header plus one row per site
void write_sites_csv(std::ostream& out, const std::vector<Eigen::Vector3d>& sites);

}  // namespace dtwa
