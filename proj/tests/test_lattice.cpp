#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "dtwa/lattice.hpp"

using namespace dtwa;

namespace {

LatticeSpec spec(int lx, int ly, int lz, double filling = 1.0) {
    LatticeSpec s;
    s.extents = {lx, ly, lz};
    s.filling = filling;
    return s;
}

Xoshiro256pp rng(std::uint64_t seed = 1) {
    return make_stream(seed, 0, 0, StreamKind::dilution);
}

}  // namespace

TEST_CASE("full filling is deterministic row-major") {
    auto r = rng();
    const auto line = build_sites(spec(4, 1, 1), r);
    REQUIRE(line.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(line[i].x() == i);
        CHECK(line[i].y() == 0.0);
        CHECK(line[i].z() == 0.0);
    }

    const auto square = build_sites(spec(2, 2, 1), r);
    REQUIRE(square.size() == 4);
    CHECK(square[0] == Eigen::Vector3d(0, 0, 0));
    CHECK(square[1] == Eigen::Vector3d(1, 0, 0));
    CHECK(square[2] == Eigen::Vector3d(0, 1, 0));
    CHECK(square[3] == Eigen::Vector3d(1, 1, 0));
}

TEST_CASE("dilution draws distinct sites reproducibly") {
    auto r1 = rng(123);
    const auto a = build_sites(spec(100, 1, 1, 0.5), r1);
    CHECK(a.size() == 50);
    std::set<double> xs;
    for (const auto& s : a) xs.insert(s.x());
    CHECK(xs.size() == 50);  // all distinct

    auto r2 = rng(123);
    const auto b = build_sites(spec(100, 1, 1, 0.5), r2);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);

    auto r3 = rng(124);
    const auto c = build_sites(spec(100, 1, 1, 0.5), r3);
    bool identical = true;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] != c[k]) identical = false;
    CHECK_FALSE(identical);
}

TEST_CASE("configurations with fewer than two spins are rejected") {
    auto r = rng();
    CHECK_THROWS_AS(build_sites(spec(2, 1, 1, 0.5), r), ConfigError);  // rounds to N=1
    CHECK_THROWS_AS(validate(spec(0, 1, 1)), ConfigError);
    CHECK_THROWS_AS(validate(spec(1, 1, 1)), ConfigError);
    CHECK_THROWS_AS(validate(spec(4, 1, 1, 0.0)), ConfigError);
    CHECK_THROWS_AS(validate(spec(4, 1, 1, 1.5)), ConfigError);
}

TEST_CASE("chain perpendicular to the axis: dipolar equals isotropic") {
    auto r = rng();
    const auto sites = build_sites(spec(6, 1, 1), r);
    const Eigen::Vector3d axis(0, 0, 1);
    for (double alpha : {0.0, 1.0, 3.0}) {
        const auto iso = build_couplings(sites, 1.0, alpha, CouplingMode::isotropic, axis);
        const auto dip = build_couplings(sites, 1.0, alpha, CouplingMode::dipolar, axis);
        CHECK((iso.values() - dip.values()).cwiseAbs().maxCoeff() == 0.0);
    }
    // and the dipolar chain at alpha=3 has J, J/8, J/27 down the line
    const auto dip = build_couplings(sites, 2.0, 3.0, CouplingMode::dipolar, axis);
    CHECK(dip(0, 1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(dip(0, 2) == doctest::Approx(2.0 / 8.0).epsilon(1e-14));
    CHECK(dip(0, 3) == doctest::Approx(2.0 / 27.0).epsilon(1e-14));
}

TEST_CASE("alpha = 0 is all-to-all") {
    auto r = rng();
    const auto sites = build_sites(spec(5, 1, 1), r);
    const auto j = build_couplings(sites, 1.5, 0.0, CouplingMode::isotropic,
                                   Eigen::Vector3d(0, 0, 1));
    for (int i = 0; i < 5; ++i)
        for (int k = 0; k < 5; ++k)
            CHECK(j(i, k) == (i == k ? 0.0 : 1.5));
}

TEST_CASE("diagonal couplings follow the distance") {
    const std::vector<Eigen::Vector3d> sites = {{0, 0, 0}, {1, 1, 0}};
    const auto j =
        build_couplings(sites, 1.0, 1.0, CouplingMode::isotropic, Eigen::Vector3d(0, 0, 1));
    CHECK(j(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("dipolar angular factor along the axis") {
    // two sites stacked along z: cos(theta) = 1, so the factor is -2
    const std::vector<Eigen::Vector3d> sites = {{0, 0, 0}, {0, 0, 1}};
    const auto j =
        build_couplings(sites, 1.0, 3.0, CouplingMode::dipolar, Eigen::Vector3d(0, 0, 1));
    CHECK(j(0, 1) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("coupling matrices are symmetric with zero diagonal for random site sets") {
    auto r = rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        LatticeSpec s = spec(4, 3, 2, 0.5 + 0.5 * r.uniform());
        if (s.n_sites() < 2) continue;
        auto sites = build_sites(s, r);
        const double alpha = 3.0 * r.uniform();
        const auto mode = r.sign() > 0 ? CouplingMode::dipolar : CouplingMode::isotropic;
        const auto j = build_couplings(sites, 1.0, alpha, mode, Eigen::Vector3d(0, 0, 1));
        CHECK((j.values() - j.values().transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(j.values().diagonal().cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("coincident sites are rejected") {
    const std::vector<Eigen::Vector3d> sites = {{0, 0, 0}, {0, 0, 0}};
    CHECK_THROWS_AS(
        build_couplings(sites, 1.0, 1.0, CouplingMode::isotropic, Eigen::Vector3d(0, 0, 1)),
        ConfigError);
}

TEST_CASE("coupling matrix invariants are enforced") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0.0, 1.0, 2.0, 0.0;  // not symmetric
    CHECK_THROWS_AS(CouplingMatrix{bad}, ConfigError);
    bad << 1.0, 0.5, 0.5, 0.0;  // nonzero diagonal
    CHECK_THROWS_AS(CouplingMatrix{bad}, ConfigError);
    CHECK(CouplingMatrix::zero(3).is_zero());
}

TEST_CASE("site CSV export") {
    auto r = rng();
    const auto sites = build_sites(spec(2, 1, 1), r);
    std::ostringstream out;
    write_sites_csv(out, sites);
    CHECK(out.str() == "x,y,z\n0,0,0\n1,0,0\n");
}
