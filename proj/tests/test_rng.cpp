#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <unordered_set>

#include "dtwa/rng.hpp"

using namespace dtwa;

TEST_CASE("streams are reproducible") {
    auto a = make_stream(42, 0, 7, StreamKind::trajectory);
    auto b = make_stream(42, 0, 7, StreamKind::trajectory);
    for (int k = 0; k < 100; ++k) CHECK(a.next() == b.next());
}

TEST_CASE("distinct indices give distinct streams") {
    std::unordered_set<std::uint64_t> first_outputs;
    for (std::uint64_t traj = 0; traj < 10000; ++traj) {
        auto rng = make_stream(42, 0, traj, StreamKind::trajectory);
        first_outputs.insert(rng.next());
    }
    CHECK(first_outputs.size() == 10000);
    // the same index in a different context is a different stream
    auto t = make_stream(42, 0, 3, StreamKind::trajectory);
    auto d = make_stream(42, 0, 3, StreamKind::dilution);
    CHECK(t.next() != d.next());
    // and a different realization decouples too
    auto r0 = make_stream(42, 0, 3, StreamKind::trajectory);
    auto r1 = make_stream(42, 1, 3, StreamKind::trajectory);
    CHECK(r0.next() != r1.next());
}

TEST_CASE("uniform moments") {
    auto rng = make_stream(7, 0, 0, StreamKind::trajectory);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum_sq += u * u;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 0.005);
    CHECK(std::abs(var - 1.0 / 12.0) < 0.005);
}

TEST_CASE("normal moments") {
    auto rng = make_stream(11, 0, 0, StreamKind::trajectory);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0, sum_4 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double g = rng.normal();
        sum += g;
        sum_sq += g * g;
        sum_4 += g * g * g * g;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
    CHECK(std::abs(sum_4 / n - 3.0) < 0.12);
}

TEST_CASE("sign is a fair coin") {
    auto rng = make_stream(13, 0, 0, StreamKind::trajectory);
    double sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const double s = rng.sign();
        CHECK((s == 1.0 || s == -1.0));
        sum += s;
    }
    CHECK(std::abs(sum / n) < 0.02);
}

TEST_CASE("bounded draw stays in range") {
    auto rng = make_stream(17, 0, 0, StreamKind::trajectory);
    for (int k = 0; k < 1000; ++k) CHECK(rng.below(7) < 7);
}
