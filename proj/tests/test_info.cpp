#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dmim/errors.hpp"
#include "dmim/info.hpp"
#include "dmim/linalg.hpp"
#include "dmim/rng.hpp"
#include "helpers.hpp"

using namespace dmim;
using namespace dmim::testgen;

TEST_CASE("joint distribution validation") {
    CHECK_NOTHROW(JointDistribution{{0.25, 0.25}, {0.25, 0.25}});
    CHECK_THROWS_AS(JointDistribution({{0.5, 0.5}, {0.5, 0.5}}), ValidationError);
    CHECK_THROWS_AS(JointDistribution({{1.5, -0.5}, {0.0, 0.0}}), ValidationError);
    CHECK_THROWS_AS(JointDistribution({{1.0}}), ValidationError);
    CHECK_THROWS_AS(JointDistribution(3, RealMat(2, 2, 0.25)), ValidationError);
    CHECK_THROWS_AS(JointDistribution(2, RealMat(2, 3, 0.25)), ValidationError);
}

TEST_CASE("transition matrix validation") {
    CHECK_NOTHROW(TransitionMatrix{{0.9, 0.1}, {0.2, 0.8}});
    CHECK_THROWS_AS(TransitionMatrix({{0.9, 0.2}, {0.2, 0.8}}), ValidationError);
    CHECK_THROWS_AS(TransitionMatrix({{1.1, -0.1}, {0.5, 0.5}}), ValidationError);
    CHECK_THROWS_AS(TransitionMatrix({{1.0}}), ValidationError);
    CHECK(TransitionMatrix::identity(3).is_permutation());
    CHECK_FALSE(TransitionMatrix::uniform(3).is_permutation());
}

TEST_CASE("marginal validation") {
    CHECK_NOTHROW(Marginal(2, {0.5, 0.5}));
    CHECK_THROWS_AS(Marginal(2, {0.7, 0.7}), ValidationError);
    CHECK_THROWS_AS(Marginal(2, {1.5, -0.5}), ValidationError);
    CHECK_THROWS_AS(Marginal(3, {0.5, 0.5}), ValidationError);
}

TEST_CASE("dmi on small joints") {
    CHECK(dmi(JointDistribution{{0.5, 0.0}, {0.0, 0.5}}) == 0.25);
    CHECK(dmi(JointDistribution{{0.25, 0.25}, {0.25, 0.25}}) == 0.0);
    CHECK(dmi(JointDistribution{{0.4, 0.1}, {0.1, 0.4}}) ==
          doctest::Approx(0.15).epsilon(1e-15));
    CHECK(dmi(JointDistribution{{0.0, 0.5}, {0.5, 0.0}}) == 0.25);
}

TEST_CASE("dmi is symmetric bit for bit") {
    Rng rng(22001);
    for (int iter = 0; iter < 2000; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 5);
        JointDistribution j = random_joint(rng, c);
        CHECK(dmi(j) == dmi(j.transposed()));
    }
}

TEST_CASE("dmi is invariant under relabeling bit for bit") {
    Rng rng(22002);
    for (int iter = 0; iter < 1000; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 4);
        JointDistribution j = random_joint(rng, c);
        TransitionMatrix p(c, random_permutation_matrix(rng, c));
        TransitionMatrix q(c, random_permutation_matrix(rng, c));
        CHECK(dmi(garble(j, p)) == dmi(j));
        CHECK(dmi(pair_joint_under_strategies(j, p, q)) == dmi(j));
    }
}

TEST_CASE("dmi stays within its range") {
    Rng rng(22003);
    for (int iter = 0; iter < 10000; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 5);
        double v = dmi(random_joint(rng, c));
        CHECK(v >= 0.0);
        CHECK(v <= std::pow(1.0 / c, c) + 1e-12);
    }
}

TEST_CASE("garbling scales dmi by the map determinant") {
    Rng rng(22004);
    for (int iter = 0; iter < 2000; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 5);
        JointDistribution j = random_joint(rng, c);
        TransitionMatrix k = random_transition(rng, c);
        double lhs = dmi(garble(j, k));
        double rhs = dmi(j) * std::fabs(det_real(k.k()));
        CHECK(std::fabs(lhs - rhs) <= 1e-9);
    }
}

TEST_CASE("garbling never increases dmi") {
    Rng rng(22005);
    int strict_checked = 0;
    for (int iter = 0; iter < 10000; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 5);
        JointDistribution j = random_joint(rng, c);
        TransitionMatrix k = random_transition(rng, c);
        double before = dmi(j);
        double after = dmi(garble(j, k));
        CHECK(after <= before + 1e-12);
        if (before > 1e-6 && !k.is_permutation() && std::fabs(det_real(k.k())) < 1.0 - 1e-6) {
            CHECK(before - after > 1e-9);
            ++strict_checked;
        }
    }
    CHECK(strict_checked > 1000);
}

TEST_CASE("identity garbling is a no-op") {
    Rng rng(22006);
    for (int iter = 0; iter < 200; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 5);
        JointDistribution j = random_joint(rng, c);
        CHECK(garble(j, TransitionMatrix::identity(c)).p() == j.p());
        CHECK(pair_joint_under_strategies(j, TransitionMatrix::identity(c),
                                          TransitionMatrix::identity(c))
                  .p() == j.p());
    }
}

TEST_CASE("uniform garbling destroys all information") {
    Rng rng(22007);
    for (int iter = 0; iter < 200; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 5);
        JointDistribution j = random_joint(rng, c);
        CHECK(dmi(garble(j, TransitionMatrix::uniform(c))) == 0.0);
    }
}

TEST_CASE("garble worked example") {
    JointDistribution j{{0.4, 0.1}, {0.1, 0.4}};
    TransitionMatrix k{{0.9, 0.1}, {0.2, 0.8}};
    JointDistribution out = garble(j, k);
    CHECK(out(0, 0) == doctest::Approx(0.38).epsilon(1e-12));
    CHECK(out(0, 1) == doctest::Approx(0.17).epsilon(1e-12));
    CHECK(out(1, 0) == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(out(1, 1) == doctest::Approx(0.33).epsilon(1e-12));
    CHECK(dmi(out) == doctest::Approx(0.105).epsilon(1e-12));
}

TEST_CASE("garbling preserves the column marginal") {
    Rng rng(22008);
    for (int iter = 0; iter < 500; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 5);
        JointDistribution j = random_joint(rng, c);
        TransitionMatrix k = random_transition(rng, c);
        JointDistribution out = garble(j, k);
        for (int y = 0; y < c; ++y) {
            double before = 0.0, after = 0.0;
            for (int x = 0; x < c; ++x) {
                before += j(x, y);
                after += out(x, y);
            }
            CHECK(std::fabs(before - after) <= 1e-12);
        }
    }
}

TEST_CASE("one-sided strategies reduce to garbling") {
    Rng rng(22009);
    for (int iter = 0; iter < 300; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 4);
        JointDistribution j = random_joint(rng, c);
        TransitionMatrix k = random_transition(rng, c);
        JointDistribution via_pair =
            pair_joint_under_strategies(j, k, TransitionMatrix::identity(c));
        JointDistribution via_garble = garble(j, k);
        for (int a = 0; a < c; ++a)
            for (int b = 0; b < c; ++b)
                CHECK(via_pair(a, b) == doctest::Approx(via_garble(a, b)).epsilon(1e-15));
    }
}

TEST_CASE("strategy pushforward stays a distribution") {
    Rng rng(22010);
    for (int iter = 0; iter < 300; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 4);
        JointDistribution j = random_joint(rng, c);
        JointDistribution out = pair_joint_under_strategies(j, random_transition(rng, c),
                                                            random_transition(rng, c));
        double total = 0.0;
        for (int a = 0; a < c; ++a)
            for (int b = 0; b < c; ++b) total += out(a, b);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("informativeness classification") {
    CHECK(is_informative_pair(JointDistribution{{0.4, 0.1}, {0.1, 0.4}}));
    CHECK_FALSE(is_informative_pair(JointDistribution{{0.25, 0.25}, {0.25, 0.25}}));
    JointDistribution near_flat{{0.2500001, 0.25}, {0.25, 0.2499999}};
    CHECK_FALSE(is_informative_pair(near_flat, 1e-3));
}

TEST_CASE("composition of transitions is a transition") {
    Rng rng(22011);
    for (int iter = 0; iter < 300; ++iter) {
        int c = 2 + static_cast<int>(rng.next_u64() % 5);
        TransitionMatrix a = random_transition(rng, c);
        TransitionMatrix b = random_transition(rng, c);
        TransitionMatrix ab = compose(a, b);
        for (int x = 0; x < c; ++x) {
            double row = 0.0;
            for (int z = 0; z < c; ++z) row += ab(x, z);
            CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
        }
        // composing then garbling equals garbling twice
        JointDistribution j = random_joint(rng, c);
        JointDistribution two_step = garble(garble(j, a), b);
        JointDistribution one_step = garble(j, ab);
        for (int x = 0; x < c; ++x)
            for (int y = 0; y < c; ++y)
                CHECK(two_step(x, y) == doctest::Approx(one_step(x, y)).epsilon(1e-12));
    }
}
