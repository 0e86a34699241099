#include <doctest.h>

#include <cmath>

#include "uqq/bounds.hpp"

using namespace uqq;

TEST_CASE("Lipschitz plug-in at m = 21, p = 2") {
    CHECK(lipschitz_bound(21, 2) == 84.0);
}

TEST_CASE("best-of-K gap at isotropic sigma = 0.15, K = 3") {
    CHECK(best_of_k_gap(21, 2, 0.15, 3) == doctest::Approx(14.55).epsilon(0.011 / 14.55));
}

TEST_CASE("volume ratio at alpha = 0.95, sigma = 0.15") {
    const double vr = volume_ratio(2, 0.95, 0.15);
    CHECK(std::abs(vr - 1.44e-4) / 1.44e-4 < 0.02);
}

TEST_CASE("landscape slack matches the reference instantiation") {
    CHECK(landscape_slack(21, 2, 0.95, 0.15) == doctest::Approx(38.81).epsilon(0.001));
}

TEST_CASE("generalization plug-in with the reference constants") {
    BoundInputs in;  // defaults carry the reference values
    CHECK(generalization_gap(in) == doctest::Approx(7.07).epsilon(0.05 / 7.07));
}

TEST_CASE("noisy bound row combines the affine pieces") {
    BoundInputs in;
    const auto rows = bound_table(in);
    bool found = false;
    for (const auto& row : rows) {
        if (row.name == "noisy_lower_bound") {
            found = true;
            CHECK(row.value == doctest::Approx(36.87).epsilon(0.001));
        }
    }
    CHECK(found);
    CHECK(rows.size() == 6);
}
