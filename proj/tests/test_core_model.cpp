#include "doctest.h"

#include <limits>

#include "changeauc/types.hpp"

using namespace changeauc;

TEST_CASE("split plan follows the floor arithmetic of the three-way split") {
    SplitPlan plan = make_split_plan(1000, 0.15, 0.05);
    CHECK(plan.m == 150);
    CHECK(plan.d0_lo == 1);
    CHECK(plan.d0_hi == 150);
    CHECK(plan.dv_lo == 151);
    CHECK(plan.dv_hi == 850);
    CHECK(plan.d1_lo == 851);
    CHECK(plan.d1_hi == 1000);
    CHECK(plan.gamma == doctest::Approx(0.20).epsilon(1e-15));
    CHECK(plan.dv_len() == 700);
}

TEST_CASE("candidate grid spans [floor(T*gamma), floor(T*(1-gamma))]") {
    SplitPlan plan = make_split_plan(1000, 0.15, 0.05);
    CandidateGrid grid = candidate_grid(plan);
    CHECK(grid.lo == 200);
    CHECK(grid.hi == 800);
    CHECK(grid.size() == 601);

    SplitPlan plan100 = make_split_plan(100, 0.15, 0.05);
    CandidateGrid grid100 = candidate_grid(plan100);
    CHECK(grid100.lo == 20);
    CHECK(grid100.hi == 80);
}

TEST_CASE("trim preconditions are rejected") {
    CHECK_THROWS_AS(make_split_plan(21, 0.49, 0.02), Error);  // eta >= 1/2 - epsilon
    CHECK_THROWS_AS(make_split_plan(19, 0.15, 0.05), Error);  // below the T floor
    CHECK_THROWS_AS(make_split_plan(100, 0.0, 0.05), Error);
    CHECK_THROWS_AS(make_split_plan(100, 0.15, 0.0), Error);
    try {
        make_split_plan(21, 0.49, 0.02);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_trim);
    }
}

TEST_CASE("singleton grid is allowed") {
    // T=25, gamma=0.49: floor(12.25)=12 = floor(12.75) -> single candidate.
    SplitPlan plan = make_split_plan(25, 0.40, 0.09);
    CandidateGrid grid = candidate_grid(plan);
    CHECK(grid.lo == 12);
    CHECK(grid.hi == 12);
    CHECK(grid.size() == 1);
}

TEST_CASE("partition covers every index exactly once and grid stays interior") {
    for (long T : {20L, 21L, 25L, 37L, 100L, 211L, 500L, 1000L}) {
        SplitPlan plan = make_split_plan(T, 0.15, 0.05);
        CHECK(plan.d0_hi - plan.d0_lo + 1 == plan.m);
        CHECK(plan.d1_hi - plan.d1_lo + 1 == plan.m);
        CHECK(plan.d0_hi + 1 == plan.dv_lo);
        CHECK(plan.dv_hi + 1 == plan.d1_lo);
        CHECK(plan.d1_hi == T);

        CandidateGrid grid = candidate_grid(plan);
        CHECK(grid.lo > plan.m);
        CHECK(grid.hi < T - plan.m);
    }
}

TEST_CASE("series storage is row-major with 1-based accessors") {
    Series s(3, 2);
    s.at(1, 1) = 1.0;
    s.at(1, 2) = 2.0;
    s.at(3, 2) = 6.0;
    CHECK(s.row(1)[0] == 1.0);
    CHECK(s.row(1)[1] == 2.0);
    CHECK(s.row(3)[1] == 6.0);
    CHECK_NOTHROW(s.validate_finite());
    s.at(2, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(s.validate_finite(), Error);
}
