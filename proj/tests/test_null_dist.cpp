#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "changeauc/null_dist.hpp"
#include "changeauc/rng.hpp"

using namespace changeauc;

namespace {

BrownianPath path_from(const std::vector<double>& values) {
    BrownianPath path;
    path.knots = static_cast<long>(values.size()) - 1;
    path.b = values;
    return path;
}

BrownianPath linear_path(long knots, double slope) {
    BrownianPath path;
    path.knots = knots;
    path.b.resize(knots + 1);
    for (long i = 0; i <= knots; ++i) path.b[i] = slope * static_cast<double>(i) / knots;
    return path;
}

}  // namespace

TEST_CASE("both limit functionals vanish on zero and linear paths") {
    BrownianPath zero = path_from(std::vector<double>(1001, 0.0));
    BrownianPath line = linear_path(1000, 2.5);
    for (long idx : {250L, 400L, 500L, 650L}) {
        CHECK(g0_value(zero, 0.15, idx) == 0.0);
        CHECK(h0_value(zero, 0.15, idx) == 0.0);
        CHECK(g0_value(line, 0.15, idx) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(h0_value(line, 0.15, idx) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("variance of the mean-difference functional at the midpoint") {
    // Var G0(1/2) = (1/12)(1/(1-e-1/2) + 1/(1/2-e)) = (1/12)(2/0.35) at e=0.15.
    const long K = 2000, R = 20000;
    Rng rng(31);
    double sum = 0.0, sum_sq = 0.0;
    for (long rep = 0; rep < R; ++rep) {
        BrownianPath path = simulate_brownian_path(K, rng);
        double v = g0_value(path, 0.15, K / 2);
        sum += v;
        sum_sq += v * v;
    }
    double mean = sum / R;
    double var = sum_sq / R - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(var == doctest::Approx((1.0 / 12.0) * (2.0 / 0.35)).epsilon(0.05));
}

TEST_CASE("the standardized bridge has unit variance everywhere") {
    const long K = 2000, R = 20000;
    for (long idx : {600L, 1000L, 1400L}) {
        Rng rng(57 + idx);
        double sum = 0.0, sum_sq = 0.0;
        for (long rep = 0; rep < R; ++rep) {
            BrownianPath path = simulate_brownian_path(K, rng);
            double v = h0_value(path, 0.15, idx);
            sum += v;
            sum_sq += v * v;
        }
        double mean = sum / R;
        double var = sum_sq / R - mean * mean;
        CHECK(std::abs(mean) < 0.03);
        CHECK(var == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("the sup dominates the functional at every interior knot") {
    Rng rng(71);
    for (int rep = 0; rep < 10; ++rep) {
        BrownianPath path = simulate_brownian_path(1000, rng);
        double sup_g = sup_g0_sample(path, 0.15, 0.2);
        double sup_h = sup_h0_sample(path, 0.15, 0.2);
        for (long idx = 200; idx <= 800; idx += 50) {
            CHECK(sup_g >= g0_value(path, 0.15, idx));
            CHECK(sup_h >= h0_value(path, 0.15, idx));
        }
    }
}

TEST_CASE("tables are reproducible and thread-count invariant") {
    NullQuantileTable a = build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 2000, 7);
    NullQuantileTable b = build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 2000, 7);
    NullQuantileTable c = build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 2000, 7, 4);
    CHECK(a.quantiles == b.quantiles);
    CHECK(a.raw_percentiles == b.raw_percentiles);
    CHECK(a.quantiles == c.quantiles);
    CHECK(a.raw_percentiles == c.raw_percentiles);

    NullQuantileTable d = build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 2000, 8);
    CHECK(a.raw_percentiles != d.raw_percentiles);
}

TEST_CASE("quantiles are monotone in the level and stable in the rep count") {
    NullQuantileTable table = build_table(TableKind::sup_h0, 0.15, 0.05, 1000, 2000, 7);
    REQUIRE(table.quantiles.size() == 5);
    for (std::size_t i = 1; i < table.quantiles.size(); ++i) {
        CHECK(table.quantiles[i].first < table.quantiles[i - 1].first);    // alpha descending
        CHECK(table.quantiles[i].second >= table.quantiles[i - 1].second); // value ascending
    }
    for (std::size_t i = 1; i < table.raw_percentiles.size(); ++i)
        CHECK(table.raw_percentiles[i] >= table.raw_percentiles[i - 1]);

    NullQuantileTable doubled = build_table(TableKind::sup_h0, 0.15, 0.05, 1000, 4000, 7);
    for (std::size_t i = 0; i < table.quantiles.size(); ++i)
        CHECK(table.quantiles[i].second ==
              doctest::Approx(doubled.quantiles[i].second).epsilon(0.08));
}

TEST_CASE("quantile lookup: exact at tabulated levels, interpolated between") {
    NullQuantileTable table = build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 2000, 7);
    CHECK(std::isinf(table.quantile_upper(0.0)));
    for (const auto& [alpha, value] : table.quantiles)
        CHECK(table.quantile_upper(alpha) == value);

    double mid = table.quantile_upper(0.075);
    CHECK(mid >= table.quantile_upper(0.10));
    CHECK(mid <= table.quantile_upper(0.05));
    CHECK_THROWS_AS(table.quantile_upper(1.0), Error);
    CHECK_THROWS_AS(table.quantile_upper(-0.1), Error);
}

TEST_CASE("undersized table requests are refused") {
    CHECK_THROWS_AS(build_table(TableKind::sup_g0, 0.15, 0.05, 500, 2000, 1), Error);
    CHECK_THROWS_AS(build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 500, 1), Error);
}

TEST_CASE("cache round trip, corruption recovery, and mismatch rebuild") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "changeauc_table_cache_test";
    fs::remove_all(dir);

    NullQuantileTable built =
        load_or_build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 1000, 3, dir.string());
    fs::path file = dir / table_cache_filename(TableKind::sup_g0, 0.15, 0.05, 1000, 1000, 3);
    REQUIRE(fs::exists(file));

    NullQuantileTable loaded = load_table(file.string());
    CHECK(loaded.kind == built.kind);
    CHECK(loaded.gamma == built.gamma);
    CHECK(loaded.epsilon == built.epsilon);
    CHECK(loaded.knots == built.knots);
    CHECK(loaded.reps == built.reps);
    CHECK(loaded.seed == built.seed);
    CHECK(loaded.quantiles == built.quantiles);
    CHECK(loaded.raw_percentiles == built.raw_percentiles);

    NullQuantileTable cached =
        load_or_build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 1000, 3, dir.string());
    CHECK(cached.raw_percentiles == built.raw_percentiles);

    {
        std::ofstream out(file);
        out << "this is not a table\n";
    }
    CHECK_THROWS_AS(load_table(file.string()), Error);
    NullQuantileTable rebuilt =
        load_or_build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 1000, 3, dir.string());
    CHECK(rebuilt.raw_percentiles == built.raw_percentiles);
    CHECK(load_table(file.string()).raw_percentiles == built.raw_percentiles);

    // a valid file whose contents answer a different request gets rebuilt too
    NullQuantileTable other = build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 1000, 99);
    save_table(other, file.string());
    NullQuantileTable again =
        load_or_build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 1000, 3, dir.string());
    CHECK(again.seed == 3);
    CHECK(again.raw_percentiles == built.raw_percentiles);

    fs::remove_all(dir);
}

TEST_CASE("tampered table files fail the checksum") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "changeauc_table_tamper_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path file = dir / "t.json";

    NullQuantileTable table = build_table(TableKind::sup_g0, 0.15, 0.05, 1000, 1000, 3);
    save_table(table, file.string());

    std::ifstream in(file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::size_t pos = text.find("\"reps\": 1000");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "\"reps\": 1001");
    std::ofstream out(file);
    out << text;
    out.close();

    CHECK_THROWS_AS(load_table(file.string()), Error);
    fs::remove_all(dir);
}
