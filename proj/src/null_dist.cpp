#include "changeauc/null_dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "changeauc/parallel.hpp"

namespace changeauc {

namespace {

constexpr double kStandardAlphas[] = {0.20, 0.10, 0.05, 0.01, 0.005};

// Type-7 empirical quantile (linear interpolation between order statistics).
double type7_quantile(const std::vector<double>& sorted, double prob) {
    const std::size_t n = sorted.size();
    double h = (static_cast<double>(n) - 1.0) * prob;
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

long knot_of(double fraction, long knots) {
    return std::lround(fraction * static_cast<double>(knots));
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::string table_digest_string(const NullQuantileTable& t) {
    char buf[64];
    std::string s = table_kind_name(t.kind);
    auto push = [&](double v) {
        std::snprintf(buf, sizeof buf, "|%.17g", v);
        s += buf;
    };
    push(t.gamma);
    push(t.epsilon);
    push(static_cast<double>(t.knots));
    push(static_cast<double>(t.reps));
    std::snprintf(buf, sizeof buf, "|%llu", static_cast<unsigned long long>(t.seed));
    s += buf;
    for (const auto& [alpha, q] : t.quantiles) {
        push(alpha);
        push(q);
    }
    for (double v : t.raw_percentiles) push(v);
    return s;
}

}  // namespace

const char* table_kind_name(TableKind kind) {
    return kind == TableKind::sup_g0 ? "sup_g0" : "sup_h0";
}

TableKind table_kind_from_name(const std::string& name) {
    if (name == "sup_g0" || name == "g0") return TableKind::sup_g0;
    if (name == "sup_h0" || name == "h0") return TableKind::sup_h0;
    throw Error(ErrorCode::invalid_argument, "unknown table kind: " + name);
}

double NullQuantileTable::quantile_upper(double alpha) const {
    if (alpha == 0.0) return std::numeric_limits<double>::infinity();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorCode::invalid_argument, "alpha must lie in [0, 1)");
    for (const auto& [a, q] : quantiles)
        if (std::abs(a - alpha) <= 1e-12) return q;
    // Interpolate on the stored percentile grid at probability 1 - alpha.
    return type7_quantile(raw_percentiles, 1.0 - alpha);
}

BrownianPath simulate_brownian_path(long knots, Rng& rng) {
    BrownianPath path;
    path.knots = knots;
    path.b.resize(knots + 1);
    path.b[0] = 0.0;
    const double scale = std::sqrt(1.0 / static_cast<double>(knots));
    double acc = 0.0;
    for (long i = 1; i <= knots; ++i) {
        acc += scale * rng.normal();
        path.b[i] = acc;
    }
    return path;
}

double g0_value(const BrownianPath& path, double epsilon, long knot_index) {
    const long K = path.knots;
    const double r = static_cast<double>(knot_index) / static_cast<double>(K);
    const double b_r = path.b[knot_index];
    const double b_eps = path.b[knot_of(epsilon, K)];
    const double b_1me = path.b[knot_of(1.0 - epsilon, K)];
    return ((b_1me - b_r) / (1.0 - epsilon - r) - (b_r - b_eps) / (r - epsilon)) /
           std::sqrt(12.0);
}

double h0_value(const BrownianPath& path, double epsilon, long knot_index) {
    const long K = path.knots;
    const double r = static_cast<double>(knot_index) / static_cast<double>(K);
    const double b_r = path.b[knot_index];
    const double b_eps = path.b[knot_of(epsilon, K)];
    const double b_1me = path.b[knot_of(1.0 - epsilon, K)];
    const double len = 1.0 - 2.0 * epsilon;
    const double weight = std::sqrt(len / ((r - epsilon) * (1.0 - r - epsilon)));
    return weight * ((b_r - b_eps) - (r - epsilon) / len * (b_1me - b_eps));
}

namespace {

template <typename ValueAt>
double sup_over_window(const BrownianPath& path, double gamma, ValueAt&& value_at) {
    const long K = path.knots;
    const long lo = static_cast<long>(std::ceil(gamma * K - 1e-9));
    const long hi = static_cast<long>(std::floor((1.0 - gamma) * K + 1e-9));
    if (lo > hi) throw Error(ErrorCode::invalid_argument, "empty sup window");
    double sup = -std::numeric_limits<double>::infinity();
    for (long i = lo; i <= hi; ++i) sup = std::max(sup, value_at(i));
    return sup;
}

}  // namespace

double sup_g0_sample(const BrownianPath& path, double epsilon, double gamma) {
    return sup_over_window(path, gamma, [&](long i) { return g0_value(path, epsilon, i); });
}

double sup_h0_sample(const BrownianPath& path, double epsilon, double gamma) {
    return sup_over_window(path, gamma, [&](long i) { return h0_value(path, epsilon, i); });
}

NullQuantileTable build_table(TableKind kind, double epsilon, double eta, long knots, long reps,
                              std::uint64_t seed, int threads) {
    if (knots < 1000 || reps < 1000)
        throw Error(ErrorCode::invalid_argument, "table requires knots >= 1000 and reps >= 1000");
    if (!(epsilon > 0.0 && epsilon < 0.5) || !(eta > 0.0 && eta < 0.5 - epsilon))
        throw Error(ErrorCode::invalid_argument, "invalid (epsilon, eta) for table");

    NullQuantileTable table;
    table.kind = kind;
    table.epsilon = epsilon;
    table.gamma = epsilon + eta;
    table.knots = knots;
    table.reps = reps;
    table.seed = seed;

    std::vector<double> sups(reps);
    parallel_for(reps, resolve_threads(threads), [&](long rep) {
        Rng rng(child_seed(seed, static_cast<std::uint64_t>(rep)));
        BrownianPath path = simulate_brownian_path(knots, rng);
        sups[rep] = kind == TableKind::sup_g0 ? sup_g0_sample(path, epsilon, table.gamma)
                                              : sup_h0_sample(path, epsilon, table.gamma);
    });
    std::sort(sups.begin(), sups.end());

    for (double alpha : kStandardAlphas)
        table.quantiles.emplace_back(alpha, type7_quantile(sups, 1.0 - alpha));
    table.raw_percentiles.resize(1001);
    for (int i = 0; i <= 1000; ++i)
        table.raw_percentiles[i] = type7_quantile(sups, static_cast<double>(i) / 1000.0);

    // Monotonicity is structural (quantiles of one sorted sample); check anyway.
    for (std::size_t i = 1; i < table.quantiles.size(); ++i)
        if (table.quantiles[i].second < table.quantiles[i - 1].second)
            throw std::logic_error("quantile table not monotone");
    return table;
}

std::string table_cache_filename(TableKind kind, double epsilon, double eta, long knots,
                                 long reps, std::uint64_t seed) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s_eps%g_eta%g_K%ld_R%ld_seed%llu.json",
                  table_kind_name(kind), epsilon, eta, knots, reps,
                  static_cast<unsigned long long>(seed));
    return buf;
}

void save_table(const NullQuantileTable& table, const std::string& path) {
    nlohmann::ordered_json j;
    j["kind"] = table_kind_name(table.kind);
    j["gamma"] = table.gamma;
    j["epsilon"] = table.epsilon;
    j["knots"] = table.knots;
    j["reps"] = table.reps;
    j["seed"] = table.seed;
    nlohmann::ordered_json quantiles = nlohmann::ordered_json::array();
    for (const auto& [alpha, q] : table.quantiles) quantiles.push_back({alpha, q});
    j["quantiles"] = std::move(quantiles);
    j["raw_percentiles"] = table.raw_percentiles;
    j["checksum"] = fnv1a(table_digest_string(table));

    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp);
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);  // atomic against concurrent builders
}

NullQuantileTable load_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, "bad table file " + path + ": " + e.what());
    }
    NullQuantileTable table;
    try {
        table.kind = table_kind_from_name(j.at("kind").get<std::string>());
        table.gamma = j.at("gamma").get<double>();
        table.epsilon = j.at("epsilon").get<double>();
        table.knots = j.at("knots").get<long>();
        table.reps = j.at("reps").get<long>();
        table.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& pair : j.at("quantiles"))
            table.quantiles.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
        table.raw_percentiles = j.at("raw_percentiles").get<std::vector<double>>();
        if (j.at("checksum").get<std::uint64_t>() != fnv1a(table_digest_string(table)))
            throw Error(ErrorCode::parse_error, "checksum mismatch in " + path);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, "bad table file " + path + ": " + e.what());
    }
    return table;
}

NullQuantileTable load_or_build_table(TableKind kind, double epsilon, double eta, long knots,
                                      long reps, std::uint64_t seed,
                                      const std::string& cache_dir, int threads) {
    if (cache_dir.empty()) return build_table(kind, epsilon, eta, knots, reps, seed, threads);

    std::filesystem::path dir(cache_dir);
    std::filesystem::path file =
        dir / table_cache_filename(kind, epsilon, eta, knots, reps, seed);
    if (std::filesystem::exists(file)) {
        try {
            NullQuantileTable table = load_table(file.string());
            if (table.kind == kind && table.knots == knots && table.reps == reps &&
                table.seed == seed && std::abs(table.epsilon - epsilon) <= 1e-12 &&
                std::abs(table.gamma - (epsilon + eta)) <= 1e-12)
                return table;
            std::fprintf(stderr, "changeauc: cache file %s does not match request; rebuilding\n",
                         file.string().c_str());
        } catch (const Error& e) {
            std::fprintf(stderr, "changeauc: ignoring cache file %s (%s)\n",
                         file.string().c_str(), e.what());
        }
    }
    NullQuantileTable table = build_table(kind, epsilon, eta, knots, reps, seed, threads);
    try {
        std::filesystem::create_directories(dir);
        save_table(table, file.string());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "changeauc: could not cache table (%s)\n", e.what());
    }
    return table;
}

}  // namespace changeauc
