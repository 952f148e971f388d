#pragma once

#include "succession/rational.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Seeded, deterministic marketplace experiments. Every trust value reported
// here comes out of the trust engine; this module never does its own
// probability arithmetic.
namespace succession::sim {

enum class Mode { FixedCounts, Bernoulli, Urn };
enum class Scenario { PriceSegments, ServiceSegments, Discounting, LongTerm };

std::string_view mode_name(Mode mode);
Mode parse_mode(const std::string& text);
std::string_view scenario_name(Scenario scenario);
Scenario parse_scenario(const std::string& text);

struct ScenarioParams {
    std::int64_t tx_per_epoch = 100; // discounting: transactions per epoch
    std::int64_t history_n = 100;    // long_term: phase-1 transaction count
    std::int64_t future_m = 100;     // long_term: predicted transaction count
    Rational history_rate = make_rational(17, 20); // phase-1 success probability
    std::int64_t urn_factor = 10;    // urn mode: urn size multiplier
};

struct SimulationConfig {
    Scenario scenario = Scenario::PriceSegments;
    Mode mode = Mode::FixedCounts;
    std::uint64_t seed = 1;
    std::int64_t replications = 1;
    ScenarioParams params;
};

// One labeled observation. Score rows carry the observed (n, k) and render
// trust as (k+1)/(n+2); discounted rows carry the reduced rational.
struct ResultRow {
    std::string label;
    std::int64_t replication = 0;
    std::int64_t n = 0;
    std::int64_t k = 0;
    Integer trust_num;
    Integer trust_den;
};

struct SeriesStat {
    std::string label;
    std::int64_t count = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    std::string expected_decimal = "-"; // theoretical target, when one exists
    std::string expected_exact = "-";
};

struct ResultSeries {
    SimulationConfig config;
    std::vector<ResultRow> rows;
    std::vector<SeriesStat> stats;

    std::string to_csv() const;
    std::string to_json() const;
};

ResultSeries run(const SimulationConfig& config);
ResultSeries run_price_segments(const SimulationConfig& config);
ResultSeries run_service_segments(const SimulationConfig& config);
ResultSeries run_discounting(const SimulationConfig& config);
ResultSeries run_long_term(const SimulationConfig& config);

// The lambda rows evaluated by the discounting scenario, exact rationals.
const std::vector<std::vector<Rational>>& discount_experiments();

} // namespace succession::sim
