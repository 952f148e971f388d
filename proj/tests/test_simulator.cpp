#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "succession/simulator.hpp"
#include "succession/trust_engine.hpp"

#include "json.hpp"

#include <cmath>
#include <map>
#include <string>

using namespace succession;
using namespace succession::sim;

namespace {

Rational row_trust(const ResultRow& row) {
    return make_rational(row.trust_num, row.trust_den);
}

const ResultRow& find_row(const ResultSeries& series, const std::string& label,
                          std::int64_t replication = 0) {
    for (const ResultRow& row : series.rows) {
        if (row.label == label && row.replication == replication) return row;
    }
    FAIL(("row not found: " + label));
    static ResultRow dummy;
    return dummy;
}

} // namespace

TEST_CASE("price segments, fixed counts: exact reproduction") {
    SimulationConfig config;
    config.scenario = Scenario::PriceSegments;
    config.mode = Mode::FixedCounts;
    config.seed = 1;
    config.replications = 7; // collapses to 1, nothing is random
    const ResultSeries series = run(config);
    CHECK(series.config.replications == 1);
    REQUIRE(series.rows.size() == 4);

    CHECK(row_trust(find_row(series, "M1")) == make_rational(86, 102));
    CHECK(row_trust(find_row(series, "M2")) == make_rational(4, 5));
    CHECK(row_trust(find_row(series, "M3")) == make_rational(2, 3));
    CHECK(row_trust(find_row(series, "M4")) == make_rational(1, 2));

    const ResultRow& m1 = find_row(series, "M1");
    CHECK(m1.n == 100);
    CHECK(m1.k == 85);
    CHECK(m1.trust_num == 86);
    CHECK(m1.trust_den == 102);
}

TEST_CASE("service segments, fixed counts: exact reproduction") {
    SimulationConfig config;
    config.scenario = Scenario::ServiceSegments;
    config.mode = Mode::FixedCounts;
    const ResultSeries series = run(config);
    REQUIRE(series.rows.size() == 6);

    CHECK(row_trust(find_row(series, "electric_heater")) == make_rational(93, 95));
    CHECK(row_trust(find_row(series, "gas_heater")) == make_rational(12, 31));
    CHECK(row_trust(find_row(series, "plumbing_repairs")) == make_rational(40, 50));
    CHECK(row_trust(find_row(series, "maintenance_contract")) == make_rational(59, 100));
    CHECK(row_trust(find_row(series, "gas_boiler")) == make_rational(4, 20));
    CHECK(row_trust(find_row(series, "sewer_repairs")) == make_rational(1, 2));
}

TEST_CASE("every reported trust value equals the engine's trust of (n, k)") {
    SimulationConfig config;
    config.scenario = Scenario::PriceSegments;
    config.mode = Mode::Bernoulli;
    config.seed = 5;
    config.replications = 10;
    const ResultSeries series = run(config);
    for (const ResultRow& row : series.rows) {
        CHECK(row_trust(row) ==
              trust(ReputationScore{row.n, row.k, {0, 250}}).value());
    }
}

TEST_CASE("discounting: trailing-unit lambda row reduces to the last epoch") {
    SimulationConfig config;
    config.scenario = Scenario::Discounting;
    config.mode = Mode::Bernoulli;
    config.seed = 11;
    config.replications = 30;
    const ResultSeries series = run(config);

    for (std::int64_t rep = 0; rep < 30; ++rep) {
        const Rational last_epoch = row_trust(find_row(series, "epoch6", rep));
        CHECK(row_trust(find_row(series, "exp5_scheme1", rep)) == last_epoch);
        CHECK(row_trust(find_row(series, "exp5_scheme2", rep)) == last_epoch);

        // both schemes stay inside the per-epoch envelope
        Rational lo, hi;
        for (int e = 1; e <= 6; ++e) {
            const Rational t = row_trust(find_row(series, "epoch" + std::to_string(e), rep));
            if (e == 1 || t < lo) lo = t;
            if (e == 1 || t > hi) hi = t;
        }
        for (int x = 1; x <= 6; ++x) {
            for (const char* scheme : {"_scheme1", "_scheme2"}) {
                const Rational d =
                    row_trust(find_row(series, "exp" + std::to_string(x) + scheme, rep));
                CHECK(d >= lo);
                CHECK(d <= hi);
            }
        }
    }
}

TEST_CASE("favoring the last epoch beats the plain aggregate for a rising seller") {
    SimulationConfig config;
    config.scenario = Scenario::Discounting;
    config.mode = Mode::Bernoulli;
    config.seed = 500;
    config.replications = 1000;
    const ResultSeries series = run(config);
    for (const SeriesStat& stat : series.stats) {
        if (stat.label == "exp5_scheme1_gt_aggregate") {
            CHECK(stat.count == 1000);
            CHECK(stat.mean >= 0.95);
            return;
        }
    }
    FAIL("exp5_scheme1_gt_aggregate stat missing");
}

TEST_CASE("discounting, fixed counts: epoch tallies follow the configured rates") {
    SimulationConfig config;
    config.scenario = Scenario::Discounting;
    config.mode = Mode::FixedCounts;
    config.params.tx_per_epoch = 100;
    const ResultSeries series = run(config);

    const std::map<std::string, std::int64_t> expected{
        {"epoch1", 55}, {"epoch2", 65}, {"epoch3", 70},
        {"epoch4", 75}, {"epoch5", 80}, {"epoch6", 90},
    };
    for (const auto& [label, k] : expected) {
        const ResultRow& row = find_row(series, label);
        CHECK(row.n == 100);
        CHECK(row.k == k);
    }
    const ResultRow& agg = find_row(series, "aggregate");
    CHECK(agg.n == 600);
    CHECK(agg.k == 435);
}

TEST_CASE("long term: prediction row carries the phase-1 trust exactly") {
    SimulationConfig config;
    config.scenario = Scenario::LongTerm;
    config.mode = Mode::Urn;
    config.seed = 21;
    config.replications = 50;
    config.params.history_n = 30;
    config.params.future_m = 30;
    const ResultSeries series = run(config);

    const ResultRow& phase1 = find_row(series, "phase1");
    const ResultRow& prediction = find_row(series, "prediction");
    CHECK(row_trust(prediction) == row_trust(phase1));
    CHECK(phase1.n == 30);

    // career rows extend the same history
    for (std::int64_t rep = 0; rep < 50; ++rep) {
        const ResultRow& career = find_row(series, "career", rep);
        CHECK(career.n == 60);
        CHECK(career.k >= phase1.k);
        CHECK(career.k <= phase1.k + 30);
    }

    REQUIRE(series.stats.size() == 1);
    CHECK(series.stats[0].label == "future_successes");
    CHECK(series.stats[0].count == 50);
    CHECK(series.stats[0].expected_exact != "-");
}

TEST_CASE("long term: simulated mean tracks the predicted mean") {
    SimulationConfig config;
    config.scenario = Scenario::LongTerm;
    config.mode = Mode::Urn;
    config.seed = 33;
    config.replications = 2000;
    config.params.history_n = 40;
    config.params.future_m = 40;
    const ResultSeries series = run(config);

    const ResultRow& phase1 = find_row(series, "phase1");
    const Rational expected = predict_expected_successes(
        ReputationScore{phase1.n, phase1.k, {0, phase1.n}}, 40);
    const double target = mpq_get_d(expected.get_mpq_t());
    const SeriesStat& stat = series.stats.at(0);
    CHECK(stat.stderr_mean > 0.0);
    CHECK(std::abs(stat.mean - target) < 3.5 * stat.stderr_mean);
}

TEST_CASE("long term, m = 0: prediction and simulation are both zero") {
    SimulationConfig config;
    config.scenario = Scenario::LongTerm;
    config.mode = Mode::Urn;
    config.replications = 5;
    config.params.history_n = 10;
    config.params.future_m = 0;
    const ResultSeries series = run(config);
    const ResultRow& phase1 = find_row(series, "phase1");
    for (std::int64_t rep = 0; rep < 5; ++rep) {
        CHECK(find_row(series, "career", rep).k == phase1.k);
    }
    CHECK(series.stats.at(0).mean == 0.0);
    CHECK(series.stats.at(0).expected_exact == "0");
}

TEST_CASE("identical config and seed produce byte-identical output") {
    SimulationConfig config;
    config.scenario = Scenario::Discounting;
    config.mode = Mode::Bernoulli;
    config.seed = 77;
    config.replications = 25;
    const std::string a = run(config).to_csv();
    const std::string b = run(config).to_csv();
    CHECK(a == b);

    config.seed = 78;
    CHECK(run(config).to_csv() != a);

    const std::string ja = run(config).to_json();
    const std::string jb = run(config).to_json();
    CHECK(ja == jb);
}

TEST_CASE("csv and json shapes") {
    SimulationConfig config;
    config.scenario = Scenario::PriceSegments;
    config.mode = Mode::FixedCounts;
    const ResultSeries series = run(config);

    const std::string csv = series.to_csv();
    CHECK(csv.find("# generator=splitmix64") != std::string::npos);
    CHECK(csv.find("scenario,label,replication,n,k,trust_num,trust_den,trust_decimal") !=
          std::string::npos);
    CHECK(csv.find("price_segments,M1,0,100,85,86,102,0.843137") != std::string::npos);

    const nlohmann::json j = nlohmann::json::parse(series.to_json());
    CHECK(j.at("metadata").at("generator") == "splitmix64");
    CHECK(j.at("rows").size() == 4);
    CHECK(j.at("rows").at(0).at("trust_decimal") == "0.843137");
}

TEST_CASE("config validation") {
    SimulationConfig config;
    config.scenario = Scenario::Discounting;
    config.replications = 0;
    CHECK_THROWS_AS(run(config), std::domain_error);

    config.replications = 1;
    config.params.tx_per_epoch = 0;
    CHECK_THROWS_AS(run(config), std::domain_error);

    config.params.tx_per_epoch = 10;
    config.params.history_rate = make_rational(3, 2);
    CHECK_THROWS_AS(run(config), std::domain_error);
}
