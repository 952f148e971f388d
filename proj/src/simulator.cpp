#include "succession/simulator.hpp"

#include "succession/ledger.hpp"
#include "succession/rng.hpp"
#include "succession/trust_engine.hpp"
#include "succession/urn_oracle.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <utility>

namespace succession::sim {

namespace {

using ledger::Chain;
using ledger::SegmentKey;
using ledger::Segmentation;
using ledger::TransactionRecord;

void require(bool condition, const char* message) {
    if (!condition) throw std::domain_error(message);
}

struct SegmentFixture {
    std::string label;
    SegmentKey segment;
    std::int64_t value = 0; // representative transaction value
    std::int64_t n = 0;
    std::int64_t k = 0;
};

const std::vector<std::int64_t> kFixtureBoundaries{10, 100, 1000};
constexpr std::int64_t kFixtureWindowEnd = 250;

std::vector<SegmentFixture> price_fixture() {
    return {
        {"M1", SegmentKey::price_range(1), 5, 100, 85},
        {"M2", SegmentKey::price_range(2), 50, 3, 3},
        {"M3", SegmentKey::price_range(3), 500, 1, 1},
        {"M4", SegmentKey::price_range(4), 5000, 0, 0},
    };
}

std::vector<SegmentFixture> service_fixture() {
    return {
        {"electric_heater", SegmentKey::service_category("electric_heater"), 40, 93, 92},
        {"gas_heater", SegmentKey::service_category("gas_heater"), 40, 29, 11},
        {"plumbing_repairs", SegmentKey::service_category("plumbing_repairs"), 40, 48, 39},
        {"maintenance_contract", SegmentKey::service_category("maintenance_contract"), 40, 98, 58},
        {"gas_boiler", SegmentKey::service_category("gas_boiler"), 40, 18, 3},
        {"sewer_repairs", SegmentKey::service_category("sewer_repairs"), 40, 0, 0},
    };
}

const std::vector<Rational>& discount_rates() {
    static const std::vector<Rational> rates{
        make_rational(55, 100), make_rational(65, 100), make_rational(70, 100),
        make_rational(75, 100), make_rational(80, 100), make_rational(90, 100),
    };
    return rates;
}

std::int64_t to_int64(const Integer& value) {
    if (!value.fits_slong_p()) throw std::overflow_error("count exceeds 64-bit range");
    return value.get_si();
}

// Outcome generators, one per mode. Each draws a single ball/transaction.
class OutcomeSource {
public:
    OutcomeSource(Mode mode, const Rational& rate, std::int64_t count,
                  std::int64_t urn_factor, SplitMix64& rng)
        : mode_(mode), rate_(rate), rng_(rng) {
        if (mode_ == Mode::FixedCounts) {
            remaining_successes_ =
                to_int64(round_div_half_even(Integer(rate.get_num()) * count, Integer(rate.get_den())));
        } else if (mode_ == Mode::Urn) {
            const std::int64_t urn_size = urn_factor * count;
            require(urn_size >= count, "urn mode: urn smaller than draw count");
            blacks_ = to_int64(round_div_half_even(Integer(rate.get_num()) * urn_size,
                                                   Integer(rate.get_den())));
            others_ = urn_size - blacks_;
        }
    }

    bool next() {
        switch (mode_) {
        case Mode::FixedCounts:
            if (remaining_successes_ > 0) {
                --remaining_successes_;
                return true;
            }
            return false;
        case Mode::Bernoulli:
            return rng_.bernoulli(rate_);
        case Mode::Urn: {
            const std::uint64_t pool = static_cast<std::uint64_t>(blacks_ + others_);
            if (rng_.uniform_below(pool) < static_cast<std::uint64_t>(blacks_)) {
                --blacks_;
                return true;
            }
            --others_;
            return false;
        }
        }
        return false;
    }

private:
    Mode mode_;
    Rational rate_;
    SplitMix64& rng_;
    std::int64_t remaining_successes_ = 0;
    std::int64_t blacks_ = 0;
    std::int64_t others_ = 0;
};

ResultRow score_row(std::string label, std::int64_t replication, const ReputationScore& score) {
    // Render as (k+1)/(n+2); must agree with the engine's reduced value.
    const TrustMeasure measure = trust(score);
    ResultRow row{std::move(label), replication, score.n, score.k,
                  Integer(score.k + 1), Integer(score.n + 2)};
    if (make_rational(row.trust_num, row.trust_den) != measure.value()) {
        throw std::logic_error("simulator: display trust diverged from engine trust");
    }
    return row;
}

ResultRow value_row(std::string label, std::int64_t replication,
                    std::int64_t n, std::int64_t k, const Rational& value) {
    return ResultRow{std::move(label), replication, n, k,
                     Integer(value.get_num()), Integer(value.get_den())};
}

SeriesStat make_stat(std::string label, const std::vector<double>& samples) {
    SeriesStat stat;
    stat.label = std::move(label);
    stat.count = static_cast<std::int64_t>(samples.size());
    if (samples.empty()) return stat;
    double sum = 0.0;
    for (double x : samples) sum += x;
    stat.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double x : samples) ss += (x - stat.mean) * (x - stat.mean);
        const double variance = ss / static_cast<double>(samples.size() - 1);
        stat.stderr_mean = std::sqrt(variance / static_cast<double>(samples.size()));
    }
    return stat;
}

double decimal_value(const Rational& value) {
    return mpq_get_d(value.get_mpq_t());
}

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.9f", value);
    return buffer;
}

void validate_config(const SimulationConfig& config) {
    require(config.replications >= 1, "config: replications must be >= 1");
    require(config.params.tx_per_epoch >= 1, "config: tx_per_epoch must be >= 1");
    require(config.params.history_n >= 0, "config: history_n must be >= 0");
    require(config.params.future_m >= 0, "config: future_m must be >= 0");
    require(config.params.urn_factor >= 1, "config: urn_factor must be >= 1");
    require(sgn(config.params.history_rate) >= 0 && config.params.history_rate <= 1,
            "config: history_rate outside [0, 1]");
}

std::int64_t effective_replications(const SimulationConfig& config) {
    // fixed_counts runs are exact reproductions; one replication tells all.
    return config.mode == Mode::FixedCounts ? 1 : config.replications;
}

ResultSeries run_segment_scenario(const SimulationConfig& config,
                                  const std::vector<SegmentFixture>& fixture) {
    validate_config(config);
    ResultSeries series;
    series.config = config;
    series.config.replications = effective_replications(config);

    const TickInterval window{0, kFixtureWindowEnd};
    std::vector<std::vector<double>> trust_samples(fixture.size());

    for (std::int64_t rep = 0; rep < series.config.replications; ++rep) {
        SplitMix64 rng(SplitMix64::at(config.seed, static_cast<std::uint64_t>(rep)));
        Chain chain{Segmentation(kFixtureBoundaries)};

        std::vector<TransactionRecord> records;
        for (const SegmentFixture& seg : fixture) {
            if (seg.n == 0) continue;
            OutcomeSource source(config.mode, make_rational(seg.k, seg.n), seg.n,
                                 config.params.urn_factor, rng);
            for (std::int64_t i = 0; i < seg.n; ++i) {
                records.push_back(TransactionRecord{
                    "seller-1", "buyer-" + std::to_string(i), seg.segment, seg.value,
                    i % kFixtureWindowEnd, source.next()});
            }
        }
        if (!records.empty()) chain.append(std::move(records));

        for (std::size_t s = 0; s < fixture.size(); ++s) {
            const ReputationScore score =
                chain.reputation_of("seller-1", fixture[s].segment, window);
            if (config.mode == Mode::FixedCounts &&
                (score.n != fixture[s].n || score.k != fixture[s].k)) {
                throw std::logic_error("simulator: ledger query diverged from fixture counts");
            }
            series.rows.push_back(score_row(fixture[s].label, rep, score));
            trust_samples[s].push_back(decimal_value(trust(score).value()));
        }
    }

    if (series.config.replications > 1) {
        for (std::size_t s = 0; s < fixture.size(); ++s) {
            series.stats.push_back(make_stat(fixture[s].label + "_trust", trust_samples[s]));
        }
    }
    return series;
}

} // namespace

std::string_view mode_name(Mode mode) {
    switch (mode) {
    case Mode::FixedCounts: return "fixed_counts";
    case Mode::Bernoulli: return "bernoulli";
    case Mode::Urn: return "urn";
    }
    return "?";
}

Mode parse_mode(const std::string& text) {
    if (text == "fixed_counts") return Mode::FixedCounts;
    if (text == "bernoulli") return Mode::Bernoulli;
    if (text == "urn") return Mode::Urn;
    throw std::domain_error("unknown mode '" + text + "'");
}

std::string_view scenario_name(Scenario scenario) {
    switch (scenario) {
    case Scenario::PriceSegments: return "price_segments";
    case Scenario::ServiceSegments: return "service_segments";
    case Scenario::Discounting: return "discounting";
    case Scenario::LongTerm: return "long_term";
    }
    return "?";
}

Scenario parse_scenario(const std::string& text) {
    if (text == "price_segments") return Scenario::PriceSegments;
    if (text == "service_segments") return Scenario::ServiceSegments;
    if (text == "discounting") return Scenario::Discounting;
    if (text == "long_term") return Scenario::LongTerm;
    throw std::domain_error("unknown scenario '" + text + "'");
}

const std::vector<std::vector<Rational>>& discount_experiments() {
    static const std::vector<std::vector<Rational>> experiments{
        {make_rational(1, 10), make_rational(1, 10), make_rational(1, 10),
         make_rational(1, 10), make_rational(1, 10), make_rational(1, 2)},
        {Rational(0), Rational(0), make_rational(1, 10), make_rational(1, 5),
         make_rational(1, 5), make_rational(1, 2)},
        {Rational(0), Rational(0), Rational(0), Rational(0), make_rational(1, 2),
         make_rational(1, 2)},
        {Rational(0), Rational(0), Rational(0), Rational(0), make_rational(2, 5),
         make_rational(3, 5)},
        {Rational(0), Rational(0), Rational(0), Rational(0), Rational(0), Rational(1)},
        {make_rational(17, 100), make_rational(17, 100), make_rational(17, 100),
         make_rational(17, 100), make_rational(17, 100), make_rational(17, 100)},
    };
    return experiments;
}

ResultSeries run_price_segments(const SimulationConfig& config) {
    return run_segment_scenario(config, price_fixture());
}

ResultSeries run_service_segments(const SimulationConfig& config) {
    return run_segment_scenario(config, service_fixture());
}

ResultSeries run_discounting(const SimulationConfig& config) {
    validate_config(config);
    ResultSeries series;
    series.config = config;
    series.config.replications = effective_replications(config);

    const auto& rates = discount_rates();
    const std::int64_t epoch_count = static_cast<std::int64_t>(rates.size());
    const std::int64_t epoch_span = 250;
    const std::int64_t tx = config.params.tx_per_epoch;

    std::vector<std::int64_t> boundaries;
    for (std::int64_t i = 0; i <= epoch_count; ++i) boundaries.push_back(i * epoch_span);

    const auto& experiments = discount_experiments();
    std::vector<std::vector<double>> scheme1_samples(experiments.size());
    std::vector<std::vector<double>> scheme2_samples(experiments.size());
    std::vector<std::vector<double>> scheme1_gt(experiments.size());
    std::vector<std::vector<double>> scheme2_gt(experiments.size());
    std::vector<double> aggregate_samples;

    const SegmentKey segment = Segmentation(kFixtureBoundaries).classify(50);

    for (std::int64_t rep = 0; rep < series.config.replications; ++rep) {
        SplitMix64 rng(SplitMix64::at(config.seed, static_cast<std::uint64_t>(rep)));
        Chain chain{Segmentation(kFixtureBoundaries)};

        std::vector<TransactionRecord> records;
        for (std::int64_t e = 0; e < epoch_count; ++e) {
            OutcomeSource source(config.mode, rates[static_cast<std::size_t>(e)], tx,
                                 config.params.urn_factor, rng);
            for (std::int64_t i = 0; i < tx; ++i) {
                records.push_back(TransactionRecord{
                    "seller-1", "buyer-" + std::to_string(i), segment, 50,
                    e * epoch_span + (i % epoch_span), source.next()});
            }
        }
        chain.append(std::move(records));

        const std::vector<EpochScore> epochs =
            chain.epoch_slices("seller-1", segment, boundaries);
        for (std::int64_t e = 0; e < epoch_count; ++e) {
            series.rows.push_back(score_row("epoch" + std::to_string(e + 1), rep,
                                            ReputationScore{epochs[static_cast<std::size_t>(e)].n,
                                                            epochs[static_cast<std::size_t>(e)].k,
                                                            epochs[static_cast<std::size_t>(e)].epoch}));
        }

        const ReputationScore total = aggregate(epochs);
        const TrustMeasure total_trust = trust(total);
        series.rows.push_back(score_row("aggregate", rep, total));
        aggregate_samples.push_back(decimal_value(total_trust.value()));

        for (std::size_t e = 0; e < experiments.size(); ++e) {
            const TrustMeasure d1 = discount_scheme1(epochs, experiments[e]);
            const TrustMeasure d2 = discount_scheme2(epochs, normalize_weights(experiments[e]));
            const std::string base = "exp" + std::to_string(e + 1);
            series.rows.push_back(value_row(base + "_scheme1", rep, total.n, total.k, d1.value()));
            series.rows.push_back(value_row(base + "_scheme2", rep, total.n, total.k, d2.value()));
            scheme1_samples[e].push_back(decimal_value(d1.value()));
            scheme2_samples[e].push_back(decimal_value(d2.value()));
            scheme1_gt[e].push_back(d1.value() > total_trust.value() ? 1.0 : 0.0);
            scheme2_gt[e].push_back(d2.value() > total_trust.value() ? 1.0 : 0.0);
        }
    }

    if (series.config.replications > 1) {
        series.stats.push_back(make_stat("aggregate_trust", aggregate_samples));
        for (std::size_t e = 0; e < experiments.size(); ++e) {
            const std::string base = "exp" + std::to_string(e + 1);
            series.stats.push_back(make_stat(base + "_scheme1_trust", scheme1_samples[e]));
            series.stats.push_back(make_stat(base + "_scheme2_trust", scheme2_samples[e]));
            series.stats.push_back(make_stat(base + "_scheme1_gt_aggregate", scheme1_gt[e]));
            series.stats.push_back(make_stat(base + "_scheme2_gt_aggregate", scheme2_gt[e]));
        }
    }
    return series;
}

ResultSeries run_long_term(const SimulationConfig& config) {
    validate_config(config);
    ResultSeries series;
    series.config = config;
    series.config.replications = effective_replications(config);

    const std::int64_t history_n = config.params.history_n;
    const std::int64_t future_m = config.params.future_m;

    // Phase 1: one seeded history of history_n transactions.
    SplitMix64 phase1_rng(SplitMix64::at(config.seed, 0));
    std::int64_t history_k = 0;
    {
        OutcomeSource source(config.mode, config.params.history_rate, history_n,
                             config.params.urn_factor, phase1_rng);
        for (std::int64_t i = 0; i < history_n; ++i) {
            if (source.next()) ++history_k;
        }
    }
    const ReputationScore history{history_n, history_k, TickInterval{0, history_n}};
    series.rows.push_back(score_row("phase1", 0, history));

    const Prediction prediction = predict_score(history, future_m, history_n + future_m);
    const Rational horizon_trust = predicted_trust(history, prediction);
    series.rows.push_back(
        value_row("prediction", 0, history.n, history.k, horizon_trust));

    // Phase 2: replicated careers continuing the same history.
    const std::int64_t urn_size =
        std::max<std::int64_t>(config.params.urn_factor * (history_n + future_m), 1);
    std::vector<double> success_samples;
    success_samples.reserve(static_cast<std::size_t>(series.config.replications));

    std::optional<oracle::CareerSampler> sampler;
    if (config.mode == Mode::Urn) sampler.emplace(urn_size, history_n, history_k);

    const Rational success_rate = trust(history).value();
    for (std::int64_t rep = 0; rep < series.config.replications; ++rep) {
        SplitMix64 rng(SplitMix64::at(config.seed, static_cast<std::uint64_t>(rep) + 1));
        std::int64_t successes = 0;
        switch (config.mode) {
        case Mode::Urn:
            successes = sampler->draw_future_successes(future_m, rng);
            break;
        case Mode::Bernoulli:
            for (std::int64_t i = 0; i < future_m; ++i) {
                if (rng.bernoulli(success_rate)) ++successes;
            }
            break;
        case Mode::FixedCounts:
            successes = to_int64(round_div_half_even(
                Integer(prediction.expected_k.get_num()),
                Integer(prediction.expected_k.get_den())));
            break;
        }
        const ReputationScore career{history_n + future_m, history_k + successes,
                                     TickInterval{0, history_n + future_m}};
        series.rows.push_back(score_row("career", rep, career));
        success_samples.push_back(static_cast<double>(successes));
    }

    SeriesStat stat = make_stat("future_successes", success_samples);
    stat.expected_decimal = to_decimal(prediction.expected_k);
    stat.expected_exact = to_fraction(prediction.expected_k);
    series.stats.push_back(std::move(stat));
    return series;
}

ResultSeries run(const SimulationConfig& config) {
    switch (config.scenario) {
    case Scenario::PriceSegments: return run_price_segments(config);
    case Scenario::ServiceSegments: return run_service_segments(config);
    case Scenario::Discounting: return run_discounting(config);
    case Scenario::LongTerm: return run_long_term(config);
    }
    throw std::domain_error("unknown scenario");
}

std::string ResultSeries::to_csv() const {
    std::string out;
    out += "# succession-simulation v1\n";
    out += "# generator=";
    out += kGeneratorId;
    out += "\n# scenario=";
    out += scenario_name(config.scenario);
    out += "\n# mode=";
    out += mode_name(config.mode);
    out += "\n# seed=" + std::to_string(config.seed);
    out += "\n# replications=" + std::to_string(config.replications);
    out += "\n# tx_per_epoch=" + std::to_string(config.params.tx_per_epoch);
    out += "\n# history_n=" + std::to_string(config.params.history_n);
    out += "\n# future_m=" + std::to_string(config.params.future_m);
    out += "\n# history_rate=" + to_fraction(config.params.history_rate);
    out += "\n# urn_factor=" + std::to_string(config.params.urn_factor);
    out += "\nscenario,label,replication,n,k,trust_num,trust_den,trust_decimal\n";

    const std::string scenario(scenario_name(config.scenario));
    for (const ResultRow& row : rows) {
        out += scenario;
        out.push_back(',');
        out += row.label;
        out.push_back(',');
        out += std::to_string(row.replication);
        out.push_back(',');
        out += std::to_string(row.n);
        out.push_back(',');
        out += std::to_string(row.k);
        out.push_back(',');
        out += row.trust_num.get_str();
        out.push_back(',');
        out += row.trust_den.get_str();
        out.push_back(',');
        out += to_decimal(make_rational(row.trust_num, row.trust_den));
        out.push_back('\n');
    }
    for (const SeriesStat& stat : stats) {
        out += "# stat," + stat.label + "," + std::to_string(stat.count) + "," +
               format_double(stat.mean) + "," + format_double(stat.stderr_mean) + "," +
               stat.expected_decimal + "," + stat.expected_exact + "\n";
    }
    return out;
}

std::string ResultSeries::to_json() const {
    nlohmann::json j;
    j["metadata"]["format"] = "succession-simulation";
    j["metadata"]["version"] = 1;
    j["metadata"]["generator"] = std::string(kGeneratorId);
    j["metadata"]["scenario"] = std::string(scenario_name(config.scenario));
    j["metadata"]["mode"] = std::string(mode_name(config.mode));
    j["metadata"]["seed"] = config.seed;
    j["metadata"]["replications"] = config.replications;
    j["metadata"]["params"]["tx_per_epoch"] = config.params.tx_per_epoch;
    j["metadata"]["params"]["history_n"] = config.params.history_n;
    j["metadata"]["params"]["future_m"] = config.params.future_m;
    j["metadata"]["params"]["history_rate"] = to_fraction(config.params.history_rate);
    j["metadata"]["params"]["urn_factor"] = config.params.urn_factor;

    nlohmann::json rows_json = nlohmann::json::array();
    const std::string scenario(scenario_name(config.scenario));
    for (const ResultRow& row : rows) {
        nlohmann::json r;
        r["scenario"] = scenario;
        r["label"] = row.label;
        r["replication"] = row.replication;
        r["n"] = row.n;
        r["k"] = row.k;
        r["trust_num"] = row.trust_num.get_str();
        r["trust_den"] = row.trust_den.get_str();
        r["trust_decimal"] = to_decimal(make_rational(row.trust_num, row.trust_den));
        rows_json.push_back(std::move(r));
    }
    j["rows"] = std::move(rows_json);

    nlohmann::json stats_json = nlohmann::json::array();
    for (const SeriesStat& stat : stats) {
        nlohmann::json s;
        s["label"] = stat.label;
        s["count"] = stat.count;
        s["mean"] = format_double(stat.mean);
        s["stderr"] = format_double(stat.stderr_mean);
        s["expected_decimal"] = stat.expected_decimal;
        s["expected_exact"] = stat.expected_exact;
        stats_json.push_back(std::move(s));
    }
    j["stats"] = std::move(stats_json);
    return j.dump(2) + "\n";
}

} // namespace succession::sim
