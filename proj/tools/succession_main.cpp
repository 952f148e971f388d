#include "succession/ledger.hpp"
#include "succession/rational.hpp"
#include "succession/simulator.hpp"
#include "succession/trust_engine.hpp"
#include "succession/urn_oracle.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace succession;

// Exit codes: 0 success, 1 domain error, 2 usage error.

std::string score_trust_text(const ReputationScore& score) {
    const TrustMeasure measure = trust(score);
    return std::to_string(score.k + 1) + "/" + std::to_string(score.n + 2) + " " +
           to_decimal(measure.value());
}

std::string rational_text(const Rational& value) {
    return to_fraction(value) + " " + to_decimal(value);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::domain_error("cannot open file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::domain_error("cannot open '" + path + "' for writing");
    out << text;
}

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

// Weight files are JSON arrays of numbers or "p/q" strings. Numbers are
// re-read from their source text so decimals stay exact.
std::vector<Rational> load_weights(const std::string& path) {
    std::string text = trim(read_file(path));
    if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
        throw std::domain_error("weights file must be a JSON array: '" + path + "'");
    }
    text = trim(text.substr(1, text.size() - 2));
    std::vector<Rational> weights;
    if (text.empty()) return weights;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string token = trim(text.substr(start, comma == std::string::npos
                                                        ? std::string::npos
                                                        : comma - start));
        if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
            token = token.substr(1, token.size() - 2);
        }
        weights.push_back(parse_rational(token));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return weights;
}

// Epoch files are JSON arrays; entries are [n, k] pairs (stamped with unit
// ticks) or {"n":..,"k":..,"start":..,"end":..} objects.
std::vector<EpochScore> load_epochs(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::domain_error(std::string("epochs file: malformed JSON: ") + e.what());
    }
    if (!j.is_array()) throw std::domain_error("epochs file must be a JSON array");
    std::vector<EpochScore> epochs;
    std::int64_t auto_tick = 0;
    for (const auto& entry : j) {
        EpochScore epoch;
        if (entry.is_array()) {
            if (entry.size() != 2) throw std::domain_error("epoch pair must be [n, k]");
            epoch.n = entry.at(0).get<std::int64_t>();
            epoch.k = entry.at(1).get<std::int64_t>();
            epoch.epoch = TickInterval{auto_tick, auto_tick + 1};
        } else if (entry.is_object()) {
            epoch.n = entry.at("n").get<std::int64_t>();
            epoch.k = entry.at("k").get<std::int64_t>();
            epoch.epoch = TickInterval{entry.at("start").get<std::int64_t>(),
                                       entry.at("end").get<std::int64_t>()};
        } else {
            throw std::domain_error("epoch entry must be a pair or an object");
        }
        validate(epoch);
        epochs.push_back(epoch);
        auto_tick = epoch.epoch.end;
    }
    return epochs;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> values;
    std::stringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        token = trim(token);
        if (token.empty()) throw std::domain_error("empty entry in list '" + text + "'");
        values.push_back(std::stoll(token));
    }
    if (values.empty()) throw std::domain_error("empty list '" + text + "'");
    return values;
}

std::string default_chain_path(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("TRUST_CHAIN"); env && *env) return env;
    throw std::domain_error("no chain file: pass --chain or set TRUST_CHAIN");
}

// ---- subcommand bodies ----

struct TrustArgs {
    std::int64_t n = 0;
    std::int64_t k = 0;
};

struct UpdateArgs {
    std::int64_t n = 0, k = 0, dn = 0, dk = 0;
};

struct DiscountArgs {
    int scheme = 1;
    std::string epochs_path;
    std::string weights_path;
    bool normalize = false;
};

struct PredictArgs {
    std::int64_t n = 0, k = 0, m = 0;
    std::int64_t horizon = 0;
};

struct SimulateArgs {
    std::string scenario;
    std::string mode; // empty: scenario default
    std::uint64_t seed = 1;
    std::int64_t replications = 100;
    std::string out = "-";
    std::string format = "csv";
    std::int64_t tx_per_epoch = 100;
    std::int64_t history_n = 100;
    std::int64_t future_m = 100;
    std::string history_rate = "17/20";
    std::int64_t urn_factor = 10;
};

struct LedgerArgs {
    std::string chain;
    std::string records_path;
    std::string boundaries;
    std::string seller;
    std::string segment;
    std::int64_t from = 0;
    std::int64_t to = std::numeric_limits<std::int64_t>::max();
    std::string slices;
    std::string epochs_out;
};

struct VerifyArgs {
    std::int64_t max_n = 30;
    std::int64_t two_sample_n = 10;
    std::int64_t grid = 8;
    std::int64_t invariance_n = 25;
};

void run_trust(const TrustArgs& args) {
    std::cout << score_trust_text(ReputationScore{args.n, args.k, {0, 0}}) << "\n";
}

void run_update(const UpdateArgs& args) {
    const ReputationScore score{args.n, args.k, {0, 1}};
    const EpochScore delta{args.dn, args.dk, {1, 2}};
    const ReputationScore merged = update(score, delta);
    std::cout << merged.n << " " << merged.k << " " << score_trust_text(merged) << "\n";
}

void run_discount(const DiscountArgs& args) {
    const std::vector<EpochScore> epochs = load_epochs(args.epochs_path);
    std::vector<Rational> weights = load_weights(args.weights_path);
    if (args.normalize) weights = normalize_weights(weights);

    const TrustMeasure result = (args.scheme == 1)
                                    ? discount_scheme1(epochs, weights)
                                    : discount_scheme2(epochs, weights);

    Rational lo, hi;
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        const Rational t = trust(ReputationScore{epochs[i].n, epochs[i].k, epochs[i].epoch}).value();
        if (i == 0 || t < lo) lo = t;
        if (i == 0 || t > hi) hi = t;
    }

    std::cout << "discounted " << rational_text(result.value()) << "\n";
    std::cout << "min " << rational_text(lo) << "\n";
    std::cout << "max " << rational_text(hi) << "\n";
}

void run_predict(const PredictArgs& args) {
    const ReputationScore score{args.n, args.k, {0, 0}};
    const Prediction prediction = predict_score(score, args.m, args.horizon);
    std::cout << "expected_k " << rational_text(prediction.expected_k) << "\n";
    std::cout << "horizon_trust " << rational_text(predicted_trust(score, prediction)) << "\n";
}

void run_simulate(const SimulateArgs& args) {
    sim::SimulationConfig config;
    config.scenario = sim::parse_scenario(args.scenario);
    if (args.mode.empty()) {
        switch (config.scenario) {
        case sim::Scenario::PriceSegments:
        case sim::Scenario::ServiceSegments: config.mode = sim::Mode::FixedCounts; break;
        case sim::Scenario::Discounting: config.mode = sim::Mode::Bernoulli; break;
        case sim::Scenario::LongTerm: config.mode = sim::Mode::Urn; break;
        }
    } else {
        config.mode = sim::parse_mode(args.mode);
    }
    config.seed = args.seed;
    config.replications = args.replications;
    config.params.tx_per_epoch = args.tx_per_epoch;
    config.params.history_n = args.history_n;
    config.params.future_m = args.future_m;
    config.params.history_rate = parse_rational(args.history_rate);
    config.params.urn_factor = args.urn_factor;

    const sim::ResultSeries series = sim::run(config);
    if (args.format == "csv") {
        write_output(args.out, series.to_csv());
    } else if (args.format == "json") {
        write_output(args.out, series.to_json());
    } else {
        throw std::domain_error("unknown format '" + args.format + "'");
    }
}

void run_ledger_append(const LedgerArgs& args) {
    const std::string path = default_chain_path(args.chain);
    if (args.records_path.empty()) throw std::domain_error("append: --records is required");
    const std::vector<ledger::TransactionRecord> records = ledger::load_records(args.records_path);

    std::optional<ledger::Chain> chain;
    if (std::filesystem::exists(path)) {
        chain = ledger::load_chain(path);
        if (!chain->verify()) throw std::domain_error("chain '" + path + "' fails verification");
        if (!args.boundaries.empty() &&
            parse_int_list(args.boundaries) != chain->segmentation().boundaries()) {
            throw std::domain_error("--boundaries disagrees with existing chain");
        }
    } else {
        if (args.boundaries.empty()) {
            throw std::domain_error("new chain: --boundaries is required");
        }
        chain.emplace(ledger::Segmentation(parse_int_list(args.boundaries)));
    }

    chain->append(records);
    ledger::save_chain(*chain, path);
    std::cout << "appended " << records.size() << " records in block "
              << (chain->blocks().size() - 1) << "\n";
}

void run_ledger_query(const LedgerArgs& args) {
    const std::string path = default_chain_path(args.chain);
    if (args.seller.empty()) throw std::domain_error("query: --seller is required");
    if (args.segment.empty()) throw std::domain_error("query: --segment is required");

    const ledger::Chain chain = ledger::load_chain(path);
    if (!chain.verify()) throw std::domain_error("chain '" + path + "' fails verification");

    const ledger::SegmentKey key = ledger::parse_segment(args.segment);
    if (!args.slices.empty()) {
        const std::vector<std::int64_t> boundaries = parse_int_list(args.slices);
        const std::vector<EpochScore> epochs = chain.epoch_slices(args.seller, key, boundaries);
        nlohmann::json epochs_json = nlohmann::json::array();
        for (const EpochScore& epoch : epochs) {
            std::cout << epoch.epoch.start << " " << epoch.epoch.end << " " << epoch.n << " "
                      << epoch.k << " "
                      << score_trust_text(ReputationScore{epoch.n, epoch.k, epoch.epoch}) << "\n";
            epochs_json.push_back({{"n", epoch.n},
                                   {"k", epoch.k},
                                   {"start", epoch.epoch.start},
                                   {"end", epoch.epoch.end}});
        }
        if (!args.epochs_out.empty()) {
            write_output(args.epochs_out, epochs_json.dump() + "\n");
        }
        return;
    }

    const ReputationScore score =
        chain.reputation_of(args.seller, key, TickInterval{args.from, args.to});
    std::cout << score.n << " " << score.k << " " << score_trust_text(score) << "\n";
}

int run_ledger_verify(const LedgerArgs& args) {
    const std::string path = default_chain_path(args.chain);
    const ledger::Chain chain = ledger::load_chain(path);
    if (chain.verify()) {
        std::cout << "ok " << chain.blocks().size() << " blocks\n";
        return 0;
    }
    std::cout << "corrupt\n";
    return 1;
}

// Oracle verification suites: everything is summed from first principles in
// exact rationals and compared against the closed forms.
int run_verify(const VerifyArgs& args) {
    bool all_pass = true;
    const auto report = [&](const std::string& name, bool pass, long cases) {
        std::cout << (pass ? "PASS " : "FAIL ") << name << " (" << cases << " cases)\n";
        all_pass = all_pass && pass;
    };

    {
        bool pass = true;
        long cases = 0;
        for (std::int64_t N = 1; N <= args.max_n; ++N) {
            for (std::int64_t n = 0; n < N; ++n) {
                for (std::int64_t k = 0; k <= n; ++k) {
                    ++cases;
                    if (oracle::next_black_prob(N, n, k) != make_rational(k + 1, n + 2)) {
                        pass = false;
                    }
                }
            }
        }
        report("next-ball probability equals (k+1)/(n+2)", pass, cases);
    }

    {
        bool pass = true;
        long cases = 0;
        for (std::int64_t N = 1; N <= args.max_n; ++N) {
            for (std::int64_t n = 0; n <= N; ++n) {
                for (std::int64_t k = 0; k <= n; ++k) {
                    ++cases;
                    if (oracle::marginal_sample_prob(N, n, k) != make_rational(1, n + 1)) {
                        pass = false;
                    }
                }
            }
        }
        report("sample probability equals 1/(n+1)", pass, cases);
    }

    {
        bool pass = true;
        long cases = 0;
        for (std::int64_t N = 1; N <= args.two_sample_n; ++N) {
            for (std::int64_t n = 0; n <= N; ++n) {
                for (std::int64_t n2 = 0; n2 + n < N; ++n2) {
                    for (std::int64_t k = 0; k <= n; ++k) {
                        for (std::int64_t k2 = 0; k2 <= n2; ++k2) {
                            ++cases;
                            if (oracle::next_black_prob_two_samples(N, n, k, n2, k2) !=
                                make_rational(k + k2 + 1, n + n2 + 2)) {
                                pass = false;
                            }
                        }
                    }
                }
            }
        }
        report("two-sample next-ball probability equals pooled closed form", pass, cases);
    }

    {
        bool pass = true;
        long cases = 0;
        for (std::int64_t r = 0; r <= args.grid; ++r) {
            for (std::int64_t s = 0; s <= args.grid; ++s) {
                for (std::int64_t t = 0; t <= args.grid; ++t) {
                    ++cases;
                    if (!oracle::check_product_identity(r, s, t)) pass = false;
                }
            }
        }
        report("binomial product identity", pass, cases);
    }

    {
        bool pass = true;
        long cases = 0;
        for (std::int64_t n = 0; n <= args.grid; ++n) {
            for (std::int64_t r = 0; r <= n; ++r) {
                for (std::int64_t s = 0; s <= args.grid; ++s) {
                    for (std::int64_t m = 0; m <= args.grid; ++m) {
                        ++cases;
                        const auto holds = oracle::check_summation_identity(r, s, n, m);
                        if (!holds.has_value() || !holds.value()) pass = false;
                    }
                }
            }
        }
        report("binomial summation identity", pass, cases);
    }

    {
        bool pass = true;
        long cases = 0;
        for (std::int64_t n = 0; n <= 4; ++n) {
            for (std::int64_t k = 0; k <= n; ++k) {
                for (std::int64_t n2 = 0; n2 <= 4; ++n2) {
                    for (std::int64_t k2 = 0; k2 <= n2; ++k2) {
                        const Rational closed =
                            make_rational(oracle::binom(k + k2, k) *
                                              oracle::binom(n - k + n2 - k2, n - k),
                                          oracle::binom(n + n2 + 1, n + 1));
                        for (std::int64_t N = n + n2; N <= args.invariance_n; ++N) {
                            if (N < 1) continue;
                            ++cases;
                            if (oracle::second_sample_prob(N, n, k, n2, k2) != closed) {
                                pass = false;
                            }
                        }
                    }
                }
            }
        }
        report("second-sample probability is urn-size invariant", pass, cases);
    }

    {
        bool pass = true;
        long cases = 0;
        for (std::int64_t n = 0; n + 0 <= 30; ++n) {
            for (std::int64_t m = 0; n + m <= 30; ++m) {
                for (std::int64_t k = 0; k <= n; ++k) {
                    ++cases;
                    if (oracle::expected_future_successes(n, k, m) !=
                        Rational(m) * make_rational(k + 1, n + 2)) {
                        pass = false;
                    }
                }
            }
        }
        report("future-success mean equals m(k+1)/(n+2)", pass, cases);
    }

    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"succession: exact-arithmetic trust and reputation toolkit"};
    app.require_subcommand(1);

    TrustArgs trust_args;
    auto* trust_cmd = app.add_subcommand("trust", "Trust measure of a reputation score");
    trust_cmd->add_option("--n", trust_args.n, "total transactions")->required();
    trust_cmd->add_option("--k", trust_args.k, "fulfilled transactions")->required();

    UpdateArgs update_args;
    auto* update_cmd = app.add_subcommand("update", "Fold a new epoch into a score");
    update_cmd->add_option("--n", update_args.n, "current total")->required();
    update_cmd->add_option("--k", update_args.k, "current fulfilled")->required();
    update_cmd->add_option("--dn", update_args.dn, "new transactions")->required();
    update_cmd->add_option("--dk", update_args.dk, "new fulfilled")->required();

    DiscountArgs discount_args;
    auto* discount_cmd = app.add_subcommand("discount", "Discounted trust over epochs");
    discount_cmd->add_option("--scheme", discount_args.scheme, "1: weighted counts, 2: weighted trusts")
        ->check(CLI::IsMember({1, 2}))
        ->required();
    discount_cmd->add_option("--epochs", discount_args.epochs_path, "JSON array of epochs")->required();
    discount_cmd->add_option("--weights", discount_args.weights_path, "JSON array of rationals")->required();
    discount_cmd->add_flag("--normalize", discount_args.normalize, "rescale weights to sum 1");

    PredictArgs predict_args;
    auto* predict_cmd = app.add_subcommand("predict", "Expected successes among the next m");
    predict_cmd->add_option("--n", predict_args.n, "total transactions")->required();
    predict_cmd->add_option("--k", predict_args.k, "fulfilled transactions")->required();
    predict_cmd->add_option("--m", predict_args.m, "future transactions")->required();
    predict_cmd->add_option("--horizon", predict_args.horizon, "horizon tick (default 0)");

    SimulateArgs simulate_args;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run a marketplace scenario");
    simulate_cmd
        ->add_option("--scenario", simulate_args.scenario,
                     "price_segments|service_segments|discounting|long_term")
        ->required();
    simulate_cmd->add_option("--mode", simulate_args.mode, "fixed_counts|bernoulli|urn");
    simulate_cmd->add_option("--seed", simulate_args.seed, "RNG seed");
    simulate_cmd->add_option("--replications", simulate_args.replications, "replication count");
    simulate_cmd->add_option("--out", simulate_args.out, "output path, '-' for stdout");
    simulate_cmd->add_option("--format", simulate_args.format, "csv|json");
    simulate_cmd->add_option("--tx-per-epoch", simulate_args.tx_per_epoch, "discounting only");
    simulate_cmd->add_option("--history-n", simulate_args.history_n, "long_term only");
    simulate_cmd->add_option("--future-m", simulate_args.future_m, "long_term only");
    simulate_cmd->add_option("--history-rate", simulate_args.history_rate,
                             "long_term phase-1 success probability");
    simulate_cmd->add_option("--urn-factor", simulate_args.urn_factor, "urn size multiplier");

    LedgerArgs ledger_args;
    auto* ledger_cmd = app.add_subcommand("ledger", "Hash-chained transaction log");
    ledger_cmd->require_subcommand(1);
    auto add_chain_opt = [&](CLI::App* cmd) {
        cmd->add_option("--chain", ledger_args.chain, "chain file (default: $TRUST_CHAIN)");
    };
    auto* append_cmd = ledger_cmd->add_subcommand("append", "Append a block of records");
    add_chain_opt(append_cmd);
    append_cmd->add_option("--records", ledger_args.records_path, "JSON-lines records file");
    append_cmd->add_option("--boundaries", ledger_args.boundaries,
                           "price boundaries for a new chain, e.g. 10,100,1000");
    auto* query_cmd = ledger_cmd->add_subcommand("query", "Per-seller per-segment reputation");
    add_chain_opt(query_cmd);
    query_cmd->add_option("--seller", ledger_args.seller, "seller id");
    query_cmd->add_option("--segment", ledger_args.segment, "price:<index> or service:<name>");
    query_cmd->add_option("--from", ledger_args.from, "window start tick");
    query_cmd->add_option("--to", ledger_args.to, "window end tick (exclusive)");
    query_cmd->add_option("--slices", ledger_args.slices, "epoch boundaries, e.g. 0,250,500");
    query_cmd->add_option("--epochs-out", ledger_args.epochs_out,
                          "also write slices as a discount-ready epochs file");
    auto* chain_verify_cmd = ledger_cmd->add_subcommand("verify", "Check hashes and linkage");
    add_chain_opt(chain_verify_cmd);

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "Run the exhaustive urn-oracle suites");
    verify_cmd->add_option("--max-N", verify_args.max_n, "largest urn size for the closed-form sweep");
    verify_cmd->add_option("--two-sample-N", verify_args.two_sample_n,
                           "largest urn size for the exhaustive two-sample sweep");
    verify_cmd->add_option("--grid", verify_args.grid, "bound for the identity grids");
    verify_cmd->add_option("--invariance-N", verify_args.invariance_n,
                           "largest urn size for the invariance sweep");

    try {
        app.parse(argc, argv);

        if (*trust_cmd) run_trust(trust_args);
        if (*update_cmd) run_update(update_args);
        if (*discount_cmd) run_discount(discount_args);
        if (*predict_cmd) run_predict(predict_args);
        if (*simulate_cmd) run_simulate(simulate_args);
        if (*ledger_cmd) {
            if (append_cmd->parsed()) run_ledger_append(ledger_args);
            if (query_cmd->parsed()) run_ledger_query(ledger_args);
            if (chain_verify_cmd->parsed()) return run_ledger_verify(ledger_args);
        }
        if (*verify_cmd) return run_verify(verify_args);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
