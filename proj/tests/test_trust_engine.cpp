#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "succession/rng.hpp"
#include "succession/trust_engine.hpp"
#include "succession/urn_oracle.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

using namespace succession;

namespace {

ReputationScore score_of(std::int64_t n, std::int64_t k) {
    return ReputationScore{n, k, TickInterval{0, 1}};
}

// Re-stamp counts as a contiguous unit-tick epoch run.
std::vector<EpochScore> epochs_of(const std::vector<std::pair<std::int64_t, std::int64_t>>& counts) {
    std::vector<EpochScore> epochs;
    std::int64_t t = 0;
    for (const auto& [n, k] : counts) {
        epochs.push_back(EpochScore{n, k, TickInterval{t, t + 1}});
        ++t;
    }
    return epochs;
}

} // namespace

TEST_CASE("trust is exactly (k+1)/(n+2), in lowest terms") {
    CHECK(trust(score_of(0, 0)).value() == make_rational(1, 2));
    CHECK(trust(score_of(100, 85)).value() == make_rational(86, 102));
    CHECK(trust(score_of(1, 1)).value() == make_rational(2, 3));
    CHECK(trust(score_of(93, 92)).value() == make_rational(93, 95));

    const TrustMeasure m = trust(score_of(100, 85));
    CHECK(m.numerator() == 43);
    CHECK(m.denominator() == 51);

    CHECK_THROWS_AS(trust(score_of(3, 5)), std::domain_error);
    CHECK_THROWS_AS(trust(ReputationScore{2, 1, {5, 3}}), std::domain_error);
    CHECK_THROWS_AS(trust(ReputationScore{-1, 0, {0, 1}}), std::domain_error);
}

TEST_CASE("trust matches the urn summation for every urn size") {
    for (std::int64_t N = 1; N <= 10; ++N) {
        for (std::int64_t n = 0; n < N; ++n) {
            for (std::int64_t k = 0; k <= n; ++k) {
                CHECK(trust(score_of(n, k)).value() == oracle::next_black_prob(N, n, k));
            }
        }
    }
}

TEST_CASE("update folds counts and merges windows") {
    const ReputationScore base{2, 1, {0, 10}};
    const ReputationScore merged = update(base, EpochScore{2, 2, {10, 20}});
    CHECK(merged == ReputationScore{4, 3, {0, 20}});
    CHECK(trust(merged).value() == make_rational(4, 6));

    // cross-check against the two-sample urn summation
    for (std::int64_t N = 5; N <= 30; ++N) {
        CHECK(trust(merged).value() == oracle::next_black_prob_two_samples(N, 2, 1, 2, 2));
    }

    const ReputationScore same = update(ReputationScore{5, 3, {0, 4}}, EpochScore{0, 0, {4, 9}});
    CHECK(same.n == 5);
    CHECK(same.k == 3);
    CHECK(same.window == TickInterval{0, 9});
    CHECK(trust(same).value() == trust(ReputationScore{5, 3, {0, 4}}).value());

    const ReputationScore fresh = update(ReputationScore{0, 0, {0, 0}}, EpochScore{100, 85, {0, 250}});
    CHECK(trust(fresh).value() == make_rational(86, 102));

    CHECK_THROWS_AS(update(base, EpochScore{1, 1, {11, 12}}), std::domain_error);
    CHECK_THROWS_AS(update(base, EpochScore{1, 2, {10, 12}}), std::domain_error);
}

TEST_CASE("update equals the pooled two-sample posterior everywhere small") {
    for (std::int64_t N = 2; N <= 8; ++N) {
        for (std::int64_t n = 0; n <= N; ++n) {
            for (std::int64_t n2 = 0; n + n2 < N; ++n2) {
                for (std::int64_t k = 0; k <= n; ++k) {
                    for (std::int64_t k2 = 0; k2 <= n2; ++k2) {
                        const ReputationScore merged =
                            update(ReputationScore{n, k, {0, 1}}, EpochScore{n2, k2, {1, 2}});
                        CHECK(trust(merged).value() ==
                              oracle::next_black_prob_two_samples(N, n, k, n2, k2));
                    }
                }
            }
        }
    }
}

TEST_CASE("aggregate sums contiguous epochs") {
    const auto epochs = epochs_of({{3, 3}, {1, 1}});
    const ReputationScore total = aggregate(epochs);
    CHECK(total.n == 4);
    CHECK(total.k == 4);
    CHECK(trust(total).value() == make_rational(5, 6));

    const auto single = epochs_of({{7, 4}});
    CHECK(aggregate(single) == ReputationScore{7, 4, {0, 1}});

    CHECK_THROWS_AS(aggregate(std::vector<EpochScore>{}), std::domain_error);

    std::vector<EpochScore> gapped{{2, 1, {0, 5}}, {2, 2, {6, 9}}};
    CHECK_THROWS_AS(aggregate(gapped), std::domain_error);
    std::vector<EpochScore> overlapping{{2, 1, {0, 5}}, {2, 2, {4, 9}}};
    CHECK_THROWS_AS(aggregate(overlapping), std::domain_error);
}

TEST_CASE("aggregate is invariant under epoch permutation") {
    std::vector<std::pair<std::int64_t, std::int64_t>> counts{{4, 1}, {3, 3}, {5, 0}, {2, 2}};
    const Rational reference = trust(aggregate(epochs_of(counts))).value();
    std::sort(counts.begin(), counts.end());
    do {
        CHECK(trust(aggregate(epochs_of(counts))).value() == reference);
    } while (std::next_permutation(counts.begin(), counts.end()));
}

TEST_CASE("aggregate is invariant under moving all successes into the last epoch") {
    // whenever the pooled successes fit there
    for (std::int64_t n1 = 0; n1 <= 4; ++n1) {
        for (std::int64_t k1 = 0; k1 <= n1; ++k1) {
            for (std::int64_t n2 = 0; n2 <= 4; ++n2) {
                for (std::int64_t k2 = 0; k2 <= n2; ++k2) {
                    if (k1 + k2 > n2) continue;
                    const Rational a = trust(aggregate(epochs_of({{n1, k1}, {n2, k2}}))).value();
                    const Rational b = trust(aggregate(epochs_of({{n1, 0}, {n2, k1 + k2}}))).value();
                    CHECK(a == b);
                }
            }
        }
    }
}

TEST_CASE("aggregate is invariant under swapping success counts between epochs") {
    for (std::int64_t n1 = 0; n1 <= 4; ++n1) {
        for (std::int64_t k1 = 0; k1 <= n1; ++k1) {
            for (std::int64_t n2 = 0; n2 <= 4; ++n2) {
                for (std::int64_t k2 = 0; k2 <= n2; ++k2) {
                    if (k2 > n1 || k1 > n2) continue;
                    const Rational a = trust(aggregate(epochs_of({{n1, k1}, {n2, k2}}))).value();
                    const Rational b = trust(aggregate(epochs_of({{n1, k2}, {n2, k1}}))).value();
                    CHECK(a == b);
                }
            }
        }
    }
}

TEST_CASE("improves: ratio test examples") {
    CHECK(improves(score_of(2, 1), EpochScore{2, 2, {1, 2}}));
    CHECK(improves(score_of(2, 1), EpochScore{2, 1, {1, 2}})); // equality boundary
    const ReputationScore boundary = update(ReputationScore{2, 1, {0, 1}}, EpochScore{2, 1, {1, 2}});
    CHECK(trust(boundary).value() == make_rational(1, 2));
    CHECK_FALSE(improves(score_of(0, 0), EpochScore{4, 1, {1, 2}}));
    CHECK_THROWS_AS(improves(score_of(2, 1), EpochScore{0, 0, {1, 2}}), std::domain_error);
}

TEST_CASE("improves agrees with comparing trust before and after") {
    for (std::int64_t n = 0; n <= 12; ++n) {
        for (std::int64_t k = 0; k <= n; ++k) {
            for (std::int64_t n2 = 1; n2 <= 12; ++n2) {
                for (std::int64_t k2 = 0; k2 <= n2; ++k2) {
                    const ReputationScore score{n, k, {0, 1}};
                    const EpochScore delta{n2, k2, {1, 2}};
                    const bool claimed = improves(score, delta);
                    const bool actual = trust(update(score, delta)).value() >= trust(score).value();
                    CHECK(claimed == actual);
                }
            }
        }
    }
}

TEST_CASE("mediant inequality holds for random non-negative operands") {
    SplitMix64 rng(314159);
    for (int i = 0; i < 10000; ++i) {
        const std::int64_t a = static_cast<std::int64_t>(rng.uniform_below(std::uint64_t{1000000}));
        const std::int64_t a2 = static_cast<std::int64_t>(rng.uniform_below(std::uint64_t{1000000}));
        const std::int64_t b = 1 + static_cast<std::int64_t>(rng.uniform_below(std::uint64_t{1000000}));
        const std::int64_t b2 = 1 + static_cast<std::int64_t>(rng.uniform_below(std::uint64_t{1000000}));
        const bool lhs = make_rational(a + a2, b + b2) >= make_rational(a, b);
        const bool rhs = make_rational(a2, b2) >= make_rational(a, b);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("discount scheme 1: weighted counts") {
    const auto epochs = epochs_of({{10, 5}, {10, 9}});
    const std::vector<Rational> ones{Rational(1), Rational(1)};
    CHECK(discount_scheme1(epochs, ones).value() == make_rational(16, 24));

    // trailing unit lambda reduces to the last epoch's trust
    const std::vector<Rational> last_only{Rational(0), Rational(1)};
    CHECK(discount_scheme1(epochs, last_only).value() == trust(score_of(10, 9)).value());

    // equal lambdas cancel
    const std::vector<Rational> halves{make_rational(1, 2), make_rational(1, 2)};
    CHECK(discount_scheme1(epochs, halves).value() == discount_scheme1(epochs, ones).value());

    const std::vector<Rational> zeros{Rational(0), Rational(0)};
    CHECK_THROWS_AS(discount_scheme1(epochs, zeros), std::domain_error);
    const std::vector<Rational> negative{Rational(1), Rational(-1)};
    CHECK_THROWS_AS(discount_scheme1(epochs, negative), std::domain_error);
    const std::vector<Rational> short_vec{Rational(1)};
    CHECK_THROWS_AS(discount_scheme1(epochs, short_vec), std::domain_error);
}

TEST_CASE("discount scheme 2: weighted trusts, exact unit sum required") {
    const auto epochs = epochs_of({{10, 5}, {10, 9}});
    const std::vector<Rational> halves{make_rational(1, 2), make_rational(1, 2)};
    CHECK(discount_scheme2(epochs, halves).value() == make_rational(2, 3));

    const std::vector<Rational> last_only{Rational(0), Rational(1)};
    CHECK(discount_scheme2(epochs, last_only).value() == trust(score_of(10, 9)).value());

    // six equal 0.17 weights sum to 1.02, not 1: rejected outright
    const auto six = epochs_of({{10, 5}, {10, 6}, {10, 7}, {10, 7}, {10, 8}, {10, 9}});
    const std::vector<Rational> seventeen(6, make_rational(17, 100));
    CHECK_THROWS_AS(discount_scheme2(six, seventeen), std::domain_error);

    // ...unless normalized first
    const std::vector<Rational> normalized = normalize_weights(seventeen);
    Rational weight_sum = std::accumulate(normalized.begin(), normalized.end(), Rational(0));
    CHECK(weight_sum == 1);
    for (const Rational& w : normalized) CHECK(w == make_rational(1, 6));
    CHECK_NOTHROW(discount_scheme2(six, normalized));

    CHECK_THROWS_AS(normalize_weights(std::vector<Rational>{Rational(0)}), std::domain_error);
}

TEST_CASE("both discount schemes stay inside the per-epoch trust envelope") {
    SplitMix64 rng(271828);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t r = 1 + rng.uniform_below(std::uint64_t{6});
        std::vector<EpochScore> epochs;
        std::vector<Rational> lambdas;
        bool any_positive = false;
        std::int64_t t = 0;
        for (std::size_t i = 0; i < r; ++i) {
            const std::int64_t n = static_cast<std::int64_t>(rng.uniform_below(std::uint64_t{60}));
            const std::int64_t k =
                static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(n) + 1));
            epochs.push_back(EpochScore{n, k, {t, t + 1}});
            ++t;
            const std::int64_t raw = static_cast<std::int64_t>(rng.uniform_below(std::uint64_t{5}));
            lambdas.push_back(make_rational(raw, 4));
            if (raw > 0) any_positive = true;
        }
        if (!any_positive) lambdas.back() = Rational(1);

        Rational lo, hi;
        for (std::size_t i = 0; i < r; ++i) {
            const Rational tr = trust(score_of(epochs[i].n, epochs[i].k)).value();
            if (i == 0 || tr < lo) lo = tr;
            if (i == 0 || tr > hi) hi = tr;
        }

        const Rational d1 = discount_scheme1(epochs, lambdas).value();
        CHECK(d1 >= lo);
        CHECK(d1 <= hi);
        const Rational d2 = discount_scheme2(epochs, normalize_weights(lambdas)).value();
        CHECK(d2 >= lo);
        CHECK(d2 <= hi);
    }
}

TEST_CASE("prediction: expected successes") {
    CHECK(predict_expected_successes(score_of(2, 1), 4) == 2);
    CHECK(predict_expected_successes(score_of(2, 1), 4) == oracle::expected_future_successes(2, 1, 4));
    CHECK(predict_expected_successes(score_of(9, 4), 0) == 0);
    CHECK(predict_expected_successes(score_of(100, 85), 100) == make_rational(4300, 51));
    CHECK(predict_expected_successes(score_of(100, 85), 100) ==
          oracle::expected_future_successes(100, 85, 100));
    CHECK(predict_expected_successes(score_of(93, 92), 7) == make_rational(651, 95));
    CHECK(predict_expected_successes(score_of(93, 92), 7) ==
          oracle::expected_future_successes(93, 92, 7));
    CHECK_THROWS_AS(predict_expected_successes(score_of(2, 1), -1), std::domain_error);
}

TEST_CASE("prediction: horizon score and trust invariance") {
    const ReputationScore score{2, 1, {0, 5}};
    const Prediction p = predict_score(score, 4, 10);
    CHECK(p.m == 4);
    CHECK(p.expected_k == 2);
    CHECK(p.horizon_tick == 10);
    CHECK(predicted_trust(score, p) == make_rational(1, 2));
    CHECK(predicted_trust(score, p) == trust(score).value());

    const Prediction uninformed = predict_score(score_of(0, 0), 10, 1);
    CHECK(uninformed.expected_k == 5);

    CHECK_THROWS_AS(predict_score(score, 4, 4), std::domain_error);
    CHECK_NOTHROW(predict_score(score, 4, 5)); // window end itself is outside [start, end)
}

TEST_CASE("predicted trust equals current trust over a small sweep") {
    for (std::int64_t n = 0; n <= 15; ++n) {
        for (std::int64_t k = 0; k <= n; ++k) {
            for (std::int64_t m = 0; m <= 15; ++m) {
                const ReputationScore score{n, k, {0, 1}};
                const Prediction p = predict_score(score, m, 1 + m);
                CHECK(predicted_trust(score, p) == trust(score).value());
            }
        }
    }
}

TEST_CASE("trust is linear in k and hyperbolic in n") {
    for (std::int64_t n = 0; n <= 40; ++n) {
        for (std::int64_t k = 0; k < n; ++k) {
            const Rational step =
                trust(score_of(n, k + 1)).value() - trust(score_of(n, k)).value();
            CHECK(step == make_rational(1, n + 2));
        }
    }
    for (std::int64_t k = 0; k <= 20; ++k) {
        for (std::int64_t n = k; n <= 40; ++n) {
            const Rational drop =
                trust(score_of(n, k)).value() - trust(score_of(n + 1, k)).value();
            CHECK(drop == Rational(k + 1) * (make_rational(1, n + 2) - make_rational(1, n + 3)));
        }
    }
}
