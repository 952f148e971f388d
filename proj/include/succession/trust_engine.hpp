#pragma once

#include "succession/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace succession {

// Discrete time. Intervals are half-open: [start, end).
struct TickInterval {
    std::int64_t start = 0;
    std::int64_t end = 0;
    friend bool operator==(const TickInterval&, const TickInterval&) = default;
};

// A seller's record over a window: n total transactions, k fulfilled.
struct ReputationScore {
    std::int64_t n = 0;
    std::int64_t k = 0;
    TickInterval window{};
    friend bool operator==(const ReputationScore&, const ReputationScore&) = default;
};

// Per-epoch tally; sequences of epochs must be contiguous and ordered
// (epoch[i].end == epoch[i+1].start) where an operation says so.
struct EpochScore {
    std::int64_t n = 0;
    std::int64_t k = 0;
    TickInterval epoch{};
    friend bool operator==(const EpochScore&, const EpochScore&) = default;
};

// Probability that the seller fulfills her obligations on the next
// transaction. Exact rational, lowest terms, strictly inside (0, 1).
class TrustMeasure {
public:
    explicit TrustMeasure(Rational value);

    const Rational& value() const noexcept { return value_; }
    Integer numerator() const { return Integer(value_.get_num()); }
    Integer denominator() const { return Integer(value_.get_den()); }

    friend bool operator==(const TrustMeasure& a, const TrustMeasure& b) { return a.value_ == b.value_; }
    friend bool operator!=(const TrustMeasure& a, const TrustMeasure& b) { return a.value_ != b.value_; }
    friend bool operator<(const TrustMeasure& a, const TrustMeasure& b) { return a.value_ < b.value_; }
    friend bool operator<=(const TrustMeasure& a, const TrustMeasure& b) { return a.value_ <= b.value_; }
    friend bool operator>(const TrustMeasure& a, const TrustMeasure& b) { return a.value_ > b.value_; }
    friend bool operator>=(const TrustMeasure& a, const TrustMeasure& b) { return a.value_ >= b.value_; }

private:
    Rational value_;
};

// Expected outcome of the next m transactions, pinned to a horizon tick.
struct Prediction {
    std::int64_t m = 0;
    Rational expected_k{};
    std::int64_t horizon_tick = 0;
};

// Throw std::domain_error unless 0 <= k <= n and start <= end.
void validate(const ReputationScore& score);
void validate(const EpochScore& epoch);

// Trust from a score: exactly (k+1)/(n+2).
TrustMeasure trust(const ReputationScore& score);

// Fold a subsequent epoch into a score. The delta epoch must start where
// the score window ends; an empty delta (n' = 0) is the identity on counts.
ReputationScore update(const ReputationScore& score, const EpochScore& delta);

// Fold a non-empty contiguous run of epochs into one score.
ReputationScore aggregate(std::span<const EpochScore> epochs);

// True iff folding delta in does not lower the trust measure, decided by
// the ratio test k'/n' >= (k+1)/(n+2). Requires delta.n >= 1.
bool improves(const ReputationScore& score, const EpochScore& delta);

// Count-weighted discounting: sum(lambda_i*(k_i+1)) / sum(lambda_i*(n_i+2)).
// Lambdas are non-negative with a positive sum; one per epoch.
TrustMeasure discount_scheme1(std::span<const EpochScore> epochs, std::span<const Rational> lambdas);

// Convex combination of the per-epoch trust measures. Weights are
// non-negative and must sum to exactly 1; no silent normalization.
TrustMeasure discount_scheme2(std::span<const EpochScore> epochs, std::span<const Rational> weights);

// lambda_i / sum(lambda) for callers that want scheme-2 weights from a raw
// lambda vector (the CLI --normalize path).
std::vector<Rational> normalize_weights(std::span<const Rational> lambdas);

// Expected fulfilled count among the next m transactions: m*(k+1)/(n+2).
Rational predict_expected_successes(const ReputationScore& score, std::int64_t m);

// Expected reputation at a horizon at/after the window end.
Prediction predict_score(const ReputationScore& score, std::int64_t m, std::int64_t horizon_tick);

// Trust of the predicted score, (k + expected_k + 1)/(n + m + 2);
// algebraically identical to trust(score).
Rational predicted_trust(const ReputationScore& score, const Prediction& prediction);

} // namespace succession
