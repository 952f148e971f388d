#include "succession/trust_engine.hpp"

#include <stdexcept>

namespace succession {

namespace {

void require(bool condition, const char* message) {
    if (!condition) throw std::domain_error(message);
}

} // namespace

TrustMeasure::TrustMeasure(Rational value) : value_(std::move(value)) {
    value_.canonicalize();
    if (sgn(value_) <= 0 || value_ >= 1) {
        throw std::domain_error("trust measure outside (0, 1)");
    }
}

void validate(const ReputationScore& score) {
    require(score.n >= 0 && score.k >= 0, "reputation score: negative count");
    require(score.k <= score.n, "reputation score: k exceeds n");
    require(score.window.start <= score.window.end, "reputation score: inverted window");
}

void validate(const EpochScore& epoch) {
    require(epoch.n >= 0 && epoch.k >= 0, "epoch score: negative count");
    require(epoch.k <= epoch.n, "epoch score: k exceeds n");
    require(epoch.epoch.start <= epoch.epoch.end, "epoch score: inverted interval");
}

TrustMeasure trust(const ReputationScore& score) {
    validate(score);
    return TrustMeasure(make_rational(score.k + 1, score.n + 2));
}

ReputationScore update(const ReputationScore& score, const EpochScore& delta) {
    validate(score);
    validate(delta);
    require(delta.epoch.start == score.window.end, "update: delta epoch not contiguous with score window");
    return ReputationScore{score.n + delta.n, score.k + delta.k,
                           TickInterval{score.window.start, delta.epoch.end}};
}

ReputationScore aggregate(std::span<const EpochScore> epochs) {
    require(!epochs.empty(), "aggregate: empty epoch sequence");
    for (const EpochScore& epoch : epochs) validate(epoch);
    for (std::size_t i = 0; i + 1 < epochs.size(); ++i) {
        require(epochs[i].epoch.end == epochs[i + 1].epoch.start, "aggregate: gap or overlap between epochs");
    }
    ReputationScore total{0, 0, TickInterval{epochs.front().epoch.start, epochs.back().epoch.end}};
    for (const EpochScore& epoch : epochs) {
        total.n += epoch.n;
        total.k += epoch.k;
    }
    return total;
}

bool improves(const ReputationScore& score, const EpochScore& delta) {
    validate(score);
    validate(delta);
    require(delta.n >= 1, "improves: empty delta has no success ratio");
    return make_rational(delta.k, delta.n) >= trust(score).value();
}

TrustMeasure discount_scheme1(std::span<const EpochScore> epochs, std::span<const Rational> lambdas) {
    require(epochs.size() == lambdas.size(), "discount: one lambda per epoch required");
    Rational num = 0;
    Rational den = 0;
    Rational lambda_sum = 0;
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        validate(epochs[i]);
        require(sgn(lambdas[i]) >= 0, "discount: negative lambda");
        num += lambdas[i] * Rational(epochs[i].k + 1);
        den += lambdas[i] * Rational(epochs[i].n + 2);
        lambda_sum += lambdas[i];
    }
    require(sgn(lambda_sum) > 0, "discount: lambdas sum to zero");
    return TrustMeasure(num / den);
}

TrustMeasure discount_scheme2(std::span<const EpochScore> epochs, std::span<const Rational> weights) {
    require(epochs.size() == weights.size(), "discount: one weight per epoch required");
    Rational sum = 0;
    Rational weight_sum = 0;
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        validate(epochs[i]);
        require(sgn(weights[i]) >= 0, "discount: negative weight");
        sum += weights[i] * make_rational(epochs[i].k + 1, epochs[i].n + 2);
        weight_sum += weights[i];
    }
    require(weight_sum == 1, "discount: weights must sum to exactly 1");
    return TrustMeasure(sum);
}

std::vector<Rational> normalize_weights(std::span<const Rational> lambdas) {
    Rational sum = 0;
    for (const Rational& lambda : lambdas) {
        require(sgn(lambda) >= 0, "normalize: negative lambda");
        sum += lambda;
    }
    require(sgn(sum) > 0, "normalize: lambdas sum to zero");
    std::vector<Rational> weights;
    weights.reserve(lambdas.size());
    for (const Rational& lambda : lambdas) weights.push_back(lambda / sum);
    return weights;
}

Rational predict_expected_successes(const ReputationScore& score, std::int64_t m) {
    validate(score);
    require(m >= 0, "predict: negative transaction count");
    return Rational(m) * make_rational(score.k + 1, score.n + 2);
}

Prediction predict_score(const ReputationScore& score, std::int64_t m, std::int64_t horizon_tick) {
    validate(score);
    require(m >= 0, "predict: negative transaction count");
    require(horizon_tick >= score.window.end, "predict: horizon inside score window");
    return Prediction{m, predict_expected_successes(score, m), horizon_tick};
}

Rational predicted_trust(const ReputationScore& score, const Prediction& prediction) {
    validate(score);
    return (Rational(score.k) + prediction.expected_k + 1) / Rational(score.n + prediction.m + 2);
}

} // namespace succession
