#include "succession/urn_oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace succession::oracle {

namespace {

void require(bool condition, const char* message) {
    if (!condition) throw std::domain_error(message);
}

void check_sample(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks) {
    require(urn_size >= 1, "urn: size must be positive");
    require(blacks >= 0 && blacks <= draws, "urn: blacks outside [0, draws]");
    require(draws <= urn_size, "urn: more draws than balls");
}

// Likelihood numerator of hypothesis i for a (draws, blacks) sample; the
// common factor 1/C(urn_size, draws) cancels everywhere it is used.
Integer hypothesis_weight(std::int64_t i, std::int64_t urn_size,
                          std::int64_t draws, std::int64_t blacks) {
    return binom(i, blacks) * binom(urn_size - i, draws - blacks);
}

} // namespace

Integer binom(std::int64_t a, std::int64_t b) {
    if (a < 0 || b < 0 || b > a) return 0;
    Integer result;
    mpz_bin_uiui(result.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
    return result;
}

bool check_product_identity(std::int64_t r, std::int64_t s, std::int64_t t) {
    require(r >= 0 && s >= 0 && t >= 0, "product identity: negative argument");
    return binom(r, s) * binom(r - s, t) == binom(s + t, s) * binom(r, s + t);
}

std::optional<bool> check_summation_identity(std::int64_t r, std::int64_t s,
                                             std::int64_t n, std::int64_t m) {
    if (r < 0 || s < 0 || n < 0 || m < 0 || r > n) return std::nullopt;
    Integer sum = 0;
    for (std::int64_t k = 0; k <= s; ++k) {
        sum += binom(r + k, n) * binom(s - k, m);
    }
    return sum == binom(r + s + 1, n + m + 1);
}

Distribution uniform_prior(std::int64_t urn_size) {
    require(urn_size >= 1, "urn: size must be positive");
    return Distribution(static_cast<std::size_t>(urn_size) + 1,
                        make_rational(1, urn_size + 1));
}

Distribution posterior(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks) {
    check_sample(urn_size, draws, blacks);

    std::vector<Integer> weights(static_cast<std::size_t>(urn_size) + 1);
    Integer weight_sum = 0;
    for (std::int64_t i = 0; i <= urn_size; ++i) {
        weights[static_cast<std::size_t>(i)] = hypothesis_weight(i, urn_size, draws, blacks);
        weight_sum += weights[static_cast<std::size_t>(i)];
    }

    // Two routes to the normalizer: the Bayes denominator summed above and
    // the closed-form binomial. They must agree exactly.
    const Integer closed_normalizer = binom(urn_size + 1, draws + 1);
    if (weight_sum != closed_normalizer) {
        throw std::logic_error("posterior: normalizer sum disagrees with closed form");
    }

    Distribution dist(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        dist[i] = make_rational(weights[i], closed_normalizer);
    }
    return dist;
}

Rational next_black_prob(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks) {
    check_sample(urn_size, draws, blacks);
    require(draws < urn_size, "urn: exhausted, no next ball");

    const Distribution dist = posterior(urn_size, draws, blacks);
    const Rational remaining(urn_size - draws);
    Rational prob = 0;
    for (std::int64_t i = blacks; i <= urn_size; ++i) {
        prob += Rational(i - blacks) / remaining * dist[static_cast<std::size_t>(i)];
    }
    return prob;
}

Distribution posterior_two_samples(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks,
                                   std::int64_t second_draws, std::int64_t second_blacks) {
    check_sample(urn_size, draws, blacks);
    require(second_blacks >= 0 && second_blacks <= second_draws, "urn: second blacks outside range");
    require(draws + second_draws <= urn_size, "urn: combined sample exceeds balls");

    // Sequential route: reweight the first-sample posterior by the second
    // sample's likelihood, then normalize.
    const std::int64_t pooled_draws = draws + second_draws;
    const std::int64_t pooled_blacks = blacks + second_blacks;
    std::vector<Integer> sequential(static_cast<std::size_t>(urn_size) + 1);
    Integer sequential_sum = 0;
    for (std::int64_t i = 0; i <= urn_size; ++i) {
        const Integer first = hypothesis_weight(i, urn_size, draws, blacks);
        const Integer second = binom(i - blacks, second_blacks) *
                               binom(urn_size - i - (draws - blacks), second_draws - second_blacks);
        sequential[static_cast<std::size_t>(i)] = first * second;
        sequential_sum += sequential[static_cast<std::size_t>(i)];
    }
    require(sequential_sum > 0, "urn: impossible second sample");

    // Closed-form route, which is also the pooled single-sample posterior.
    const Integer pooled_normalizer = binom(urn_size + 1, pooled_draws + 1);
    Distribution dist(sequential.size());
    for (std::int64_t i = 0; i <= urn_size; ++i) {
        const std::size_t idx = static_cast<std::size_t>(i);
        dist[idx] = make_rational(hypothesis_weight(i, urn_size, pooled_draws, pooled_blacks),
                                  pooled_normalizer);
        if (dist[idx] != make_rational(sequential[idx], sequential_sum)) {
            throw std::logic_error("posterior_two_samples: sequential and closed form disagree");
        }
    }
    return dist;
}

Rational next_black_prob_two_samples(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks,
                                     std::int64_t second_draws, std::int64_t second_blacks) {
    require(draws + second_draws < urn_size, "urn: exhausted, no next ball");
    const Distribution dist =
        posterior_two_samples(urn_size, draws, blacks, second_draws, second_blacks);
    const std::int64_t seen_blacks = blacks + second_blacks;
    const Rational remaining(urn_size - draws - second_draws);
    Rational prob = 0;
    for (std::int64_t i = seen_blacks; i <= urn_size; ++i) {
        prob += Rational(i - seen_blacks) / remaining * dist[static_cast<std::size_t>(i)];
    }
    return prob;
}

Rational second_sample_prob(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks,
                            std::int64_t second_draws, std::int64_t second_blacks) {
    check_sample(urn_size, draws, blacks);
    require(second_blacks >= 0 && second_blacks <= second_draws, "urn: second blacks outside range");
    require(draws + second_draws <= urn_size, "urn: combined sample exceeds balls");

    const Distribution first = posterior(urn_size, draws, blacks);
    const Integer choices = binom(urn_size - draws, second_draws);
    Rational prob = 0;
    for (std::int64_t j = 0; j <= urn_size; ++j) {
        const Integer ways = binom(j - blacks, second_blacks) *
                             binom(urn_size - j - (draws - blacks), second_draws - second_blacks);
        prob += make_rational(ways, choices) * first[static_cast<std::size_t>(j)];
    }
    return prob;
}

Rational marginal_sample_prob(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks) {
    check_sample(urn_size, draws, blacks);
    const Integer choices = binom(urn_size, draws);
    Rational prob = 0;
    for (std::int64_t j = 0; j <= urn_size; ++j) {
        prob += make_rational(hypothesis_weight(j, urn_size, draws, blacks), choices) *
                make_rational(1, urn_size + 1);
    }
    return prob;
}

Distribution future_success_dist(std::int64_t draws, std::int64_t blacks, std::int64_t future_draws) {
    require(blacks >= 0 && blacks <= draws, "urn: blacks outside [0, draws]");
    require(future_draws >= 0, "urn: negative draw count");

    const Integer normalizer = binom(draws + future_draws + 1, draws + 1);
    Distribution dist(static_cast<std::size_t>(future_draws) + 1);
    Rational sum = 0;
    for (std::int64_t r = 0; r <= future_draws; ++r) {
        dist[static_cast<std::size_t>(r)] =
            make_rational(binom(blacks + r, blacks) *
                              binom(draws - blacks + future_draws - r, draws - blacks),
                          normalizer);
        sum += dist[static_cast<std::size_t>(r)];
    }
    if (sum != 1) throw std::logic_error("future_success_dist: entries do not sum to 1");
    return dist;
}

Rational expected_future_successes(std::int64_t draws, std::int64_t blacks, std::int64_t future_draws) {
    const Distribution dist = future_success_dist(draws, blacks, future_draws);
    Rational mean = 0;
    for (std::int64_t r = 0; r <= future_draws; ++r) {
        mean += Rational(r) * dist[static_cast<std::size_t>(r)];
    }
    return mean;
}

std::int64_t hypergeometric_draws(std::int64_t blacks, std::int64_t others,
                                  std::int64_t draws, SplitMix64& rng) {
    require(blacks >= 0 && others >= 0, "hypergeometric: negative pool");
    require(draws >= 0 && draws <= blacks + others, "hypergeometric: more draws than balls");
    std::int64_t successes = 0;
    for (std::int64_t t = 0; t < draws; ++t) {
        const std::uint64_t pool = static_cast<std::uint64_t>(blacks + others);
        if (rng.uniform_below(pool) < static_cast<std::uint64_t>(blacks)) {
            --blacks;
            ++successes;
        } else {
            --others;
        }
    }
    return successes;
}

CareerSampler::CareerSampler(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks)
    : urn_size_(urn_size), draws_(draws), blacks_(blacks) {
    check_sample(urn_size, draws, blacks);
    cumulative_.resize(static_cast<std::size_t>(urn_size) + 1);
    Integer running = 0;
    for (std::int64_t i = 0; i <= urn_size; ++i) {
        running += hypothesis_weight(i, urn_size, draws, blacks);
        cumulative_[static_cast<std::size_t>(i)] = running;
    }
    total_ = running;
    if (total_ != binom(urn_size + 1, draws + 1)) {
        throw std::logic_error("career sampler: posterior normalizer mismatch");
    }
}

std::int64_t CareerSampler::draw_composition(SplitMix64& rng) const {
    const Integer u = rng.uniform_below(total_);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<std::int64_t>(it - cumulative_.begin());
}

std::int64_t CareerSampler::draw_future_successes(std::int64_t future_draws, SplitMix64& rng) const {
    require(draws_ + future_draws <= urn_size_, "career sampler: not enough balls left");
    const std::int64_t composition = draw_composition(rng);
    const std::int64_t black_left = composition - blacks_;
    const std::int64_t other_left = (urn_size_ - draws_) - black_left;
    return hypergeometric_draws(black_left, other_left, future_draws, rng);
}

std::int64_t sample_career(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks,
                           std::int64_t future_draws, std::uint64_t seed) {
    require(draws + future_draws <= urn_size, "career: not enough balls left");
    SplitMix64 rng(seed);
    return CareerSampler(urn_size, draws, blacks).draw_future_successes(future_draws, rng);
}

} // namespace succession::oracle
