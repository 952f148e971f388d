#pragma once

#include "succession/rational.hpp"
#include "succession/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

// Brute-force verification side of the engine. Every probability here is
// obtained by direct summation over urn hypotheses, in exact rationals;
// closed forms are something to check against, never a shortcut. The trust
// engine is only ever compared against these definitional sums.
namespace succession::oracle {

// Exact distribution over a finite support 0..size-1; entries sum to 1.
using Distribution = std::vector<Rational>;

// C(a, b); zero whenever b < 0 or b > a. Out-of-range terms vanish, which
// is what the hypothesis sums rely on.
Integer binom(std::int64_t a, std::int64_t b);

// C(r,s)*C(r-s,t) == C(s+t,s)*C(r,s+t) for non-negative r, s, t.
bool check_product_identity(std::int64_t r, std::int64_t s, std::int64_t t);

// sum_{k=0..s} C(r+k,n)*C(s-k,m) == C(r+s+1,n+m+1), valid for 0 <= r <= n.
// Returns nullopt when the arguments fall outside that domain.
std::optional<bool> check_summation_identity(std::int64_t r, std::int64_t s,
                                             std::int64_t n, std::int64_t m);

// Uniform belief over the urn's N+1 possible initial black-ball counts.
Distribution uniform_prior(std::int64_t urn_size);

// Belief over initial compositions after observing `blacks` black balls in
// `draws` draws without replacement. Computed two independent ways (Bayes
// quotient over the uniform prior, and the closed form) and asserted equal.
Distribution posterior(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks);

// Probability the next ball is black, by total probability over the
// posterior. Requires draws < urn_size.
Rational next_black_prob(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks);

// Posterior after a second sample; closed form asserted equal to the
// sequential Bayes route and therefore to the pooled single-sample posterior.
Distribution posterior_two_samples(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks,
                                   std::int64_t second_draws, std::int64_t second_blacks);

// Next-ball probability after two samples, summed over the two-sample posterior.
Rational next_black_prob_two_samples(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks,
                                     std::int64_t second_draws, std::int64_t second_blacks);

// Probability of observing a specific second sample, summed over the
// first-sample posterior. The value is independent of urn_size.
Rational second_sample_prob(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks,
                            std::int64_t second_draws, std::int64_t second_blacks);

// Probability of the first sample itself under the uniform prior; equals
// 1/(draws+1) regardless of urn size or black count. Consistency check only.
Rational marginal_sample_prob(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks);

// Distribution of the number of fulfilled transactions among the next
// future_draws, given an observed (draws, blacks) record. Urn-size free.
Distribution future_success_dist(std::int64_t draws, std::int64_t blacks, std::int64_t future_draws);

// Mean of future_success_dist by direct summation.
Rational expected_future_successes(std::int64_t draws, std::int64_t blacks, std::int64_t future_draws);

// Sequential without-replacement draws: returns how many of `draws` balls
// come up black when `blacks` of blacks+others remain.
std::int64_t hypergeometric_draws(std::int64_t blacks, std::int64_t others,
                                  std::int64_t draws, SplitMix64& rng);

// Monte Carlo counterpart of future_success_dist. Precomputes the exact
// posterior CDF once so that repeated draws stay cheap.
class CareerSampler {
public:
    CareerSampler(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks);

    // Initial composition drawn from the exact posterior (inverse CDF).
    std::int64_t draw_composition(SplitMix64& rng) const;

    // Composition draw followed by `future_draws` without-replacement draws.
    std::int64_t draw_future_successes(std::int64_t future_draws, SplitMix64& rng) const;

    std::int64_t urn_size() const noexcept { return urn_size_; }

private:
    std::int64_t urn_size_;
    std::int64_t draws_;
    std::int64_t blacks_;
    std::vector<Integer> cumulative_; // cumulative posterior numerators
    Integer total_;                   // shared denominator
};

// One-shot career simulation, deterministic for a given seed.
std::int64_t sample_career(std::int64_t urn_size, std::int64_t draws, std::int64_t blacks,
                           std::int64_t future_draws, std::uint64_t seed);

} // namespace succession::oracle
