#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "mors/errors.hpp"
#include "mors/histogram.hpp"
#include "mors/rng.hpp"

namespace mors {

// Categorical distribution over integer support, built from histogram
// counts. Sampling walks the cumulative *counts* with an integer draw in
// [0, total), so results are exact and reproducible; the probabilities
// vector exists for inspection and tests.
class EmpiricalDist {
  public:
    EmpiricalDist() = default;

    static EmpiricalDist from_counts(std::vector<std::uint64_t> support,
                                     std::vector<std::uint64_t> counts) {
        EmpiricalDist d;
        d.support_ = std::move(support);
        d.cumulative_.reserve(counts.size());
        std::uint64_t run = 0;
        for (std::uint64_t c : counts) {
            run += c;
            d.cumulative_.push_back(run);
        }
        if (run == 0) throw EmptyHistogram("cannot build a sampler from an empty histogram");
        d.probabilities_.reserve(counts.size());
        for (std::uint64_t c : counts)
            d.probabilities_.push_back(static_cast<double>(c) / static_cast<double>(run));
        return d;
    }

    const std::vector<std::uint64_t>& support() const { return support_; }
    const std::vector<double>& probabilities() const { return probabilities_; }

    std::uint64_t sample(Rng& rng) const {
        const std::uint64_t r = rng.next_below(cumulative_.back());
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
        return support_[static_cast<std::size_t>(it - cumulative_.begin())];
    }

    // Largest support value with nonzero probability.
    std::uint64_t max_support() const {
        for (std::size_t i = support_.size(); i-- > 0;)
            if (probabilities_[i] > 0.0) return support_[i];
        return 0;
    }

    bool degenerate_at_zero() const {
        return cumulative_.back() > 0 && probabilities_.front() == 1.0 && support_.front() == 0;
    }

  private:
    std::vector<std::uint64_t> support_;
    std::vector<double> probabilities_;
    std::vector<std::uint64_t> cumulative_;
};

// Sampler over the histogram's full domain 0..K. Throws EmptyHistogram
// when there is nothing to normalize.
inline EmpiricalDist make_sampler(const Histogram& h) {
    if (h.total() == 0) throw EmptyHistogram("histogram has zero total");
    std::vector<std::uint64_t> support(h.counts().size());
    for (std::size_t i = 0; i < support.size(); ++i) support[i] = i;
    return EmpiricalDist::from_counts(std::move(support), h.counts());
}

// Sampler over the histogram restricted to values >= 1. Used where a
// count of zero would contradict the draw's meaning (a row selected as
// faulty must receive at least one fault).
inline EmpiricalDist make_positive_sampler(const Histogram& h) {
    const auto& c = h.counts();
    if (c.size() < 2) throw EmptyHistogram("histogram has no bins above zero");
    std::vector<std::uint64_t> support;
    std::vector<std::uint64_t> counts;
    support.reserve(c.size() - 1);
    counts.reserve(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) {
        support.push_back(i);
        counts.push_back(c[i]);
    }
    std::uint64_t total = 0;
    for (std::uint64_t x : counts) total += x;
    if (total == 0) throw EmptyHistogram("histogram has no mass above zero");
    return EmpiricalDist::from_counts(std::move(support), std::move(counts));
}

} // namespace mors
