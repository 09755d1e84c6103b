#pragma once

#include <cstdint>
#include <vector>

namespace mors {

// Fixed-domain count histogram. Index i counts occurrences of value i;
// the domain is [0, max_value]. Counts stay raw (integers); normalization
// happens where a distribution is needed, so no precision is lost while
// profiles are merged.
class Histogram {
  public:
    Histogram() = default;
    explicit Histogram(std::size_t max_value) : counts_(max_value + 1, 0) {}
    Histogram(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
        for (std::uint64_t c : counts_) total_ += c;
    }

    void add(std::size_t value, std::uint64_t n = 1) {
        counts_.at(value) += n;
        total_ += n;
    }

    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::uint64_t total() const { return total_; }
    std::size_t max_value() const { return counts_.empty() ? 0 : counts_.size() - 1; }

    // counts / total; all zeros when the histogram is empty.
    std::vector<double> normalized() const {
        std::vector<double> p(counts_.size(), 0.0);
        if (total_ == 0) return p;
        for (std::size_t i = 0; i < counts_.size(); ++i)
            p[i] = static_cast<double>(counts_[i]) / static_cast<double>(total_);
        return p;
    }

    bool operator==(const Histogram&) const = default;

  private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

// Total-variation distance between two histograms' normalized forms,
// in [0, 1]. Domains may differ in length; missing bins count as zero.
inline double total_variation(const Histogram& a, const Histogram& b) {
    const std::vector<double> pa = a.normalized();
    const std::vector<double> pb = b.normalized();
    const std::size_t n = std::max(pa.size(), pb.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i < pa.size() ? pa[i] : 0.0;
        const double y = i < pb.size() ? pb[i] : 0.0;
        sum += x > y ? x - y : y - x;
    }
    return 0.5 * sum;
}

} // namespace mors
