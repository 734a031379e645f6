#ifndef SUNPATCH_METRICS_HPP
#define SUNPATCH_METRICS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sunpatch {

/// Cluster labels over an arbitrary integer alphabet.
using LabelVector = std::vector<std::int64_t>;

/// Normalized mutual information I(a;b) / sqrt(H(a) H(b)), natural log.
/// A zero entropy product (constant labeling) yields 0.
double nmi(const LabelVector& a, const LabelVector& b);

/// Hubert-Arabie adjusted Rand index from the pair-counting contingency
/// table. Two identical trivial partitions yield 1.
double ari(const LabelVector& a, const LabelVector& b);

struct JtrendResult {
    double statistic = 0.0; // Mann-Whitney counts over ordered group pairs, ties at 1/2
    double p_value = 1.0;   // two-sided, normal approximation with tie correction
};

/// Jonckheere-Terpstra ordered-trend test over the given group order.
JtrendResult jtrend(const std::vector<std::vector<double>>& groups);

/// CSV label files: header "source_id,label", one row per item.
void save_labels(const std::string& path,
                 const std::vector<std::pair<std::string, std::int64_t>>& labels);
std::vector<std::pair<std::string, std::int64_t>> load_labels(const std::string& path);

} // namespace sunpatch

#endif
