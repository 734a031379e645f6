#include "sunpatch/metrics.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

#include "sunpatch/errors.hpp"

namespace sunpatch {

namespace {

struct Contingency {
    std::vector<std::vector<std::int64_t>> table; // rows: classes of a, cols: classes of b
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;
    std::int64_t total = 0;
};

std::vector<std::size_t> compact_ids(const LabelVector& labels, std::size_t& num_classes) {
    std::unordered_map<std::int64_t, std::size_t> ids;
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, _] = ids.try_emplace(labels[i], ids.size());
        out[i] = it->second;
    }
    num_classes = ids.size();
    return out;
}

Contingency contingency(const LabelVector& a, const LabelVector& b) {
    if (a.empty()) throw InvalidParameterError("label vectors must be nonempty");
    if (a.size() != b.size()) {
        throw DimensionMismatchError("label vectors differ in length: " + std::to_string(a.size()) +
                                     " vs " + std::to_string(b.size()));
    }
    std::size_t ka = 0, kb = 0;
    const std::vector<std::size_t> ia = compact_ids(a, ka);
    const std::vector<std::size_t> ib = compact_ids(b, kb);

    Contingency c;
    c.table.assign(ka, std::vector<std::int64_t>(kb, 0));
    c.row_sums.assign(ka, 0);
    c.col_sums.assign(kb, 0);
    c.total = static_cast<std::int64_t>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++c.table[ia[i]][ib[i]];
        ++c.row_sums[ia[i]];
        ++c.col_sums[ib[i]];
    }
    return c;
}

double pairs2(std::int64_t n) {
    return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
}

} // namespace

double nmi(const LabelVector& a, const LabelVector& b) {
    const Contingency c = contingency(a, b);
    const double n = static_cast<double>(c.total);

    double h_a = 0.0, h_b = 0.0, mi = 0.0;
    for (std::int64_t r : c.row_sums) {
        const double p = r / n;
        if (p > 0.0) h_a -= p * std::log(p);
    }
    for (std::int64_t s : c.col_sums) {
        const double p = s / n;
        if (p > 0.0) h_b -= p * std::log(p);
    }
    for (std::size_t i = 0; i < c.table.size(); ++i) {
        for (std::size_t j = 0; j < c.table[i].size(); ++j) {
            const std::int64_t nij = c.table[i][j];
            if (nij == 0) continue;
            const double pij = nij / n;
            mi += pij * std::log((nij * n) /
                                 (static_cast<double>(c.row_sums[i]) * c.col_sums[j]));
        }
    }
    const double denom = std::sqrt(h_a * h_b);
    if (denom <= 0.0) return 0.0;
    return std::max(0.0, std::min(1.0, mi / denom));
}

double ari(const LabelVector& a, const LabelVector& b) {
    const Contingency c = contingency(a, b);

    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (std::size_t i = 0; i < c.table.size(); ++i) {
        for (std::int64_t nij : c.table[i]) sum_ij += pairs2(nij);
    }
    for (std::int64_t r : c.row_sums) sum_a += pairs2(r);
    for (std::int64_t s : c.col_sums) sum_b += pairs2(s);

    const double total_pairs = pairs2(c.total);
    if (total_pairs <= 0.0) return 1.0; // single item: trivially identical

    const double expected = sum_a * sum_b / total_pairs;
    const double maximum = 0.5 * (sum_a + sum_b);
    const double denom = maximum - expected;
    if (denom == 0.0) {
        // both partitions trivial (all-singletons or one cluster)
        return 1.0;
    }
    return (sum_ij - expected) / denom;
}

JtrendResult jtrend(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw InvalidParameterError("jtrend needs at least 2 ordered groups");
    for (const auto& g : groups) {
        if (g.empty()) throw InvalidParameterError("jtrend groups must be nonempty");
    }

    double statistic = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t h = g + 1; h < groups.size(); ++h) {
            for (double x : groups[g]) {
                for (double y : groups[h]) {
                    if (x < y) statistic += 1.0;
                    else if (x == y) statistic += 0.5;
                }
            }
        }
    }

    // normal approximation with tie correction
    double n_total = 0.0, sum_sq = 0.0;
    double g2 = 0.0, g3 = 0.0; // sums of n(n-1) and n(n-1)(n-2) over groups
    double e2 = 0.0, e3 = 0.0, tie_var = 0.0;
    for (const auto& g : groups) {
        const double ng = static_cast<double>(g.size());
        n_total += ng;
        sum_sq += ng * ng;
        g2 += ng * (ng - 1.0);
        g3 += ng * (ng - 1.0) * (ng - 2.0);
    }
    {
        std::map<double, std::int64_t> tallies;
        for (const auto& g : groups) {
            for (double x : g) ++tallies[x];
        }
        for (const auto& [value, count] : tallies) {
            (void)value;
            const double t = static_cast<double>(count);
            tie_var += t * (t - 1.0) * (2.0 * t + 5.0);
            e2 += t * (t - 1.0);
            e3 += t * (t - 1.0) * (t - 2.0);
        }
    }

    const double mean = (n_total * n_total - sum_sq) / 4.0;
    double variance = (n_total * (n_total - 1.0) * (2.0 * n_total + 5.0) -
                       [&] {
                           double acc = 0.0;
                           for (const auto& g : groups) {
                               const double ng = static_cast<double>(g.size());
                               acc += ng * (ng - 1.0) * (2.0 * ng + 5.0);
                           }
                           return acc;
                       }() -
                       tie_var) /
                      72.0;
    if (n_total > 2.0) {
        variance += g3 * e3 / (36.0 * n_total * (n_total - 1.0) * (n_total - 2.0));
    }
    variance += g2 * e2 / (8.0 * n_total * (n_total - 1.0));

    JtrendResult result;
    result.statistic = statistic;
    if (variance <= 1e-15) {
        result.p_value = 1.0;
        return result;
    }
    const double z = (statistic - mean) / std::sqrt(variance);
    result.p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
    return result;
}

} // namespace sunpatch
