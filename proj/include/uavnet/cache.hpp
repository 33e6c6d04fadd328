#pragma once

#include <iosfwd>
#include <vector>

namespace uavnet::cache {

/// Cached content set of one UAV, ascending, with each content's aggregate
/// expected request count.
struct CacheAssignment {
  std::vector<int> contents;
  std::vector<double> scores;
  // Set when nothing was associated and the lowest indices were returned.
  bool degenerate = false;
};

/// s_n = sum over associated users of p_hat[i][n] * requests[i].
std::vector<double> content_scores(const std::vector<int>& users,
                                   const std::vector<std::vector<double>>& predictions,
                                   const std::vector<double>& requests);

/// Top-C contents by aggregate score, ties to the lower index.
CacheAssignment plan_cache(const std::vector<int>& users,
                           const std::vector<std::vector<double>>& predictions,
                           const std::vector<double>& requests, int cache_size);

/// Exhaustive search over all C-subsets; rejects instances with more than
/// 10^6 subsets. Equal totals keep the lexicographically first subset.
CacheAssignment cache_oracle(const std::vector<int>& users,
                             const std::vector<std::vector<double>>& predictions,
                             const std::vector<double>& requests, int cache_size);

void write_cache_csv(std::ostream& out, int uav, const CacheAssignment& plan,
                     bool header);

}  // namespace uavnet::cache
