#include "uavnet/cache.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "uavnet/error.hpp"

namespace uavnet::cache {

namespace {

int catalog_size(const std::vector<std::vector<double>>& predictions) {
  require(!predictions.empty(), "cache planning needs per-user predictions");
  const auto n = predictions.front().size();
  for (const auto& p : predictions) {
    require(p.size() == n, "predictions must share one catalog size");
  }
  return static_cast<int>(n);
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

CacheAssignment finish(std::vector<int> chosen, const std::vector<double>& s,
                       bool degenerate) {
  std::sort(chosen.begin(), chosen.end());
  CacheAssignment out;
  out.degenerate = degenerate;
  for (int n : chosen) {
    out.contents.push_back(n);
    out.scores.push_back(s[n]);
  }
  return out;
}

}  // namespace

std::vector<double> content_scores(const std::vector<int>& users,
                                   const std::vector<std::vector<double>>& predictions,
                                   const std::vector<double>& requests) {
  const int n = catalog_size(predictions);
  require(requests.size() == predictions.size(),
          "request counts must have one entry per user");
  std::vector<double> s(n, 0.0);
  for (int i : users) {
    require(i >= 0 && i < static_cast<int>(predictions.size()),
            "associated user out of range");
    for (int c = 0; c < n; ++c) s[c] += predictions[i][c] * requests[i];
  }
  return s;
}

CacheAssignment plan_cache(const std::vector<int>& users,
                           const std::vector<std::vector<double>>& predictions,
                           const std::vector<double>& requests, int cache_size) {
  const int n = catalog_size(predictions);
  require(cache_size >= 0 && cache_size <= n, "cache size must lie in [0, N]");
  const auto s = content_scores(users, predictions, requests);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return s[a] > s[b]; });
  idx.resize(cache_size);
  return finish(std::move(idx), s, users.empty());
}

CacheAssignment cache_oracle(const std::vector<int>& users,
                             const std::vector<std::vector<double>>& predictions,
                             const std::vector<double>& requests, int cache_size) {
  const int n = catalog_size(predictions);
  require(cache_size >= 0 && cache_size <= n, "cache size must lie in [0, N]");
  if (binomial(n, cache_size) > 1e6) {
    throw InvalidArgument("cache oracle instance too large");
  }
  const auto s = content_scores(users, predictions, requests);
  const double scale = std::accumulate(s.begin(), s.end(), 0.0);
  const double tol = 1e-12 * std::max(1.0, scale);
  // Subsets are visited in lexicographic order of their index lists.
  std::vector<int> pick(cache_size);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<int> best = pick;
  double best_total = -1.0;
  while (true) {
    double total = 0.0;
    for (int c : pick) total += s[c];
    if (total > best_total + tol) {
      best_total = total;
      best = pick;
    }
    int pos = cache_size - 1;
    while (pos >= 0 && pick[pos] == n - cache_size + pos) --pos;
    if (pos < 0) break;
    ++pick[pos];
    for (int j = pos + 1; j < cache_size; ++j) pick[j] = pick[j - 1] + 1;
  }
  return finish(std::move(best), s, users.empty());
}

void write_cache_csv(std::ostream& out, int uav, const CacheAssignment& plan,
                     bool header) {
  if (header) out << "uav,content,score\n";
  for (std::size_t j = 0; j < plan.contents.size(); ++j) {
    out << fmt::format("{},{},{}\n", uav, plan.contents[j], plan.scores[j]);
  }
}

}  // namespace uavnet::cache
