#include "uavnet/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "uavnet/error.hpp"

namespace uavnet::allocation {

namespace {

enum Band : int { kLicensed = 0, kUnlicensed = 1, kNone = 2 };

bool fits(double r) { return r > 0.0 && r <= 1.0 + kBudgetSlack; }

bool zero_demand(const RequirementVectors& req, int i) {
  return req.u_r[i] == 0.0 && req.e_r[i] == 0.0;
}

// Candidate assignment with its ranking key.
struct Candidate {
  std::vector<int> band;
  int objective = 0;
  double total = 0.0;
};

// Higher objective, then smaller total fraction, then lexicographically
// smaller band vector.
bool better(const Candidate& a, const Candidate& b) {
  if (a.objective != b.objective) return a.objective > b.objective;
  const double tol = 1e-12 * std::max(1.0, std::max(a.total, b.total));
  if (std::abs(a.total - b.total) > tol) return a.total < b.total;
  return a.band < b.band;
}

Candidate make_candidate(const RequirementVectors& req, std::vector<int> band) {
  Candidate c;
  c.band = std::move(band);
  for (int i = 0; i < req.size(); ++i) {
    if (zero_demand(req, i)) {
      ++c.objective;
    } else if (c.band[i] == kLicensed) {
      ++c.objective;
      c.total += req.u_r[i];
    } else if (c.band[i] == kUnlicensed) {
      ++c.objective;
      c.total += req.e_r[i];
    }
  }
  return c;
}

AllocationPlan to_plan(const RequirementVectors& req, const Candidate& c,
                       AllocationCase kind, long searches) {
  const int n = req.size();
  AllocationPlan plan;
  plan.u.assign(n, 0.0);
  plan.e.assign(n, 0.0);
  plan.stable.assign(n, false);
  for (int i = 0; i < n; ++i) {
    if (zero_demand(req, i)) {
      plan.stable[i] = true;
    } else if (c.band[i] == kLicensed) {
      plan.u[i] = req.u_r[i];
      plan.stable[i] = true;
    } else if (c.band[i] == kUnlicensed) {
      plan.e[i] = req.e_r[i];
      plan.stable[i] = true;
    }
  }
  plan.objective = c.objective;
  plan.kind = kind;
  plan.searches = searches;
  return plan;
}

// Cheapest maximum-cardinality packing: the m* smallest fitting entries,
// equal values taken in index order.
std::vector<int> cheapest_packing(const std::vector<double>& req) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(req.size()); ++i) {
    if (fits(req[i])) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return req[a] < req[b]; });
  std::vector<int> out;
  double sum = 0.0;
  for (int i : idx) {
    if (sum + req[i] > 1.0 + kBudgetSlack) break;
    sum += req[i];
    out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Serves a maximizer on `band` and packs the remaining users on the other
// band using their requirement there.
Candidate complete(const RequirementVectors& req, const std::vector<int>& chosen,
                   int band) {
  const int n = req.size();
  std::vector<int> assign(n, kNone);
  std::vector<bool> taken(n, false);
  for (int i : chosen) {
    assign[i] = band;
    taken[i] = true;
  }
  const auto& other_req = band == kLicensed ? req.e_r : req.u_r;
  std::vector<double> rest(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (!taken[i] && !zero_demand(req, i)) rest[i] = other_req[i];
  }
  const int other = band == kLicensed ? kUnlicensed : kLicensed;
  for (int i : cheapest_packing(rest)) assign[i] = other;
  return make_candidate(req, std::move(assign));
}

}  // namespace

double AllocationPlan::total_fraction() const {
  return std::accumulate(u.begin(), u.end(), 0.0) +
         std::accumulate(e.begin(), e.end(), 0.0);
}

double min_fraction(double arrival, double direct, bool cache_hit,
                    double fronthaul) {
  require(arrival >= 0.0 && direct >= 0.0 && fronthaul >= 0.0,
          "rates and arrivals must be non-negative");
  if (arrival == 0.0) return 0.0;
  if (direct == 0.0) return kUnreachable;
  if (cache_hit || std::isinf(fronthaul)) return arrival / direct;
  // x*d*f / (x*d + f) >= a  <=>  x >= a*f / (d*(f - a)).
  if (fronthaul <= arrival) return kUnreachable;
  return arrival * fronthaul / (direct * (fronthaul - arrival));
}

RequirementVectors split_requirements(std::vector<double> u_r,
                                      std::vector<double> e_r) {
  require(u_r.size() == e_r.size(), "requirement vectors differ in length");
  RequirementVectors out;
  const auto n = u_r.size();
  out.u_mr.assign(n, 0.0);
  out.e_mr.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    require(u_r[i] >= 0.0 && e_r[i] >= 0.0, "requirements must be non-negative");
    if (e_r[i] < u_r[i]) {
      out.e_mr[i] = e_r[i];
    } else {
      out.u_mr[i] = u_r[i];
    }
  }
  out.u_r = std::move(u_r);
  out.e_r = std::move(e_r);
  return out;
}

RequirementVectors requirement_vectors(std::span<const UserDemand> users,
                                       double fronthaul_rate) {
  std::vector<double> u_r;
  std::vector<double> e_r;
  for (const auto& d : users) {
    u_r.push_back(min_fraction(d.arrival_bits, d.licensed_rate, d.cache_hit,
                               fronthaul_rate));
    e_r.push_back(min_fraction(d.arrival_bits, d.unlicensed_rate, d.cache_hit,
                               fronthaul_rate));
  }
  return split_requirements(std::move(u_r), std::move(e_r));
}

Selection max_count_selection(std::span<const double> req, std::size_t cap) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(req.size()); ++i) {
    require(!(req[i] < 0.0), "requirements must be non-negative");
    if (fits(req[i])) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return req[a] < req[b]; });
  const double budget = 1.0 + kBudgetSlack;
  // prefix[j] = sum of the j smallest entries.
  std::vector<double> prefix(idx.size() + 1, 0.0);
  for (std::size_t j = 0; j < idx.size(); ++j) prefix[j + 1] = prefix[j] + req[idx[j]];
  int best = 0;
  while (best < static_cast<int>(idx.size()) && prefix[best + 1] <= budget) ++best;

  Selection out;
  out.best = best;
  std::vector<int> current;
  // Depth-first over sorted positions; a branch is cut once even the
  // cheapest completion overflows the budget.
  auto dfs = [&](auto&& self, std::size_t pos, double sum) -> void {
    const int need = best - static_cast<int>(current.size());
    if (need == 0) {
      if (out.maximizers.size() >= cap) {
        throw ComputationError(
            "too many maximizing selections; use the exhaustive oracle");
      }
      auto pick = current;
      std::sort(pick.begin(), pick.end());
      out.maximizers.push_back(std::move(pick));
      return;
    }
    for (std::size_t j = pos; j + need <= idx.size(); ++j) {
      const double cheapest = sum + prefix[j + need] - prefix[j];
      if (cheapest > budget) break;
      current.push_back(idx[j]);
      self(self, j + 1, sum + req[idx[j]]);
      current.pop_back();
    }
  };
  dfs(dfs, 0, 0.0);
  std::sort(out.maximizers.begin(), out.maximizers.end());
  return out;
}

AllocationPlan algorithm1_allocate(const RequirementVectors& req, std::size_t cap) {
  const int n = req.size();
  require(static_cast<int>(req.e_r.size()) == n &&
              static_cast<int>(req.u_mr.size()) == n &&
              static_cast<int>(req.e_mr.size()) == n,
          "requirement vectors differ in length");
  double su = 0.0;
  double se = 0.0;
  for (int i = 0; i < n; ++i) {
    su += req.u_mr[i];
    se += req.e_mr[i];
  }
  if (su <= 1.0 + kBudgetSlack && se <= 1.0 + kBudgetSlack) {
    std::vector<int> band(n, kNone);
    for (int i = 0; i < n; ++i) {
      if (req.u_mr[i] > 0.0) band[i] = kLicensed;
      if (req.e_mr[i] > 0.0) band[i] = kUnlicensed;
    }
    return to_plan(req, make_candidate(req, std::move(band)),
                   AllocationCase::all_fit, 1);
  }

  const Selection lic = max_count_selection(req.u_mr, cap);
  const Selection unl = max_count_selection(req.e_mr, cap);
  std::optional<Candidate> best;
  long searches = 0;
  auto traverse = [&](const Selection& family, int band) {
    for (const auto& chosen : family.maximizers) {
      Candidate c = complete(req, chosen, band);
      ++searches;
      if (!best || better(c, *best)) best = std::move(c);
    }
  };
  AllocationCase kind;
  if (lic.maximizers.size() > 1) {
    kind = AllocationCase::licensed_traversal;
    traverse(lic, kLicensed);
  } else if (unl.maximizers.size() > 1) {
    kind = AllocationCase::unlicensed_traversal;
    traverse(unl, kUnlicensed);
  } else {
    // Both families unique: try each side once.
    kind = AllocationCase::both_unique;
    traverse(lic, kLicensed);
    traverse(unl, kUnlicensed);
  }
  return to_plan(req, *best, kind, searches);
}

AllocationPlan allocation_oracle(const RequirementVectors& req) {
  const int n = req.size();
  if (n > 12) throw InvalidArgument("allocation oracle limited to 12 users");
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  std::optional<Candidate> best;
  std::vector<int> band(n, kLicensed);
  for (long code = 0; code < total; ++code) {
    // User 0 is the most significant digit, so codes run in lexicographic
    // order of the band vector.
    long rest = code;
    for (int i = n - 1; i >= 0; --i) {
      band[i] = static_cast<int>(rest % 3);
      rest /= 3;
    }
    double lic = 0.0;
    double unl = 0.0;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (zero_demand(req, i)) {
        ok = band[i] == kNone;
      } else if (band[i] == kLicensed) {
        ok = fits(req.u_r[i]);
        lic += req.u_r[i];
      } else if (band[i] == kUnlicensed) {
        ok = fits(req.e_r[i]);
        unl += req.e_r[i];
      }
    }
    if (!ok || lic > 1.0 + kBudgetSlack || unl > 1.0 + kBudgetSlack) continue;
    Candidate c = make_candidate(req, band);
    if (!best || better(c, *best)) best = std::move(c);
  }
  return to_plan(req, *best, AllocationCase::all_fit, total);
}

AllocationPlan allocation_oracle(std::span<const UserDemand> users,
                                 double fronthaul_rate) {
  return allocation_oracle(requirement_vectors(users, fronthaul_rate));
}

std::vector<int> ActionSpace::users_of(int action) const {
  require(action >= 0 && action < actions(), "action index out of range");
  std::vector<int> out;
  for (int j = 0; j < size(); ++j) {
    if (action & (1 << j)) out.push_back(candidates[j]);
  }
  return out;
}

ActionSpace build_action_space(int uav, const channel::LinkRates& rates,
                               double content_bits,
                               const ActionSpaceParams& params) {
  require(uav >= 0 && uav < rates.uav_count(), "UAV index out of range");
  require(params.cap >= 0 && params.cap <= 20, "action cap must lie in [0, 20]");
  require(params.dominance_factor > 0.0, "dominance factor must be positive");
  require(content_bits > 0.0, "content size must be positive");
  const double rc = rates.fronthaul_max[uav];
  const auto& rl = rates.licensed[uav];
  const auto& ru = rates.unlicensed[uav];
  auto harmonic = [&](double r) {
    if (r == 0.0 || rc == 0.0) return 0.0;
    return r * rc / (r + rc);
  };
  // Dominance is judged against L: the rule only decides users whose
  // direct rate is near L, and a per-user test would make the set shrink
  // when a direct rate grows past the regime boundary.
  const bool dominant = rc > params.dominance_factor * content_bits;
  ActionSpace out;
  out.uav = uav;
  for (int i = 0; i < rates.user_count(); ++i) {
    const bool ok = dominant
                        ? (rl[i] >= content_bits || ru[i] >= content_bits)
                        : (harmonic(rl[i]) >= content_bits ||
                           harmonic(ru[i]) >= content_bits);
    if (ok) {
      out.uncapped.push_back(i);
      out.simplified.push_back(dominant);
    }
  }
  out.candidates = out.uncapped;
  if (static_cast<int>(out.candidates.size()) > params.cap) {
    std::stable_sort(out.candidates.begin(), out.candidates.end(),
                     [&](int a, int b) {
                       return std::max(rl[a], ru[a]) > std::max(rl[b], ru[b]);
                     });
    out.candidates.resize(params.cap);
    std::sort(out.candidates.begin(), out.candidates.end());
  }
  return out;
}

}  // namespace uavnet::allocation
