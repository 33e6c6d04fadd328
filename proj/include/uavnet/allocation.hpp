#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "uavnet/channel.hpp"

namespace uavnet::allocation {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();
// Slack allowed on the unit budget of each band.
inline constexpr double kBudgetSlack = 1e-12;

/// One user of a UAV for the current slot. Rates are full-allocation rates
/// in bits per slot.
struct UserDemand {
  double arrival_bits = 0.0;
  double licensed_rate = 0.0;
  double unlicensed_rate = 0.0;
  bool cache_hit = true;
};

/// Minimum band fractions per user (u_R, e_R) and the cheaper-band split
/// (u_MR, e_MR). Entries may exceed 1 or be kUnreachable.
struct RequirementVectors {
  std::vector<double> u_r;
  std::vector<double> e_r;
  std::vector<double> u_mr;
  std::vector<double> e_mr;

  int size() const { return static_cast<int>(u_r.size()); }
};

/// Smallest x in [0, inf) with rate(x) >= arrival for a direct link of
/// full-allocation rate `direct`, or a cloud link composed with
/// `fronthaul` (harmonic composition inverted exactly).
double min_fraction(double arrival, double direct, bool cache_hit,
                    double fronthaul);

RequirementVectors requirement_vectors(std::span<const UserDemand> users,
                                       double fronthaul_rate);
/// Builds the split from given requirements; equality goes to licensed.
RequirementVectors split_requirements(std::vector<double> u_r,
                                      std::vector<double> e_r);

/// All maximum-cardinality subsets of users whose requirements fit a unit
/// budget. Only entries in (0, 1] take part.
struct Selection {
  int best = 0;
  std::vector<std::vector<int>> maximizers;  // ascending user indices
};

Selection max_count_selection(std::span<const double> req,
                              std::size_t cap = 4096);

enum class AllocationCase { all_fit, licensed_traversal, unlicensed_traversal,
                            both_unique };

struct AllocationPlan {
  std::vector<double> u;
  std::vector<double> e;
  std::vector<bool> stable;
  int objective = 0;
  AllocationCase kind = AllocationCase::all_fit;
  // Candidate plans compared before returning.
  long searches = 0;

  double total_fraction() const;
};

AllocationPlan algorithm1_allocate(const RequirementVectors& req,
                                   std::size_t cap = 4096);

/// Exhaustive 3^n search over licensed / unlicensed / unserved; n <= 12.
AllocationPlan allocation_oracle(const RequirementVectors& req);
AllocationPlan allocation_oracle(std::span<const UserDemand> users,
                                 double fronthaul_rate);

/// Candidate users of one UAV and its 2^|U_k| association actions.
struct ActionSpaceParams {
  int cap = 6;
  double dominance_factor = 100.0;
};

struct ActionSpace {
  int uav = 0;
  std::vector<int> candidates;  // ascending, at most cap
  std::vector<int> uncapped;    // every user meeting the rate condition
  std::vector<bool> simplified; // per uncapped user: dominance rule applied

  int size() const { return static_cast<int>(candidates.size()); }
  int actions() const { return 1 << candidates.size(); }
  /// Users proposed by `action` (bit j selects candidates[j]).
  std::vector<int> users_of(int action) const;
};

ActionSpace build_action_space(int uav, const channel::LinkRates& rates,
                               double content_bits,
                               const ActionSpaceParams& params = {});

}  // namespace uavnet::allocation
