#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "allocation_internal.hpp"
#include "qnet/allocation.hpp"

// Exhaustive allocation oracle. Everything here is deliberately implemented
// with different machinery than the production policies (global bisection
// instead of incremental filling, a simplex tableau instead of greedy
// passes) so the two sides cross-check each other in tests.

namespace qnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct OracleVariable {
  double cap = kInf;
  std::vector<std::pair<int, int>> usage;  // (link index, multiplicity)
};

// Exact unweighted max-min rates for fixed paths, computed level by level:
// bisect the largest uniform rate every unfrozen variable can still reach,
// freeze the blocked ones, repeat on the remainder.
std::vector<double> water_fill_bisect(const std::vector<double>& capacity,
                                      const std::vector<OracleVariable>& vars) {
  const std::size_t nvars = vars.size();
  std::vector<double> rates(nvars, 0.0);
  std::vector<bool> frozen(nvars, false);
  std::vector<double> residual = capacity;

  const auto tolerance = [&](std::size_t l) {
    return 1e-9 * std::max(1.0, capacity[l]);
  };

  std::size_t active = nvars;
  while (active > 0) {
    const auto feasible = [&](double t) {
      for (std::size_t l = 0; l < residual.size(); ++l) {
        double used = 0.0;
        for (std::size_t v = 0; v < nvars; ++v) {
          if (frozen[v]) {
            continue;
          }
          const double gain = std::min(t, vars[v].cap - rates[v]);
          for (const auto& [link, multiplicity] : vars[v].usage) {
            if (link == static_cast<int>(l)) {
              used += multiplicity * gain;
            }
          }
        }
        if (used > residual[l] + 1e-12 * std::max(1.0, capacity[l])) {
          return false;
        }
      }
      return true;
    };

    double hi = 1.0;
    for (const double r : residual) {
      hi = std::max(hi, r);
    }
    for (std::size_t v = 0; v < nvars; ++v) {
      if (!frozen[v] && std::isfinite(vars[v].cap)) {
        hi = std::max(hi, vars[v].cap - rates[v]);
      }
    }
    hi += 1.0;

    double lo = 0.0;
    if (feasible(hi)) {
      lo = hi;  // only capped variables remain and all fit
    } else {
      for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
      }
    }

    for (std::size_t v = 0; v < nvars; ++v) {
      if (frozen[v]) {
        continue;
      }
      const double gain = std::min(lo, vars[v].cap - rates[v]);
      rates[v] += gain;
      for (const auto& [link, multiplicity] : vars[v].usage) {
        residual[link] =
            std::max(0.0, residual[link] - multiplicity * gain);
      }
    }

    bool any_frozen = false;
    for (std::size_t v = 0; v < nvars; ++v) {
      if (frozen[v]) {
        continue;
      }
      bool blocked = std::isfinite(vars[v].cap) &&
                     rates[v] >= vars[v].cap - 1e-9 * std::max(1.0, vars[v].cap);
      for (const auto& [link, multiplicity] : vars[v].usage) {
        blocked = blocked || residual[link] <= tolerance(link);
      }
      if (blocked) {
        frozen[v] = true;
        --active;
        any_frozen = true;
      }
    }
    if (!any_frozen) {
      // Defensive: freeze everything on the tightest used link.
      std::size_t tightest = 0;
      double best = kInf;
      for (std::size_t l = 0; l < residual.size(); ++l) {
        if (residual[l] / std::max(1e-300, capacity[l]) < best) {
          best = residual[l] / std::max(1e-300, capacity[l]);
          tightest = l;
        }
      }
      for (std::size_t v = 0; v < nvars; ++v) {
        if (frozen[v]) {
          continue;
        }
        for (const auto& [link, multiplicity] : vars[v].usage) {
          if (link == static_cast<int>(tightest)) {
            frozen[v] = true;
            --active;
            break;
          }
        }
      }
      if (!any_frozen && active == nvars) {
        break;  // nothing uses any link; cannot happen with simple paths
      }
    }
  }
  return rates;
}

// Dense primal simplex with Bland's rule: maximize c.x subject to A.x <= b,
// x >= 0, b >= 0. Small and slow, which is fine for the toy-guarded oracle.
std::vector<double> simplex_max(const std::vector<std::vector<double>>& a,
                                const std::vector<double>& b,
                                const std::vector<double>& c) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      t[i][j] = a[i][j];
    }
    t[i][n + i] = 1.0;
    t[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) {
    t[m][j] = -c[j];
  }

  for (int iter = 0; iter < 10000; ++iter) {
    std::size_t entering = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      if (t[m][j] < -1e-9) {
        entering = j;
        break;
      }
    }
    if (entering == cols) {
      break;  // optimal
    }
    std::size_t leaving = m;
    double best_ratio = kInf;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][entering] > 1e-9) {
        const double ratio = t[i][cols - 1] / t[i][entering];
        if (ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 &&
             (leaving == m || basis[i] < basis[leaving]))) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    }
    if (leaving == m) {
      throw std::runtime_error("simplex: unbounded objective");
    }
    const double pivot = t[leaving][entering];
    for (double& value : t[leaving]) {
      value /= pivot;
    }
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leaving || t[i][entering] == 0.0) {
        continue;
      }
      const double factor = t[i][entering];
      for (std::size_t j = 0; j < cols; ++j) {
        t[i][j] -= factor * t[leaving][j];
      }
    }
    basis[leaving] = entering;
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) {
      x[basis[i]] = std::max(0.0, t[i][cols - 1]);
    }
  }
  return x;
}

std::vector<double> total_rate_lp(const std::vector<double>& capacity,
                                  const std::vector<OracleVariable>& vars) {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (std::size_t l = 0; l < capacity.size(); ++l) {
    std::vector<double> row(vars.size(), 0.0);
    bool used = false;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      for (const auto& [link, multiplicity] : vars[v].usage) {
        if (link == static_cast<int>(l)) {
          row[v] += multiplicity;
          used = true;
        }
      }
    }
    if (used) {
      a.push_back(std::move(row));
      b.push_back(capacity[l]);
    }
  }
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (std::isfinite(vars[v].cap)) {
      std::vector<double> row(vars.size(), 0.0);
      row[v] = 1.0;
      a.push_back(std::move(row));
      b.push_back(vars[v].cap);
    }
  }
  return simplex_max(a, b, std::vector<double>(vars.size(), 1.0));
}

std::vector<OracleVariable> make_oracle_vars(
    const detail::PreparedInstance& instance,
    const std::vector<const Path*>& paths_by_demand) {
  std::vector<OracleVariable> vars;
  vars.reserve(instance.variables.size());
  for (const detail::RateVariable& variable : instance.variables) {
    std::vector<const Path*> member_paths;
    for (const std::size_t m : variable.members) {
      member_paths.push_back(paths_by_demand[m]);
    }
    vars.push_back({variable.cap, detail::usage_of(member_paths)});
  }
  return vars;
}

// Per-demand rates sorted ascending; the max-min order compares these
// lexicographically.
std::vector<double> demand_rate_profile(const detail::PreparedInstance& instance,
                                        const std::vector<double>& var_rates) {
  std::vector<double> profile;
  for (std::size_t v = 0; v < instance.variables.size(); ++v) {
    profile.insert(profile.end(), instance.variables[v].members.size(),
                   var_rates[v]);
  }
  std::sort(profile.begin(), profile.end());
  return profile;
}

bool profile_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) {
      return a[i] < b[i];
    }
  }
  return false;
}

}  // namespace

Allocation brute_force_optimal(const Network& net, const std::vector<App>& apps,
                               Objective objective, const OpReliability& ops,
                               int k) {
  detail::PreparedInstance instance = detail::prepare_instance(net, apps, ops, k);
  detail::enforce_oracle_guard(net, instance);

  const std::size_t ndemands = instance.demands.size();
  std::vector<double> capacity;
  for (const Link& link : net.links()) {
    capacity.push_back(link.capacity);
  }
  if (instance.variables.empty()) {
    return detail::finalize_allocation(net, instance, {}, false);
  }

  std::vector<std::size_t> choice(ndemands, 0);
  std::vector<const Path*> chosen(ndemands, nullptr);

  bool have_best = false;
  std::vector<std::size_t> best_choice;
  std::vector<double> best_rates;
  std::vector<double> best_profile;
  double best_total = -kInf;

  for (;;) {
    for (std::size_t d = 0; d < ndemands; ++d) {
      chosen[d] = &instance.candidates[d][choice[d]].path;
    }
    const std::vector<OracleVariable> vars = make_oracle_vars(instance, chosen);

    std::vector<double> rates;
    bool better = false;
    if (objective == Objective::MaxMinRate) {
      rates = water_fill_bisect(capacity, vars);
      std::vector<double> profile = demand_rate_profile(instance, rates);
      better = !have_best || profile_less(best_profile, profile);
      if (better) {
        best_profile = std::move(profile);
      }
    } else {
      rates = total_rate_lp(capacity, vars);
      double total = 0.0;
      for (const double r : rates) {
        total += r;
      }
      better = !have_best || total > best_total + 1e-12;
      if (better) {
        best_total = total;
      }
    }
    if (better) {
      have_best = true;
      best_choice = choice;
      best_rates = std::move(rates);
    }

    // Odometer over per-demand path choices.
    std::size_t d = 0;
    while (d < ndemands && ++choice[d] == instance.candidates[d].size()) {
      choice[d] = 0;
      ++d;
    }
    if (d == ndemands) {
      break;
    }
  }

  for (std::size_t d = 0; d < ndemands; ++d) {
    instance.paths[d] = instance.candidates[d][best_choice[d]].path;
  }
  return detail::finalize_allocation(net, instance, best_rates, false);
}

Allocation oracle_max_min_first_paths(const Network& net,
                                      const std::vector<App>& apps,
                                      const OpReliability& ops, int k) {
  const detail::PreparedInstance instance =
      detail::prepare_instance(net, apps, ops, k);
  detail::enforce_oracle_guard(net, instance);

  std::vector<double> capacity;
  for (const Link& link : net.links()) {
    capacity.push_back(link.capacity);
  }
  std::vector<const Path*> first_paths;
  for (const Path& path : instance.paths) {
    first_paths.push_back(&path);
  }
  const std::vector<double> rates =
      water_fill_bisect(capacity, make_oracle_vars(instance, first_paths));
  return detail::finalize_allocation(net, instance, rates, false);
}

}  // namespace qnet
