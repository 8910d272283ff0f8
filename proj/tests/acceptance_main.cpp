// Acceptance gate: one self-contained property suite per shipped
// guarantee, each with a wall-clock budget.  Prints one line per
// criterion and exits nonzero if any assertion or budget fails.

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "multichain/checks.hpp"

namespace {

struct Criterion {
  std::string title;
  double budget_seconds;
  std::function<multichain::SuiteReport()> run;
};

}  // namespace

int main() {
  using multichain::SuiteReport;
  const std::vector<Criterion> criteria = {
      {"gain/bias/advantage solver satisfies the Bellman identities", 10.0,
       [] { return multichain::check_bellman(); }},
      {"performance difference identity holds across policy pairs", 10.0,
       [] { return multichain::check_pdl(); }},
      {"exact gradient matches central finite differences", 30.0,
       [] { return multichain::check_grad(); }},
      {"floored-simplex projections match the KKT oracle", 5.0,
       [] { return multichain::check_proj(); }},
      {"mirror ascent is monotone and passes first-order checks", 60.0,
       [] { return multichain::check_monotone(); }},
      {"gap traces respect the sublinear and linear rate envelopes", 120.0,
       [] { return multichain::check_rates(); }},
      {"truncated-rollout critic hits its accuracy and bias bounds", 120.0,
       [] { return multichain::check_critic(); }},
      {"sampled classification recovers chain structure whp", 60.0,
       [] { return multichain::check_classify(); }},
      {"sampled ascent tracks the exact run within its slack", 300.0,
       [] { return multichain::check_spma(); }},
      {"floor selection yields eps-optimality when weakly communicating",
       120.0, [] { return multichain::check_weakly(); }},
      {"truncated averages approach stationarity at the target-time rate",
       10.0, [] { return multichain::check_target_time(); }},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    const SuiteReport rep = c.run();
    const bool in_budget = rep.seconds <= c.budget_seconds;
    const bool ok = rep.pass() && in_budget;
    if (!ok) ++failures;
    std::printf("[%s] criterion %zu: %s (%.2fs, budget %.0fs)\n",
                ok ? "PASS" : "FAIL", i + 1, c.title.c_str(), rep.seconds,
                c.budget_seconds);
    for (const auto& line : rep.lines)
      std::printf("    [%s] %s (%s)\n", line.pass ? "pass" : "FAIL",
                  line.label.c_str(), line.detail.c_str());
    if (!in_budget)
      std::printf("    [FAIL] wall clock %.2fs exceeded the %.0fs budget\n",
                  rep.seconds, c.budget_seconds);
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
