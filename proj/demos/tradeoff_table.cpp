// Prints expected delay and covertness for every (k, n) on the default
// setting (s = 50, r = 10, m = 10, lambda = 1, w = 50), with a short
// Monte Carlo run next to each Model 1 value.

#include <cstdio>

#include "covert/analytic.hpp"
#include "covert/optimizer.hpp"
#include "covert/simcore.hpp"

int main() {
  using namespace covert;
  const auto base = SystemParams::make(50, 10, 10.0, 1, 1, 1.0, 50.0);

  std::printf("%3s %3s %12s %12s %12s %12s\n", "k", "n", "P_c", "E[T] m1", "sim m1", "E[T] m2");
  for (const auto& pt : opt::grid_evaluate(base, {1, 5}, {1, 10}, DelayModel::Model1)) {
    const auto mc = sim::run_monte_carlo(base.with_kn(pt.k, pt.n), DelayModel::Model1,
                                         sim::WalkModel::IidUniform, 2000, 1);
    std::printf("%3lld %3lld %12.6f %12.3f %12.3f %12.3f\n", static_cast<long long>(pt.k),
                static_cast<long long>(pt.n), pt.p_c, pt.total_model1, mc.total_mean,
                pt.total_model2);
  }
  std::printf("\nModel 2 redundancy for r=10: ");
  for (int k = 1; k <= 5; ++k)
    std::printf("k=%d->n=%lld  ", k, static_cast<long long>(analytic::optimal_n_m2(10, k)));
  std::printf("\n");
}
