#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "mlmc.hpp"
#include "model_syntax.hpp"
#include "oracles.hpp"

using namespace levycouple;

namespace {

const SpecPtr kBase = parse_model("stable-base");
// Only jumps above 0.25 in size: a compound Poisson model for levels n >= 2.
const SpecPtr kCppLike = parse_model("truncated-stable(1.5,0.4,0.6,0.25,1)");

std::vector<double> fine_values(const LevelStats& s) { return s.diffs; }

}  // namespace

TEST_CASE("level without annulus jumps is degenerate", "[mlmc]") {
  const LevelDecomposition d = decompose_level(*kCppLike, 2);
  REQUIRE(d.spec.degenerate);
  REQUIRE(d.spec.sigma_prime_sq == 0.0);
  REQUIRE(d.spec.k_prime == 1);
  for (CouplingMode mode : {CouplingMode::independent, CouplingMode::reordering}) {
    const LevelStats s = estimate_level_stats(d, mode, Functional::supremum, 200, RngStream(1));
    REQUIRE(s.var_diff == 0.0);
    for (double x : s.diffs) REQUIRE(x == 0.0);
  }
  RngStream r(2);
  const PairSample p = sample_coupled_pair(d, CouplingMode::independent, Functional::integral, r);
  REQUIRE(p.g_fine == p.g_coarse);
}

TEST_CASE("annulus variance matches quadrature", "[mlmc]") {
  for (int n = 0; n < 10; ++n) {
    const LevelDecomposition d = decompose_level(*kBase, n);
    const double hi = std::ldexp(1.0, -n), lo = hi / 2;
    // Both sides together carry weight 0.4 + 0.6 = 1.
    const double quad = oracle::integrate([](double x) { return std::pow(x, -0.5); }, lo, hi);
    REQUIRE(d.spec.sigma_prime_sq == Catch::Approx(quad).epsilon(1e-10));
    // x = u^2 removes the singularity at the inner truncation.
    const double below = oracle::integrate([](double) { return 2.0; }, std::ldexp(1.0, -20), std::sqrt(lo));
    REQUIRE(d.spec.sigma_next_sq == Catch::Approx(below).epsilon(1e-10));
    REQUIRE(d.spec.eps_n == hi);
    REQUIRE(d.spec.k_prime >= 1);
    REQUIRE(d.spec.m_n % d.spec.k_prime == 0);
    REQUIRE(d.spec.m_fine % d.spec.m_n == 0);
  }
}

TEST_CASE("k prime grows like eps^-3/4", "[mlmc]") {
  std::vector<double> ns, logk;
  for (int n = 2; n <= 12; ++n) {
    const LevelDecomposition d = decompose_level(*kBase, n);
    ns.push_back(n);
    logk.push_back(std::log2(static_cast<double>(d.spec.k_prime)));
  }
  double mx = oracle::mean(ns), my = oracle::mean(logk), sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sxy += (ns[i] - mx) * (logk[i] - my);
    sxx += (ns[i] - mx) * (ns[i] - mx);
  }
  REQUIRE(std::abs(sxy / sxx - 0.75) <= 0.25);
}

TEST_CASE("terminal differences: independent versus reordering", "[mlmc]") {
  const LevelDecomposition d = decompose_level(*kBase, 3);
  const double sp2 = d.spec.sigma_prime_sq;
  const std::size_t n = 20000;
  const LevelStats ind = estimate_level_stats(d, CouplingMode::independent, Functional::terminal, n, RngStream(3));
  const double se_ind = oracle::variance_se(ind.diffs);
  REQUIRE(std::abs(ind.var_diff - 2.0 * sp2) < 5.0 * se_ind);

  const LevelStats reo = estimate_level_stats(d, CouplingMode::reordering, Functional::terminal, n, RngStream(3));
  const double se_reo = oracle::variance_se(reo.diffs);
  REQUIRE(reo.var_diff + 3.0 * se_reo < 2.0 * sp2);

  // Comonotone endpoints: the variance is sigma'^2 times W2^2 of the annulus
  // endpoint law against N(0, 1).
  const double s = std::sqrt(sp2);
  std::vector<double> xs(n), zs(n);
  RngStream root(4);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r = root.split(i);
    xs[i] = d.annulus.sample_at(1.0, r) / s;
    zs[i] = oracle::phi_inverse_bisect((i + 0.5) / n);
  }
  const double w2 = wasserstein2_empirical(xs, zs);
  REQUIRE(reo.var_diff == Catch::Approx(sp2 * w2 * w2).epsilon(0.5));
}

TEST_CASE("reordering lowers the supremum level variance", "[mlmc]") {
  for (int n = 3; n <= 6; ++n) {
    INFO("level " << n);
    const LevelDecomposition d = decompose_level(*kBase, n);
    const LevelStats ind = estimate_level_stats(d, CouplingMode::independent, Functional::supremum, 1000, RngStream(5));
    const LevelStats reo = estimate_level_stats(d, CouplingMode::reordering, Functional::supremum, 1000, RngStream(5));
    REQUIRE(reo.var_diff / ind.var_diff < 1.0);
  }
}

TEST_CASE("coarse path in a pair has the law of the approximation", "[mlmc]") {
  const int n = 3;
  const LevelDecomposition d = decompose_level(*kBase, n);
  const std::size_t m = 4000;
  const RngStream pairs(6), alone(7);
  const CdfPtr cache = level_endpoint_cache(d, 30000, RngStream(8));
  for (Functional g : {Functional::terminal, Functional::supremum}) {
    std::vector<double> a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
      RngStream r = pairs.split(i);
      a[i] = sample_coupled_pair(d, CouplingMode::reordering, g, r, cache.get()).g_coarse;
      RngStream s = alone.split(i);
      b[i] = evaluate(g, sample_approximation(*kBase, n, 1.5, s));
    }
    REQUIRE(oracle::ks_two_sample(a, b).p_value > 0.01);
  }
}

TEST_CASE("level differences telescope to the finest approximation", "[mlmc]") {
  const int L = 4;
  const std::size_t m = 20000;
  const Functional g = Functional::supremum;
  std::vector<double> base(m);
  const RngStream r0(9);
  for (std::size_t i = 0; i < m; ++i) {
    RngStream s = r0.split(i);
    base[i] = sample_base_level(*kBase, g, 1.5, s).g_fine;
  }
  double est = oracle::mean(base), var = oracle::variance(base) / m;
  for (int n = 0; n < L; ++n) {
    const LevelStats st = estimate_level_stats(decompose_level(*kBase, n), CouplingMode::reordering, g, m,
                                               RngStream(10 + n));
    est += st.mean_diff;
    var += st.var_diff / m;
  }
  std::vector<double> direct(m);
  const RngStream rd(20);
  for (std::size_t i = 0; i < m; ++i) {
    RngStream s = rd.split(i);
    direct[i] = evaluate(g, sample_approximation(*kBase, L, 1.5, s));
  }
  const double se = std::sqrt(var + oracle::variance(direct) / m);
  REQUIRE(std::abs(est - oracle::mean(direct)) < 4.0 * se);
}

TEST_CASE("multilevel estimate on a compound Poisson base", "[mlmc]") {
  // The base is standardised by LevyModel; the driver works in raw units.
  const LevyModel exact(kCppLike);
  const double scale = std::sqrt(exact.moments().sigma2);
  const std::size_t draws = 1000000;
  MlmcOptions opt;
  opt.pilot_samples = 500;
  for (Functional g : {Functional::terminal, Functional::supremum}) {
    INFO(functional_name(g));
    const MlmcResult res = mlmc_run(*kCppLike, g, CouplingMode::reordering, 0.01, RngStream(30), opt);
    REQUIRE(res.converged);
    // Levels above the first two are degenerate; their grid is 8 cells.
    const std::size_t cells = res.specs.back().m_fine;
    REQUIRE(cells == 8);
    std::vector<double> ref(draws);
    const RngStream root(31);
    for (std::size_t i = 0; i < draws; ++i) {
      RngStream s = root.split(i);
      FinePath p = sample_path_on_grid(exact, cells, s);
      for (double& v : p.values) v *= scale;
      ref[i] = evaluate(g, p);
    }
    const double se = std::sqrt(res.estimator_variance + oracle::variance(ref) / draws);
    REQUIRE(std::abs(res.estimate - oracle::mean(ref)) < 4.0 * se);
  }
}

TEST_CASE("reordering is cheaper at equal accuracy", "[mlmc]") {
  MlmcOptions opt;
  opt.min_levels = 6;
  opt.max_level = 5;
  const MlmcResult ind = mlmc_run(*kBase, Functional::supremum, CouplingMode::independent, 0.02, RngStream(40), opt);
  const MlmcResult reo = mlmc_run(*kBase, Functional::supremum, CouplingMode::reordering, 0.02, RngStream(40), opt);
  REQUIRE(ind.levels.size() == 6);
  REQUIRE(reo.levels.size() == 6);
  REQUIRE(reo.total_cost <= ind.total_cost);

  const MlmcResult fine = mlmc_run(*kBase, Functional::supremum, CouplingMode::reordering, 0.01, RngStream(40), opt);
  const double growth = fine.total_cost / reo.total_cost;
  REQUIRE(growth >= 3.0);
  REQUIRE(growth <= 6.0);
  REQUIRE_THROWS_AS(mlmc_run(*kBase, Functional::supremum, CouplingMode::reordering, 0.0, RngStream(40), opt),
                    InvalidArgument);
  REQUIRE_THROWS_AS(mlmc_run(*parse_model("fig1-gamma"), Functional::supremum, CouplingMode::reordering, 0.1,
                             RngStream(40), opt),
                    InvalidArgument);
}

TEST_CASE("functionals on known paths", "[mlmc]") {
  FinePath p(4);
  p.values = {0.0, 1.0, 3.0, -1.0, 2.0};
  REQUIRE(evaluate(Functional::terminal, p) == 2.0);
  REQUIRE(evaluate(Functional::supremum, p) == 3.0);
  REQUIRE(evaluate(Functional::integral, p) == Catch::Approx((0.0 / 2 + 1 + 3 - 1 + 2.0 / 2) / 4));
  REQUIRE(evaluate(Functional::supremum, p, 2) == 3.0);
  REQUIRE(evaluate(Functional::integral, p, 2) == Catch::Approx((0.0 + 2.0) / 2 / 2 + 3.0 / 2));
  FinePath down(2);
  down.values = {0.0, -1.0, -2.0};
  REQUIRE(evaluate(Functional::supremum, down) == 0.0);
  REQUIRE_THROWS_AS(evaluate(Functional::terminal, p, 3), InvalidArgument);
  REQUIRE(parse_functional("integral") == Functional::integral);
  REQUIRE_FALSE(parse_mode("other").has_value());
}

TEST_CASE("costs are deterministic per seed", "[mlmc]") {
  const LevelDecomposition d = decompose_level(*kBase, 4);
  RngStream a(50), b(50);
  const PairSample x = sample_coupled_pair(d, CouplingMode::independent, Functional::supremum, a);
  const PairSample y = sample_coupled_pair(d, CouplingMode::independent, Functional::supremum, b);
  REQUIRE(x.cost == y.cost);
  REQUIRE(x.g_fine == y.g_fine);
  REQUIRE(x.cost >= static_cast<double>(d.spec.m_fine + 1));
  const CdfPtr cache = level_endpoint_cache(d, 1000, RngStream(51));
  RngStream c(50);
  const PairSample z = sample_coupled_pair(d, CouplingMode::reordering, Functional::supremum, c, cache.get());
  const double k = static_cast<double>(d.spec.k_prime);
  REQUIRE(z.cost == Catch::Approx(x.cost + k * std::log2(k)));
  REQUIRE(fine_values(estimate_level_stats(d, CouplingMode::independent, Functional::terminal, 50, RngStream(52))) ==
          fine_values(estimate_level_stats(d, CouplingMode::independent, Functional::terminal, 50, RngStream(52))));
}
