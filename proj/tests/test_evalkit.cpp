#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "rvcop/evalkit.hpp"
#include "test_support.hpp"

using namespace rvcop;
using rvcop::testing::random_spd;

namespace {

CovarianceSeries series_of(const std::vector<Matrix>& mats) {
  CovarianceSeries s;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    s.dates.push_back("d" + std::to_string(i));
    s.mats.push_back(mats[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("frobenius rmse follows the upper-triangle formula") {
  Matrix a(2, 2), b(2, 2);
  a << 4, 6, 6, 5;
  b << 1, 2, 2, 5;
  // error [[3,4],[4,0]] -> sqrt(9 + 16 + 0) = 5 over the upper triangle
  CHECK(frobenius_day_loss(a, b) == doctest::Approx(5.0));

  const CovarianceSeries fc = series_of({a, b});
  CHECK(frobenius_rmse(fc, fc) == doctest::Approx(0.0));

  Matrix s1(1, 1), s2(1, 1);
  s1 << 2.5;
  s2 << 1.0;
  CHECK(frobenius_rmse(series_of({s1}), series_of({s2})) == doctest::Approx(1.5));

  CovarianceSeries other = fc;
  other.dates[0] = "mismatch";
  CHECK_THROWS_AS(frobenius_rmse(fc, other), DataError);
}

TEST_CASE("frobenius rmse is invariant under a consistent permutation") {
  RngStream rng(1);
  const Matrix f = random_spd(4, rng), r = random_spd(4, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(4);
  p.setIdentity();
  p.indices() << 2, 0, 3, 1;
  const Matrix fp = p.transpose() * f * p;
  const Matrix rp = p.transpose() * r * p;
  CHECK(frobenius_day_loss(f, r) == doctest::Approx(frobenius_day_loss(fp, rp)));
}

TEST_CASE("stein loss scalar values and orientation") {
  Matrix one(1, 1), half(1, 1), two(1, 1);
  one << 1.0;
  half << 0.5;
  two << 2.0;
  CHECK(stein_loss(one, one) == doctest::Approx(0.0));
  CHECK(stein_loss(half, one) == doctest::Approx(2.0 - std::log(2.0) - 1.0));  // 0.3069
  CHECK(stein_loss(two, one) == doctest::Approx(0.5 + std::log(2.0) - 1.0));   // 0.1931
  CHECK(stein_loss(half, one) > stein_loss(two, one));  // underprediction dominates
  // the literal-formula orientation swaps the asymmetry
  CHECK(stein_loss(half, one, SteinOrientation::literal_formula) ==
        doctest::Approx(0.5 + std::log(2.0) - 1.0));
  CHECK(stein_loss(two, one, SteinOrientation::literal_formula) ==
        doctest::Approx(2.0 - std::log(2.0) - 1.0));
}

TEST_CASE("stein loss is nonnegative, zero only at equality") {
  RngStream rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(5));
    const Matrix f = random_spd(n, rng), r = random_spd(n, rng);
    const double loss = stein_loss(f, r);
    CHECK(loss >= -1e-10);
    CHECK(stein_loss(r, r) == doctest::Approx(0.0).epsilon(1e-10));
    // scaled versions: halving penalized more than doubling
    CHECK(stein_loss(0.5 * r, r) > stein_loss(2.0 * r, r));
    if (loss < 1e-10) CHECK((f - r).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("stein loss rejects singular inputs") {
  Matrix sing(2, 2);
  sing << 1, 1, 1, 1;
  Matrix ok(2, 2);
  ok << 1, 0, 0, 1;
  CHECK_THROWS_AS(stein_loss(sing, ok), NumericError);
}

TEST_CASE("mcs retains everything with identical losses") {
  std::map<std::string, std::vector<double>> losses;
  RngStream rng(3);
  std::vector<double> base(100);
  for (double& v : base) v = 1.0 + 0.1 * rng.normal();
  losses["a"] = base;
  losses["b"] = base;
  losses["c"] = base;
  const McsResult res = mcs(losses, 0.05, 199, 5, 11);
  CHECK(res.retained.size() == 3);
  for (const auto& [name, p] : res.pvalues) CHECK(p == doctest::Approx(1.0));
}

TEST_CASE("mcs eliminates a strongly inferior model first") {
  RngStream rng(4);
  std::map<std::string, std::vector<double>> losses;
  const int t_out = 300;
  for (const char* name : {"m1", "m2", "m3", "m4"}) {
    std::vector<double> v(t_out);
    for (double& x : v) x = 1.0 + 0.2 * rng.normal();
    losses[name] = v;
  }
  std::vector<double> bad(t_out);
  for (double& x : bad) x = 1.0 + 0.2 * rng.normal() + 10.0 * 0.2 / std::sqrt(300.0) * 10;
  losses["shifted"] = bad;
  const McsResult res = mcs(losses, 0.05, 299, 7, 12);
  REQUIRE(!res.elimination_order.empty());
  CHECK(res.elimination_order.front() == "shifted");
  CHECK(std::find(res.retained.begin(), res.retained.end(), "shifted") ==
        res.retained.end());
}

TEST_CASE("mcs single model trivially retained") {
  std::map<std::string, std::vector<double>> losses{{"only", {1.0, 2.0, 3.0, 2.0}}};
  const McsResult res = mcs(losses, 0.05, 99, 2, 13);
  CHECK(res.retained == std::vector<std::string>{"only"});
  CHECK(res.pvalues.at("only") == doctest::Approx(1.0));
}

TEST_CASE("mcs retained set shrinks as alpha grows, p-values run upward") {
  RngStream rng(5);
  std::map<std::string, std::vector<double>> losses;
  for (int m = 0; m < 5; ++m) {
    std::vector<double> v(200);
    for (double& x : v) x = 1.0 + 0.05 * m + 0.3 * rng.normal();
    losses["m" + std::to_string(m)] = v;
  }
  std::size_t prev = 100;
  for (double alpha : {0.01, 0.05, 0.2, 0.5}) {
    const McsResult res = mcs(losses, alpha, 199, 6, 14);
    CHECK(res.retained.size() <= prev);
    prev = res.retained.size();
    // elimination-order p-values are nondecreasing by the running-max rule
    double last = 0.0;
    for (const std::string& name : res.elimination_order) {
      CHECK(res.pvalues.at(name) >= last);
      last = res.pvalues.at(name);
    }
  }
}

TEST_CASE("mcs is deterministic regardless of the openmp thread count") {
  RngStream rng(6);
  std::map<std::string, std::vector<double>> losses;
  for (int m = 0; m < 4; ++m) {
    std::vector<double> v(150);
    for (double& x : v) x = 1.0 + 0.02 * m + 0.2 * rng.normal();
    losses["m" + std::to_string(m)] = v;
  }
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const McsResult a = mcs(losses, 0.05, 499, 6, 15);
  omp_set_num_threads(saved);
  const McsResult b = mcs(losses, 0.05, 499, 6, 15);
  CHECK(a.retained == b.retained);
  CHECK(a.elimination_order == b.elimination_order);
  for (const auto& [name, p] : a.pvalues) CHECK(p == doctest::Approx(b.pvalues.at(name)));
}

TEST_CASE("gmvp closed forms") {
  const Vector mu = (Vector(2) << 0.01, 0.01).finished();
  const GmvpResult eq = gmvp(Matrix::Identity(2, 2), mu, 0.01);
  REQUIRE(eq.feasible);
  CHECK(eq.weights[0] == doctest::Approx(0.5));
  CHECK(eq.weights[1] == doctest::Approx(0.5));

  Matrix d(2, 2);
  d << 1, 0, 0, 4;
  const GmvpResult iv = gmvp(d, mu, 0.01);
  REQUIRE(iv.feasible);
  CHECK(iv.weights[0] == doctest::Approx(0.8));
  CHECK(iv.weights[1] == doctest::Approx(0.2));
  // the return constraint is slack with equal expected returns
  const GmvpResult un = gmvp(d, mu, {});
  CHECK(un.weights[0] == doctest::Approx(0.8));

  const Vector spread = (Vector(2) << 0.01, 0.03).finished();
  CHECK_FALSE(gmvp(d, spread, 0.05).feasible);  // above the max expected return
}

TEST_CASE("gmvp satisfies the KKT conditions on random instances") {
  RngStream rng(7);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 6;
    const Matrix g = random_spd(n, rng, 0.2, 5.0);
    Vector mu(n);
    for (int i = 0; i < n; ++i) mu[i] = 0.01 * rng.normal();
    std::optional<double> target;
    if (rep % 2 == 0)
      target = mu.minCoeff() + (mu.maxCoeff() - mu.minCoeff()) * rng.uniform();
    const GmvpResult sol = gmvp(g, mu, target);
    REQUIRE(sol.feasible);
    CHECK(gmvp_kkt_residual(g, mu, target, sol.weights) < 1e-6);
    CHECK(sol.weights.minCoeff() > -1e-12);
    CHECK(sol.weights.sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("the oracle frontier dominates model frontiers") {
  RngStream rng(8);
  const int days = 40, n = 4;
  std::vector<Matrix> realized;
  Matrix avg = Matrix::Zero(n, n);
  for (int t = 0; t < days; ++t) {
    realized.push_back(random_spd(n, rng, 0.5, 3.0) * 1e-4);
    avg += realized.back();
  }
  avg /= days;
  std::map<std::string, CovarianceSeries> forecasts;
  forecasts["constant"] = series_of(std::vector<Matrix>(days, avg));
  Matrix expected(days, n);
  for (int t = 0; t < days; ++t)
    for (int i = 0; i < n; ++i) expected(t, i) = 0.0005 + 0.0002 * i + 1e-5 * rng.normal();
  const CovarianceSeries rz = series_of(realized);
  const std::vector<double> grid = default_mu_grid(expected, 15);
  const auto pts = efficient_frontier(forecasts, rz, expected, grid);
  REQUIRE(pts.size() == 2 * grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const FrontierPoint* oracle = nullptr;
    const FrontierPoint* model = nullptr;
    for (const auto& p : pts)
      if (p.mu_p == grid[g]) {
        if (p.model == "oracle") oracle = &p;
        else model = &p;
      }
    REQUIRE(oracle);
    REQUIRE(model);
    CHECK(oracle->n_feasible_days == model->n_feasible_days);
    if (oracle->n_feasible_days > 0) CHECK(oracle->avg_sd <= model->avg_sd + 1e-12);
  }
  // heteroskedastic truth: the constant forecast is strictly worse on average
  double oracle_total = 0.0, model_total = 0.0;
  for (const auto& p : pts)
    if (p.n_feasible_days > 0) (p.model == "oracle" ? oracle_total : model_total) += p.avg_sd;
  CHECK(oracle_total < model_total);
}

TEST_CASE("single-asset frontier forces unit weight") {
  RngStream rng(9);
  const int days = 10;
  std::vector<Matrix> realized;
  for (int t = 0; t < days; ++t) {
    Matrix m(1, 1);
    m << 1e-4 * (1.0 + 0.5 * rng.uniform());
    realized.push_back(m);
  }
  std::map<std::string, CovarianceSeries> forecasts;
  Matrix c(1, 1);
  c << 5e-5;
  forecasts["any"] = series_of(std::vector<Matrix>(days, c));
  const Matrix expected = Matrix::Constant(days, 1, 0.001);
  const auto pts = efficient_frontier(forecasts, series_of(realized), expected, {0.001});
  double want = 0.0;
  for (int t = 0; t < days; ++t) want += std::sqrt(realized[t](0, 0));
  want /= days;
  for (const auto& p : pts) {
    CHECK(p.n_feasible_days == days);
    CHECK(p.avg_sd == doctest::Approx(want));
  }
}

TEST_CASE("rank correlation matrix on constructed columns") {
  const int t_len = 50;
  VechHistory h;
  h.coord = Coord::cholesky;
  h.series.resize(t_len, 3);
  for (int t = 0; t < t_len; ++t) {
    h.series(t, 0) = t;         // increasing
    h.series(t, 1) = -t;        // decreasing
    h.series(t, 2) = 1.0;       // constant
  }
  const Matrix rho = rank_corr_matrix(h);
  CHECK(rho.rows() == 6);
  CHECK(rho(0, 0) == doctest::Approx(1.0));
  CHECK(rho(0, 1) == doctest::Approx(-1.0));
  CHECK(rho(0, 3) == doctest::Approx(1.0));  // lag of an increasing column
  CHECK(std::isnan(rho(0, 2)));
  CHECK(std::isnan(rho(2, 2)));
}

TEST_CASE("rank correlations vanish for independent columns") {
  RngStream rng(10);
  VechHistory h;
  h.coord = Coord::cholesky;
  h.series.resize(5000, 3);
  for (int t = 0; t < 5000; ++t)
    for (int j = 0; j < 3; ++j) h.series(t, j) = rng.normal();
  const Matrix rho = rank_corr_matrix(h);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j && std::fabs(i - j) != 3) CHECK(std::fabs(rho(i, j)) < 0.05);
}
