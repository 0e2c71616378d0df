#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ngas/distributions.hpp"
#include "ngas/error.hpp"
#include "ngas/estimation.hpp"

using namespace ngas;

namespace {

PointCloud cloud_from(const DatasetSpec& spec) { return generate_dataset(spec); }

PointCloud normal_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
  DatasetSpec s;
  s.shape = PointShape{Point(dim, 0.0)};
  s.noise = GaussianNoise{1.0};
  s.n_points = n;
  s.seed = seed;
  return cloud_from(s);
}

Codebook units_at_radii(const std::vector<double>& radii, std::uint64_t seed) {
  Rng rng(seed);
  PointCloud pc(3);
  std::vector<double> dir(3);
  for (double r : radii) {
    random_direction(dir, rng);
    for (double& x : dir) x *= r;
    pc.push_back(dir);
  }
  return Codebook(std::move(pc));
}

DensityTable synthetic_table(double alpha, double c, std::size_t n) {
  DensityTable t;
  t.dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    DensityRow r;
    r.unit = i;
    r.position = {double(i)};
    r.p_hat = 0.01 + 0.37 * i;
    r.rho_hat = c * std::pow(r.p_hat, alpha);
    r.log10_p = std::log10(r.p_hat);
    r.log10_rho = std::log10(r.rho_hat);
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("optimal_m0") {
  CHECK(optimal_m0(1, 2) == 1);
  CHECK(optimal_m0(10000, 3) == 193);
  CHECK(optimal_m0(100000, 2) == 2154);
  CHECK(optimal_m0(2, 1) == 2);
}

TEST_CASE("unit ball volume") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14));
}

TEST_CASE("kdistance examples") {
  const DensityIndex origin(PointCloud(2, {0.0, 0.0}), 1);
  const Point x{0.6, 0.8};
  CHECK(kdistance(origin, x) == doctest::Approx(1.0).epsilon(1e-15));
  const Point o{0.0, 0.0};
  CHECK(kdistance(origin, o) == 0.0);
  CHECK_THROWS_AS(estimate_density(origin, o), SingularEstimate);

  const DensityIndex two(PointCloud(1, {0.0, 2.0}), 2);
  const Point z{0.0};
  CHECK(kdistance(two, z) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(DensityIndex(PointCloud(1, {0.0}), 2), InvalidInput);
}

TEST_CASE("disk density is 1/pi in the interior") {
  DatasetSpec s;
  s.shape = DiskShape{};
  s.n_points = 100000;
  s.seed = 3;
  const auto cloud = cloud_from(s);
  const DensityIndex index(cloud, optimal_m0(cloud.size(), 2));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  int checked = 0;
  while (checked < 100) {
    const Point q{u(rng), u(rng)};
    if (norm(q) >= 0.7) continue;
    ++checked;
    REQUIRE(std::abs(estimate_density(index, q) - 1.0 / std::numbers::pi) < 0.1 / std::numbers::pi);
  }
}

TEST_CASE("normal density is ordered and scales as s^-D") {
  const auto cloud = normal_cloud(20000, 2, 5);
  const DensityIndex index(cloud, optimal_m0(cloud.size(), 2));
  const Point o{0.0, 0.0}, far{2.0, 0.0};
  CHECK(estimate_density(index, o) > estimate_density(index, far));

  const double s = 3.0;
  PointCloud scaled = cloud;
  for (double& x : scaled.coords()) x *= s;
  const DensityIndex sindex(scaled, index.m0());
  const Point q{0.3, -0.2}, sq_{0.9, -0.6};
  CHECK(estimate_density(sindex, sq_) == doctest::Approx(estimate_density(index, q) / (s * s)).epsilon(1e-12));
}

TEST_CASE("estimate is invariant under rigid motions") {
  const auto cloud = normal_cloud(3000, 3, 6);
  const double m0 = optimal_m0(cloud.size(), 3);
  // Rotation about z by 0.7 rad plus a translation.
  const double c = std::cos(0.7), sn = std::sin(0.7);
  auto move = [&](std::span<const double> p) {
    return Point{c * p[0] - sn * p[1] + 1.5, sn * p[0] + c * p[1] - 2.0, p[2] + 0.25};
  };
  PointCloud moved(3);
  for (std::size_t i = 0; i < cloud.size(); ++i) moved.push_back(move(cloud[i]));
  const DensityIndex a(cloud, m0), b(moved, m0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    const Point q{g(rng), g(rng), g(rng)};
    const double ea = estimate_density(a, q), eb = estimate_density(b, move(q));
    REQUIRE(std::abs(ea - eb) <= 1e-12 * ea);
  }
}

TEST_CASE("kdistance is 1-Lipschitz") {
  const auto cloud = normal_cloud(2000, 2, 7);
  const DensityIndex index(cloud, 40);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.5);
  for (int i = 0; i < 500; ++i) {
    const Point x{g(rng), g(rng)}, y{g(rng), g(rng)};
    REQUIRE(std::abs(kdistance(index, x) - kdistance(index, y)) <= std::sqrt(squared_distance(x, y)) + 1e-12);
  }
}

TEST_CASE("kd-tree k-NN equals exhaustive scan") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> nd(1, 500), dd(1, 4), lat(-4, 4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = nd(rng), dim = dd(rng);
    std::vector<double> c(n * dim);
    for (double& x : c) x = trial % 3 == 0 ? lat(rng) : g(rng);  // lattice trials force ties
    const PointCloud cloud(dim, c);
    const KdTree tree(cloud, 1 + trial % 8);
    for (int q = 0; q < 20; ++q) {
      Point x(dim);
      for (double& v : x) v = trial % 3 == 0 ? lat(rng) : g(rng);
      const std::size_t m = 1 + rng() % n;
      REQUIRE(tree.knn(x, m) == brute_force_knn(cloud, x, m));
    }
  }
}

TEST_CASE("density table") {
  SUBCASE("k = 2 uses the single other unit") {
    const Codebook cb(PointCloud(1, {0.0, 1.0}));
    const PointCloud data(1, {-0.5, 0.2, 0.4, 0.9, 1.3});
    const auto t = density_table(cb, data);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.m0_units == 1);
    // One neighbor at distance 1, N = 1: rho = k * (1 / (1 * 2)) * (1 / 1)^(1/2).
    CHECK(t.rows[0].rho_hat == doctest::Approx(1.0));
    CHECK(t.rows[1].rho_hat == doctest::Approx(1.0));
    for (const auto& r : t.rows) {
      CHECK(r.p_hat > 0.0);
      CHECK(r.log10_p == doctest::Approx(std::log10(r.p_hat)));
      CHECK(r.log10_rho == doctest::Approx(std::log10(r.rho_hat)));
    }
  }
  SUBCASE("duplicate units are singular") {
    const Codebook cb(PointCloud(1, {0.0, 0.0}));
    const PointCloud data(1, {-0.5, 0.2, 0.4, 0.9, 1.3});
    try {
      density_table(cb, data);
      FAIL("expected SingularEstimate");
    } catch (const SingularEstimate& e) {
      CHECK((e.unit() == 0 || e.unit() == 1));
    }
  }
  SUBCASE("k = 1 is rejected") {
    CHECK_THROWS_AS(density_table(Codebook(PointCloud(1, {0.0})), PointCloud(1, {1.0, 2.0})),
                    InvalidInput);
  }
  SUBCASE("one row per unit") {
    const auto data = normal_cloud(5000, 2, 3);
    Rng rng(1);
    const auto cb = init_from_cloud(data, 100, rng);
    const auto t = density_table(cb, data);
    CHECK(t.rows.size() == 100);
    CHECK(t.m0_data == optimal_m0(5000, 2));
    CHECK(t.m0_units == optimal_m0(100, 2));
  }
}

TEST_CASE("winner histogram") {
  const PointCloud signals(1, {-2.0, -1.0, 1.0, 2.0, 0.0});
  CHECK(winner_histogram(Codebook(PointCloud(1, {5.0})), signals) == std::vector<double>{1.0});
  // The signal at 0 ties and goes to the lower index.
  CHECK(winner_counts(Codebook(PointCloud(1, {-1.0, 1.0})), signals) == std::vector<std::size_t>{3, 2});
  CHECK_THROWS_AS(winner_histogram(Codebook(PointCloud(1, {0.0})), PointCloud(1)), InvalidInput);

  const auto cloud = normal_cloud(20000, 2, 11);
  const auto p = winner_histogram(Codebook(PointCloud(2, {-1.0, 0.0, 1.0, 0.0})), cloud);
  CHECK(std::abs(p[0] - 0.5) < 3.0 * 0.5 / std::sqrt(20000.0));
  CHECK(p[0] + p[1] == 1.0);
}

TEST_CASE("entropy") {
  const std::vector<double> one_hot{0.0, 1.0, 0.0};
  CHECK(entropy(one_hot) == 0.0);
  const std::vector<double> half{0.5, 0.5};
  CHECK(entropy(half) == doctest::Approx(0.693147180559945).epsilon(1e-14));
  const std::vector<double> uniform(1024, 1.0 / 1024);
  CHECK(entropy(uniform) == doctest::Approx(6.93147180559945).epsilon(1e-12));
  const std::vector<double> bad{0.5, 0.6};
  CHECK_THROWS_AS(entropy(bad), InvalidInput);
  const std::vector<double> neg{1.5, -0.5};
  CHECK_THROWS_AS(entropy(neg), InvalidInput);

  std::mt19937_64 rng(12);
  std::exponential_distribution<double> e;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + rng() % 64;
    std::vector<double> p(k);
    double s = 0.0;
    for (double& x : p) s += (x = trial % 5 == 0 && rng() % 2 ? 0.0 : e(rng));
    if (s == 0.0) continue;
    for (double& x : p) x /= s;
    const double h = entropy(p);
    REQUIRE(h >= 0.0);
    REQUIRE(h <= std::log(double(k)) + 1e-12);
  }
}

TEST_CASE("proximity") {
  const SphereReference unit{Point{0.0, 0.0, 0.0}, 1.0};
  CHECK(proximity(units_at_radii(std::vector<double>(40, 1.0), 1), unit) < 1e-12);
  CHECK(proximity(Codebook(PointCloud(3, {1.5, 0.0, 0.0})), unit) == doctest::Approx(0.5));
  CHECK(proximity(units_at_radii({0.2, 1.0}, 2), unit) == doctest::Approx(0.8));

  const PointCloud ref(1, {0.0, 3.0});
  CHECK(proximity(Codebook(PointCloud(1, {1.0, 2.5})), ref) == doctest::Approx(1.0));
  CHECK_THROWS_AS(proximity(Codebook(PointCloud(1, {1.0})), PointCloud(1)), InvalidInput);
}

TEST_CASE("hausdorff") {
  CHECK(hausdorff(PointCloud(1, {0.0}), PointCloud(1, {0.0, 3.0})) == 3.0);
  const PointCloud a(2, {0, 0, 1, 1, 2, 0});
  CHECK(hausdorff(a, a) == 0.0);
  CHECK_THROWS_AS(hausdorff(a, PointCloud(2)), InvalidInput);
  CHECK_THROWS_AS(hausdorff(a, PointCloud(1, {0.0})), InvalidInput);

  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  auto random_cloud = [&] {
    PointCloud c(2);
    const std::size_t n = 1 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i) c.push_back(Point{g(rng), g(rng)});
    return c;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_cloud(), y = random_cloud(), z = random_cloud();
    const double xy = hausdorff(x, y), yz = hausdorff(y, z), xz = hausdorff(x, z);
    REQUIRE(xy == hausdorff(y, x));
    REQUIRE(xz <= xy + yz + 1e-12);
  }
}

TEST_CASE("power law fit") {
  const auto exact = synthetic_table(0.6, 2.5, 40);
  const auto f = fit_power_law(exact, 0.0);
  CHECK(std::abs(f.alpha - 0.6) < 1e-9);
  CHECK(f.intercept == doctest::Approx(std::log(2.5)).epsilon(1e-9));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.rows_used == 40);
  CHECK(fit_power_law(exact, 0.05).rows_used == 38);

  std::mt19937_64 rng(14);
  std::normal_distribution<double> g(0.0, 0.3);
  auto noisy = synthetic_table(0.5, 1.0, 200);
  for (auto& r : noisy.rows) r.rho_hat *= std::exp(g(rng));
  auto scaled = noisy;
  for (auto& r : scaled.rows) r.p_hat *= 17.0;
  CHECK(std::abs(fit_power_law(noisy).alpha - fit_power_law(scaled).alpha) < 1e-12);

  CHECK_THROWS_AS(fit_power_law(synthetic_table(0.5, 1.0, 10), 0.1), InvalidInput);
  CHECK_THROWS_AS(fit_power_law(exact, 1.0), InvalidInput);
}

TEST_CASE("radial phase classifier") {
  const Point center{0.0, 0.0, 0.0};
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  std::vector<double> shell;
  for (int i = 0; i < 128; ++i) shell.push_back(1.0 + 0.02 * (u(rng) - 0.5));
  CHECK(radial_profile_classify(units_at_radii(shell, 1), center) == PhaseLabel::Shell);

  std::vector<double> solid;
  for (int i = 0; i < 256; ++i) solid.push_back(std::cbrt(u(rng)));
  CHECK(radial_profile_classify(units_at_radii(solid, 2), center) == PhaseLabel::Solid);

  std::vector<double> mixed;
  for (int i = 0; i < 128; ++i) mixed.push_back(1.0 + 0.02 * (u(rng) - 0.5));
  for (int i = 0; i < 128; ++i) mixed.push_back(0.6 * std::cbrt(u(rng)));
  CHECK(radial_profile_classify(units_at_radii(mixed, 3), center) == PhaseLabel::ShellPlusCore);

  const Codebook same(PointCloud(3, std::vector<double>(3 * 40, 0.5)));
  CHECK_THROWS_AS(radial_profile_classify(same, center), DegenerateConfiguration);
  const std::vector<double> few(10, 1.0);
  CHECK_THROWS_AS(radial_profile_classify(units_at_radii(few, 4), center), InvalidInput);

  for (auto l : {PhaseLabel::Solid, PhaseLabel::ShellPlusCore, PhaseLabel::Shell})
    CHECK(phase_from_string(to_string(l)) == l);
  CHECK_THROWS_AS(phase_from_string("liquid"), InvalidInput);
}
