#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "distill/numerics.hpp"

using namespace distill;

namespace {

Vec random_logits(Rng& rng, std::size_t k, double amp) {
  Vec z(k);
  for (double& v : z) v = rng.uniform(-amp, amp);
  return z;
}

}  // namespace

TEST_CASE("softmax: hand values") {
  const Vec p = softmax({0.0, 0.0}, 1.0);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));

  const Vec q = softmax({std::log(2.0), 0.0}, 1.0);
  CHECK(q[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(q[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("softmax: constant vector gives uniform at any temperature") {
  for (double c : {-3.0, 0.0, 42.0}) {
    for (double t : {1e-3, 1.0, 1e6}) {
      const Vec p = softmax(Vec(7, c), t);
      for (double v : p) CHECK(v == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("softmax: stays normalized across temperatures") {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t k = 2 + rng.next_u64() % 200;
    const Vec z = random_logits(rng, k, 5.0);
    for (double t : {1e-3, 0.1, 1.0, 100.0, 1e6, 1e9}) {
      const Vec p = softmax(z, t);
      double s = 0.0;
      for (double v : p) {
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(std::fabs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("softmax: shift invariance") {
  Rng rng(12);
  for (int rep = 0; rep < 50; ++rep) {
    const Vec z = random_logits(rng, 10, 5.0);
    const double c = rng.uniform(-100.0, 100.0);
    Vec zs = z;
    for (double& v : zs) v += c;
    for (double t : {0.5, 1.0, 10.0}) {
      const Vec a = softmax(z, t);
      const Vec b = softmax(zs, t);
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::fabs(a[i] - b[i]) <= 1e-14);
      }
    }
  }
}

TEST_CASE("softmax: approach to uniform bounded by max|z - mean|/T") {
  Rng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t k = 2 + rng.next_u64() % 20;
    const Vec z = random_logits(rng, k, 5.0);
    const double c = mean(z);
    double dev = 0.0;
    for (double v : z) dev = std::max(dev, std::fabs(v - c));
    for (double t : {10.0 * max_abs(z) + 1.0, 1e4, 1e7}) {
      const Vec p = softmax(z, t);
      for (double v : p) {
        CHECK(std::fabs(v - 1.0 / static_cast<double>(k)) <= dev / t);
      }
    }
  }
}

TEST_CASE("softmax: no overflow for |z/T| up to 700") {
  const Vec p = softmax({700.0, -700.0}, 1.0);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(std::isfinite(p[1]));
}

TEST_CASE("softmax: input validation") {
  CHECK_THROWS_AS((softmax({1.0}, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS((softmax({1.0, std::nan("")}, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS((softmax({1.0, 2.0}, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS((softmax({1.0, 2.0}, -1.0)), std::invalid_argument);
  CHECK_THROWS_AS((softmax({1.0, 2.0}, std::numeric_limits<double>::infinity())), std::invalid_argument);
}

TEST_CASE("log_sum_exp: hand values and stability") {
  CHECK(log_sum_exp({0.0, 0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_sum_exp({1000.0, 1000.0}) ==
        doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  // a single dominant entry wins
  CHECK(log_sum_exp({50.0, -50.0}) == doctest::Approx(50.0).epsilon(1e-15));
  CHECK_THROWS_AS((log_sum_exp({1.0, std::numeric_limits<double>::infinity()})), std::invalid_argument);
}

TEST_CASE("log_sum_exp: bracketed by max and max + ln K") {
  Rng rng(14);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t k = 2 + rng.next_u64() % 50;
    const Vec z = random_logits(rng, k, 20.0);
    const double lse = log_sum_exp(z);
    double m = z[0];
    for (double v : z) m = std::max(m, v);
    CHECK(lse >= m);
    CHECK(lse <= m + std::log(static_cast<double>(k)) + 1e-12);
  }
}

TEST_CASE("mean: hand values") {
  CHECK(mean({1.0, -1.0}) == 0.0);
  CHECK(mean({2.0, 0.0}) == 1.0);
  CHECK(mean({3.0, 3.0, 3.0}) == 3.0);
}

TEST_CASE("mean: compensated for long vectors") {
  Vec z(200000, 0.1);
  CHECK(std::fabs(mean(z) - 0.1) <= 1e-16);
}

TEST_CASE("rng: same seed, same stream") {
  Rng a(123456789), b(123456789);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(123456789), d(987654321);
  int diff = 0;
  for (int i = 0; i < 10; ++i) diff += c.next_u64() != d.next_u64();
  CHECK(diff > 0);
}

TEST_CASE("rng: uniform range and rough moments") {
  Rng rng(7);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    s += u;
  }
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));

  double sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.normal();
    sn += g;
    sn2 += g * g;
  }
  CHECK(sn / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("derive_seed decorrelates run indices") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(1, 5) == derive_seed(1, 5));
}
