#include <doctest.h>

#include <cmath>

#include "meshchain/rng.hpp"

using namespace meshchain;

TEST_CASE("same seed reproduces the stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("uniform stays in [0,1) and fills the range") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform_int is unbiased across a small range") {
    Rng rng(11);
    int counts[5] = {};
    for (int i = 0; i < 50000; ++i) counts[rng.uniform_int(5)] += 1;
    for (int c : counts) {
        CHECK(c > 9500);
        CHECK(c < 10500);
    }
}

TEST_CASE("normal has roughly standard moments") {
    Rng rng(3);
    double sum = 0.0, sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("lognormal matches its analytic mean") {
    const double mu = 2.0296169;
    const double sigma = 1.0774459;
    Rng rng(5);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += rng.lognormal(mu, sigma);
    const double expected = std::exp(mu + sigma * sigma / 2.0);
    CHECK(sum / n == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("split streams are independent and label-keyed") {
    Rng base(9);
    Rng a = Rng(9).split("alpha");
    Rng a2 = Rng(9).split("alpha");
    Rng b = Rng(9).split("beta");
    CHECK(a.next_u64() == a2.next_u64());
    CHECK(a.next_u64() != b.next_u64());
    CHECK(a.next_u64() != base.next_u64());
}

TEST_CASE("inverse normal cdf hits known quantiles") {
    CHECK(std::abs(inverse_normal_cdf(0.5)) < 1e-9);
    CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959964).epsilon(1e-5));
    CHECK(inverse_normal_cdf(0.6) == doctest::Approx(0.2533471).epsilon(1e-5));
    CHECK(inverse_normal_cdf(0.1) == doctest::Approx(-inverse_normal_cdf(0.9)).epsilon(1e-9));
    CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::runtime_error);
    CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::runtime_error);
}
