#include <doctest.h>

#include <cmath>

#include "gamesum/nn.hpp"
#include "gamesum/rng.hpp"
#include "oracles.hpp"

using namespace gamesum;
using nn::Vec;

namespace {

Vec random_vec(Rng& rng, std::size_t dim, double lo = -2.0, double hi = 2.0) {
  Vec v(dim, 0.0);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("layer norm matches the independent oracle") {
  Rng rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t dim = 64;
    nn::LayerNorm ln(dim);
    ln.gain = random_vec(rng, dim, 0.5, 1.5);
    ln.offset = random_vec(rng, dim, -0.5, 0.5);
    const Vec x = random_vec(rng, dim);
    const Vec got = ln.forward(x);
    const Vec want = testoracle::layer_norm(x, ln.gain, ln.offset, nn::LayerNorm::kEps);
    for (std::size_t i = 0; i < dim; ++i) {
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(0).scale(1e-6));
    }
  }
}

TEST_CASE("layer norm output is normalized before the affine part") {
  Rng rng(5);
  nn::LayerNorm ln(32);  // identity gain/offset
  const Vec y = ln.forward(random_vec(rng, 32));
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size());
  CHECK(std::abs(mean) < 1e-5);
  CHECK(std::abs(var - 1.0) < 1e-5);
}

TEST_CASE("layer norm of the zero vector is zero under identity init") {
  nn::LayerNorm ln(8);
  const Vec y = ln.forward(Vec(8, 0.0));
  for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("layer norm backward matches finite differences") {
  Rng rng(1234);
  const std::size_t dim = 16;
  nn::LayerNorm ln(dim);
  ln.gain = random_vec(rng, dim, 0.5, 1.5);
  ln.offset = random_vec(rng, dim, -0.3, 0.3);
  const Vec x = random_vec(rng, dim);
  const Vec upstream = random_vec(rng, dim, -1.0, 1.0);

  nn::LayerNormCache cache;
  ln.forward(x, &cache);
  Vec dgain, doffset;
  const Vec dx = ln.backward(upstream, cache, &dgain, &doffset);

  const auto loss = [&](const Vec& input) {
    return nn::dot(ln.forward(input), upstream);
  };
  const double h = 1e-6;
  for (std::size_t i = 0; i < dim; ++i) {
    Vec xp = x;
    Vec xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (loss(xp) - loss(xm)) / (2.0 * h);
    CHECK(dx[i] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("binary cross entropy matches the hand-computed two-example batch") {
  // Mean of -log(0.8) and -log(1 - 0.3).
  const double loss =
      0.5 * (nn::binary_cross_entropy(0.8, 1) + nn::binary_cross_entropy(0.3, 0));
  const double want = 0.5 * (-std::log(0.8) - std::log(0.7));
  CHECK(loss == doctest::Approx(want).epsilon(1e-6));
  CHECK(nn::binary_cross_entropy(0.5, 1) >= 0.0);
  CHECK(nn::binary_cross_entropy(1e-20, 0) >= 0.0);
}

TEST_CASE("matvec and transpose agree with naive loops") {
  nn::Mat m(3, 2);
  m.at(0, 0) = 1;
  m.at(0, 1) = 2;
  m.at(1, 0) = 3;
  m.at(1, 1) = 4;
  m.at(2, 0) = 5;
  m.at(2, 1) = 6;
  const Vec y = nn::matvec(m, {1.0, -1.0});
  CHECK(y == Vec{-1.0, -1.0, -1.0});
  const Vec x = nn::matvec_t(m, {1.0, 0.0, 1.0});
  CHECK(x == Vec{6.0, 8.0});
}

TEST_CASE("rng is reproducible and box-muller is finite") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform() == b.uniform());
    const double g = a.gaussian();
    CHECK(std::isfinite(g));
    b.gaussian();
  }
}
