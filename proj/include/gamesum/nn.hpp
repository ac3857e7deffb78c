#pragma once

#include <cstddef>
#include <vector>

namespace gamesum::nn {

using Vec = std::vector<double>;

// Row-major dense matrix, just enough linear algebra for the desk-scale
// models in this toolkit.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

Vec matvec(const Mat& m, const Vec& x);      // m x
Vec matvec_t(const Mat& m, const Vec& y);    // m^T y
void add_outer(Mat& g, const Vec& u, const Vec& v, double scale = 1.0);  // g += scale * u v^T
void axpy(Vec& y, const Vec& x, double a = 1.0);                         // y += a x
double dot(const Vec& a, const Vec& b);
Vec mean_of(const std::vector<Vec>& rows);

double sigmoid(double x);
// Numerically safe binary cross-entropy of probability p against label y.
double binary_cross_entropy(double p, int y);

struct LayerNormCache {
  Vec xhat;
  double inv_sigma = 0.0;
};

// Layer normalization with learnable gain/offset, initialized to identity.
class LayerNorm {
 public:
  explicit LayerNorm(std::size_t dim) : gain(dim, 1.0), offset(dim, 0.0) {}

  std::size_t dim() const { return gain.size(); }

  Vec forward(const Vec& x, LayerNormCache* cache = nullptr) const;
  // Gradient wrt x given upstream dy; accumulates parameter gradients when
  // sinks are supplied.
  Vec backward(const Vec& dy, const LayerNormCache& cache, Vec* dgain = nullptr,
               Vec* doffset = nullptr) const;

  Vec gain;
  Vec offset;

  // Small enough that normalized variance stays within 1e-5 of one; large
  // enough to keep the all-equal input case finite.
  static constexpr double kEps = 1e-12;
};

struct AdamConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Vec m;
  Vec v;
};

// One Adam update for a flat parameter vector; t is the 1-based step count.
void adam_step(Vec& param, const Vec& grad, AdamState& state,
               const AdamConfig& cfg, long t);

}  // namespace gamesum::nn
