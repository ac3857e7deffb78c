#include "gamesum/nn.hpp"

#include <cassert>
#include <cmath>

#include "gamesum/common.hpp"

namespace gamesum::nn {

Vec matvec(const Mat& m, const Vec& x) {
  assert(x.size() == m.cols);
  Vec y(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    double acc = 0.0;
    const double* row = m.a.data() + r * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

Vec matvec_t(const Mat& m, const Vec& y) {
  assert(y.size() == m.rows);
  Vec x(m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.a.data() + r * m.cols;
    const double yr = y[r];
    for (std::size_t c = 0; c < m.cols; ++c) x[c] += row[c] * yr;
  }
  return x;
}

void add_outer(Mat& g, const Vec& u, const Vec& v, double scale) {
  assert(u.size() == g.rows && v.size() == g.cols);
  for (std::size_t r = 0; r < g.rows; ++r) {
    double* row = g.a.data() + r * g.cols;
    const double ur = scale * u[r];
    for (std::size_t c = 0; c < g.cols; ++c) row[c] += ur * v[c];
  }
}

void axpy(Vec& y, const Vec& x, double a) {
  assert(y.size() == x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Vec mean_of(const std::vector<Vec>& rows) {
  if (rows.empty()) throw ValidationError("mean_of: empty input");
  Vec out(rows.front().size(), 0.0);
  for (const Vec& r : rows) axpy(out, r);
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& v : out) v *= inv;
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double binary_cross_entropy(double p, int y) {
  constexpr double kClip = 1e-12;
  if (p < kClip) p = kClip;
  if (p > 1.0 - kClip) p = 1.0 - kClip;
  return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

Vec LayerNorm::forward(const Vec& x, LayerNormCache* cache) const {
  const std::size_t d = dim();
  if (x.size() != d) throw ValidationError("LayerNorm: dimension mismatch");
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= static_cast<double>(d);
  double var = 0.0;
  for (double v : x) var += (v - mu) * (v - mu);
  var /= static_cast<double>(d);
  const double inv_sigma = 1.0 / std::sqrt(var + kEps);
  Vec y(d, 0.0);
  Vec xhat(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    xhat[i] = (x[i] - mu) * inv_sigma;
    y[i] = gain[i] * xhat[i] + offset[i];
  }
  if (cache != nullptr) {
    cache->xhat = std::move(xhat);
    cache->inv_sigma = inv_sigma;
  }
  return y;
}

Vec LayerNorm::backward(const Vec& dy, const LayerNormCache& cache, Vec* dgain,
                        Vec* doffset) const {
  const std::size_t d = dim();
  if (dy.size() != d || cache.xhat.size() != d) {
    throw ValidationError("LayerNorm backward: dimension mismatch");
  }
  // dxhat_i = dy_i * gain_i
  // dx = inv_sigma * (dxhat - mean(dxhat) - xhat * mean(dxhat .* xhat))
  Vec dxhat(d, 0.0);
  double mean_dxhat = 0.0;
  double mean_dxhat_xhat = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    dxhat[i] = dy[i] * gain[i];
    mean_dxhat += dxhat[i];
    mean_dxhat_xhat += dxhat[i] * cache.xhat[i];
  }
  mean_dxhat /= static_cast<double>(d);
  mean_dxhat_xhat /= static_cast<double>(d);
  Vec dx(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    dx[i] = cache.inv_sigma *
            (dxhat[i] - mean_dxhat - cache.xhat[i] * mean_dxhat_xhat);
  }
  if (dgain != nullptr) {
    if (dgain->size() != d) dgain->assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) (*dgain)[i] += dy[i] * cache.xhat[i];
  }
  if (doffset != nullptr) {
    if (doffset->size() != d) doffset->assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) (*doffset)[i] += dy[i];
  }
  return dx;
}

void adam_step(Vec& param, const Vec& grad, AdamState& state,
               const AdamConfig& cfg, long t) {
  if (state.m.size() != param.size()) {
    state.m.assign(param.size(), 0.0);
    state.v.assign(param.size(), 0.0);
  }
  const double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / b1t;
    const double vhat = state.v[i] / b2t;
    param[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace gamesum::nn
