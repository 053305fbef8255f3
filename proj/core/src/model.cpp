/*
 * Copyright 2026 The birdcolor Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "birdcolor/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "birdcolor/error.hpp"
#include "birdcolor/rng.hpp"

namespace birdcolor {
namespace {

struct Tensor3 {
  std::size_t c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor3() = default;
  Tensor3(std::size_t c_, std::size_t h_, std::size_t w_)
      : c(c_), h(h_), w(w_), v(c_ * h_ * w_, 0.0) {}

  double* plane(std::size_t ch) { return v.data() + ch * h * w; }
  const double* plane(std::size_t ch) const { return v.data() + ch * h * w; }
};

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct BlockCache {
  Tensor3 input;
  Tensor3 pre;   // conv output before activation
  Tensor3 post;  // after SiLU
  std::vector<double> sig;  // sigmoid(pre), reused by the backward pass
};

struct InstanceCache {
  std::array<BlockCache, 3> blocks;
  Tensor3 pooled;               // output of the last block
  std::vector<double> feature;  // global average
  std::vector<double> prob;
};

// Planes are processed in a zero-padded layout of width w + 2 so that every
// 3x3 tap becomes one contiguous loop. Output index q = y * (w + 2) + x reads
// padded input q + ky * (w + 2) + kx; columns x >= w are scratch.
std::vector<double> PadPlanes(const Tensor3& t) {
  const std::size_t W = t.w + 2;
  std::vector<double> padded(t.c * (t.h + 2) * W, 0.0);
  for (std::size_t ch = 0; ch < t.c; ++ch) {
    const double* src = t.plane(ch);
    double* dst = padded.data() + ch * (t.h + 2) * W;
    for (std::size_t y = 0; y < t.h; ++y) {
      std::copy(src + y * t.w, src + (y + 1) * t.w, dst + (y + 1) * W + 1);
    }
  }
  return padded;
}

void Conv3x3(const Tensor3& in, const ConvLayer& layer, Tensor3& out) {
  const std::size_t h = in.h, w = in.w, W = w + 2, plane = (h + 2) * W;
  const std::size_t span = (h - 1) * W + w;
  const std::vector<double> padded = PadPlanes(in);
  std::vector<double> acc(span);
  out = Tensor3(layer.out_channels, h, w);
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    std::fill(acc.begin(), acc.end(), layer.bias[o]);
    for (std::size_t i = 0; i < layer.in_channels; ++i) {
      const double* src = padded.data() + i * plane;
      const double* k = layer.weight.data() + (o * layer.in_channels + i) * 9;
      for (std::size_t ky = 0; ky < 3; ++ky) {
        const double* r = src + ky * W;
        const double k0 = k[ky * 3], k1 = k[ky * 3 + 1], k2 = k[ky * 3 + 2];
        for (std::size_t q = 0; q < span; ++q) acc[q] += k0 * r[q] + k1 * r[q + 1] + k2 * r[q + 2];
      }
    }
    double* dst = out.plane(o);
    for (std::size_t y = 0; y < h; ++y) std::copy_n(acc.data() + y * W, w, dst + y * w);
  }
}

// Accumulates kernel/bias gradients and (optionally) the input gradient.
void Conv3x3Backward(const Tensor3& in, const ConvLayer& layer, const Tensor3& dout,
                     ConvLayer& grad, Tensor3* din) {
  const std::size_t h = in.h, w = in.w, W = w + 2, plane = (h + 2) * W;
  const std::size_t span = (h - 1) * W + w;
  const std::vector<double> padded = PadPlanes(in);
  std::vector<double> dpad(din != nullptr ? in.c * plane : 0, 0.0);
  std::vector<double> g(span, 0.0);
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    const double* go = dout.plane(o);
    double bsum = 0.0;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        g[y * W + x] = go[y * w + x];
        bsum += go[y * w + x];
      }
    }
    grad.bias[o] += bsum;
    for (std::size_t i = 0; i < layer.in_channels; ++i) {
      const double* src = padded.data() + i * plane;
      const double* k = layer.weight.data() + (o * layer.in_channels + i) * 9;
      double* gk = grad.weight.data() + (o * layer.in_channels + i) * 9;
      // Nine independent sums in one sweep keep the reduction order fixed
      // while exposing instruction-level parallelism.
      double a[9] = {};
      for (std::size_t q = 0; q < span; ++q) {
        const double gq = g[q];
        const double* r = src + q;
        a[0] += gq * r[0];
        a[1] += gq * r[1];
        a[2] += gq * r[2];
        a[3] += gq * r[W];
        a[4] += gq * r[W + 1];
        a[5] += gq * r[W + 2];
        a[6] += gq * r[2 * W];
        a[7] += gq * r[2 * W + 1];
        a[8] += gq * r[2 * W + 2];
      }
      for (std::size_t t = 0; t < 9; ++t) gk[t] += a[t];
      if (din != nullptr) {
        double* d = dpad.data() + i * plane;
        for (std::size_t t = 0; t < 9; ++t) {
          double* r = d + (t / 3) * W + t % 3;
          const double wv = k[t];
          for (std::size_t q = 0; q < span; ++q) r[q] += wv * g[q];
        }
      }
    }
  }
  if (din != nullptr) {
    *din = Tensor3(in.c, h, w);
    for (std::size_t ch = 0; ch < in.c; ++ch) {
      const double* src = dpad.data() + ch * plane;
      double* dst = din->plane(ch);
      for (std::size_t y = 0; y < h; ++y) std::copy_n(src + (y + 1) * W + 1, w, dst + y * w);
    }
  }
}

// 2x2 average pooling, stride 2; a trailing odd row/column is dropped.
Tensor3 AvgPool2(const Tensor3& in) {
  Tensor3 out(in.c, in.h / 2, in.w / 2);
  for (std::size_t ch = 0; ch < in.c; ++ch) {
    const double* src = in.plane(ch);
    double* dst = out.plane(ch);
    for (std::size_t y = 0; y < out.h; ++y) {
      const double* r0 = src + 2 * y * in.w;
      const double* r1 = r0 + in.w;
      for (std::size_t x = 0; x < out.w; ++x) {
        dst[y * out.w + x] = 0.25 * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]);
      }
    }
  }
  return out;
}

Tensor3 AvgPool2Backward(const Tensor3& dout, std::size_t h, std::size_t w) {
  Tensor3 din(dout.c, h, w);
  for (std::size_t ch = 0; ch < dout.c; ++ch) {
    const double* g = dout.plane(ch);
    double* d = din.plane(ch);
    for (std::size_t y = 0; y < dout.h; ++y) {
      for (std::size_t x = 0; x < dout.w; ++x) {
        const double q = 0.25 * g[y * dout.w + x];
        d[(2 * y) * w + 2 * x] = q;
        d[(2 * y) * w + 2 * x + 1] = q;
        d[(2 * y + 1) * w + 2 * x] = q;
        d[(2 * y + 1) * w + 2 * x + 1] = q;
      }
    }
  }
  return din;
}

Tensor3 FromImage(const Image& img) {
  Tensor3 t(3, img.height, img.width);
  t.v = img.data;
  return t;
}

void Forward(const Image& instance, const ModelParams& params, InstanceCache& cache) {
  const ModelConfig& cfg = params.config;
  Require(instance.height == cfg.height && instance.width == cfg.width &&
              instance.data.size() == 3 * cfg.height * cfg.width,
          ErrorCode::kShapeMismatch,
          "instance is " + std::to_string(instance.height) + "x" +
              std::to_string(instance.width) + ", model expects " +
              std::to_string(cfg.height) + "x" + std::to_string(cfg.width));
  Tensor3 x = FromImage(instance);
  for (std::size_t l = 0; l < 3; ++l) {
    BlockCache& b = cache.blocks[l];
    b.input = std::move(x);
    Conv3x3(b.input, params.conv[l], b.pre);
    b.post = b.pre;
    b.sig.resize(b.pre.v.size());
    for (std::size_t i = 0; i < b.sig.size(); ++i) {
      b.sig[i] = Sigmoid(b.pre.v[i]);
      b.post.v[i] *= b.sig[i];
    }
    x = AvgPool2(b.post);
  }
  cache.pooled = std::move(x);
  const Tensor3& p = cache.pooled;
  const std::size_t area = p.h * p.w;
  cache.feature.assign(p.c, 0.0);
  for (std::size_t ch = 0; ch < p.c; ++ch) {
    const double* src = p.plane(ch);
    double acc = 0.0;
    for (std::size_t i = 0; i < area; ++i) acc += src[i];
    cache.feature[ch] = acc / static_cast<double>(area);
  }
  const std::size_t n_feat = p.c;
  cache.prob.assign(cfg.num_classes, 0.0);
  for (std::size_t c = 0; c < cfg.num_classes; ++c) {
    double z = params.head_bias[c];
    const double* wrow = params.head_weight.data() + c * n_feat;
    for (std::size_t k = 0; k < n_feat; ++k) z += wrow[k] * cache.feature[k];
    cache.prob[c] = Sigmoid(z);
  }
}

// d loss / d prob[c] is given; accumulates parameter gradients.
void Backward(const InstanceCache& cache, const ModelParams& params,
              std::span<const double> dprob, ModelParams& grad, Image* input_grad) {
  const ModelConfig& cfg = params.config;
  const std::size_t n_feat = cache.feature.size();
  std::vector<double> dfeat(n_feat, 0.0);
  for (std::size_t c = 0; c < cfg.num_classes; ++c) {
    const double p = cache.prob[c];
    const double dz = dprob[c] * p * (1.0 - p);
    grad.head_bias[c] += dz;
    double* gw = grad.head_weight.data() + c * n_feat;
    const double* wrow = params.head_weight.data() + c * n_feat;
    for (std::size_t k = 0; k < n_feat; ++k) {
      gw[k] += dz * cache.feature[k];
      dfeat[k] += dz * wrow[k];
    }
  }

  const Tensor3& p = cache.pooled;
  Tensor3 d(p.c, p.h, p.w);
  const double inv_area = 1.0 / static_cast<double>(p.h * p.w);
  for (std::size_t ch = 0; ch < p.c; ++ch) {
    double* dst = d.plane(ch);
    std::fill(dst, dst + p.h * p.w, dfeat[ch] * inv_area);
  }

  for (std::size_t l = 3; l-- > 0;) {
    const BlockCache& b = cache.blocks[l];
    Tensor3 dpost = AvgPool2Backward(d, b.post.h, b.post.w);
    for (std::size_t i = 0; i < dpost.v.size(); ++i) {
      const double z = b.pre.v[i];
      const double s = b.sig[i];
      dpost.v[i] *= s * (1.0 + z * (1.0 - s));
    }
    const bool need_input = l > 0 || input_grad != nullptr;
    Tensor3 din;
    Conv3x3Backward(b.input, params.conv[l], dpost, grad.conv[l], need_input ? &din : nullptr);
    d = std::move(din);
  }
  if (input_grad != nullptr) {
    input_grad->height = cfg.height;
    input_grad->width = cfg.width;
    input_grad->data = std::move(d.v);
  }
}

struct PoolTerms {
  std::vector<double> pooled;
  Matrix weights;  // softmax weights per (instance, class); 0 when masked out
};

PoolTerms AutoPoolWithWeights(const Matrix& probs, std::span<const std::uint8_t> mask,
                              double alpha) {
  Require(mask.size() == probs.rows(), ErrorCode::kShapeMismatch, "mask length mismatch");
  Require(std::any_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }),
          ErrorCode::kInvalidArgument, "autopool needs at least one unmasked instance");
  const std::size_t n = probs.rows();
  const std::size_t classes = probs.cols();
  PoolTerms out{std::vector<double>(classes, 0.0), Matrix(n, classes)};
  for (std::size_t c = 0; c < classes; ++c) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] != 0) peak = std::max(peak, alpha * probs(i, c));
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] == 0) continue;
      const double e = std::exp(alpha * probs(i, c) - peak);
      out.weights(i, c) = e;
      denom += e;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] == 0) continue;
      out.weights(i, c) /= denom;
      acc += out.weights(i, c) * probs(i, c);
    }
    out.pooled[c] = acc;
  }
  return out;
}

void CheckFinite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) Fail(ErrorCode::kNonFinite, std::string("non-finite ") + what);
  }
}

struct BagForward {
  std::vector<InstanceCache> caches;  // one per slot; unused for padded ones
  Matrix probs;
  PoolTerms pool;
};

BagForward RunBag(const RecordingBag& bag, const ModelParams& params) {
  Require(bag.mask.size() == bag.instances.size(), ErrorCode::kShapeMismatch,
          "bag mask and instance counts differ");
  const std::size_t classes = params.config.num_classes;
  BagForward fwd;
  fwd.caches.resize(bag.instances.size());
  fwd.probs = Matrix(bag.instances.size(), classes);
  for (std::size_t i = 0; i < bag.instances.size(); ++i) {
    if (bag.mask[i] == 0) continue;
    Forward(bag.instances[i], params, fwd.caches[i]);
    CheckFinite(fwd.caches[i].prob, "instance probability");
    std::copy(fwd.caches[i].prob.begin(), fwd.caches[i].prob.end(), fwd.probs.row(i).begin());
  }
  fwd.pool = AutoPoolWithWeights(fwd.probs, bag.mask, params.alpha);
  CheckFinite(fwd.pool.pooled, "pooled probability");
  return fwd;
}

void AppendArray(nlohmann::json& obj, const char* key, const std::vector<double>& v) {
  obj[key] = v;
}

}  // namespace

Image ToImage(const ColorizedSpectrogram& spec) {
  Image img(spec.bins(), spec.frames());
  for (std::size_t c = 0; c < 3; ++c) {
    const auto src = spec.channels[c].values();
    std::copy(src.begin(), src.end(), img.data.begin() + static_cast<std::ptrdiff_t>(c * src.size()));
  }
  return img;
}

std::size_t RecordingBag::active() const {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(),
                                                [](std::uint8_t m) { return m != 0; }));
}

RecordingBag MakeBag(std::vector<Image> real_instances, std::vector<double> labels) {
  Require(!real_instances.empty() && real_instances.size() <= kMaxInstances,
          ErrorCode::kInvalidArgument, "a bag holds between 1 and 5 instances");
  RecordingBag bag;
  const std::size_t h = real_instances.front().height;
  const std::size_t w = real_instances.front().width;
  bag.mask.assign(kMaxInstances, 0);
  for (std::size_t i = 0; i < real_instances.size(); ++i) bag.mask[i] = 1;
  bag.instances = std::move(real_instances);
  while (bag.instances.size() < kMaxInstances) bag.instances.emplace_back(h, w);
  bag.labels = std::move(labels);
  return bag;
}

void ModelConfig::Validate() const {
  Require(num_classes >= 1, ErrorCode::kInvalidArgument, "need at least one class");
  Require(height >= 8 && width >= 8, ErrorCode::kInvalidArgument,
          "input must be at least 8x8 to survive three 2x pools");
  Require(widths[0] >= 1 && widths[1] >= 1 && widths[2] >= 1, ErrorCode::kInvalidArgument,
          "conv widths must be positive");
}

std::vector<std::span<double>> ModelParams::Tensors() {
  std::vector<std::span<double>> out;
  for (auto& layer : conv) {
    out.emplace_back(layer.weight);
    out.emplace_back(layer.bias);
  }
  out.emplace_back(head_weight);
  out.emplace_back(head_bias);
  out.emplace_back(&alpha, 1);
  return out;
}

std::vector<std::span<const double>> ModelParams::Tensors() const {
  std::vector<std::span<const double>> out;
  for (const auto& layer : conv) {
    out.emplace_back(layer.weight);
    out.emplace_back(layer.bias);
  }
  out.emplace_back(head_weight);
  out.emplace_back(head_bias);
  out.emplace_back(&alpha, 1);
  return out;
}

std::size_t ModelParams::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& t : Tensors()) n += t.size();
  return n;
}

bool ModelParams::operator==(const ModelParams& other) const {
  if (!(config == other.config)) return false;
  const auto a = Tensors();
  const auto b = other.Tensors();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::equal(a[i].begin(), a[i].end(), b[i].begin(), b[i].end())) return false;
  }
  return true;
}

ModelParams ZeroLike(const ModelParams& params) {
  ModelParams z = params;
  for (auto t : z.Tensors()) std::fill(t.begin(), t.end(), 0.0);
  return z;
}

ModelParams InitParams(const ModelConfig& config, std::uint64_t seed) {
  config.Validate();
  Rng rng(seed);
  ModelParams p;
  p.config = config;
  std::size_t in = 3;
  for (std::size_t l = 0; l < 3; ++l) {
    ConvLayer& layer = p.conv[l];
    layer.in_channels = in;
    layer.out_channels = config.widths[l];
    layer.weight.resize(layer.out_channels * in * 9);
    layer.bias.assign(layer.out_channels, 0.0);
    const double bound = std::sqrt(6.0 / static_cast<double>(in * 9));
    for (double& w : layer.weight) w = rng.Uniform(-bound, bound);
    in = layer.out_channels;
  }
  p.head_weight.resize(config.num_classes * in);
  p.head_bias.assign(config.num_classes, 0.0);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : p.head_weight) w = rng.Uniform(-bound, bound);
  p.alpha = 1.0;
  return p;
}

std::vector<double> backbone_forward(const Image& instance, const ModelParams& params) {
  InstanceCache cache;
  Forward(instance, params, cache);
  return cache.prob;
}

std::vector<double> autopool(const Matrix& probs, std::span<const std::uint8_t> mask,
                             double alpha) {
  return AutoPoolWithWeights(probs, mask, alpha).pooled;
}

double bce_loss(std::span<const double> pred, std::span<const double> target) {
  Require(pred.size() == target.size() && !pred.empty(), ErrorCode::kShapeMismatch,
          "prediction and target lengths differ");
  double acc = 0.0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    const double y = std::clamp(pred[j], kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
    acc += target[j] * std::log(y) + (1.0 - target[j]) * std::log(1.0 - y);
  }
  return -acc / static_cast<double>(pred.size());
}

double bag_loss(const RecordingBag& bag, const ModelParams& params) {
  const BagForward fwd = RunBag(bag, params);
  return bce_loss(fwd.pool.pooled, bag.labels);
}

GradientResult compute_gradients(const RecordingBag& bag, const ModelParams& params,
                                 bool want_input_grad) {
  const std::size_t classes = params.config.num_classes;
  Require(bag.labels.size() == classes, ErrorCode::kShapeMismatch,
          "label vector length differs from class count");
  const BagForward fwd = RunBag(bag, params);

  GradientResult result;
  result.loss = bce_loss(fwd.pool.pooled, bag.labels);
  if (!std::isfinite(result.loss)) Fail(ErrorCode::kNonFinite, "non-finite loss");
  result.grad = ZeroLike(params);

  // d loss / d pooled, zero where the clamp is active.
  std::vector<double> dpooled(classes, 0.0);
  const double inv_c = 1.0 / static_cast<double>(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    const double y = bag.labels[c];
    const double p = fwd.pool.pooled[c];
    if (p <= kProbabilityEpsilon || p >= 1.0 - kProbabilityEpsilon) continue;
    dpooled[c] = inv_c * (-y / p + (1.0 - y) / (1.0 - p));
  }

  // Pooled P = sum_i w_i p_i with w = softmax(alpha p):
  //   dP/dp_i = w_i (1 + alpha (p_i - P)),  dP/dalpha = sum_i w_i p_i (p_i - P).
  const std::size_t n = bag.instances.size();
  Matrix dprobs(n, classes);
  double dalpha = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double big_p = fwd.pool.pooled[c];
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (bag.mask[i] == 0) continue;
      const double w = fwd.pool.weights(i, c);
      const double p = fwd.probs(i, c);
      dprobs(i, c) = dpooled[c] * w * (1.0 + params.alpha * (p - big_p));
      var += w * p * (p - big_p);
    }
    dalpha += dpooled[c] * var;
  }
  result.grad.alpha = dalpha;

  if (want_input_grad) result.input_grad.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Image* ig = want_input_grad ? &result.input_grad[i] : nullptr;
    if (bag.mask[i] == 0) {
      if (ig != nullptr) *ig = Image(bag.instances[i].height, bag.instances[i].width);
      continue;
    }
    Backward(fwd.caches[i], params, dprobs.row(i), result.grad, ig);
  }
  for (const auto& t : std::as_const(result.grad).Tensors()) CheckFinite(t, "gradient");
  return result;
}

std::vector<double> predict_bag(const RecordingBag& bag, const ModelParams& params) {
  return RunBag(bag, params).pool.pooled;
}

Matrix predict(std::span<const RecordingBag> bags, const ModelParams& params) {
  Matrix out(bags.size(), params.config.num_classes);
  for (std::size_t r = 0; r < bags.size(); ++r) {
    const auto p = predict_bag(bags[r], params);
    std::copy(p.begin(), p.end(), out.row(r).begin());
  }
  return out;
}

nlohmann::json params_to_json(const ModelParams& params) {
  nlohmann::json doc;
  const ModelConfig& c = params.config;
  doc["config"] = {{"num_classes", c.num_classes},
                   {"height", c.height},
                   {"width", c.width},
                   {"widths", c.widths}};
  doc["alpha"] = params.alpha;
  auto layers = nlohmann::json::array();
  for (const auto& layer : params.conv) {
    nlohmann::json l;
    l["in_channels"] = layer.in_channels;
    l["out_channels"] = layer.out_channels;
    AppendArray(l, "weight", layer.weight);
    AppendArray(l, "bias", layer.bias);
    layers.push_back(std::move(l));
  }
  doc["conv"] = std::move(layers);
  AppendArray(doc, "head_weight", params.head_weight);
  AppendArray(doc, "head_bias", params.head_bias);
  return doc;
}

ModelParams params_from_json(const nlohmann::json& doc) {
  try {
    ModelParams p;
    const auto& c = doc.at("config");
    p.config.num_classes = c.at("num_classes").get<std::size_t>();
    p.config.height = c.at("height").get<std::size_t>();
    p.config.width = c.at("width").get<std::size_t>();
    p.config.widths = c.at("widths").get<std::array<std::size_t, 3>>();
    p.config.Validate();
    p.alpha = doc.at("alpha").get<double>();
    const auto& layers = doc.at("conv");
    Require(layers.size() == 3, ErrorCode::kParseError, "checkpoint must hold 3 conv layers");
    std::size_t in = 3;
    for (std::size_t l = 0; l < 3; ++l) {
      ConvLayer& layer = p.conv[l];
      layer.in_channels = layers[l].at("in_channels").get<std::size_t>();
      layer.out_channels = layers[l].at("out_channels").get<std::size_t>();
      layer.weight = layers[l].at("weight").get<std::vector<double>>();
      layer.bias = layers[l].at("bias").get<std::vector<double>>();
      Require(layer.in_channels == in && layer.out_channels == p.config.widths[l] &&
                  layer.weight.size() == layer.in_channels * layer.out_channels * 9 &&
                  layer.bias.size() == layer.out_channels,
              ErrorCode::kShapeMismatch, "conv layer shape mismatch in checkpoint");
      in = layer.out_channels;
    }
    p.head_weight = doc.at("head_weight").get<std::vector<double>>();
    p.head_bias = doc.at("head_bias").get<std::vector<double>>();
    Require(p.head_weight.size() == p.config.num_classes * in &&
                p.head_bias.size() == p.config.num_classes,
            ErrorCode::kShapeMismatch, "head shape mismatch in checkpoint");
    return p;
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorCode::kParseError, std::string("malformed model parameters: ") + ex.what());
  }
}

}  // namespace birdcolor
