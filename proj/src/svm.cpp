/*
 * Copyright 2026 The AIDS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "aids/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "aids/errors.hpp"
#include "aids/rng.hpp"

namespace aids {

namespace {

constexpr double kStepEpsilon = 1e-12;
constexpr std::size_t kRowCacheBytes = std::size_t{256} << 20;

// Kernel rows over the training set, computed on demand and kept in an LRU
// cache. Small problems get every row precomputed.
class KernelRows {
 public:
  KernelRows(std::span<const LabeledVector> data, const Kernel& kernel, std::size_t full_limit)
      : data_(data), kernel_(kernel), diag_(data.size()) {
    const std::size_t n = data.size();
    for (std::size_t i = 0; i < n; ++i) diag_[i] = kernel_eval(kernel_, data[i].x, data[i].x);
    if (n <= full_limit) {
      capacity_ = n;
      for (std::size_t i = 0; i < n; ++i) row(i);
    } else {
      capacity_ = std::max<std::size_t>(2, kRowCacheBytes / (sizeof(double) * n));
    }
  }

  double diag(std::size_t i) const { return diag_[i]; }

  double at(std::size_t i, std::size_t j) {
    if (auto it = rows_.find(i); it != rows_.end()) return it->second.values[j];
    if (auto it = rows_.find(j); it != rows_.end()) return it->second.values[i];
    return kernel_eval(kernel_, data_[i].x, data_[j].x);
  }

  const std::vector<double>& row(std::size_t i) {
    if (auto it = rows_.find(i); it != rows_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.pos);
      return it->second.values;
    }
    if (rows_.size() >= capacity_) {
      rows_.erase(lru_.back());
      lru_.pop_back();
    }
    std::vector<double> values(data_.size());
    for (std::size_t j = 0; j < data_.size(); ++j) {
      values[j] = j == i ? diag_[i] : kernel_eval(kernel_, data_[i].x, data_[j].x);
    }
    lru_.push_front(i);
    auto& entry = rows_[i];
    entry.values = std::move(values);
    entry.pos = lru_.begin();
    return entry.values;
  }

 private:
  struct Entry {
    std::vector<double> values;
    std::list<std::size_t>::iterator pos;
  };
  std::span<const LabeledVector> data_;
  Kernel kernel_;
  std::vector<double> diag_;
  std::size_t capacity_ = 0;
  std::unordered_map<std::size_t, Entry> rows_;
  std::list<std::size_t> lru_;
};

class SmoSolver {
 public:
  SmoSolver(std::span<const LabeledVector> data, const SmoConfig& config)
      : data_(data),
        cfg_(config),
        n_(data.size()),
        rows_(data, config.kernel, config.full_gram_limit),
        alpha_(n_, 0.0),
        error_(n_),
        rng_(config.seed) {
    // f = 0 initially, so E_k = -y_k.
    for (std::size_t k = 0; k < n_; ++k) error_[k] = -data_[k].y;
    max_iterations_ = cfg_.max_iterations != 0
                          ? cfg_.max_iterations
                          : std::max<std::size_t>(100000, 200 * n_);
  }

  SmoSolution run() {
    std::size_t passes = 0;
    std::size_t total_passes = 0;
    while (passes < cfg_.max_passes && iterations_ < max_iterations_) {
      std::size_t changed = 0;
      for (std::size_t i = 0; i < n_ && iterations_ < max_iterations_; ++i) {
        if (violates_kkt(i) && examine(i)) ++changed;
      }
      if (changed == 0) refine_bias();
      passes = changed == 0 ? passes + 1 : 0;
      ++total_passes;
    }
    return {alpha_, bias_, iterations_, total_passes};
  }

 private:
  bool violates_kkt(std::size_t i) const {
    const double r = data_[i].y * error_[i];
    return (r < -cfg_.tolerance && alpha_[i] < cfg_.C) || (r > cfg_.tolerance && alpha_[i] > 0.0);
  }

  // Re-derives b from the KKT conditions: the mean over free multipliers,
  // else the midpoint of the interval the bounded ones allow.
  void refine_bias() {
    double sum = 0.0, lower = -std::numeric_limits<double>::infinity(),
           upper = std::numeric_limits<double>::infinity();
    std::size_t free = 0;
    for (std::size_t k = 0; k < n_; ++k) {
      const double y = data_[k].y;
      const double g = y - (error_[k] + y - bias_);  // y_k - f_k without b
      if (alpha_[k] > 0.0 && alpha_[k] < cfg_.C) {
        sum += g;
        ++free;
      } else if ((alpha_[k] <= 0.0) == (y > 0.0)) {
        lower = std::max(lower, g);
      } else {
        upper = std::min(upper, g);
      }
    }
    double b;
    if (free > 0) {
      b = sum / static_cast<double>(free);
    } else if (std::isfinite(lower) && std::isfinite(upper)) {
      b = 0.5 * (lower + upper);
    } else {
      b = std::isfinite(lower) ? lower : upper;
    }
    const double db = b - bias_;
    for (auto& e : error_) e += db;
    bias_ = b;
  }

  // Second-choice heuristic: largest |E_i - E_j|, then free multipliers
  // from a random start, then everything from a random start.
  bool examine(std::size_t i) {
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i) continue;
      const double gap = std::abs(error_[i] - error_[j]);
      if (gap > best_gap) {
        best_gap = gap;
        best = j;
      }
    }
    if (best < n_ && take_step(i, best)) return true;

    const std::size_t start = rng_.index(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t j = (start + k) % n_;
      if (j != best && alpha_[j] > 0.0 && alpha_[j] < cfg_.C && take_step(i, j)) return true;
    }
    const std::size_t start2 = rng_.index(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t j = (start2 + k) % n_;
      if (j != best && take_step(i, j)) return true;
    }
    return false;
  }

  bool take_step(std::size_t i, std::size_t j) {
    if (i == j) return false;
    const double yi = data_[i].y, yj = data_[j].y;
    const double ai = alpha_[i], aj = alpha_[j];
    const double ei = error_[i], ej = error_[j];
    const double C = cfg_.C;

    double lo, hi;
    if (yi != yj) {
      lo = std::max(0.0, aj - ai);
      hi = std::min(C, C + aj - ai);
    } else {
      lo = std::max(0.0, ai + aj - C);
      hi = std::min(C, ai + aj);
    }
    if (hi - lo <= kStepEpsilon) return false;

    const double kii = rows_.diag(i), kjj = rows_.diag(j), kij = rows_.at(i, j);
    const double eta = kii + kjj - 2.0 * kij;

    double aj_new;
    if (eta > kStepEpsilon) {
      aj_new = std::clamp(aj + yj * (ei - ej) / eta, lo, hi);
    } else {
      // Objective is linear along the constraint line; take the better end.
      const double s = yi * yj;
      const double fi = yi * (ei - bias_) - ai * kii - s * aj * kij;
      const double fj = yj * (ej - bias_) - s * ai * kij - aj * kjj;
      const double li = ai + s * (aj - lo), hi_i = ai + s * (aj - hi);
      const double obj_lo = li * fi + lo * fj + 0.5 * li * li * kii + 0.5 * lo * lo * kjj +
                            s * lo * li * kij;
      const double obj_hi = hi_i * fi + hi * fj + 0.5 * hi_i * hi_i * kii +
                            0.5 * hi * hi * kjj + s * hi * hi_i * kij;
      if (obj_lo < obj_hi - kStepEpsilon) {
        aj_new = lo;
      } else if (obj_lo > obj_hi + kStepEpsilon) {
        aj_new = hi;
      } else {
        return false;
      }
    }
    if (std::abs(aj_new - aj) < kStepEpsilon * (aj_new + aj + kStepEpsilon)) return false;

    double ai_new = std::clamp(ai + yi * yj * (aj - aj_new), 0.0, C);
    const auto snap = [C](double a) {
      return a < kStepEpsilon * C ? 0.0 : (a > C * (1.0 - kStepEpsilon) ? C : a);
    };
    ai_new = snap(ai_new);
    aj_new = snap(aj_new);
    const double dai = ai_new - ai, daj = aj_new - aj;

    const double b1 = bias_ - ei - yi * dai * kii - yj * daj * kij;
    const double b2 = bias_ - ej - yi * dai * kij - yj * daj * kjj;
    double b_new;
    if (ai_new > 0.0 && ai_new < C) {
      b_new = b1;
    } else if (aj_new > 0.0 && aj_new < C) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }
    const double db = b_new - bias_;

    const auto& ri = rows_.row(i);
    const auto& rj = rows_.row(j);
    for (std::size_t k = 0; k < n_; ++k) {
      error_[k] += yi * dai * ri[k] + yj * daj * rj[k] + db;
    }
    alpha_[i] = ai_new;
    alpha_[j] = aj_new;
    bias_ = b_new;
    ++iterations_;
    return true;
  }

  std::span<const LabeledVector> data_;
  SmoConfig cfg_;
  std::size_t n_;
  KernelRows rows_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  double bias_ = 0.0;
  Rng rng_;
  std::size_t iterations_ = 0;
  std::size_t max_iterations_ = 0;
};

}  // namespace

double kernel_eval(const Kernel& kernel, std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size()) {
    throw DimensionError("kernel inputs differ in width: " + std::to_string(x.size()) + " vs " +
                         std::to_string(z.size()));
  }
  double acc = 0.0;
  if (kernel.type == KernelType::Linear) {
    for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * z[k];
    return acc;
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - z[k];
    acc += d * d;
  }
  return std::exp(-kernel.gamma * acc);
}

void SmoConfig::validate() const {
  if (!(C > 0.0)) throw InvalidConfig("SVM C must be > 0");
  if (!(tolerance > 0.0)) throw InvalidConfig("SMO tolerance must be > 0");
  if (kernel.type == KernelType::Rbf && !(kernel.gamma > 0.0)) {
    throw InvalidConfig("RBF gamma must be > 0");
  }
}

SmoSolution smo_solve(std::span<const LabeledVector> data, const SmoConfig& config) {
  config.validate();
  if (data.empty()) throw EmptyDataset("SMO needs at least one example");
  bool has_pos = false, has_neg = false;
  const std::size_t width = data.front().x.size();
  for (const auto& ex : data) {
    if (ex.x.size() != width) throw DimensionError("training vectors differ in width");
    if (ex.y == 1.0) {
      has_pos = true;
    } else if (ex.y == -1.0) {
      has_neg = true;
    } else {
      throw InvalidConfig("SVM targets must be -1 or +1");
    }
  }
  if (!has_pos || !has_neg) throw DegenerateLabels("SVM training needs both classes");
  return SmoSolver(data, config).run();
}

SvmModel smo_train(std::span<const LabeledVector> data, const SmoConfig& config) {
  const SmoSolution sol = smo_solve(data, config);
  SvmModel model;
  model.kernel = config.kernel;
  model.C = config.C;
  model.bias = sol.bias;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (sol.alphas[i] > 0.0) {
      model.support_vectors.push_back(data[i].x);
      model.coefficients.push_back(sol.alphas[i] * data[i].y);
    }
  }
  return model;
}

double decision_value(const SvmModel& model, std::span<const double> x) {
  double f = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    f += model.coefficients[i] * kernel_eval(model.kernel, model.support_vectors[i], x);
  }
  return f;
}

int predict_sign(const SvmModel& model, std::span<const double> x) {
  return decision_value(model, x) >= 0.0 ? 1 : -1;
}

}  // namespace aids
