// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

// Random instance generators for the path primitives. Each returns a net together with a
// dataset it interpolates exactly (targets are the net's own outputs).

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "connectikit/relu_net.hpp"
#include "connectikit/rng.hpp"
#include "test_support.hpp"

namespace connectikit::testing {

struct Instance {
  TwoLayerNet net;
  Dataset data;
  std::size_t i = 0;
  std::size_t j = 0;
};

inline Dataset self_labelled(const TwoLayerNet& net, Mat x) {
  Vec y = reference_forward(net, x);
  return Dataset{std::move(x), std::move(y)};
}

/// Neuron i is active, slot j is exactly zero.
inline Instance swap_instance(Rng& rng) {
  const std::size_t d = 2 + rng.below(3);
  const std::size_t m = 3 + rng.below(4);
  TwoLayerNet net = random_net(rng, d, m);
  const std::size_t i = rng.below(m);
  std::size_t j = rng.below(m - 1);
  if (j >= i) ++j;
  for (std::size_t r = 0; r < d; ++r) net.w(r, j) = 0.0;
  net.alpha[j] = 0.0;
  Dataset data = self_labelled(net, random_mat(rng, 10, d));
  return {std::move(net), std::move(data), i, j};
}

/// Neurons i and j share a direction (so the same activation pattern) and an output sign.
inline Instance merge_instance(Rng& rng) {
  const std::size_t d = 2 + rng.below(3);
  const std::size_t m = 3 + rng.below(4);
  TwoLayerNet net = random_net(rng, d, m);
  const std::size_t i = rng.below(m);
  std::size_t j = rng.below(m - 1);
  if (j >= i) ++j;
  const double c = 0.2 + 2.0 * rng.uniform();
  for (std::size_t r = 0; r < d; ++r) net.w(r, j) = c * net.w(r, i);
  const double sign = net.alpha[i] >= 0.0 ? 1.0 : -1.0;
  net.alpha[i] = sign * (0.1 + std::abs(net.alpha[i]));
  net.alpha[j] = sign * (0.1 + 2.0 * rng.uniform());
  Dataset data = self_labelled(net, random_mat(rng, 10, d));
  return {std::move(net), std::move(data), i, j};
}

/// Neuron i has exactly one zero half (either its column or its output weight).
inline Instance shrink_instance(Rng& rng) {
  const std::size_t d = 2 + rng.below(3);
  const std::size_t m = 2 + rng.below(4);
  TwoLayerNet net = random_net(rng, d, m);
  const std::size_t i = rng.below(m);
  if (rng.uniform() < 0.5) {
    net.alpha[i] = 0.0;
  } else {
    for (std::size_t r = 0; r < d; ++r) net.w(r, i) = 0.0;
  }
  Dataset data = self_labelled(net, random_mat(rng, 10, d));
  return {std::move(net), std::move(data), i, i};
}

/// Random net with a few near-duplicate neurons (same pattern and output sign), one neuron
/// with a dead output weight, and the max-norm radius set to its own constraint value.
/// `i` holds nothing; the caller reads the radius from max-entry values.
inline Instance equalize_instance(Rng& rng) {
  for (;;) {
    const std::size_t d = 2 + rng.below(2);
    const std::size_t m = 6;
    TwoLayerNet net = random_net(rng, d, m);
    const Mat x = random_mat(rng, 12, d);
    for (std::size_t r = 0; r < d; ++r) {
      net.w(r, 1) = net.w(r, 0) + 0.02 * rng.normal();
      net.w(r, 3) = net.w(r, 2) + 0.02 * rng.normal();
    }
    net.alpha[1] = std::abs(net.alpha[1]) * (net.alpha[0] >= 0.0 ? 1.0 : -1.0);
    net.alpha[3] = std::abs(net.alpha[3]) * (net.alpha[2] >= 0.0 ? 1.0 : -1.0);
    net.alpha[5] = 0.0;
    if (activation_pattern(x, net.neuron(0)) != activation_pattern(x, net.neuron(1))) continue;
    if (activation_pattern(x, net.neuron(2)) != activation_pattern(x, net.neuron(3))) continue;
    Dataset data = self_labelled(net, x);
    return {std::move(net), std::move(data), 0, 0};
  }
}

/// Two interpolators of the same data with disjoint neuron supports: `net` uses the low
/// half of the slots, and the partner (returned via `other`) is a rescaled relabelling
/// into the high half.
struct DisjointInstance {
  TwoLayerNet a;
  TwoLayerNet b;
  Dataset data;
};

inline DisjointInstance disjoint_instance(Rng& rng) {
  const std::size_t d = 2 + rng.below(3);
  const std::size_t k = 2 + rng.below(3);
  const std::size_t m = 2 * k;
  const TwoLayerNet core = random_net(rng, d, k);
  TwoLayerNet a = TwoLayerNet::zeros(d, m);
  TwoLayerNet b = TwoLayerNet::zeros(d, m);
  for (std::size_t n = 0; n < k; ++n) {
    const double c = 0.3 + 2.0 * rng.uniform();
    for (std::size_t r = 0; r < d; ++r) {
      a.w(r, n) = core.w(r, n);
      b.w(r, m - 1 - n) = c * core.w(r, n);
    }
    a.alpha[n] = core.alpha[n];
    b.alpha[m - 1 - n] = core.alpha[n] / c;
  }
  Dataset data = self_labelled(a, random_mat(rng, 10, d));
  return {std::move(a), std::move(b), std::move(data)};
}

/// Interpolator of the d = 1 toy (x = 1 -> 1, x = -1 -> 1) with each active neuron
/// balanced so |W_k| = |alpha_k|; roughly 20% of slots are left empty.
inline TwoLayerNet toy_member(Rng& rng, std::size_t m) {
  for (;;) {
    TwoLayerNet n = TwoLayerNet::zeros(1, m);
    for (std::size_t k = 0; k < m; ++k) {
      if (rng.uniform() < 0.2) continue;
      n.w(0, k) = rng.normal();
      n.alpha[k] = rng.normal();
    }
    double pos = 0.0, neg = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (n.w(0, k) > 0.0) pos += n.w(0, k) * n.alpha[k];
      else neg += -n.w(0, k) * n.alpha[k];
    }
    if (pos <= 0.1 || neg <= 0.1) continue;
    for (std::size_t k = 0; k < m; ++k) n.alpha[k] /= (n.w(0, k) > 0.0 ? pos : neg);
    for (std::size_t k = 0; k < m; ++k) {
      const double aw = std::abs(n.w(0, k));
      const double aa = std::abs(n.alpha[k]);
      if (aw > 0.0 && aa > 0.0) {
        const double c = std::sqrt(aa / aw);
        n.w(0, k) *= c;
        n.alpha[k] /= c;
      }
    }
    return n;
  }
}

/// sum_k W_k W_k^T.
inline Mat gram(const TwoLayerNet& net) {
  const std::size_t d = net.input_dim();
  Mat g(d, d);
  for (std::size_t k = 0; k < net.width(); ++k)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) g(r, c) += net.w(r, k) * net.w(c, k);
  return g;
}

}  // namespace connectikit::testing
