// src/asr/ctc.cpp

// Copyright 2026 The camo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "camo/asr/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <torch/torch.h>

#include "camo/core/error.hpp"

namespace camo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// Runs alpha (and, when grad != nullptr, beta) over a [T, C] row-major block.
// Returns log P(labels). grad receives d(-log P)/d log_probs for t < T.
double forward_backward(const double* lp, std::int64_t T, std::int64_t C,
                        std::span<const int> labels, int blank, double* grad) {
  const auto L = static_cast<std::int64_t>(labels.size());
  const std::int64_t S = 2 * L + 1;
  auto ext = [&](std::int64_t s) { return (s % 2 == 0) ? blank : labels[(s - 1) / 2]; };
  auto can_skip = [&](std::int64_t s) { return s >= 2 && ext(s) != blank && ext(s) != ext(s - 2); };

  std::vector<double> alpha(static_cast<std::size_t>(T * S), kNegInf);
  auto A = [&](std::int64_t t, std::int64_t s) -> double& { return alpha[t * S + s]; };
  A(0, 0) = lp[blank];
  if (S > 1) A(0, 1) = lp[ext(1)];
  for (std::int64_t t = 1; t < T; ++t) {
    const double* row = lp + t * C;
    for (std::int64_t s = 0; s < S; ++s) {
      double a = A(t - 1, s);
      if (s >= 1) a = log_add(a, A(t - 1, s - 1));
      if (can_skip(s)) a = log_add(a, A(t - 1, s - 2));
      A(t, s) = a == kNegInf ? kNegInf : a + row[ext(s)];
    }
  }
  double log_p = A(T - 1, S - 1);
  if (S > 1) log_p = log_add(log_p, A(T - 1, S - 2));
  if (!grad || log_p == kNegInf) return log_p;

  // beta excludes the emission at t.
  std::vector<double> beta(static_cast<std::size_t>(T * S), kNegInf);
  auto Bt = [&](std::int64_t t, std::int64_t s) -> double& { return beta[t * S + s]; };
  Bt(T - 1, S - 1) = 0.0;
  if (S > 1) Bt(T - 1, S - 2) = 0.0;
  for (std::int64_t t = T - 2; t >= 0; --t) {
    const double* next = lp + (t + 1) * C;
    for (std::int64_t s = 0; s < S; ++s) {
      double b = Bt(t + 1, s) + next[ext(s)];
      if (s + 1 < S) b = log_add(b, Bt(t + 1, s + 1) + next[ext(s + 1)]);
      if (s + 2 < S && can_skip(s + 2)) b = log_add(b, Bt(t + 1, s + 2) + next[ext(s + 2)]);
      Bt(t, s) = b;
    }
  }

  std::vector<double> acc(static_cast<std::size_t>(C));
  for (std::int64_t t = 0; t < T; ++t) {
    std::fill(acc.begin(), acc.end(), kNegInf);
    for (std::int64_t s = 0; s < S; ++s) {
      const int k = ext(s);
      acc[k] = log_add(acc[k], A(t, s) + Bt(t, s));
    }
    double* g = grad + t * C;
    for (std::int64_t k = 0; k < C; ++k)
      g[k] = acc[k] == kNegInf ? 0.0 : -std::exp(acc[k] - log_p);
  }
  return log_p;
}

void check_labels(std::span<const int> labels, std::int64_t C, int blank) {
  for (int l : labels)
    if (l < 0 || l >= C || l == blank) throw DomainError("ctc: target label out of range or blank");
}

class CtcFunction : public torch::autograd::Function<CtcFunction> {
 public:
  static torch::Tensor forward(torch::autograd::AutogradContext* ctx, torch::Tensor log_probs,
                               std::vector<std::int64_t> lengths,
                               std::vector<std::vector<int>> targets, std::int64_t blank,
                               bool zero_infeasible) {
    const auto B = log_probs.size(0);
    const auto T = log_probs.size(1);
    const auto C = log_probs.size(2);
    const bool want_grad = log_probs.requires_grad();
    auto lp = log_probs.detach().to(torch::kCPU, torch::kFloat64).contiguous();
    auto grad = want_grad ? torch::zeros({B, T, C}, torch::kFloat64) : torch::Tensor();
    auto losses = torch::zeros({B}, torch::kFloat64);
    auto loss_acc = losses.accessor<double, 1>();

    for (std::int64_t b = 0; b < B; ++b) {
      const auto Tb = lengths[static_cast<std::size_t>(b)];
      const auto& y = targets[static_cast<std::size_t>(b)];
      if (Tb <= 0 || Tb > T) throw DomainError("ctc: input length out of range");
      check_labels(y, C, static_cast<int>(blank));
      if (Tb < ctc_min_frames(y)) {
        if (zero_infeasible) continue;
        throw AlignmentError("ctc: transcript of " + std::to_string(y.size()) +
                             " labels needs " + std::to_string(ctc_min_frames(y)) +
                             " frames, input has " + std::to_string(Tb));
      }
      const double* base = lp.data_ptr<double>() + b * T * C;
      double* g = want_grad ? grad.data_ptr<double>() + b * T * C : nullptr;
      const double log_p = forward_backward(base, Tb, C, y, static_cast<int>(blank), g);
      if (log_p == -std::numeric_limits<double>::infinity()) {
        if (g) std::fill(g, g + Tb * C, 0.0);
        if (zero_infeasible) continue;
        throw AlignmentError("ctc: zero-probability transcript");
      }
      loss_acc[b] = -log_p;
    }
    if (want_grad) ctx->save_for_backward({grad.to(log_probs.options())});
    return losses.to(log_probs.options());
  }

  static torch::autograd::tensor_list backward(torch::autograd::AutogradContext* ctx,
                                               torch::autograd::tensor_list grad_outputs) {
    auto saved = ctx->get_saved_variables();
    auto g = saved[0] * grad_outputs[0].view({-1, 1, 1});
    return {g, torch::Tensor(), torch::Tensor(), torch::Tensor(), torch::Tensor()};
  }
};

}  // namespace

std::int64_t ctc_min_frames(std::span<const int> labels) {
  std::int64_t n = static_cast<std::int64_t>(labels.size());
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++n;
  return n;
}

double ctc_nll(const at::Tensor& log_probs, std::span<const int> labels, int blank) {
  if (log_probs.dim() != 2) throw DomainError("ctc_nll: expected [T, C] log-probabilities");
  const auto T = log_probs.size(0);
  const auto C = log_probs.size(1);
  check_labels(labels, C, blank);
  if (T < ctc_min_frames(labels))
    throw AlignmentError("ctc: transcript longer than the alignable length");
  auto lp = log_probs.detach().to(torch::kCPU, torch::kFloat64).contiguous();
  return -forward_backward(lp.data_ptr<double>(), T, C, labels, blank, nullptr);
}

at::Tensor ctc_loss(const at::Tensor& log_probs, std::span<const std::int64_t> input_lengths,
                    const std::vector<std::vector<int>>& targets, int blank, bool zero_infeasible) {
  if (log_probs.dim() != 3) throw DomainError("ctc_loss: expected [B, T, C] log-probabilities");
  const auto B = static_cast<std::size_t>(log_probs.size(0));
  if (input_lengths.size() != B || targets.size() != B)
    throw DomainError("ctc_loss: batch size mismatch");
  return CtcFunction::apply(log_probs,
                            std::vector<std::int64_t>(input_lengths.begin(), input_lengths.end()),
                            targets, static_cast<std::int64_t>(blank), zero_infeasible);
}

}  // namespace camo
