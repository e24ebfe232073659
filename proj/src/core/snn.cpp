// Copyright 2026 The SRKD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "srkd/snn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "srkd/error.hpp"
#include "srkd/ops.hpp"

namespace srkd {

IFStepResult if_step(const Tensor& v_prev, const Tensor& x, const IFConfig& cfg) {
  require_same_shape(v_prev, x, "if_step");
  IFStepResult r{Tensor(v_prev.shape()), Tensor(v_prev.shape())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double vc = v_prev[i] + x[i];
    const bool fire = vc >= cfg.v_threshold;
    r.spikes[i] = fire ? 1.0 : 0.0;
    r.v_new[i] = fire ? cfg.v_reset : vc;
  }
  return r;
}

double surrogate_derivative(double u, const IFConfig& cfg) {
  if (cfg.surrogate == SurrogateKind::kRectangular) {
    const double w = cfg.surrogate_width;
    return std::abs(u) < 0.5 * w ? 1.0 / w : 0.0;
  }
  const double a = cfg.surrogate_slope;
  const double z = std::numbers::pi * a * u / 2.0;
  return (a / 2.0) / (1.0 + z * z);
}

Tensor surrogate_derivative(const Tensor& u, const IFConfig& cfg) {
  Tensor out(u.shape());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = surrogate_derivative(u[i], cfg);
  return out;
}

double surrogate_primitive(double u, const IFConfig& cfg) {
  if (cfg.surrogate == SurrogateKind::kRectangular) {
    return std::clamp(u / cfg.surrogate_width + 0.5, 0.0, 1.0);
  }
  return 0.5 + std::atan(std::numbers::pi * cfg.surrogate_slope * u / 2.0) / std::numbers::pi;
}

namespace {

// Weight with its attached mask folded in, or the raw weight when unmasked.
const Tensor& effective_weight(const NetworkState& state, std::size_t index, Tensor& scratch) {
  if (index < state.masks.size() && state.masks[index]) {
    scratch = hadamard(state.params[index], *state.masks[index]);
    return scratch;
  }
  return state.params[index];
}

Tensor linear_forward(const Tensor& w, const Tensor& b, const Tensor& x) {
  const std::size_t out = w.dim(0), in = w.dim(1);
  Tensor y({out});
  for (std::size_t o = 0; o < out; ++o) {
    double acc = b[o];
    const double* row = w.data().data() + o * in;
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
  return y;
}

Tensor avgpool_forward(const Tensor& x, std::size_t k, const Shape& out_shape) {
  const std::size_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t oh = out_shape[1], ow = out_shape[2];
  const double inv = 1.0 / static_cast<double>(k * k);
  Tensor y(out_shape);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        double acc = 0.0;
        for (std::size_t dy = 0; dy < k; ++dy) {
          for (std::size_t dx = 0; dx < k; ++dx) acc += x[(ch * h + oy * k + dy) * w + ox * k + dx];
        }
        y[(ch * oh + oy) * ow + ox] = acc * inv;
      }
    }
  }
  return y;
}

Tensor avgpool_backward(const Tensor& g, std::size_t k, const Shape& in_shape) {
  const std::size_t c = in_shape[0], h = in_shape[1], w = in_shape[2];
  const std::size_t oh = g.dim(1), ow = g.dim(2);
  const double inv = 1.0 / static_cast<double>(k * k);
  Tensor gi(in_shape);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const double v = g[(ch * oh + oy) * ow + ox] * inv;
        for (std::size_t dy = 0; dy < k; ++dy) {
          for (std::size_t dx = 0; dx < k; ++dx) gi[(ch * h + oy * k + dy) * w + ox * k + dx] += v;
        }
      }
    }
  }
  return gi;
}

}  // namespace

Tensor forward_temporal(const NetworkState& state, const NetworkSpec& spec, const Tensor& input_seq,
                        ForwardTrace* trace, SpikeMode mode) {
  const std::vector<Shape> shapes = spec.validate();
  Shape expected{spec.timesteps};
  expected.insert(expected.end(), spec.input_shape.begin(), spec.input_shape.end());
  if (input_seq.shape() != expected) {
    fail(ErrorKind::kDimension, "input sequence shape " + shape_to_string(input_seq.shape()) +
                                    " does not match " + shape_to_string(expected));
  }
  require_finite(input_seq, "network input");

  const std::size_t L = spec.layers.size();
  std::vector<Tensor> membranes(L);
  std::vector<Tensor> weights(L);
  for (std::size_t i = 0; i < L; ++i) {
    const LayerSpec& l = spec.layers[i];
    if (l.kind == LayerKind::kIFNeuron) membranes[i] = Tensor(shapes[i], l.neuron.v_reset);
    if (l.has_parameters()) {
      const auto idx = state.layout_index(i);
      if (!idx) fail(ErrorKind::kState, "no parameters for layer " + std::to_string(i));
      Tensor scratch;
      weights[i] = effective_weight(state, state.layout[*idx].weight, scratch);
    }
  }

  if (trace) {
    trace->mode = mode;
    trace->shapes = shapes;
    trace->steps.assign(spec.timesteps, {});
    trace->recorded = false;
  }

  const std::size_t classes = spec.num_classes();
  Tensor logits({classes});
  const std::size_t step_size = shape_numel(spec.input_shape);
  for (std::size_t t = 0; t < spec.timesteps; ++t) {
    auto first = input_seq.values().begin() + static_cast<std::ptrdiff_t>(t * step_size);
    Tensor x(spec.input_shape,
             std::vector<double>(first, first + static_cast<std::ptrdiff_t>(step_size)));
    ForwardTrace::Step* rec = nullptr;
    if (trace) {
      rec = &trace->steps[t];
      rec->layer_inputs.resize(L);
      rec->v_candidate.resize(L);
      rec->spikes.resize(L);
    }
    for (std::size_t i = 0; i < L; ++i) {
      const LayerSpec& l = spec.layers[i];
      switch (l.kind) {
        case LayerKind::kLinear:
        case LayerKind::kReadout: {
          const Tensor& b = state.params[state.layout[*state.layout_index(i)].bias];
          Tensor y = linear_forward(weights[i], b, x);
          if (rec) rec->layer_inputs[i] = std::move(x);
          x = std::move(y);
          break;
        }
        case LayerKind::kConv2d: {
          const Tensor& b = state.params[state.layout[*state.layout_index(i)].bias];
          Tensor y = conv2d(x, weights[i], {l.stride, l.padding});
          const std::size_t plane = y.dim(1) * y.dim(2);
          for (std::size_t c = 0; c < y.dim(0); ++c) {
            for (std::size_t p = 0; p < plane; ++p) y[c * plane + p] += b[c];
          }
          if (rec) rec->layer_inputs[i] = std::move(x);
          x = std::move(y);
          break;
        }
        case LayerKind::kAvgPool: {
          Tensor y = avgpool_forward(x, l.pool, shapes[i]);
          x = std::move(y);
          break;
        }
        case LayerKind::kFlatten:
          x = x.reshaped(shapes[i]);
          break;
        case LayerKind::kIFNeuron: {
          Tensor& v = membranes[i];
          Tensor vc(v.shape());
          Tensor s(v.shape());
          const IFConfig& cfg = l.neuron;
          for (std::size_t k = 0; k < v.size(); ++k) {
            vc[k] = v[k] + x[k];
            if (mode == SpikeMode::kHard) {
              const bool fire = vc[k] >= cfg.v_threshold;
              s[k] = fire ? 1.0 : 0.0;
              v[k] = fire ? cfg.v_reset : vc[k];
            } else {
              s[k] = surrogate_primitive(vc[k] - cfg.v_threshold, cfg);
              v[k] = vc[k] * (1.0 - s[k]) + cfg.v_reset * s[k];
            }
          }
          if (rec) {
            rec->v_candidate[i] = std::move(vc);
            rec->spikes[i] = s;
          }
          x = std::move(s);
          break;
        }
      }
    }
    add_inplace(logits, x);
  }
  scale_inplace(logits, 1.0 / static_cast<double>(spec.timesteps));
  require_finite(logits, "network logits");
  if (trace) {
    trace->membranes = std::move(membranes);
    trace->recorded = true;
  }
  return logits;
}

std::vector<Tensor> backward_temporal(const NetworkState& state, const NetworkSpec& spec,
                                      const ForwardTrace& trace, const Tensor& logits_grad) {
  if (!trace.recorded || trace.steps.size() != spec.timesteps) {
    fail(ErrorKind::kState, "backward_temporal needs a recorded forward pass");
  }
  const std::size_t L = spec.layers.size();
  if (logits_grad.shape() != Shape{spec.num_classes()}) {
    fail(ErrorKind::kDimension, "logit gradient shape " + shape_to_string(logits_grad.shape()));
  }
  require_finite(logits_grad, "logit gradient");

  std::vector<Tensor> grads = zeros_like(state.params);
  std::vector<Tensor> weights(L);
  for (std::size_t i = 0; i < L; ++i) {
    if (!spec.layers[i].has_parameters()) continue;
    Tensor scratch;
    weights[i] = effective_weight(state, state.layout[*state.layout_index(i)].weight, scratch);
  }
  // dL/dv_new carried backwards in time, per IF layer.
  std::vector<Tensor> carry(L);
  for (std::size_t i = 0; i < L; ++i) {
    if (spec.layers[i].kind == LayerKind::kIFNeuron) carry[i] = Tensor(trace.shapes[i], 0.0);
  }

  Tensor readout_grad = logits_grad;
  scale_inplace(readout_grad, 1.0 / static_cast<double>(spec.timesteps));

  for (std::size_t tt = spec.timesteps; tt-- > 0;) {
    const ForwardTrace::Step& rec = trace.steps[tt];
    Tensor g = readout_grad;
    for (std::size_t i = L; i-- > 0;) {
      const LayerSpec& l = spec.layers[i];
      const Shape& in_shape = i == 0 ? spec.input_shape : trace.shapes[i - 1];
      const bool need_input_grad = i > 0;
      switch (l.kind) {
        case LayerKind::kLinear:
        case LayerKind::kReadout: {
          const ParamRef& ref = state.layout[*state.layout_index(i)];
          const Tensor& x = rec.layer_inputs[i];
          const Tensor& w = weights[i];
          const std::size_t out = w.dim(0), in = w.dim(1);
          Tensor& gw = grads[ref.weight];
          Tensor& gb = grads[ref.bias];
          Tensor gi(in_shape);
          for (std::size_t o = 0; o < out; ++o) {
            const double go = g[o];
            gb[o] += go;
            if (go == 0.0) continue;
            double* gw_row = gw.data().data() + o * in;
            const double* w_row = w.data().data() + o * in;
            for (std::size_t k = 0; k < in; ++k) {
              gw_row[k] += go * x[k];
              gi[k] += w_row[k] * go;
            }
          }
          g = std::move(gi);
          break;
        }
        case LayerKind::kConv2d: {
          const ParamRef& ref = state.layout[*state.layout_index(i)];
          const Tensor& x = rec.layer_inputs[i];
          add_inplace(grads[ref.weight], conv2d_grad_kernels(g, x, weights[i].shape(), {l.stride, l.padding}));
          const std::size_t plane = g.dim(1) * g.dim(2);
          for (std::size_t c = 0; c < g.dim(0); ++c) {
            double acc = 0.0;
            for (std::size_t p = 0; p < plane; ++p) acc += g[c * plane + p];
            grads[ref.bias][c] += acc;
          }
          g = need_input_grad ? conv2d_grad_input(g, weights[i], in_shape, {l.stride, l.padding})
                              : Tensor(in_shape);
          break;
        }
        case LayerKind::kAvgPool:
          g = avgpool_backward(g, l.pool, in_shape);
          break;
        case LayerKind::kFlatten:
          g = g.reshaped(in_shape);
          break;
        case LayerKind::kIFNeuron: {
          const IFConfig& cfg = l.neuron;
          const Tensor& vc = rec.v_candidate[i];
          const Tensor& s = rec.spikes[i];
          Tensor& gv = carry[i];
          for (std::size_t k = 0; k < vc.size(); ++k) {
            const double sd = surrogate_derivative(vc[k] - cfg.v_threshold, cfg);
            double d = g[k] * sd + gv[k] * (1.0 - s[k]);
            if (trace.mode == SpikeMode::kRelaxed) d += gv[k] * (cfg.v_reset - vc[k]) * sd;
            gv[k] = d;
          }
          g = gv;
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < grads.size(); ++i) require_finite(grads[i], "gradient " + state.param_names[i]);
  return grads;
}

SgdOptimizer::SgdOptimizer(double lr, double momentum) : lr_(lr), momentum_(momentum) {
  if (!(lr > 0.0) || !std::isfinite(lr)) fail(ErrorKind::kParameter, "learning rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail(ErrorKind::kParameter, "momentum must be in [0, 1)");
}

void SgdOptimizer::step(NetworkState& state, const std::vector<Tensor>& grads) {
  if (grads.size() != state.params.size()) fail(ErrorKind::kDimension, "gradient count mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    require_same_shape(grads[i], state.params[i], "sgd gradient " + state.param_names[i]);
    require_finite(grads[i], "sgd gradient " + state.param_names[i]);
  }
  if (velocity_.empty()) velocity_ = zeros_like(state.params);
  for (std::size_t i = 0; i < grads.size(); ++i) {
    Tensor& v = velocity_[i];
    Tensor& p = state.params[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      v[k] = momentum_ * v[k] + grads[i][k];
      p[k] -= lr_ * v[k];
    }
  }
  state.apply_masks();
}

}  // namespace srkd
