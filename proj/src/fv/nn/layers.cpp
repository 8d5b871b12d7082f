#include "fv/nn/layers.hpp"

#include <algorithm>
#include <cmath>

namespace fv::nn {

FeatShape infer_shape(const LayerSpec& spec, const FeatShape& in, int layer_index) {
  auto fail = [&](const std::string& why) {
    throw DimensionError("layer " + std::to_string(layer_index) + ": " + why);
  };
  FeatShape out = in;
  switch (spec.kind) {
    case LayerKind::Conv2D: {
      if (in.flat) fail("Conv2D needs an image input");
      if (in.channels != spec.in_channels) {
        fail("expected " + std::to_string(spec.in_channels) + " input channels, got " +
             std::to_string(in.channels));
      }
      out.channels = spec.out_channels;
      if (spec.padding == Padding::Same) {
        out.h = in.h;
        out.w = in.w;
      } else {
        out.h = in.h - spec.kernel_h + 1;
        out.w = in.w - spec.kernel_w + 1;
        if (out.h <= 0 || out.w <= 0) fail("kernel larger than input");
      }
      return out;
    }
    case LayerKind::Dense: {
      if (!in.flat) fail("Dense needs a flattened input");
      if (in.features != spec.in_features) {
        fail("expected " + std::to_string(spec.in_features) + " input features, got " +
             std::to_string(in.features));
      }
      out.features = spec.out_features;
      return out;
    }
    case LayerKind::Flatten: {
      if (in.flat) return out;
      out.flat = true;
      out.features = static_cast<int>(in.count());
      out.channels = out.h = out.w = 0;
      return out;
    }
    case LayerKind::ReLU:
    case LayerKind::Dropout:
      return out;
    case LayerKind::Softmax: {
      if (!in.flat) fail("Softmax needs a flattened input");
      return out;
    }
  }
  fail("unknown layer kind");
  return out;
}

ConvDims conv_dims(const LayerSpec& spec, const FeatShape& in, int batch) {
  ConvDims d{};
  d.n = batch;
  d.in_ch = in.channels;
  d.in_h = in.h;
  d.in_w = in.w;
  d.out_ch = spec.out_channels;
  d.kh = spec.kernel_h;
  d.kw = spec.kernel_w;
  if (spec.padding == Padding::Same) {
    d.out_h = in.h;
    d.out_w = in.w;
    d.pad_h = (spec.kernel_h - 1) / 2;
    d.pad_w = (spec.kernel_w - 1) / 2;
  } else {
    d.out_h = in.h - spec.kernel_h + 1;
    d.out_w = in.w - spec.kernel_w + 1;
    d.pad_h = 0;
    d.pad_w = 0;
  }
  return d;
}

void conv2d_forward(const ConvDims& d, const double* x, const double* w, const double* b,
                    double* y) {
  const size_t x_img = static_cast<size_t>(d.in_ch) * d.in_h * d.in_w;
  const size_t y_img = static_cast<size_t>(d.out_ch) * d.out_h * d.out_w;
  for (int n = 0; n < d.n; ++n) {
    const double* xn = x + static_cast<size_t>(n) * x_img;
    double* yn = y + static_cast<size_t>(n) * y_img;
    for (int oc = 0; oc < d.out_ch; ++oc) {
      double* yc = yn + static_cast<size_t>(oc) * d.out_h * d.out_w;
      const double bias = b[oc];
      for (int i = 0; i < d.out_h * d.out_w; ++i) yc[i] = bias;
      for (int ic = 0; ic < d.in_ch; ++ic) {
        const double* xc = xn + static_cast<size_t>(ic) * d.in_h * d.in_w;
        const double* wc =
            w + ((static_cast<size_t>(oc) * d.in_ch + ic) * d.kh) * d.kw;
        for (int ki = 0; ki < d.kh; ++ki) {
          for (int kj = 0; kj < d.kw; ++kj) {
            const double wv = wc[ki * d.kw + kj];
            const int dj = kj - d.pad_w;
            const int ow_lo = std::max(0, -dj);
            const int ow_hi = std::min(d.out_w, d.in_w - dj);
            for (int oh = 0; oh < d.out_h; ++oh) {
              const int ih = oh + ki - d.pad_h;
              if (ih < 0 || ih >= d.in_h) continue;
              const double* xrow = xc + static_cast<size_t>(ih) * d.in_w + dj;
              double* yrow = yc + static_cast<size_t>(oh) * d.out_w;
              for (int ow = ow_lo; ow < ow_hi; ++ow) yrow[ow] += wv * xrow[ow];
            }
          }
        }
      }
    }
  }
}

void conv2d_backward(const ConvDims& d, const double* x, const double* w, const double* dy,
                     double* dx, double* dw, double* db) {
  const size_t x_img = static_cast<size_t>(d.in_ch) * d.in_h * d.in_w;
  const size_t y_img = static_cast<size_t>(d.out_ch) * d.out_h * d.out_w;
  for (int n = 0; n < d.n; ++n) {
    const double* xn = x + static_cast<size_t>(n) * x_img;
    double* dxn = dx + static_cast<size_t>(n) * x_img;
    const double* dyn = dy + static_cast<size_t>(n) * y_img;
    for (int oc = 0; oc < d.out_ch; ++oc) {
      const double* dyc = dyn + static_cast<size_t>(oc) * d.out_h * d.out_w;
      double acc_b = 0.0;
      for (int i = 0; i < d.out_h * d.out_w; ++i) acc_b += dyc[i];
      db[oc] += acc_b;
      for (int ic = 0; ic < d.in_ch; ++ic) {
        const double* xc = xn + static_cast<size_t>(ic) * d.in_h * d.in_w;
        double* dxc = dxn + static_cast<size_t>(ic) * d.in_h * d.in_w;
        const double* wc = w + ((static_cast<size_t>(oc) * d.in_ch + ic) * d.kh) * d.kw;
        double* dwc = dw + ((static_cast<size_t>(oc) * d.in_ch + ic) * d.kh) * d.kw;
        for (int ki = 0; ki < d.kh; ++ki) {
          for (int kj = 0; kj < d.kw; ++kj) {
            const double wv = wc[ki * d.kw + kj];
            double acc_w = 0.0;
            const int dj = kj - d.pad_w;
            const int ow_lo = std::max(0, -dj);
            const int ow_hi = std::min(d.out_w, d.in_w - dj);
            for (int oh = 0; oh < d.out_h; ++oh) {
              const int ih = oh + ki - d.pad_h;
              if (ih < 0 || ih >= d.in_h) continue;
              const double* xrow = xc + static_cast<size_t>(ih) * d.in_w + dj;
              double* dxrow = dxc + static_cast<size_t>(ih) * d.in_w + dj;
              const double* dyrow = dyc + static_cast<size_t>(oh) * d.out_w;
              for (int ow = ow_lo; ow < ow_hi; ++ow) {
                acc_w += xrow[ow] * dyrow[ow];
                dxrow[ow] += wv * dyrow[ow];
              }
            }
            dwc[ki * d.kw + kj] += acc_w;
          }
        }
      }
    }
  }
}

void dense_forward(int n, int in_f, int out_f, const double* x, const double* w, const double* b,
                   double* y) {
  for (int i = 0; i < n; ++i) {
    double* yr = y + static_cast<size_t>(i) * out_f;
    for (int j = 0; j < out_f; ++j) yr[j] = b[j];
  }
  // k-outer keeps the (n x out_f) accumulator cache-resident while each
  // weight row streams through exactly once.
  for (int k = 0; k < in_f; ++k) {
    const double* wr = w + static_cast<size_t>(k) * out_f;
    for (int i = 0; i < n; ++i) {
      const double xv = x[static_cast<size_t>(i) * in_f + k];
      double* yr = y + static_cast<size_t>(i) * out_f;
      for (int j = 0; j < out_f; ++j) yr[j] += xv * wr[j];
    }
  }
}

void dense_backward(int n, int in_f, int out_f, const double* x, const double* w, const double* dy,
                    double* dx, double* dw, double* db) {
  for (int i = 0; i < n; ++i) {
    const double* dyr = dy + static_cast<size_t>(i) * out_f;
    for (int j = 0; j < out_f; ++j) db[j] += dyr[j];
  }
  for (int k = 0; k < in_f; ++k) {
    double* dwr = dw + static_cast<size_t>(k) * out_f;
    const double* wr = w + static_cast<size_t>(k) * out_f;
    for (int i = 0; i < n; ++i) {
      const double* dyr = dy + static_cast<size_t>(i) * out_f;
      const double xv = x[static_cast<size_t>(i) * in_f + k];
      double acc = 0.0;
      for (int j = 0; j < out_f; ++j) {
        dwr[j] += xv * dyr[j];
        acc += wr[j] * dyr[j];
      }
      dx[static_cast<size_t>(i) * in_f + k] = acc;
    }
  }
}

void relu_forward(size_t count, const double* x, double* y) {
  for (size_t i = 0; i < count; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(size_t count, const double* x, const double* dy, double* dx) {
  for (size_t i = 0; i < count; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

void dropout_mask(size_t count, double rate, Rng& rng, double* mask) {
  const double keep = 1.0 - rate;
  const double scale = keep > 0.0 ? 1.0 / keep : 0.0;
  for (size_t i = 0; i < count; ++i) mask[i] = rng.uniform() < keep ? scale : 0.0;
}

void dropout_forward(size_t count, const double* x, const double* mask, double* y) {
  for (size_t i = 0; i < count; ++i) y[i] = x[i] * mask[i];
}

void dropout_backward(size_t count, const double* dy, const double* mask, double* dx) {
  for (size_t i = 0; i < count; ++i) dx[i] = dy[i] * mask[i];
}

void softmax_forward(int n, int c, const double* x, double* y) {
  for (int i = 0; i < n; ++i) {
    const double* xr = x + static_cast<size_t>(i) * c;
    double* yr = y + static_cast<size_t>(i) * c;
    double mx = xr[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, xr[j]);
    double sum = 0.0;
    for (int j = 0; j < c; ++j) {
      yr[j] = std::exp(xr[j] - mx);
      sum += yr[j];
    }
    for (int j = 0; j < c; ++j) yr[j] /= sum;
  }
}

void softmax_backward(int n, int c, const double* y, const double* dy, double* dx) {
  for (int i = 0; i < n; ++i) {
    const double* yr = y + static_cast<size_t>(i) * c;
    const double* dyr = dy + static_cast<size_t>(i) * c;
    double* dxr = dx + static_cast<size_t>(i) * c;
    double dot = 0.0;
    for (int j = 0; j < c; ++j) dot += yr[j] * dyr[j];
    for (int j = 0; j < c; ++j) dxr[j] = yr[j] * (dyr[j] - dot);
  }
}

}  // namespace fv::nn
