#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganaudit/gan.hpp"
#include "ganaudit/nn.hpp"
#include "ganaudit/rng.hpp"

using namespace ganaudit;

namespace {

using DTensor = TensorT<double>;

DTensor random_tensor(int n, int c, int h, int w, uint64_t seed) {
  DTensor t(n, c, h, w);
  Rng rng(seed);
  for (auto& v : t.data) v = rng.normal();
  return t;
}

// Direct nested-loop convolution, the reference the GEMM path must match.
DTensor conv_reference(const DTensor& x, const std::vector<double>& weight,
                       const std::vector<double>& bias, int out_ch, int k,
                       int stride, int pad) {
  int oh = (x.h + 2 * pad - k) / stride + 1;
  int ow = (x.w + 2 * pad - k) / stride + 1;
  DTensor y(x.n, out_ch, oh, ow);
  for (int n = 0; n < x.n; ++n)
    for (int oc = 0; oc < out_ch; ++oc)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          double acc = bias[oc];
          for (int ic = 0; ic < x.c; ++ic)
            for (int ky = 0; ky < k; ++ky)
              for (int kx = 0; kx < k; ++kx) {
                int iy = oy * stride - pad + ky;
                int ix = ox * stride - pad + kx;
                if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w) continue;
                acc += weight[((static_cast<size_t>(oc) * x.c + ic) * k + ky) *
                                  k + kx] *
                       x.at(n, ic, iy, ix);
              }
          y.at(n, oc, oy, ox) = acc;
        }
  return y;
}

DTensor convt_reference(const DTensor& x, const std::vector<double>& weight,
                        const std::vector<double>& bias, int out_ch, int k,
                        int stride, int pad) {
  int oh = (x.h - 1) * stride - 2 * pad + k;
  int ow = (x.w - 1) * stride - 2 * pad + k;
  DTensor y(x.n, out_ch, oh, ow);
  for (int n = 0; n < x.n; ++n)
    for (int oc = 0; oc < out_ch; ++oc)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) y.at(n, oc, oy, ox) = bias[oc];
  for (int n = 0; n < x.n; ++n)
    for (int ic = 0; ic < x.c; ++ic)
      for (int iy = 0; iy < x.h; ++iy)
        for (int ix = 0; ix < x.w; ++ix)
          for (int oc = 0; oc < out_ch; ++oc)
            for (int ky = 0; ky < k; ++ky)
              for (int kx = 0; kx < k; ++kx) {
                int oy = iy * stride - pad + ky;
                int ox = ix * stride - pad + kx;
                if (oy < 0 || oy >= oh || ox < 0 || ox >= ow) continue;
                y.at(n, oc, oy, ox) +=
                    weight[((static_cast<size_t>(ic) * out_ch + oc) * k + ky) *
                               k + kx] *
                    x.at(n, ic, iy, ix);
              }
  return y;
}

std::vector<double> param_values(LayerT<double>& layer, const char* which) {
  std::vector<ParamRef<double>> params;
  layer.collect_params("p", params);
  for (auto& p : params)
    if (p.name.find(which) != std::string::npos) return *p.value;
  REQUIRE(false);
  return {};
}

// Two-pass smoothed BCE loss of a discriminator net on a real and fake
// batch, exactly as the training loop computes it.
double disc_loss(NetT<double>& net, const DTensor& real, const DTensor& fake) {
  DTensor grad;
  DTensor lr = net.forward(real, true);
  double loss = bce_with_logits(lr, 0.9, 0.5, grad);
  DTensor lf = net.forward(fake, true);
  loss += bce_with_logits(lf, 0.1, 0.5, grad);
  return loss;
}

void disc_loss_backward(NetT<double>& net, const DTensor& real,
                        const DTensor& fake) {
  DTensor grad;
  net.zero_grads();
  DTensor lr = net.forward(real, true);
  bce_with_logits(lr, 0.9, 0.5, grad);
  net.backward(std::move(grad));
  DTensor lf = net.forward(fake, true);
  bce_with_logits(lf, 0.1, 0.5, grad);
  net.backward(std::move(grad));
}

// Central-difference check over `trials` randomly chosen coordinates.
void check_gradients(NetT<double>& net, const DTensor& real,
                     const DTensor& fake, int trials, uint64_t seed,
                     double tol) {
  disc_loss_backward(net, real, fake);
  auto params = net.params("net");
  std::vector<ParamRef<double>> trainable;
  for (auto& p : params)
    if (p.trainable()) trainable.push_back(p);
  std::vector<std::vector<double>> analytic;
  for (auto& p : trainable) analytic.push_back(*p.grad);

  Rng rng(seed);
  int checked = 0;
  double worst = 0.0;
  while (checked < trials) {
    size_t pi = rng.next_u32() % trainable.size();
    auto& values = *trainable[pi].value;
    size_t ei = rng.next_u32() % values.size();
    double h = 1e-5 * std::max(1.0, std::abs(values[ei]));
    double orig = values[ei];
    values[ei] = orig + h;
    double fp = disc_loss(net, real, fake);
    values[ei] = orig - h;
    double fm = disc_loss(net, real, fake);
    values[ei] = orig;
    double numeric = (fp - fm) / (2 * h);
    double exact = analytic[pi][ei];
    double denom = std::max({std::abs(numeric), std::abs(exact), 1e-8});
    double rel = std::abs(numeric - exact) / denom;
    if (std::abs(numeric) < 1e-10 && std::abs(exact) < 1e-10) rel = 0.0;
    worst = std::max(worst, rel);
    CHECK(rel <= tol);
    ++checked;
  }
  MESSAGE("worst relative gradient error: ", worst);
}

}  // namespace

TEST_CASE("conv matches the direct reference") {
  for (auto [stride, pad] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 0}}) {
    Conv2dT<double> conv(3, 5, 3, stride, pad);
    Rng rng(7);
    conv.init(rng);
    DTensor x = random_tensor(2, 3, 8, 8, 11);
    DTensor got = conv.forward(x, false);
    DTensor want = conv_reference(x, param_values(conv, "weight"),
                                  param_values(conv, "bias"), 5, 3, stride, pad);
    REQUIRE(got.same_shape(want));
    for (size_t i = 0; i < got.size(); ++i)
      CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("transposed conv matches the direct reference") {
  for (auto [stride, pad] : {std::pair{2, 1}, std::pair{1, 0}}) {
    ConvTranspose2dT<double> conv(4, 3, 4, stride, pad);
    Rng rng(13);
    conv.init(rng);
    DTensor x = random_tensor(2, 4, 4, 4, 17);
    DTensor got = conv.forward(x, false);
    DTensor want = convt_reference(x, param_values(conv, "weight"),
                                   param_values(conv, "bias"), 3, 4, stride, pad);
    REQUIRE(got.same_shape(want));
    for (size_t i = 0; i < got.size(); ++i)
      CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("miniature discriminator gradients match central differences") {
  GanConfig cfg;
  cfg.side = 8;
  cfg.gen_base_width = 4;
  cfg.disc_depth = 1;
  cfg.latent_dim = 6;
  NetT<double> disc = build_discriminator_net<double>(cfg, 1, 99);
  DTensor real = random_tensor(4, 1, 8, 8, 21);
  DTensor fake = random_tensor(4, 1, 8, 8, 22);
  check_gradients(disc, real, fake, 100, 23, 1e-4);
}

TEST_CASE("deeper discriminator with batch norm passes the gradient check") {
  GanConfig cfg;
  cfg.side = 16;
  cfg.gen_base_width = 4;
  cfg.disc_depth = 3;
  cfg.latent_dim = 6;
  NetT<double> disc = build_discriminator_net<double>(cfg, 3, 101);
  DTensor real = random_tensor(3, 1, 16, 16, 31);
  DTensor fake = random_tensor(3, 1, 16, 16, 32);
  check_gradients(disc, real, fake, 60, 33, 1e-4);
}

TEST_CASE("generator gradients match central differences") {
  GanConfig cfg;
  cfg.side = 8;
  cfg.gen_base_width = 3;
  cfg.disc_depth = 1;
  cfg.latent_dim = 5;
  NetT<double> gen = build_generator_net<double>(cfg, generator_widths(cfg), 55);
  DTensor z = random_tensor(3, 5, 1, 1, 56);
  DTensor target = random_tensor(3, 1, 8, 8, 57);

  // Squared-error head; enough to exercise every generator layer backward.
  auto loss_of = [&]() {
    DTensor y = gen.forward(z, true);
    double loss = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
      double d = y.data[i] - target.data[i];
      loss += d * d;
    }
    return loss / y.size();
  };
  auto backward_pass = [&]() {
    gen.zero_grads();
    DTensor y = gen.forward(z, true);
    DTensor grad(y.n, y.c, y.h, y.w);
    for (size_t i = 0; i < y.size(); ++i)
      grad.data[i] = 2.0 * (y.data[i] - target.data[i]) / y.size();
    gen.backward(std::move(grad));
  };

  backward_pass();
  auto params = gen.params("g");
  std::vector<ParamRef<double>> trainable;
  for (auto& p : params)
    if (p.trainable()) trainable.push_back(p);
  std::vector<std::vector<double>> analytic;
  for (auto& p : trainable) analytic.push_back(*p.grad);

  Rng rng(58);
  for (int t = 0; t < 80; ++t) {
    size_t pi = rng.next_u32() % trainable.size();
    auto& values = *trainable[pi].value;
    size_t ei = rng.next_u32() % values.size();
    double h = 1e-5 * std::max(1.0, std::abs(values[ei]));
    double orig = values[ei];
    values[ei] = orig + h;
    double fp = loss_of();
    values[ei] = orig - h;
    double fm = loss_of();
    values[ei] = orig;
    double numeric = (fp - fm) / (2 * h);
    double exact = analytic[pi][ei];
    double denom = std::max({std::abs(numeric), std::abs(exact), 1e-8});
    double rel = std::abs(numeric - exact) / denom;
    if (std::abs(numeric) < 1e-10 && std::abs(exact) < 1e-10) rel = 0.0;
    CHECK(rel <= 1e-4);
  }
}

TEST_CASE("smoothed bce at constant 0.5 confidence is ln 2") {
  // sigma(0) = 0.5; the smoothed two-pass loss collapses to ln 2 no matter
  // the smoothing split.
  TensorT<float> logits(4, 1, 1, 1);
  TensorT<float> grad;
  double loss = bce_with_logits(logits, 0.9, 0.5, grad) +
                bce_with_logits(logits, 0.1, 0.5, grad);
  CHECK(loss == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("adam determinism") {
  auto make = [] {
    GanConfig cfg;
    cfg.side = 8;
    cfg.gen_base_width = 4;
    cfg.disc_depth = 1;
    return build_discriminator_net<float>(cfg, 1, 5);
  };
  Net a = make(), b = make();
  Tensor x(2, 1, 8, 8);
  Rng rng(6);
  for (auto& v : x.data) v = rng.normal_float();

  for (Net* net : {&a, &b}) {
    Adam opt(net->params("d"), 0.5);
    for (int step = 0; step < 3; ++step) {
      net->zero_grads();
      Tensor grad;
      Tensor logits = net->forward(x, true);
      bce_with_logits(logits, 0.9, 1.0, grad);
      net->backward(std::move(grad));
      opt.step(1e-3);
    }
  }
  auto pa = a.params("d"), pb = b.params("d");
  for (size_t i = 0; i < pa.size(); ++i)
    CHECK(*pa[i].value == *pb[i].value);
}
