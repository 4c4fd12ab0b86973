#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "qsum/tensor.hpp"

using namespace qsum;

namespace {

Tensor rand_tensor(std::vector<int> shape, std::mt19937_64& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> d(-scale, scale);
  for (auto& x : t.v) x = d(rng);
  return t;
}

}  // namespace

TEST_CASE("forward values of the primitives") {
  auto x = constant(Tensor({3}, {1.0, -2.0, 3.0}));
  auto y = constant(Tensor({3}, {0.5, 4.0, -1.0}));

  CHECK(add(x, y)->value.v == std::vector<double>{1.5, 2.0, 2.0});
  CHECK(sub(x, y)->value.v == std::vector<double>{0.5, -6.0, 4.0});
  CHECK(mul(x, y)->value.v == std::vector<double>{0.5, -8.0, -3.0});
  CHECK(scale(x, 2.0)->value.v == std::vector<double>{2.0, -4.0, 6.0});
  CHECK(abs_diff(x, y)->value.v == std::vector<double>{0.5, 6.0, 4.0});
  CHECK(cmax(x, y)->value.v == std::vector<double>{1.0, 4.0, 3.0});
  CHECK(relu(x)->value.v == std::vector<double>{1.0, 0.0, 3.0});
  CHECK(sum(x)->scalar() == doctest::Approx(2.0));
  CHECK(mean(x)->scalar() == doctest::Approx(2.0 / 3.0));
  CHECK(pick(x, 2)->scalar() == doctest::Approx(3.0));
  CHECK(slice(x, 1, 2)->value.v == std::vector<double>{-2.0, 3.0});
  CHECK(concat({x, y})->value.v ==
        std::vector<double>{1.0, -2.0, 3.0, 0.5, 4.0, -1.0});

  auto A = constant(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  auto v = matmul(A, x);
  CHECK(v->value.shape == std::vector<int>{2});
  CHECK(v->value.v[0] == doctest::Approx(1 - 4 + 9));
  CHECK(v->value.v[1] == doctest::Approx(4 - 10 + 18));

  CHECK(sigmoid(constant(Tensor::scalar(0.0)))->scalar() == doctest::Approx(0.5));
  CHECK(tanh_op(constant(Tensor::scalar(0.0)))->scalar() == doctest::Approx(0.0));
  CHECK(log_op(constant(Tensor::scalar(std::exp(1.0))))->scalar() ==
        doctest::Approx(1.0));
  // log clamps its argument away from zero instead of producing -inf.
  CHECK(std::isfinite(log_op(constant(Tensor::scalar(0.0)))->scalar()));
}

TEST_CASE("softmax normalizes and is shift invariant") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = constant(rand_tensor({9}, rng, 4.0));
    auto s = softmax(x);
    double total = 0.0;
    for (double p : s->value.v) {
      CHECK(p > 0.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    Tensor shifted = x->value;
    for (auto& c : shifted.v) c += 100.0;
    auto s2 = softmax(constant(shifted));
    for (int i = 0; i < 9; ++i)
      CHECK(s2->value.v[i] == doctest::Approx(s->value.v[i]).epsilon(1e-9));
  }
}

TEST_CASE("hand-checked gradients") {
  // d/dx sigmoid at 0 is 0.25
  auto x = parameter(Tensor::scalar(0.0));
  backward(sigmoid(x));
  CHECK(x->grad.v[0] == doctest::Approx(0.25));

  // d/dx x^2 at 3 is 6 (via x*x)
  auto y = parameter(Tensor::scalar(3.0));
  backward(mul(y, y));
  CHECK(y->grad.v[0] == doctest::Approx(6.0));

  // Softmax + cross-entropy on logits [0,0], gold class 1: grad is [0.5, -0.5]
  // for the NLL -log softmax(z)_1, i.e. softmax(z) - onehot.
  auto z = parameter(Tensor({2}, {0.0, 0.0}));
  backward(scale(log_op(pick(softmax(z), 1)), -1.0));
  CHECK(z->grad.v[0] == doctest::Approx(0.5));
  CHECK(z->grad.v[1] == doctest::Approx(-0.5));
}

TEST_CASE("backward accumulates into parameters and is linear in the seed") {
  std::mt19937_64 rng(11);
  auto w = parameter(rand_tensor({4}, rng));
  auto x = constant(rand_tensor({4}, rng));

  auto build = [&] { return sum(mul(w, x)); };
  backward(build());
  Tensor g1 = w->grad;
  backward(build());  // parameter grads accumulate across backward calls
  for (int i = 0; i < 4; ++i)
    CHECK(w->grad.v[i] == doctest::Approx(2.0 * g1.v[i]));

  // scale(loss, c) scales the gradient by c.
  w->grad = Tensor(w->grad.shape);
  backward(scale(build(), 3.0));
  for (int i = 0; i < 4; ++i)
    CHECK(w->grad.v[i] == doctest::Approx(3.0 * g1.v[i]).epsilon(1e-12));
}

TEST_CASE("finite differences over every primitive, 100 random tensors") {
  std::mt19937_64 rng(1234);
  int built = 0;
  while (built < 100) {
    int n = std::uniform_int_distribution<int>(2, 6)(rng);
    auto a = parameter(rand_tensor({n}, rng));
    auto b = parameter(rand_tensor({n}, rng));
    auto W = parameter(rand_tensor({n + 1, n}, rng));
    int which = built % 14;
    auto build = [&]() -> NodePtr {
      switch (which) {
        case 0: return sum(mul(add(a, b), a));
        case 1: return sum(sigmoid(sub(a, b)));
        case 2: return sum(tanh_op(matmul(W, a)));
        case 3: return mean(relu(matmul(W, add(a, b))));
        case 4: return pick(softmax(a), 1);
        case 5: return sum(log_op(sigmoid(mul(a, b))));
        case 6: return sum(abs_diff(a, add(b, constant(Tensor({n}, std::vector<double>(n, 0.35))))));
        case 7: return sum(cmax(a, b));
        case 8: return sum(slice(concat({a, b}), 1, n));
        case 9: return smul(sum(a), pick(b, 0));
        case 10: return sum(max_over_span({a, b, scale(a, 0.5)}));
        case 11: return mean(mul(sigmoid(a), tanh_op(b)));
        case 12: return pick(matmul(W, relu(a)), 0);
        default: return sum(mul(softmax(a), log_op(softmax(b))));
      }
    };
    double err = finite_difference_check(build, {a, b, W}, 1e-5, 24, &rng);
    CHECK(err < 1e-4);
    ++built;
  }
}

TEST_CASE("shape errors are reported, not silently broadcast") {
  auto a = constant(Tensor({3}));
  auto b = constant(Tensor({4}));
  CHECK_THROWS_AS(add(a, b), std::invalid_argument);
  CHECK_THROWS_AS(mul(a, b), std::invalid_argument);
  CHECK_THROWS_AS(matmul(a, b), std::invalid_argument);
  CHECK_THROWS_AS(max_over_span({}), std::invalid_argument);
  CHECK_THROWS_AS(pick(a, 7), std::invalid_argument);
}

TEST_CASE("parameter store checkpoint round-trips exactly") {
  std::mt19937_64 rng(99);
  ParamStore store;
  auto w1 = store.create("layer.W", {3, 4}, 0.5, rng);
  auto b1 = store.create("layer.b", {4}, 0.1, rng);
  Tensor savedW = w1->value, savedB = b1->value;

  std::string path = "checkpoint_roundtrip.qck";
  store.save(path, 1234);

  // Scribble over the values, then restore.
  for (auto& x : w1->value.v) x = -7.0;
  for (auto& x : b1->value.v) x = -7.0;
  int64_t step = store.load(path);
  CHECK(step == 1234);
  CHECK(w1->value.v == savedW.v);  // text format keeps doubles bit-exact
  CHECK(b1->value.v == savedB.v);
  std::remove(path.c_str());
}
