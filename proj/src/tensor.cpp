#include "qsum/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace qsum {

namespace {

int product(const std::vector<int>& s) {
  int p = 1;
  for (int e : s) {
    if (e <= 0) throw std::invalid_argument("tensor extent must be positive");
    p *= e;
  }
  return p;
}

[[noreturn]] void shape_error(const std::string& op, const Tensor& a) {
  throw std::invalid_argument(op + ": bad shape " + shape_str(a));
}

[[noreturn]] void shape_error(const std::string& op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(op + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

NodePtr make_node(std::string op, Tensor out, std::vector<NodePtr> inputs,
                  std::function<void(Node&)> backprop) {
  auto n = std::make_shared<Node>();
  n->op = std::move(op);
  n->value = std::move(out);
  n->inputs = std::move(inputs);
  for (const auto& in : n->inputs)
    if (in->requires_grad) n->requires_grad = true;
  if (n->requires_grad) n->backprop = std::move(backprop);
  return n;
}

NodePtr unary_map(const std::string& op, const NodePtr& a,
                  double (*f)(double), double (*df)(double)) {
  Tensor out(a->value.shape);
  for (int i = 0; i < out.size(); ++i) out.v[i] = f(a->value.v[i]);
  return make_node(op, std::move(out), {a}, [f, df](Node& n) {
    (void)f;
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    for (int i = 0; i < n.value.size(); ++i)
      in.grad.v[i] += n.grad.v[i] * df(in.value.v[i]);
  });
}

}  // namespace

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
  v.assign(static_cast<size_t>(product(shape)), 0.0);
}

Tensor::Tensor(std::vector<int> s, std::vector<double> vals)
    : shape(std::move(s)), v(std::move(vals)) {
  if (static_cast<int>(v.size()) != product(shape))
    throw std::invalid_argument("tensor value count does not match shape");
}

bool Tensor::all_finite() const {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::string shape_str(const Tensor& t) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < t.shape.size(); ++i) os << (i ? "x" : "") << t.shape[i];
  os << "]";
  return os.str();
}

NodePtr constant(Tensor t) {
  auto n = std::make_shared<Node>();
  n->op = "const";
  n->value = std::move(t);
  return n;
}

NodePtr parameter(Tensor t) {
  auto n = std::make_shared<Node>();
  n->op = "param";
  n->value = std::move(t);
  n->grad = Tensor(n->value.shape);
  n->requires_grad = true;
  return n;
}

NodePtr matmul(const NodePtr& a, const NodePtr& b) {
  const Tensor& A = a->value;
  const Tensor& B = b->value;
  if (A.shape.size() != 2) shape_error("matmul", A);
  int m = A.shape[0], k = A.shape[1];
  int k2 = B.shape[0];
  int p = B.shape.size() > 1 ? B.shape[1] : 1;
  if (k != k2) shape_error("matmul", A, B);

  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using CMap = Eigen::Map<const Mat>;
  Tensor out(B.shape.size() > 1 ? std::vector<int>{m, p} : std::vector<int>{m});
  Eigen::Map<Mat>(out.v.data(), m, p) =
      CMap(A.v.data(), m, k) * CMap(B.v.data(), k2, p);

  return make_node("matmul", std::move(out), {a, b}, [m, k, p](Node& n) {
    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using CMap = Eigen::Map<const Mat>;
    using MMap = Eigen::Map<Mat>;
    CMap G(n.grad.v.data(), m, p);
    auto& a_ = *n.inputs[0];
    auto& b_ = *n.inputs[1];
    if (a_.requires_grad)
      MMap(a_.grad.v.data(), m, k) += G * CMap(b_.value.v.data(), k, p).transpose();
    if (b_.requires_grad)
      MMap(b_.grad.v.data(), k, p) += CMap(a_.value.v.data(), m, k).transpose() * G;
  });
}

NodePtr add(const NodePtr& a, const NodePtr& b) {
  if (!a->value.same_shape(b->value)) shape_error("add", a->value, b->value);
  Tensor out(a->value.shape);
  for (int i = 0; i < out.size(); ++i) out.v[i] = a->value.v[i] + b->value.v[i];
  return make_node("add", std::move(out), {a, b}, [](Node& n) {
    for (auto& in : n.inputs) {
      if (!in->requires_grad) continue;
      for (int i = 0; i < n.grad.size(); ++i) in->grad.v[i] += n.grad.v[i];
    }
  });
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
  return add(a, scale(b, -1.0));
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
  if (!a->value.same_shape(b->value)) shape_error("mul", a->value, b->value);
  Tensor out(a->value.shape);
  for (int i = 0; i < out.size(); ++i) out.v[i] = a->value.v[i] * b->value.v[i];
  return make_node("mul", std::move(out), {a, b}, [](Node& n) {
    auto& a_ = *n.inputs[0];
    auto& b_ = *n.inputs[1];
    if (a_.requires_grad)
      for (int i = 0; i < n.grad.size(); ++i) a_.grad.v[i] += n.grad.v[i] * b_.value.v[i];
    if (b_.requires_grad)
      for (int i = 0; i < n.grad.size(); ++i) b_.grad.v[i] += n.grad.v[i] * a_.value.v[i];
  });
}

NodePtr scale(const NodePtr& a, double c) {
  Tensor out(a->value.shape);
  for (int i = 0; i < out.size(); ++i) out.v[i] = a->value.v[i] * c;
  return make_node("scale", std::move(out), {a}, [c](Node& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    for (int i = 0; i < n.grad.size(); ++i) in.grad.v[i] += n.grad.v[i] * c;
  });
}

NodePtr smul(const NodePtr& a, const NodePtr& s) {
  if (s->value.size() != 1) shape_error("smul", s->value);
  double c = s->value.v[0];
  Tensor out(a->value.shape);
  for (int i = 0; i < out.size(); ++i) out.v[i] = a->value.v[i] * c;
  return make_node("smul", std::move(out), {a, s}, [](Node& n) {
    auto& a_ = *n.inputs[0];
    auto& s_ = *n.inputs[1];
    double c = s_.value.v[0];
    if (a_.requires_grad)
      for (int i = 0; i < n.grad.size(); ++i) a_.grad.v[i] += n.grad.v[i] * c;
    if (s_.requires_grad)
      for (int i = 0; i < n.grad.size(); ++i) s_.grad.v[0] += n.grad.v[i] * a_.value.v[i];
  });
}

NodePtr concat(const std::vector<NodePtr>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  int total = 0;
  for (const auto& p : parts) {
    if (p->value.shape.size() != 1) shape_error("concat", p->value);
    total += p->value.size();
  }
  Tensor out({total});
  int off = 0;
  for (const auto& p : parts) {
    std::copy(p->value.v.begin(), p->value.v.end(), out.v.begin() + off);
    off += p->value.size();
  }
  return make_node("concat", std::move(out), parts, [](Node& n) {
    int off = 0;
    for (auto& in : n.inputs) {
      int sz = in->value.size();
      if (in->requires_grad)
        for (int i = 0; i < sz; ++i) in->grad.v[i] += n.grad.v[off + i];
      off += sz;
    }
  });
}

NodePtr sigmoid(const NodePtr& a) {
  return unary_map(
      "sigmoid", a, +[](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      +[](double x) {
        double s = 1.0 / (1.0 + std::exp(-x));
        return s * (1.0 - s);
      });
}

NodePtr tanh_op(const NodePtr& a) {
  return unary_map(
      "tanh", a, +[](double x) { return std::tanh(x); },
      +[](double x) {
        double t = std::tanh(x);
        return 1.0 - t * t;
      });
}

NodePtr relu(const NodePtr& a) {
  return unary_map(
      "relu", a, +[](double x) { return x > 0.0 ? x : 0.0; },
      +[](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

NodePtr softmax(const NodePtr& a) {
  if (a->value.shape.size() != 1) shape_error("softmax", a->value);
  Tensor out(a->value.shape);
  double mx = *std::max_element(a->value.v.begin(), a->value.v.end());
  double z = 0.0;
  for (int i = 0; i < out.size(); ++i) {
    out.v[i] = std::exp(a->value.v[i] - mx);
    z += out.v[i];
  }
  for (auto& x : out.v) x /= z;
  return make_node("softmax", std::move(out), {a}, [](Node& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    double dot = 0.0;
    for (int i = 0; i < n.value.size(); ++i) dot += n.grad.v[i] * n.value.v[i];
    for (int i = 0; i < n.value.size(); ++i)
      in.grad.v[i] += n.value.v[i] * (n.grad.v[i] - dot);
  });
}

NodePtr log_op(const NodePtr& a) {
  Tensor out(a->value.shape);
  for (int i = 0; i < out.size(); ++i) out.v[i] = std::log(std::max(a->value.v[i], 1e-12));
  return make_node("log", std::move(out), {a}, [](Node& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    for (int i = 0; i < n.value.size(); ++i)
      in.grad.v[i] += n.grad.v[i] / std::max(in.value.v[i], 1e-12);
  });
}

NodePtr abs_diff(const NodePtr& a, const NodePtr& b) {
  if (!a->value.same_shape(b->value)) shape_error("abs_diff", a->value, b->value);
  Tensor out(a->value.shape);
  for (int i = 0; i < out.size(); ++i) out.v[i] = std::fabs(a->value.v[i] - b->value.v[i]);
  return make_node("abs_diff", std::move(out), {a, b}, [](Node& n) {
    auto& a_ = *n.inputs[0];
    auto& b_ = *n.inputs[1];
    for (int i = 0; i < n.grad.size(); ++i) {
      double s = a_.value.v[i] >= b_.value.v[i] ? 1.0 : -1.0;
      if (a_.requires_grad) a_.grad.v[i] += n.grad.v[i] * s;
      if (b_.requires_grad) b_.grad.v[i] -= n.grad.v[i] * s;
    }
  });
}

NodePtr cmax(const NodePtr& a, const NodePtr& b) {
  if (!a->value.same_shape(b->value)) shape_error("cmax", a->value, b->value);
  Tensor out(a->value.shape);
  for (int i = 0; i < out.size(); ++i) out.v[i] = std::max(a->value.v[i], b->value.v[i]);
  return make_node("cmax", std::move(out), {a, b}, [](Node& n) {
    auto& a_ = *n.inputs[0];
    auto& b_ = *n.inputs[1];
    for (int i = 0; i < n.grad.size(); ++i) {
      if (a_.value.v[i] >= b_.value.v[i]) {
        if (a_.requires_grad) a_.grad.v[i] += n.grad.v[i];
      } else if (b_.requires_grad) {
        b_.grad.v[i] += n.grad.v[i];
      }
    }
  });
}

NodePtr max_over_span(const std::vector<NodePtr>& vecs) {
  if (vecs.empty()) throw std::invalid_argument("max_over_span: empty span");
  NodePtr out = vecs[0];
  for (size_t i = 1; i < vecs.size(); ++i) out = cmax(out, vecs[i]);
  return out;
}

NodePtr slice(const NodePtr& a, int start, int len) {
  if (a->value.shape.size() != 1 || start < 0 || len <= 0 || start + len > a->value.size())
    throw std::invalid_argument("slice: window [" + std::to_string(start) + "," +
                                std::to_string(start + len) + ") out of range for " +
                                shape_str(a->value));
  Tensor out({len});
  std::copy(a->value.v.begin() + start, a->value.v.begin() + start + len, out.v.begin());
  return make_node("slice", std::move(out), {a}, [start, len](Node& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    for (int i = 0; i < len; ++i) in.grad.v[start + i] += n.grad.v[i];
  });
}

NodePtr sum(const NodePtr& a) {
  double s = std::accumulate(a->value.v.begin(), a->value.v.end(), 0.0);
  return make_node("sum", Tensor::scalar(s), {a}, [](Node& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    for (auto& g : in.grad.v) g += n.grad.v[0];
  });
}

NodePtr mean(const NodePtr& a) {
  return scale(sum(a), 1.0 / a->value.size());
}

NodePtr pick(const NodePtr& a, int index) {
  if (a->value.shape.size() != 1 || index < 0 || index >= a->value.size())
    throw std::invalid_argument("pick: index " + std::to_string(index) +
                                " out of range for " + shape_str(a->value));
  return make_node("pick", Tensor::scalar(a->value.v[index]), {a}, [index](Node& n) {
    auto& in = *n.inputs[0];
    if (in.requires_grad) in.grad.v[index] += n.grad.v[0];
  });
}

NodePtr lookup(const NodePtr& table, int row) {
  const Tensor& T = table->value;
  if (T.shape.size() != 2 || row < 0 || row >= T.shape[0])
    throw std::invalid_argument("lookup: row " + std::to_string(row) +
                                " out of range for " + shape_str(T));
  int d = T.shape[1];
  Tensor out({d});
  std::copy(T.v.begin() + static_cast<size_t>(row) * d,
            T.v.begin() + static_cast<size_t>(row + 1) * d, out.v.begin());
  return make_node("lookup", std::move(out), {table}, [row, d](Node& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    for (int i = 0; i < d; ++i) in.grad.v[static_cast<size_t>(row) * d + i] += n.grad.v[i];
  });
}

void backward(const NodePtr& root) {
  if (root->value.size() != 1)
    throw std::invalid_argument("backward: root must be scalar, got " + shape_str(root->value));

  // Topological order by DFS.
  std::vector<Node*> order;
  std::vector<std::pair<Node*, size_t>> stack;
  std::unordered_set<Node*> seen;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->inputs.size()) {
      Node* child = node->inputs[idx++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order)
    if (n->op != "param") n->grad = Tensor(n->value.shape);
  root->grad.v[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backprop) n->backprop(*n);
  }
}

double finite_difference_check(const std::function<NodePtr()>& build,
                               const std::vector<NodePtr>& params,
                               double step, int maxCoords, std::mt19937_64* rng) {
  for (const auto& p : params) p->grad = Tensor(p->value.shape);
  NodePtr loss = build();
  if (!loss->value.all_finite())
    throw std::runtime_error("finite_difference_check: non-finite loss");
  backward(loss);

  std::mt19937_64 local(12345);
  std::mt19937_64& gen = rng ? *rng : local;
  double worst = 0.0;
  for (const auto& p : params) {
    std::vector<int> coords(p->value.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (static_cast<int>(coords.size()) > maxCoords) {
      std::shuffle(coords.begin(), coords.end(), gen);
      coords.resize(maxCoords);
    }
    for (int c : coords) {
      double orig = p->value.v[c];
      p->value.v[c] = orig + step;
      double fp = build()->scalar();
      p->value.v[c] = orig - step;
      double fm = build()->scalar();
      p->value.v[c] = orig;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw std::runtime_error("finite_difference_check: non-finite probe value");
      double numeric = (fp - fm) / (2.0 * step);
      double analytic = p->grad.v[c];
      // Central differences at this step cannot resolve gradients below
      // roughly |f|*eps/step; such coordinates only measure roundoff.
      double resolution = 1e-6 * std::max(1.0, std::fabs(loss->scalar()));
      if (std::max(std::fabs(analytic), std::fabs(numeric)) < resolution) continue;
      double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      worst = std::max(worst, std::fabs(analytic - numeric) / denom);
    }
  }
  return worst;
}

NodePtr ParamStore::create(const std::string& name, std::vector<int> shape,
                           double initScale, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> dist(-initScale, initScale);
  for (auto& x : t.v) x = dist(rng);
  auto n = parameter(std::move(t));
  items_.emplace_back(name, n);
  return n;
}

NodePtr ParamStore::create_zeros(const std::string& name, std::vector<int> shape) {
  auto n = parameter(Tensor(std::move(shape)));
  items_.emplace_back(name, n);
  return n;
}

NodePtr ParamStore::get(const std::string& name) const {
  for (const auto& [k, n] : items_)
    if (k == name) return n;
  throw std::out_of_range("parameter not found: " + name);
}

bool ParamStore::has(const std::string& name) const {
  for (const auto& [k, n] : items_)
    if (k == name) return true;
  return false;
}

std::vector<NodePtr> ParamStore::nodes() const {
  std::vector<NodePtr> out;
  out.reserve(items_.size());
  for (const auto& [k, n] : items_) out.push_back(n);
  return out;
}

void ParamStore::zero_grads() {
  for (auto& [k, n] : items_) n->grad = Tensor(n->value.shape);
}

void ParamStore::save(const std::string& path, int64_t step) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.precision(17);
  out << "qsum-checkpoint 1\n";
  out << "step " << step << "\n";
  out << "params " << items_.size() << "\n";
  for (const auto& [name, n] : items_) {
    out << name << " " << n->value.shape.size();
    for (int e : n->value.shape) out << " " << e;
    out << "\n";
    for (size_t i = 0; i < n->value.v.size(); ++i)
      out << (i ? " " : "") << n->value.v[i];
    out << "\n";
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

int64_t ParamStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "qsum-checkpoint" || version != 1)
    throw std::runtime_error("unrecognized checkpoint format: " + path);
  std::string key;
  int64_t step = 0;
  size_t count = 0;
  in >> key >> step;   // step
  in >> key >> count;  // params
  for (size_t i = 0; i < count; ++i) {
    std::string name;
    size_t rank = 0;
    in >> name >> rank;
    std::vector<int> shape(rank);
    for (auto& e : shape) in >> e;
    Tensor t(shape);
    for (auto& x : t.v) in >> x;
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    auto n = get(name);
    if (!n->value.same_shape(t))
      throw std::runtime_error("checkpoint shape mismatch for " + name);
    n->value = std::move(t);
  }
  return step;
}

}  // namespace qsum
