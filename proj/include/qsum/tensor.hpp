#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace qsum {

// Dense row-major tensor, rank 1 or 2 in practice.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);
  Tensor(std::vector<int> s, std::vector<double> vals);

  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
  static Tensor scalar(double x) { return Tensor({1}, {x}); }

  int size() const { return static_cast<int>(v.size()); }
  int rows() const { return shape.at(0); }
  int cols() const { return shape.size() > 1 ? shape[1] : 1; }

  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols() + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool all_finite() const;
};

std::string shape_str(const Tensor& t);

class Node;
using NodePtr = std::shared_ptr<Node>;

// One vertex of the backward tape. Output value is cached at construction,
// grad is filled by backward().
class Node {
 public:
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::string op;
  std::vector<NodePtr> inputs;
  std::function<void(Node&)> backprop;  // scatter this->grad into inputs

  double scalar() const { return value.v.at(0); }
};

NodePtr constant(Tensor t);
NodePtr parameter(Tensor t);

// Primitive set. Every op checks shapes and throws std::invalid_argument
// naming the op and offending shapes.
NodePtr matmul(const NodePtr& a, const NodePtr& b);
NodePtr add(const NodePtr& a, const NodePtr& b);
NodePtr sub(const NodePtr& a, const NodePtr& b);
NodePtr mul(const NodePtr& a, const NodePtr& b);
NodePtr scale(const NodePtr& a, double c);
NodePtr smul(const NodePtr& a, const NodePtr& s);  // s has shape [1]
NodePtr concat(const std::vector<NodePtr>& parts);
NodePtr sigmoid(const NodePtr& a);
NodePtr tanh_op(const NodePtr& a);
NodePtr relu(const NodePtr& a);
NodePtr softmax(const NodePtr& a);
NodePtr log_op(const NodePtr& a);  // clamps input to >= 1e-12
NodePtr abs_diff(const NodePtr& a, const NodePtr& b);
NodePtr cmax(const NodePtr& a, const NodePtr& b);  // coordinatewise max
NodePtr slice(const NodePtr& a, int start, int len);  // rank-1 window
NodePtr sum(const NodePtr& a);
NodePtr mean(const NodePtr& a);
NodePtr pick(const NodePtr& a, int index);           // vector -> scalar
NodePtr lookup(const NodePtr& table, int row);       // embedding row
NodePtr max_over_span(const std::vector<NodePtr>& vecs);  // errors on empty

// Populates grad on every parameter node reachable from `root` (shape [1]).
void backward(const NodePtr& root);

// Gradient-check harness. `build` reconstructs the loss graph from the
// current parameter values; `params` are the leaves to probe. Samples up to
// `maxCoords` coordinates per parameter and returns the max relative error
// between analytic and central-difference gradients.
double finite_difference_check(const std::function<NodePtr()>& build,
                               const std::vector<NodePtr>& params,
                               double step = 1e-5, int maxCoords = 24,
                               std::mt19937_64* rng = nullptr);

// Named parameter bag shared by all trainable modules.
class ParamStore {
 public:
  NodePtr create(const std::string& name, std::vector<int> shape,
                 double initScale, std::mt19937_64& rng);
  NodePtr create_zeros(const std::string& name, std::vector<int> shape);
  NodePtr get(const std::string& name) const;
  bool has(const std::string& name) const;
  const std::vector<std::pair<std::string, NodePtr>>& items() const { return items_; }
  std::vector<NodePtr> nodes() const;
  void zero_grads();

  void save(const std::string& path, int64_t step) const;
  // Loads values into matching names; returns the stored step counter.
  int64_t load(const std::string& path);

 private:
  std::vector<std::pair<std::string, NodePtr>> items_;
};

}  // namespace qsum
