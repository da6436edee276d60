#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "swintrack/precision.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

using Shape = std::vector<std::size_t>;

// Tensor storage. Vectorized Eigen kernels peel a prefix whose length depends
// on the address, which changes rounding; fixed alignment keeps runs repeatable.
using Buffer = std::vector<Scalar, Eigen::aligned_allocator<Scalar>>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

// Raised for incompatible extents; the message names every shape involved.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

struct Node {
  Shape shape;
  Buffer value;
  Buffer grad;  // empty until a gradient is written
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward_fn;

  Buffer& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), Scalar{0});
    return grad;
  }
};

}  // namespace detail

// Dense row-major array that records the operations producing it so that
// gradients can be pulled back with backward(). Copies share storage.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, bool requires_grad = false);
  Tensor(Shape shape, std::vector<Scalar> values, bool requires_grad = false);

  static Tensor scalar(Scalar value);
  static Tensor filled(Shape shape, Scalar value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return node_->value.size(); }

  std::span<const Scalar> data() const { return node_->value; }
  // Direct write access, intended for parameter initialisation and optimizer
  // updates. Never mutate a tensor that is part of a live graph.
  std::span<Scalar> mutable_data() { return node_->value; }

  Scalar item() const;
  Scalar at(std::size_t row, std::size_t col) const;

  bool requires_grad() const { return node_->requires_grad; }
  // Accumulated gradient; all zeros when nothing has been written yet.
  std::span<const Scalar> grad() const { return node_->ensure_grad(); }
  std::span<Scalar> mutable_grad() { return node_->ensure_grad(); }
  bool has_grad() const { return !node_->grad.empty(); }
  void zero_grad();

  bool same_storage(const Tensor& other) const { return node_ == other.node_; }

  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  friend Tensor make_result(Shape, Buffer, std::vector<Tensor>,
                            std::function<void(detail::Node&)>);

  std::shared_ptr<detail::Node> node_;
};

// Builds an op output. The backward closure is kept only when one of the
// inputs requires a gradient; it receives the output node, whose `grad` is
// already populated, and must accumulate into the inputs.
Tensor make_result(Shape shape, Buffer value, std::vector<Tensor> inputs,
                   std::function<void(detail::Node&)> backward_fn);

// Reverse-mode sweep from a single-element tensor. Gradients accumulate into
// every reachable leaf that requires them.
void backward(const Tensor& loss);

// Same values, cut out of the graph.
Tensor detach(const Tensor& t);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
