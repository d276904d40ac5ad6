#pragma once

#include "geco/common.hpp"
#include "geco/net.hpp"

#include <span>
#include <utility>
#include <vector>

namespace geco {

enum class Activation { squared, identity };

struct GadgetNeuron {
  Vector weights;  // over the previous layer's outputs (or the input for layer 0)
  double bias = 0.0;
  Activation activation = Activation::squared;
};

using GadgetLayer = std::vector<GadgetNeuron>;

// Explicit layered network: every hidden neuron applies z -> z^2, the last
// layer is linear. depth() counts the output layer, so a network computing
// a single affine function of the input has depth 1.
class GadgetNet {
 public:
  GadgetNet(std::size_t input_dim, std::vector<GadgetLayer> layers);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return layers_.back().size(); }
  std::size_t depth() const { return layers_.size(); }
  std::size_t hidden_layers() const { return layers_.size() - 1; }
  // Number of hidden (squared) neurons.
  std::size_t neuron_count() const;
  const std::vector<GadgetLayer>& layers() const { return layers_; }

  Vector evaluate(const VectorRef& x) const;
  // Convenience for single-output nets.
  double evaluate_scalar(const VectorRef& x) const;

 private:
  std::size_t input_dim_;
  std::vector<GadgetLayer> layers_;
};

Vector evaluate_gadget(const GadgetNet& net, const VectorRef& x);

// x -> x, two hidden neurons.
GadgetNet identity_gadget();
// (x1, x2) -> x1 * x2, two hidden neurons.
GadgetNet product_gadget();
// x -> x^T by repeated squaring, identity padding and a pairwise product tree.
GadgetNet power_gadget(unsigned T);
// x -> constant + sum_{k=1..T} coeffs[k-1] x^k.
GadgetNet polynomial_gadget(std::span<const double> coeffs, double constant = 0.0);

// Neuron count of power_gadget(T), from the construction's closed form.
std::size_t power_gadget_neuron_count(unsigned T);

// --- composition helpers ---

// Inserts identity-padding layers before the output until depth() == depth.
GadgetNet pad_to_depth(const GadgetNet& net, std::size_t depth);
// Runs nets side by side on a shared input; outputs are concatenated.
GadgetNet stack(std::span<const GadgetNet> nets);
// Replaces the output layer by the single output sum_k coeffs[k] out_k + bias.
GadgetNet combine_outputs(const GadgetNet& net, const VectorRef& coeffs, double bias);
// Feeds the affine map z = A x + c into the net: the result takes x as input.
GadgetNet precompose(const GadgetNet& net, const Matrix& A, const VectorRef& c);

// Rewrites a PolyNet (degrees <= 3) as an explicit depth-3 sigma_2 network.
GadgetNet expand_to_sigma2(const PolyNet& net);

// Incremental construction. A Form is a linear function (plus constant) of
// the outputs of the most recently committed layer, or of the input before
// any layer is committed.
class GadgetBuilder {
 public:
  struct Form {
    std::size_t stage = 0;
    std::vector<std::pair<std::size_t, double>> terms;
    double constant = 0.0;

    Form scaled(double s) const;
  };

  explicit GadgetBuilder(std::size_t input_dim);

  Form input(std::size_t j) const;
  Form input_affine(const VectorRef& w, double b) const;
  static Form sum(const Form& a, const Form& b);

  // Each op adds neurons to the pending layer; the returned form lives on
  // the pending layer and becomes usable after commit().
  Form square(const Form& f);
  Form carry(const Form& f);
  Form product(const Form& a, const Form& b);
  void commit();

  std::size_t stage() const { return layers_.size(); }
  GadgetNet finish(const std::vector<Form>& outputs);

 private:
  std::size_t width() const;
  Vector dense(const Form& f) const;
  std::size_t add_neuron(const Form& pre);

  std::size_t input_dim_;
  std::vector<GadgetLayer> layers_;
  GadgetLayer pending_;
};

}  // namespace geco
