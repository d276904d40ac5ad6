#include "geco/gadget.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace geco {

GadgetNet::GadgetNet(std::size_t input_dim, std::vector<GadgetLayer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  require(input_dim_ >= 1, "GadgetNet: input dimension must be positive");
  require(!layers_.empty(), "GadgetNet: needs at least an output layer");
  std::size_t prev = input_dim_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const bool output = l + 1 == layers_.size();
    require(!layers_[l].empty(), "GadgetNet: empty layer " + std::to_string(l));
    for (const auto& n : layers_[l]) {
      require(static_cast<std::size_t>(n.weights.size()) == prev,
              "GadgetNet: layer " + std::to_string(l) + " weight width mismatch");
      require(n.activation == (output ? Activation::identity : Activation::squared),
              "GadgetNet: hidden neurons must be squared and output neurons linear");
    }
    prev = layers_[l].size();
  }
}

std::size_t GadgetNet::neuron_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) n += layers_[l].size();
  return n;
}

Vector GadgetNet::evaluate(const VectorRef& x) const {
  require(static_cast<std::size_t>(x.size()) == input_dim_,
          "GadgetNet::evaluate: expected input dimension " + std::to_string(input_dim_));
  Vector cur = x;
  for (const auto& layer : layers_) {
    Vector next(static_cast<Eigen::Index>(layer.size()));
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const double z = layer[i].weights.dot(cur) + layer[i].bias;
      next[static_cast<Eigen::Index>(i)] = layer[i].activation == Activation::squared ? z * z : z;
    }
    cur = std::move(next);
  }
  return cur;
}

double GadgetNet::evaluate_scalar(const VectorRef& x) const {
  require(output_dim() == 1, "GadgetNet::evaluate_scalar: network has several outputs");
  return evaluate(x)[0];
}

Vector evaluate_gadget(const GadgetNet& net, const VectorRef& x) { return net.evaluate(x); }

// ---------------------------------------------------------------------------
// Builder

GadgetBuilder::Form GadgetBuilder::Form::scaled(double s) const {
  Form out = *this;
  for (auto& [i, c] : out.terms) c *= s;
  out.constant *= s;
  return out;
}

GadgetBuilder::GadgetBuilder(std::size_t input_dim) : input_dim_(input_dim) {
  require(input_dim >= 1, "GadgetBuilder: input dimension must be positive");
}

GadgetBuilder::Form GadgetBuilder::input(std::size_t j) const {
  require(j < input_dim_, "GadgetBuilder::input: index out of range");
  return Form{0, {{j, 1.0}}, 0.0};
}

GadgetBuilder::Form GadgetBuilder::input_affine(const VectorRef& w, double b) const {
  require(static_cast<std::size_t>(w.size()) == input_dim_, "GadgetBuilder::input_affine: size mismatch");
  Form f{0, {}, b};
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) f.terms.emplace_back(static_cast<std::size_t>(j), w[j]);
  }
  return f;
}

GadgetBuilder::Form GadgetBuilder::sum(const Form& a, const Form& b) {
  require(a.stage == b.stage, "GadgetBuilder::sum: forms live on different layers");
  Form out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  out.constant += b.constant;
  return out;
}

std::size_t GadgetBuilder::width() const { return layers_.empty() ? input_dim_ : layers_.back().size(); }

Vector GadgetBuilder::dense(const Form& f) const {
  require(f.stage == stage(), "GadgetBuilder: form is not on the current layer");
  Vector w = Vector::Zero(static_cast<Eigen::Index>(width()));
  for (const auto& [i, c] : f.terms) w[static_cast<Eigen::Index>(i)] += c;
  return w;
}

std::size_t GadgetBuilder::add_neuron(const Form& pre) {
  pending_.push_back(GadgetNeuron{dense(pre), pre.constant, Activation::squared});
  return pending_.size() - 1;
}

GadgetBuilder::Form GadgetBuilder::square(const Form& f) {
  const std::size_t i = add_neuron(f);
  return Form{stage() + 1, {{i, 1.0}}, 0.0};
}

// ((g+1)/2)^2 - ((g-1)/2)^2 = g
GadgetBuilder::Form GadgetBuilder::carry(const Form& f) {
  Form half = f.scaled(0.5);
  Form plus = half;
  plus.constant += 0.5;
  Form minus = half;
  minus.constant -= 0.5;
  const std::size_t i = add_neuron(plus);
  const std::size_t j = add_neuron(minus);
  return Form{stage() + 1, {{i, 1.0}, {j, -1.0}}, 0.0};
}

// (a/2 + b/2)^2 - (a/2 - b/2)^2 = a b
GadgetBuilder::Form GadgetBuilder::product(const Form& a, const Form& b) {
  const std::size_t i = add_neuron(sum(a.scaled(0.5), b.scaled(0.5)));
  const std::size_t j = add_neuron(sum(a.scaled(0.5), b.scaled(-0.5)));
  return Form{stage() + 1, {{i, 1.0}, {j, -1.0}}, 0.0};
}

void GadgetBuilder::commit() {
  require(!pending_.empty(), "GadgetBuilder::commit: pending layer is empty");
  layers_.push_back(std::move(pending_));
  pending_.clear();
}

GadgetNet GadgetBuilder::finish(const std::vector<Form>& outputs) {
  require(pending_.empty(), "GadgetBuilder::finish: uncommitted layer");
  require(!outputs.empty(), "GadgetBuilder::finish: no outputs");
  GadgetLayer out;
  for (const auto& f : outputs) out.push_back(GadgetNeuron{dense(f), f.constant, Activation::identity});
  auto layers = layers_;
  layers.push_back(std::move(out));
  return GadgetNet(input_dim_, std::move(layers));
}

// ---------------------------------------------------------------------------
// Gadgets

GadgetNet identity_gadget() {
  GadgetBuilder b(1);
  auto x = b.carry(b.input(0));
  b.commit();
  return b.finish({x});
}

GadgetNet product_gadget() {
  GadgetBuilder b(2);
  auto p = b.product(b.input(0), b.input(1));
  b.commit();
  return b.finish({p});
}

GadgetNet power_gadget(unsigned T) {
  require(T >= 1, "power_gadget: exponent must be at least 1");
  GadgetBuilder b(1);
  const int top = std::bit_width(T) - 1;  // T = sum_{i<=top} bit_i 2^i, bit_top = 1

  // Squaring chain s_i = x^(2^i); factors with bit_i = 1 ride along via identity padding.
  auto s = b.input(0);
  std::vector<GadgetBuilder::Form> factors;
  for (int i = 1; i <= top; ++i) {
    std::vector<GadgetBuilder::Form> carried;
    for (const auto& h : factors) carried.push_back(b.carry(h));
    if ((T >> (i - 1)) & 1u) carried.push_back(b.carry(s));
    s = b.square(s);
    b.commit();
    factors = std::move(carried);
  }
  factors.push_back(s);

  // Pairwise products, left to right; an odd leftover is padded.
  while (factors.size() > 1) {
    std::vector<GadgetBuilder::Form> next;
    for (std::size_t i = 0; i + 1 < factors.size(); i += 2) next.push_back(b.product(factors[i], factors[i + 1]));
    if (factors.size() % 2 == 1) next.push_back(b.carry(factors.back()));
    b.commit();
    factors = std::move(next);
  }
  return b.finish({factors.front()});
}

std::size_t power_gadget_neuron_count(unsigned T) {
  require(T >= 1, "power_gadget_neuron_count: exponent must be at least 1");
  const std::size_t top = static_cast<std::size_t>(std::bit_width(T) - 1);
  std::size_t n = top;  // squaring chain
  for (std::size_t j = 0; j < top; ++j) {
    if ((T >> j) & 1u) n += 2 * (top - j);
  }
  for (std::size_t live = static_cast<std::size_t>(std::popcount(T)); live > 1; live = (live + 1) / 2) {
    n += 2 * ((live + 1) / 2);
  }
  return n;
}

GadgetNet polynomial_gadget(std::span<const double> coeffs, double constant) {
  std::vector<GadgetNet> parts;
  std::vector<double> weights;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    parts.push_back(power_gadget(static_cast<unsigned>(k + 1)));
    weights.push_back(coeffs[k]);
  }
  require(!parts.empty(), "polynomial_gadget: all coefficients are zero");
  std::size_t depth = 0;
  for (const auto& p : parts) depth = std::max(depth, p.depth());
  for (auto& p : parts) p = pad_to_depth(p, depth);
  const Vector w = Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return combine_outputs(stack(parts), w, constant);
}

// ---------------------------------------------------------------------------
// Composition

GadgetNet pad_to_depth(const GadgetNet& net, std::size_t depth) {
  require(depth >= net.depth(), "pad_to_depth: target depth below current depth");
  auto layers = net.layers();
  while (layers.size() < depth) {
    GadgetLayer& out = layers.back();
    GadgetLayer hidden;
    GadgetLayer new_out;
    for (std::size_t k = 0; k < out.size(); ++k) {
      hidden.push_back(GadgetNeuron{0.5 * out[k].weights, 0.5 * out[k].bias + 0.5, Activation::squared});
      hidden.push_back(GadgetNeuron{0.5 * out[k].weights, 0.5 * out[k].bias - 0.5, Activation::squared});
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
      Vector w = Vector::Zero(static_cast<Eigen::Index>(hidden.size()));
      w[static_cast<Eigen::Index>(2 * k)] = 1.0;
      w[static_cast<Eigen::Index>(2 * k + 1)] = -1.0;
      new_out.push_back(GadgetNeuron{std::move(w), 0.0, Activation::identity});
    }
    out = std::move(hidden);
    layers.push_back(std::move(new_out));
  }
  return GadgetNet(net.input_dim(), std::move(layers));
}

GadgetNet stack(std::span<const GadgetNet> nets) {
  require(!nets.empty(), "stack: no networks");
  const std::size_t depth = nets.front().depth();
  const std::size_t in = nets.front().input_dim();
  for (const auto& n : nets) {
    require(n.depth() == depth && n.input_dim() == in, "stack: networks must share depth and input");
  }
  std::vector<GadgetLayer> layers(depth);
  std::vector<std::size_t> prev_width(nets.size(), in);
  std::size_t prev_total = in;
  for (std::size_t l = 0; l < depth; ++l) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < nets.size(); ++k) {
      for (const auto& neuron : nets[k].layers()[l]) {
        GadgetNeuron out = neuron;
        if (l > 0) {
          out.weights = Vector::Zero(static_cast<Eigen::Index>(prev_total));
          out.weights.segment(static_cast<Eigen::Index>(offset), neuron.weights.size()) = neuron.weights;
        }
        layers[l].push_back(std::move(out));
      }
      offset += prev_width[k];
      prev_width[k] = nets[k].layers()[l].size();
    }
    prev_total = layers[l].size();
  }
  return GadgetNet(in, std::move(layers));
}

GadgetNet combine_outputs(const GadgetNet& net, const VectorRef& coeffs, double bias) {
  require(static_cast<std::size_t>(coeffs.size()) == net.output_dim(), "combine_outputs: coefficient count mismatch");
  auto layers = net.layers();
  const GadgetLayer& out = layers.back();
  GadgetNeuron merged{Vector::Zero(out.front().weights.size()), bias, Activation::identity};
  for (std::size_t k = 0; k < out.size(); ++k) {
    merged.weights += coeffs[static_cast<Eigen::Index>(k)] * out[k].weights;
    merged.bias += coeffs[static_cast<Eigen::Index>(k)] * out[k].bias;
  }
  layers.back() = GadgetLayer{std::move(merged)};
  return GadgetNet(net.input_dim(), std::move(layers));
}

GadgetNet precompose(const GadgetNet& net, const Matrix& A, const VectorRef& c) {
  require(static_cast<std::size_t>(A.rows()) == net.input_dim() && c.size() == A.rows(),
          "precompose: affine map does not match the network input");
  auto layers = net.layers();
  for (auto& n : layers.front()) {
    n.bias += n.weights.dot(c);
    n.weights = A.transpose() * n.weights;
  }
  return GadgetNet(static_cast<std::size_t>(A.cols()), std::move(layers));
}

GadgetNet expand_to_sigma2(const PolyNet& net) {
  GadgetBuilder b(net.dim());
  using Form = GadgetBuilder::Form;
  // Stage 1.
  std::vector<std::vector<Form>> parts;
  const bool has_linear = net.direct_term().squaredNorm() > 0.0;
  Form lin = has_linear ? b.carry(b.input_affine(net.direct_term(), 0.0)) : Form{};
  for (const auto& n : net.neurons()) {
    const auto& g = n.basis;
    auto dir = [&](int j) { return b.input_affine(g.direction(j), 0.0); };
    switch (g.degree()) {
      case 1:
        parts.push_back({b.carry(dir(0))});
        break;
      case 2:
        parts.push_back({b.square(dir(0))});
        break;
      default:
        parts.push_back({b.product(dir(0), dir(1)), b.carry(dir(2))});
        break;
    }
  }
  const bool any = has_linear || !net.neurons().empty();
  if (!any) {
    // Constant function: output bias only, over the raw input.
    return b.finish({Form{0, {}, net.bias()}});
  }
  b.commit();
  // Stage 2.
  if (has_linear) lin = b.carry(lin);
  std::vector<Form> second;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& p = parts[i];
    if (p.size() == 2) {
      second.push_back(b.product(p[0], p[1]));
    } else {
      second.push_back(b.carry(p[0]));
    }
  }
  b.commit();
  Form out{b.stage(), {}, net.bias()};
  if (has_linear) out = GadgetBuilder::sum(out, lin);
  for (std::size_t i = 0; i < second.size(); ++i) {
    out = GadgetBuilder::sum(out, second[i].scaled(net.neurons()[i].alpha));
  }
  return b.finish({out});
}

}  // namespace geco
