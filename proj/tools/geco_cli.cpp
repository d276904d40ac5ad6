#include "geco/approx.hpp"
#include "geco/baseline.hpp"
#include "geco/data.hpp"
#include "geco/geco2.hpp"
#include "geco/geco3.hpp"
#include "geco/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

// Typed flags whose values are merged over config-file values, which are
// merged over defaults. Only flags given on the command line override.
class FlagSet {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto store = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *store, help);
    entries_.push_back({opt, [store, key](json& j) { j[key] = *store; }});
    return opt;
  }

  CLI::Option* add_switch(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto store = std::make_shared<bool>(false);
    CLI::Option* opt = app->add_flag(flag, *store, help);
    entries_.push_back({opt, [store, key](json& j) { j[key] = *store; }});
    return opt;
  }

  void apply(json& params) const {
    for (const auto& e : entries_) {
      if (e.opt->count() > 0) e.set(params);
    }
  }

 private:
  struct Entry {
    CLI::Option* opt;
    std::function<void(json&)> set;
  };
  std::vector<Entry> entries_;
};

json merge_params(json defaults, const std::string& config_path, const FlagSet& flags) {
  if (!config_path.empty()) {
    json cfg = geco::read_json(config_path);
    // A metadata file from an earlier run is accepted as a config.
    if (cfg.contains("parameters")) cfg = cfg.at("parameters");
    if (!cfg.is_object()) throw std::invalid_argument("config " + config_path + " must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      if (!defaults.contains(key)) throw std::invalid_argument("config " + config_path + ": unknown key '" + key + "'");
      defaults[key] = value;
    }
  }
  flags.apply(defaults);
  return defaults;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw std::invalid_argument("--out is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::invalid_argument("cannot create output directory " + dir);
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw std::invalid_argument(std::string(what) + " path is required");
  if (!fs::exists(path)) throw std::invalid_argument(std::string(what) + " not found: " + path);
}

std::string emit_extension(const std::string& emit) {
  if (emit == "csv") return "csv";
  if (emit == "tikz-coords") return "tikz";
  if (emit == "json") return "json";
  throw std::invalid_argument("--emit must be csv, tikz-coords or json, got '" + emit + "'");
}

json standardizer_json(const geco::Standardizer& s) {
  return {{"mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size())},
          {"scale", std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size())}};
}

geco::Standardizer standardizer_from_json(const json& j) {
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto scale = j.at("scale").get<std::vector<double>>();
  geco::Standardizer s;
  s.mean = Eigen::Map<const geco::Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  s.scale = Eigen::Map<const geco::Vector>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  return s;
}

// ---------------------------------------------------------------------------
// train

json train_defaults() {
  const geco::TrainConfig tc;
  const geco::TensorConfig tt;
  const geco::SgdConfig sc;
  return {{"data", ""},
          {"eval_data", ""},
          {"seed", 0},
          {"loss", "squared"},
          {"emit", "csv"},
          {"label_col", -1},
          {"standardize", false},
          {"r", tc.r},
          {"k", tc.k},
          {"epsilon", tc.epsilon},
          {"eigen_tol", tc.eigen_tol},
          {"refit_tol", tc.refit_tol},
          {"tau", tt.tau},
          {"delta", tt.delta},
          {"restarts", 0},
          {"hidden", 40},
          {"activation", "squared"},
          {"lr", sc.lr},
          {"decay", sc.decay},
          {"batch", sc.batch},
          {"momentum", sc.momentum},
          {"iterations", sc.iterations},
          {"eval_every", sc.eval_every},
          {"init_scale", sc.init_scale}};
}

int run_train(const std::string& algo, const json& p, const std::string& out) {
  if (algo != "geco2" && algo != "geco3" && algo != "sgd") {
    throw std::invalid_argument("train: algorithm must be geco2, geco3 or sgd, got '" + algo + "'");
  }
  const std::string data_path = p.at("data").get<std::string>();
  require_file(data_path, "dataset");
  const std::string eval_path = p.at("eval_data").get<std::string>();
  if (!eval_path.empty()) require_file(eval_path, "evaluation dataset");
  const std::string ext = emit_extension(p.at("emit").get<std::string>());
  ensure_dir(out);

  const int label_col = p.at("label_col").get<int>();
  geco::Dataset data = geco::load_csv(data_path, label_col);
  std::optional<geco::Dataset> eval;
  if (!eval_path.empty()) eval = geco::load_csv(eval_path, label_col);
  const geco::LossFn loss = geco::LossFn::parse(p.at("loss").get<std::string>());
  if (loss.kind() == geco::LossKind::logistic && data.kind != geco::LabelKind::binary) {
    throw std::invalid_argument("logistic loss needs labels in {-1, +1}");
  }
  std::optional<geco::Standardizer> standardizer;
  if (p.at("standardize").get<bool>()) {
    standardizer = geco::Standardizer::fit(data);
    data = standardizer->apply(data);
    if (eval) eval = standardizer->apply(*eval);
  }

  const auto seed = p.at("seed").get<std::uint64_t>();
  const double tau = p.at("tau").get<double>();
  const double beta = loss.beta();
  const auto k = p.at("k").get<std::size_t>();
  const double epsilon = p.at("epsilon").get<double>();

  json meta;
  meta["command"] = "train";
  meta["algorithm"] = algo;
  meta["parameters"] = p;
  meta["dataset"] = {{"m", data.size()}, {"d", data.dim()},
                     {"label_kind", data.kind == geco::LabelKind::binary ? "binary" : "regression"}};
  meta["theorem_budget"] = {{"beta", beta},
                            {"k", k},
                            {"epsilon", epsilon},
                            {"d", data.dim()},
                            {"tau", tau},
                            {"depth2_bound", geco::geco2_theorem_bound(beta, k, epsilon)},
                            {"depth2_iterations", geco::iterations_exceeding(geco::geco2_theorem_bound(beta, k, epsilon))},
                            {"depth3_bound", geco::geco3_theorem_bound(data.dim(), beta, k, epsilon, tau)},
                            {"depth3_iterations",
                             geco::iterations_exceeding(geco::geco3_theorem_bound(data.dim(), beta, k, epsilon, tau))}};
  if (standardizer) meta["standardizer"] = standardizer_json(*standardizer);

  json model;
  std::string trace_text;
  if (algo == "sgd") {
    geco::SgdConfig sc;
    sc.lr = p.at("lr").get<double>();
    sc.decay = p.at("decay").get<double>();
    sc.batch = p.at("batch").get<std::size_t>();
    sc.momentum = p.at("momentum").get<double>();
    sc.iterations = p.at("iterations").get<std::size_t>();
    sc.eval_every = p.at("eval_every").get<std::size_t>();
    sc.init_scale = p.at("init_scale").get<double>();
    sc.seed = geco::derive_seed(seed, 1);
    sc.validate();
    const auto act = geco::parse_activation(p.at("activation").get<std::string>());
    const auto hidden = p.at("hidden").get<std::size_t>();
    std::vector<std::size_t> widths;
    if (hidden > 0) widths.push_back(hidden);
    const geco::MlpNet init = geco::MlpNet::random(data.dim(), widths, act, geco::derive_seed(seed, 0), sc.init_scale);
    const geco::SgdResult res = geco::sgd_train(init, data, loss, sc, eval ? &*eval : nullptr);
    model = geco::to_json(res.net);
    if (ext == "csv") {
      trace_text = geco::sgd_csv(res.trace, res.error_kind);
    } else if (ext == "tikz") {
      trace_text = geco::sgd_tikz(res.trace);
    } else {
      json pts = json::array();
      for (const auto& q : res.trace) pts.push_back({{"iteration", q.iteration}, {"error", q.error}});
      trace_text = json{{"error_kind", res.error_kind}, {"trace", pts}}.dump(2) + "\n";
    }
    meta["final_error"] = res.trace.empty() ? json(nullptr) : json(res.trace.back().error);
    meta["error_kind"] = res.error_kind;
  } else {
    geco::TrainConfig tc;
    tc.r = p.at("r").get<std::size_t>();
    tc.k = k;
    tc.epsilon = epsilon;
    tc.eigen_tol = p.at("eigen_tol").get<double>();
    tc.refit_tol = p.at("refit_tol").get<double>();
    tc.seed = seed;
    geco::TrainResult res = [&] {
      if (algo == "geco2") return geco::geco2_train(data, loss, tc);
      geco::TensorConfig tt;
      tt.tau = tau;
      tt.delta = p.at("delta").get<double>();
      const auto restarts = p.at("restarts").get<std::size_t>();
      if (restarts > 0) tt.restarts_override = restarts;
      tt.seed = geco::derive_seed(seed, 7);
      meta["restarts_per_step"] = tt.restart_count(data.dim());
      return geco::geco3_train(data, loss, tc, tt);
    }();
    model = geco::to_json(res.net);
    if (ext == "csv") {
      trace_text = geco::trace_csv(res.trace, algo == "geco3");
    } else if (ext == "tikz") {
      trace_text = geco::trace_tikz(res.trace);
    } else {
      trace_text = geco::trace_json(res.trace).dump(2) + "\n";
    }
    meta["final_risk"] = res.trace.records.back().risk;
    meta["neurons"] = res.net.neurons().size();
    meta["stopped_early"] = res.trace.stopped_early;
    if (eval) meta["eval_risk"] = geco::empirical_risk(res.net, *eval, loss);
  }
  if (standardizer) model["standardizer"] = standardizer_json(*standardizer);

  geco::write_json(path_in(out, "model.json"), model);
  geco::write_text(path_in(out, "trace." + ext), trace_text);
  geco::write_json(path_in(out, "metadata.json"), meta);
  std::cout << "wrote " << path_in(out, "model.json") << ", " << path_in(out, "trace." + ext) << ", "
            << path_in(out, "metadata.json") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

int run_eval(const std::string& model_path, const std::string& data_path, int label_col, const std::string& loss_name,
             const std::string& out) {
  require_file(model_path, "model");
  require_file(data_path, "dataset");
  const json model = geco::read_json(model_path);
  geco::Dataset data = geco::load_csv(data_path, label_col);
  if (model.contains("standardizer")) data = standardizer_from_json(model.at("standardizer")).apply(data);
  const geco::LossFn loss = geco::LossFn::parse(loss_name);
  geco::Vector pred;
  std::string kind;
  if (model.value("type", "") == "mlp") {
    pred = geco::mlpnet_from_json(model).forward_rows(data.X);
    kind = "mlp";
  } else {
    pred = geco::polynet_from_json(model).evaluate_rows(data.X);
    kind = "polynet";
  }
  json rep{{"model", model_path}, {"model_type", kind}, {"m", data.size()},
           {"risk", geco::empirical_risk(pred, data.y, loss)}, {"loss", loss.name()}};
  if (data.kind == geco::LabelKind::binary) {
    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
      if ((pred[i] >= 0.0 ? 1.0 : -1.0) != data.y[i]) ++wrong;
    }
    rep["classification_error"] = static_cast<double>(wrong) / static_cast<double>(data.size());
  }
  if (!out.empty()) {
    ensure_dir(out);
    geco::write_json(path_in(out, "eval.json"), rep);
  }
  std::cout << rep.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// experiment

json experiment_defaults() {
  const geco::SgdConfig sc;
  return {{"seed", 0},
          {"emit", "csv"},
          {"d", 10},
          {"m", 30},
          {"hidden", 30},
          {"activation", "sigmoid"},
          {"trials", 1},
          {"tau", 0.5},
          {"delta", 0.1},
          {"grid_step", 1.0},
          {"epsilon", 0.1},
          {"L", 3.0},
          {"teacher_width", 60},
          {"factors", std::vector<std::size_t>{1, 2, 4, 8}},
          {"seeds", 1},
          {"m_train", 4000},
          {"m_test", 1000},
          {"threshold_factor", 1.5},
          {"lr", sc.lr},
          {"decay", sc.decay},
          {"batch", sc.batch},
          {"momentum", sc.momentum},
          {"iterations", sc.iterations},
          {"eval_every", sc.eval_every},
          {"init_scale", sc.init_scale}};
}

int run_experiment(const std::string& name, const json& p, const std::string& out) {
  const std::string ext = emit_extension(p.at("emit").get<std::string>());
  const auto seed = p.at("seed").get<std::uint64_t>();
  json report{{"experiment", name}, {"parameters", p}};
  int status = kExitOk;

  if (name == "overspec") {
    ensure_dir(out);
    const auto trials = p.at("trials").get<std::size_t>();
    geco::require(trials >= 1, "trials must be at least 1");
    const auto act = geco::parse_activation(p.at("activation").get<std::string>());
    json runs = json::array();
    std::size_t full_rank = 0;
    double worst_risk = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto r = geco::overspec_experiment(p.at("d").get<std::size_t>(), p.at("m").get<std::size_t>(),
                                               p.at("hidden").get<std::size_t>(), act, geco::derive_seed(seed, t));
      runs.push_back({{"rank", r.rank},
                      {"risk", r.risk},
                      {"rank_deficient", r.rank_deficient},
                      {"sigma_max", r.sigma_max},
                      {"sigma_min", r.sigma_min}});
      if (!r.rank_deficient) ++full_rank;
      worst_risk = std::max(worst_risk, r.risk);
    }
    report["trials"] = runs;
    report["rank"] = runs.front().at("rank");
    report["risk"] = runs.front().at("risk");
    report["full_rank_trials"] = full_rank;
    report["max_risk"] = worst_risk;
  } else if (name == "tensor-ratio") {
    ensure_dir(out);
    const auto r = geco::tensor_ratio_experiment(p.at("d").get<std::size_t>(), p.at("m").get<std::size_t>(),
                                                 p.at("tau").get<double>(), p.at("delta").get<double>(),
                                                 p.at("trials").get<std::size_t>(), seed, p.at("grid_step").get<double>());
    report.update(geco::to_json(r));
  } else if (name == "sigmoid-approx") {
    ensure_dir(out);
    const auto s = geco::fit_sigmoid_poly(p.at("epsilon").get<double>(), p.at("L").get<double>());
    report.update(s.to_json());
    report["lemma_degree"] = geco::lemma_degree(s.epsilon, s.L);
    report["grid_points"] = geco::kSigmoidGridPoints;
    geco::write_json(path_in(out, "sigmoid.json"), s.to_json());
  } else if (name == "overspec-sweep") {
    ensure_dir(out);
    geco::OverspecSweepConfig sc;
    sc.d = p.at("d").get<std::size_t>();
    sc.teacher_width = p.at("teacher_width").get<std::size_t>();
    sc.factors = p.at("factors").get<std::vector<std::size_t>>();
    sc.m_train = p.at("m_train").get<std::size_t>();
    sc.m_test = p.at("m_test").get<std::size_t>();
    sc.threshold_factor = p.at("threshold_factor").get<double>();
    const auto n_seeds = p.at("seeds").get<std::size_t>();
    geco::require(n_seeds >= 1, "seeds must be at least 1");
    sc.seeds.clear();
    for (std::size_t s = 0; s < n_seeds; ++s) sc.seeds.push_back(geco::derive_seed(seed, s));
    sc.sgd.lr = p.at("lr").get<double>();
    sc.sgd.decay = p.at("decay").get<double>();
    sc.sgd.batch = p.at("batch").get<std::size_t>();
    sc.sgd.momentum = p.at("momentum").get<double>();
    sc.sgd.iterations = p.at("iterations").get<std::size_t>();
    sc.sgd.eval_every = p.at("eval_every").get<std::size_t>();
    sc.sgd.init_scale = p.at("init_scale").get<double>();
    const auto res = geco::overspec_sweep(sc);
    json medians = json::array();
    for (double v : res.median_iterations) medians.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    report["factors"] = res.factors;
    report["widths"] = res.widths;
    report["median_iterations_to_threshold"] = medians;
    report["error_kind"] = res.error_kind;
    json runs = json::array();
    for (const auto& run : res.runs) {
      json its = json::array();
      for (auto h : run.iterations_to_threshold) its.push_back(h == geco::kNeverReached ? json(nullptr) : json(h));
      runs.push_back({{"seed", run.seed}, {"threshold", run.threshold}, {"iterations_to_threshold", its}});
    }
    report["runs"] = runs;
    // Traces of the first seed, one file per factor.
    const auto& first = res.runs.front();
    for (std::size_t fi = 0; fi < res.factors.size(); ++fi) {
      const std::string base = "trace_factor" + std::to_string(res.factors[fi]);
      if (ext == "json") {
        json pts = json::array();
        for (const auto& q : first.traces[fi]) pts.push_back({{"iteration", q.iteration}, {"error", q.error}});
        geco::write_json(path_in(out, base + ".json"), pts);
      } else {
        geco::write_text(path_in(out, base + ".csv"), geco::sgd_csv(first.traces[fi], res.error_kind));
      }
      geco::write_text(path_in(out, base + ".tikz"), geco::sgd_tikz(first.traces[fi]));
    }
  } else {
    throw std::invalid_argument("experiment must be overspec, overspec-sweep, tensor-ratio or sigmoid-approx, got '" +
                                name + "'");
  }
  geco::write_json(path_in(out, "report.json"), report);
  std::cout << "wrote " << path_in(out, "report.json") << "\n";
  return status;
}

// ---------------------------------------------------------------------------
// approx

int run_approx(const json& p, const std::string& net_path, const std::string& out) {
  const auto bounds = geco::theorem4_bounds(p.at("t").get<int>(), p.at("L").get<double>(), p.at("epsilon").get<double>());
  json rep{{"bounds", bounds.to_json()}, {"lemma_degree", geco::lemma_degree(bounds.epsilon, bounds.L)}};
  const auto degree = p.at("degree").get<int>();
  const auto poly = geco::fit_sigmoid_poly(bounds.epsilon, bounds.L, degree > 0 ? std::optional<int>(degree) : std::nullopt);
  rep["polynomial"] = poly.to_json();
  if (!net_path.empty()) {
    require_file(net_path, "sigmoid network");
    const json j = geco::read_json(net_path);
    geco::SigmoidNet f;
    const auto W = j.at("W").get<std::vector<std::vector<double>>>();
    geco::require(!W.empty() && !W[0].empty(), "sigmoid network: empty W");
    f.W.resize(static_cast<Eigen::Index>(W.size()), static_cast<Eigen::Index>(W[0].size()));
    for (std::size_t i = 0; i < W.size(); ++i) {
      geco::require(W[i].size() == W[0].size(), "sigmoid network: ragged W");
      for (std::size_t c = 0; c < W[i].size(); ++c) f.W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = W[i][c];
    }
    const auto b = j.at("b").get<std::vector<double>>();
    const auto v = j.at("v").get<std::vector<double>>();
    f.b = Eigen::Map<const geco::Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
    f.v = Eigen::Map<const geco::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    f.output_bias = j.value("output_bias", 0.0);
    const auto res = geco::compress_sigmoid_net(f, bounds.L, bounds.epsilon, p.at("seed").get<std::uint64_t>());
    rep["compression"] = res.report.to_json();
  }
  if (!out.empty()) {
    ensure_dir(out);
    geco::write_json(path_in(out, "approx.json"), rep);
  }
  std::cout << rep.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// generate

int run_generate(const std::string& kind, const json& p, const std::string& out) {
  if (out.empty()) throw std::invalid_argument("--out is required");
  const auto d = p.at("d").get<std::size_t>();
  const auto m = p.at("m").get<std::size_t>();
  const auto seed = p.at("seed").get<std::uint64_t>();
  const double noise = p.at("noise").get<double>();
  json teacher;
  geco::Dataset data;
  if (kind == "p2k") {
    auto g = geco::gen_teacher_p2k(d, p.at("k").get<std::size_t>(), m, seed, noise);
    data = std::move(g.data);
    teacher = geco::to_json(g.teacher);
  } else if (kind == "mlp") {
    auto g = geco::gen_teacher_mlp(d, p.at("width").get<std::size_t>(),
                                   geco::parse_activation(p.at("activation").get<std::string>()), m, seed,
                                   p.at("binary").get<bool>());
    data = std::move(g.data);
    teacher = geco::to_json(g.teacher);
  } else if (kind == "cubic") {
    geco::require(d >= 3, "cubic teacher needs d >= 3");
    std::vector<geco::Vector> dirs;
    for (int j = 0; j < 3; ++j) dirs.push_back(geco::Vector::Unit(static_cast<Eigen::Index>(d), j));
    geco::PolyNet net(d);
    net.add_neuron(1.0, geco::BasisFunction::from_directions(3, dirs));
    data = geco::sample_from_teacher(net, m, seed, noise);
    teacher = geco::to_json(net);
  } else {
    throw std::invalid_argument("generate: kind must be p2k, mlp or cubic, got '" + kind + "'");
  }
  const fs::path target(out);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  geco::save_csv(data, out);
  geco::write_json(out + ".teacher.json", teacher);
  std::cout << "wrote " << out << " (m=" << data.size() << ", d=" << data.dim() << ")\n";
  return kExitOk;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Greedy training of polynomial networks, baselines and approximation tools"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // train
  auto* train = app.add_subcommand("train", "train geco2, geco3 or sgd on a CSV dataset");
  std::string algo;
  std::string train_out;
  std::string train_config;
  FlagSet tf;
  train->add_option("algorithm", algo, "geco2 | geco3 | sgd")->required();
  train->add_option("--out", train_out, "output directory");
  train->add_option("--config", train_config, "JSON config (or metadata of an earlier run)");
  tf.add<std::string>(train, "--data", "data", "training CSV");
  tf.add<std::string>(train, "--eval-data", "eval_data", "evaluation CSV (sgd traces, geco eval risk)");
  tf.add<std::uint64_t>(train, "--seed", "seed", "random seed");
  tf.add<std::string>(train, "--loss", "loss", "squared | logistic");
  tf.add<std::string>(train, "--emit", "emit", "trace format: csv | tikz-coords | json");
  tf.add<int>(train, "--label-col", "label_col", "0-based label column, negative counts from the end");
  tf.add_switch(train, "--standardize", "standardize", "standardize features with training statistics");
  tf.add<std::size_t>(train, "--r", "r", "greedy iterations");
  tf.add<std::size_t>(train, "--k", "k", "comparator size for the reported budget");
  tf.add<double>(train, "--epsilon", "epsilon", "accuracy for the reported budget");
  tf.add<double>(train, "--eigen-tol", "eigen_tol", "relative eigensolver tolerance");
  tf.add<double>(train, "--refit-tol", "refit_tol", "refit gradient tolerance (logistic)");
  tf.add<double>(train, "--tau", "tau", "singular-pair gap (geco3)");
  tf.add<double>(train, "--delta", "delta", "failure probability per step (geco3)");
  tf.add<std::size_t>(train, "--restarts", "restarts", "override restart count (geco3; 0 = formula)");
  tf.add<std::size_t>(train, "--hidden", "hidden", "hidden width (sgd; 0 = linear)");
  tf.add<std::string>(train, "--activation", "activation", "squared | relu | sigmoid | identity (sgd)");
  tf.add<double>(train, "--lr", "lr", "learning rate (sgd)");
  tf.add<double>(train, "--decay", "decay", "learning-rate decay (sgd)");
  tf.add<std::size_t>(train, "--batch", "batch", "mini-batch size (sgd)");
  tf.add<double>(train, "--momentum", "momentum", "Nesterov momentum (sgd)");
  tf.add<std::size_t>(train, "--iterations", "iterations", "SGD iterations");
  tf.add<std::size_t>(train, "--eval-every", "eval_every", "trace spacing (sgd)");
  tf.add<double>(train, "--init-scale", "init_scale", "initial weight scale (sgd)");

  // eval
  auto* evalc = app.add_subcommand("eval", "evaluate a saved model on a CSV dataset");
  std::string model_path;
  std::string eval_data;
  std::string eval_out;
  std::string eval_loss = "squared";
  int eval_label = -1;
  evalc->add_option("--model", model_path, "model JSON")->required();
  evalc->add_option("--data", eval_data, "CSV dataset")->required();
  evalc->add_option("--loss", eval_loss, "squared | logistic");
  evalc->add_option("--label-col", eval_label, "0-based label column");
  evalc->add_option("--out", eval_out, "output directory");

  // experiment
  auto* exp = app.add_subcommand("experiment", "overspec | overspec-sweep | tensor-ratio | sigmoid-approx");
  std::string exp_name;
  std::string exp_out;
  std::string exp_config;
  FlagSet ef;
  exp->add_option("name", exp_name, "experiment name")->required();
  exp->add_option("--out", exp_out, "output directory");
  exp->add_option("--config", exp_config, "JSON config");
  ef.add<std::uint64_t>(exp, "--seed", "seed", "random seed");
  ef.add<std::string>(exp, "--emit", "emit", "csv | tikz-coords | json");
  ef.add<std::size_t>(exp, "--d", "d", "input dimension");
  ef.add<std::size_t>(exp, "--m", "m", "examples");
  ef.add<std::size_t>(exp, "--hidden", "hidden", "hidden units (overspec)");
  ef.add<std::string>(exp, "--activation", "activation", "hidden activation (overspec)");
  ef.add<std::size_t>(exp, "--trials", "trials", "independent trials");
  ef.add<double>(exp, "--tau", "tau", "singular-pair gap (tensor-ratio)");
  ef.add<double>(exp, "--delta", "delta", "failure probability (tensor-ratio)");
  ef.add<double>(exp, "--grid-step", "grid_step", "oracle grid step in degrees (tensor-ratio)");
  ef.add<double>(exp, "--epsilon", "epsilon", "target accuracy (sigmoid-approx)");
  ef.add<double>(exp, "--L", "L", "weight bound, domain |x| <= 4L (sigmoid-approx)");
  ef.add<std::size_t>(exp, "--teacher-width", "teacher_width", "teacher hidden units (overspec-sweep)");
  ef.add<std::vector<std::size_t>>(exp, "--factors", "factors", "over-specification factors (overspec-sweep)")
      ->delimiter(',');
  ef.add<std::size_t>(exp, "--seeds", "seeds", "number of seeds (overspec-sweep)");
  ef.add<std::size_t>(exp, "--m-train", "m_train", "training examples (overspec-sweep)");
  ef.add<std::size_t>(exp, "--m-test", "m_test", "test examples (overspec-sweep)");
  ef.add<double>(exp, "--threshold-factor", "threshold_factor", "threshold relative to widest final error");
  ef.add<double>(exp, "--lr", "lr", "learning rate");
  ef.add<double>(exp, "--decay", "decay", "learning-rate decay");
  ef.add<std::size_t>(exp, "--batch", "batch", "mini-batch size");
  ef.add<double>(exp, "--momentum", "momentum", "Nesterov momentum");
  ef.add<std::size_t>(exp, "--iterations", "iterations", "SGD iterations");
  ef.add<std::size_t>(exp, "--eval-every", "eval_every", "trace spacing");
  ef.add<double>(exp, "--init-scale", "init_scale", "initial weight scale");

  // approx
  auto* apx = app.add_subcommand("approx", "sigmoid polynomial, depth/size bounds, optional network compression");
  std::string apx_out;
  std::string apx_net;
  std::string apx_config;
  FlagSet af;
  apx->add_option("--out", apx_out, "output directory");
  apx->add_option("--net", apx_net, "sigmoid network JSON {W, b, v, output_bias} to compress");
  apx->add_option("--config", apx_config, "JSON config");
  af.add<int>(apx, "--t", "t", "network depth");
  af.add<double>(apx, "--L", "L", "weight bound");
  af.add<double>(apx, "--epsilon", "epsilon", "target accuracy");
  af.add<int>(apx, "--degree", "degree", "interpolation degree override (0 = lemma degree)");
  af.add<std::uint64_t>(apx, "--seed", "seed", "seed for the compression check points");

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic teacher dataset: p2k | mlp | cubic");
  std::string gen_kind;
  std::string gen_out;
  FlagSet gf;
  gen->add_option("kind", gen_kind, "p2k | mlp | cubic")->required();
  gen->add_option("--out", gen_out, "CSV path (teacher written to <out>.teacher.json)");
  gf.add<std::size_t>(gen, "--d", "d", "input dimension");
  gf.add<std::size_t>(gen, "--k", "k", "teacher neurons (p2k)");
  gf.add<std::size_t>(gen, "--m", "m", "examples");
  gf.add<std::uint64_t>(gen, "--seed", "seed", "random seed");
  gf.add<double>(gen, "--noise", "noise", "label noise standard deviation");
  gf.add<std::size_t>(gen, "--width", "width", "teacher width (mlp)");
  gf.add<std::string>(gen, "--activation", "activation", "teacher activation (mlp)");
  gf.add_switch(gen, "--binary", "binary", "sign labels (mlp)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (train->parsed()) return run_train(algo, merge_params(train_defaults(), train_config, tf), train_out);
  if (evalc->parsed()) return run_eval(model_path, eval_data, eval_label, eval_loss, eval_out);
  if (exp->parsed()) return run_experiment(exp_name, merge_params(experiment_defaults(), exp_config, ef), exp_out);
  if (apx->parsed()) {
    const json defaults{{"t", 1}, {"L", 3.0}, {"epsilon", 0.1}, {"degree", 0}, {"seed", 0}};
    return run_approx(merge_params(defaults, apx_config, af), apx_net, apx_out);
  }
  if (gen->parsed()) {
    const json defaults{{"d", 20},  {"k", 3},          {"m", 1000},         {"seed", 0},
                        {"noise", 0.0}, {"width", 60}, {"activation", "relu"}, {"binary", false}};
    return run_generate(gen_kind, merge_params(defaults, "", gf), gen_out);
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const geco::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad parameter value: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
