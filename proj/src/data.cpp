#include "geco/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace geco {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

}  // namespace

LabelKind detect_label_kind(const Vector& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 1.0 && y[i] != -1.0) return LabelKind::regression;
  }
  return LabelKind::binary;
}

Dataset make_dataset(RowMatrix X, Vector y, std::vector<std::string> feature_names) {
  require(X.rows() >= 1 && X.cols() >= 1, "dataset needs at least one example and one feature");
  require(X.rows() == y.size(), "dataset: label count differs from example count");
  require(X.allFinite() && y.allFinite(), "dataset: entries must be finite");
  require(feature_names.empty() || feature_names.size() == static_cast<std::size_t>(X.cols()),
          "dataset: feature name count differs from feature count");
  Dataset d;
  d.kind = detect_label_kind(y);
  d.X = std::move(X);
  d.y = std::move(y);
  d.feature_names = std::move(feature_names);
  return d;
}

Dataset parse_csv(const std::string& text, int label_col) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::size_t width = 0;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view lv = trim(line);
    if (lv.empty()) continue;
    const auto cells = split_cells(lv);
    if (rows.empty() && header.empty()) {
      const bool any_numeric =
          std::any_of(cells.begin(), cells.end(), [](std::string_view c) { return parse_number(c).has_value(); });
      if (!any_numeric) {
        for (auto c : cells) header.emplace_back(trim(c));
        width = cells.size();
        continue;
      }
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw std::invalid_argument("CSV parse error: row " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
    }
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw std::invalid_argument("CSV parse error: row " + std::to_string(line_no) + ", column " +
                                    std::to_string(c + 1) + ": '" + std::string(trim(cells[c])) +
                                    "' is not a finite number");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("CSV parse error: no data rows");
  if (width < 2) throw std::invalid_argument("CSV parse error: need at least one feature and a label column");

  const int w = static_cast<int>(width);
  const int lc = label_col < 0 ? w + label_col : label_col;
  if (lc < 0 || lc >= w) {
    throw std::invalid_argument("label column " + std::to_string(label_col) + " out of range for " +
                                std::to_string(width) + " columns");
  }
  RowMatrix X(static_cast<Eigen::Index>(rows.size()), w - 1);
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::Index j = 0;
    for (int c = 0; c < w; ++c) {
      const double v = rows[i][static_cast<std::size_t>(c)];
      if (c == lc) {
        y[static_cast<Eigen::Index>(i)] = v;
      } else {
        X(static_cast<Eigen::Index>(i), j++) = v;
      }
    }
  }
  std::vector<std::string> names;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (c != lc) names.push_back(header[static_cast<std::size_t>(c)]);
  }
  return make_dataset(std::move(X), std::move(y), std::move(names));
}

Dataset load_csv(const std::string& path, int label_col) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open dataset file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  if (trim(text).empty()) throw std::invalid_argument("CSV parse error: empty file " + path);
  return parse_csv(text, label_col);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write " + path);
  if (!data.feature_names.empty()) {
    for (const auto& n : data.feature_names) f << n << ',';
    f << "label\n";
  }
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) f << format_double(data.X(i, j)) << ',';
    f << format_double(data.y[i]) << '\n';
  }
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows) {
  RowMatrix X(static_cast<Eigen::Index>(rows.size()), data.X.cols());
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < data.size(), "subset: row index out of range");
    X.row(static_cast<Eigen::Index>(i)) = data.X.row(static_cast<Eigen::Index>(rows[i]));
    y[static_cast<Eigen::Index>(i)] = data.y[static_cast<Eigen::Index>(rows[i])];
  }
  Dataset out;
  out.X = std::move(X);
  out.y = std::move(y);
  out.kind = data.kind;
  out.feature_names = data.feature_names;
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t m, double train_fraction,
                                                                            std::uint64_t seed) {
  require(train_fraction >= 0.0 && train_fraction <= 1.0, "split: train fraction must lie in [0, 1]");
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(m)));
  std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  auto [tr, te] = split_indices(data.size(), train_fraction, seed);
  return {subset(data, tr), subset(data, te)};
}

Standardizer Standardizer::fit(const Dataset& train) {
  Standardizer s;
  s.mean = train.X.colwise().mean().transpose();
  s.scale = Vector::Ones(train.X.cols());
  for (Eigen::Index j = 0; j < train.X.cols(); ++j) {
    const double var = (train.X.col(j).array() - s.mean[j]).square().mean();
    if (var > 0.0) s.scale[j] = std::sqrt(var);
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& data) const {
  require(data.X.cols() == mean.size(), "Standardizer: dimension mismatch");
  Dataset out = data;
  for (Eigen::Index j = 0; j < out.X.cols(); ++j) {
    out.X.col(j) = (out.X.col(j).array() - mean[j]) / scale[j];
  }
  return out;
}

namespace {

RowMatrix gaussian_inputs(std::size_t m, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix X(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = normal(rng);
  }
  return X;
}

}  // namespace

Dataset sample_from_teacher(const PolyNet& teacher, std::size_t m, std::uint64_t seed, double noise_sd) {
  require(m >= 1, "sample_from_teacher: need at least one example");
  require(noise_sd >= 0.0, "sample_from_teacher: noise must be non-negative");
  std::mt19937_64 rng(seed);
  RowMatrix X = gaussian_inputs(m, teacher.dim(), rng);
  Vector y = teacher.evaluate_rows(X);
  if (noise_sd > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sd);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += noise(rng);
  }
  return make_dataset(std::move(X), std::move(y));
}

TeacherData gen_teacher_p2k(std::size_t d, std::size_t k, std::size_t m, std::uint64_t seed, double noise_sd) {
  require(d >= 1, "gen_teacher_p2k: d must be positive");
  require(k >= 1, "gen_teacher_p2k: k must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  PolyNet teacher(d);
  teacher.set_bias(0.1 * unit(rng));
  Vector w0(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < w0.size(); ++j) w0[j] = 0.1 * normal(rng);
  teacher.set_direct_term(w0);
  for (std::size_t i = 0; i < k; ++i) {
    Vector w(static_cast<Eigen::Index>(d));
    for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = normal(rng);
    const double alpha = unit(rng);
    teacher.add_neuron(alpha, BasisFunction::square(std::move(w)));
  }
  Dataset data = sample_from_teacher(teacher, m, rng(), noise_sd);
  return {std::move(data), std::move(teacher)};
}

MlpTeacherData gen_teacher_mlp(std::size_t d, std::size_t width, HiddenActivation activation, std::size_t m,
                               std::uint64_t seed, bool binary) {
  require(width >= 1, "gen_teacher_mlp: width must be positive");
  require(m >= 1, "gen_teacher_mlp: need at least one example");
  std::mt19937_64 rng(seed);
  MlpNet teacher = MlpNet::random(d, {width}, activation, rng());
  RowMatrix X = gaussian_inputs(m, d, rng);
  Vector y = teacher.forward_rows(X);
  if (binary) y = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
  Dataset data = make_dataset(std::move(X), std::move(y));
  if (!binary) data.kind = LabelKind::regression;
  return {std::move(data), std::move(teacher)};
}

}  // namespace geco
