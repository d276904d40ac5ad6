#pragma once

#include "geco/common.hpp"
#include "geco/mlp.hpp"
#include "geco/net.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geco {

enum class LabelKind { regression, binary };

struct Dataset {
  RowMatrix X;  // m x d
  Vector y;
  LabelKind kind = LabelKind::regression;
  std::vector<std::string> feature_names;  // empty or one per column

  std::size_t size() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(X.cols()); }
};

// Validates shape and finiteness and tags the labels (binary iff all in {-1, 1}).
Dataset make_dataset(RowMatrix X, Vector y, std::vector<std::string> feature_names = {});
LabelKind detect_label_kind(const Vector& y);

// Comma-separated table; a first line with no numeric cells is a header.
// label_col is 0-based, negative values count from the end; default last.
Dataset load_csv(const std::string& path, int label_col = -1);
Dataset parse_csv(const std::string& text, int label_col = -1);
void save_csv(const Dataset& data, const std::string& path);
std::string format_double(double v);  // shortest round-trip decimal

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows);
// Seeded shuffle, first round(train_fraction * m) indices to train.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t m, double train_fraction,
                                                                            std::uint64_t seed);
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed);

// Per-feature affine standardization fitted on one dataset, applied to others.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Dataset& train);
  Dataset apply(const Dataset& data) const;
};

struct TeacherData {
  Dataset data;
  PolyNet teacher;
};

struct MlpTeacherData {
  Dataset data;
  MlpNet teacher;
};

// Standard Gaussian inputs labelled by a given network plus Gaussian noise.
Dataset sample_from_teacher(const PolyNet& teacher, std::size_t m, std::uint64_t seed, double noise_sd = 0.0);

// Random P_{2,k} teacher: unit directions, alpha uniform in [-1, 1], small affine part.
TeacherData gen_teacher_p2k(std::size_t d, std::size_t k, std::size_t m, std::uint64_t seed, double noise_sd = 0.0);

// Random depth-2 MLP teacher; labels are the sign of its output when binary.
MlpTeacherData gen_teacher_mlp(std::size_t d, std::size_t width, HiddenActivation activation, std::size_t m,
                               std::uint64_t seed, bool binary = false);

}  // namespace geco
