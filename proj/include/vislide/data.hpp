#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vislide/operators.hpp"

namespace vislide {

struct SparseEntry {
  Index index = 0;  // 1-based
  double value = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

using SparseRow = std::vector<SparseEntry>;

/// Labelled sparse rows in LibSVM layout.
struct SparseDataset {
  std::vector<SparseRow> rows;
  std::vector<double> labels;
  Index n_features = 0;

  std::size_t n_rows() const noexcept { return rows.size(); }

  friend bool operator==(const SparseDataset&, const SparseDataset&) = default;
};

/// Canonical download location of the LibSVM `mushrooms` file.
inline constexpr std::string_view kMushroomsUrl =
    "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/mushrooms";

/// Parses "<label> <idx>:<val> ..." lines. '#' starts a comment and blank
/// lines are skipped. n_features is the largest index seen unless
/// `n_features_override` is given (it must not be smaller).
SparseDataset parse_libsvm(std::istream& in, std::optional<Index> n_features_override = {});
SparseDataset parse_libsvm(std::string_view text, std::optional<Index> n_features_override = {});
SparseDataset load_libsvm(const std::filesystem::path& path,
                          std::optional<Index> n_features_override = {});

/// Writes the dataset back in LibSVM format with shortest round-trip
/// number formatting.
std::string to_libsvm(const SparseDataset& ds);

enum class LabelScheme { plus_minus_one, zero_one };

/// Maps the smaller of two raw labels to -1 (or 0) and the larger to +1
/// (or 1). Throws ConfigError unless exactly two distinct labels occur.
SparseDataset map_labels(SparseDataset ds, LabelScheme scheme);

/// Seeded uniform sample of n rows without replacement, original order kept.
SparseDataset subsample(const SparseDataset& ds, std::size_t n, std::uint64_t seed);

/// Divides every feature column by its largest absolute value.
SparseDataset scale_unit(SparseDataset ds);

}  // namespace vislide
