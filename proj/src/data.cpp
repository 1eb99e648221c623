#include "vislide/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>

#include "vislide/errors.hpp"
#include "vislide/rng.hpp"

namespace vislide {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view next_token(std::string_view& rest) {
  rest = trim(rest);
  std::size_t end = 0;
  while (end < rest.size() && !is_space(rest[end])) ++end;
  std::string_view tok = rest.substr(0, end);
  rest.remove_prefix(end);
  return tok;
}

double parse_real(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty() || !std::isfinite(value))
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
  return value;
}

Index parse_index(std::string_view tok, std::size_t line) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty())
    throw ParseError(line, "invalid feature index '" + std::string(tok) + "'");
  if (value <= 0) throw ParseError(line, "feature index must be positive");
  return static_cast<Index>(value);
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in, std::optional<Index> n_features_override) {
  SparseDataset ds;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const double label = parse_real(next_token(line), line_no, "label");
    SparseRow row;
    Index last = 0;
    for (std::string_view tok = next_token(line); !tok.empty(); tok = next_token(line)) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError(line_no, "expected index:value, got '" + std::string(tok) + "'");
      const Index idx = parse_index(tok.substr(0, colon), line_no);
      if (idx <= last) throw ParseError(line_no, "feature indices must be strictly increasing");
      row.push_back({idx, parse_real(tok.substr(colon + 1), line_no, "feature value")});
      last = idx;
    }
    ds.n_features = std::max(ds.n_features, last);
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(label);
  }
  if (n_features_override) {
    if (*n_features_override < ds.n_features)
      throw ConfigError("n_features override is smaller than the largest index in the data");
    ds.n_features = *n_features_override;
  }
  return ds;
}

SparseDataset parse_libsvm(std::string_view text, std::optional<Index> n_features_override) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in, n_features_override);
}

SparseDataset load_libsvm(const std::filesystem::path& path,
                          std::optional<Index> n_features_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file " + path.string());
  return parse_libsvm(in, n_features_override);
}

std::string to_libsvm(const SparseDataset& ds) {
  std::string out;
  for (std::size_t r = 0; r < ds.rows.size(); ++r) {
    append_number(out, ds.labels[r]);
    for (const auto& e : ds.rows[r]) {
      out += ' ';
      out += std::to_string(e.index);
      out += ':';
      append_number(out, e.value);
    }
    out += '\n';
  }
  return out;
}

SparseDataset map_labels(SparseDataset ds, LabelScheme scheme) {
  const std::set<double> distinct(ds.labels.begin(), ds.labels.end());
  if (distinct.size() != 2)
    throw ConfigError("label mapping needs exactly two distinct labels, found " +
                      std::to_string(distinct.size()));
  const double low = *distinct.begin();
  const double neg = scheme == LabelScheme::plus_minus_one ? -1.0 : 0.0;
  for (double& label : ds.labels) label = label == low ? neg : 1.0;
  return ds;
}

SparseDataset subsample(const SparseDataset& ds, std::size_t n, std::uint64_t seed) {
  if (n == 0 || n > ds.n_rows())
    throw ConfigError("subsample size must be in [1, " + std::to_string(ds.n_rows()) + "]");
  std::vector<std::size_t> order(ds.n_rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  // partial Fisher-Yates
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end());

  SparseDataset out;
  out.n_features = ds.n_features;
  out.rows.reserve(n);
  out.labels.reserve(n);
  for (std::size_t i : order) {
    out.rows.push_back(ds.rows[i]);
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

SparseDataset scale_unit(SparseDataset ds) {
  std::vector<double> scale(static_cast<std::size_t>(ds.n_features) + 1, 0.0);
  for (const auto& row : ds.rows)
    for (const auto& e : row) {
      auto& s = scale[static_cast<std::size_t>(e.index)];
      s = std::max(s, std::abs(e.value));
    }
  for (auto& row : ds.rows)
    for (auto& e : row)
      if (const double s = scale[static_cast<std::size_t>(e.index)]; s > 0.0) e.value /= s;
  return ds;
}

}  // namespace vislide
