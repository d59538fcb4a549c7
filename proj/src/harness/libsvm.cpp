#include "aprox/harness/libsvm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "aprox/errors.hpp"

namespace aprox {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> split(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

SparseDataset parse_libsvm(std::istream& in) {
  SparseDataset data;
  std::vector<std::size_t> label_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tokens = split(view);
    if (tokens.empty()) continue;

    double label_value;
    if (tokens[0].text.find(':') != std::string_view::npos)
      throw ParseError("missing label before the first feature", line_no, tokens[0].column);
    data.raw_labels.emplace_back(tokens[0].text);
    data.labels.push_back(parse_number(tokens[0].text, label_value) ? label_value : std::nan(""));
    label_lines.push_back(line_no);

    std::vector<std::pair<int, double>> row;
    int previous = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto& tok = tokens[t];
      const auto colon = tok.text.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.text.size())
        throw ParseError("malformed feature '" + std::string(tok.text) + "', expected index:value", line_no,
                         tok.column);
      int index = 0;
      const auto idx_text = tok.text.substr(0, colon);
      const auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
      if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || index < 1)
        throw ParseError("feature index must be a positive integer", line_no, tok.column);
      if (index <= previous)
        throw ParseError("feature indices must be strictly increasing (" + std::to_string(index) + " after " +
                             std::to_string(previous) + ")",
                         line_no, tok.column);
      double value;
      if (!parse_number(tok.text.substr(colon + 1), value) || !std::isfinite(value))
        throw ParseError("feature value must be a finite number", line_no, tok.column + colon + 1);
      row.emplace_back(index, value);
      previous = index;
      data.n_features = std::max(data.n_features, index);
    }
    data.rows.push_back(std::move(row));
  }

  const bool plus_minus_one =
      std::all_of(data.labels.begin(), data.labels.end(), [](double v) { return v == 1.0 || v == -1.0; });
  if (!plus_minus_one) {
    std::set<std::string> distinct(data.raw_labels.begin(), data.raw_labels.end());
    if (distinct.size() > 2) {
      std::set<std::string> seen;
      for (std::size_t i = 0; i < data.raw_labels.size(); ++i) {
        seen.insert(data.raw_labels[i]);
        if (seen.size() > 2)
          throw ParseError("more than two distinct labels ('" + data.raw_labels[i] + "' is the third)",
                           label_lines[i], 1);
      }
    }
    std::string smaller = *distinct.begin();
    double lo, hi;
    if (distinct.size() == 2 && parse_number(*distinct.begin(), lo) && parse_number(*distinct.rbegin(), hi) &&
        hi < lo)
      smaller = *distinct.rbegin();
    for (std::size_t i = 0; i < data.labels.size(); ++i) data.labels[i] = data.raw_labels[i] == smaller ? -1.0 : 1.0;
  }
  return data;
}

SparseDataset parse_libsvm(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

SparseDataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  return parse_libsvm(in);
}

std::string serialize_libsvm(const SparseDataset& data) {
  std::string out;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    out += i < data.raw_labels.size() ? data.raw_labels[i] : format_double(data.labels[i]);
    for (const auto& [idx, val] : data.rows[i]) {
      out += ' ';
      out += std::to_string(idx);
      out += ':';
      out += format_double(val);
    }
    out += '\n';
  }
  return out;
}

DenseData to_dense(const SparseDataset& data, bool rescale) {
  const Index m = static_cast<Index>(data.rows.size());
  const Index n = data.n_features;
  DenseData out{Matrix::Zero(m, n), Vector(m)};
  for (Index i = 0; i < m; ++i) {
    out.b[i] = data.labels[static_cast<std::size_t>(i)];
    for (const auto& [idx, val] : data.rows[static_cast<std::size_t>(i)]) out.A(i, idx - 1) = val;
  }
  if (rescale && m > 0) {
    for (Index j = 0; j < n; ++j) {
      const double lo = out.A.col(j).minCoeff();
      const double hi = out.A.col(j).maxCoeff();
      if (hi == lo) {
        out.A.col(j).setZero();
        continue;
      }
      for (Index i = 0; i < m; ++i)
        out.A(i, j) = std::clamp(2.0 * (out.A(i, j) - lo) / (hi - lo) - 1.0, -1.0, 1.0);
    }
  }
  return out;
}

}  // namespace aprox
