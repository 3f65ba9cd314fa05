#include "rdmatch/observations.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "rdmatch/error.hpp"

namespace rdmatch {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

struct RawCsv {
  std::vector<std::string> header;
  std::vector<std::string> lines;  // data lines, header excluded
  std::vector<std::size_t> line_numbers;
};

RawCsv read_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  RawCsv raw;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!have_header) {
      // tolerate a UTF-8 byte-order mark
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      for (auto f : split_fields(line)) raw.header.push_back(unquote(f));
      have_header = true;
      continue;
    }
    if (trim(line).empty()) continue;
    raw.lines.push_back(std::move(line));
    raw.line_numbers.push_back(line_no);
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "'" + path.string() + "' has no header row");
  return raw;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::MissingColumn, name);
  return static_cast<std::size_t>(it - header.begin());
}

double parse_cell(std::string_view cell, std::size_t line_no, const std::string& col) {
  auto where = [&] { return "row " + std::to_string(line_no) + ", column '" + col + "'"; };
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
  if (cell.empty() || ec != std::errc{} || ptr != last) {
    // from_chars accepts "inf"/"nan"; anything else that fails is malformed
    throw Error(ErrorCode::ParseError, where() + ": '" + std::string(cell) + "'");
  }
  if (!std::isfinite(value)) throw Error(ErrorCode::NonFiniteValue, where());
  return value;
}

/// Extracts the named columns as an n x k matrix, in the order given.
Eigen::MatrixXd extract(const RawCsv& raw, const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  cols.reserve(names.size());
  for (const auto& name : names) cols.push_back(find_column(raw.header, name));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(raw.lines.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t r = 0; r < raw.lines.size(); ++r) {
    const auto fields = split_fields(raw.lines[r]);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] >= fields.size()) {
        throw Error(ErrorCode::ParseError, "row " + std::to_string(raw.line_numbers[r]) + ", column '" +
                                               names[k] + "': missing cell");
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          parse_cell(fields[cols[k]], raw.line_numbers[r], names[k]);
    }
  }
  return out;
}

}  // namespace

ObservationSet::ObservationSet(Eigen::VectorXd y, Eigen::MatrixXd x, Eigen::MatrixXd z,
                               Eigen::VectorXd q, double tau0)
    : y_(std::move(y)), x_(std::move(x)), z_(std::move(z)), q_(std::move(q)), tau0_(tau0) {
  const auto n = y_.size();
  if (x_.rows() != n || z_.rows() != n || q_.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "row counts differ: y=" + std::to_string(n) + " x=" + std::to_string(x_.rows()) +
                    " z=" + std::to_string(z_.rows()) + " q=" + std::to_string(q_.size()));
  }
  if (static_cast<std::size_t>(n) < kMinRows) {
    throw Error(ErrorCode::TooFewRows, "n=" + std::to_string(n) + " (need at least 9)");
  }
  if (x_.cols() < 1 || z_.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "X and Z need at least one column each");
  }
  if (!all_finite(y_) || !all_finite(x_) || !all_finite(z_) || !all_finite(q_) || !std::isfinite(tau0_)) {
    throw Error(ErrorCode::NonFiniteValue, "observation set contains NaN or infinite entries");
  }
}

ObservationSet ObservationSet::subset(const std::vector<std::size_t>& rows) const {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd y(m), q(m);
  Eigen::MatrixXd x(m, x_.cols()), z(m, z_.cols());
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto r = rows[static_cast<std::size_t>(k)];
    if (r >= size()) throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(r));
    const auto ri = static_cast<Eigen::Index>(r);
    y(k) = y_(ri);
    q(k) = q_(ri);
    x.row(k) = x_.row(ri);
    z.row(k) = z_.row(ri);
  }
  return ObservationSet(std::move(y), std::move(x), std::move(z), std::move(q), tau0_);
}

ObservationSet ObservationSet::with_intercept_z() const {
  Eigen::MatrixXd z(z_.rows(), z_.cols() + 1);
  z << z_, Eigen::VectorXd::Ones(z_.rows());
  return ObservationSet(y_, x_, std::move(z), q_, tau0_);
}

ObservationSet ObservationSet::with_outcome(Eigen::VectorXd y) const {
  return ObservationSet(std::move(y), x_, z_, q_, tau0_);
}

std::vector<bool> treatment_mask(const ObservationSet& obs) {
  std::vector<bool> mask(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) mask[i] = obs.treated(i);
  return mask;
}

ObservationSet load_csv(const std::filesystem::path& path, const ColumnSpec& spec) {
  if (spec.y_col == spec.q_col) {
    throw Error(ErrorCode::InvalidArgument, "outcome and score column are both '" + spec.y_col + "'");
  }
  if (spec.x_cols.empty() || spec.z_cols.empty()) {
    throw Error(ErrorCode::InvalidArgument, "need at least one X and one Z column");
  }
  const auto raw = read_raw(path);
  // resolve every name before parsing anything so a missing column is
  // reported even when some cell is also malformed
  for (const auto* group : {&spec.x_cols, &spec.z_cols}) {
    for (const auto& c : *group) find_column(raw.header, c);
  }
  find_column(raw.header, spec.y_col);
  find_column(raw.header, spec.q_col);
  if (raw.lines.size() < kMinRows) {
    throw Error(ErrorCode::TooFewRows, "n=" + std::to_string(raw.lines.size()) + " (need at least 9)");
  }

  Eigen::VectorXd y = extract(raw, {spec.y_col}).col(0);
  Eigen::VectorXd q = extract(raw, {spec.q_col}).col(0);
  Eigen::MatrixXd x = extract(raw, spec.x_cols);
  Eigen::MatrixXd z = extract(raw, spec.z_cols);
  return ObservationSet(std::move(y), std::move(x), std::move(z), std::move(q), spec.tau0);
}

std::size_t NumericTable::column(const std::string& name) const { return find_column(header, name); }

NumericTable read_numeric_csv(const std::filesystem::path& path) {
  const auto raw = read_raw(path);
  const Eigen::MatrixXd cells = extract(raw, raw.header);
  NumericTable table;
  table.header = raw.header;
  table.rows.resize(static_cast<std::size_t>(cells.rows()));
  for (Eigen::Index r = 0; r < cells.rows(); ++r) {
    auto& row = table.rows[static_cast<std::size_t>(r)];
    row.resize(static_cast<std::size_t>(cells.cols()));
    for (Eigen::Index c = 0; c < cells.cols(); ++c) row[static_cast<std::size_t>(c)] = cells(r, c);
  }
  return table;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void write_csv(const std::filesystem::path& path, const ObservationSet& obs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << "y";
  for (Eigen::Index j = 0; j < obs.dim_x(); ++j) out << ",x" << (j + 1);
  for (Eigen::Index j = 0; j < obs.dim_z(); ++j) out << ",z" << (j + 1);
  out << ",q\n";
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(obs.size()); ++i) {
    out << format_double(obs.y()(i));
    for (Eigen::Index j = 0; j < obs.dim_x(); ++j) out << ',' << format_double(obs.x()(i, j));
    for (Eigen::Index j = 0; j < obs.dim_z(); ++j) out << ',' << format_double(obs.z()(i, j));
    out << ',' << format_double(obs.q()(i)) << '\n';
  }
}

}  // namespace rdmatch
