#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "cglab/error.hpp"
#include "cglab/problems.hpp"

namespace cglab {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class T>
T parse_field(std::string_view text, long line_no, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": invalid " + what + " '" + std::string(text) + "'",
                     line_no);
  }
  return value;
}

std::string format17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next line that is neither blank nor a % comment.
  bool next_data(std::string_view& out) {
    while (next_raw(out)) {
      const auto t = tokens(out);
      if (!t.empty() && t.front().front() != '%') return true;
    }
    return false;
  }

  bool next_raw(std::string_view& out) {
    if (pos_ >= text_.size()) return false;
    const auto end = text_.find('\n', pos_);
    out = text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_);
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
    ++line_;
    return true;
  }

  long line() const { return line_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  long line_ = 0;
};

struct MarketHeader {
  std::string format;
  std::string field;
  std::string symmetry;
};

MarketHeader read_header(LineReader& reader) {
  std::string_view line;
  if (!reader.next_raw(line)) throw ParseError("empty Matrix Market file", 1);
  const auto t = tokens(line);
  if (t.size() != 5 || lower(t[0]) != "%%matrixmarket") {
    throw ParseError("line 1: missing %%MatrixMarket header", 1);
  }
  if (lower(t[1]) != "matrix") throw UnsupportedFormat("Matrix Market object '" + std::string(t[1]) + "'");
  return {lower(t[2]), lower(t[3]), lower(t[4])};
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Matrix Market

SpdMatrix parse_matrix_market(std::string_view text) {
  LineReader reader(text);
  const MarketHeader h = read_header(reader);
  if (h.format != "coordinate" && h.format != "array") {
    throw UnsupportedFormat("Matrix Market format '" + h.format + "'");
  }
  if (h.field != "real") throw UnsupportedFormat("Matrix Market field '" + h.field + "' (only real is supported)");
  if (h.symmetry != "symmetric") {
    throw UnsupportedFormat("Matrix Market symmetry '" + h.symmetry + "' (only symmetric is supported)");
  }

  std::string_view line;
  if (!reader.next_data(line)) throw ParseError("missing size line", reader.line() + 1);
  const auto size = tokens(line);
  const long size_line = reader.line();
  const bool coordinate = h.format == "coordinate";
  if (size.size() != (coordinate ? 3u : 2u)) {
    throw ParseError("line " + std::to_string(size_line) + ": malformed size line", size_line);
  }
  const auto rows = parse_field<std::size_t>(size[0], size_line, "row count");
  const auto cols = parse_field<std::size_t>(size[1], size_line, "column count");
  if (rows != cols || rows == 0) {
    throw ParseError("line " + std::to_string(size_line) + ": symmetric matrix must be square", size_line);
  }
  const std::size_t n = rows;

  std::vector<Triplet> entries;
  if (coordinate) {
    const auto nnz = parse_field<std::size_t>(size[2], size_line, "entry count");
    entries.reserve(nnz);
    while (reader.next_data(line)) {
      const long ln = reader.line();
      if (entries.size() == nnz) {
        throw ParseError("line " + std::to_string(ln) + ": more entries than the header declares", ln);
      }
      const auto t = tokens(line);
      if (t.size() != 3) throw ParseError("line " + std::to_string(ln) + ": expected 'row col value'", ln);
      const auto i = parse_field<std::size_t>(t[0], ln, "row index");
      const auto j = parse_field<std::size_t>(t[1], ln, "column index");
      const auto v = parse_field<double>(t[2], ln, "value");
      if (i < 1 || i > n || j < 1 || j > n) {
        throw ParseError("line " + std::to_string(ln) + ": index out of range", ln);
      }
      if (!std::isfinite(v)) throw ParseError("line " + std::to_string(ln) + ": value is not finite", ln);
      entries.push_back({i - 1, j - 1, v});
    }
    if (entries.size() != nnz) {
      throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(entries.size()),
                       reader.line());
    }
  } else {
    // Column-major lower triangle.
    std::size_t col = 0;
    std::size_t row = 0;
    const std::size_t expected = n * (n + 1) / 2;
    std::size_t count = 0;
    while (reader.next_data(line)) {
      const long ln = reader.line();
      const auto t = tokens(line);
      if (t.size() != 1) throw ParseError("line " + std::to_string(ln) + ": expected one value", ln);
      if (count == expected) throw ParseError("line " + std::to_string(ln) + ": too many values", ln);
      const auto v = parse_field<double>(t[0], ln, "value");
      if (!std::isfinite(v)) throw ParseError("line " + std::to_string(ln) + ": value is not finite", ln);
      entries.push_back({row, col, v});
      ++count;
      if (++row == n) row = ++col;
    }
    if (count != expected) {
      throw ParseError("expected " + std::to_string(expected) + " values, found " + std::to_string(count),
                       reader.line());
    }
  }
  return SpdMatrix::from_triplets(n, entries);
}

SpdMatrix read_matrix_market(const std::filesystem::path& path) { return parse_matrix_market(read_text_file(path)); }

std::string format_matrix_market(const SpdMatrix& A) {
  const auto lower_entries = A.lower_triplets();
  std::string out = "%%MatrixMarket matrix coordinate real symmetric\n";
  out += std::to_string(A.order()) + " " + std::to_string(A.order()) + " " + std::to_string(lower_entries.size()) +
         "\n";
  for (const auto& t : lower_entries) {
    out += std::to_string(t.row + 1) + " " + std::to_string(t.col + 1) + " " + format17(t.value) + "\n";
  }
  return out;
}

void write_matrix_market(const SpdMatrix& A, const std::filesystem::path& path) {
  write_text_file(path, format_matrix_market(A));
}

DenseVector read_vector_market(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  LineReader reader(text);
  const MarketHeader h = read_header(reader);
  if (h.format != "array" || h.field != "real" || h.symmetry != "general") {
    throw UnsupportedFormat("vector files must be 'array real general'");
  }
  std::string_view line;
  if (!reader.next_data(line)) throw ParseError("missing size line", reader.line() + 1);
  const long size_line = reader.line();
  const auto size = tokens(line);
  if (size.size() != 2 || parse_field<std::size_t>(size[1], size_line, "column count") != 1) {
    throw ParseError("line " + std::to_string(size_line) + ": vector must be n x 1", size_line);
  }
  const auto n = parse_field<std::size_t>(size[0], size_line, "row count");
  std::vector<double> values;
  while (reader.next_data(line)) {
    const long ln = reader.line();
    const auto t = tokens(line);
    if (t.size() != 1) throw ParseError("line " + std::to_string(ln) + ": expected one value", ln);
    values.push_back(parse_field<double>(t[0], ln, "value"));
  }
  if (values.size() != n) {
    throw ParseError("expected " + std::to_string(n) + " values, found " + std::to_string(values.size()),
                     reader.line());
  }
  return DenseVector(std::move(values));
}

void write_vector_market(const DenseVector& v, const std::filesystem::path& path) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += std::to_string(v.size()) + " 1\n";
  for (double x : v.values()) out += format17(x) + "\n";
  write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// Trace CSV

namespace {

constexpr std::string_view kTraceHeader = "k,alpha,rnorm,snorm,gap,enorm2,enormA,dr_ratio";

std::string optional_cell(const std::optional<double>& v) { return v ? format17(*v) : std::string(); }

}  // namespace

std::string format_trace(const CgTrace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : trace) {
    out += std::to_string(r.k);
    for (double v : {r.alpha, r.rnorm, r.snorm, r.gap}) {
      out += ',';
      out += format17(v);
    }
    for (const auto& v : {r.enorm2, r.enormA, r.dr_ratio}) {
      out += ',';
      out += optional_cell(v);
    }
    out += '\n';
  }
  return out;
}

CgTrace parse_trace(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next_raw(line) || line != kTraceHeader) throw ParseError("trace file: unexpected header", 1);
  CgTrace trace;
  while (reader.next_raw(line)) {
    const long ln = reader.line();
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 8) throw ParseError("line " + std::to_string(ln) + ": expected 8 columns", ln);
    auto required = [&](std::string_view c, const char* what) {
      if (c.empty()) throw ParseError("line " + std::to_string(ln) + ": missing " + what, ln);
      return parse_field<double>(c, ln, what);
    };
    auto optional = [&](std::string_view c, const char* what) -> std::optional<double> {
      if (c.empty()) return std::nullopt;
      return parse_field<double>(c, ln, what);
    };
    CgTraceRecord r;
    r.k = parse_field<std::size_t>(cells[0], ln, "k");
    r.alpha = required(cells[1], "alpha");
    r.rnorm = required(cells[2], "rnorm");
    r.snorm = required(cells[3], "snorm");
    r.gap = required(cells[4], "gap");
    r.enorm2 = optional(cells[5], "enorm2");
    r.enormA = optional(cells[6], "enormA");
    r.dr_ratio = optional(cells[7], "dr_ratio");
    if (!trace.empty() && r.k <= trace.back().k) {
      throw ParseError("line " + std::to_string(ln) + ": k must be strictly increasing", ln);
    }
    trace.push_back(r);
  }
  return trace;
}

void write_trace(const CgTrace& trace, const std::filesystem::path& path) { write_text_file(path, format_trace(trace)); }

CgTrace read_trace(const std::filesystem::path& path) { return parse_trace(read_text_file(path)); }

}  // namespace cglab
