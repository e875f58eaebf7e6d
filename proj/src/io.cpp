#include "spdsplit/io.hpp"

#include "spdsplit/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace spdsplit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void parseFail(const std::string& source, std::size_t line, std::size_t col, const std::string& msg) {
  fail(ErrorCode::ParseError, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

struct Token {
  std::string_view text;
  std::size_t col;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

// Reads lines, skipping blank ones and those starting with `comment`.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source, char comment) : in_(in), source_(std::move(source)), comment_(comment) {}

  bool next(std::vector<Token>& tokens) {
    while (std::getline(in_, line_)) {
      ++lineNo_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      const auto first = line_.find_first_not_of(" \t");
      if (first == std::string::npos || line_[first] == comment_) continue;
      tokens = tokenize(line_);
      return true;
    }
    return false;
  }

  std::size_t line() const { return lineNo_; }
  const std::string& source() const { return source_; }
  std::size_t endColumn() const { return line_.size() + 1; }
  [[noreturn]] void error(std::size_t col, const std::string& msg) const { parseFail(source_, lineNo_, col, msg); }
  [[noreturn]] void eof(const std::string& msg) const { parseFail(source_, lineNo_ + 1, 1, msg); }

 private:
  std::istream& in_;
  std::string source_;
  char comment_;
  std::string line_;
  std::size_t lineNo_ = 0;
};

double toDouble(const LineReader& r, const Token& t) {
  double v = 0.0;
  const char* b = t.text.data();
  const char* e = b + t.text.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || !std::isfinite(v)) r.error(t.col, "expected a finite number, got '" + std::string(t.text) + "'");
  return v;
}

long long toInteger(const LineReader& r, const Token& t, const char* what) {
  long long v = 0;
  const char* b = t.text.data();
  const char* e = b + t.text.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) r.error(t.col, std::string("expected an integer ") + what + ", got '" + std::string(t.text) + "'");
  return v;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<std::size_t, std::size_t> lineColumn(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parseJson(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is one past the offending character
    const auto [line, col] = lineColumn(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    parseFail(source, line, col, msg);
  }
}

[[noreturn]] void jsonFail(const std::string& source, const std::string& where, const std::string& msg) {
  fail(ErrorCode::ParseError, source + ": " + where + ": " + msg);
}

}  // namespace

Matrix parseDenseText(std::istream& in, const std::string& source) {
  LineReader r(in, source, '#');
  std::vector<Token> tok;
  if (!r.next(tok)) r.eof("empty input, expected the dimension");
  if (tok.size() != 1) r.error(tok.size() > 1 ? tok[1].col : 1, "first line must hold only the dimension n");
  const long long n = toInteger(r, tok[0], "dimension");
  if (n <= 0) r.error(tok[0].col, "dimension must be positive");
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    if (!r.next(tok)) r.eof("expected " + std::to_string(n) + " rows, found " + std::to_string(i));
    if (static_cast<long long>(tok.size()) != n) {
      r.error(tok.size() > static_cast<std::size_t>(n) ? tok[static_cast<std::size_t>(n)].col : r.endColumn(),
              "row has " + std::to_string(tok.size()) + " entries, expected " + std::to_string(n));
    }
    for (Index j = 0; j < n; ++j) m(i, j) = toDouble(r, tok[static_cast<std::size_t>(j)]);
  }
  if (r.next(tok)) r.error(tok[0].col, "trailing data after " + std::to_string(n) + " rows");
  return m;
}

Matrix parseMatrixMarket(std::istream& in, const std::string& source) {
  std::string banner;
  if (!std::getline(in, banner)) parseFail(source, 1, 1, "empty input");
  if (!banner.empty() && banner.back() == '\r') banner.pop_back();
  std::string lowered = banner;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
  const auto words = tokenize(lowered);
  if (words.size() != 5 || words[0].text != "%%matrixmarket" || words[1].text != "matrix") {
    parseFail(source, 1, 1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
  }
  const bool coordinate = words[2].text == "coordinate";
  if (!coordinate && words[2].text != "array") parseFail(source, 1, words[2].col, "unsupported format");
  if (words[3].text != "real" && words[3].text != "integer" && words[3].text != "double") {
    parseFail(source, 1, words[3].col, "only real or integer fields are supported");
  }
  const bool symmetric = words[4].text == "symmetric";
  if (!symmetric && words[4].text != "general") parseFail(source, 1, words[4].col, "unsupported symmetry");

  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::istringstream body("\n" + rest);  // keeps line numbers aligned with the file
  LineReader r(body, source, '%');
  std::vector<Token> tok;
  if (!r.next(tok)) r.eof("missing size line");
  if (tok.size() != (coordinate ? 3u : 2u)) r.error(1, coordinate ? "size line must be 'rows cols nnz'" : "size line must be 'rows cols'");
  const long long rows = toInteger(r, tok[0], "row count");
  const long long cols = toInteger(r, tok[1], "column count");
  if (rows <= 0 || rows != cols) r.error(tok[0].col, "matrix must be square with positive size");
  Matrix m = Matrix::Zero(rows, cols);
  if (coordinate) {
    const long long nnz = toInteger(r, tok[2], "entry count");
    if (nnz < 0) r.error(tok[2].col, "negative entry count");
    for (long long k = 0; k < nnz; ++k) {
      if (!r.next(tok)) r.eof("expected " + std::to_string(nnz) + " entries, found " + std::to_string(k));
      if (tok.size() != 3) r.error(tok.size() > 3 ? tok[3].col : r.endColumn(), "entry must be 'row col value'");
      const long long i = toInteger(r, tok[0], "row index");
      const long long j = toInteger(r, tok[1], "column index");
      if (i < 1 || i > rows) r.error(tok[0].col, "row index out of range");
      if (j < 1 || j > cols) r.error(tok[1].col, "column index out of range");
      const double v = toDouble(r, tok[2]);
      m(i - 1, j - 1) = v;
      if (symmetric) m(j - 1, i - 1) = v;
    }
  } else {
    // column-major; symmetric arrays list the lower triangle only
    for (Index j = 0; j < cols; ++j) {
      for (Index i = symmetric ? j : 0; i < rows; ++i) {
        if (!r.next(tok)) r.eof("array data ended early");
        if (tok.size() != 1) r.error(tok.size() > 1 ? tok[1].col : 1, "array format expects one value per line");
        m(i, j) = toDouble(r, tok[0]);
        if (symmetric) m(j, i) = m(i, j);
      }
    }
  }
  if (r.next(tok)) r.error(tok[0].col, "trailing data");
  return m;
}

Matrix readMatrix(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  if (in.peek() == '%') return parseMatrixMarket(in, path.string());
  return parseDenseText(in, path.string());
}

Matrix readSymmetricMatrix(const fs::path& path) {
  Matrix m = readMatrix(path);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    fail(ErrorCode::ParseError, path.string() + ": matrix is not symmetric");
  }
  return 0.5 * (m + m.transpose());
}

void writeDenseText(std::ostream& out, const Matrix& m) {
  out << m.rows() << '\n';
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

void writeMatrix(const fs::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  writeDenseText(out, m);
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

SubspaceBasis parseBasisJson(const std::string& text, const std::string& source) {
  const json doc = parseJson(text, source);
  if (!doc.is_object()) jsonFail(source, "top level", "expected an object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) jsonFail(source, "n", "expected an integer");
  const long long n = doc["n"].get<long long>();
  if (n <= 0) jsonFail(source, "n", "must be positive");
  if (!doc.contains("matrices") || !doc["matrices"].is_array()) jsonFail(source, "matrices", "expected an array");
  std::vector<SparseSymMatrix> elements;
  const json& mats = doc["matrices"];
  for (std::size_t k = 0; k < mats.size(); ++k) {
    const std::string where = "matrices[" + std::to_string(k) + "]";
    if (!mats[k].is_array()) jsonFail(source, where, "expected an array of [i, j, value] triples");
    std::vector<SparseEntry> entries;
    for (std::size_t t = 0; t < mats[k].size(); ++t) {
      const json& e = mats[k][t];
      const std::string at = where + "[" + std::to_string(t) + "]";
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() || !e[2].is_number()) {
        jsonFail(source, at, "expected [i, j, value]");
      }
      const long long i = e[0].get<long long>();
      const long long j = e[1].get<long long>();
      if (i < 0 || j < 0 || i >= n || j >= n) jsonFail(source, at, "index out of range");
      entries.push_back({static_cast<Index>(std::max(i, j)), static_cast<Index>(std::min(i, j)), e[2].get<double>()});
    }
    elements.emplace_back(static_cast<Index>(n), std::move(entries));
  }
  return SubspaceBasis(static_cast<Index>(n), std::move(elements));
}

std::string basisJson(const SubspaceBasis& s) {
  json mats = json::array();
  for (const auto& d : s.elements()) {
    json m = json::array();
    for (const auto& e : d.entries()) m.push_back({e.row, e.col, e.value});
    mats.push_back(std::move(m));
  }
  return json{{"n", s.ambientDim()}, {"matrices", std::move(mats)}}.dump();
}

SubspaceBasis readBasis(const fs::path& path) {
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".mtx") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(ErrorCode::ParseError, path.string() + ": no .mtx files in directory");
    std::vector<SparseSymMatrix> elements;
    Index n = -1;
    for (const auto& f : files) {
      const Matrix m = readSymmetricMatrix(f);
      if (n >= 0 && m.rows() != n) fail(ErrorCode::ParseError, f.string() + ": dimension differs from the other basis files");
      n = m.rows();
      elements.push_back(SparseSymMatrix::fromDense(m));
    }
    return SubspaceBasis(n, std::move(elements));
  }
  return parseBasisJson(slurp(path), path.string());
}

GroupAction parseGroup(std::istream& in, Index n, const std::string& source) {
  LineReader r(in, source, '#');
  std::vector<Token> tok;
  std::vector<GroupAction::Permutation> perms;
  while (r.next(tok)) {
    if (static_cast<Index>(tok.size()) != n) {
      r.error(tok.size() > static_cast<std::size_t>(n) ? tok[static_cast<std::size_t>(n)].col : r.endColumn(),
              "permutation has " + std::to_string(tok.size()) + " entries, expected " + std::to_string(n));
    }
    GroupAction::Permutation p(static_cast<std::size_t>(n));
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < tok.size(); ++k) {
      const long long v = toInteger(r, tok[k], "image");
      if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) r.error(tok[k].col, "not a permutation of 0..n-1");
      seen[static_cast<std::size_t>(v)] = 1;
      p[k] = static_cast<Index>(v);
    }
    perms.push_back(std::move(p));
  }
  if (perms.empty()) r.eof("no permutations listed");
  return GroupAction::fromPermutations(n, std::move(perms));
}

GroupAction readGroup(const fs::path& path, Index n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return parseGroup(in, n, path.string());
}

MarketSpec parseMarketSpec(const std::string& text, const std::string& source) {
  const json doc = parseJson(text, source);
  if (!doc.is_object()) jsonFail(source, "top level", "expected an object");
  MarketSpec spec;
  auto real = [&](const char* key, double& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) jsonFail(source, key, "expected a number");
    out = doc[key].get<double>();
  };
  if (doc.contains("N")) {
    if (!doc["N"].is_number_integer()) jsonFail(source, "N", "expected an integer");
    spec.N = doc["N"].get<int>();
  }
  real("dt", spec.deltaT);
  real("alpha", spec.alpha);
  real("hurst", spec.hurst);
  if (doc.contains("mode")) {
    const auto mode = doc["mode"].is_string() ? parseInfoMode(doc["mode"].get<std::string>()) : std::nullopt;
    if (!mode) jsonFail(source, "mode", "expected \"full\" or \"markov\"");
    spec.mode = *mode;
  }
  return spec;
}

}  // namespace spdsplit
