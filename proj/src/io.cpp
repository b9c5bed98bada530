#include "gfrref/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace gfrref {

namespace {

bool parse_u64(const std::string& tok, std::uint64_t& out) {
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    if (end > pos) out.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

struct LineReader {
  std::istream& in;
  std::string name;
  std::size_t line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(name + ":" + std::to_string(line_no) + ": " + msg);
  }

  bool next(std::string& out) {
    if (!std::getline(in, out)) return false;
    ++line_no;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return true;
  }

  std::string expect_line(const std::string& what) {
    std::string s;
    if (!next(s)) {
      ++line_no;
      fail("unexpected end of file, expected " + what);
    }
    return s;
  }

  void expect_exact(const std::string& text) {
    const std::string line = expect_line("'" + text + "'");
    if (line != text) fail("expected '" + text + "', got '" + line + "'");
  }

  void expect_eof() {
    std::string s;
    while (next(s))
      if (!split_ws(s).empty()) fail("unexpected trailing content");
  }

  /// The value of a `key=value` token, which must sit at toks[idx].
  std::string key_value(const std::vector<std::string>& toks, std::size_t idx,
                        const std::string& key) const {
    if (idx >= toks.size()) fail("missing " + key + "=...");
    const std::string& tok = toks[idx];
    if (tok.size() < key.size() + 1 || tok.compare(0, key.size(), key) != 0 ||
        tok[key.size()] != '=')
      fail("expected " + key + "=..., got '" + tok + "'");
    return tok.substr(key.size() + 1);
  }

  std::uint64_t key_u64(const std::vector<std::string>& toks, std::size_t idx,
                        const std::string& key) const {
    const std::string val = key_value(toks, idx, key);
    std::uint64_t out = 0;
    if (!parse_u64(val, out)) fail("invalid number in " + key + "=" + val);
    return out;
  }

  /// Bare member values toks[from..], exactly `count` strictly increasing
  /// values below `universe`.
  std::vector<std::uint32_t> members(const std::vector<std::string>& toks,
                                     std::size_t from, std::uint64_t count,
                                     std::uint64_t universe,
                                     const std::string& what) const {
    if (toks.size() - from != count)
      fail(what + ": expected " + std::to_string(count) + " values, got " +
           std::to_string(toks.size() - from));
    std::vector<std::uint32_t> out;
    out.reserve(std::size_t(count));
    for (std::size_t t = from; t < toks.size(); ++t) {
      std::uint64_t v = 0;
      if (!parse_u64(toks[t], v) || v >= universe)
        fail(what + ": invalid index '" + toks[t] + "'");
      if (!out.empty() && v <= out.back())
        fail(what + ": indices must be strictly increasing");
      out.push_back(std::uint32_t(v));
    }
    return out;
  }
};

FieldSpec parse_field_line(LineReader& lr) {
  const std::string line = lr.expect_line("field header");
  const std::vector<std::string> toks = split_ws(line);
  if (toks.empty() || toks[0] != "field") lr.fail("expected a field header");
  const std::uint64_t p = lr.key_u64(toks, 1, "p");
  const std::uint64_t k = lr.key_u64(toks, 2, "k");
  if (p < 2 || p >= (1u << 16)) lr.fail("field characteristic out of range");
  if (k < 1) lr.fail("field degree must be at least 1");
  if (k == 1) {
    if (toks.size() != 3) lr.fail("prime fields take no modulus");
    try {
      return FieldSpec(std::uint32_t(p));
    } catch (const std::exception& e) {
      lr.fail(e.what());
    }
  }
  if (toks.size() != 4) lr.fail("extension fields need modulus=c0,...,ck");
  const std::string mod = lr.key_value(toks, 3, "modulus");
  try {
    return FieldSpec(std::uint32_t(p), std::uint32_t(k),
                     parse_modulus_arg(mod));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    lr.fail(e.what());
  }
}

void write_field_line(std::ostream& out, const FieldSpec& f) {
  out << "field p=" << f.p() << " k=" << f.k();
  if (f.k() > 1) {
    out << " modulus=";
    const std::vector<std::uint32_t>& mod = f.modulus();
    for (std::size_t t = 0; t < mod.size(); ++t) {
      if (t) out << ',';
      out << mod[t];
    }
  }
  out << '\n';
}

Matrix parse_matrix_body(LineReader& lr, const FieldSpec& f, std::size_t rows,
                         std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string line = lr.expect_line("a matrix row");
    const std::vector<std::string> toks = split_ws(line);
    if (toks.size() != cols)
      lr.fail("expected " + std::to_string(cols) + " entries, got " +
              std::to_string(toks.size()));
    for (std::size_t c = 0; c < cols; ++c) {
      std::uint64_t v = 0;
      if (!parse_u64(toks[c], v) || v >= f.order())
        lr.fail("entry '" + toks[c] + "' is not an element encoding");
      m.at(r, c) = Elem(v);
    }
  }
  return m;
}

void write_matrix_body(std::ostream& out, const Matrix& m) {
  std::string line;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) line += ' ';
      line += std::to_string(m.at(r, c));
    }
    line += '\n';
    out << line;
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace

GfMat read_gfmat(std::istream& in, const std::string& name) {
  LineReader lr{in, name};
  lr.expect_exact("GFMAT v1");
  FieldSpec field = parse_field_line(lr);
  const std::string dims = lr.expect_line("rows=... cols=...");
  const std::vector<std::string> toks = split_ws(dims);
  const std::uint64_t rows = lr.key_u64(toks, 0, "rows");
  const std::uint64_t cols = lr.key_u64(toks, 1, "cols");
  if (toks.size() != 2) lr.fail("unexpected tokens after cols=...");
  if (rows > (1u << 24) || cols > (1u << 24)) lr.fail("dimensions out of range");
  Matrix m = parse_matrix_body(lr, field, std::size_t(rows), std::size_t(cols));
  return GfMat{std::move(field), std::move(m)};
}

GfMat read_gfmat_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open");
  return read_gfmat(in, path);
}

void write_gfmat(std::ostream& out, const FieldSpec& field, const Matrix& m) {
  out << "GFMAT v1\n";
  write_field_line(out, field);
  out << "rows=" << m.rows() << " cols=" << m.cols() << "\n";
  write_matrix_body(out, m);
}

void write_gfmat_file(const std::string& path, const FieldSpec& field,
                      const Matrix& m) {
  std::ofstream out = open_out(path);
  write_gfmat(out, field, m);
  finish_out(out, path);
}

void write_selects(std::ostream& out, const EchelonOutput& res) {
  out << "SELECTS v1\n";
  out << "rank=" << res.rank << " block_rows=" << res.chop.a()
      << " block_cols=" << res.chop.b() << "\n";
  for (std::size_t i = 0; i < res.chop.a(); ++i) {
    const IndexSet& s = res.varrho[i];
    out << "row i=" << i << " offset=" << res.chop.row_offset(i)
        << " size=" << s.universe << " count=" << s.size();
    for (std::uint32_t v : s.members) out << ' ' << v;
    out << '\n';
  }
  for (std::size_t j = 0; j < res.chop.b(); ++j) {
    const IndexSet& s = res.upsilon[j];
    out << "col j=" << j << " offset=" << res.chop.col_offset(j)
        << " size=" << s.universe << " count=" << s.size();
    for (std::uint32_t v : s.members) out << ' ' << v;
    out << '\n';
  }
  out << "global_rows count=" << res.rank;
  for (std::uint32_t v : res.global_varrho()) out << ' ' << v;
  out << '\n';
  out << "global_cols count=" << res.rank;
  for (std::uint32_t v : res.global_upsilon()) out << ' ' << v;
  out << '\n';
}

void write_selects_file(const std::string& path, const EchelonOutput& res) {
  std::ofstream out = open_out(path);
  write_selects(out, res);
  finish_out(out, path);
}

void write_transform(std::ostream& out, const EchelonOutput& res) {
  out << "TRANSFORM v1\n";
  write_field_line(out, res.field);
  out << "block_rows=" << res.chop.a() << " block_cols=" << res.chop.b()
      << "\n";
  for (std::size_t j = 0; j < res.chop.b(); ++j)
    for (std::size_t h = 0; h < res.chop.a(); ++h) {
      const Matrix& m = res.T_M_blocks[j][h];
      out << "M j=" << j << " h=" << h << " rows=" << m.rows()
          << " cols=" << m.cols() << "\n";
      write_matrix_body(out, m);
    }
  for (std::size_t i = 0; i < res.chop.a(); ++i)
    for (std::size_t h = 0; h <= i; ++h) {
      const Matrix& m = res.T_K_blocks[i][h];
      out << "K i=" << i << " h=" << h << " rows=" << m.rows()
          << " cols=" << m.cols() << "\n";
      write_matrix_body(out, m);
    }
}

void write_transform_file(const std::string& path, const EchelonOutput& res) {
  std::ofstream out = open_out(path);
  write_transform(out, res);
  finish_out(out, path);
}

namespace {

struct SelectsData {
  std::size_t rank = 0;
  ChopSpec chop;
  std::vector<IndexSet> varrho;
  std::vector<IndexSet> upsilon;
};

SelectsData read_selects_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open");
  LineReader lr{in, path};
  lr.expect_exact("SELECTS v1");

  const std::vector<std::string> head = split_ws(lr.expect_line("rank=..."));
  SelectsData sd;
  sd.rank = std::size_t(lr.key_u64(head, 0, "rank"));
  const std::uint64_t a = lr.key_u64(head, 1, "block_rows");
  const std::uint64_t b = lr.key_u64(head, 2, "block_cols");
  if (head.size() != 3) lr.fail("unexpected tokens after block_cols=...");
  if (a > (1u << 14) || b > (1u << 14)) lr.fail("block grid out of range");

  std::size_t row_total = 0, col_total = 0;
  for (std::uint64_t i = 0; i < a; ++i) {
    const std::vector<std::string> toks = split_ws(lr.expect_line("row line"));
    if (toks.empty() || toks[0] != "row") lr.fail("expected a row line");
    if (lr.key_u64(toks, 1, "i") != i) lr.fail("row lines out of order");
    if (lr.key_u64(toks, 2, "offset") != row_total)
      lr.fail("row offset disagrees with the part sizes");
    const std::uint64_t size = lr.key_u64(toks, 3, "size");
    const std::uint64_t count = lr.key_u64(toks, 4, "count");
    if (count > size) lr.fail("count exceeds size");
    sd.varrho.emplace_back(std::size_t(size),
                           lr.members(toks, 5, count, size, "row select"));
    sd.chop.row_parts.push_back(std::size_t(size));
    row_total += std::size_t(size);
  }
  for (std::uint64_t j = 0; j < b; ++j) {
    const std::vector<std::string> toks = split_ws(lr.expect_line("col line"));
    if (toks.empty() || toks[0] != "col") lr.fail("expected a col line");
    if (lr.key_u64(toks, 1, "j") != j) lr.fail("col lines out of order");
    if (lr.key_u64(toks, 2, "offset") != col_total)
      lr.fail("col offset disagrees with the part sizes");
    const std::uint64_t size = lr.key_u64(toks, 3, "size");
    const std::uint64_t count = lr.key_u64(toks, 4, "count");
    if (count > size) lr.fail("count exceeds size");
    sd.upsilon.emplace_back(std::size_t(size),
                            lr.members(toks, 5, count, size, "col select"));
    sd.chop.col_parts.push_back(std::size_t(size));
    col_total += std::size_t(size);
  }

  std::size_t rank_rows = 0, rank_cols = 0;
  for (const IndexSet& s : sd.varrho) rank_rows += s.size();
  for (const IndexSet& s : sd.upsilon) rank_cols += s.size();
  if (rank_rows != sd.rank || rank_cols != sd.rank)
    lr.fail("select counts disagree with the declared rank");

  const std::vector<std::string> gr =
      split_ws(lr.expect_line("global_rows line"));
  if (gr.empty() || gr[0] != "global_rows") lr.fail("expected global_rows");
  const std::uint64_t grc = lr.key_u64(gr, 1, "count");
  const std::vector<std::uint32_t> grm =
      lr.members(gr, 2, grc, row_total == 0 ? 1 : row_total, "global rows");
  const std::vector<std::string> gc =
      split_ws(lr.expect_line("global_cols line"));
  if (gc.empty() || gc[0] != "global_cols") lr.fail("expected global_cols");
  const std::uint64_t gcc = lr.key_u64(gc, 1, "count");
  const std::vector<std::uint32_t> gcm =
      lr.members(gc, 2, gcc, col_total == 0 ? 1 : col_total, "global cols");
  lr.expect_eof();

  std::vector<std::uint32_t> want_rows, want_cols;
  for (std::size_t i = 0; i < sd.varrho.size(); ++i)
    for (std::uint32_t v : sd.varrho[i].members)
      want_rows.push_back(std::uint32_t(sd.chop.row_offset(i)) + v);
  for (std::size_t j = 0; j < sd.upsilon.size(); ++j)
    for (std::uint32_t v : sd.upsilon[j].members)
      want_cols.push_back(std::uint32_t(sd.chop.col_offset(j)) + v);
  if (grm != want_rows)
    throw ParseError(path + ": global_rows disagrees with the per-block rows");
  if (gcm != want_cols)
    throw ParseError(path + ": global_cols disagrees with the per-block cols");
  return sd;
}

}  // namespace

EchelonOutput read_outputs(const std::string& r_path,
                           const std::string& selects_path,
                           const std::string& transform_path,
                           const FieldSpec& field) {
  GfMat rg = read_gfmat_file(r_path);
  if (rg.field != field)
    throw ParseError(r_path + ": field header does not match the input field");
  SelectsData sd = read_selects_file(selects_path);

  EchelonOutput out{field};
  out.chop = std::move(sd.chop);
  out.rank = sd.rank;
  out.varrho = std::move(sd.varrho);
  out.upsilon = std::move(sd.upsilon);
  out.with_transform = !transform_path.empty();

  const std::size_t a = out.chop.a(), b = out.chop.b();
  const std::size_t n = out.chop.cols();
  if (rg.matrix.rows() != out.rank || n < out.rank ||
      rg.matrix.cols() != n - out.rank)
    throw ParseError(r_path + ": remnant shape disagrees with the selects");

  out.R_blocks.assign(b, std::vector<Matrix>(b));
  std::size_t row0 = 0;
  for (std::size_t j = 0; j < b; ++j) {
    std::size_t col0 = 0;
    for (std::size_t l = 0; l < b; ++l) {
      const std::size_t height = out.upsilon[j].size();
      const std::size_t width = out.chop.col_parts[l] - out.upsilon[l].size();
      if (l >= j) {
        Matrix blk(height, width);
        for (std::size_t t = 0; t < height; ++t)
          for (std::size_t c = 0; c < width; ++c)
            blk.at(t, c) = rg.matrix.at(row0 + t, col0 + c);
        out.R_blocks[j][l] = std::move(blk);
      } else {
        for (std::size_t t = 0; t < height; ++t)
          for (std::size_t c = 0; c < width; ++c)
            if (rg.matrix.at(row0 + t, col0 + c) != 0)
              throw ParseError(
                  r_path + ": nonzero below the block diagonal at row " +
                  std::to_string(row0 + t) + ", column " +
                  std::to_string(col0 + c));
      }
      col0 += width;
    }
    row0 += out.upsilon[j].size();
  }

  if (out.with_transform) {
    std::ifstream in(transform_path, std::ios::binary);
    if (!in) throw ParseError(transform_path + ": cannot open");
    LineReader lr{in, transform_path};
    lr.expect_exact("TRANSFORM v1");
    const FieldSpec tf = parse_field_line(lr);
    if (tf != field)
      lr.fail("field header does not match the input field");
    const std::vector<std::string> head =
        split_ws(lr.expect_line("block_rows=..."));
    if (lr.key_u64(head, 0, "block_rows") != a ||
        lr.key_u64(head, 1, "block_cols") != b)
      lr.fail("block grid disagrees with the selects");
    if (head.size() != 2) lr.fail("unexpected tokens after block_cols=...");

    out.T_M_blocks.assign(b, std::vector<Matrix>(a));
    for (std::size_t j = 0; j < b; ++j)
      for (std::size_t h = 0; h < a; ++h) {
        const std::vector<std::string> toks =
            split_ws(lr.expect_line("M block header"));
        if (toks.empty() || toks[0] != "M") lr.fail("expected an M block");
        if (lr.key_u64(toks, 1, "j") != j || lr.key_u64(toks, 2, "h") != h)
          lr.fail("M blocks out of order");
        const std::uint64_t rows = lr.key_u64(toks, 3, "rows");
        const std::uint64_t cols = lr.key_u64(toks, 4, "cols");
        if (rows != out.upsilon[j].size() || cols != out.varrho[h].size())
          lr.fail("M block shape disagrees with the selects");
        out.T_M_blocks[j][h] =
            parse_matrix_body(lr, field, std::size_t(rows), std::size_t(cols));
      }
    out.T_K_blocks.resize(a);
    for (std::size_t i = 0; i < a; ++i) {
      out.T_K_blocks[i].resize(i + 1);
      for (std::size_t h = 0; h <= i; ++h) {
        const std::vector<std::string> toks =
            split_ws(lr.expect_line("K block header"));
        if (toks.empty() || toks[0] != "K") lr.fail("expected a K block");
        if (lr.key_u64(toks, 1, "i") != i || lr.key_u64(toks, 2, "h") != h)
          lr.fail("K blocks out of order");
        const std::uint64_t rows = lr.key_u64(toks, 3, "rows");
        const std::uint64_t cols = lr.key_u64(toks, 4, "cols");
        if (rows != out.chop.row_parts[i] - out.varrho[i].size() ||
            cols != out.varrho[h].size())
          lr.fail("K block shape disagrees with the selects");
        out.T_K_blocks[i][h] =
            parse_matrix_body(lr, field, std::size_t(rows), std::size_t(cols));
      }
    }
    lr.expect_eof();
  }
  return out;
}

namespace {

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

void parse_field_arg(const std::string& text, std::uint32_t& p,
                     std::uint32_t& k) {
  const std::size_t caret = text.find('^');
  std::uint64_t pv = 0, kv = 1;
  if (!parse_u64(caret == std::string::npos ? text : text.substr(0, caret), pv))
    throw ParseError("invalid field argument: " + text);
  if (caret != std::string::npos && !parse_u64(text.substr(caret + 1), kv))
    throw ParseError("invalid field argument: " + text);
  if (pv < 2 || pv >= (1u << 20) || kv < 1 || kv > 20)
    throw ParseError("field argument out of range: " + text);
  // A composite order given without '^' selects the extension field of that
  // order: factor it as a prime power (e.g. 9 -> 3^2, 1331 -> 11^3).
  if (caret == std::string::npos && !is_prime_u64(pv)) {
    std::uint64_t base = 2;
    while (pv % base != 0) ++base;
    std::uint64_t rest = pv, exp = 0;
    while (rest % base == 0) {
      rest /= base;
      ++exp;
    }
    if (rest != 1)
      throw ParseError("field order is not a prime power: " + text);
    pv = base;
    kv = exp;
  }
  if (pv >= (1u << 16))
    throw ParseError("field characteristic out of range: " + text);
  p = std::uint32_t(pv);
  k = std::uint32_t(kv);
}

std::vector<std::uint32_t> parse_modulus_arg(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = comma == std::string::npos
                                ? text.substr(pos)
                                : text.substr(pos, comma - pos);
    std::uint64_t v = 0;
    if (!parse_u64(tok, v) || v >= (1u << 16))
      throw ParseError("invalid modulus coefficient: '" + tok + "'");
    out.push_back(std::uint32_t(v));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace gfrref
