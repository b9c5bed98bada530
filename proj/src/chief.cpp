#include "gfrref/chief.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "gfrref/jobs.hpp"

namespace gfrref {

std::size_t ChopSpec::rows() const {
  return std::accumulate(row_parts.begin(), row_parts.end(), std::size_t(0));
}

std::size_t ChopSpec::cols() const {
  return std::accumulate(col_parts.begin(), col_parts.end(), std::size_t(0));
}

std::size_t ChopSpec::row_offset(std::size_t i) const {
  return std::accumulate(row_parts.begin(), row_parts.begin() + i,
                         std::size_t(0));
}

std::size_t ChopSpec::col_offset(std::size_t j) const {
  return std::accumulate(col_parts.begin(), col_parts.begin() + j,
                         std::size_t(0));
}

namespace {

std::vector<std::size_t> chop_axis(std::size_t total, std::size_t block,
                                   bool remainder_first) {
  std::vector<std::size_t> parts;
  const std::size_t full = total / block, rem = total % block;
  parts.reserve(full + (rem ? 1 : 0));
  if (rem && remainder_first) parts.push_back(rem);
  for (std::size_t i = 0; i < full; ++i) parts.push_back(block);
  if (rem && !remainder_first) parts.push_back(rem);
  return parts;
}

}  // namespace

ChopSpec chop(std::size_t m, std::size_t n, std::size_t block,
              bool remainder_first) {
  if (block < 1) throw std::invalid_argument("chop: block must be >= 1");
  ChopSpec cs;
  cs.row_parts = chop_axis(m, block, remainder_first);
  cs.col_parts = chop_axis(n, block, remainder_first);
  return cs;
}

namespace {

Matrix block_of(const Matrix& C, std::size_t r0, std::size_t rc,
                std::size_t c0, std::size_t cc) {
  Matrix out(rc, cc);
  for (std::size_t i = 0; i < rc; ++i)
    for (std::size_t j = 0; j < cc; ++j) out.at(i, j) = C.at(r0 + i, c0 + j);
  return out;
}

}  // namespace

PlanHandles build_plan(TaskGraph& graph, const Matrix& C,
                       const FieldSpec& field, const ChopSpec& cs,
                       bool with_transform) {
  const std::size_t a = cs.a(), b = cs.b();
  if (a == 0 || b == 0)
    throw std::invalid_argument("build_plan: empty partition");
  if (cs.rows() != C.rows() || cs.cols() != C.cols())
    throw std::invalid_argument("build_plan: partition does not match matrix");
  graph.set_field(field);

  const auto u16 = [](std::size_t v) { return std::uint16_t(v); };
  const auto sC = [&](std::size_t i, std::size_t k, std::size_t v) {
    return graph.require_slot({PkgKind::C, u16(i), u16(k), 0, u16(v)});
  };
  const auto sD = [&](std::size_t j, std::size_t v) {
    return graph.require_slot({PkgKind::D, u16(j), 0, 0, u16(v)});
  };
  const auto sA = [&](std::size_t i, std::size_t j) {
    return graph.require_slot({PkgKind::A, u16(i), u16(j), 0, 0});
  };
  const auto sB = [&](std::size_t j, std::size_t k, std::size_t v) {
    return graph.require_slot({PkgKind::B, u16(j), u16(k), 0, u16(v)});
  };
  const auto sE = [&](std::size_t i, std::size_t v) {
    return graph.require_slot({PkgKind::E, u16(i), 0, 0, u16(v)});
  };
  const auto sK = [&](std::size_t i, std::size_t h, std::size_t v) {
    return graph.require_slot({PkgKind::K, u16(i), u16(h), 0, u16(v)});
  };
  const auto sM = [&](std::size_t j, std::size_t h, std::size_t v) {
    return graph.require_slot({PkgKind::M, u16(j), u16(h), 0, u16(v)});
  };
  const auto sR = [&](std::size_t j, std::size_t l, std::size_t v) {
    return graph.require_slot({PkgKind::R, u16(j), u16(l), 0, u16(v)});
  };
  const auto sX = [&](std::size_t j, std::size_t k) {
    return graph.require_slot({PkgKind::X, u16(j), u16(k), 0, 0});
  };

  // Input blocks.
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j)
      graph.add_input({PkgKind::C, u16(i), u16(j), 0, 0},
                      block_of(C, cs.row_offset(i), cs.row_parts[i],
                               cs.col_offset(j), cs.col_parts[j]));

  // Step 1: eliminate column block j with row block i, fan the pivots right.
  for (std::size_t j = 0; j < b; ++j) {
    for (std::size_t i = 0; i < a; ++i) {
      const std::int32_t pri = std::int32_t(i + j);
      TaskNode cd;
      cd.kind = TaskKind::ClearDown;
      cd.c0 = std::int32_t(i);
      cd.c1 = std::int32_t(j);
      cd.priority = pri;
      cd.in[0] = sC(i, j, j);
      cd.n_in = 1;
      if (i > 0) cd.in[cd.n_in++] = sD(j, i - 1);
      cd.out[0] = sD(j, i);
      cd.out[1] = sA(i, j);
      cd.n_out = 2;
      graph.plan_add(cd);

      TaskNode ex;
      ex.kind = TaskKind::Extend;
      ex.c0 = std::int32_t(i);
      ex.c1 = std::int32_t(j);
      ex.priority = pri;
      ex.in[0] = sA(i, j);
      ex.n_in = 1;
      if (j > 0) ex.in[ex.n_in++] = sE(i, j - 1);
      ex.out[0] = sE(i, j);
      ex.n_out = 1;
      graph.plan_add(ex);

      for (std::size_t k = j + 1; k < b; ++k) {
        TaskNode ur;
        ur.kind = TaskKind::UpdateRow;
        ur.c0 = std::int32_t(i);
        ur.c1 = std::int32_t(j);
        ur.c2 = std::int32_t(k);
        ur.priority = pri;
        ur.in[0] = sA(i, j);
        ur.in[1] = sC(i, k, j);
        ur.n_in = 2;
        if (i > 0) ur.in[ur.n_in++] = sB(j, k, i - 1);
        ur.out[0] = sC(i, k, j + 1);
        ur.out[1] = sB(j, k, i);
        ur.n_out = 2;
        graph.plan_add(ur);
      }

      if (with_transform) {
        for (std::size_t h = 0; h <= i; ++h) {
          TaskNode tr;
          tr.kind = TaskKind::UpdateRowTrafo;
          tr.c0 = std::int32_t(i);
          tr.c1 = std::int32_t(j);
          tr.c2 = std::int32_t(h);
          tr.priority = pri;
          tr.in[0] = sA(i, j);
          tr.in[1] = sE(h, j);
          tr.n_in = 2;
          if (j > 0) tr.in[tr.n_in++] = sK(i, h, j - 1);
          if (h < i) tr.in[tr.n_in++] = sM(j, h, i - 1 - h);
          tr.out[0] = sK(i, h, j);
          tr.out[1] = sM(j, h, i - h);
          tr.n_out = 2;
          graph.plan_add(tr);
        }
      }
    }
  }

  // Step 2: widen every multiplier block to the block row's final pivot set.
  if (with_transform) {
    for (std::size_t j = 0; j < b; ++j) {
      for (std::size_t h = 0; h < a; ++h) {
        TaskNode rl;
        rl.kind = TaskKind::RowLengthen;
        rl.c1 = std::int32_t(j);
        rl.c2 = std::int32_t(h);
        rl.priority = std::int32_t(a + b - 1);
        rl.in[0] = sM(j, h, a - 1 - h);
        rl.in[1] = sE(h, j);
        rl.in[2] = sE(h, b - 1);
        rl.n_in = 3;
        rl.out[0] = sM(j, h, a - h);
        rl.n_out = 1;
        graph.plan_add(rl);
      }
    }
  }

  // Step 3: clear the pivots of column block k out of every block row above,
  // in descending rounds so each round's sources are already final.
  for (std::size_t k = 0; k < b; ++k) {
    TaskNode cp;
    cp.kind = TaskKind::Copy;
    cp.c1 = std::int32_t(k);
    cp.priority = std::int32_t(a + b + (b - 1 - k));
    cp.in[0] = sD(k, a - 1);
    cp.n_in = 1;
    cp.out[0] = sR(k, k, 0);
    cp.n_out = 1;
    graph.plan_add(cp);
  }
  for (std::size_t k = b; k-- > 1;) {
    const std::int32_t pri = std::int32_t(a + b + (b - 1 - k));
    for (std::size_t j = 0; j < k; ++j) {
      TaskNode pcu;
      pcu.kind = TaskKind::PreClearUp;
      pcu.c1 = std::int32_t(j);
      pcu.c2 = std::int32_t(k);
      pcu.priority = pri;
      pcu.in[0] = sB(j, k, a - 1);
      pcu.in[1] = sD(k, a - 1);
      pcu.n_in = 2;
      pcu.out[0] = sX(j, k);
      pcu.out[1] = sR(j, k, 0);
      pcu.n_out = 2;
      graph.plan_add(pcu);

      for (std::size_t l = k; l < b; ++l) {
        TaskNode cu;
        cu.kind = TaskKind::ClearUp;
        cu.c0 = std::int32_t(k);
        cu.c1 = std::int32_t(j);
        cu.c2 = std::int32_t(l);
        cu.priority = pri;
        cu.in[0] = sR(j, l, l - k);
        cu.in[1] = sX(j, k);
        cu.in[2] = sR(k, l, l - k);
        cu.n_in = 3;
        cu.out[0] = sR(j, l, l - k + 1);
        cu.n_out = 1;
        graph.plan_add(cu);
      }
      if (with_transform) {
        for (std::size_t h = 0; h < a; ++h) {
          TaskNode cu;
          cu.kind = TaskKind::ClearUp;
          cu.c0 = std::int32_t(k);
          cu.c1 = std::int32_t(j);
          cu.c2 = std::int32_t(h);
          cu.priority = pri;
          cu.in[0] = sM(j, h, a - h + (b - 1 - k));
          cu.in[1] = sX(j, k);
          cu.in[2] = sM(k, h, a - h + (b - 1 - k));
          cu.n_in = 3;
          cu.out[0] = sM(j, h, a - h + (b - k));
          cu.n_out = 1;
          graph.plan_add(cu);
        }
      }
    }
  }

  PlanHandles handles;
  handles.d_final.resize(b);
  for (std::size_t j = 0; j < b; ++j) handles.d_final[j] = sD(j, a - 1);
  handles.e_final.resize(a);
  for (std::size_t i = 0; i < a; ++i) handles.e_final[i] = sE(i, b - 1);
  handles.r_final.assign(b, std::vector<std::int32_t>(b, -1));
  for (std::size_t j = 0; j < b; ++j)
    for (std::size_t l = j; l < b; ++l) handles.r_final[j][l] = sR(j, l, l - j);
  if (with_transform) {
    handles.m_final.assign(b, std::vector<std::int32_t>(a, -1));
    for (std::size_t j = 0; j < b; ++j)
      for (std::size_t h = 0; h < a; ++h)
        handles.m_final[j][h] = sM(j, h, a - h + (b - 1 - j));
    handles.k_final.resize(a);
    for (std::size_t i = 0; i < a; ++i) {
      handles.k_final[i].resize(i + 1);
      for (std::size_t h = 0; h <= i; ++h)
        handles.k_final[i][h] = sK(i, h, b - 1);
    }
  }
  graph.drop_key_index_if_large();
  return handles;
}

namespace {

EchelonOutput empty_output(const Matrix& C, const FieldSpec& field,
                           const ChopSpec& cs, bool with_transform) {
  EchelonOutput out{field};
  out.chop = cs;
  out.with_transform = with_transform;
  const std::size_t a = cs.a(), b = cs.b();
  out.upsilon.reserve(b);
  for (std::size_t j = 0; j < b; ++j)
    out.upsilon.emplace_back(cs.col_parts[j], std::vector<std::uint32_t>{});
  out.varrho.reserve(a);
  for (std::size_t i = 0; i < a; ++i)
    out.varrho.emplace_back(cs.row_parts[i], std::vector<std::uint32_t>{});
  out.R_blocks.assign(b, std::vector<Matrix>(b));
  for (std::size_t j = 0; j < b; ++j)
    for (std::size_t l = j; l < b; ++l)
      out.R_blocks[j][l] = Matrix(0, cs.col_parts[l]);
  if (with_transform) {
    out.T_M_blocks.assign(b, std::vector<Matrix>(a));
    out.T_K_blocks.resize(a);
    for (std::size_t i = 0; i < a; ++i) {
      out.T_K_blocks[i].resize(i + 1);
      for (std::size_t h = 0; h <= i; ++h)
        out.T_K_blocks[i][h] = Matrix(cs.row_parts[i], 0);
    }
  }
  (void)C;
  return out;
}

}  // namespace

EchelonOutput echelonize(const Matrix& C, const FieldSpec& field,
                         const EchelonizeOptions& options, RunReport* report) {
  const ChopSpec cs =
      chop(C.rows(), C.cols(), options.block, options.remainder_first);
  if (cs.a() == 0 || cs.b() == 0) {
    if (report) *report = RunReport{};
    return empty_output(C, field, cs, options.with_transform);
  }

  TaskGraph graph;
  graph.ech_threshold = options.ech_threshold;
  const PlanHandles h =
      build_plan(graph, C, field, cs, options.with_transform);
  for (std::int32_t id : h.d_final) graph.retain(id);
  for (std::int32_t id : h.e_final) graph.retain(id);
  for (const auto& row : h.r_final)
    for (std::int32_t id : row)
      if (id >= 0) graph.retain(id);
  for (const auto& row : h.m_final)
    for (std::int32_t id : row)
      if (id >= 0) graph.retain(id);
  for (const auto& row : h.k_final)
    for (std::int32_t id : row)
      if (id >= 0) graph.retain(id);

  RunOptions ro;
  ro.workers = options.threads;
  ro.collect_trace = options.collect_trace;
  ro.retain_all = options.retain_all;
  RunReport rep = run(graph, ro);
  if (report) *report = std::move(rep);

  const std::size_t a = cs.a(), b = cs.b();
  EchelonOutput out{field};
  out.chop = cs;
  out.with_transform = options.with_transform;
  out.upsilon.reserve(b);
  for (std::size_t j = 0; j < b; ++j) {
    const PkgD& d = std::get<PkgD>(*graph.payload(h.d_final[j]));
    out.rank += d.gamma.size();
    out.upsilon.push_back(d.gamma);
  }
  out.varrho.reserve(a);
  for (std::size_t i = 0; i < a; ++i)
    out.varrho.push_back(std::get<PkgE>(*graph.payload(h.e_final[i])).rho);
  out.R_blocks.assign(b, std::vector<Matrix>(b));
  for (std::size_t j = 0; j < b; ++j)
    for (std::size_t l = j; l < b; ++l)
      out.R_blocks[j][l] = std::get<Matrix>(*graph.payload(h.r_final[j][l]));
  if (options.with_transform) {
    out.T_M_blocks.assign(b, std::vector<Matrix>(a));
    for (std::size_t j = 0; j < b; ++j)
      for (std::size_t h2 = 0; h2 < a; ++h2)
        out.T_M_blocks[j][h2] =
            std::get<Matrix>(*graph.payload(h.m_final[j][h2]));
    out.T_K_blocks.resize(a);
    for (std::size_t i = 0; i < a; ++i) {
      out.T_K_blocks[i].resize(i + 1);
      for (std::size_t h2 = 0; h2 <= i; ++h2)
        out.T_K_blocks[i][h2] =
            std::get<Matrix>(*graph.payload(h.k_final[i][h2]));
    }
  }
  return out;
}

std::vector<std::uint32_t> EchelonOutput::global_upsilon() const {
  std::vector<std::uint32_t> out;
  out.reserve(rank);
  for (std::size_t j = 0; j < upsilon.size(); ++j) {
    const std::uint32_t off = std::uint32_t(chop.col_offset(j));
    for (std::uint32_t v : upsilon[j].members) out.push_back(off + v);
  }
  return out;
}

std::vector<std::uint32_t> EchelonOutput::global_varrho() const {
  std::vector<std::uint32_t> out;
  out.reserve(rank);
  for (std::size_t i = 0; i < varrho.size(); ++i) {
    const std::uint32_t off = std::uint32_t(chop.row_offset(i));
    for (std::uint32_t v : varrho[i].members) out.push_back(off + v);
  }
  return out;
}

Matrix EchelonOutput::assembled_R() const {
  const std::size_t n = chop.cols();
  Matrix out(rank, n - rank);
  std::size_t row = 0;
  for (std::size_t j = 0; j < upsilon.size(); ++j) {
    for (std::size_t t = 0; t < upsilon[j].size(); ++t, ++row) {
      std::size_t col = 0;
      for (std::size_t l = 0; l < upsilon.size(); ++l) {
        const std::size_t width = chop.col_parts[l] - upsilon[l].size();
        if (l >= j)
          for (std::size_t c = 0; c < width; ++c)
            out.at(row, col + c) = R_blocks[j][l].at(t, c);
        col += width;
      }
    }
  }
  return out;
}

EchResult oracle_rref(const FieldSpec& f, const Matrix& C) {
  const std::size_t m = C.rows(), n = C.cols();
  Matrix w = C;
  Matrix t(m, m);
  for (std::size_t i = 0; i < m; ++i) t.at(i, i) = 1;
  std::vector<bool> is_pivot_row(m, false);
  std::vector<std::uint32_t> pivot_rows;  // by pivot column order
  std::vector<std::uint32_t> pivot_cols;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t sel = m;
    for (std::size_t row = 0; row < m; ++row) {
      if (!is_pivot_row[row] && w.at(row, col) != 0) {
        sel = row;
        break;
      }
    }
    if (sel == m) continue;
    const Elem scale = f.neg(f.inv(w.at(sel, col)));
    for (std::size_t c = 0; c < n; ++c) w.at(sel, c) = f.mul(scale, w.at(sel, c));
    for (std::size_t c = 0; c < m; ++c) t.at(sel, c) = f.mul(scale, t.at(sel, c));
    for (std::size_t row = 0; row < m; ++row) {
      if (row == sel) continue;
      const Elem v = w.at(row, col);
      if (v == 0) continue;
      for (std::size_t c = 0; c < n; ++c)
        w.at(row, c) = f.add(w.at(row, c), f.mul(v, w.at(sel, c)));
      for (std::size_t c = 0; c < m; ++c)
        t.at(row, c) = f.add(t.at(row, c), f.mul(v, t.at(sel, c)));
    }
    is_pivot_row[sel] = true;
    pivot_rows.push_back(std::uint32_t(sel));
    pivot_cols.push_back(std::uint32_t(col));
  }

  const std::size_t r = pivot_rows.size();
  std::vector<std::uint32_t> rho_sorted = pivot_rows;
  std::sort(rho_sorted.begin(), rho_sorted.end());

  EchResult out;
  out.rho = IndexSet(m, rho_sorted);
  out.gamma = IndexSet(n, pivot_cols);
  const IndexSet gamma_rest = index_set_complement(out.gamma);
  out.M = Matrix(r, r);
  out.R = Matrix(r, n - r);
  for (std::size_t p = 0; p < r; ++p) {
    for (std::size_t s = 0; s < r; ++s)
      out.M.at(p, s) = t.at(pivot_rows[p], rho_sorted[s]);
    for (std::size_t c = 0; c < n - r; ++c)
      out.R.at(p, c) = w.at(pivot_rows[p], gamma_rest.members[c]);
  }
  out.K = Matrix(m - r, r);
  std::size_t u = 0;
  for (std::size_t row = 0; row < m; ++row) {
    if (is_pivot_row[row]) continue;
    for (std::size_t s = 0; s < r; ++s)
      out.K.at(u, s) = t.at(row, rho_sorted[s]);
    ++u;
  }
  return out;
}

Matrix materialize_transform(const EchelonOutput& out) {
  if (!out.with_transform)
    throw std::logic_error("transformation was not computed");
  const std::size_t m = out.chop.rows();
  const std::size_t a = out.chop.a(), b = out.chop.b();
  Matrix t(m, m);
  std::size_t row = 0;
  for (std::size_t j = 0; j < b; ++j) {
    for (std::size_t p = 0; p < out.upsilon[j].size(); ++p, ++row) {
      for (std::size_t h = 0; h < a; ++h) {
        const std::size_t off = out.chop.row_offset(h);
        const Matrix& mjh = out.T_M_blocks[j][h];
        for (std::size_t s = 0; s < out.varrho[h].size(); ++s)
          t.at(row, off + out.varrho[h].members[s]) = mjh.at(p, s);
      }
    }
  }
  for (std::size_t i = 0; i < a; ++i) {
    const std::size_t off = out.chop.row_offset(i);
    const IndexSet rest = index_set_complement(out.varrho[i]);
    for (std::size_t u = 0; u < rest.size(); ++u, ++row) {
      t.at(row, off + rest.members[u]) = 1;
      for (std::size_t h = 0; h <= i; ++h) {
        const std::size_t hoff = out.chop.row_offset(h);
        const Matrix& kih = out.T_K_blocks[i][h];
        for (std::size_t s = 0; s < out.varrho[h].size(); ++s)
          t.at(row, hoff + out.varrho[h].members[s]) = kih.at(u, s);
      }
    }
  }
  return t;
}

namespace {

bool report_fail(std::string* diag, const std::string& msg) {
  if (diag) *diag = msg;
  return false;
}

}  // namespace

bool verify(const Matrix& C, const EchelonOutput& out, std::string* diag,
            const EchResult* oracle) {
  const FieldSpec& f = out.field;
  if (out.chop.rows() != C.rows() || out.chop.cols() != C.cols())
    return report_fail(diag, "partition does not match the input matrix");

  std::size_t rank_cols = 0, rank_rows = 0;
  for (const IndexSet& g : out.upsilon) rank_cols += g.size();
  for (const IndexSet& r : out.varrho) rank_rows += r.size();
  if (rank_cols != out.rank || rank_rows != out.rank)
    return report_fail(diag, "select sets disagree with the reported rank");

  EchResult local;
  if (!oracle) {
    local = oracle_rref(f, C);
    oracle = &local;
  }
  if (oracle->gamma.size() != out.rank)
    return report_fail(diag, "rank differs from the reference elimination");
  const std::vector<std::uint32_t> gups = out.global_upsilon();
  if (gups != oracle->gamma.members)
    return report_fail(diag, "pivot columns differ from the reference");
  const Matrix rasm = out.assembled_R();
  if (rasm.rows() != oracle->R.rows() || rasm.cols() != oracle->R.cols())
    return report_fail(diag, "remnant shape differs from the reference");
  if (!mat_eq(rasm, oracle->R)) {
    for (std::size_t r = 0; r < rasm.rows(); ++r)
      for (std::size_t c = 0; c < rasm.cols(); ++c)
        if (rasm.at(r, c) != oracle->R.at(r, c))
          return report_fail(diag, "remnant differs from the reference at row " +
                                       std::to_string(r) + ", column " +
                                       std::to_string(c));
    return report_fail(diag, "remnant differs from the reference");
  }

  if (out.with_transform) {
    const Matrix t = materialize_transform(out);
    const Matrix p = mat_mul(f, t, C);
    const std::size_t m = C.rows(), n = C.cols();
    Matrix expected(m, n);
    const Elem minus_one = f.neg(f.one());
    IndexSet gset(n, gups);
    const IndexSet grest = index_set_complement(gset);
    for (std::size_t r = 0; r < out.rank; ++r) {
      expected.at(r, gups[r]) = minus_one;
      for (std::size_t c = 0; c < grest.size(); ++c)
        expected.at(r, grest.members[c]) = rasm.at(r, c);
    }
    if (!mat_eq(p, expected)) {
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c)
          if (p.at(r, c) != expected.at(r, c))
            return report_fail(diag, "transformed input differs at row " +
                                         std::to_string(r) + ", column " +
                                         std::to_string(c));
      return report_fail(diag, "transformed input differs");
    }
  }
  return true;
}

}  // namespace gfrref
