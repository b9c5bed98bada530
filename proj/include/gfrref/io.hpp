#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "gfrref/chief.hpp"

namespace gfrref {

/// Parse/serialization failures carry a message naming file and line.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// GFMAT v1 text format:
///   GFMAT v1
///   field p=<p> k=<k> [modulus=<c0,...,ck>]     (modulus present iff k>1)
///   rows=<m> cols=<n>
///   <m lines of n space-separated encodings in [0, p^k)>
struct GfMat {
  FieldSpec field;
  Matrix matrix;
};

GfMat read_gfmat(std::istream& in, const std::string& name = "<stream>");
GfMat read_gfmat_file(const std::string& path);
void write_gfmat(std::ostream& out, const FieldSpec& field, const Matrix& m);
void write_gfmat_file(const std::string& path, const FieldSpec& field,
                      const Matrix& m);

/// Selects file: per block row the selected rows E_i.rho, per block column the
/// pivot columns D_j.gamma (both 0-based, with offsets), plus the global
/// concatenations and the rank.
void write_selects(std::ostream& out, const EchelonOutput& res);
void write_selects_file(const std::string& path, const EchelonOutput& res);

/// Transform file: the M (b×a) and K (lower-triangular a×a) block grids with
/// coordinates and shapes.
void write_transform(std::ostream& out, const EchelonOutput& res);
void write_transform_file(const std::string& path, const EchelonOutput& res);

/// Rebuild an EchelonOutput from the three files written by cmd_ech
/// (R matrix, selects, optional transform). Field and chop geometry are
/// recovered from the files; throws ParseError on any inconsistency.
EchelonOutput read_outputs(const std::string& r_path,
                           const std::string& selects_path,
                           const std::string& transform_path,  // "" if none
                           const FieldSpec& field);

/// Parse "p" or "p^k" (e.g. "2", "3^2").
void parse_field_arg(const std::string& text, std::uint32_t& p,
                     std::uint32_t& k);

/// Parse "c0,c1,...,ck".
std::vector<std::uint32_t> parse_modulus_arg(const std::string& text);

}  // namespace gfrref
