#ifndef SHIFTQP_IO_HPP
#define SHIFTQP_IO_HPP

#include <iosfwd>
#include <string>

#include "shiftqp/model.hpp"

namespace shiftqp {

// ODQP v1, a line-oriented text container for one QP:
//
//   odqp 1
//   n m p
//   Q        <- block header, then one line per matrix row
//   ...
//   c        <- vectors are a single line of entries
//   A  b  G  h follow in that order; dimension-zero blocks keep the
//   header line and emit no data lines.
//
// '#' starts a comment; blank lines are ignored. Numbers are written with
// 17 significant digits so save/load round-trips bit-exactly.

void save_qp(std::ostream& out, const QpModel& qp);
void save_qp(const std::string& path, const QpModel& qp);

/// Throws ParseError (with 1-based line number) on malformed input,
/// including trailing non-comment content after the final block.
QpModel load_qp(std::istream& in);
QpModel load_qp(const std::string& path);

}  // namespace shiftqp

#endif
