#ifndef NLS_IO_HPP
#define NLS_IO_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nls/csr.hpp"
#include "nls/schwarz.hpp"

namespace nls {

// shortest round-trip decimal form of a double
std::string format_double(double v);

// MatrixMarket coordinate format (1-based indices).
void export_matrix_market(const CSR& a, std::ostream& os);

// CSV trace: header `iteration,residual`, one row per recorded residual.
void export_trace_csv(const IterationTrace& trace, std::ostream& os,
                      const std::vector<std::string>& header_notes = {});

// Flat key=value configuration file; '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::string& path);

}  // namespace nls

#endif
