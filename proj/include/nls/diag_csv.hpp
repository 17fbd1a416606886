#pragma once

#include <string>
#include <vector>

#include "nls/diagnostics.hpp"

namespace nls {

// CSV with a schema comment line, a header row, and one record per line.
// Floats carry 17 significant digits (value-exact round trip); absent
// optionals are empty cells. Column order follows DiagnosticRecord field
// order; vector quantities emit one column per grid axis.
void write_diagnostics(const std::vector<DiagnosticRecord>& records, const std::string& path,
                       int dim);

std::string diagnostics_header(int dim);

}  // namespace nls
