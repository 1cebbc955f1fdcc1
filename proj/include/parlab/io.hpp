#pragma once

#include <string>

#include "parlab/grid.hpp"
#include "parlab/operators.hpp"
#include "parlab/solver.hpp"

namespace parlab {

// Field dump: CSV with columns t,x1[,x2],value (slice-major, ix fastest) plus
// a JSON sidecar <path>.meta.json with the grid and equation parameters.
// Doubles are printed with %.17g so a dump/load round trip is bit-exact.
void dump_field_csv(const ScalarField& field, const std::string& csv_path,
                    const EquationParams& params, const std::string& source_text = "");

ScalarField load_field_csv(const std::string& csv_path);

std::string format_double(double v); // %.17g

} // namespace parlab
