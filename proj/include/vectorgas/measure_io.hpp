#pragma once

#include <string>
#include <variant>

#include "vectorgas/measures.hpp"

namespace vectorgas {

// Measures travel as a CSV table plus a "<path>.json" sidecar naming the
// shape. Values are printed with enough digits to round-trip binary64
// exactly, so read_measure after write_measure reproduces the measure.
using MeasureFile = std::variant<GridMeasure, EmpiricalMeasure, SphereMeasure>;

void write_measure(const std::string& path, const GridMeasure& m);
void write_measure(const std::string& path, const EmpiricalMeasure& m);
void write_measure(const std::string& path, const SphereMeasure& m);
void write_measure(const std::string& path, const MeasureFile& m);

MeasureFile read_measure(const std::string& path);

}  // namespace vectorgas
