#pragma once

#include <string>

#include <json.hpp>

#include "bellcat/bell.hpp"
#include "bellcat/catalysis.hpp"
#include "bellcat/instruments.hpp"
#include "bellcat/qstate.hpp"

namespace bellcat {

using Json = nlohmann::json;

// Complex matrices travel as row-major [[re, im], ...] arrays. Square shapes
// are implied by the label dims; rectangular Kraus operators carry explicit
// rows/cols. Values round-trip exactly.

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols);

Json rect_matrix_to_json(const Matrix& m);
Matrix rect_matrix_from_json(const Json& j);

void to_json(Json& j, const SubsystemLabel& label);
void from_json(const Json& j, SubsystemLabel& label);

void to_json(Json& j, const DensityMatrix& s);
void from_json(const Json& j, DensityMatrix& s);

void to_json(Json& j, const BellFunctional& f);
void from_json(const Json& j, BellFunctional& f);

void to_json(Json& j, const MeasurementAssemblage& m);
void from_json(const Json& j, MeasurementAssemblage& m);

void to_json(Json& j, const BranchedCqState& b);
void from_json(const Json& j, BranchedCqState& b);

void to_json(Json& j, const QuantumInstrument& inst);
void from_json(const Json& j, QuantumInstrument& inst);

/// Instrument scenario file: system state, catalyst, both instruments, and
/// optional input distributions (uniform when absent).
struct InstrumentScenario {
  DensityMatrix rho;
  DensityMatrix omega;
  QuantumInstrument instA;
  QuantumInstrument instB;
  InputDistribution inputs;
};

void to_json(Json& j, const InstrumentScenario& s);
void from_json(const Json& j, InstrumentScenario& s);

/// Parses a file, wrapping syntax errors as ParseError with the byte
/// position reported by the JSON parser.
Json load_json_file(const std::string& path);

void save_json_file(const std::string& path, const Json& j);

} // namespace bellcat
