#pragma once

#include "stabpencil/analysis.hpp"
#include "stabpencil/pencil.hpp"
#include "stabpencil/projection.hpp"
#include "stabpencil/trust_region.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <variant>

namespace stabpencil {

class IoError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

using AnyPencil = std::variant<Pencil<double>, Pencil<Complex>>;

std::string to_string(Field f);
Field parse_field(const std::string &s);
StabilityRegion parse_region(const std::string &s);
InitKind parse_init(const std::string &s);

/// Pencil file schema: {"n", "field": "real"|"complex", "A_re", "B_re"[, "A_im", "B_im"]},
/// each array row-major of length n^2. The imaginary arrays are omitted for real pencils.
nlohmann::json pencil_to_json(const Pencil<double> &P);
nlohmann::json pencil_to_json(const Pencil<Complex> &P);
AnyPencil pencil_from_json(const nlohmann::json &j);

/// Reinterpret a pencil in the requested field. Complex -> real requires zero imaginary parts.
Pencil<double> as_real(const AnyPencil &P);
Pencil<Complex> as_complex(const AnyPencil &P);

std::string read_text(const std::filesystem::path &path);
void write_text(const std::filesystem::path &path, const std::string &text);

AnyPencil read_pencil_file(const std::filesystem::path &path);
void write_pencil_file(const std::filesystem::path &path, const AnyPencil &P);

nlohmann::json projection_to_json(const ScalarPencil &input, const ProjectionResult &r);

/// Everything the `solve` subcommand records about a run.
template <typename Scalar>
struct SolveRecord {
  StabilityRegion region = StabilityRegion::Hurwitz;
  Pencil<Scalar> input;
  MinimizerResult<Scalar> result;
  StabilityVerdict stability = StabilityVerdict::Stable;
  JordanReport jordan;
  std::optional<Pencil<Scalar>> regularized;
  SolveReport<Scalar> report;
};

nlohmann::json record_to_json(const SolveRecord<double> &rec);
nlohmann::json record_to_json(const SolveRecord<Complex> &rec);

/// Parsed view of a result file: the pieces needed to re-verify a run.
struct ResultFile {
  StabilityRegion region = StabilityRegion::Hurwitz;
  AnyPencil input;
  AnyPencil pencil;
  AnyPencil triangular;
  double squared_distance = 0.0;
  std::string stability;
  std::string stop_reason;
};

ResultFile result_from_json(const nlohmann::json &j);

/// Decimal with 17 significant digits (round-trips every double).
std::string format_double(double v);

} // namespace stabpencil
