#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "cvls/analysis.hpp"

namespace cvls::io {

using json = nlohmann::json;

/// {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order. On
/// input a plain number stands for a real entry.
json toJson(const CMatrix& m);
CMatrix matrixFromJson(const json& j);

/// Real matrices use the same layout; non-zero imaginary parts are rejected.
RMatrix realMatrixFromJson(const json& j);

/// {"first": ..., "second": ...}
json toJson(const BimatrixD& b);
BimatrixD bimatrixFromJson(const json& j);

/// A bimatrix object, or a bare matrix M read as {M, 0}.
BimatrixD bimatrixOrMatrixFromJson(const json& j);

/// [[re, im], ...]; plain numbers are accepted on input.
json toJson(const Spectrum& s);
Spectrum spectrumFromJson(const json& j);

/// Vectors share the spectrum layout.
json vectorToJson(const CVector& v);
CVector vectorFromJson(const json& j);

/// {"domain": ..., "n", "m", "p", "A1", ..., "D2"}. Zero blocks may be
/// omitted on input. A "real_system" block {"A", "B", "C", "D"} is accepted
/// only together with "convert": true and goes through fromRealSystem.
json systemToJson(const CxSystem& sys);
CxSystem systemFromJson(const json& j);

/// {"domain", "A", "B", "C", "D"} with real matrices.
RealSystem realSystemFromJson(const json& j);

json readJsonFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& text);
CxSystem readSystemFile(const std::string& path);

/// Header t,x1_re,x1_im,...,u1_re,u1_im,...,y1_re,y1_im,...
void writeTraceCsv(std::ostream& os, const SimTrace& trace);

}  // namespace cvls::io
