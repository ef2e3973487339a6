#include "cvls/io.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace cvls::io {

namespace {

cdouble entryFromJson(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw InputError("matrix entry must be a number or a [re, im] pair, got " + e.dump());
}

json entryToJson(cdouble v) { return json::array({v.real(), v.imag()}); }

Eigen::Index dimension(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 0) {
    throw InputError(std::string("matrix needs a non-negative integer \"") + key + "\"");
  }
  return static_cast<Eigen::Index>(j[key].get<long long>());
}

const char* const kBlocks[] = {"A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2"};

}  // namespace

json toJson(const CMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(entryToJson(m(i, k)));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMatrix matrixFromJson(const json& j) {
  if (j.is_number()) return CMatrix::Constant(1, 1, entryFromJson(j));
  if (!j.is_object()) throw InputError("matrix must be an object with rows, cols and data");
  const Eigen::Index rows = dimension(j, "rows"), cols = dimension(j, "cols");
  if (!j.contains("data") || !j["data"].is_array()) throw InputError("matrix needs a \"data\" array");
  const json& data = j["data"];
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw DimensionError("matrix data has " + std::to_string(data.size()) + " entries, expected " +
                         std::to_string(rows * cols));
  }
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = entryFromJson(data[static_cast<std::size_t>(i * cols + k)]);
  }
  return m;
}

RMatrix realMatrixFromJson(const json& j) {
  const CMatrix m = matrixFromJson(j);
  if (!m.imag().isZero(0)) throw InputError("real matrix has non-zero imaginary parts");
  return m.real();
}

json toJson(const BimatrixD& b) { return json{{"first", toJson(b.first())}, {"second", toJson(b.second())}}; }

BimatrixD bimatrixFromJson(const json& j) {
  if (!j.is_object() || !j.contains("first") || !j.contains("second")) {
    throw InputError("bimatrix must be an object with \"first\" and \"second\"");
  }
  return BimatrixD(matrixFromJson(j["first"]), matrixFromJson(j["second"]));
}

BimatrixD bimatrixOrMatrixFromJson(const json& j) {
  if (j.is_object() && j.contains("first")) return bimatrixFromJson(j);
  return BimatrixD::normal(matrixFromJson(j));
}

json toJson(const Spectrum& s) {
  json out = json::array();
  for (const cdouble v : s) out.push_back(entryToJson(v));
  return out;
}

Spectrum spectrumFromJson(const json& j) {
  if (!j.is_array()) throw InputError("spectrum must be a list of [re, im] pairs");
  std::vector<cdouble> values;
  for (const json& e : j) values.push_back(entryFromJson(e));
  return Spectrum(std::move(values));
}

json vectorToJson(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(entryToJson(v(i)));
  return out;
}

CVector vectorFromJson(const json& j) {
  if (!j.is_array()) throw InputError("vector must be a list of numbers or [re, im] pairs");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = entryFromJson(j[i]);
  return v;
}

json systemToJson(const CxSystem& sys) {
  json j{{"domain", toString(sys.domain())}, {"n", sys.states()}, {"m", sys.inputs()}, {"p", sys.outputs()}};
  const BimatrixD* parts[] = {&sys.a(), &sys.b(), &sys.c(), &sys.d()};
  for (int i = 0; i < 4; ++i) {
    j[kBlocks[2 * i]] = toJson(parts[i]->first());
    j[kBlocks[2 * i + 1]] = toJson(parts[i]->second());
  }
  return j;
}

RealSystem realSystemFromJson(const json& j) {
  if (!j.is_object()) throw InputError("real system must be an object");
  RealSystem r;
  r.domain = timeDomainFromString(j.value("domain", std::string("continuous")));
  if (!j.contains("A")) throw InputError("real system needs block A");
  r.a = realMatrixFromJson(j["A"]);
  r.b = j.contains("B") ? realMatrixFromJson(j["B"]) : RMatrix::Zero(r.a.rows(), 0);
  r.c = j.contains("C") ? realMatrixFromJson(j["C"]) : RMatrix::Zero(0, r.a.rows());
  r.d = j.contains("D") ? realMatrixFromJson(j["D"]) : RMatrix();
  return r;
}

CxSystem systemFromJson(const json& j) {
  if (!j.is_object()) throw InputError("system file must contain a JSON object");
  if (j.contains("real_system")) {
    if (!j.value("convert", false)) {
      throw InputError("system file holds a real_system block; set \"convert\": true to convert it");
    }
    json real = j["real_system"];
    if (j.contains("domain") && !real.contains("domain")) real["domain"] = j["domain"];
    return fromRealSystem(realSystemFromJson(real));
  }
  if (!j.contains("domain") || !j["domain"].is_string()) {
    throw InputError("system file needs \"domain\": \"continuous\" or \"discrete\"");
  }
  const TimeDomain domain = timeDomainFromString(j["domain"].get<std::string>());

  std::optional<CMatrix> blocks[8];
  for (int i = 0; i < 8; ++i) {
    if (j.contains(kBlocks[i])) blocks[i] = matrixFromJson(j[kBlocks[i]]);
  }
  // m and p default to 0 when nothing determines them.
  auto readDim = [&](const char* key, std::initializer_list<std::pair<int, bool>> sources,
                     bool required) -> Eigen::Index {
    if (j.contains(key)) {
      if (!j[key].is_number_integer() || j[key].get<long long>() < 0) {
        throw InputError(std::string("\"") + key + "\" must be a non-negative integer");
      }
      return static_cast<Eigen::Index>(j[key].get<long long>());
    }
    for (const auto& [idx, use_rows] : sources) {
      if (blocks[idx]) return use_rows ? blocks[idx]->rows() : blocks[idx]->cols();
    }
    if (!required) return 0;
    throw InputError(std::string("system file needs \"") + key + "\" or a block that determines it");
  };
  const Eigen::Index n = readDim("n", {{0, true}, {1, true}, {2, true}, {3, true}, {4, false}, {5, false}}, true);
  const Eigen::Index m = readDim("m", {{2, false}, {3, false}, {6, false}, {7, false}}, false);
  const Eigen::Index p = readDim("p", {{4, true}, {5, true}, {6, true}, {7, true}}, false);
  const Eigen::Index rows[] = {n, n, n, n, p, p, p, p};
  const Eigen::Index cols[] = {n, n, m, m, n, n, m, m};
  CMatrix full[8];
  for (int i = 0; i < 8; ++i) {
    if (!blocks[i]) {
      full[i] = CMatrix::Zero(rows[i], cols[i]);
      continue;
    }
    if (blocks[i]->rows() != rows[i] || blocks[i]->cols() != cols[i]) {
      throw DimensionError(std::string("system block ") + kBlocks[i] + " is " + std::to_string(blocks[i]->rows()) +
                           "x" + std::to_string(blocks[i]->cols()) + ", expected " + std::to_string(rows[i]) +
                           "x" + std::to_string(cols[i]));
    }
    full[i] = *blocks[i];
  }
  return CxSystem(BimatrixD(full[0], full[1]), BimatrixD(full[2], full[3]), BimatrixD(full[4], full[5]),
                  BimatrixD(full[6], full[7]), domain);
}

json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
}

void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed for " + path);
}

CxSystem readSystemFile(const std::string& path) {
  const json j = readJsonFile(path);
  try {
    return systemFromJson(j);
  } catch (const json::exception& e) {
    throw InputError("invalid system file " + path + ": " + e.what());
  }
}

void writeTraceCsv(std::ostream& os, const SimTrace& trace) {
  if (trace.size() == 0) return;
  os << "t";
  auto header = [&](char prefix, Eigen::Index count) {
    for (Eigen::Index i = 1; i <= count; ++i) os << ',' << prefix << i << "_re," << prefix << i << "_im";
  };
  header('x', trace.states.front().size());
  header('u', trace.inputs.front().size());
  header('y', trace.outputs.front().size());
  os << '\n';
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  auto row = [&](const CVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      os << ',';
      num(v(i).real());
      os << ',';
      num(v(i).imag());
    }
  };
  for (std::size_t k = 0; k < trace.size(); ++k) {
    num(trace.times[k]);
    row(trace.states[k]);
    row(trace.inputs[k]);
    row(trace.outputs[k]);
    os << '\n';
  }
}

}  // namespace cvls::io
