#include "ncm/io.hpp"

#include <fstream>
#include <string>

namespace ncm {

namespace {

Complex entry_from_json(const nlohmann::json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw InputError("matrix entry must be [re, im] or a number, got " + e.dump());
}

ComplexMatrix matrix_from_json(const nlohmann::json& m, int dim) {
  if (!m.is_array()) throw InputError("each matrix must be an array");
  ComplexMatrix out(dim, dim);
  const auto d = static_cast<std::size_t>(dim);
  // Flat when it has d*d entries; d = 1 is flat unless written as [[x]].
  const bool flat = m.size() == d * d && !(d == 1 && m[0].is_array() && m[0].size() == 1);
  if (flat) {
    for (std::size_t k = 0; k < d * d; ++k) out(k / d, k % d) = entry_from_json(m[k]);
    return out;
  }
  if (m.size() != d)
    throw InputError("matrix has " + std::to_string(m.size()) + " entries, expected " + std::to_string(d * d) +
                     " or " + std::to_string(d) + " rows");
  for (std::size_t i = 0; i < d; ++i) {
    if (!m[i].is_array() || m[i].size() != d) throw InputError("matrix row has the wrong length");
    for (std::size_t j = 0; j < d; ++j) out(i, j) = entry_from_json(m[i][j]);
  }
  return out;
}

}  // namespace

std::vector<ComplexMatrix> matrix_family_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("matrix file must be a JSON object");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) throw InputError("matrix file needs an integer \"dim\"");
  if (!doc.contains("matrices") || !doc["matrices"].is_array())
    throw InputError("matrix file needs a \"matrices\" array");
  const int dim = doc["dim"].get<int>();
  if (dim < 1) throw InputError("\"dim\" must be >= 1");
  std::vector<ComplexMatrix> out;
  for (const auto& m : doc["matrices"]) out.push_back(matrix_from_json(m, dim));
  return out;
}

nlohmann::json matrix_family_to_json(std::span<const ComplexMatrix> family) {
  nlohmann::json doc;
  const auto dim = family.empty() ? 1 : family.front().rows();
  doc["dim"] = dim;
  doc["matrices"] = nlohmann::json::array();
  for (const auto& m : family) {
    if (m.rows() != dim || m.cols() != dim) throw std::invalid_argument("matrix_family_to_json: dimension mismatch");
    nlohmann::json flat = nlohmann::json::array();
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) flat.push_back(complex_to_json(m(i, j)));
    doc["matrices"].push_back(std::move(flat));
  }
  return doc;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<ComplexMatrix> read_matrix_file(const std::filesystem::path& path) {
  return matrix_family_from_json(read_json_file(path));
}

void write_matrix_file(const std::filesystem::path& path, std::span<const ComplexMatrix> family) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << matrix_family_to_json(family).dump(2) << '\n';
}

SpanMap span_map_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("basis") || !doc.contains("images"))
    throw InputError("span map file needs \"basis\" and \"images\"");
  const bool unital = doc.value("unital", false);
  try {
    return SpanMap(matrix_family_from_json(doc["basis"]), matrix_family_from_json(doc["images"]), unital);
  } catch (const InputError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

nlohmann::json span_map_to_json(const SpanMap& map) {
  return {{"basis", matrix_family_to_json(map.basis())},
          {"images", matrix_family_to_json(map.images())},
          {"unital", map.unital()}};
}

SpanMap read_span_map_file(const std::filesystem::path& path) { return span_map_from_json(read_json_file(path)); }

}  // namespace ncm
