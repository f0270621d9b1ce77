#pragma once

// JSON matrix files: {"dim": d, "matrices": [m_1, m_2, ...]} where each m_k
// lists d*d entries in row-major order, either flat or as d rows. An entry
// is [re, im] or a bare real number.
//
// Span map files: {"basis": <matrix file>, "images": <matrix file>, "unital": bool}.

#include "ncm/distribution.hpp"
#include "ncm/matrix.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace ncm {

/// Malformed or unreadable input file.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<ComplexMatrix> matrix_family_from_json(const nlohmann::json& doc);
nlohmann::json matrix_family_to_json(std::span<const ComplexMatrix> family);

std::vector<ComplexMatrix> read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, std::span<const ComplexMatrix> family);

SpanMap span_map_from_json(const nlohmann::json& doc);
nlohmann::json span_map_to_json(const SpanMap& map);
SpanMap read_span_map_file(const std::filesystem::path& path);

/// Parses a whole file as JSON; throws InputError on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

inline nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

}  // namespace ncm
