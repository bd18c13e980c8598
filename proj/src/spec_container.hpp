#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "qpool/matrix.hpp"

namespace qpool::detail {

std::vector<std::uint8_t> encode_spec1(const Matrix& values, const nlohmann::json& metadata);

struct Spec1Contents {
  Matrix values;
  nlohmann::json metadata;
};

Spec1Contents decode_spec1(std::span<const std::uint8_t> bytes);

/// Shared by SPEC1 and QREF1 readers.
nlohmann::json parse_metadata(const std::string& text, const char* container);
void check_finite(const Matrix& m, const char* container);

}  // namespace qpool::detail
