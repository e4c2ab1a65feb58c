#pragma once

// Fitted-model bundle written by `gasrom fit` and read by `gasrom predict`.
//
// MDL1: "MDL1" | str16 method | u8 input_mode | u8 has_period [f64] | f64 dt |
//       u8 has_lambda [f64] | state layout | u8 has_input_layout [layout] |
//       u8 has_basis [POD1] | u8 has_opinf [OPI1] | u8 has_ar [ARM1] |
//       u8 has_mean [u32 n | n f64]

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "gasrom/bench.hpp"

namespace gasrom {

inline constexpr std::string_view kModelMagic = "MDL1";

std::vector<std::uint8_t> encode_model(const FittedModel& model);
FittedModel decode_model(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const FittedModel& model);
FittedModel load_model(const std::filesystem::path& path);

}  // namespace gasrom
