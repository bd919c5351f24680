#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "skcap/channel.hpp"

namespace skcap {

inline constexpr int kChannelSchemaVersion = 1;

/// Channel file contents. JSON layout:
///
///   {
///     "schema_version": 1,
///     "sizes": {"x": 2, "s": 1, "yr": 2, "ye": 2},
///     "state_pmf": [1.0],
///     "kernel": [[[[...ye...]...yr...]...s...]...x...],   // [x][s][yr][ye]
///     "metadata": {"name": "...", "description": "..."}  // optional
///   }
struct ChannelFile {
  int schema_version = kChannelSchemaVersion;
  StateChannel channel;
  std::optional<std::string> name;
  std::optional<std::string> description;
};

/// Parses channel JSON. Throws InputError naming the line (for syntax errors)
/// or the offending field path, e.g. "kernel[1][0][1]".
ChannelFile parse_channel_json(std::string_view text);

/// Reads and parses a channel file; unreadable paths raise InputError.
ChannelFile read_channel_file(const std::filesystem::path& path);

/// Serializes with 17 significant digits so values round-trip exactly.
std::string write_channel_json(const ChannelFile& file);

/// Auxiliary policy JSON: {"u_given_s": [[...]], "x_given_us": [[[...]]]}
/// laid out [s][u] and [u][s][x].
AuxiliaryEncoderPolicy parse_aux_policy_json(std::string_view text,
                                             const StateChannel& channel);

/// Input policy JSON: {"x_given_s": [[...]]} laid out [s][x].
InputPolicy parse_input_policy_json(std::string_view text,
                                    const StateChannel& channel);

/// Reads a whole text file; unreadable paths raise InputError.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace skcap
