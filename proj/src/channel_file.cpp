#include "skcap/channel_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "skcap/errors.hpp"

namespace skcap {

namespace {

using nlohmann::json;

// Line number of a byte offset within the text (1-based).
std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw InputError(std::string(what) + ": JSON syntax error at line " +
                     std::to_string(line_of(text, byte)) + ": " + e.what());
  }
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw InputError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw InputError((path.empty() ? key : path + "." + key) + ": missing field");
  }
  return *it;
}

std::size_t positive_size(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw InputError(path + ": expected a positive integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

// Flattens a nested array of the given shape, checking every level.
void flatten(const json& v, std::span<const std::size_t> shape, const std::string& path,
             std::vector<double>& out) {
  if (shape.empty()) {
    if (!v.is_number()) throw InputError(path + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d) || d < 0.0) {
      throw InputError(path + ": expected a finite nonnegative probability");
    }
    out.push_back(d);
    return;
  }
  if (!v.is_array()) throw InputError(path + ": expected an array");
  if (v.size() != shape.front()) {
    throw InputError(path + ": expected " + std::to_string(shape.front()) +
                     " entries, found " + std::to_string(v.size()));
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    flatten(v[i], shape.subspan(1), path + "[" + std::to_string(i) + "]", out);
  }
}

std::vector<double> read_tensor(const json& root, const std::string& key,
                                std::initializer_list<std::size_t> shape) {
  std::vector<double> out;
  const std::vector<std::size_t> dims(shape);
  flatten(field(root, key, ""), dims, key, out);
  return out;
}

// Rewraps validation failures from the library constructors as input errors.
template <typename F>
auto checked(const std::string& what, F&& make) {
  try {
    return make();
  } catch (const ProbabilityError& e) {
    throw InputError(what + ": " + e.what());
  } catch (const ShapeError& e) {
    throw InputError(what + ": " + e.what());
  }
}

json nested(std::span<const double> flat, std::span<const std::size_t> shape) {
  if (shape.size() == 1) return json(std::vector<double>(flat.begin(), flat.end()));
  json arr = json::array();
  const std::size_t stride = flat.size() / shape.front();
  for (std::size_t i = 0; i < shape.front(); ++i) {
    arr.push_back(nested(flat.subspan(i * stride, stride), shape.subspan(1)));
  }
  return arr;
}

}  // namespace

ChannelFile parse_channel_json(std::string_view text) {
  const json root = parse(text, "channel file");
  if (!root.is_object()) throw InputError("channel file: top level must be an object");

  const json& version = field(root, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != kChannelSchemaVersion) {
    throw InputError("schema_version: unsupported (expected " +
                     std::to_string(kChannelSchemaVersion) + ")");
  }
  const json& sizes = field(root, "sizes", "");
  const std::size_t nx = positive_size(field(sizes, "x", "sizes"), "sizes.x");
  const std::size_t ns = positive_size(field(sizes, "s", "sizes"), "sizes.s");
  const std::size_t nr = positive_size(field(sizes, "yr", "sizes"), "sizes.yr");
  const std::size_t ne = positive_size(field(sizes, "ye", "sizes"), "sizes.ye");

  auto state_pmf = read_tensor(root, "state_pmf", {ns});
  auto kernel = read_tensor(root, "kernel", {nx, ns, nr, ne});

  ChannelFile file{kChannelSchemaVersion,
                   checked("channel", [&] {
                     return StateChannel(nx, ns, nr, ne, std::move(state_pmf),
                                         std::move(kernel));
                   }),
                   std::nullopt, std::nullopt};
  if (auto it = root.find("metadata"); it != root.end()) {
    if (!it->is_object()) throw InputError("metadata: expected an object");
    for (const char* key : {"name", "description"}) {
      if (auto m = it->find(key); m != it->end()) {
        if (!m->is_string()) {
          throw InputError(std::string("metadata.") + key + ": expected a string");
        }
        (std::string(key) == "name" ? file.name : file.description) =
            m->get<std::string>();
      }
    }
  }
  return file;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ChannelFile read_channel_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_channel_json(text);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string write_channel_json(const ChannelFile& file) {
  const StateChannel& ch = file.channel;
  json root;
  root["schema_version"] = kChannelSchemaVersion;
  root["sizes"] = {{"x", ch.x_size()}, {"s", ch.s_size()},
                   {"yr", ch.yr_size()}, {"ye", ch.ye_size()}};
  root["state_pmf"] = std::vector<double>(ch.state_pmf().begin(), ch.state_pmf().end());
  const std::size_t shape[] = {ch.x_size(), ch.s_size(), ch.yr_size(), ch.ye_size()};
  root["kernel"] = nested(ch.kernel(), shape);
  if (file.name || file.description) {
    json meta = json::object();
    if (file.name) meta["name"] = *file.name;
    if (file.description) meta["description"] = *file.description;
    root["metadata"] = meta;
  }
  return root.dump(2) + "\n";
}

AuxiliaryEncoderPolicy parse_aux_policy_json(std::string_view text,
                                             const StateChannel& channel) {
  const json root = parse(text, "policy file");
  const json& rows = field(root, "u_given_s", "");
  if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty()) {
    throw InputError("u_given_s: expected a non-empty [s][u] array");
  }
  const std::size_t nu = rows[0].size();
  auto u_given_s = read_tensor(root, "u_given_s", {channel.s_size(), nu});
  auto x_given_us = read_tensor(root, "x_given_us", {nu, channel.s_size(), channel.x_size()});
  return checked("policy", [&] {
    return AuxiliaryEncoderPolicy(nu, channel.s_size(), channel.x_size(),
                                  std::move(u_given_s), std::move(x_given_us));
  });
}

InputPolicy parse_input_policy_json(std::string_view text, const StateChannel& channel) {
  const json root = parse(text, "policy file");
  auto x_given_s = read_tensor(root, "x_given_s", {channel.s_size(), channel.x_size()});
  return checked("policy", [&] {
    return InputPolicy(channel.s_size(), channel.x_size(), std::move(x_given_s));
  });
}

}  // namespace skcap
