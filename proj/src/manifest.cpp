#include "gasdiff/manifest.hpp"

#include <fstream>

#include "gasdiff/error.hpp"

namespace gasdiff {

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["tool_version"] = kVersion;
  j["config"] = config;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  j["wall_time_s"] = wall_time_s;
  return j;
}

void RunManifest::write(const std::filesystem::path& path) const { write_json(path, to_json()); }

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::Io, 0, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ParseErrorKind::MalformedHeader, 0, path.string() + ": " + e.what());
  }
}

}  // namespace gasdiff
