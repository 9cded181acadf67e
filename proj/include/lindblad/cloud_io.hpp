#pragma once

#include <string>
#include <vector>

#include "lindblad/spectrum.hpp"

namespace lindblad {

// header re,im,tag,q,theta; LF endings; %.17g; NaN written as an empty field
std::string cloud_to_csv(const SpectrumCloud& c);
SpectrumCloud cloud_from_csv(const std::string& text);
std::string cloud_to_json(const SpectrumCloud& c);

// temp file in the same directory, then rename
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

SpectrumCloud read_cloud(const std::string& path);

struct RunManifest {
  std::string command;
  std::string model;       // model JSON, empty when not applicable
  std::string gridsJson = "{}";
  std::vector<unsigned long long> seeds;
  double wallSeconds = 0;

  std::string to_json() const;
};

inline constexpr const char* kToolVersion = "0.1.0";

// <path>.manifest.json
std::string manifest_path(const std::string& outPath);

}  // namespace lindblad
