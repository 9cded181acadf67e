#include "lindblad/cloud_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"

namespace lindblad {

using nlohmann::json;

namespace {

void put_number(std::string& out, double v) {
  if (std::isnan(v)) return;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

double get_number(const std::string& field, size_t line) {
  if (field.empty()) return NAN;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw Error(ErrorCode::InvalidInput, "bad number '" + field + "' on line " + std::to_string(line));
  return v;
}

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

std::string cloud_to_csv(const SpectrumCloud& c) {
  std::string out = "re,im,tag,q,theta\n";
  out.reserve(out.size() + c.points.size() * 80);
  for (const auto& p : c.points) {
    put_number(out, p.z.real());
    out += ',';
    put_number(out, p.z.imag());
    out += ',';
    out += tag_name(p.tag);
    out += ',';
    put_number(out, p.q);
    out += ',';
    put_number(out, p.theta);
    out += '\n';
  }
  return out;
}

SpectrumCloud cloud_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "re,im,tag,q,theta")
    throw Error(ErrorCode::InvalidInput, "missing or wrong CSV header");
  SpectrumCloud c;
  size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::vector<std::string> f;
    size_t start = 0;
    for (size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1)
      f.push_back(line.substr(start, pos - start));
    f.push_back(line.substr(start));
    if (f.size() != 5) throw Error(ErrorCode::InvalidInput, "expected 5 fields on line " + std::to_string(lineNo));
    const double re = get_number(f[0], lineNo), im = get_number(f[1], lineNo);
    if (std::isnan(re) || std::isnan(im)) throw Error(ErrorCode::InvalidInput, "empty coordinate on line " + std::to_string(lineNo));
    c.points.push_back({cd(re, im), parse_tag(f[2]), get_number(f[3], lineNo), get_number(f[4], lineNo)});
  }
  return c;
}

std::string cloud_to_json(const SpectrumCloud& c) {
  json pts = json::array();
  for (const auto& p : c.points)
    pts.push_back({{"re", p.z.real()}, {"im", p.z.imag()}, {"tag", tag_name(p.tag)}, {"q", number_or_null(p.q)},
                   {"theta", number_or_null(p.theta)}});
  return json{{"points", pts}, {"failures", c.failures}}.dump(1) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + tmp.string());
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw Error(ErrorCode::InvalidInput, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::InvalidInput, "cannot rename onto " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpectrumCloud read_cloud(const std::string& path) { return cloud_from_csv(read_file(path)); }

std::string RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["model"] = model.empty() ? json(nullptr) : json::parse(model);
  j["grids"] = json::parse(gridsJson);
  j["seeds"] = seeds;
  j["tool_version"] = kToolVersion;
  j["wall_time_s"] = wallSeconds;
  return j.dump(2) + "\n";
}

std::string manifest_path(const std::string& outPath) { return outPath + ".manifest.json"; }

}  // namespace lindblad
