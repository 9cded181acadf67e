#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lindblad/model.hpp"

namespace lindblad {

using nlohmann::json;

namespace {

json site_list(const SiteVector& v) {
  json out = json::array();
  for (const auto& [k, a] : v) out.push_back({{"site", k}, {"re", a.real()}, {"im", a.imag()}});
  return out;
}

SiteVector parse_sites(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, std::string(what) + " must be an array");
  SiteVector v;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("site") || !e.contains("re"))
      throw Error(ErrorCode::InvalidInput, std::string(what) + " entries need site and re");
    v[e.at("site").get<int>()] += cd(e.at("re").get<double>(), e.value("im", 0.0));
  }
  return v;
}

json builtin_json(const BuiltinTag& t) {
  json b = {{"name", builtin_name(t.kind)}};
  if (t.kind == Builtin::IncoherentHopping || t.kind == Builtin::NonNormal) b["l"] = t.l;
  if (t.kind == Builtin::NonNormal) b["delta"] = t.delta;
  return b;
}

}  // namespace

std::string model_to_json(const LindbladModel& m) {
  json j;
  json hop = json::array();
  for (int l = -m.hamHopping.range(); l <= m.hamHopping.range(); ++l)
    if (m.hamHopping[l] != cd(0))
      hop.push_back({{"offset", l}, {"re", m.hamHopping[l].real()}, {"im", m.hamHopping[l].imag()}});
  j["hamiltonian"] = {{"hopping", hop}};
  if (m.channels.size() == 1) {
    j["lindblad"] = {{"phi", site_list(m.channels[0].phi)}, {"psi", site_list(m.channels[0].psi)}};
  } else {
    json ch = json::array();
    for (const auto& c : m.channels) ch.push_back({{"phi", site_list(c.phi)}, {"psi", site_list(c.psi)}});
    j["lindblad"] = {{"channels", ch}};
  }
  j["G"] = m.G;
  if (m.builtin) j["builtin"] = builtin_json(*m.builtin);
  return j.dump(2) + "\n";
}

LindbladModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("model file is not JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "model must be a JSON object");
    if (!j.contains("G")) throw Error(ErrorCode::InvalidInput, "missing G");
    const double G = j.at("G").get<double>();
    LindbladModel m;
    if (j.contains("builtin")) {
      const json& b = j.at("builtin");
      BuiltinTag tag;
      if (b.is_string()) {
        tag.kind = parse_builtin(b.get<std::string>());
      } else {
        tag.kind = parse_builtin(b.at("name").get<std::string>());
        tag.l = b.value("l", 1);
        tag.delta = b.value("delta", 0.0);
      }
      m = make_builtin(tag, G);
    } else {
      if (!j.contains("hamiltonian") || !j.contains("lindblad"))
        throw Error(ErrorCode::InvalidInput, "custom models need hamiltonian and lindblad");
      for (const auto& h : j.at("hamiltonian").at("hopping"))
        m.hamHopping.add(h.at("offset").get<int>(), cd(h.at("re").get<double>(), h.value("im", 0.0)));
      const json& lj = j.at("lindblad");
      if (lj.contains("channels")) {
        for (const auto& c : lj.at("channels")) m.channels.push_back({parse_sites(c.at("phi"), "phi"), parse_sites(c.at("psi"), "psi")});
      } else {
        m.channels.push_back({parse_sites(lj.at("phi"), "phi"), parse_sites(lj.at("psi"), "psi")});
      }
      m.G = G;
    }
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("model schema: ") + e.what());
  }
}

LindbladModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace lindblad
