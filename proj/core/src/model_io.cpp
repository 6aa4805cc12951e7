#include "mapfluct/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace mapfluct {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      throw ModelParseError("unknown field " + path + "." + it.key());
}

const json& need(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelParseError("missing field " + path + "." + key);
  return *it;
}

double need_number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = need(obj, key, path);
  if (!v.is_number()) throw ModelParseError("field " + path + "." + key + " must be a number");
  return v.get<double>();
}

JumpLaw parse_law(const json& j, const std::string& path) {
  if (!j.is_object()) throw ModelParseError(path + " must be an object");
  reject_unknown(j, {"family", "params", "sign"}, path);
  std::string family = need(j, "family", path).get<std::string>();
  int sign = 0;
  if (j.contains("sign")) {
    std::string s = j["sign"].get<std::string>();
    if (s == "+") sign = +1;
    else if (s == "-") sign = -1;
    else throw ModelParseError(path + ".sign must be \"+\" or \"-\"");
  }
  const json& params = need(j, "params", path);
  if (family == "degenerate") {
    reject_unknown(params, {"c"}, path + ".params");
    return JumpLaw::degenerate(need_number(params, "c", path + ".params"));
  }
  if (family == "exponential") {
    reject_unknown(params, {"rate"}, path + ".params");
    if (sign == 0) throw ModelParseError(path + " exponential law needs a sign");
    return JumpLaw::exponential(need_number(params, "rate", path + ".params"), sign);
  }
  if (family == "mixture") {
    reject_unknown(params, {"weights", "rates"}, path + ".params");
    if (sign == 0) throw ModelParseError(path + " mixture law needs a sign");
    auto w = need(params, "weights", path + ".params").get<std::vector<double>>();
    auto r = need(params, "rates", path + ".params").get<std::vector<double>>();
    return JumpLaw::mixture(std::move(w), std::move(r), sign);
  }
  throw ModelParseError(path + ".family must be degenerate|exponential|mixture");
}

json law_to_json(const JumpLaw& l) {
  json j;
  switch (l.family) {
    case JumpLaw::Family::degenerate:
      j["family"] = "degenerate";
      j["params"] = {{"c", l.c}};
      break;
    case JumpLaw::Family::exponential:
      j["family"] = "exponential";
      j["params"] = {{"rate", l.rates[0]}};
      j["sign"] = l.sign > 0 ? "+" : "-";
      break;
    case JumpLaw::Family::mixture:
      j["family"] = "mixture";
      j["params"] = {{"weights", l.weights}, {"rates", l.rates}};
      j["sign"] = l.sign > 0 ? "+" : "-";
      break;
  }
  return j;
}

}  // namespace

MapSpec parse_model_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ModelParseError("model file must be a JSON object");
  reject_unknown(root, {"n_states", "Q", "states", "trans_jumps", "spectrally_negative"}, "$");

  MapSpec spec;
  spec.n_states = need(root, "n_states", "$").get<int>();
  const json& Q = need(root, "Q", "$");
  if (!Q.is_array() || static_cast<int>(Q.size()) != spec.n_states)
    throw ModelParseError("$.Q must be an n_states x n_states array");
  spec.Q = Matrix(spec.n_states, spec.n_states);
  for (int i = 0; i < spec.n_states; ++i) {
    const json& row = Q[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != spec.n_states)
      throw ModelParseError("$.Q[" + std::to_string(i) + "] must have n_states entries");
    for (int j = 0; j < spec.n_states; ++j)
      spec.Q(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }

  const json& states = need(root, "states", "$");
  if (!states.is_array() || static_cast<int>(states.size()) != spec.n_states)
    throw ModelParseError("$.states must have n_states entries");
  for (int i = 0; i < spec.n_states; ++i) {
    std::string path = "$.states[" + std::to_string(i) + "]";
    const json& st = states[static_cast<std::size_t>(i)];
    reject_unknown(st, {"drift", "sigma2", "jumps"}, path);
    LevyComponent lc;
    lc.drift = need_number(st, "drift", path);
    lc.sigma2 = need_number(st, "sigma2", path);
    if (st.contains("jumps")) {
      const json& jumps = st["jumps"];
      if (!jumps.is_array()) throw ModelParseError(path + ".jumps must be an array");
      for (std::size_t k = 0; k < jumps.size(); ++k) {
        std::string jpath = path + ".jumps[" + std::to_string(k) + "]";
        reject_unknown(jumps[k], {"rate", "law"}, jpath);
        CompoundTerm term;
        term.rate = need_number(jumps[k], "rate", jpath);
        term.law = parse_law(need(jumps[k], "law", jpath), jpath + ".law");
        lc.jumps.push_back(std::move(term));
      }
    }
    spec.levy.push_back(std::move(lc));
  }

  const json& tj = need(root, "trans_jumps", "$");
  if (!tj.is_array() || static_cast<int>(tj.size()) != spec.n_states)
    throw ModelParseError("$.trans_jumps must have n_states entries");
  for (int i = 0; i < spec.n_states; ++i)
    spec.trans_jump.push_back(parse_law(tj[static_cast<std::size_t>(i)],
                                        "$.trans_jumps[" + std::to_string(i) + "]"));

  spec.spectrally_negative = need(root, "spectrally_negative", "$").get<bool>();
  return spec;
}

MapSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelParseError("cannot open model file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_model_json(os.str());
}

std::string model_to_json(const MapSpec& spec, int indent) {
  json root;
  root["n_states"] = spec.n_states;
  json Q = json::array();
  for (int i = 0; i < spec.n_states; ++i) {
    json row = json::array();
    for (int j = 0; j < spec.n_states; ++j) row.push_back(spec.Q(i, j));
    Q.push_back(row);
  }
  root["Q"] = Q;
  json states = json::array();
  for (const auto& lc : spec.levy) {
    json st;
    st["drift"] = lc.drift;
    st["sigma2"] = lc.sigma2;
    json jumps = json::array();
    for (const auto& term : lc.jumps)
      jumps.push_back({{"rate", term.rate}, {"law", law_to_json(term.law)}});
    st["jumps"] = jumps;
    states.push_back(st);
  }
  root["states"] = states;
  json tj = json::array();
  for (const auto& l : spec.trans_jump) tj.push_back(law_to_json(l));
  root["trans_jumps"] = tj;
  root["spectrally_negative"] = spec.spectrally_negative;
  return root.dump(indent);
}

}  // namespace mapfluct
