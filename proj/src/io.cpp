// Copyright 2026 The compoundcap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "compoundcap/io.hpp"

#include <fstream>
#include <sstream>

namespace compoundcap {

namespace {

double number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw InputError("field '" + field + "' must be a number");
  return j.get<double>();
}

int integer(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw InputError("missing field '" + where + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw InputError("field '" + where + key + "' must be an integer");
  return v.get<int>();
}

Complex complex_entry(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw InputError("field '" + field + "' must be [re, im]");
  return {number(j[0], field), number(j[1], field)};
}

}  // namespace

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

Json to_json(const Channel& n) {
  Json kraus = Json::array();
  for (const auto& k : n.kraus()) kraus.push_back(to_json(k));
  return Json{{"d_in", n.d_in()}, {"d_out", n.d_out()}, {"kraus", kraus}};
}

Json to_json(const DensityOperator& rho) {
  return Json{{"dims", rho.layout().dims()}, {"matrix", to_json(rho.matrix())}};
}

Json to_json(const PureState& psi) {
  return Json{{"dims", psi.layout().dims()}, {"vector", to_json(psi.vector())}};
}

CMatrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError("field '" + field + "' must be a nonempty array of rows");
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw InputError("field '" + field + "' must be a nonempty array of rows");
  CMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < j.size(); ++r) {
    const std::string at = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) throw InputError("field '" + at + "' has the wrong length");
    for (size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          complex_entry(j[r][c], at + "[" + std::to_string(c) + "]");
  }
  return m;
}

CVector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError("field '" + field + "' must be a nonempty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = complex_entry(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

Channel channel_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("channel must be a JSON object");
  if (j.contains("named")) {
    if (!j["named"].is_string()) throw InputError("field 'named' must be a string");
    const std::string name = j["named"].get<std::string>();
    auto param = [&](const char* key) {
      if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "' for named channel " + name);
      return number(j[key], key);
    };
    try {
      if (name == "identity") return identity_channel(integer(j, "d", ""));
      if (name == "depolarizing") return depolarizing(integer(j, "d", ""), param("p"));
      if (name == "dephasing") return dephasing(param("p"));
      if (name == "amplitude_damping") return amplitude_damping(param("gamma"));
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("named channel ") + name + ": " + e.what());
    }
    throw InputError("field 'named': unknown channel '" + name + "'");
  }
  if (!j.contains("kraus")) throw InputError("missing field 'kraus'");
  if (!j["kraus"].is_array() || j["kraus"].empty()) throw InputError("field 'kraus' must be a nonempty array");
  std::vector<CMatrix> kraus;
  for (size_t k = 0; k < j["kraus"].size(); ++k)
    kraus.push_back(matrix_from_json(j["kraus"][k], "kraus[" + std::to_string(k) + "]"));
  const int d_in = integer(j, "d_in", ""), d_out = integer(j, "d_out", "");
  for (size_t k = 0; k < kraus.size(); ++k)
    if (kraus[k].rows() != d_out || kraus[k].cols() != d_in)
      throw InputError("field 'kraus[" + std::to_string(k) + "]' is not d_out x d_in");
  Channel::Kind kind = Channel::Kind::TracePreserving;
  if (j.contains("kind")) {
    const std::string s = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    if (s == "trace_nonincreasing") kind = Channel::Kind::TraceNonIncreasing;
    else if (s == "completely_positive") kind = Channel::Kind::CompletelyPositive;
    else if (s != "trace_preserving") throw InputError("field 'kind' must be trace_preserving, trace_nonincreasing or completely_positive");
  }
  try {
    return Channel(std::move(kraus), kind);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("field 'kraus': ") + e.what());
  }
}

namespace {

DimLayout layout_from(const Json& j, int total) {
  if (!j.contains("dims")) return DimLayout::single(total);
  if (!j["dims"].is_array()) throw InputError("field 'dims' must be an array of integers");
  std::vector<int> dims;
  for (const auto& d : j["dims"]) {
    if (!d.is_number_integer()) throw InputError("field 'dims' must be an array of integers");
    dims.push_back(d.get<int>());
  }
  try {
    DimLayout l(dims);
    if (l.total() != total) throw InputError("field 'dims' does not multiply to the state dimension");
    return l;
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("field 'dims': ") + e.what());
  }
}

}  // namespace

DensityOperator state_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("state must be a JSON object");
  try {
    if (j.contains("matrix")) {
      CMatrix m = matrix_from_json(j["matrix"], "matrix");
      if (m.rows() != m.cols()) throw InputError("field 'matrix' must be square");
      const auto layout = layout_from(j, static_cast<int>(m.rows()));
      return DensityOperator(std::move(m), layout);
    }
    if (j.contains("vector")) return pure_state_from_json(j).density();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("field 'matrix': ") + e.what());
  }
  throw InputError("state needs a 'matrix' or 'vector' field");
}

PureState pure_state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("vector")) throw InputError("missing field 'vector'");
  CVector v = vector_from_json(j["vector"], "vector");
  const auto layout = layout_from(j, static_cast<int>(v.size()));
  try {
    return PureState(std::move(v), layout);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("field 'vector': ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

CompoundChannel compound_from_json(const Json& j, const std::filesystem::path& base_dir) {
  const Json* arr = &j;
  if (j.is_object() && j.contains("members")) arr = &j["members"];
  if (!arr->is_array() || arr->empty()) throw InputError("field 'members' must be a nonempty array");
  std::vector<Channel> members;
  std::vector<std::string> labels;
  for (size_t i = 0; i < arr->size(); ++i) {
    const Json& e = (*arr)[i];
    const std::string where = "members[" + std::to_string(i) + "]";
    std::string label = std::to_string(i);
    try {
      if (e.is_string()) {
        members.push_back(channel_from_json(read_json_file(base_dir / e.get<std::string>())));
      } else if (e.is_object() && e.contains("file")) {
        if (!e["file"].is_string()) throw InputError("field 'file' must be a path");
        members.push_back(channel_from_json(read_json_file(base_dir / e["file"].get<std::string>())));
      } else if (e.is_object() && e.contains("channel")) {
        members.push_back(channel_from_json(e["channel"]));
      } else {
        members.push_back(channel_from_json(e));
      }
    } catch (const InputError& err) {
      throw InputError(where + ": " + err.what());
    }
    if (e.is_object() && e.contains("label")) {
      if (!e["label"].is_string()) throw InputError("field '" + where + ".label' must be a string");
      label = e["label"].get<std::string>();
    }
    labels.push_back(label);
  }
  try {
    return CompoundChannel(std::move(members), std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("field 'members': ") + e.what());
  }
}

Channel read_channel(const std::filesystem::path& path) {
  try {
    return channel_from_json(read_json_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

CompoundChannel read_compound(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  // a single channel file is accepted as a one-member compound
  if (j.is_object() && (j.contains("kraus") || j.contains("named")))
    return CompoundChannel({read_channel(path)});
  try {
    return compound_from_json(j, path.parent_path());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

DensityOperator read_state(const std::filesystem::path& path) {
  try {
    return state_from_json(read_json_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace compoundcap
