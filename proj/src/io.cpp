#include "jomatch/instance.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace jomatch {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw MalformedInput(std::string("missing field '") + name + "'");
  return *it;
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw MalformedInput(where + " must be an integer");
  return j.get<int>();
}

std::pair<int, int> parse_key(const std::string& key, int n) {
  auto comma = key.find(',');
  if (comma == std::string::npos) throw MalformedInput("block key '" + key + "' is not of the form \"i,j\"");
  int i = 0, j = 0;
  try {
    size_t used = 0;
    i = std::stoi(key.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("");
    std::string rest = key.substr(comma + 1);
    j = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
  } catch (const std::logic_error&) {
    throw MalformedInput("block key '" + key + "' is not of the form \"i,j\"");
  }
  if (i < 1 || j < 1 || i > n || j > n || i == j) throw MalformedInput("block key '" + key + "' is out of range");
  return {i - 1, j - 1};
}

BinaryBlock parse_block(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw MalformedInput(where + " must be a non-empty array of rows");
  const size_t cols = rows.front().is_array() ? rows.front().size() : 0;
  BinaryBlock b(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (size_t t = 0; t < rows.size(); ++t) {
    if (!rows[t].is_array() || rows[t].size() != cols) throw MalformedInput(where + " has ragged rows");
    for (size_t q = 0; q < cols; ++q) {
      int v = as_int(rows[t][q], where + "[" + std::to_string(t + 1) + "][" + std::to_string(q + 1) + "]");
      if (v != 0 && v != 1)
        throw MalformedInput(where + " has a non-binary entry at (" + std::to_string(t + 1) + "," +
                             std::to_string(q + 1) + ")");
      b(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(q)) = v;
    }
  }
  return b;
}

}  // namespace

Instance instance_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedInput(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw MalformedInput("instance must be a JSON object");
  const int n = as_int(field(j, "n"), "field 'n'");
  const json& sizes = field(j, "sizes");
  if (!sizes.is_array() || static_cast<int>(sizes.size()) != n)
    throw MalformedInput("field 'sizes' must list n object sizes");
  std::vector<int> d;
  for (size_t i = 0; i < sizes.size(); ++i) d.push_back(as_int(sizes[i], "sizes[" + std::to_string(i + 1) + "]"));
  Instance inst(ObjectConfig{d});

  const json& blocks = field(j, "blocks");
  if (!blocks.is_object()) throw MalformedInput("field 'blocks' must be an object keyed by \"i,j\"");
  for (auto it = blocks.begin(); it != blocks.end(); ++it) {
    auto [a, b] = parse_key(it.key(), n);
    inst.set_input(a, b, parse_block(it.value(), "blocks[\"" + it.key() + "\"]"));
  }
  if (auto e = j.find("edges"); e != j.end()) {
    if (!e->is_array()) throw MalformedInput("field 'edges' must be an array of pairs");
    std::vector<std::pair<int, int>> listed;
    for (const auto& pr : *e) {
      if (!pr.is_array() || pr.size() != 2) throw MalformedInput("field 'edges' must be an array of pairs");
      int a = as_int(pr[0], "edge endpoint") - 1, b = as_int(pr[1], "edge endpoint") - 1;
      if (a > b) std::swap(a, b);
      listed.emplace_back(a, b);
    }
    std::sort(listed.begin(), listed.end());
    if (listed != inst.edges) throw MalformedInput("field 'edges' does not match the keys of 'blocks'");
  }
  if (auto g = j.find("ground_truth"); g != j.end() && !g->is_null()) {
    if (!g->is_array() || static_cast<int>(g->size()) != n)
      throw MalformedInput("field 'ground_truth' must list labels for every object");
    UniverseLabeling lab;
    for (int i = 0; i < n; ++i) {
      const json& row = (*g)[i];
      if (!row.is_array()) throw MalformedInput("ground_truth[" + std::to_string(i + 1) + "] must be an array");
      std::vector<int> labels;
      for (const auto& v : row) labels.push_back(as_int(v, "ground_truth label"));
      lab.labels.push_back(std::move(labels));
    }
    inst.ground_truth = std::move(lab);
  }
  inst.validate();
  return inst;
}

std::string instance_to_json_text(const Instance& inst) {
  json j;
  j["n"] = inst.config.n();
  j["sizes"] = inst.config.sizes();
  json edges = json::array();
  json blocks = json::object();
  for (auto [a, b] : inst.edges) {
    edges.push_back({a + 1, b + 1});
    const BinaryBlock& m = *inst.input[inst.config.pair_index(a, b)];
    json rows = json::array();
    for (int t = 0; t < m.rows(); ++t) {
      json row = json::array();
      for (int q = 0; q < m.cols(); ++q) row.push_back(m(t, q));
      rows.push_back(std::move(row));
    }
    blocks[std::to_string(a + 1) + "," + std::to_string(b + 1)] = std::move(rows);
  }
  j["edges"] = std::move(edges);
  j["blocks"] = std::move(blocks);
  if (inst.ground_truth) j["ground_truth"] = inst.ground_truth->labels;
  return j.dump() + "\n";
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json_text(ss.str());
}

void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_json_text(inst);
}

}  // namespace jomatch
