#include "jomatch/cuts.hpp"

#include "jomatch/maxflow.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace jomatch {

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::kPivotInK: return "pivot-in-k";
    case Orientation::kPivotInI: return "pivot-in-i";
    case Orientation::kPivotInJ: return "pivot-in-j";
  }
  return "?";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "pivot-in-k") return Orientation::kPivotInK;
  if (s == "pivot-in-i") return Orientation::kPivotInI;
  if (s == "pivot-in-j") return Orientation::kPivotInJ;
  throw MalformedInput("unknown orientation '" + s + "'");
}

Roles roles(const Triple& tr, Orientation o) {
  switch (o) {
    case Orientation::kPivotInK: return {tr.k, tr.i, tr.j};
    case Orientation::kPivotInI: return {tr.i, tr.j, tr.k};
    case Orientation::kPivotInJ: return {tr.j, tr.i, tr.k};
  }
  return {tr.k, tr.i, tr.j};
}

BlockCut as_block_cut(const ConsistencyCut& c) { return {c.triple, c.orientation, c.d1, c.d2, {c.pivot}}; }

namespace {

int64_t ordered_var(const ObjectConfig& c, int a, int b, int t, int q) {
  return a < b ? c.var(a, b, t, q) : c.var(b, a, q, t);
}

LinearForm block_form(const BlockCut& cut, const ObjectConfig& c) {
  Roles r = roles(cut.triple, cut.orientation);
  std::map<int64_t, int> acc;
  for (int l : cut.d3) {
    for (int t : cut.d1) acc[ordered_var(c, r.first, r.pivot, t, l)] += 1;
    for (int q : cut.d2) acc[ordered_var(c, r.second, r.pivot, q, l)] += 1;
  }
  for (int t : cut.d1)
    for (int q : cut.d2) acc[c.var(r.first, r.second, t, q)] -= 1;
  LinearForm f;
  for (auto [v, a] : acc)
    if (a != 0) {
      f.var.push_back(v);
      f.coef.push_back(a);
    }
  f.sense = RowSense::kLe;
  f.rhs = static_cast<int>(cut.d3.size());
  return f;
}

LinearForm size_form(const SizeCut& cut, const ObjectConfig& c) {
  LinearForm f;
  for (size_t a = 0; a < cut.elements.size(); ++a)
    for (size_t b = a + 1; b < cut.elements.size(); ++b) {
      auto [i, t] = c.element_at(cut.elements[a]);
      auto [j, q] = c.element_at(cut.elements[b]);
      if (i == j) continue;
      f.var.push_back(ordered_var(c, i, j, t, q));
      f.coef.push_back(1);
    }
  std::vector<size_t> order(f.var.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) { return f.var[x] < f.var[y]; });
  LinearForm sorted;
  for (size_t o : order) {
    sorted.var.push_back(f.var[o]);
    sorted.coef.push_back(f.coef[o]);
  }
  sorted.sense = RowSense::kGe;
  sorted.rhs = 1;
  return sorted;
}

void check_subset(const std::vector<int>& s, int size, const char* name) {
  if (s.empty()) throw std::invalid_argument(std::string(name) + " is empty");
  for (size_t a = 0; a < s.size(); ++a) {
    if (s[a] < 0 || s[a] >= size) throw std::out_of_range(std::string(name) + " has an index out of range");
    if (a > 0 && s[a] <= s[a - 1]) throw std::invalid_argument(std::string(name) + " must be strictly increasing");
  }
}

void check_triple(const Triple& tr, const ObjectConfig& c) {
  if (!(0 <= tr.i && tr.i < tr.j && tr.j < tr.k && tr.k < c.n())) throw std::out_of_range("bad triple");
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (size_t a = 0; a < v.size(); ++a) s += (a ? "," : "") + std::to_string(v[a] + 1);
  return s;
}

}  // namespace

LinearForm linear_form(const ConsistencyCut& cut, const ObjectConfig& config) {
  return block_form(as_block_cut(cut), config);
}

LinearForm linear_form(const Cut& cut, const ObjectConfig& config) {
  return std::visit(
      [&](const auto& c) -> LinearForm {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ConsistencyCut>) return block_form(as_block_cut(c), config);
        else if constexpr (std::is_same_v<T, BlockCut>) return block_form(c, config);
        else return size_form(c, config);
      },
      cut);
}

int rhs(const Cut& cut) {
  if (auto* b = std::get_if<BlockCut>(&cut)) return static_cast<int>(b->d3.size());
  return 1;
}

void validate_cut(const Cut& cut, const ObjectConfig& config) {
  if (auto* c = std::get_if<ConsistencyCut>(&cut)) {
    check_triple(c->triple, config);
    Roles r = roles(c->triple, c->orientation);
    if (c->pivot < 0 || c->pivot >= config.size(r.pivot)) throw std::out_of_range("pivot out of range");
    check_subset(c->d1, config.size(r.first), "D1");
    check_subset(c->d2, config.size(r.second), "D2");
  } else if (auto* b = std::get_if<BlockCut>(&cut)) {
    check_triple(b->triple, config);
    Roles r = roles(b->triple, b->orientation);
    check_subset(b->d1, config.size(r.first), "D1");
    check_subset(b->d2, config.size(r.second), "D2");
    check_subset(b->d3, config.size(r.pivot), "D3");
  } else {
    const auto& s = std::get<SizeCut>(cut);
    check_subset(s.elements, static_cast<int>(config.total_elements()), "N'");
    if (static_cast<int>(s.elements.size()) != s.m_hat + 1) throw std::invalid_argument("|N'| must equal m_hat + 1");
  }
}

std::string canonical_key(const Cut& cut) {
  std::ostringstream os;
  if (auto* c = std::get_if<ConsistencyCut>(&cut)) {
    os << "c:" << c->triple.i << "," << c->triple.j << "," << c->triple.k << ":" << static_cast<int>(c->orientation)
       << ":" << c->pivot << ":" << join(c->d1) << ":" << join(c->d2);
  } else if (auto* b = std::get_if<BlockCut>(&cut)) {
    if (b->d3.size() == 1)
      return canonical_key(Cut{ConsistencyCut{b->triple, b->orientation, b->d3[0], b->d1, b->d2}});
    os << "b:" << b->triple.i << "," << b->triple.j << "," << b->triple.k << ":" << static_cast<int>(b->orientation)
       << ":" << join(b->d3) << ":" << join(b->d1) << ":" << join(b->d2);
  } else {
    const auto& s = std::get<SizeCut>(cut);
    os << "s:" << s.m_hat << ":" << join(s.elements);
  }
  return os.str();
}

ConsistencyCut SeparationResult::cut() const { return {triple, orientation, pivot, d1, d2}; }

SeparationData separation_data(const RealMaps& s, const Triple& tr, Orientation o, int pivot) {
  Roles r = roles(tr, o);
  const ObjectConfig& c = s.config();
  SeparationData data;
  const int da = c.size(r.first), db = c.size(r.second);
  data.u.resize(da);
  data.v.resize(db);
  for (int t = 0; t < da; ++t) data.u[t] = s.at(r.first, r.pivot, t, pivot);
  for (int q = 0; q < db; ++q) data.v[q] = s.at(r.second, r.pivot, q, pivot);
  data.w = s.block(r.first, r.second);
  return data;
}

namespace {

double objective_of(const SeparationData& data, const std::vector<int>& d1, const std::vector<int>& d2) {
  double f = 0;
  for (int t : d1) f += data.u[t];
  for (int q : d2) f += data.v[q];
  for (int t : d1)
    for (int q : d2) f -= data.w(t, q);
  return f;
}

void check_nonnegative(const SeparationData& data) {
  auto bad = [](double x) { return x < -kBoxTol; };
  if (std::any_of(data.u.begin(), data.u.end(), bad) || std::any_of(data.v.begin(), data.v.end(), bad) ||
      (data.w.array() < -kBoxTol).any())
    throw PreconditionError("separation needs a nonnegative point");
}

// Drops elements with no marginal gain; removing one only raises the gains
// on the other side, so the result is an inclusion-minimal maximiser.
void prune_zero_gain(const SeparationData& data, std::vector<int>& d1, std::vector<int>& d2) {
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t a = 0; a < d1.size(); ++a) {
      double gain = data.u[d1[a]];
      for (int q : d2) gain -= data.w(d1[a], q);
      if (gain <= 0) {
        d1.erase(d1.begin() + static_cast<std::ptrdiff_t>(a--));
        changed = true;
      }
    }
    for (size_t b = 0; b < d2.size(); ++b) {
      double gain = data.v[d2[b]];
      for (int t : d1) gain -= data.w(t, d2[b]);
      if (gain <= 0) {
        d2.erase(d2.begin() + static_cast<std::ptrdiff_t>(b--));
        changed = true;
      }
    }
  }
}

}  // namespace

SeparationResult maximize_by_mincut(const SeparationData& data) {
  check_nonnegative(data);
  const int da = static_cast<int>(data.u.size()), db = static_cast<int>(data.v.size());
  // Nodes: 0 source, 1 sink, 2.. y_t, then one node per q whose sink side means z_q = 1.
  MaxFlow flow(2 + da + db);
  for (int t = 0; t < da; ++t) flow.add_arc(0, 2 + t, std::max(0.0, data.u[t]));
  for (int q = 0; q < db; ++q) flow.add_arc(2 + da + q, 1, std::max(0.0, data.v[q]));
  for (int t = 0; t < da; ++t)
    for (int q = 0; q < db; ++q) flow.add_arc(2 + t, 2 + da + q, std::max(0.0, data.w(t, q)));
  flow.run(0, 1);
  auto side = flow.source_side();
  SeparationResult res;
  for (int t = 0; t < da; ++t)
    if (side[2 + t]) res.d1.push_back(t);
  for (int q = 0; q < db; ++q)
    if (!side[2 + da + q]) res.d2.push_back(q);
  prune_zero_gain(data, res.d1, res.d2);
  res.value = objective_of(data, res.d1, res.d2);
  res.violated = !res.d1.empty() && !res.d2.empty() && res.value > 1 + kViolTol;
  return res;
}

SeparationResult maximize_by_enumeration(const SeparationData& data) {
  const int da = static_cast<int>(data.u.size()), db = static_cast<int>(data.v.size());
  if (da > 20 || db > 20) throw PreconditionError("enumeration limited to 20 elements per side");
  SeparationResult best;
  best.value = 0;
  for (uint32_t ma = 0; ma < (1u << da); ++ma)
    for (uint32_t mb = 0; mb < (1u << db); ++mb) {
      std::vector<int> d1, d2;
      for (int t = 0; t < da; ++t)
        if (ma >> t & 1) d1.push_back(t);
      for (int q = 0; q < db; ++q)
        if (mb >> q & 1) d2.push_back(q);
      double f = objective_of(data, d1, d2);
      if (f > best.value) {
        best.value = f;
        best.d1 = d1;
        best.d2 = d2;
      }
    }
  best.violated = !best.d1.empty() && !best.d2.empty() && best.value > 1 + kViolTol;
  return best;
}

SeparationResult separate_consistency(const RealMaps& s, const Triple& tr, Orientation o, int pivot) {
  SeparationResult res = maximize_by_mincut(separation_data(s, tr, o, pivot));
  res.triple = tr;
  res.orientation = o;
  res.pivot = pivot;
  return res;
}

SeparationLpResult maximize_by_lp(const SeparationData& data, const LpOptions& options) {
  const int da = static_cast<int>(data.u.size()), db = static_cast<int>(data.v.size());
  LpModel m;
  for (int t = 0; t < da; ++t) m.add_column(0, 1, -data.u[t]);
  for (int q = 0; q < db; ++q) m.add_column(0, 1, -data.v[q]);
  for (int t = 0; t < da; ++t)
    for (int q = 0; q < db; ++q) m.add_column(0, kInf, data.w(t, q));
  for (int t = 0; t < da; ++t)
    for (int q = 0; q < db; ++q)
      m.add_row({da + db + t * db + q, t, da + q}, {1.0, -1.0, -1.0}, RowSense::kGe, -1.0);
  LpSolution sol = solve(m, options);
  SeparationLpResult res;
  res.status = sol.status;
  if (!sol.optimal()) return res;
  res.value = -sol.objective;
  res.y.assign(sol.x.begin(), sol.x.begin() + da);
  res.z.assign(sol.x.begin() + da, sol.x.begin() + da + db);
  return res;
}

SeparationLpResult separate_via_lp(const RealMaps& s, const Triple& tr, Orientation o, int pivot,
                                   const LpOptions& options) {
  return maximize_by_lp(separation_data(s, tr, o, pivot), options);
}

namespace {

std::vector<SeparationResult> scan_triple(const RealMaps& s, const Triple& tr) {
  std::vector<SeparationResult> out;
  for (Orientation o : {Orientation::kPivotInK, Orientation::kPivotInI, Orientation::kPivotInJ}) {
    Roles r = roles(tr, o);
    for (int l = 0; l < s.config().size(r.pivot); ++l) {
      SeparationResult res = separate_consistency(s, tr, o, l);
      if (res.violated) out.push_back(std::move(res));
    }
  }
  return out;
}

}  // namespace

std::vector<ConsistencyCut> separate_all(const RealMaps& s, const SeparateOptions& options) {
  const int n = s.n();
  std::vector<Triple> triples;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) triples.push_back({i, j, k});

  const bool first_k = options.strategy == SeparationStrategy::kFirstK;
  const int threads = std::max(1, options.threads);
  const size_t chunk = threads == 1 ? triples.size() : std::max<size_t>(64, triples.size() / (8 * threads) + 1);
  std::vector<SeparationResult> found;
  for (size_t begin = 0; begin < triples.size(); begin += chunk) {
    size_t end = std::min(triples.size(), begin + chunk);
    std::vector<std::vector<SeparationResult>> per(end - begin);
    if (threads == 1) {
      for (size_t a = begin; a < end; ++a) {
        per[a - begin] = scan_triple(s, triples[a]);
        if (first_k) {
          for (auto& r : per[a - begin]) found.push_back(std::move(r));
          per[a - begin].clear();
          if (static_cast<int>(found.size()) >= options.limit) break;
        }
      }
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
          for (size_t a = begin + w; a < end; a += threads) per[a - begin] = scan_triple(s, triples[a]);
        });
      for (auto& th : pool) th.join();
    }
    for (auto& list : per)
      for (auto& r : list) found.push_back(std::move(r));
    if (first_k && static_cast<int>(found.size()) >= options.limit) break;
  }
  if (!first_k)
    std::stable_sort(found.begin(), found.end(),
                     [](const SeparationResult& a, const SeparationResult& b) { return a.value > b.value; });
  std::vector<ConsistencyCut> cuts;
  std::set<std::string> keys;
  for (const auto& r : found) {
    if (static_cast<int>(cuts.size()) >= options.limit) break;
    ConsistencyCut c = r.cut();
    if (keys.insert(canonical_key(Cut{c})).second) cuts.push_back(std::move(c));
  }
  return cuts;
}

SizeCut make_size_cut(std::vector<int> elements, int m_hat, const ObjectConfig& config) {
  std::sort(elements.begin(), elements.end());
  SizeCut cut{std::move(elements), m_hat};
  if (m_hat < config.max_size() || m_hat > config.total_elements() - 1)
    throw std::invalid_argument("m_hat must lie in [d_max, total elements - 1]");
  validate_cut(Cut{cut}, config);
  return cut;
}

int universe_size(const UniverseLabeling& lab) {
  std::set<int> labels;
  int singletons = 0;
  for (const auto& obj : lab.labels)
    for (int v : obj) {
      if (v == 0) ++singletons;
      else labels.insert(v);
    }
  return static_cast<int>(labels.size()) + singletons;
}

bool size_cut_valid_on(const SizeCut& cut, const BinaryMaps& vertex) {
  LinearForm f = linear_form(Cut{cut}, vertex.config());
  return evaluate(f, vertex) >= f.rhs;
}

namespace {

using nlohmann::json;

json one_based(const std::vector<int>& v) {
  json a = json::array();
  for (int x : v) a.push_back(x + 1);
  return a;
}

std::vector<int> zero_based(const json& a, const char* field) {
  if (!a.is_array()) throw MalformedInput(std::string("cut field '") + field + "' must be an array");
  std::vector<int> v;
  for (const auto& x : a) v.push_back(x.get<int>() - 1);
  return v;
}

Triple triple_from(const json& a) {
  auto v = zero_based(a, "triple");
  if (v.size() != 3) throw MalformedInput("cut field 'triple' needs three entries");
  return {v[0], v[1], v[2]};
}

}  // namespace

std::string cuts_to_json_text(const std::vector<Cut>& cuts) {
  json out = json::array();
  for (const auto& cut : cuts) {
    json e;
    if (auto* c = std::get_if<ConsistencyCut>(&cut)) {
      e["type"] = "consistency";
      e["triple"] = {c->triple.i + 1, c->triple.j + 1, c->triple.k + 1};
      e["orientation"] = to_string(c->orientation);
      e["pivot"] = c->pivot + 1;
      e["D1"] = one_based(c->d1);
      e["D2"] = one_based(c->d2);
    } else if (auto* b = std::get_if<BlockCut>(&cut)) {
      e["type"] = "block";
      e["triple"] = {b->triple.i + 1, b->triple.j + 1, b->triple.k + 1};
      e["orientation"] = to_string(b->orientation);
      e["D1"] = one_based(b->d1);
      e["D2"] = one_based(b->d2);
      e["D3"] = one_based(b->d3);
    } else {
      const auto& s = std::get<SizeCut>(cut);
      e["type"] = "size";
      e["N'"] = one_based(s.elements);
      e["m_hat"] = s.m_hat;
    }
    out.push_back(std::move(e));
  }
  return out.dump(1);
}

std::vector<Cut> cuts_from_json_text(const std::string& text) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedInput(std::string("cut pool is not valid JSON: ") + e.what());
  }
  if (!in.is_array()) throw MalformedInput("cut pool must be a JSON array");
  std::vector<Cut> cuts;
  for (const auto& e : in) {
    std::string type = e.value("type", "");
    if (type == "consistency") {
      cuts.push_back(ConsistencyCut{triple_from(e.at("triple")), orientation_from_string(e.at("orientation")),
                                    e.at("pivot").get<int>() - 1, zero_based(e.at("D1"), "D1"),
                                    zero_based(e.at("D2"), "D2")});
    } else if (type == "block") {
      cuts.push_back(BlockCut{triple_from(e.at("triple")), orientation_from_string(e.at("orientation")),
                              zero_based(e.at("D1"), "D1"), zero_based(e.at("D2"), "D2"),
                              zero_based(e.at("D3"), "D3")});
    } else if (type == "size") {
      cuts.push_back(SizeCut{zero_based(e.at("N'"), "N'"), e.at("m_hat").get<int>()});
    } else {
      throw MalformedInput("unknown cut type '" + type + "'");
    }
  }
  return cuts;
}

}  // namespace jomatch
