#include "jomatch/certificate.hpp"
#include "jomatch/driver.hpp"
#include "jomatch/polytope.hpp"
#include "jomatch/synth.hpp"

#include "svg_chart.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

using namespace jomatch;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Global {
  uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
  std::string format = "csv";
};

struct GenArgs {
  std::string input;
  int n = 10, d = 3;
  double p_true = 0.9, p_obs = 1.0;
};

void add_gen_options(CLI::App* cmd, GenArgs& g, bool with_input) {
  if (with_input) cmd->add_option("--input", g.input, "Instance JSON file (otherwise one is generated)");
  cmd->add_option("--n", g.n, "Number of objects")->check(CLI::PositiveNumber);
  cmd->add_option("--d", g.d, "Elements per object")->check(CLI::PositiveNumber);
  cmd->add_option("--p-true", g.p_true, "Probability that a block is correct")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--p-obs", g.p_obs, "Probability that a block is observed")->check(CLI::Range(0.0, 1.0));
}

Instance load_or_generate(const GenArgs& g, uint64_t seed) {
  if (!g.input.empty()) return read_instance(g.input);
  return generate({g.n, g.d, g.p_true, g.p_obs, seed});
}

std::string fmt(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  } else {
    auto colon2 = text.find(':', colon + 1);
    if (colon2 == std::string::npos) throw ConfigError("grid must be start:step:end");
    double start = std::stod(text.substr(0, colon)), step = std::stod(text.substr(colon + 1, colon2 - colon - 1)),
           end = std::stod(text.substr(colon2 + 1));
    if (!(step > 0)) throw ConfigError("grid step must be positive");
    const int count = static_cast<int>(std::floor((end - start) / step + 1e-9)) + 1;
    for (int k = 0; k < count; ++k) out.push_back(std::round((start + k * step) * 1e9) / 1e9);
  }
  if (out.empty()) throw ConfigError("empty grid '" + text + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoi(item));
    } else {
      int a = std::stoi(item.substr(0, dots)), b = std::stoi(item.substr(dots + 2));
      for (int v = a; v <= b; ++v) out.push_back(v);
    }
  }
  if (out.empty()) throw ConfigError("empty list '" + text + "'");
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

LpBackend parse_backend(const std::string& s) {
  if (s == "auto") return LpBackend::kAuto;
  if (s == "builtin") return LpBackend::kBuiltin;
  if (s == "highs") return LpBackend::kHighs;
  if (s == "export-only") return LpBackend::kExportOnly;
  throw ConfigError("unknown backend '" + s + "'");
}

std::string out_path(const Global& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// Runs jobs [0, count) on a pool of workers; each job writes its own slot.
template <typename F>
void parallel_for(int count, int threads, F job) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) job(k);
  };
  threads = std::max(1, std::min(threads, count));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

std::string report_json(const SolveReport& r, const Instance& inst) {
  json j;
  j["method"] = r.method;
  j["status"] = to_string(r.status);
  j["lp_status"] = to_string(r.lp.status);
  j["backend"] = r.lp.backend;
  j["formulation"] = r.formulation;
  j["objective"] = r.objective;
  j["is_binary"] = r.is_binary;
  j["is_consistent"] = r.is_consistent;
  j["recovered"] = r.recovered;
  if (r.unique) j["unique"] = *r.unique;
  j["cuts_added"] = r.cuts_added;
  j["rounds"] = r.rounds;
  j["lazy_rounds"] = r.lazy_rounds;
  j["lp_rows"] = r.lp_rows;
  j["round_objectives"] = r.round_objectives;
  j["matched_pairs"] = inst.matched_pairs();
  if (!r.lp.message.empty()) j["message"] = r.lp.message;
  return j.dump(2) + "\n";
}

// ---- gen ----

int run_gen(const Global& g, const GenArgs& a, const std::string& out) {
  std::cout << "# jomatch gen n=" << a.n << " d=" << a.d << " p_true=" << a.p_true << " p_obs=" << a.p_obs
            << " seed=" << g.seed << " generator=\"" << generator_name() << "\"\n";
  Instance inst = generate({a.n, a.d, a.p_true, a.p_obs, g.seed});
  if (out == "-") {
    std::cout << instance_to_json_text(inst);
  } else {
    std::string path = out.empty() ? out_path(g, "instance.json") : out;
    write_instance(inst, path);
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

// ---- solve ----

struct SolveArgs {
  std::string method = "basic";
  std::string backend = "auto";
  std::string export_path;
  bool probe = false;
  int cut_limit = 1000;
  int max_rounds = 50;
  std::string strategy = "first-k";
  std::string save;
};

SolveOptions solve_options(const Global& g, const SolveArgs& s) {
  SolveOptions o;
  o.lp.backend = parse_backend(s.backend);
  o.lp.export_path = s.export_path;
  o.uniqueness_probe = s.probe;
  o.cut_limit = s.cut_limit;
  o.per_round_limit = s.cut_limit;
  o.max_rounds = s.max_rounds;
  o.threads = g.threads;
  if (s.strategy == "top-k") o.strategy = SeparationStrategy::kTopK;
  else if (s.strategy != "first-k") throw ConfigError("unknown strategy '" + s.strategy + "'");
  return o;
}

int run_solve(const Global& g, const GenArgs& a, const SolveArgs& s) {
  Instance inst = load_or_generate(a, g.seed);
  std::cout << "# jomatch solve method=" << s.method << " backend=" << s.backend << " strategy=" << s.strategy
            << " cut_limit=" << s.cut_limit << " max_rounds=" << s.max_rounds << " bin_tol=" << kBinTol;
  if (a.input.empty())
    std::cout << " n=" << a.n << " d=" << a.d << " p_true=" << a.p_true << " p_obs=" << a.p_obs << " seed=" << g.seed;
  else
    std::cout << " input=" << a.input;
  std::cout << "\n";
  SolveReport r = solve_method(s.method, inst, solve_options(g, s));
  if (r.lp.status == LpStatus::kNotSolved) {
    std::cout << r.lp.message << "\n";
    return 0;
  }
  if (g.format == "json") {
    std::cout << report_json(r, inst);
  } else {
    std::cout << "method,status,objective,is_binary,is_consistent,recovered,unique,cuts_added,rounds,lp_rows\n";
    std::cout << r.method << "," << to_string(r.status) << "," << fmt(r.objective, "%.9g") << "," << r.is_binary << ","
              << r.is_consistent << "," << r.recovered << "," << (r.unique ? (*r.unique ? "1" : "0") : "") << ","
              << r.cuts_added << "," << r.rounds << "," << r.lp_rows << "\n";
  }
  if (!s.save.empty()) {
    json j = json::object();
    for (int p = 0; p < inst.config.num_pairs(); ++p) {
      auto [i, k] = inst.config.pair_at(p);
      const auto& b = r.maps.block_at(p);
      json rows = json::array();
      for (int t = 0; t < b.rows(); ++t) {
        json row = json::array();
        for (int q = 0; q < b.cols(); ++q) row.push_back(b(t, q));
        rows.push_back(row);
      }
      j[std::to_string(i + 1) + "," + std::to_string(k + 1)] = rows;
    }
    write_text(s.save, j.dump() + "\n");
  }
  return r.status == SolveStatus::kSolverFailure ? 2 : 0;
}

// ---- sweep ----

struct SweepArgs {
  int n = 10, d = 5;
  std::string p_obs = "1.0";
  std::string p_true = "0.1:0.1:1.0";
  int seeds = 20;
  std::string methods = "basic,double";
  bool with_time = false;
  std::string backend = "auto";
};

struct SweepJob {
  double p_obs, p_true;
  uint64_t seed;
  std::string method;
};

int run_sweep(const Global& g, const SweepArgs& a) {
  auto p_obs = parse_grid(a.p_obs);
  auto p_true = parse_grid(a.p_true);
  auto methods = split(a.methods);
  if (a.seeds < 1) throw ConfigError("--seeds must be positive");
  std::cout << "# jomatch sweep n=" << a.n << " d=" << a.d << " p_obs=" << a.p_obs << " p_true=" << a.p_true
            << " seeds=" << a.seeds << " seed=" << g.seed << " methods=" << a.methods << " backend=" << a.backend
            << " bin_tol=" << kBinTol << " generator=\"" << generator_name() << "\"\n";
  std::vector<SweepJob> jobs;
  for (double po : p_obs)
    for (double pt : p_true)
      for (int s = 0; s < a.seeds; ++s)
        for (const auto& m : methods) jobs.push_back({po, pt, g.seed + static_cast<uint64_t>(s), m});
  std::vector<ResultRow> rows(jobs.size());
  std::vector<std::string> errors(jobs.size());
  SolveArgs sa;
  sa.backend = a.backend;
  Global inner = g;
  inner.threads = 1;
  SolveOptions opts = solve_options(inner, sa);
  parallel_for(static_cast<int>(jobs.size()), g.threads, [&](int k) {
    const SweepJob& j = jobs[k];
    ResultRow& r = rows[k];
    r.n = a.n;
    r.d = a.d;
    r.p_true = j.p_true;
    r.p_obs = j.p_obs;
    r.seed = j.seed;
    r.method = j.method;
    try {
      Instance inst = generate({a.n, a.d, j.p_true, j.p_obs, j.seed});
      SolveReport rep = solve_method(j.method, inst, opts);
      r.objective = rep.objective;
      r.is_binary = rep.is_binary;
      r.recovered = rep.recovered;
      r.cuts_added = rep.cuts_added;
      r.rounds = rep.rounds;
      r.wall_ms = rep.wall_ms;
      if (rep.status == SolveStatus::kSolverFailure) errors[k] = "solver failure";
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });

  std::string header = results_csv_header();
  if (!a.with_time) header.erase(header.rfind(','));
  std::string csv = header + ",error\n";
  for (size_t k = 0; k < rows.size(); ++k) {
    std::string line = results_csv_line(rows[k], a.with_time);
    if (!a.with_time) line.pop_back();
    csv += line + "," + errors[k] + "\n";
  }
  const std::string results = out_path(g, "sweep_results.csv");
  write_text(results, csv);

  // Rates per (p_obs, p_true, method) in job order.
  std::string summary = "n,d,p_obs,p_true,method,trials,recovery_rate,tightness_rate,failures\n";
  std::map<std::pair<double, std::string>, ChartSeries> rec, tight;
  json cells = json::array();
  for (double po : p_obs)
    for (double pt : p_true)
      for (const auto& m : methods) {
        int trials = 0, recovered = 0, binary = 0, failed = 0;
        for (size_t k = 0; k < jobs.size(); ++k) {
          if (jobs[k].p_obs != po || jobs[k].p_true != pt || jobs[k].method != m) continue;
          if (!errors[k].empty()) {
            ++failed;
            continue;
          }
          ++trials;
          recovered += rows[k].recovered;
          binary += rows[k].is_binary;
        }
        double rr = trials ? static_cast<double>(recovered) / trials : 0, tr = trials ? static_cast<double>(binary) / trials : 0;
        summary += std::to_string(a.n) + "," + std::to_string(a.d) + "," + fmt(po, "%.4f") + "," + fmt(pt, "%.4f") + "," + m +
                   "," + std::to_string(trials) + "," + fmt(rr, "%.4f") + "," + fmt(tr, "%.4f") + "," +
                   std::to_string(failed) + "\n";
        cells.push_back({{"p_obs", po}, {"p_true", pt}, {"method", m}, {"trials", trials}, {"recovery_rate", rr},
                         {"tightness_rate", tr}, {"failures", failed}});
        auto& sr = rec[{po, m}];
        sr.name = m + " recovery p_obs=" + fmt(po, "%.2f");
        sr.x.push_back(pt);
        sr.y.push_back(rr);
        auto& st = tight[{po, m}];
        st.name = m + " tightness p_obs=" + fmt(po, "%.2f");
        st.x.push_back(pt);
        st.y.push_back(tr);
      }
  write_text(out_path(g, "sweep_summary.csv"), summary);
  std::vector<ChartSeries> series;
  for (auto& [key, s] : rec) series.push_back(s);
  for (auto& [key, s] : tight) series.push_back(s);
  write_line_chart(out_path(g, "sweep_chart.svg"), "n=" + std::to_string(a.n) + ", d=" + std::to_string(a.d), "p_true",
                   "rate", series);
  if (g.format == "json") std::cout << cells.dump(2) << "\n";
  else std::cout << summary;
  return 0;
}

// ---- timing ----

struct TimingArgs {
  int n = 20, d = 4;
  std::string p_true = "0.5,0.7,0.9";
  double p_obs = 1.0;
  int seeds = 3;
  std::string methods = "basic,double";
  std::string backend = "auto";
};

int run_timing(const Global& g, const TimingArgs& a) {
  auto p_true = parse_grid(a.p_true);
  auto methods = split(a.methods);
  std::cout << "# jomatch timing n=" << a.n << " d=" << a.d << " p_true=" << a.p_true << " p_obs=" << a.p_obs
            << " seeds=" << a.seeds << " seed=" << g.seed << " methods=" << a.methods << " backend=" << a.backend << "\n";
  SolveArgs sa;
  sa.backend = a.backend;
  SolveOptions opts = solve_options(g, sa);
  std::string csv = "n,d,p_true,p_obs,seed,method,wall_ms,lp_rows,rounds,cuts_added,is_binary,recovered\n";
  json out = json::array();
  for (double pt : p_true)
    for (int s = 0; s < a.seeds; ++s) {
      Instance inst = generate({a.n, a.d, pt, a.p_obs, g.seed + static_cast<uint64_t>(s)});
      for (const auto& m : methods) {
        SolveReport r = solve_method(m, inst, opts);
        csv += std::to_string(a.n) + "," + std::to_string(a.d) + "," + fmt(pt, "%.4f") + "," + fmt(a.p_obs, "%.4f") + "," +
               std::to_string(g.seed + s) + "," + m + "," + fmt(r.wall_ms, "%.1f") + "," + std::to_string(r.lp_rows) +
               "," + std::to_string(r.rounds) + "," + std::to_string(r.cuts_added) + "," +
               std::to_string(r.is_binary) + "," + std::to_string(r.recovered) + "\n";
        out.push_back({{"p_true", pt}, {"seed", g.seed + s}, {"method", m}, {"wall_ms", r.wall_ms}, {"lp_rows", r.lp_rows}});
      }
    }
  write_text(out_path(g, "timing.csv"), csv);
  if (g.format == "json") std::cout << out.dump(2) << "\n";
  else std::cout << csv;
  return 0;
}

// ---- certify ----

struct CertifyArgs {
  double alpha = 1.172, beta = 1.657;
  bool solve = false;
  bool duals = true;
};

int run_certify(const Global& g, const GenArgs& a, const CertifyArgs& c) {
  Instance inst = load_or_generate(a, g.seed);
  CertParams params{c.alpha, c.beta};
  std::cout << "# jomatch certify alpha=" << c.alpha << " beta=" << c.beta;
  if (a.input.empty())
    std::cout << " n=" << a.n << " d=" << a.d << " p_true=" << a.p_true << " p_obs=" << a.p_obs << " seed=" << g.seed;
  else
    std::cout << " input=" << a.input;
  std::cout << "\n";
  ConditionsReport rep = check_conditions(inst, params);
  json j;
  j["all_strict"] = rep.all_strict;
  j["min_margin"] = rep.min_margin;
  j["cells"] = rep.cells;
  json counts = json::object();
  std::string table = "case,strict,weak,fail\n";
  for (int k = 0; k < 6; ++k) {
    const char* name = to_string(static_cast<Case>(k));
    counts[name] = {{"strict", rep.counts[k][0]}, {"weak", rep.counts[k][1]}, {"fail", rep.counts[k][2]}};
    table += std::string(name) + "," + std::to_string(rep.counts[k][0]) + "," + std::to_string(rep.counts[k][1]) + "," +
             std::to_string(rep.counts[k][2]) + "\n";
  }
  j["counts"] = counts;
  json worst = json::array();
  for (const auto& w : rep.worst)
    worst.push_back({{"i", w.i + 1}, {"j", w.j + 1}, {"t", w.t + 1}, {"q", w.q + 1}, {"case", to_string(w.kind)},
                     {"verdict", to_string(w.verdict)}, {"margin", w.margin}});
  j["non_strict"] = worst;
  if (c.duals) {
    DualCertificate cert = build_dual_certificate(inst, params);
    j["certificate"] = {{"verified", cert.verified},
                        {"dual_objective", cert.dual_objective},
                        {"primal_objective", cert.primal_objective},
                        {"gap", cert.gap},
                        {"min_lambda", cert.min_lambda},
                        {"min_mu", cert.min_mu},
                        {"positive_multipliers", cert.lambda.size()},
                        {"max_formula_mismatch", cert.max_formula_mismatch},
                        {"first_violation", cert.first_violation}};
  }
  if (c.solve) {
    SolveReport r = solve_basic(inst);
    j["basic_lp"] = {{"objective", r.objective}, {"is_binary", r.is_binary}, {"recovered", r.recovered}};
  }
  if (g.format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << table;
    std::cout << "all_strict," << (rep.all_strict ? "yes" : "no") << "\nmin_margin," << fmt(rep.min_margin, "%.6g") << "\n";
    if (c.duals)
      std::cout << "certificate_verified," << (j["certificate"]["verified"].get<bool>() ? "yes" : "no")
                << "\ncertificate_gap," << fmt(j["certificate"]["gap"].get<double>(), "%.3g")
                << "\nfirst_violation," << j["certificate"]["first_violation"].get<std::string>() << "\n";
    if (c.solve)
      std::cout << "basic_lp_recovered," << (j["basic_lp"]["recovered"].get<bool>() ? "yes" : "no") << "\n";
  }
  return 0;
}

// ---- threshold ----

struct ThresholdArgs {
  std::string d_list = "2,3,5,10,20,50";
  double grid_step = 0.005;
  double p_step = 1e-4;
};

int run_threshold(const Global& g, const ThresholdArgs& a) {
  auto ds = parse_int_list(a.d_list);
  std::cout << "# jomatch threshold d_list=" << a.d_list << " grid_step=" << a.grid_step << " p_step=" << a.p_step
            << " threads=" << g.threads << "\n";
  ThresholdOptions o{a.grid_step, a.p_step, g.threads};
  std::string csv = "d,p_star,alpha,beta\n";
  ChartSeries s{"p_star", {}, {}};
  json out = json::array();
  for (int d : ds) {
    ThresholdResult r = recovery_threshold(d, o);
    csv += std::to_string(d) + "," + fmt(r.p_star, "%.5f") + "," + fmt(r.alpha, "%.5f") + "," + fmt(r.beta, "%.5f") + "\n";
    s.x.push_back(d);
    s.y.push_back(r.p_star);
    out.push_back({{"d", d}, {"p_star", r.p_star}, {"alpha", r.alpha}, {"beta", r.beta}});
  }
  write_text(out_path(g, "threshold.csv"), csv);
  write_line_chart(out_path(g, "threshold.svg"), "recovery threshold", "d", "p_star", {s});
  if (g.format == "json") std::cout << out.dump(2) << "\n";
  else std::cout << csv;
  return 0;
}

// ---- verify ----

struct VerifyArgs {
  int n = 3, d = 2;
  std::string sizes;
  std::string family = "consistency";
  bool all = false;
};

int run_verify(const Global& g, const VerifyArgs& a) {
  ObjectConfig config = a.sizes.empty() ? ObjectConfig::uniform(a.n, a.d) : ObjectConfig(parse_int_list(a.sizes));
  std::cout << "# jomatch verify sizes=";
  for (int k = 0; k < config.n(); ++k) std::cout << (k ? "," : "") << config.size(k);
  std::cout << " family=" << a.family << " threads=" << g.threads << "\n";
  VertexSet all = enumerate_vertices(config);
  const int dim = dimension(all);
  auto family = inequality_family(config, a.family);
  std::vector<FacetCheck> checks(family.size());
  std::map<int, std::pair<VertexSet, int>> restricted;  // size inequalities: vertices with universe <= m_hat
  if (a.family == "size")
    for (const auto& f : family)
      if (!restricted.count(f.m_hat)) {
        VertexSet v;
        v.config = config;
        for (size_t x = 0; x < all.size(); ++x)
          if (universe_size(all.labelings[x]) <= f.m_hat) {
            v.points.push_back(all.points[x]);
            v.labelings.push_back(all.labelings[x]);
          }
        int vd = dimension(v);
        restricted[f.m_hat] = {std::move(v), vd};
      }
  parallel_for(static_cast<int>(family.size()), g.threads, [&](int k) {
    if (a.family == "size") {
      const auto& [v, vd] = restricted.at(family[k].m_hat);
      checks[k] = verify_facet(family[k].form, v, vd);
    } else {
      checks[k] = verify_facet(family[k].form, all, dim);
    }
  });
  int valid = 0, facets = 0;
  for (const auto& c : checks) {
    valid += c.valid;
    facets += c.is_facet;
  }
  if (g.format == "json") {
    json rows = json::array();
    for (size_t k = 0; k < family.size(); ++k)
      if (a.all || !checks[k].is_facet)
        rows.push_back({{"inequality", family[k].name}, {"valid", checks[k].valid}, {"tight_rank", checks[k].tight_rank},
                        {"is_facet", checks[k].is_facet}});
    json j{{"vertices", all.size()}, {"dimension", dim}, {"inequalities", family.size()}, {"valid", valid},
           {"facets", facets}, {"rows", rows}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "vertices," << all.size() << "\ndimension," << dim << "\ninequalities," << family.size() << "\nvalid,"
              << valid << "\nfacets," << facets << "\n";
    std::cout << "inequality,valid,tight_rank,is_facet\n";
    for (size_t k = 0; k < family.size(); ++k)
      if (a.all || !checks[k].is_facet)
        std::cout << "\"" << family[k].name << "\"," << checks[k].valid << "," << checks[k].tight_rank << ","
                  << checks[k].is_facet << "\n";
  }
  return 0;
}

// ---- oracle ----

int run_oracle(const Global& g, const GenArgs& a, bool compare) {
  Instance inst = load_or_generate(a, g.seed);
  std::cout << "# jomatch oracle";
  if (a.input.empty())
    std::cout << " n=" << a.n << " d=" << a.d << " p_true=" << a.p_true << " p_obs=" << a.p_obs << " seed=" << g.seed;
  else
    std::cout << " input=" << a.input;
  std::cout << "\n";
  OracleResult o = ilp_oracle(inst);
  bool truth_optimal = false;
  if (inst.ground_truth) {
    BinaryMaps truth = maps_from_labeling(inst.config, *inst.ground_truth);
    for (const auto& m : o.argmin) truth_optimal = truth_optimal || m == truth;
  }
  json j{{"optimum", o.optimum}, {"frobenius_optimum", o.optimum + inst.matched_pairs()}, {"argmin_count", o.argmin.size()},
         {"unique", o.unique()}, {"ground_truth_optimal", truth_optimal}};
  if (compare) {
    SolveReport r = solve_basic(inst);
    j["basic_lp_objective"] = r.objective;
    j["basic_lp_binary"] = r.is_binary;
  }
  if (g.format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    for (auto it = j.begin(); it != j.end(); ++it) std::cout << it.key() << "," << it.value().dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint object matching: LP relaxations, cutting planes, polytope checks and recovery certificates"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  GenArgs gen_args;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate an instance from the random corruption model");
  add_gen_options(gen, gen_args, false);
  gen->add_option("--out", gen_out, "Output file ('-' for stdout)");

  GenArgs solve_gen;
  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  add_gen_options(solve_cmd, solve_gen, true);
  solve_cmd->add_option("--method", solve_args.method, "basic, double or lpf")
      ->check(CLI::IsMember({"basic", "double", "lpf"}));
  solve_cmd->add_option("--backend", solve_args.backend, "auto, builtin, highs or export-only");
  solve_cmd->add_option("--export", solve_args.export_path, "LP file written by the export-only backend");
  solve_cmd->add_flag("--probe", solve_args.probe, "Run the cost-perturbation uniqueness probe");
  solve_cmd->add_option("--cut-limit", solve_args.cut_limit, "Cuts added per separation round");
  solve_cmd->add_option("--max-rounds", solve_args.max_rounds, "Cutting-plane round limit");
  solve_cmd->add_option("--strategy", solve_args.strategy, "first-k or top-k");
  solve_cmd->add_option("--save", solve_args.save, "Write the LP solution blocks as JSON");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Recovery and tightness rates over a p_true grid");
  sweep->add_option("--n", sweep_args.n, "Number of objects");
  sweep->add_option("--d", sweep_args.d, "Elements per object");
  sweep->add_option("--p-obs", sweep_args.p_obs, "p_obs values (list or start:step:end)");
  sweep->add_option("--p-true", sweep_args.p_true, "p_true values (list or start:step:end)");
  sweep->add_option("--seeds", sweep_args.seeds, "Trials per cell");
  sweep->add_option("--methods", sweep_args.methods, "Comma-separated methods");
  sweep->add_option("--backend", sweep_args.backend, "LP backend");
  sweep->add_flag("--with-time", sweep_args.with_time, "Include wall times (the CSV is then not reproducible)");

  TimingArgs timing_args;
  auto* timing = app.add_subcommand("timing", "Wall times of the basic and double LP");
  timing->add_option("--n", timing_args.n, "Number of objects");
  timing->add_option("--d", timing_args.d, "Elements per object");
  timing->add_option("--p-true", timing_args.p_true, "p_true values");
  timing->add_option("--p-obs", timing_args.p_obs, "Observation probability");
  timing->add_option("--seeds", timing_args.seeds, "Trials per p_true");
  timing->add_option("--methods", timing_args.methods, "Comma-separated methods");
  timing->add_option("--backend", timing_args.backend, "LP backend");

  GenArgs cert_gen;
  CertifyArgs cert_args;
  auto* certify = app.add_subcommand("certify", "Evaluate the recovery conditions and build the dual certificate");
  add_gen_options(certify, cert_gen, true);
  certify->add_option("--alpha", cert_args.alpha, "alpha")->check(CLI::PositiveNumber);
  certify->add_option("--beta", cert_args.beta, "beta")->check(CLI::PositiveNumber);
  certify->add_flag("--solve", cert_args.solve, "Also solve the basic LP");

  ThresholdArgs thr_args;
  auto* threshold = app.add_subcommand("threshold", "Recovery threshold p_star(d)");
  threshold->add_option("--d-list", thr_args.d_list, "d values, e.g. 2,3,5 or 2..50");
  threshold->add_option("--grid-step", thr_args.grid_step, "Grid step for alpha and beta");
  threshold->add_option("--p-step", thr_args.p_step, "Scan step for p");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Validity and facet checks on a small polytope");
  verify->add_option("--n", verify_args.n, "Number of objects");
  verify->add_option("--d", verify_args.d, "Elements per object");
  verify->add_option("--sizes", verify_args.sizes, "Comma-separated object sizes (overrides --n/--d)");
  verify->add_option("--family", verify_args.family, "Inequality family")
      ->check(CLI::IsMember({"nonneg", "rowsum", "consistency", "block", "size"}));
  verify->add_flag("--all", verify_args.all, "List every inequality, not only the non-facets");

  GenArgs oracle_gen;
  bool oracle_compare = false;
  auto* oracle = app.add_subcommand("oracle", "Exact optimum by vertex enumeration");
  add_gen_options(oracle, oracle_gen, true);
  oracle->add_flag("--compare", oracle_compare, "Also solve the basic LP");

  app.fallthrough();
  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return run_gen(g, gen_args, gen_out);
    if (*solve_cmd) return run_solve(g, solve_gen, solve_args);
    if (*sweep) return run_sweep(g, sweep_args);
    if (*timing) return run_timing(g, timing_args);
    if (*certify) return run_certify(g, cert_gen, cert_args);
    if (*threshold) return run_threshold(g, thr_args);
    if (*verify) return run_verify(g, verify_args);
    if (*oracle) return run_oracle(g, oracle_gen, oracle_compare);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
