#pragma once

// Command-line front end.  run() is usable in-process (the tests drive it that
// way); main.cpp only forwards argv.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mqscale/mqscale.hpp"

namespace mqscale::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { ok = 0, usage = 2, numeric = 3, resource = 4 };

using Cell = std::variant<double, long, std::string, bool>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

struct Output {
  std::string format = "csv";
  bool full_precision = false;
};

inline std::string format_double(double v, bool full) {
  if (v == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, full ? "%.17g" : "%.6g", v);
  return buf;
}

inline std::string cell_text(const Cell& c, bool full) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d, full);
  if (const auto* l = std::get_if<long>(&c)) return std::to_string(*l);
  if (const auto* f = std::get_if<bool>(&c)) return *f ? "true" : "false";
  return std::get<std::string>(c);
}

inline nlohmann::ordered_json cell_json(const Cell& c, bool full) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return format_double(*d, full);
    return full ? *d : std::stod(format_double(*d, false));
  }
  if (const auto* l = std::get_if<long>(&c)) return *l;
  if (const auto* f = std::get_if<bool>(&c)) return *f;
  return std::get<std::string>(c);
}

inline void render(const Table& t, const Output& o, int n, const std::string& command,
                   std::ostream& out) {
  if (o.format == "json") {
    nlohmann::ordered_json doc;
    doc["meta"] = {{"n", n}, {"command", command}, {"version", kVersion}};
    doc["data"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < t.header.size(); ++i) obj[t.header[i]] = cell_json(row[i], o.full_precision);
      doc["data"].push_back(std::move(obj));
    }
    out << doc.dump(2) << "\n";
    return;
  }
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i], o.full_precision);
    out << "\n";
  }
}

/// "lo:hi:step" or a single number.
inline Window parse_scan(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("malformed scan '" + s + "' (expected lo:hi:step)");
    }
  }
  if (parts.size() == 1) return {parts[0], parts[0], 1.0};
  if (parts.size() != 3 || parts[1] < parts[0] || !(parts[2] > 0.0)) {
    throw ConfigError("malformed scan '" + s + "' (expected lo:hi:step)");
  }
  return {parts[0], parts[1], parts[2]};
}

inline one_qubit::DiagonalModel parse_model(const std::string& s) {
  if (s == "exact") return one_qubit::DiagonalModel::exact;
  if (s == "published") return one_qubit::DiagonalModel::published;
  throw ConfigError("unknown model '" + s + "'");
}

/// Sender matrix from JSON: 16 [re, im] pairs row-major, or 4 rows of 4 pairs.
inline Matrix4 read_sender(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sender file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sender file is not valid JSON: ") + e.what());
  }
  std::vector<nlohmann::json> flat;
  if (j.is_array() && j.size() == 4 && j[0].is_array() && j[0].size() == 4 && j[0][0].is_array()) {
    for (const auto& row : j) for (const auto& e : row) flat.push_back(e);
  } else if (j.is_array()) {
    for (const auto& e : j) flat.push_back(e);
  }
  if (flat.size() != 16) throw ConfigError("sender must hold 16 complex entries");
  Matrix4 m;
  for (int k = 0; k < 16; ++k) {
    const auto& e = flat[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ConfigError("sender entries must be [re, im] pairs");
    }
    m(k / 4, k % 4) = cplx(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

struct Lambda0Choice {
  Lambda0Mode mode = Lambda0Mode::free;
  std::optional<double> value;
};

inline Lambda0Choice parse_lambda0(const std::string& s) {
  if (s == "free") return {Lambda0Mode::free, std::nullopt};
  if (s == "one") return {Lambda0Mode::fixed_one, 1.0};
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return {Lambda0Mode::free, v};
  } catch (const std::exception&) {
  }
  throw ConfigError("--lambda0 expects a number, 'free' or 'one'");
}

inline OptProblem make_problem(Case c, Lambda0Mode mode, const std::string& window,
                               const ModeBasis& basis, unsigned threads) {
  OptProblem p;
  if (window == "full") {
    p = OptProblem::defaults(c, mode, basis.spec());
  } else if (window == "first-arrival") {
    p = OptProblem::first_arrival(c, mode, basis);
  } else {
    throw ConfigError("--window expects 'full' or 'first-arrival'");
  }
  p.threads = threads;
  return p;
}

inline std::vector<Cell> optimum_cells(const OptResult& r) {
  const auto& b = r.best;
  std::vector<Cell> cells = {static_cast<long>(r.objective_case),
                             std::string(r.lambda0_mode == Lambda0Mode::free ? "free" : "one"),
                             r.feasible,
                             r.objective, b.s1, b.s2, b.s12, b.lambda1, b.lambda2,
                             b.t, b.b, b.lambda0, r.evaluations};
  for (int i = 0; i < 5; ++i) {
    cells.push_back(b.x0(i).real());
    cells.push_back(b.x0(i).imag());
  }
  for (int i = 0; i < 4; ++i) {
    cells.push_back(b.x1 ? (*b.x1)(i).real() : 0.0);
    cells.push_back(b.x1 ? (*b.x1)(i).imag() : 0.0);
  }
  return cells;
}

inline std::vector<std::string> optimum_header() {
  std::vector<std::string> h = {"case", "lambda0_mode", "feasible", "objective", "S1", "S2", "S12",
                                "lambda1", "lambda2", "t_opt", "b_opt", "lambda0_opt",
                                "evaluations"};
  for (int i = 1; i <= 5; ++i) {
    h.push_back("x0_" + std::to_string(i) + "_re");
    h.push_back("x0_" + std::to_string(i) + "_im");
  }
  for (int i = 1; i <= 4; ++i) {
    h.push_back("x1_" + std::to_string(i) + "_re");
    h.push_back("x1_" + std::to_string(i) + "_im");
  }
  return h;
}

/// Random physical two-qubit sender: W W^dagger / tr with complex Gaussian W.
inline Matrix4 random_sender(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix4 w;
  for (int i = 0; i < 4; ++i) for (int j = 0; j < 4; ++j) w(i, j) = cplx(g(rng), g(rng));
  Matrix4 r = w * w.adjoint();
  return r / r.trace().real();
}

struct Settings {
  int n = 6;
  std::string out_path;
  std::string format = "csv";
  std::string precision = "6";
  unsigned long long seed = 1;
  unsigned threads = 0;
  double t = 0.0, b = 0.0;
  std::string lambda0 = "free";
  int case_id = 3;
  std::string scan, b_scan, l0_scan;
  std::string model = "exact";
  std::string variant = "a";
  double a1_sq = 0.5;
  std::string sender_path;
  std::string window;
  std::string landscape_path;
  int samples = 20;
};

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block-scaled transfer of multiple-quantum coherence matrices along XX chains"};
  app.require_subcommand(1);
  Settings s;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--n", s.n, "chain length")->check(CLI::Range(2, 4096));
    sub->add_option("--out", s.out_path, "output file (default stdout)");
    sub->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--precision", s.precision, "6 (significant digits) or full")
        ->check(CLI::IsMember({"6", "full"}));
    sub->add_option("--seed", s.seed, "random seed");
    sub->add_option("--threads", s.threads, "worker threads (0: all cores)");
  };

  auto* amp = app.add_subcommand("amplitudes", "endpoint amplitude f(t) over a time scan");
  common(amp);
  amp->add_option("--scan", s.scan, "lo:hi:step")->required();

  auto* one = app.add_subcommand("one-qubit", "one-qubit line: receiver state and scale factors");
  common(one);
  one->add_option("--t", s.t)->required();
  one->add_option("--b", s.b)->required();
  one->add_option("--a1sq", s.a1_sq, "|a1|^2 of the pure sender")->check(CLI::Range(0.0, 1.0));
  one->add_option("--variant", s.variant, "restoring variant a or b")->check(CLI::IsMember({"a", "b"}));
  one->add_option("--model", s.model, "diagonal model: exact or published")
      ->check(CLI::IsMember({"exact", "published"}));

  auto* map = app.add_subcommand("map", "receiver matrix for a sender matrix");
  common(map);
  map->add_option("--t", s.t)->required();
  map->add_option("--b", s.b)->required();
  map->add_option("--sender", s.sender_path, "JSON file, row-major [re, im] pairs")->required();

  auto* solve = app.add_subcommand("solve", "scale factors and X vectors at (t, b, lambda0)");
  common(solve);
  solve->add_option("--t", s.t)->required();
  solve->add_option("--b", s.b)->required();
  solve->add_option("--lambda0", s.lambda0, "real value or 'one'")->required();

  auto* region = app.add_subcommand("region", "semi-axes over a (t, b, lambda0) grid");
  common(region);
  region->add_option("--t", s.scan, "t or lo:hi:step")->required();
  region->add_option("--b", s.b_scan, "b or lo:hi:step")->required();
  region->add_option("--lambda0", s.l0_scan, "lambda0 or lo:hi:step, or 'one'")->required();
  region->add_option("--case", s.case_id)->check(CLI::Range(1, 3));

  auto* opt = app.add_subcommand("optimize", "maximize the creatable region");
  common(opt);
  opt->add_option("--case", s.case_id)->check(CLI::Range(1, 4));
  opt->add_option("--lambda0", s.lambda0, "free or one")->check(CLI::IsMember({"free", "one"}));
  opt->add_option("--window", s.window, "time window: full [0.5N, 1.5N] or first-arrival")
      ->check(CLI::IsMember({"full", "first-arrival"}));
  opt->add_option("--landscape", s.landscape_path, "long-format CSV of the grid scan");

  auto* curve = app.add_subcommand("curve", "uniform-scaling curve lambda1 = lambda2");
  common(curve);
  curve->add_option("--b", s.b_scan, "lo:hi:step (default 0.25:10:0.25)");
  curve->add_option("--t", s.scan, "lo:hi:step (default 0.5N:1.5N:0.05)");

  auto* oc = app.add_subcommand("oracle-check", "analytic maps against dense simulation");
  common(oc);
  oc->add_option("--samples", s.samples)->check(CLI::Range(1, 100000));

  auto* t1 = app.add_subcommand("table1", "optimized semi-axes and scale factors, cases 1-4");
  common(t1);
  t1->add_option("--lambda0", s.lambda0, "free or one")->check(CLI::IsMember({"free", "one"}));
  t1->add_option("--window", s.window, "time window: full or first-arrival (default)")
      ->check(CLI::IsMember({"full", "first-arrival"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return ExitCode::usage;
  }

  const Output fmt{s.format, s.precision == "full"};
  std::string command;
  Table table;

  try {
    const ChainSpec spec{s.n};
    spec.validate();

    if (*amp) {
      command = "amplitudes";
      const ModeBasis basis(spec);
      const Window w = parse_scan(s.scan);
      if (w.lo < 0.0) throw ConfigError("time must be >= 0");
      table.header = {"t", "f_re", "f_im", "f_abs2"};
      for (int i = 0; i < w.points(); ++i) {
        const double t = w.at(i);
        const cplx f = endpoint_amplitude(basis, t);
        table.rows.push_back({t, f.real(), f.imag(), std::norm(f)});
      }
    } else if (*one) {
      command = "one-qubit";
      const ModeBasis basis(spec);
      const auto model = parse_model(s.model);
      const auto state = one_qubit::Qubit1State::pure(std::sqrt(1.0 - s.a1_sq), std::sqrt(s.a1_sq));
      const auto res = s.variant == "a" ? one_qubit::restore_variant_a(state, s.t, s.b, basis, model)
                                        : one_qubit::restore_variant_b(state, s.t, s.b, basis, model);
      const auto pz = one_qubit::perfect_zero_a1(s.t, s.b, basis, model);
      const auto tsi = one_qubit::state_independent_time(s.b, basis, 3.0 * s.n, model);
      table.header = {"t", "b", "a1sq", "lambda1_re", "lambda1_im", "lambda0", "rho11",
                      "rho12_re", "rho12_im", "rho22", "perfect_zero_a1sq", "state_independent_t"};
      Cell pz_cell = pz.kind == one_qubit::PerfectZero::Kind::value ? Cell{pz.a1_sq}
                     : pz.kind == one_qubit::PerfectZero::Kind::unphysical ? Cell{std::string("unphysical")}
                                                                             : Cell{std::string("perfect-transfer")};
      table.rows.push_back({s.t, s.b, s.a1_sq, res.lambda1.real(), res.lambda1.imag(), res.lambda0,
                            res.rho_receiver(0, 0).real(), res.rho_receiver(0, 1).real(),
                            res.rho_receiver(0, 1).imag(), res.rho_receiver(1, 1).real(), pz_cell,
                            tsi ? Cell{*tsi} : Cell{std::string("none")}});
    } else if (*map) {
      command = "map";
      spec.validate_two_qubit();
      const ModeBasis basis(spec);
      const Matrix4 sender = read_sender(s.sender_path);
      const Matrix4 r = receiver_from_sender(alpha_table(basis, s.t, s.b), sender);
      table.header = {"row", "col", "re", "im"};
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) table.rows.push_back({long{i + 1}, long{j + 1}, r(i, j).real(), r(i, j).imag()});
      }
    } else if (*solve) {
      command = "solve";
      spec.validate_two_qubit();
      const ModeBasis basis(spec);
      const auto l0 = parse_lambda0(s.lambda0);
      if (!l0.value) throw ConfigError("solve needs a numeric --lambda0 (or 'one')");
      const ScalePoint sp(basis, s.t, s.b);
      const auto zero = sp.zero_order().solve(*l0.value);
      table.header = {"quantity", "index", "re", "im"};
      const cplx l2 = lambda2(sp.table());
      table.rows.push_back({std::string("lambda2"), long{1}, l2.real(), l2.imag()});
      const auto& first = sp.first_order();
      if (first) {
        for (int i = 0; i < 4; ++i) {
          table.rows.push_back({std::string("lambda1"), long{i + 1}, first->eigenvalues[i].real(),
                                first->eigenvalues[i].imag()});
        }
        table.rows.push_back({std::string("lambda1_selected"), long{first->selected + 1},
                              first->lambda1(), 0.0});
        for (int i = 0; i < 4; ++i) {
          table.rows.push_back({std::string("x1"), long{i + 1}, first->x1(i).real(), first->x1(i).imag()});
        }
      } else {
        table.rows.push_back({std::string("lambda1_selected"), long{0}, std::string("none"), std::string("none")});
      }
      for (int i = 0; i < 5; ++i) {
        table.rows.push_back({std::string("x0"), long{i + 1}, zero.x0(i).real(), zero.x0(i).imag()});
      }
    } else if (*region) {
      command = "region";
      spec.validate_two_qubit();
      const ModeBasis basis(spec);
      const Window tw = parse_scan(s.scan), bw = parse_scan(s.b_scan);
      const Window lw = s.l0_scan == "one" ? Window{1.0, 1.0, 1.0} : parse_scan(s.l0_scan);
      const Case c = static_cast<Case>(s.case_id);
      table.header = {"t", "b", "lambda0", "S1", "S2", "S12"};
      for (int i = 0; i < tw.points(); ++i) {
        for (int j = 0; j < bw.points(); ++j) {
          const ScalePoint sp(basis, tw.at(i), bw.at(j));
          for (int k = 0; k < lw.points(); ++k) {
            const RegionReport r = sp.region(lw.at(k), c);
            table.rows.push_back({r.t, r.b, r.lambda0, r.s1, r.s2, r.s12});
          }
        }
      }
    } else if (*opt) {
      command = "optimize";
      spec.validate_two_qubit();
      const ModeBasis basis(spec);
      const auto l0 = parse_lambda0(s.lambda0);
      const auto problem = make_problem(static_cast<Case>(s.case_id), l0.mode,
                                        s.window.empty() ? "full" : s.window, basis, s.threads);
      std::vector<LandscapeSample> land;
      const OptResult r = optimize(problem, basis, s.landscape_path.empty() ? nullptr : &land);
      if (!s.landscape_path.empty()) {
        std::ofstream lf(s.landscape_path);
        if (!lf) throw ConfigError("cannot write landscape file '" + s.landscape_path + "'");
        Table lt{{"t", "b", "lambda0", "value"}, {}};
        for (const auto& x : land) lt.rows.push_back({x.t, x.b, x.lambda0, x.value});
        render(lt, {"csv", fmt.full_precision}, s.n, command, lf);
      }
      table.header = optimum_header();
      table.rows.push_back(optimum_cells(r));
    } else if (*curve) {
      command = "curve";
      spec.validate_two_qubit();
      const ModeBasis basis(spec);
      const Window bw = s.b_scan.empty() ? Window{0.25, 10.0, 0.25} : parse_scan(s.b_scan);
      const Window tw = s.scan.empty() ? Window{0.5 * s.n, 1.5 * s.n, 0.05} : parse_scan(s.scan);
      table.header = {"b", "t", "lambda"};
      for (const auto& p : uniform_curve(basis, bw, tw)) table.rows.push_back({p.b, p.t, p.lambda});
    } else if (*oc) {
      command = "oracle-check";
      const ModeBasis basis(spec);
      const oracle::DenseChain chain(spec);
      std::mt19937_64 rng(s.seed);
      std::uniform_real_distribution<double> ut(0.0, 2.0 * s.n), ub(0.0, 6.0), u01(0.0, 1.0),
          uph(0.0, 2.0 * std::numbers::pi);
      double dev1 = 0.0, dev2 = 0.0;
      for (int k = 0; k < s.samples; ++k) {
        const double t = ut(rng), b = ub(rng), a1 = u01(rng), ph = uph(rng);
        const auto st = one_qubit::Qubit1State::pure(std::sqrt(1.0 - a1), std::polar(std::sqrt(a1), ph));
        const Eigen::MatrixXcd exact = chain.evolve_and_trace(st.matrix(), t, b);
        dev1 = std::max(dev1, (one_qubit::receiver_state_1q(st, t, b, basis) - exact).norm());
      }
      table.header = {"sender", "samples", "max_deviation"};
      table.rows.push_back({std::string("one-qubit"), long{s.samples}, dev1});
      if (s.n >= 4) {
        for (int k = 0; k < s.samples; ++k) {
          const double t = ut(rng), b = ub(rng);
          const Matrix4 sender = random_sender(rng);
          const Eigen::MatrixXcd exact = chain.evolve_and_trace(sender, t, b);
          dev2 = std::max(dev2, (receiver_from_sender(alpha_table(basis, t, b), sender) - exact).norm());
        }
        table.rows.push_back({std::string("two-qubit"), long{s.samples}, dev2});
      }
    } else if (*t1) {
      command = "table1";
      spec.validate_two_qubit();
      const ModeBasis basis(spec);
      const auto l0 = parse_lambda0(s.lambda0);
      table.header = {"case", "S1", "S2", "lambda1", "lambda2", "t_opt", "b_opt", "lambda0_opt"};
      for (int c = 1; c <= 4; ++c) {
        const auto problem = make_problem(static_cast<Case>(c), l0.mode,
                                          s.window.empty() ? "first-arrival" : s.window, basis, s.threads);
        const OptResult r = optimize(problem, basis);
        const auto& b = r.best;
        const Cell none = std::string("");
        const bool s1 = needs_first_order(static_cast<Case>(c));
        const bool s2 = needs_second_order(static_cast<Case>(c));
        if (!r.feasible) {
          table.rows.push_back({long{c}, none, none, none, none, none, none, none});
          continue;
        }
        table.rows.push_back({long{c}, s1 ? Cell{b.s1} : none, s2 ? Cell{b.s2} : none,
                              s1 ? Cell{b.lambda1} : none, s2 ? Cell{b.lambda2} : none, b.t, b.b,
                              b.lambda0});
      }
    }
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::resource;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return ExitCode::numeric;
  } catch (const SingularInputError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return ExitCode::numeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage;
  }

  if (s.out_path.empty()) {
    render(table, fmt, s.n, command, out);
  } else {
    std::ofstream f(s.out_path);
    if (!f) {
      err << "error: cannot write '" << s.out_path << "'\n";
      return ExitCode::usage;
    }
    render(table, fmt, s.n, command, f);
  }
  return ExitCode::ok;
}

}  // namespace mqscale::cli
