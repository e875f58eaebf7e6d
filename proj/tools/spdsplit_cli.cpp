// Command-line front end over the C API.
//
//   spdsplit decompose     --matrix A.txt --basis S.json [--method ...] [--out report.json]
//   spdsplit verify        --matrix A.txt --basis S.json --b B.txt --c C.txt [--check-inverse] [--check-group G.txt]
//   spdsplit finance-sweep --N 100 --dt 0.01 --alpha 5 --hurst-min 0.5 --hurst-max 0.975 --hurst-steps 20
//   spdsplit bench         --suite example1,example4 --sizes 50,100,200
//
// Exit codes: 0 ok, 1 usage or internal error, 2 parse error, 3 infeasible,
// 4 solver failure, 5 verification failure.

#include "spdsplit/spdsplit.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolver = 4;
constexpr int kExitVerification = 5;

struct Failure {
  int exitCode;
  std::string message;
};

int exitFor(spdsplit_status s) {
  switch (s) {
    case SPDSPLIT_OK: return 0;
    case SPDSPLIT_PARSE_ERROR: return kExitParse;
    case SPDSPLIT_INFEASIBLE: return kExitInfeasible;
    case SPDSPLIT_SOLVER_ERROR: return kExitSolver;
    case SPDSPLIT_VERIFICATION_FAILED: return kExitVerification;
    default: return kExitUsage;
  }
}

void check(spdsplit_status s) {
  if (s != SPDSPLIT_OK) throw Failure{exitFor(s), spdsplit_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using MatrixPtr = std::unique_ptr<spdsplit_matrix, Deleter<spdsplit_matrix, spdsplit_matrix_free>>;
using BasisPtr = std::unique_ptr<spdsplit_basis, Deleter<spdsplit_basis, spdsplit_basis_free>>;
using GroupPtr = std::unique_ptr<spdsplit_group, Deleter<spdsplit_group, spdsplit_group_free>>;
using OptionsPtr = std::unique_ptr<spdsplit_options, Deleter<spdsplit_options, spdsplit_options_free>>;
using ResultPtr = std::unique_ptr<spdsplit_result, Deleter<spdsplit_result, spdsplit_result_free>>;
using DemoPtr = std::unique_ptr<spdsplit_demo, Deleter<spdsplit_demo, spdsplit_demo_free>>;

std::string takeString(char* s) {
  std::string out = s ? s : "";
  spdsplit_string_free(s);
  return out;
}

class Clock {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// FNV-1a over the file bytes; enough to tell inputs apart in a report.
std::string digestFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "unreadable";
  std::uint64_t h = 1469598103934665603ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + hex;
}

json inputDigest(const std::string& path) {
  return {{"path", path}, {"digest", std::filesystem::is_directory(path) ? std::string("directory") : digestFile(path)}};
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitUsage, "cannot write " + path};
  out << text;
}

std::vector<double> readDense(const std::string& path, std::int64_t expected) {
  std::int64_t n = 0;
  double* data = nullptr;
  check(spdsplit_read_dense(path.c_str(), &n, &data));
  std::vector<double> v(data, data + n * n);
  spdsplit_array_free(data);
  if (n != expected) {
    throw Failure{kExitParse, path + ": dimension " + std::to_string(n) + " does not match A (" +
                                  std::to_string(expected) + ")"};
  }
  return v;
}

json verificationJson(const spdsplit_verification& v) {
  return {{"reconstruction_error", v.reconstruction_error},
          {"orthogonality_residual", v.orthogonality_residual},
          {"min_eigenvalue_b", v.min_eigenvalue_b},
          {"trace_identity_gap", v.trace_identity_gap},
          {"det_inequality_slack", v.det_inequality_slack},
          {"pass", v.pass != 0}};
}

std::string commandEcho(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string matrix, basis, group, demo, out, emitB, emitC;
  std::string method = "auto", structure = "auto";
  std::int64_t n = 200;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::optional<int> maxIter;
};

int runDecompose(const DecomposeArgs& a, json& report) {
  Clock clock;
  MatrixPtr matrix;
  BasisPtr basis;
  GroupPtr group;
  DemoPtr demo;
  json inputs;

  if (!a.demo.empty()) {
    spdsplit_demo* d = nullptr;
    check(spdsplit_demo_create(a.demo.c_str(), a.n, a.seed, &d));
    demo.reset(d);
    spdsplit_matrix* m = nullptr;
    check(spdsplit_demo_matrix(d, &m));
    matrix.reset(m);
    spdsplit_basis* s = nullptr;
    check(spdsplit_demo_basis(d, 1, &s));
    basis.reset(s);
    spdsplit_group* g = nullptr;
    check(spdsplit_demo_group(d, &g));
    group.reset(g);
    inputs = {{"demo", a.demo}, {"n", a.n}, {"seed", a.seed}};
  } else {
    if (a.matrix.empty() || a.basis.empty()) throw Failure{kExitUsage, "--matrix and --basis are required without --demo"};
    spdsplit_matrix* m = nullptr;
    check(spdsplit_matrix_read(a.matrix.c_str(), &m));
    matrix.reset(m);
    spdsplit_basis* s = nullptr;
    check(spdsplit_basis_read(a.basis.c_str(), &s));
    basis.reset(s);
    inputs = {{"matrix", inputDigest(a.matrix)}, {"basis", inputDigest(a.basis)}};
    if (!a.group.empty()) {
      spdsplit_group* g = nullptr;
      check(spdsplit_group_read(a.group.c_str(), spdsplit_matrix_dim(m), &g));
      group.reset(g);
      spdsplit_basis* fixed = nullptr;
      check(spdsplit_basis_fixed(s, g, &fixed));
      basis.reset(fixed);
      inputs["group"] = inputDigest(a.group);
    }
  }
  report["inputs"] = inputs;
  report["basis_size"] = spdsplit_basis_size(basis.get());
  const double loadTime = clock.lap();

  spdsplit_options* o = nullptr;
  check(spdsplit_options_create(&o));
  OptionsPtr opts(o);
  const std::string method = (!a.demo.empty() && a.method == "auto") ? spdsplit_demo_method(demo.get()) : a.method;
  check(spdsplit_options_set_method(o, method.c_str()));
  check(spdsplit_options_set_structure(o, a.structure.c_str()));
  if (a.tol) check(spdsplit_options_set_tolerance(o, *a.tol));
  if (a.maxIter) check(spdsplit_options_set_max_iterations(o, *a.maxIter));

  spdsplit_result* r = nullptr;
  check(spdsplit_decompose(matrix.get(), basis.get(), o, &r));
  ResultPtr result(r);
  const double solveTime = clock.lap();
  report["result"] = json::parse(takeString([&] {
    char* s = nullptr;
    check(spdsplit_result_json(r, &s));
    return s;
  }()));

  const auto n = static_cast<std::size_t>(spdsplit_result_dim(r));
  std::vector<double> b(n * n), c(n * n);
  check(spdsplit_result_b(r, b.data()));
  check(spdsplit_result_c(r, c.data()));
  spdsplit_verification v{};
  check(spdsplit_verify(matrix.get(), basis.get(), b.data(), c.data(), &v));
  bool pass = v.pass != 0;
  report["verification"] = verificationJson(v);
  if (group) {
    double g = 0.0;
    check(spdsplit_result_group_check(r, group.get(), &g));
    report["verification"]["group_fixed_check"] = g;
    pass = pass && g <= 1e-7;
  }
  if (demo && a.demo == "example3") {
    double z = 0.0;
    check(spdsplit_demo_structural_zero_residual(demo.get(), r, &z));
    report["verification"]["structural_zero_residual"] = z;
    pass = pass && z <= 1e-10;
  }
  const double verifyTime = clock.lap();

  if (!a.emitB.empty()) check(spdsplit_result_write_b(r, a.emitB.c_str()));
  if (!a.emitC.empty()) check(spdsplit_result_write_c(r, a.emitC.c_str()));
  report["timings"] = {{"load", loadTime}, {"solve", solveTime}, {"verify", verifyTime}, {"write", clock.lap()}};
  return pass ? 0 : kExitVerification;
}

// ------------------------------------------------------------------- verify

struct VerifyArgs {
  std::string matrix, basis, b, c, out, group;
  bool checkInverse = false;
};

int runVerify(const VerifyArgs& a, json& report) {
  Clock clock;
  spdsplit_matrix* m = nullptr;
  check(spdsplit_matrix_read(a.matrix.c_str(), &m));
  MatrixPtr matrix(m);
  spdsplit_basis* s = nullptr;
  check(spdsplit_basis_read(a.basis.c_str(), &s));
  BasisPtr basis(s);
  const std::int64_t n = spdsplit_matrix_dim(m);
  const std::vector<double> b = readDense(a.b, n), c = readDense(a.c, n);
  report["inputs"] = {{"matrix", inputDigest(a.matrix)}, {"basis", inputDigest(a.basis)},
                      {"b", inputDigest(a.b)},           {"c", inputDigest(a.c)}};
  const double loadTime = clock.lap();

  spdsplit_verification v{};
  check(spdsplit_verify(m, s, b.data(), c.data(), &v));
  report["verification"] = verificationJson(v);
  bool pass = v.pass != 0;
  if (a.checkInverse) {
    spdsplit_inverse_check ic{};
    check(spdsplit_check_inverse(m, s, b.data(), c.data(), &ic));
    report["verification"]["inverse"] = {{"identity_error", ic.identity_error},
                                         {"orthogonality", ic.orthogonality},
                                         {"resolve_error", ic.resolve_error},
                                         {"pass", ic.pass != 0}};
    pass = pass && ic.pass;
  }
  if (!a.group.empty()) {
    spdsplit_group* g = nullptr;
    check(spdsplit_group_read(a.group.c_str(), n, &g));
    GroupPtr group(g);
    double gc = 0.0;
    check(spdsplit_group_check(g, n, b.data(), c.data(), &gc));
    report["verification"]["group_fixed_check"] = gc;
    report["inputs"]["group"] = inputDigest(a.group);
    pass = pass && gc <= 1e-7;
  }
  report["timings"] = {{"load", loadTime}, {"verify", clock.lap()}};
  return pass ? 0 : kExitVerification;
}

// ------------------------------------------------------------ finance-sweep

struct SweepArgs {
  std::string spec, modes = "full,markov", schur = "on", out, report;
  int n = 100;
  double dt = 0.01, alpha = 5.0, hmin = 0.5, hmax = 0.975;
  int steps = 20, jobs = 1;
  bool selfCheck = false, warmStart = false;
};

std::vector<double> hurstGrid(double lo, double hi, int steps) {
  std::vector<double> g;
  if (steps <= 1) return {lo};
  for (int i = 0; i < steps; ++i) g.push_back(lo + (hi - lo) * i / (steps - 1));
  return g;
}

int runSweep(const SweepArgs& a, json& report, std::string& csvOut) {
  Clock clock;
  spdsplit_market market;
  spdsplit_market_defaults(&market);
  if (!a.spec.empty()) {
    std::ifstream in(a.spec, std::ios::binary);
    if (!in) throw Failure{kExitParse, "cannot open " + a.spec};
    std::stringstream ss;
    ss << in.rdbuf();
    check(spdsplit_market_parse_json(ss.str().c_str(), &market));
    report["inputs"] = {{"spec", inputDigest(a.spec)}};
  } else {
    market.n = a.n;
    market.dt = a.dt;
    market.alpha = a.alpha;
  }
  const std::vector<double> grid = hurstGrid(a.hmin, a.hmax, a.steps);
  market.hurst = grid.front();

  auto sweep = [&](bool schur, std::string& csv) {
    spdsplit_sweep_options o;
    spdsplit_sweep_defaults(&o);
    o.schur = schur;
    o.warm_start = a.warmStart;
    o.jobs = a.jobs;
    char* c = nullptr;
    char* rows = nullptr;
    check(spdsplit_finance_sweep(&market, grid.data(), grid.size(), a.modes.c_str(), &o, &c, &rows));
    csv = takeString(c);
    return json::parse(takeString(rows));
  };

  const bool schur = a.schur == "on";
  json rows = sweep(schur, csvOut);
  report["market"] = {{"N", market.n}, {"dt", market.dt}, {"alpha", market.alpha}};
  report["schur"] = schur;
  report["rows"] = rows;
  int code = 0;

  // every requested mode needs at least one successful row
  json okByMode = json::object();
  for (const auto& r : rows) okByMode[r["mode"].get<std::string>()] = okByMode.value(r["mode"].get<std::string>(), false) || r["ok"].get<bool>();
  for (const auto& [mode, ok] : okByMode.items()) {
    if (!ok.get<bool>()) code = kExitSolver;
  }
  report["timings"] = {{"sweep", clock.lap()}};

  if (a.selfCheck) {
    std::string other;
    const json alt = sweep(!schur, other);
    double worst = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k]["ok"].get<bool>() && alt[k]["ok"].get<bool>()) {
        worst = std::max(worst, std::abs(rows[k]["v_star"].get<double>() - alt[k]["v_star"].get<double>()));
      }
    }
    report["self_check"] = {{"max_abs_difference", worst}, {"tolerance", 1e-8}, {"pass", worst <= 1e-8}};
    report["timings"]["self_check"] = clock.lap();
    if (worst > 1e-8 && code == 0) code = kExitVerification;
  }
  return code;
}

// -------------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<std::string> suites;
  std::vector<std::int64_t> sizes{50, 100, 200};
  std::uint64_t seed = 1;
  std::string out;
};

int runBench(const BenchArgs& a, json& report) {
  json suites = json::array();
  bool pass = true;
  for (const auto& suite : a.suites) {
    json runs = json::array();
    std::vector<double> logN, logT;
    for (std::int64_t n : a.sizes) {
      spdsplit_demo* d = nullptr;
      check(spdsplit_demo_create(suite.c_str(), n, a.seed, &d));
      DemoPtr demo(d);
      spdsplit_matrix* m = nullptr;
      check(spdsplit_demo_matrix(d, &m));
      MatrixPtr matrix(m);
      spdsplit_basis* s = nullptr;
      check(spdsplit_demo_basis(d, 1, &s));
      BasisPtr basis(s);
      spdsplit_options* o = nullptr;
      check(spdsplit_options_create(&o));
      OptionsPtr opts(o);
      check(spdsplit_options_set_method(o, spdsplit_demo_method(d)));

      Clock clock;
      spdsplit_result* r = nullptr;
      check(spdsplit_decompose(m, s, o, &r));
      ResultPtr result(r);
      const double t = clock.lap();
      const int iters = spdsplit_result_iterations(r);
      json run{{"n", n},
               {"m", spdsplit_basis_size(s)},
               {"method", spdsplit_result_method(r)},
               {"structure", spdsplit_result_structure(r)},
               {"iterations", iters},
               {"final_grad_norm", spdsplit_result_grad_norm(r)},
               {"reconstruction_error", spdsplit_result_reconstruction_error(r)},
               {"seconds", t}};
      bool ok = iters <= 20 && spdsplit_result_grad_norm(r) <= 1e-8 && spdsplit_result_reconstruction_error(r) <= 1e-10;

      if (suite == "example3") {
        spdsplit_group* g = nullptr;
        check(spdsplit_demo_group(d, &g));
        GroupPtr group(g);
        double gc = 0.0, z = 0.0;
        check(spdsplit_result_group_check(r, g, &gc));
        check(spdsplit_demo_structural_zero_residual(d, r, &z));
        run["group_fixed_check"] = gc;
        run["structural_zero_residual"] = z;
        ok = ok && gc <= 1e-7 && z <= 1e-10;
      }
      if (suite == "example4") {
        check(spdsplit_options_set_structure(o, "dense"));
        spdsplit_result* rd = nullptr;
        check(spdsplit_decompose(m, s, o, &rd));
        ResultPtr dense(rd);
        run["dense_seconds"] = clock.lap();
        std::vector<double> x1(spdsplit_result_basis_size(r)), x2(x1.size());
        check(spdsplit_result_x(r, x1.data()));
        check(spdsplit_result_x(rd, x2.data()));
        double diff = 0.0;
        for (std::size_t k = 0; k < x1.size(); ++k) diff = std::max(diff, std::abs(x1[k] - x2[k]));
        run["dense_x_difference"] = diff;
        ok = ok && diff <= 1e-7;
      }
      run["pass"] = ok;
      pass = pass && ok;
      if (iters > 0 && t > 0) {
        logN.push_back(std::log(static_cast<double>(n)));
        logT.push_back(std::log(t / iters));
      }
      runs.push_back(std::move(run));
    }
    json entry{{"suite", suite}, {"runs", runs}};
    // least-squares slope of log(time per iteration) against log n
    if (logN.size() >= 2) {
      double mx = 0, my = 0;
      for (std::size_t k = 0; k < logN.size(); ++k) mx += logN[k], my += logT[k];
      mx /= logN.size();
      my /= logN.size();
      double sxy = 0, sxx = 0;
      for (std::size_t k = 0; k < logN.size(); ++k) sxy += (logN[k] - mx) * (logT[k] - my), sxx += (logN[k] - mx) * (logN[k] - mx);
      if (sxx > 0) entry["per_iteration_exponent"] = sxy / sxx;
    }
    suites.push_back(std::move(entry));
  }
  report["suites"] = suites;
  return pass ? 0 : kExitVerification;
}

std::vector<std::string> splitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decompose A = B^{-1} + C with C in a subspace S and B SPD orthogonal to S"};
  app.require_subcommand(1);

  DecomposeArgs da;
  auto* dec = app.add_subcommand("decompose", "solve one instance and write a JSON report");
  dec->add_option("--matrix", da.matrix, "A: dense text or Matrix Market");
  dec->add_option("--basis", da.basis, "S: JSON container or directory of .mtx files");
  dec->add_option("--method", da.method, "newton-cg | exact-newton | dual | auto")
      ->check(CLI::IsMember({"newton-cg", "exact-newton", "dual", "auto"}));
  dec->add_option("--structure", da.structure, "auto | dense | banded | toeplitz")
      ->check(CLI::IsMember({"auto", "dense", "banded", "toeplitz"}));
  dec->add_option("--group", da.group, "permutation list; the solve runs on the fixed subspace");
  dec->add_option("--tol", da.tol, "gradient tolerance");
  dec->add_option("--max-iter", da.maxIter, "Newton iteration limit");
  dec->add_option("--out", da.out, "report path (default stdout)");
  dec->add_option("--emit-b", da.emitB, "write B* in dense text format");
  dec->add_option("--emit-c", da.emitC, "write C* in dense text format");
  dec->add_option("--demo", da.demo, "generate example1..example4 instead of reading files")
      ->check(CLI::IsMember({"example1", "example2", "example3", "example4"}));
  dec->add_option("--n", da.n, "demo size");
  dec->add_option("--seed", da.seed, "demo seed");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "check a stored decomposition");
  ver->add_option("--matrix", va.matrix)->required();
  ver->add_option("--basis", va.basis)->required();
  ver->add_option("--b", va.b)->required();
  ver->add_option("--c", va.c)->required();
  ver->add_flag("--check-inverse", va.checkInverse, "also check the decomposition of A^{-1}");
  ver->add_option("--check-group", va.group, "permutation list that B and C must be fixed by");
  ver->add_option("--out", va.out, "report path (default stdout)");

  SweepArgs sa;
  auto* fin = app.add_subcommand("finance-sweep", "optimal investment value over a Hurst grid");
  fin->add_option("--N", sa.n, "trading steps");
  fin->add_option("--dt", sa.dt, "time step");
  fin->add_option("--alpha", sa.alpha, "fBm weight");
  fin->add_option("--spec", sa.spec, "market JSON (overrides --N/--dt/--alpha)");
  fin->add_option("--hurst-min", sa.hmin);
  fin->add_option("--hurst-max", sa.hmax);
  fin->add_option("--hurst-steps", sa.steps);
  fin->add_option("--modes", sa.modes, "comma list of full, markov");
  fin->add_option("--schur", sa.schur, "on | off")->check(CLI::IsMember({"on", "off"}));
  fin->add_flag("--self-check", sa.selfCheck, "rerun with the other path and compare to 1e-8");
  fin->add_flag("--warm-start", sa.warmStart);
  fin->add_option("--jobs", sa.jobs)->check(CLI::PositiveNumber);
  fin->add_option("--out", sa.out, "CSV path (default stdout)");
  fin->add_option("--report", sa.report, "JSON report path");

  BenchArgs ba;
  std::string suites = "example1,example2,example3,example4", sizes;
  auto* ben = app.add_subcommand("bench", "scenario runs at several sizes");
  ben->add_option("--suite", suites, "comma list of example1..example4");
  ben->add_option("--sizes", sizes, "comma list of n");
  ben->add_option("--seed", ba.seed);
  ben->add_option("--out", ba.out, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  json report{{"command", commandEcho(argc, argv)}, {"version", spdsplit_version()}};
  int code = 0;
  std::string reportPath;
  bool printReport = true;
  try {
    if (*dec) {
      reportPath = da.out;
      report["subcommand"] = "decompose";
      code = runDecompose(da, report);
    } else if (*ver) {
      reportPath = va.out;
      report["subcommand"] = "verify";
      code = runVerify(va, report);
    } else if (*fin) {
      report["subcommand"] = "finance-sweep";
      reportPath = sa.report;
      printReport = !sa.report.empty();
      std::string csv;
      code = runSweep(sa, report, csv);
      emit(csv, sa.out);
    } else if (*ben) {
      reportPath = ba.out;
      report["subcommand"] = "bench";
      ba.suites = splitList(suites);
      if (!sizes.empty()) {
        ba.sizes.clear();
        for (const auto& s : splitList(sizes)) ba.sizes.push_back(std::stoll(s));
      }
      code = runBench(ba, report);
    }
  } catch (const Failure& f) {
    std::cerr << "spdsplit: " << f.message << '\n';
    code = f.exitCode;
    report["error"] = f.message;
    printReport = printReport && !reportPath.empty();
  } catch (const std::exception& e) {
    std::cerr << "spdsplit: " << e.what() << '\n';
    code = kExitUsage;
    report["error"] = e.what();
    printReport = printReport && !reportPath.empty();
  }
  report["exit_status"] = code;
  if (printReport) {
    try {
      emit(report.dump(2) + "\n", reportPath);
    } catch (const Failure& f) {
      std::cerr << "spdsplit: " << f.message << '\n';
      if (code == 0) code = f.exitCode;
    }
  }
  return code;
}
