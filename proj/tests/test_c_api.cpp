// Exercises libspdsplit through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spdsplit/spdsplit.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

struct Canonical {
  spdsplit_matrix* a = nullptr;
  spdsplit_basis* s = nullptr;
  Canonical() {
    const double v[] = {2, 1, 1, 2};
    REQUIRE(spdsplit_matrix_from_dense(2, v, &a) == SPDSPLIT_OK);
    REQUIRE(spdsplit_basis_create(2, &s) == SPDSPLIT_OK);
    const int64_t r[] = {0}, c[] = {1};
    const double one[] = {1.0};
    REQUIRE(spdsplit_basis_add(s, 1, r, c, one) == SPDSPLIT_OK);
  }
  ~Canonical() {
    spdsplit_matrix_free(a);
    spdsplit_basis_free(s);
  }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  spdsplit_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("canonical instance through every method") {
  Canonical k;
  for (const char* method : {"newton-cg", "exact-newton", "dual", "auto"}) {
    spdsplit_options* o = nullptr;
    REQUIRE(spdsplit_options_create(&o) == SPDSPLIT_OK);
    REQUIRE(spdsplit_options_set_method(o, method) == SPDSPLIT_OK);
    spdsplit_result* r = nullptr;
    REQUIRE(spdsplit_decompose(k.a, k.s, o, &r) == SPDSPLIT_OK);
    double x = 0, b[4], c[4];
    REQUIRE(spdsplit_result_x(r, &x) == SPDSPLIT_OK);
    REQUIRE(spdsplit_result_b(r, b) == SPDSPLIT_OK);
    REQUIRE(spdsplit_result_c(r, c) == SPDSPLIT_OK);
    CHECK(x == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(b[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::abs(b[1]) < 1e-10);
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(spdsplit_result_phi(r) == doctest::Approx(-std::log(4.0)).epsilon(1e-12));
    CHECK(spdsplit_result_psi(r) == doctest::Approx(-std::log(4.0) - 2.0).epsilon(1e-12));
    CHECK(spdsplit_result_reconstruction_error(r) < 1e-12);
    CHECK(spdsplit_result_dim(r) == 2);
    CHECK(spdsplit_result_basis_size(r) == 1);

    spdsplit_verification v{};
    REQUIRE(spdsplit_verify(k.a, k.s, b, c, &v) == SPDSPLIT_OK);
    CHECK(v.pass == 1);
    spdsplit_inverse_check ic{};
    REQUIRE(spdsplit_check_inverse(k.a, k.s, b, c, &ic) == SPDSPLIT_OK);
    CHECK(ic.pass == 1);

    const std::string json = [&] {
      char* out = nullptr;
      REQUIRE(spdsplit_result_json(r, &out) == SPDSPLIT_OK);
      return take(out);
    }();
    CHECK(json.find("\"iterations\"") != std::string::npos);
    spdsplit_result_free(r);
    spdsplit_options_free(o);
  }
}

TEST_CASE("errors carry status and message") {
  Canonical k;
  spdsplit_options* o = nullptr;
  REQUIRE(spdsplit_options_create(&o) == SPDSPLIT_OK);
  CHECK(spdsplit_options_set_method(o, "simplex") == SPDSPLIT_INVALID_ARGUMENT);
  CHECK(std::strstr(spdsplit_last_error(), "simplex") != nullptr);
  CHECK(spdsplit_options_set_tolerance(o, -1.0) == SPDSPLIT_INVALID_ARGUMENT);
  spdsplit_options_free(o);

  const double notPd[] = {1, 2, 2, 1};
  spdsplit_matrix* bad = nullptr;
  REQUIRE(spdsplit_matrix_from_dense(2, notPd, &bad) == SPDSPLIT_OK);
  spdsplit_result* r = nullptr;
  CHECK(spdsplit_decompose(bad, k.s, nullptr, &r) == SPDSPLIT_INFEASIBLE);
  CHECK(r == nullptr);
  spdsplit_matrix_free(bad);

  const double asym[] = {2, 1, 0, 2};
  spdsplit_matrix* m = nullptr;
  CHECK(spdsplit_matrix_from_dense(2, asym, &m) == SPDSPLIT_INVALID_ARGUMENT);
  CHECK(spdsplit_decompose(nullptr, k.s, nullptr, &r) == SPDSPLIT_INVALID_ARGUMENT);

  // Identity in S.
  spdsplit_basis* eye = nullptr;
  REQUIRE(spdsplit_basis_create(2, &eye) == SPDSPLIT_OK);
  const int64_t idx[] = {0, 1};
  const double ones[] = {1, 1};
  REQUIRE(spdsplit_basis_add(eye, 2, idx, idx, ones) == SPDSPLIT_OK);
  CHECK(spdsplit_decompose(k.a, eye, nullptr, &r) == SPDSPLIT_INFEASIBLE);
  spdsplit_basis_free(eye);

  CHECK(std::string(spdsplit_status_name(SPDSPLIT_PARSE_ERROR)) == "parse error");
  CHECK(std::strlen(spdsplit_version()) > 0);
}

TEST_CASE("files and parse errors") {
  const auto dir = std::filesystem::temp_directory_path() / ("spdsplit_capi_" + std::to_string(std::rand()));
  std::filesystem::create_directories(dir);
  const std::string good = (dir / "a.txt").string(), broken = (dir / "b.txt").string();
  const double v[] = {2, 1, 1, 2};
  REQUIRE(spdsplit_write_dense(good.c_str(), 2, v) == SPDSPLIT_OK);
  int64_t n = 0;
  double* back = nullptr;
  REQUIRE(spdsplit_read_dense(good.c_str(), &n, &back) == SPDSPLIT_OK);
  CHECK(n == 2);
  CHECK(back[1] == 1.0);
  spdsplit_array_free(back);

  std::ofstream(broken) << "2\n2 1\n1 x\n";
  spdsplit_matrix* m = nullptr;
  CHECK(spdsplit_matrix_read(broken.c_str(), &m) == SPDSPLIT_PARSE_ERROR);
  CHECK(std::string(spdsplit_last_error()).find("b.txt:3:3:") != std::string::npos);

  spdsplit_basis* s = nullptr;
  CHECK(spdsplit_basis_parse_json("{\"n\": 2, \"matrices\": [[[0, 5, 1]]]}", &s) == SPDSPLIT_PARSE_ERROR);
  REQUIRE(spdsplit_basis_parse_json("{\"n\": 2, \"matrices\": [[[0, 1, 1]]]}", &s) == SPDSPLIT_OK);
  CHECK(spdsplit_basis_size(s) == 1);
  char* json = nullptr;
  REQUIRE(spdsplit_basis_json(s, &json) == SPDSPLIT_OK);
  spdsplit_basis* again = nullptr;
  CHECK(spdsplit_basis_parse_json(json, &again) == SPDSPLIT_OK);
  spdsplit_string_free(json);
  spdsplit_basis_free(again);
  spdsplit_basis_free(s);
  std::filesystem::remove_all(dir);
}

TEST_CASE("structured matrices") {
  const double col[] = {2.0, 0.5, 0.1, 0.0};
  spdsplit_matrix* t = nullptr;
  REQUIRE(spdsplit_matrix_from_toeplitz(4, col, &t) == SPDSPLIT_OK);
  spdsplit_basis* s = nullptr;
  REQUIRE(spdsplit_basis_create(4, &s) == SPDSPLIT_OK);
  const int64_t r[] = {0, 1, 2}, c[] = {1, 2, 3};
  const double v[] = {1, 1, 1};
  REQUIRE(spdsplit_basis_add(s, 3, r, c, v) == SPDSPLIT_OK);
  spdsplit_result* res = nullptr;
  REQUIRE(spdsplit_decompose(t, s, nullptr, &res) == SPDSPLIT_OK);
  CHECK(std::string(spdsplit_result_structure(res)) == "toeplitz");
  CHECK(spdsplit_result_reconstruction_error(res) < 1e-10);
  spdsplit_result_free(res);

  std::vector<double> dense(16, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) dense[static_cast<std::size_t>(i * 4 + j)] = col[std::abs(i - j)];
  spdsplit_matrix* b = nullptr;
  CHECK(spdsplit_matrix_from_dense_banded(4, dense.data(), 1, &b) == SPDSPLIT_INVALID_ARGUMENT);
  REQUIRE(spdsplit_matrix_from_dense_banded(4, dense.data(), 2, &b) == SPDSPLIT_OK);
  REQUIRE(spdsplit_decompose(b, s, nullptr, &res) == SPDSPLIT_OK);
  CHECK(std::string(spdsplit_result_structure(res)) == "banded");
  spdsplit_result_free(res);
  spdsplit_matrix_free(b);
  spdsplit_matrix_free(t);
  spdsplit_basis_free(s);
}

TEST_CASE("group demo through the C interface") {
  spdsplit_demo* d = nullptr;
  REQUIRE(spdsplit_demo_create("example3", 25, 1, &d) == SPDSPLIT_OK);
  spdsplit_matrix* a = nullptr;
  spdsplit_basis* s = nullptr;
  spdsplit_group* g = nullptr;
  REQUIRE(spdsplit_demo_matrix(d, &a) == SPDSPLIT_OK);
  REQUIRE(spdsplit_demo_basis(d, 1, &s) == SPDSPLIT_OK);
  REQUIRE(spdsplit_demo_group(d, &g) == SPDSPLIT_OK);
  REQUIRE(g != nullptr);
  CHECK(spdsplit_basis_size(s) == 13);
  spdsplit_options* o = nullptr;
  REQUIRE(spdsplit_options_create(&o) == SPDSPLIT_OK);
  REQUIRE(spdsplit_options_set_method(o, spdsplit_demo_method(d)) == SPDSPLIT_OK);
  spdsplit_result* r = nullptr;
  REQUIRE(spdsplit_decompose(a, s, o, &r) == SPDSPLIT_OK);
  double check = 1.0, zeros = 1.0;
  REQUIRE(spdsplit_result_group_check(r, g, &check) == SPDSPLIT_OK);
  REQUIRE(spdsplit_demo_structural_zero_residual(d, r, &zeros) == SPDSPLIT_OK);
  CHECK(check <= 1e-7);
  CHECK(zeros <= 1e-10);
  CHECK(spdsplit_demo_create("example9", 25, 1, &d) == SPDSPLIT_INVALID_ARGUMENT);
  spdsplit_result_free(r);
  spdsplit_options_free(o);
  spdsplit_group_free(g);
  spdsplit_basis_free(s);
  spdsplit_matrix_free(a);
  spdsplit_demo_free(d);
}

TEST_CASE("finance sweep") {
  spdsplit_market m;
  spdsplit_market_defaults(&m);
  m.n = 6;
  m.dt = 0.1;
  spdsplit_sweep_options o;
  spdsplit_sweep_defaults(&o);
  const double grid[] = {0.5, 0.75};
  char* csv = nullptr;
  char* rows = nullptr;
  REQUIRE(spdsplit_finance_sweep(&m, grid, 2, "full,markov", &o, &csv, &rows) == SPDSPLIT_OK);
  const std::string table = take(csv), json = take(rows);
  CHECK(table.rfind("hurst,mode,v_star", 0) == 0);
  CHECK(json.find("\"markov\"") != std::string::npos);
  CHECK(spdsplit_finance_sweep(&m, grid, 2, "full,weekly", &o, nullptr, nullptr) == SPDSPLIT_INVALID_ARGUMENT);

  spdsplit_market parsed;
  CHECK(spdsplit_market_parse_json("{\"N\": 4, \"mode\": \"markov\"}", &parsed) == SPDSPLIT_OK);
  CHECK(parsed.n == 4);
  CHECK(parsed.markovian == 1);
  CHECK(spdsplit_market_parse_json("{\"N\": ", &parsed) == SPDSPLIT_PARSE_ERROR);
}
