#include "doctest.h"
#include "helpers.hpp"

#include "spdsplit/demos.hpp"
#include "spdsplit/errors.hpp"
#include "spdsplit/io.hpp"
#include "spdsplit/properties.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

using namespace spdsplit;

namespace {

std::string parseMessage(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    return e.what();
  }
  FAIL("no parse error");
  return {};
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("spdsplit_io_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("dense text round trip") {
  std::mt19937_64 rng(3);
  const Matrix a = testutil::randomSpd(rng, 7);
  std::ostringstream out;
  writeDenseText(out, a);
  std::istringstream in(out.str());
  CHECK(parseDenseText(in) == a);

  std::istringstream commented("# two by two\n2\n2 1\n\n1 2\n");
  const Matrix m = parseDenseText(commented);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 1) == 2.0);
}

TEST_CASE("dense text diagnostics carry line and column") {
  const std::string bad = parseMessage([] {
    std::istringstream in("2\n2 1\n1 x2\n");
    parseDenseText(in, "a.txt");
  });
  CHECK(bad.find("a.txt:3:3:") == 0);

  const std::string shortRow = parseMessage([] {
    std::istringstream in("3\n1 0 0\n0 1\n0 0 1\n");
    parseDenseText(in, "b.txt");
  });
  CHECK(shortRow.find("b.txt:3:") == 0);

  const std::string missing = parseMessage([] {
    std::istringstream in("2\n1 0\n");
    parseDenseText(in, "c.txt");
  });
  CHECK(missing.find("c.txt:3:1:") == 0);
}

TEST_CASE("matrix market input") {
  std::istringstream coord(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 4\n1 1 2.0\n2 1 -1\n2 2 2\n3 3 1.5\n");
  const Matrix m = parseMatrixMarket(coord);
  CHECK(m(0, 1) == -1.0);
  CHECK(m(1, 0) == -1.0);
  CHECK(m(2, 2) == 1.5);
  CHECK(m(0, 2) == 0.0);

  std::istringstream arr("%%MatrixMarket matrix array real general\n2 2\n1\n3\n3\n4\n");
  const Matrix g = parseMatrixMarket(arr);
  CHECK(g(1, 0) == 3.0);
  CHECK(g(1, 1) == 4.0);

  const std::string bad = parseMessage([] {
    std::istringstream in("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
    parseMatrixMarket(in, "m.mtx");
  });
  CHECK(bad.find("m.mtx:3:1:") == 0);
}

TEST_CASE("basis json and files") {
  const SubspaceBasis s = parseBasisJson(R"({"n": 3, "matrices": [[[0, 1, 1.0]], [[2, 0, 0.5], [1, 2, -1]]]})");
  REQUIRE(s.size() == 2);
  CHECK(s[1].toDense()(0, 2) == 0.5);
  CHECK(s[1].toDense()(2, 1) == -1.0);
  const SubspaceBasis back = parseBasisJson(basisJson(s));
  CHECK(back[0] == s[0]);
  CHECK(back[1] == s[1]);

  const std::string syntax = parseMessage([] { parseBasisJson("{\"n\": 2,\n \"matrices\": [[[0, 1, ]]]}", "s.json"); });
  CHECK(syntax.find("s.json:2:") == 0);
  const std::string range = parseMessage([] { parseBasisJson(R"({"n": 2, "matrices": [[[0, 2, 1]]]})", "r.json"); });
  CHECK(range.find("matrices[0][0]") != std::string::npos);

  TempDir dir;
  const Matrix a = Matrix::Identity(3, 3) * 2.0;
  writeMatrix(dir.path / "a.txt", a);
  CHECK(readSymmetricMatrix(dir.path / "a.txt") == a);
  std::filesystem::create_directories(dir.path / "basis");
  std::ofstream(dir.path / "basis" / "d1.mtx") << "%%MatrixMarket matrix coordinate real symmetric\n3 3 1\n2 1 1\n";
  std::ofstream(dir.path / "basis" / "d2.mtx") << "%%MatrixMarket matrix coordinate real symmetric\n3 3 1\n3 2 1\n";
  const SubspaceBasis fromDir = readBasis(dir.path / "basis");
  CHECK(fromDir.size() == 2);
  CHECK(fromDir[1].toDense()(1, 2) == 1.0);
  CHECK_THROWS_AS(readMatrix(dir.path / "missing.txt"), Error);
}

TEST_CASE("group and market spec parsing") {
  std::istringstream g("# swap\n1 0 2\n0 2 1\n");
  const GroupAction action = parseGroup(g, 3);
  CHECK(action.size() == 2);
  const std::string bad = parseMessage([] {
    std::istringstream in("0 0 1\n");
    parseGroup(in, 3, "g.txt");
  });
  CHECK(bad.find("g.txt:1:3:") == 0);

  const MarketSpec spec = parseMarketSpec(R"({"N": 12, "dt": 0.1, "alpha": 5, "hurst": 0.7, "mode": "markov"})");
  CHECK(spec.N == 12);
  CHECK(spec.deltaT == 0.1);
  CHECK(spec.mode == InfoMode::Markovian);
  const std::string mode = parseMessage([] { parseMarketSpec(R"({"mode": "green"})"); });
  CHECK(mode.find("mode") != std::string::npos);
}

TEST_CASE("demo generators") {
  const DemoInstance one = makeDemo(DemoKind::SmallSpan, 30, 7);
  CHECK(one.basis.size() == 5);
  CHECK(one.basis.allZeroDiagonal());
  const DemoInstance again = makeDemo(DemoKind::SmallSpan, 30, 7);
  CHECK(one.a.toDense() == again.a.toDense());

  const DemoInstance two = makeDemo(DemoKind::Dual, 20, 1);
  CHECK(two.basis.complementDim() == 39);
  CHECK(two.method == Method::Dual);

  const DemoInstance three = makeDemo(DemoKind::GroupInvariant, 25, 1);
  CHECK(three.solveBasis.size() == 13);
  CHECK(three.activePairs.size() == 13);
  CHECK_THROWS_AS(makeDemo(DemoKind::GroupInvariant, 24, 1), Error);

  const DemoInstance four = makeDemo(DemoKind::Banded, 40, 1);
  CHECK(four.basis.size() == 2 * 40 - 3);
  CHECK(four.a.structure() == Structure::Banded);

  CHECK(parseDemo("example3") == DemoKind::GroupInvariant);
  CHECK(!parseDemo("example5"));
}

TEST_CASE("group demo solves with structural zeros") {
  const DemoInstance d = makeDemo(DemoKind::GroupInvariant, 25, 1);
  SolverOptions o;
  o.method = d.method;
  const DecompositionResult r = decompose(d.a, d.solveBasis, o);
  CHECK(r.iterations <= 20);
  CHECK(groupFixedCheck(r, *d.group) <= 1e-7);
  for (const auto& [p, q] : d.activePairs)
    for (Index i = 0; i < d.blockSize; ++i)
      for (Index j = 0; j < d.blockSize; ++j) {
        const Index row = p * d.blockSize + i, col = q * d.blockSize + j;
        if (row != col) CHECK(std::abs(r.bStar(row, col)) <= 1e-10);
      }
}
