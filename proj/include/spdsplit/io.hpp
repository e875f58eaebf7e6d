#pragma once

#include "spdsplit/finance.hpp"
#include "spdsplit/subspace.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace spdsplit {

// Parse failures throw Error(ParseError) with a "source:line:column: message"
// text; unreadable files throw Error(IoError).

/// Dense text: first line n, then n rows of n numbers.
Matrix parseDenseText(std::istream& in, const std::string& source = "<input>");
/// Matrix Market, coordinate or array, real or integer, general or symmetric.
Matrix parseMatrixMarket(std::istream& in, const std::string& source = "<input>");
/// Dispatches on a leading "%%MatrixMarket" banner.
Matrix readMatrix(const std::filesystem::path& path);
/// Symmetrizes (checks |A - A^T| <= 1e-12 max|A|) and tags nothing: dense storage.
Matrix readSymmetricMatrix(const std::filesystem::path& path);

void writeDenseText(std::ostream& out, const Matrix& m);
void writeMatrix(const std::filesystem::path& path, const Matrix& m);

/// {"n": int, "matrices": [[[i, j, value], ...], ...]}, 0-based; each triple
/// sets both (i, j) and (j, i).
SubspaceBasis parseBasisJson(const std::string& text, const std::string& source = "<input>");
std::string basisJson(const SubspaceBasis& s);
/// A JSON container file, or a directory whose *.mtx files (sorted by name)
/// are the elements.
SubspaceBasis readBasis(const std::filesystem::path& path);

/// One permutation per line, n entries each (0-based images); '#' starts a comment.
GroupAction parseGroup(std::istream& in, Index n, const std::string& source = "<input>");
GroupAction readGroup(const std::filesystem::path& path, Index n);

/// {"N": int, "dt": real, "alpha": real, "hurst": real, "mode": "full"|"markov"}; missing keys keep defaults.
MarketSpec parseMarketSpec(const std::string& text, const std::string& source = "<input>");

}  // namespace spdsplit
