#pragma once

// JSON and CSV forms of the library's data. All JSON objects use insertion
// order so that identical inputs serialize to identical bytes.

#include "emc/chain_correlator.hpp"
#include "emc/ergodic_analyzer.hpp"
#include "emc/group_walks.hpp"

#include <json.hpp>

#include <string>

namespace emc {

using Json = nlohmann::ordered_json;

/// Sparse-triplet form {"n", "labels", "entries": [[i, j, value], ...]}.
Json to_json(const StochasticMatrix &p);

/// Sparse-triplet form with complex entries as [re, im].
Json complex_matrix_json(const CMatrix &m, const Alphabet &alphabet);

/// {"transient": [...], "classes": [{"indices", "period", "subclasses", "stationary"}]}.
Json to_json(const ChainDecomposition &d);

/// {"k", "labels", "entries": [[i-tuple, j-tuple, re, im], ...], "trace", "eigenvalues"}.
Json to_json(const DensityBlock &b, const SpectralDiagnostics &diag);

Json to_json(const ClusterVerdict &v);

/// Phases from a dense [[[re, im], ...], ...] array or {"seed": int}.
PhaseMatrix phases_from_json(const std::string &text, std::size_t n);

struct GroupWalkInput {
    GroupSpec group;
    GroupMeasure measure;
    WalkSide side = WalkSide::right;
};

/// {"kind", "params", "generators"?, "measure": [[word, weight], ...], "side"?}.
/// A missing measure means uniform on the generators.
GroupWalkInput group_from_json(const std::string &text);

/// "n,raw_re,raw_im,cesaro_re,cesaro_im" rows, n = 1..N.
std::string curve_csv(const CesaroCurve &c);

/// Diagonal (classical path) marginals of a block: "tuple,probability".
std::string marginals_csv(const DensityBlock &b);

/// Fixed-format rendering of a double for CSV output.
std::string format_double(double v);

} // namespace emc
