#pragma once

#include <json.hpp>

#include <optional>

#include "dioph/counting.hpp"
#include "dioph/matroid.hpp"
#include "dioph/regularity.hpp"
#include "dioph/structure.hpp"

namespace dioph {

using Json = nlohmann::ordered_json;

// Numbers that may exceed machine words travel as decimal strings; rationals
// as ["num", "den"] pairs (bare "n" accepted on input). Indices are 1-based
// on the wire.

Json int_to_json(const Int& v);
Int int_from_json(const Json& j);
Json rat_to_json(const Rat& v);
Rat rat_from_json(const Json& j);

/// {"rows": r, "cols": c, "entries": [["num","den"], ...]} in row-major order.
Json matrix_to_json(const QMatrix& m);
QMatrix matrix_from_json(const Json& j);

Json transform_to_json(const Transform& t);
Transform transform_from_json(const Json& j);

Json columns_certificate_to_json(const ColumnsCertificate& cert);
ColumnsCertificate columns_certificate_from_json(const Json& j);

Json normal_form_to_json(const NormalForm& nf);
Json decomposition_to_json(const DecompositionResult& res);
Json preprocessed_to_json(const PreprocessedSystem& p);

Json mu_profile_to_json(const MuProfile& p);
Json q_profile_to_json(const QProfile& p);
Json condition_i_to_json(const ConditionIReport& rep);
Json partition_to_json(std::size_t k, const std::optional<PartitionCertificate>& cert);
Json quasi_to_json(std::size_t q, const QuasiReport& rep);

Json system_to_json(const DiagonalSystem& sys);
DiagonalSystem system_from_json(const Json& j);
Json counts_to_json(const DiagonalSystem& sys, const SolutionCount& c);

/// Colorings as run-length strings: "2x1,3x2" = colors 1 1 2 2 2.
std::string coloring_to_rle(const Coloring& c);
Json coloring_to_json(const Coloring& c);

Json bohr_spec_to_json(const BohrSpec& spec);
BohrSpec bohr_spec_from_json(const Json& j);

Json wparams_to_json(const WTrickParams& p);
Json transfer_report_to_json(const TransferReport& rep);
Json density_stats_to_json(const DensityStats& stats);
Json syndeticity_to_json(const SyndeticityReport& rep, const SyndeticDensityReport& density);

/// Set descriptors: {"kind":"multiples","m":3} | {"kind":"explicit",
/// "members":[...]} | {"kind":"random-syndetic","window":4,"seed":7}.
IntegerSet integer_set_from_json(const Json& j, long limit);

Json weights_to_json(const Weights& w);
Weights weights_from_json(const Json& j);

}  // namespace dioph
