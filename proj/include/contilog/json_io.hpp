#pragma once

#include "contilog/axioms.hpp"
#include "contilog/ultra.hpp"

#include <json.hpp>

namespace contilog {

using json = nlohmann::ordered_json;

Rat rat_from_json(const json& j);
json rat_to_json(const Rat& q); // string "p/q" or integer

Modulus modulus_from_json(const json& j);
json modulus_to_json(const Modulus& m);

Signature signature_from_json(const json& j);

/// Structure files: either a generator object carrying "kind"
/// (sym_hamming, gn, hilbert, tree, graph, cayley, cyclic, discrete,
/// zm_rotation, group_action) or an explicit structure with
/// sorts/functions/predicates/actions sections.
MetricStructure structure_from_json(const json& j);

Scheme scheme_from_json(const json& j);

StructureSequence sequence_from_json(const json& j);

json scalar_to_json(const Scalar& s);
json bounds_to_json(const ValueBounds& b);

/// %.17g rendering used for the human-readable value fields of reports.
std::string fmt17(double x);

/// FNV-1a 64 digest of the canonical dump, as fixed-width hex.
std::string digest(const std::string& payload);

json load_json_file(const std::string& path);

} // namespace contilog
