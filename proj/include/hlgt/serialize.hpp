#pragma once

#include <json.hpp>

#include "hlgt/dyadic.hpp"
#include "hlgt/field_algebra.hpp"
#include "hlgt/group.hpp"

namespace hlgt {

using json = nlohmann::json;

json to_json(const Dyadic& d);
json to_json(const DyadicTree& t);
json to_json(const OrientedLattice& lat);
json to_json(const ThompsonElement& f);
// {"re": [[..]], "im": [[..]]}
json to_json(const Mat& m);
// Adds group, edges and basis "lex" to the matrix record.
json operator_to_json(const GroupId& G, int edges, const Mat& m);
json to_json(const IrrepTable& t);

OrientedLattice lattice_from_json(const json& j);
Mat matrix_from_json(const json& j);

}  // namespace hlgt
