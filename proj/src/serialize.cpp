#include "hlgt/serialize.hpp"

#include <string>

namespace hlgt {

json to_json(const Dyadic& d) { return d.to_string(); }

json to_json(const DyadicTree& t) {
  json pts = json::array();
  for (const auto& p : t.points()) pts.push_back(p.to_string());
  return {{"tree", t.to_string()}, {"points", pts}};
}

json to_json(const OrientedLattice& lat) {
  json edges = json::array();
  for (const auto& e : lat.edges)
    edges.push_back({{"lo", e.lo.to_string()}, {"hi", e.hi.to_string()}, {"orient", std::string(1, orient_char(e.orient))}});
  return {{"L", lat.L}, {"tree", lat.tree().to_string()}, {"edges", edges}};
}

json to_json(const ThompsonElement& f) {
  json bp = json::array();
  for (const auto& b : f.breakpoints()) bp.push_back(b.to_string());
  return {{"domain", f.domain().to_string()}, {"range", f.range().to_string()}, {"breakpoints", bp}};
}

json to_json(const Mat& m) {
  json re = json::array(), im = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (long j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return {{"re", re}, {"im", im}};
}

json operator_to_json(const GroupId& G, int edges, const Mat& m) {
  json j = to_json(m);
  j["group"] = G.to_string();
  j["edges"] = edges;
  j["basis"] = "lex";
  return j;
}

json to_json(const IrrepTable& t) {
  json arr = json::array();
  for (const auto& e : t.entries)
    arr.push_back({{"label", e.label}, {"name", e.name}, {"dim", e.dim}, {"casimir", e.casimir}});
  return arr;
}

namespace {

Dyadic parse_dyadic(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Dyadic::make(std::stoll(s), 0);
  return Dyadic::make(std::stoll(s.substr(0, slash)), Dyadic::make(std::stoll(s.substr(slash + 1)), 0).log2_exact());
}

}  // namespace

OrientedLattice lattice_from_json(const json& j) {
  try {
    OrientedLattice lat;
    lat.L = j.value("L", 1.0);
    for (const auto& e : j.at("edges")) {
      auto o = e.at("orient").get<std::string>();
      if (o != "L" && o != "R") throw ConfigError("edge orientation must be L or R");
      lat.edges.push_back({parse_dyadic(e.at("lo")), parse_dyadic(e.at("hi")), o == "L" ? Orient::Left : Orient::Right});
    }
    if (lat.edges.empty() || !DyadicTree::is_tree_partition(lat.points()))
      throw ConfigError("lattice edges do not form a dyadic tree partition");
    return lat;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed lattice record: ") + e.what());
  }
}

Mat matrix_from_json(const json& j) {
  try {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    long r = long(re.size()), c = r ? long(re[0].size()) : 0;
    if (long(im.size()) != r) throw ConfigError("matrix record has mismatched re/im shapes");
    Mat m(r, c);
    for (long i = 0; i < r; ++i) {
      if (long(re[i].size()) != c || long(im[i].size()) != c) throw ConfigError("matrix record rows are ragged");
      for (long k = 0; k < c; ++k) m(i, k) = cplx(re[i][k].get<double>(), im[i][k].get<double>());
    }
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed matrix record: ") + e.what());
  }
}

}  // namespace hlgt
