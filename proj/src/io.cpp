#include "hisom/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hisom/errors.hpp"

namespace hisom {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError("schema error: " + what);
}

std::string rational_field(const Json& j, const char* key) {
  if (!j.contains(key)) return "0";
  const Json& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  require(v.is_number_integer(), std::string(key) + " must be a rational string or an integer");
  return std::to_string(v.get<long long>());
}

}  // namespace

Json scalar_to_json(const Exact& x) {
  Json j{{"re", x.re().get_str()}, {"im", x.im().get_str()}};
  if (x.has_sqrt2_part()) {
    j["re_sqrt2"] = x.re_s2().get_str();
    j["im_sqrt2"] = x.im_s2().get_str();
  }
  return j;
}

Json scalar_to_json(const Complex& x) { return Json{{"re", x.real()}, {"im", x.imag()}}; }

template <>
Exact scalar_from_json<Exact>(const Json& j) {
  require(j.is_object(), "coefficient must be an object");
  return Exact::parse(rational_field(j, "re"), rational_field(j, "im"), rational_field(j, "re_sqrt2"),
                      rational_field(j, "im_sqrt2"));
}

template <>
Complex scalar_from_json<Complex>(const Json& j) {
  require(j.is_object(), "coefficient must be an object");
  auto part = [&](const char* key) -> double {
    if (!j.contains(key)) return 0.0;
    const Json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    require(v.is_string(), std::string(key) + " must be numeric");
    return Exact::parse(v.get<std::string>(), "0").to_complex().real();
  };
  const double s2 = std::sqrt(2.0);
  return {part("re") + s2 * part("re_sqrt2"), part("im") + s2 * part("im_sqrt2")};
}

template <class S>
Json to_json(const HoloPoly<S>& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) {
    Json t = scalar_to_json(c);
    t["exp"] = e;
    terms.push_back(t);
  }
  return Json{{"vars", p.num_vars()}, {"degree", p.degree()}, {"terms", terms}};
}

template <class S>
HoloPoly<S> holo_from_json(const Json& j) {
  require(j.is_object() && j.contains("vars") && j.contains("terms"), "polynomial needs vars and terms");
  const int vars = j.at("vars").get<int>();
  require(vars >= 1, "vars must be positive");
  HoloPoly<S> p(vars);
  for (const auto& t : j.at("terms")) {
    require(t.contains("exp"), "term needs exp");
    Exponent e = t.at("exp").get<Exponent>();
    require(static_cast<int>(e.size()) == vars, "exponent length differs from vars");
    p.add_term(e, scalar_from_json<S>(t));
  }
  return p;
}

template <class S>
Json to_json(const JetMap<S>& f) {
  Json comps = Json::array();
  for (const auto& c : f.components()) comps.push_back(to_json(c));
  return Json{{"schema_version", kSchemaVersion}, {"vars", f.source_dim()}, {"degree", f.degree()}, {"components", comps}};
}

template <class S>
JetMap<S> jet_from_json(const Json& j) {
  require(j.contains("vars") || j.contains("n"), "jet needs vars");
  const int vars = j.contains("vars") ? j.at("vars").get<int>() : j.at("n").get<int>();
  require(j.contains("degree") && j.contains("components"), "jet needs degree and components");
  std::vector<HoloPoly<S>> comps;
  for (const auto& c : j.at("components")) {
    HoloPoly<S> p = holo_from_json<S>(c);
    require(p.num_vars() == vars, "component variable count differs from jet");
    comps.push_back(std::move(p));
  }
  return JetMap<S>(vars, j.at("degree").get<int>(), std::move(comps));
}

template <class S>
Json to_json(const Matrix<S>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(scalar_to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

template <class S>
Matrix<S> matrix_from_json(const Json& j) {
  require(j.is_array(), "matrix must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j.at(0).size() : 0;
  Matrix<S> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    require(j.at(i).is_array() && j.at(i).size() == cols, "matrix rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = scalar_from_json<S>(j.at(i).at(k));
  }
  return m;
}

Json to_json(const DomainSpec& s) {
  Json j{{"family", family_name(s.family)},
         {"params", s.params},
         {"name", s.name()},
         {"N", s.N},
         {"rank", s.rank},
         {"p", s.p_inv},
         {"null_dims", s.null_dims},
         {"tube", s.tube}};
  if (s.n_prime) {
    j["N_prime"] = *s.n_prime;
    j["N_prime_external"] = s.n_prime_external;
    j["n0"] = *s.n0();
  } else {
    j["N_prime"] = nullptr;
  }
  return j;
}

DomainSpec spec_from_json(const Json& j) {
  require(j.contains("family"), "missing family");
  std::vector<int> params;
  if (j.contains("params")) params = j.at("params").get<std::vector<int>>();
  return make_spec(parse_family(j.at("family").get<std::string>()), params);
}

template <class S>
Json to_json(const SignedSOS<S>& sos) {
  Json g1 = Json::array(), g2 = Json::array();
  for (const auto& g : sos.g1) g1.push_back(to_json(g));
  for (const auto& g : sos.g2) g2.push_back(to_json(g));
  return Json{{"schema_version", kSchemaVersion}, {"N", sos.num_vars}, {"m1", sos.m1()}, {"m2", sos.m2()},
              {"mode", mode_name<S>()},         {"g1", g1},          {"g2", g2}};
}

template <class S>
Json to_json(const IsometryJet<S>& j) {
  Json comps = Json::array();
  for (const auto& c : j.f.components()) comps.push_back(to_json(c));
  return Json{{"schema_version", kSchemaVersion},
              {"mode", mode_name<S>()},
              {"n", j.n()},
              {"k", j.k},
              {"family", family_name(j.target.family)},
              {"params", j.target.params},
              {"degree", j.degree()},
              {"components", comps}};
}

template <class S>
IsometryJet<S> isometry_from_json(const Json& j) {
  require(j.is_object(), "isometry jet must be an object");
  require(j.contains("k") && j.contains("family") && j.contains("n"), "isometry jet needs n, k, family");
  if (j.contains("schema_version")) require(j.at("schema_version").get<int>() == kSchemaVersion, "unsupported schema_version");
  DomainSpec spec = spec_from_json(j);
  return make_isometry_jet(spec, j.at("k").get<int>(), jet_from_json<S>(j));
}

bool json_is_exact(const Json& j) {
  if (j.contains("mode")) return j.at("mode").get<std::string>() == "exact";
  if (j.contains("components"))
    for (const auto& c : j.at("components"))
      for (const auto& t : c.at("terms"))
        if (t.contains("re")) return t.at("re").is_string();
  return true;
}

Json to_json(const ResidualReport& r) {
  Json per = Json::array();
  for (const auto& [bideg, value] : r.per_bidegree)
    per.push_back(Json{{"hol", bideg.first}, {"anti", bideg.second}, {"residual", value}});
  return Json{{"schema_version", kSchemaVersion}, {"check", r.check},       {"max_residual", r.max_residual},
              {"exact_zero", r.exact_zero},        {"per_bidegree", per},    {"pointwise_max", r.pointwise_max},
              {"pass", r.pass}};
}

template <class S>
Json to_json(const VarietySystem<S>& v) {
  return Json{{"schema_version", kSchemaVersion},
              {"kind", v.kind == VarietyKind::W ? "W" : "V"},
              {"ambient_dim", v.ambient_dim},
              {"matrices", Json{{"lhs", to_json(v.lhs)}, {"projective", to_json(v.projective_equations())}}},
              {"slots", Json{{"lhs", v.lhs_slots}, {"rhs", v.rhs_slots}}},
              {"padding", Json{{"in", v.pad_in()}, {"out", v.pad_out()}}}};
}

void write_file_atomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << contents;
    if (!out.flush()) throw std::runtime_error("write to " + tmp + " failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw PreconditionError("malformed JSON in " + path + ": " + e.what());
  }
}

#define HISOM_INSTANTIATE(S)                                        \
  template Json to_json(const HoloPoly<S>&);                        \
  template HoloPoly<S> holo_from_json<S>(const Json&);              \
  template Json to_json(const JetMap<S>&);                          \
  template JetMap<S> jet_from_json<S>(const Json&);                 \
  template Json to_json(const Matrix<S>&);                          \
  template Matrix<S> matrix_from_json<S>(const Json&);              \
  template Json to_json(const SignedSOS<S>&);                       \
  template Json to_json(const IsometryJet<S>&);                     \
  template IsometryJet<S> isometry_from_json<S>(const Json&);       \
  template Json to_json(const VarietySystem<S>&);

HISOM_INSTANTIATE(Exact)
HISOM_INSTANTIATE(Complex)

}  // namespace hisom
