#pragma once

#include <json.hpp>
#include <string>

#include "hisom/domains.hpp"
#include "hisom/isometry.hpp"

namespace hisom {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Exact coefficients are {"re": "a/b", "im": "c/d"} plus "re_sqrt2"/"im_sqrt2"
// when the sqrt2 part is nonzero; float coefficients hold plain numbers under
// the same keys.
Json scalar_to_json(const Exact& x);
Json scalar_to_json(const Complex& x);
template <class S>
S scalar_from_json(const Json& j);
template <>
Exact scalar_from_json<Exact>(const Json& j);
template <>
Complex scalar_from_json<Complex>(const Json& j);

template <class S>
Json to_json(const HoloPoly<S>& p);
template <class S>
HoloPoly<S> holo_from_json(const Json& j);

template <class S>
Json to_json(const JetMap<S>& f);
template <class S>
JetMap<S> jet_from_json(const Json& j);

template <class S>
Json to_json(const Matrix<S>& m);
template <class S>
Matrix<S> matrix_from_json(const Json& j);

Json to_json(const DomainSpec& spec);
// {"family": "I", "params": [2, 3]}
DomainSpec spec_from_json(const Json& j);

template <class S>
Json to_json(const SignedSOS<S>& sos);

template <class S>
Json to_json(const IsometryJet<S>& j);
template <class S>
IsometryJet<S> isometry_from_json(const Json& j);
// True when the document stores exact coefficients.
bool json_is_exact(const Json& j);

Json to_json(const ResidualReport& r);

template <class S>
Json to_json(const VarietySystem<S>& v);

// Writes to path + ".tmp" and renames over path.
void write_file_atomically(const std::string& path, const std::string& contents);
Json read_json_file(const std::string& path);

}  // namespace hisom
