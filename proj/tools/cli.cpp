#include "cli.hpp"

#include <CLI11.hpp>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hisom/io.hpp"
#include "hisom/random.hpp"

namespace hisom {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitPrecondition = 2;

struct DomainArgs {
  std::string family;
  int p = 0, q = 0, m = 0, n = 0;

  DomainSpec spec() const {
    const Family f = parse_family(family);
    switch (f) {
      case Family::I: return make_spec(f, {p, q});
      case Family::II:
      case Family::III: return make_spec(f, {m});
      case Family::IV: return make_spec(f, {n});
      case Family::Polydisk: return make_spec(f, {p});
      default: return make_spec(f);
    }
  }
};

void add_domain_options(CLI::App* cmd, DomainArgs& d) {
  cmd->add_option("--family", d.family, "I, II, III, IV, V, VI or polydisk")->required();
  cmd->add_option("--p", d.p, "type I rows / polydisk factors");
  cmd->add_option("--q", d.q, "type I columns");
  cmd->add_option("--m", d.m, "type II/III size");
  cmd->add_option("--n", d.n, "type IV dimension");
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomically(path, text);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json invariants_json(const DomainSpec& s) {
  Json j = to_json(s);
  j["schema_version"] = kSchemaVersion;
  j["lambda0"] = lambda0_checked(s);
  if (auto c = lambda0_closed_form(s)) j["lambda0_closed_form"] = *c;
  j["null_dim_leq_p"] = classify_null_leq_p(s);
  if (s.rank == 2 && s.n_prime) j["rank2_codim_inequality"] = rank2_codim_inequality(s);
  try {
    SosCounts c = sos_counts(s);
    j["sos_counts"] = Json{{"m1", c.m1}, {"m2", c.m2}};
    j["max_signature_dimension"] = max_signature_dimension(s);
  } catch (const NotInCatalog&) {
    j["sos_counts"] = nullptr;
  }
  Json bounds = Json::array(), bundles = Json::array();
  for (int k = 1; k <= s.rank; ++k) {
    DimensionBound b = dim_upper_bound(s, k);
    bounds.push_back(Json{{"k", k}, {"bound", b.bound}, {"certified_le_p", b.certified_le_p}});
    CharBundleDims c = char_bundle_dims(s, k);
    bundles.push_back(Json{{"k", k}, {"fiber_dim", c.fiber_dim}, {"total_dim", c.total_dim}});
  }
  j["dimension_bounds"] = bounds;
  j["characteristic_bundles"] = bundles;
  return j;
}

std::string invariants_text(const Json& j) {
  std::ostringstream os;
  auto line = [&](const std::string& key, const Json& v) { os << std::left << std::setw(26) << key << v.dump() << "\n"; };
  for (const char* key : {"name", "N", "rank", "p", "null_dims", "N_prime", "n0", "tube", "lambda0", "null_dim_leq_p",
                          "rank2_codim_inequality", "sos_counts", "max_signature_dimension"})
    if (j.contains(key)) line(key, j.at(key));
  for (const auto& b : j.at("dimension_bounds"))
    os << "dim bound k=" << b.at("k") << std::setw(14) << " " << b.at("bound") << (b.at("certified_le_p").get<bool>() ? " (<= p)" : "") << "\n";
  return os.str();
}

int cmd_table1(int max_param, std::ostream& out, std::ostream& err) {
  std::ostringstream os;
  os << "family,p,q,m,closed_form,brute_force,agree\n";
  bool ok = true;
  auto row = [&](const DomainSpec& s, const std::string& pq) {
    const int brute = lambda0(s);
    const int closed = *lambda0_closed_form(s);
    ok = ok && brute == closed;
    os << family_name(s.family) << "," << pq << "," << closed << "," << brute << "," << (brute == closed ? "yes" : "no") << "\n";
  };
  for (int p = 3; p <= max_param; ++p)
    for (int q = p; q <= max_param; ++q)
      if (!(p == 3 && q == 3)) row(make_spec(Family::I, {p, q}), std::to_string(p) + "," + std::to_string(q) + ",");
  for (int m = 8; m <= max_param; ++m) row(make_spec(Family::II, {m}), ",," + std::to_string(m));
  for (int m = 3; m <= max_param; ++m) row(make_spec(Family::III, {m}), ",," + std::to_string(m));
  out << os.str();
  if (!ok) {
    err << "closed form and search disagree\n";
    return kExitFail;
  }
  return kExitPass;
}

template <class S>
int verify_jet(const Json& doc, int degree, double tol, std::uint64_t seed, const std::string& out_path, std::ostream& out) {
  IsometryJet<S> j = isometry_from_json<S>(doc);
  if (degree >= 0) {
    if (degree > j.degree()) throw PreconditionError("requested degree exceeds the jet's degree");
    j.f = j.f.truncated(degree);
  }
  ResidualReport r = check_functional_eq(j, tol, seed);
  Json report = to_json(r);
  report["mode"] = mode_name<S>();
  report["jacobian_defect"] = jacobian_defect(j);
  emit(out_path, dump(report), out);
  return r.pass ? kExitPass : kExitFail;
}

template <class S>
int construct_jet(const DomainSpec& spec, int dim, std::uint64_t seed, int degree, const std::string& out_path,
                  std::ostream& out) {
  if (dim < 1 || dim >= spec.N) throw PreconditionError("--dim must lie in [1, N - 1]");
  SignedSOS<S> sos = sos_for<S>(spec);
  if (spec.rank != 2) throw PreconditionError("construction needs a rank-2 target");
  if (!rank2_codim_inequality(spec)) throw PreconditionError(spec.name() + " violates 2N > N' + 1");
  Rng rng(seed);
  Matrix<S> u = random_coisometry<S>(spec.N - dim, spec.N, rng);
  IsometryJet<S> j = solve_component_jet(u, spec, degree);
  Json doc = to_json(j);
  doc["construction"] = Json{{"seed", seed}, {"u_matrix", to_json(u)}};
  emit(out_path, dump(doc), out);
  return kExitPass;
}

template <class S>
int extend_jet(const Json& doc, double tol, const std::string& out_path, std::ostream& out) {
  IsometryJet<S> j = isometry_from_json<S>(doc);
  Extension<S> e = extend_isometry(j, tol);
  Json result{{"schema_version", kSchemaVersion},
              {"mode", mode_name<S>()},
              {"outer", to_json(e.outer)},
              {"slice", to_json(e.slice)},
              {"composition_residual", e.composition_residual},
              {"slice_defect", e.slice_defect}};
  emit(out_path, dump(result), out);
  return kExitPass;
}

template <class S>
int kernel_command(const DomainSpec& spec, bool expand, const std::string& eval_path, const std::string& out_path,
                   std::ostream& out) {
  SignedSOS<S> sos = sos_for<S>(spec);
  Json result{{"schema_version", kSchemaVersion}, {"domain", spec.name()}};
  if (expand) result["expansion"] = to_json(sos);
  if (!eval_path.empty()) {
    Json points = read_json_file(eval_path);
    if (points.contains("points")) points = points.at("points");
    if (!points.is_array()) throw PreconditionError("schema error: points must be an array");
    Json values = Json::array();
    for (const auto& p : points) {
      std::vector<S> z;
      for (const auto& c : p) z.push_back(scalar_from_json<S>(c));
      values.push_back(scalar_to_json(h_eval<S>(sos, z)));
    }
    result["h_values"] = values;
  }
  emit(out_path, dump(result), out);
  return kExitPass;
}

template <class S>
int factor_command(const Json& inner_doc, const Json& outer_doc, double tol, const std::string& out_path,
                   std::ostream& out) {
  IsometryJet<S> f = isometry_from_json<S>(inner_doc);
  IsometryJet<S> outer = isometry_from_json<S>(outer_doc);
  Factorization<S> r = factor_through(outer, f, tol);
  Json result{{"schema_version", kSchemaVersion},
              {"mode", mode_name<S>()},
              {"slice", to_json(r.slice)},
              {"composition_residual", r.composition_residual},
              {"slice_defect", r.slice_defect},
              {"factorizes", r.factorizes}};
  emit(out_path, dump(result), out);
  return r.factorizes ? kExitPass : kExitFail;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Holomorphic isometries of complex unit balls into bounded symmetric domains"};
  app.require_subcommand(1);

  DomainArgs dom;
  std::string format = "json", in_path, out_path, outer_path, eval_path, mode = "exact";
  int degree = -1, dim = 0, max_param = 60;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  bool expand = false;

  auto* inv = app.add_subcommand("invariants", "catalog invariants of a domain");
  add_domain_options(inv, dom);
  inv->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
  inv->add_option("--out", out_path);

  auto* table = app.add_subcommand("table1", "closed-form vs searched lambda0 as CSV");
  table->add_option("--max", max_param, "largest parameter in the grid");
  table->add_option("--format", format)->check(CLI::IsMember({"csv"}));

  auto* verify = app.add_subcommand("verify", "check the functional equation of a jet");
  verify->add_option("--in", in_path)->required();
  verify->add_option("--degree", degree, "truncate to this degree first");
  verify->add_option("--tol", tol);
  verify->add_option("--seed", seed);
  verify->add_option("--out", out_path);

  auto* construct = app.add_subcommand("construct", "build an isometry jet from a random co-isometry");
  add_domain_options(construct, dom);
  construct->add_option("--dim", dim, "ball dimension")->required();
  construct->add_option("--seed", seed);
  construct->add_option("--degree", degree);
  construct->add_option("--mode", mode)->check(CLI::IsMember({"exact", "float"}));
  construct->add_option("--out", out_path);

  auto* extend = app.add_subcommand("extend", "factor a jet through a maximal-dimension isometry");
  extend->add_option("--in", in_path)->required();
  extend->add_option("--tol", tol);
  extend->add_option("--out", out_path);

  auto* kernel = app.add_subcommand("kernel", "signed sum-of-squares expansion and values of h");
  add_domain_options(kernel, dom);
  kernel->add_flag("--expand", expand);
  kernel->add_option("--eval", eval_path, "JSON file with {\"points\": [[{re, im}, ...], ...]}");
  kernel->add_option("--mode", mode)->check(CLI::IsMember({"exact", "float"}));
  kernel->add_option("--out", out_path);

  auto* factor = app.add_subcommand("experiment-factor", "try to write a jet as outer o (linear slice)");
  factor->add_option("--in", in_path)->required();
  factor->add_option("--outer", outer_path)->required();
  factor->add_option("--tol", tol);
  factor->add_option("--out", out_path);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitPrecondition;
  }

  try {
    const bool exact = mode == "exact";
    if (inv->parsed()) {
      Json j = invariants_json(dom.spec());
      emit(out_path, format == "text" ? invariants_text(j) : dump(j), out);
      return kExitPass;
    }
    if (table->parsed()) return cmd_table1(max_param, out, err);
    if (verify->parsed()) {
      Json doc = read_json_file(in_path);
      return json_is_exact(doc) ? verify_jet<Exact>(doc, degree, tol, seed, out_path, out)
                                : verify_jet<Complex>(doc, degree, tol, seed, out_path, out);
    }
    if (construct->parsed()) {
      const int d = degree < 0 ? 6 : degree;
      return exact ? construct_jet<Exact>(dom.spec(), dim, seed, d, out_path, out)
                   : construct_jet<Complex>(dom.spec(), dim, seed, d, out_path, out);
    }
    if (extend->parsed()) {
      Json doc = read_json_file(in_path);
      return json_is_exact(doc) ? extend_jet<Exact>(doc, tol, out_path, out) : extend_jet<Complex>(doc, tol, out_path, out);
    }
    if (kernel->parsed()) {
      return exact ? kernel_command<Exact>(dom.spec(), expand, eval_path, out_path, out)
                   : kernel_command<Complex>(dom.spec(), expand, eval_path, out_path, out);
    }
    if (factor->parsed()) {
      Json inner = read_json_file(in_path), outer = read_json_file(outer_path);
      return json_is_exact(inner) && json_is_exact(outer) ? factor_command<Exact>(inner, outer, tol, out_path, out)
                                                          : factor_command<Complex>(inner, outer, tol, out_path, out);
    }
  } catch (const PreconditionError& e) {
    err << "precondition: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const NotInCatalog& e) {
    err << "not in catalog: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const Json::exception& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const VerificationFailure& e) {
    err << "verification failed: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitPrecondition;
}

}  // namespace hisom
