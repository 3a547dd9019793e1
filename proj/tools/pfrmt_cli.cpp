// pfrmt command-line driver.
//
// Translates flags into "pfaffian-rmt/1" JSON requests, evaluates them
// through the shared library's C API (pfrmt.h), and writes the JSON
// response — or its CSV projection for the tabular commands (micro --grid
// and converge; CSV columns are documented in README.md).
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure.  A
// verify report whose residuals exceed the pinned tolerances exits 2.
// The structured result/error document goes to stdout (or --out); human
// diagnostics go to stderr.

#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include "pfrmt.h"

namespace {

using njson = nlohmann::json;

constexpr const char* kSchema = "pfaffian-rmt/1";

// Local (pre-engine) validation failure: same reporting contract as an
// engine validation error.
struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------- parsing ----

std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

double stod_full(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size())
      throw CliError(what + ": trailing characters in number \"" + s + "\"");
    return v;
  } catch (const CliError&) {
    throw;
  } catch (const std::exception&) {
    throw CliError(what + ": cannot parse number \"" + s + "\"");
  }
}

long stol_full(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size())
      throw CliError(what + ": trailing characters in integer \"" + s + "\"");
    return v;
  } catch (const CliError&) {
    throw;
  } catch (const std::exception&) {
    throw CliError(what + ": cannot parse integer \"" + s + "\"");
  }
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// Complex literal grammar (documented in README.md): "re", "imi", or
// "re+imi" / "re-imi", where re and im are C doubles ("0.9", "0.35+0.45i",
// "1.3i", "-i", "1e-2+3e-4i"). Spaces are ignored.
std::complex<double> parse_complex(const std::string& raw, const std::string& what) {
  std::string s = strip_spaces(raw);
  if (s.empty()) throw CliError(what + ": empty entry");
  if (s.back() != 'i' && s.back() != 'I') return {stod_full(s, what), 0.0};
  s.pop_back();
  // Split at the sign of the imaginary part: the last '+'/'-' that is
  // neither leading nor an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t p = s.size(); p-- > 1;) {
    if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  if (split == std::string::npos) {
    if (s.empty() || s == "+") return {0.0, 1.0};
    if (s == "-") return {0.0, -1.0};
    return {0.0, stod_full(s, what)};
  }
  const std::string re_s = s.substr(0, split);
  const std::string im_s = s.substr(split);
  double im = 0.0;
  if (im_s == "+")
    im = 1.0;
  else if (im_s == "-")
    im = -1.0;
  else
    im = stod_full(im_s, what);
  return {stod_full(re_s, what), im};
}

njson complex_json(const std::complex<double>& z) {
  return njson{{"re", z.real()}, {"im", z.imag()}};
}

njson complex_list_json(const std::string& csv, const std::string& what) {
  njson out = njson::array();
  if (strip_spaces(csv).empty()) return out;
  for (const std::string& tok : split_on(csv, ','))
    out.push_back(complex_json(parse_complex(tok, what)));
  return out;
}

std::vector<double> real_list(const std::string& csv, const std::string& what) {
  std::vector<double> out;
  if (strip_spaces(csv).empty()) return out;
  for (const std::string& tok : split_on(csv, ','))
    out.push_back(stod_full(strip_spaces(tok), what));
  return out;
}

std::vector<long> int_list(const std::string& csv, const std::string& what) {
  std::vector<long> out;
  if (strip_spaces(csv).empty()) return out;
  for (const std::string& tok : split_on(csv, ','))
    out.push_back(stol_full(strip_spaces(tok), what));
  return out;
}

// "l11,l21" -> {"l11": .., "l21": ..}
njson split_json(const std::string& s) {
  const std::vector<long> v = int_list(s, "--split");
  if (v.size() != 2) throw CliError("--split: expected \"l11,l21\"");
  return njson{{"l11", v[0]}, {"l21", v[1]}};
}

// "k1,k2" flavor counts.
std::vector<long> counts_from(const std::string& s, const std::string& what) {
  const std::vector<long> v = int_list(s, what);
  if (v.size() != 2) throw CliError(what + ": expected two counts \"k1,k2\"");
  return v;
}

// "start:stop:count"
njson grid_json(const std::string& s) {
  const std::vector<std::string> parts = split_on(strip_spaces(s), ':');
  if (parts.size() != 3) throw CliError("--grid: expected \"start:stop:count\"");
  return njson{{"start", stod_full(parts[0], "--grid start")},
               {"stop", stod_full(parts[1], "--grid stop")},
               {"count", stol_full(parts[2], "--grid count")}};
}

// ------------------------------------------------------------ output ----

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& doc, const std::string& out_path) {
  const char* tail = (!doc.empty() && doc.back() == '\n') ? "" : "\n";
  if (out_path.empty()) {
    std::fputs(doc.c_str(), stdout);
    std::fputs(tail, stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) throw CliError("--out: cannot open \"" + out_path + "\" for writing");
  f << doc << tail;
  if (!f) throw CliError("--out: write to \"" + out_path + "\" failed");
}

void emit_error(const std::string& type, const std::string& message,
                const std::string& out_path) {
  njson doc{{"schema", kSchema}, {"error", {{"type", type}, {"message", message}}}};
  try {
    emit(doc.dump(2), out_path);
  } catch (const CliError&) {
    std::fputs(doc.dump(2).c_str(), stdout); // fall back to stdout
    std::fputc('\n', stdout);
  }
  std::fprintf(stderr, "pfrmt: %s error: %s\n", type.c_str(), message.c_str());
}

void csv_cell(std::string& line, const njson& v) {
  if (!line.empty()) line.push_back(',');
  line += fmt_g(v.get<double>());
}

// CSV projections of the two tabular responses (columns in README.md).
std::string to_csv(const njson& response) {
  const std::string cmd = response.at("command").get<std::string>();
  std::ostringstream out;
  if (cmd == "micro") {
    if (!response.at("result").contains("rows"))
      throw CliError("--format csv: micro requires --grid (tabulation mode)");
    out << "x,i1_re,i1_im,i2_re,i2_im,i3_re,i3_im,z_det_re,z_det_im,z_pf_re,z_pf_im\n";
    for (const njson& r : response.at("result").at("rows")) {
      std::string line;
      csv_cell(line, r.at("x"));
      for (const char* key : {"i1", "i2", "i3", "z_det", "z_pf"}) {
        csv_cell(line, r.at(key).at("re"));
        csv_cell(line, r.at(key).at("im"));
      }
      out << line << '\n';
    }
    return out.str();
  }
  if (cmd == "converge") {
    out << "n,x,deviation_p,deviation_phat\n";
    for (const njson& r : response.at("result").at("table")) {
      std::string line;
      line += std::to_string(r.at("n").get<long>());
      csv_cell(line, r.at("x"));
      csv_cell(line, r.at("dev_p"));
      csv_cell(line, r.at("dev_phat"));
      out << line << '\n';
    }
    return out.str();
  }
  throw CliError("--format csv: only micro --grid and converge produce tables");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Pfaffian/determinant factorization engine for chiral and generic "
      "unitary random-matrix partition functions"};
  app.set_version_flag("--version", std::string(pfrmt_version()));
  app.require_subcommand(0, 1);

  // Global options (valid before or after the subcommand name).
  std::string out_path, format, request_path;
  int threads = 0;
  app.add_option("--out", out_path, "Write the result document to this file");
  app.add_option("--format", format, "Output format (default: csv for micro --grid and converge, json otherwise)")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", threads,
                 "Execution hint recorded in provenance (evaluation is sequential "
                 "and deterministic); PFRMT_THREADS is used when absent")
      ->envname("PFRMT_THREADS");
  app.add_option("--request", request_path,
                 "Evaluate a raw JSON request from this file (\"-\" = stdin) "
                 "instead of building one from flags");

  // ---- partition ----
  auto* sub_partition = app.add_subcommand(
      "partition", "Partition function (flavor ratio average) of a chiral or generic ensemble");
  sub_partition->fallthrough();
  std::string p_type = "chiral", p_method = "pf";
  int p_n = 1, p_nu = 0, p_bigN = 1, p_degree = 0;
  double p_alpha = 1.0, p_tolquad = 0.0;
  std::string p_potential, p_fermionic, p_bosonic, p_split;
  std::uint64_t p_samples = 100000, p_seed = 1, p_chunk = 0;
  auto* o_ptype = sub_partition->add_option("--type", p_type, "Ensemble type")
                      ->check(CLI::IsMember({"chiral", "generic"}));
  auto* o_pn = sub_partition->add_option("--n", p_n, "Chiral matrix size n");
  auto* o_pnu = sub_partition->add_option("--nu", p_nu, "Topological index nu >= 0");
  auto* o_palpha = sub_partition->add_option("--alpha", p_alpha, "Weight scale alpha > 0");
  auto* o_ppot = sub_partition->add_option(
      "--potential", p_potential,
      "Comma list of potential coefficients (chiral: V, default \"1\"; generic: U)");
  auto* o_pbigN = sub_partition->add_option("--N", p_bigN, "Generic ensemble size N");
  auto* o_pf = sub_partition->add_option("--fermionic", p_fermionic,
                                         "Comma list of fermionic flavors \"re+imi\"");
  auto* o_pb = sub_partition->add_option("--bosonic", p_bosonic,
                                         "Comma list of bosonic flavors \"re+imi\"");
  sub_partition->add_option("--method", p_method, "det | pf | mc | quad")
      ->check(CLI::IsMember({"det", "pf", "mc", "quad"}));
  auto* o_psplit = sub_partition->add_option("--split", p_split,
                                             "Determinant split \"l11,l21\" (det only)");
  auto* o_psamples = sub_partition->add_option("--samples", p_samples, "Monte Carlo samples");
  auto* o_pseed = sub_partition->add_option("--seed", p_seed, "Monte Carlo seed");
  auto* o_pchunk = sub_partition->add_option("--chunk", p_chunk,
                                             "Monte Carlo chunk size (0 = samples/100)");
  auto* o_ptq = sub_partition->add_option("--tol-quad", p_tolquad,
                                          "Outer quadrature tolerance override [1e-13, 1e-6]");
  auto* o_pdeg = sub_partition->add_option("--degree", p_degree,
                                           "Orthogonal-system degree override");

  // ---- kpoint ----
  auto* sub_kpoint =
      app.add_subcommand("kpoint", "k-point correlation function of singular values");
  sub_kpoint->fallthrough();
  int k_n = 1, k_nu = 0, k_degree = 0;
  double k_alpha = 1.0, k_tolquad = 0.0;
  std::string k_potential, k_points, k_method = "det";
  auto* o_kn = sub_kpoint->add_option("--n", k_n, "Chiral matrix size n");
  auto* o_knu = sub_kpoint->add_option("--nu", k_nu, "Topological index nu >= 0");
  auto* o_kalpha = sub_kpoint->add_option("--alpha", k_alpha, "Weight scale alpha > 0");
  auto* o_kpot =
      sub_kpoint->add_option("--potential", k_potential, "Comma list of V coefficients");
  sub_kpoint->add_option("--points", k_points, "Comma list of evaluation points x > 0")
      ->required();
  sub_kpoint->add_option("--method", k_method, "det | pf | quad")
      ->check(CLI::IsMember({"det", "pf", "quad"}));
  auto* o_kdeg =
      sub_kpoint->add_option("--degree", k_degree, "Orthogonal-system degree override");
  auto* o_ktq = sub_kpoint->add_option("--tol-quad", k_tolquad,
                                       "Outer quadrature tolerance override [1e-13, 1e-6]");

  // ---- micro ----
  auto* sub_micro = app.add_subcommand(
      "micro", "Microscopic-limit partition function (value or --grid tabulation)");
  sub_micro->fallthrough();
  int m_nu = 0;
  std::string m_counts, m_grid, m_bosonic, m_fermionic, m_method = "pf", m_split;
  sub_micro->add_option("--nu", m_nu, "Topological index nu >= 0");
  auto* o_mcounts = sub_micro->add_option(
      "--flavors", m_counts, "Flavor counts \"k1,k2\" for --grid tabulation mode");
  auto* o_mgrid = sub_micro->add_option(
      "--grid", m_grid, "Tabulation grid \"start:stop:count\" of the scale x > 0");
  auto* o_mb = sub_micro->add_option("--bosonic", m_bosonic,
                                     "Comma list of bosonic arguments \"re+imi\" (value mode)");
  auto* o_mf = sub_micro->add_option(
      "--fermionic", m_fermionic, "Comma list of fermionic arguments \"re+imi\" (value mode)");
  sub_micro->add_option("--method", m_method, "det | pf")
      ->check(CLI::IsMember({"det", "pf"}));
  auto* o_msplit =
      sub_micro->add_option("--split", m_split, "Determinant split \"l11,l21\" (det only)");

  // ---- wilson ----
  auto* sub_wilson = app.add_subcommand(
      "wilson", "Wilson-Dirac partition function at finite lattice spacing");
  sub_wilson->fallthrough();
  int w_nu = 0, w_nodes = 80;
  double w_ahat = 0.1;
  std::string w_masses;
  sub_wilson->add_option("--nu", w_nu, "Topological index nu >= 0");
  sub_wilson->add_option("--a-hat", w_ahat, "Scaled lattice spacing a_hat > 0");
  sub_wilson->add_option("--masses", w_masses, "Comma list of quark masses (even count)")
      ->required();
  auto* o_wnodes =
      sub_wilson->add_option("--nodes", w_nodes, "Gauss-Hermite nodes per axis (>= 2)");

  // ---- verify ----
  auto* sub_verify = app.add_subcommand(
      "verify", "Cross-method identity suite (det vs pf vs quadrature) at fixed probes");
  sub_verify->fallthrough();
  int v_n = 1, v_nu = 0;
  double v_alpha = 1.0, v_tolquad = 0.0;
  std::string v_potential, v_counts;
  auto* o_vn = sub_verify->add_option("--n", v_n, "Chiral matrix size n");
  auto* o_vnu = sub_verify->add_option("--nu", v_nu, "Topological index nu >= 0");
  auto* o_valpha = sub_verify->add_option("--alpha", v_alpha, "Weight scale alpha > 0");
  auto* o_vpot =
      sub_verify->add_option("--potential", v_potential, "Comma list of V coefficients");
  auto* o_vcounts = sub_verify->add_option("--flavors", v_counts,
                                           "Flavor counts \"k1,k2\" (0 <= k <= 4)");
  auto* o_vtq = sub_verify->add_option("--tol-quad", v_tolquad,
                                       "Outer quadrature tolerance override [1e-13, 1e-6]");

  // ---- converge ----
  auto* sub_converge = app.add_subcommand(
      "converge", "Finite-n convergence table toward the microscopic limit");
  sub_converge->fallthrough();
  int c_nu = 0;
  double c_alpha = 1.0;
  std::string c_xgrid, c_nlist;
  sub_converge->add_option("--nu", c_nu, "Topological index nu >= 0");
  auto* o_calpha = sub_converge->add_option("--alpha", c_alpha, "Weight scale alpha > 0");
  auto* o_cx =
      sub_converge->add_option("--x-grid", c_xgrid, "Comma list of scales x > 0");
  auto* o_cn = sub_converge->add_option("--n-list", c_nlist, "Comma list of sizes n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  // ------------------------------------------------- build the request --

  std::string request;
  bool tabular = false;
  try {
    if (!request_path.empty()) {
      if (app.get_subcommands().size() > 0)
        throw CliError("--request: give either a raw request or a subcommand, not both");
      if (request_path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        request = buf.str();
      } else {
        std::ifstream f(request_path, std::ios::binary);
        if (!f) throw CliError("--request: cannot open \"" + request_path + "\"");
        std::ostringstream buf;
        buf << f.rdbuf();
        request = buf.str();
      }
      // Tabular output applies only to flag-built micro/converge runs; raw
      // requests print the JSON response as-is unless --format csv is given.
      tabular = false;
    } else if (app.get_subcommands().empty()) {
      std::fputs(app.help().c_str(), stderr);
      return 1;
    } else {
      njson req;
      req["schema"] = kSchema;

      if (sub_partition->parsed()) {
        req["command"] = "partition";
        njson ens = njson::object();
        if (o_ptype->count()) ens["type"] = p_type;
        if (p_type == "generic") {
          if (o_pbigN->count()) ens["N"] = p_bigN;
          if (o_pn->count())
            throw CliError("--n applies to the chiral ensemble; use --N for generic");
        } else {
          if (o_pn->count()) ens["n"] = p_n;
          if (o_pnu->count()) ens["nu"] = p_nu;
          if (o_palpha->count()) ens["alpha"] = p_alpha;
        }
        if (o_ppot->count())
          ens["potential"] = real_list(p_potential, "--potential");
        req["ensemble"] = ens;
        njson flavors;
        flavors["fermionic"] = complex_list_json(p_fermionic, "--fermionic");
        flavors["bosonic"] = complex_list_json(p_bosonic, "--bosonic");
        req["flavors"] = flavors;
        req["method"] = p_method;
        if (o_psplit->count()) req["split"] = split_json(p_split);
        if (o_psamples->count() || o_pseed->count() || o_pchunk->count())
          req["mc"] = njson{{"samples", p_samples}, {"seed", p_seed}, {"chunk", p_chunk}};
        if (o_ptq->count()) req["tol"] = njson{{"quad", p_tolquad}};
        if (o_pdeg->count()) req["degree"] = p_degree;
      } else if (sub_kpoint->parsed()) {
        req["command"] = "kpoint";
        njson ens = njson::object();
        if (o_kn->count()) ens["n"] = k_n;
        if (o_knu->count()) ens["nu"] = k_nu;
        if (o_kalpha->count()) ens["alpha"] = k_alpha;
        if (o_kpot->count()) ens["potential"] = real_list(k_potential, "--potential");
        req["ensemble"] = ens;
        req["points"] = real_list(k_points, "--points");
        req["method"] = k_method;
        if (o_kdeg->count()) req["degree"] = k_degree;
        if (o_ktq->count()) req["tol"] = njson{{"quad", k_tolquad}};
      } else if (sub_micro->parsed()) {
        req["command"] = "micro";
        req["nu"] = m_nu;
        if (o_mgrid->count()) {
          if (o_mb->count() || o_mf->count())
            throw CliError(
                "--grid tabulates at derived flavor positions; pass counts via "
                "--flavors, not --bosonic/--fermionic");
          if (o_msplit->count())
            throw CliError("--split applies to value mode (explicit flavors) only");
          if (o_mcounts->count())
            req["counts"] = counts_from(m_counts, "--flavors");
          req["grid"] = grid_json(m_grid);
          tabular = true;
        } else {
          if (o_mcounts->count())
            throw CliError(
                "--flavors gives grid-mode counts and requires --grid; value mode "
                "takes explicit --bosonic/--fermionic arguments");
          njson flavors;
          flavors["fermionic"] = complex_list_json(m_fermionic, "--fermionic");
          flavors["bosonic"] = complex_list_json(m_bosonic, "--bosonic");
          req["flavors"] = flavors;
          req["method"] = m_method;
          if (o_msplit->count()) req["split"] = split_json(m_split);
        }
      } else if (sub_wilson->parsed()) {
        req["command"] = "wilson";
        req["nu"] = w_nu;
        req["a_hat"] = w_ahat;
        req["masses"] = real_list(w_masses, "--masses");
        if (o_wnodes->count()) req["nodes"] = w_nodes;
      } else if (sub_verify->parsed()) {
        req["command"] = "verify";
        njson ens = njson::object();
        if (o_vn->count()) ens["n"] = v_n;
        if (o_vnu->count()) ens["nu"] = v_nu;
        if (o_valpha->count()) ens["alpha"] = v_alpha;
        if (o_vpot->count()) ens["potential"] = real_list(v_potential, "--potential");
        req["ensemble"] = ens;
        if (o_vcounts->count())
          req["flavor_counts"] = counts_from(v_counts, "--flavors");
        if (o_vtq->count()) req["tol"] = njson{{"quad", v_tolquad}};
      } else if (sub_converge->parsed()) {
        req["command"] = "converge";
        req["nu"] = c_nu;
        if (o_calpha->count()) req["alpha"] = c_alpha;
        if (o_cx->count()) req["x_grid"] = real_list(c_xgrid, "--x-grid");
        if (o_cn->count()) req["n_list"] = int_list(c_nlist, "--n-list");
        tabular = true;
      }

      if (threads > 0) req["threads"] = threads;
      request = req.dump();
    }

    const std::string fmt = format.empty() ? (tabular ? "csv" : "json") : format;
    if (fmt == "csv" && request_path.empty() && !tabular)
      throw CliError("--format csv: only micro --grid and converge produce tables");

    // ------------------------------------------------------- evaluate --

    pfrmt_ctx* ctx = pfrmt_ctx_new();
    if (ctx == nullptr) {
      emit_error("internal", "context allocation failed", out_path);
      return 2;
    }
    char* resp = nullptr;
    const int rc = pfrmt_ctx_eval(ctx, request.c_str(), &resp);
    std::string doc = resp != nullptr ? resp : "";
    pfrmt_string_free(resp);

    if (rc != 0) {
      std::fprintf(stderr, "pfrmt: %s\n", pfrmt_ctx_last_error(ctx));
      pfrmt_ctx_free(ctx);
      emit(doc, out_path);
      return rc;
    }
    pfrmt_ctx_free(ctx);

    const njson response = njson::parse(doc);
    if (fmt == "csv") {
      emit(to_csv(response), out_path);
    } else {
      emit(doc, out_path);
    }
    if (response.at("command") == "verify" &&
        !response.at("result").at("pass").get<bool>()) {
      std::fprintf(stderr, "pfrmt: verify FAILED (residual_det_pf = %s, residual_quad = %s)\n",
                   response["result"]["residual_det_pf"].dump().c_str(),
                   response["result"]["residual_quad"].dump().c_str());
      return 2;
    }
    return 0;
  } catch (const CliError& e) {
    emit_error("validation", e.what(), out_path);
    return 1;
  } catch (const std::exception& e) {
    emit_error("internal", e.what(), out_path);
    return 2;
  }
}
