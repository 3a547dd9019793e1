#include "pfrmt/engine.hpp"

#include "pfrmt/ensemble.hpp"
#include "pfrmt/microscopic.hpp"
#include "pfrmt/oracles.hpp"
#include "pfrmt/partition.hpp"
#include "pfrmt/polynomials.hpp"
#include "pfrmt/wilson.hpp"

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include <algorithm>
#include <cmath>

namespace pfrmt {

namespace {

using njson = nlohmann::json;

constexpr const char* kSchema = "pfaffian-rmt/1";
constexpr const char* kVersion = "1.0.0";

njson cplx_json(cplx z) { return njson{{"re", z.real()}, {"im", z.imag()}}; }

cplx cplx_from(const njson& j, const char* what) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_object() && j.contains("re"))
        return cplx(j.at("re").get<double>(), j.value("im", 0.0));
    throw validation_error(std::string(what) + ": expected a number or {re, im}");
}

std::vector<cplx> cplx_list(const njson& j, const char* what) {
    if (!j.is_array()) throw validation_error(std::string(what) + ": expected an array");
    std::vector<cplx> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(cplx_from(e, what));
    return out;
}

FlavorSet flavors_from(const njson& j) {
    FlavorSet f;
    if (j.is_null()) return f;
    if (!j.is_object()) throw validation_error("flavors: expected an object");
    if (j.contains("bosonic")) f.bosonic = cplx_list(j.at("bosonic"), "flavors.bosonic");
    if (j.contains("fermionic")) f.fermionic = cplx_list(j.at("fermionic"), "flavors.fermionic");
    return f;
}

njson flavors_json(const FlavorSet& f) {
    njson b = njson::array(), fe = njson::array();
    for (cplx z : f.bosonic) b.push_back(cplx_json(z));
    for (cplx z : f.fermionic) fe.push_back(cplx_json(z));
    return njson{{"bosonic", b}, {"fermionic", fe}};
}

EnsembleParams chiral_ensemble_from(const njson& j) {
    if (!j.is_object()) throw validation_error("ensemble: expected an object");
    EnsembleParams p;
    p.n = j.value("n", 1);
    p.nu = j.value("nu", 0);
    p.alpha = j.value("alpha", 1.0);
    if (j.contains("potential")) p.potential = j.at("potential").get<std::vector<double>>();
    p.validate();
    return p;
}

njson ensemble_json(const EnsembleParams& p) {
    return njson{{"type", "chiral"},
                 {"n", p.n},
                 {"nu", p.nu},
                 {"alpha", p.alpha},
                 {"potential", p.potential}};
}

DetSplit split_from(const njson& j) {
    DetSplit s;
    if (j.is_null()) return s;
    if (!j.is_object()) throw validation_error("split: expected an object {l11, l21}");
    s.l11 = j.value("l11", 0);
    s.l21 = j.value("l21", 0);
    return s;
}

njson result_json(const PartitionResult& r) {
    njson out{{"value", cplx_json(r.value)},
              {"method", r.method},
              {"normalization", r.normalization}};
    if (r.stderr_est >= 0.0) {
        out["stderr"] = r.stderr_est;
        out["warning"] = r.warning;
    }
    return out;
}

njson provenance(njson parameters, const std::string& method, njson tolerances,
                 const njson& seed = njson()) {
    njson p{{"parameters", std::move(parameters)},
            {"method", method},
            {"tolerances", std::move(tolerances)},
            {"library", njson{{"name", "pfrmt"}, {"version", kVersion}}}};
    if (!seed.is_null()) p["seed"] = seed;
    return p;
}

njson respond(const std::string& command, njson result, njson prov) {
    return njson{{"schema", kSchema},
                 {"command", command},
                 {"result", std::move(result)},
                 {"provenance", std::move(prov)}};
}

// Degree sufficient for every route at the given flavor counts (det needs up
// to max(d1, d2, n) <= n + max(k1, k2); pf needs max(T, n) <= n + k2/2 + 1).
int degree_for(const EnsembleParams& p, const FlavorSet& f, const njson& req) {
    if (req.contains("degree")) {
        const int d = req.at("degree").get<int>();
        if (d < 0) throw validation_error("degree: must be non-negative");
        return d;
    }
    const int k1 = static_cast<int>(f.bosonic.size());
    const int k2 = static_cast<int>(f.fermionic.size());
    return p.n + std::max(k1, k2) + 1;
}

OrthogonalSystem system_for(const EnsembleParams& p, int degree) {
    // Gaussian potential has exact closed forms; anything else goes through
    // the Stieltjes construction.
    if (p.potential == std::vector<double>{1.0}) return laguerre_closed_form(p, degree);
    return build_orthogonal_system(p, degree);
}

double quad_tol_from(const njson& req) {
    double t = 0.0; // 0 = module-internal default target
    if (req.contains("tol") && req.at("tol").contains("quad")) {
        t = req.at("tol").at("quad").get<double>();
        if (!(t >= 1e-13 && t <= 1e-6))
            throw validation_error("tol.quad: must lie in [1e-13, 1e-6]");
    }
    return t;
}

njson quad_tols(double outer) {
    njson t{{"pf_antisymmetry", 1e-9}, {"axis_eps", 1e-8}};
    t["quad_outer"] = outer > 0.0 ? outer : 1e-9;
    return t;
}

// ------------------------------------------------------------- commands --

njson cmd_partition(const njson& req) {
    const std::string method = req.value("method", "pf");
    const njson& ens = req.contains("ensemble") ? req.at("ensemble") : njson::object();
    const std::string type = ens.is_object() ? ens.value("type", "chiral") : "chiral";
    FlavorSet flavors = flavors_from(req.contains("flavors") ? req.at("flavors") : njson());
    const double qt = quad_tol_from(req);

    if (type == "generic") {
        GenericMeasure gm;
        if (ens.contains("potential")) gm.potential = ens.at("potential").get<std::vector<double>>();
        const int bign = ens.value("N", 1);
        njson params{{"ensemble", njson{{"type", "generic"},
                                        {"N", bign},
                                        {"potential", gm.potential}}},
                     {"flavors", flavors_json(flavors)},
                     {"method", method}};
        if (method == "pf") {
            const PartitionResult r = partition_generic_pf(gm, bign, flavors);
            return respond("partition", result_json(r),
                           provenance(params, r.method, quad_tols(qt)));
        }
        if (method == "quad") {
            const PartitionResult r = quad_generic_partition(gm, bign, flavors, qt);
            return respond("partition", result_json(r),
                           provenance(params, r.method, quad_tols(qt)));
        }
        throw validation_error("partition: generic ensemble supports methods pf | quad");
    }
    if (type != "chiral")
        throw validation_error("ensemble.type: must be \"chiral\" or \"generic\"");

    const EnsembleParams p = chiral_ensemble_from(ens);
    njson params{{"ensemble", ensemble_json(p)},
                 {"flavors", flavors_json(flavors)},
                 {"method", method}};

    if (method == "det") {
        const DetSplit split = split_from(req.contains("split") ? req.at("split") : njson());
        params["split"] = njson{{"l11", split.l11}, {"l21", split.l21}};
        const int degree = degree_for(p, flavors, req);
        params["degree"] = degree;
        const PartitionResult r = partition_det(system_for(p, degree), p, flavors, split);
        return respond("partition", result_json(r), provenance(params, r.method, quad_tols(qt)));
    }
    if (method == "pf") {
        const int degree = degree_for(p, flavors, req);
        params["degree"] = degree;
        const PartitionResult r = partition_pf(system_for(p, degree), p, flavors);
        return respond("partition", result_json(r), provenance(params, r.method, quad_tols(qt)));
    }
    if (method == "mc") {
        McConfig cfg;
        if (req.contains("mc")) {
            const njson& m = req.at("mc");
            cfg.samples = m.value("samples", cfg.samples);
            cfg.seed = m.value("seed", cfg.seed);
            cfg.chunk = m.value("chunk", cfg.chunk);
        }
        params["mc"] = njson{{"samples", cfg.samples}, {"seed", cfg.seed}, {"chunk", cfg.chunk}};
        const PartitionResult r = mc_partition(p, flavors, cfg);
        return respond("partition", result_json(r),
                       provenance(params, r.method, quad_tols(qt), njson(cfg.seed)));
    }
    if (method == "quad") {
        const PartitionResult r = quad_partition(p, flavors, qt);
        return respond("partition", result_json(r), provenance(params, r.method, quad_tols(qt)));
    }
    throw validation_error("partition: method must be det | pf | mc | quad");
}

njson cmd_kpoint(const njson& req) {
    const EnsembleParams p =
        chiral_ensemble_from(req.contains("ensemble") ? req.at("ensemble") : njson::object());
    if (!req.contains("points")) throw validation_error("kpoint: missing points array");
    const std::vector<double> x = req.at("points").get<std::vector<double>>();
    const int k = static_cast<int>(x.size());
    const std::string method = req.value("method", "det");
    const double qt = quad_tol_from(req);
    njson params{{"ensemble", ensemble_json(p)}, {"points", x}, {"method", method}};

    double value = 0.0;
    if (method == "quad") {
        value = quad_kpoint(p, x, k, qt);
    } else {
        const int degree = req.contains("degree") ? req.at("degree").get<int>() : p.n + 1;
        params["degree"] = degree;
        const OrthogonalSystem sys = system_for(p, degree);
        if (method == "det")
            value = kpoint_det(sys, p, x, k);
        else if (method == "pf")
            value = kpoint_pf(sys, p, x, k);
        else
            throw validation_error("kpoint: method must be det | pf | quad");
    }
    return respond("kpoint", njson{{"value", value}, {"k", k}},
                   provenance(params, method, quad_tols(qt)));
}

njson cmd_micro(const njson& req) {
    const long nu = req.value("nu", 0L);
    const std::string method = req.value("method", "pf");

    if (req.contains("grid")) {
        // Tabulation mode: flavor *counts* (k1, k2) plus a positive grid of
        // the microscopic scale x.  Flavors are placed at distinct multiples
        // of x (bosonic at 1.05+0.1b, fermionic at 1+0.1a) and each row also
        // tabulates the three kernels at the canonical pair (x, 1.1 x).
        long k1 = 0, k2 = 1;
        if (req.contains("counts")) {
            const auto c = req.at("counts").get<std::vector<long>>();
            if (c.size() != 2 || c[0] < 0 || c[1] < 0)
                throw validation_error("micro: counts must be [k1>=0, k2>=0]");
            k1 = c[0];
            k2 = c[1];
        }
        const njson& g = req.at("grid");
        const double start = g.at("start").get<double>();
        const double stop = g.at("stop").get<double>();
        const long count = g.at("count").get<long>();
        if (!(start > 0.0) || !(stop >= start) || count < 1)
            throw validation_error("micro: grid requires 0 < start <= stop and count >= 1");
        njson rows = njson::array();
        for (long i = 0; i < count; ++i) {
            const double x =
                count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1);
            FlavorSet f;
            for (long b = 0; b < k1; ++b) f.bosonic.push_back(cplx(x * (1.05 + 0.1 * b), 0.0));
            for (long a = 0; a < k2; ++a) f.fermionic.push_back(cplx(x * (1.0 + 0.1 * a), 0.0));
            const cplx zdet = micro_partition_det(nu, f);
            const cplx zpf = micro_partition_pf(nu, f);
            rows.push_back(njson{{"x", x},
                                 {"i1", cplx_json(kernel_I(1, nu, x, 1.1 * x))},
                                 {"i2", cplx_json(kernel_I(2, nu, 1.1 * x, x))},
                                 {"i3", cplx_json(kernel_I(3, nu, x, 1.1 * x))},
                                 {"z_det", cplx_json(zdet)},
                                 {"z_pf", cplx_json(zpf)}});
        }
        njson params{{"nu", nu},
                     {"counts", njson::array({k1, k2})},
                     {"grid", njson{{"start", start}, {"stop", stop}, {"count", count}}}};
        return respond("micro", njson{{"rows", rows}},
                       provenance(params, "grid", njson{{"pf_antisymmetry", 1e-9}}));
    }

    FlavorSet f = flavors_from(req.contains("flavors") ? req.at("flavors") : njson());
    njson params{{"nu", nu}, {"flavors", flavors_json(f)}, {"method", method}};
    cplx value;
    if (method == "det") {
        const DetSplit split = split_from(req.contains("split") ? req.at("split") : njson());
        params["split"] = njson{{"l11", split.l11}, {"l21", split.l21}};
        value = micro_partition_det(nu, f, split);
    } else if (method == "pf") {
        value = micro_partition_pf(nu, f);
    } else {
        throw validation_error("micro: method must be det | pf");
    }
    return respond("micro", njson{{"value", cplx_json(value)}},
                   provenance(params, method, njson{{"pf_antisymmetry", 1e-9}}));
}

njson cmd_wilson(const njson& req) {
    WilsonParams p;
    p.nu = req.value("nu", 0L);
    p.a_hat = req.value("a_hat", 0.1);
    if (!req.contains("masses")) throw validation_error("wilson: missing masses array");
    p.masses = req.at("masses").get<std::vector<double>>();
    const int nodes = req.value("nodes", 80);
    const WilsonReport rep = wilson_report(p, nodes);

    njson entries = njson::array();
    for (long i = 0; i < rep.entries.rows(); ++i) {
        njson row = njson::array();
        for (long j = 0; j < rep.entries.cols(); ++j) row.push_back(cplx_json(rep.entries(i, j)));
        entries.push_back(row);
    }
    njson params{
        {"nu", p.nu}, {"a_hat", p.a_hat}, {"masses", p.masses}, {"nodes", nodes}};
    return respond(
        "wilson",
        njson{{"value", cplx_json(rep.value)},
              {"entries", entries},
              {"checks", njson{{"permutation_residual", rep.permutation_residual},
                               {"continuum_ratio", cplx_json(rep.continuum_ratio)}}}},
        provenance(params, "gauss-hermite", njson{{"nodes", nodes}, {"pf_antisymmetry", 1e-9}}));
}

njson cmd_verify(const njson& req) {
    const EnsembleParams p =
        chiral_ensemble_from(req.contains("ensemble") ? req.at("ensemble") : njson::object());
    long k1 = 0, k2 = 2;
    if (req.contains("flavor_counts")) {
        const auto c = req.at("flavor_counts").get<std::vector<long>>();
        if (c.size() != 2 || c[0] < 0 || c[1] < 0 || c[0] > 4 || c[1] > 4)
            throw validation_error("verify: flavor_counts must be [k1, k2] with 0 <= k <= 4");
        k1 = c[0];
        k2 = c[1];
    }
    if (2 * p.n + k2 - k1 < 0)
        throw validation_error("verify: flavor counts violate 2n + k2 - k1 >= 0");

    // Fixed probe flavors (documented): off-axis bosonic values, mixed
    // fermionic values, all squares pairwise distinct.
    static const std::vector<cplx> kBos = {
        {0.5, 0.8}, {0.0, 1.3}, {0.7, 1.2}, {0.25, 0.6}};
    static const std::vector<cplx> kFer = {
        {0.9, 0.0}, {0.35, 0.45}, {1.4, -0.2}, {0.15, 0.75}};
    FlavorSet f;
    f.bosonic.assign(kBos.begin(), kBos.begin() + k1);
    f.fermionic.assign(kFer.begin(), kFer.begin() + k2);

    const int degree = p.n + static_cast<int>(std::max(k1, k2)) + 1;
    const OrthogonalSystem sys = system_for(p, degree);
    const double qt = quad_tol_from(req);

    const cplx zpf = partition_pf(sys, p, f).value;
    double resid_detpf = 0.0;
    int splits = 0;
    for (long l11 = 0; l11 <= k1; ++l11)
        for (long l21 = 0; l21 <= k2; ++l21) {
            DetSplit s;
            s.l11 = static_cast<int>(l11);
            s.l21 = static_cast<int>(l21);
            cplx zdet;
            try {
                zdet = partition_det(sys, p, f, s).value;
            } catch (const validation_error&) {
                continue; // inadmissible split (d < 0)
            }
            ++splits;
            resid_detpf = std::max(resid_detpf, std::abs(zdet / zpf - 1.0));
        }
    if (splits == 0) throw validation_error("verify: no admissible determinant split");

    njson resid_quad; // null when n > 3 (quadrature oracle out of range)
    bool pass = resid_detpf < 1e-8;
    if (p.n <= 3) {
        const cplx zq = quad_partition(p, f, qt).value;
        const double rq = std::abs(zpf / zq - 1.0);
        resid_quad = rq;
        pass = pass && rq < 1e-7;
    }

    njson params{{"ensemble", ensemble_json(p)},
                 {"flavor_counts", njson::array({k1, k2})},
                 {"flavors", flavors_json(f)},
                 {"degree", degree}};
    return respond("verify",
                   njson{{"pass", pass},
                         {"residual_det_pf", resid_detpf},
                         {"residual_quad", resid_quad},
                         {"splits_checked", splits},
                         {"tolerance_det_pf", 1e-8},
                         {"tolerance_quad", 1e-7}},
                   provenance(params, "det|pf|quad", quad_tols(qt)));
}

njson cmd_converge(const njson& req) {
    const long nu = req.value("nu", 0L);
    const double alpha = req.value("alpha", 1.0);
    std::vector<double> xg;
    if (req.contains("x_grid")) {
        xg = req.at("x_grid").get<std::vector<double>>();
    } else {
        for (int i = 0; i < 8; ++i) xg.push_back(0.3 + (3.0 - 0.3) * i / 7.0);
    }
    std::vector<long> nl{25, 50, 100, 200};
    if (req.contains("n_list")) nl = req.at("n_list").get<std::vector<long>>();

    const auto table = convergence_table(nu, alpha, xg, nl);

    // Max-over-x rows per n, plus the monotone-improvement flag.
    std::vector<ConvergenceRow> rows;
    for (const ConvergencePoint& pt : table) {
        if (rows.empty() || rows.back().n != pt.n) rows.push_back(ConvergenceRow{pt.n, 0.0, 0.0});
        rows.back().dev_p = std::max(rows.back().dev_p, pt.dev_p);
        rows.back().dev_phat = std::max(rows.back().dev_phat, pt.dev_phat);
    }
    njson jrows = njson::array(), jtable = njson::array();
    bool monotone = true;
    for (size_t i = 0; i < rows.size(); ++i) {
        jrows.push_back(
            njson{{"n", rows[i].n}, {"dev_p", rows[i].dev_p}, {"dev_phat", rows[i].dev_phat}});
        if (i > 0 && (rows[i].dev_p >= rows[i - 1].dev_p ||
                      rows[i].dev_phat >= rows[i - 1].dev_phat))
            monotone = false;
    }
    for (const ConvergencePoint& pt : table)
        jtable.push_back(njson{
            {"n", pt.n}, {"x", pt.x}, {"dev_p", pt.dev_p}, {"dev_phat", pt.dev_phat}});
    njson params{{"nu", nu}, {"alpha", alpha}, {"x_grid", xg}, {"n_list", nl}};
    return respond("converge", njson{{"rows", jrows}, {"table", jtable}, {"monotone", monotone}},
                   provenance(params, "orthonormal-recurrence", njson{{"quad_rel", 1e-12}}));
}

} // namespace

std::string engine_eval(const std::string& request_json) {
    njson req;
    try {
        req = njson::parse(request_json);
    } catch (const njson::exception& e) {
        throw validation_error(std::string("request is not valid JSON: ") + e.what());
    }
    if (!req.is_object()) throw validation_error("request must be a JSON object");
    if (req.contains("schema") && req.at("schema").get<std::string>() != kSchema)
        throw validation_error(std::string("unsupported schema (expected ") + kSchema + ")");
    if (!req.contains("command")) throw validation_error("request is missing \"command\"");
    const std::string cmd = req.at("command").get<std::string>();

    njson out;
    try {
        if (cmd == "partition")
            out = cmd_partition(req);
        else if (cmd == "kpoint")
            out = cmd_kpoint(req);
        else if (cmd == "micro")
            out = cmd_micro(req);
        else if (cmd == "wilson")
            out = cmd_wilson(req);
        else if (cmd == "verify")
            out = cmd_verify(req);
        else if (cmd == "converge")
            out = cmd_converge(req);
        else
            throw validation_error("unknown command: " + cmd);
    } catch (const njson::exception& e) {
        // Type errors while reading request fields are validation failures.
        throw validation_error(std::string("malformed request field: ") + e.what());
    }

    // Execution hint, recorded for provenance round-trips. Every module
    // evaluates sequentially and deterministically regardless of its value.
    if (req.contains("threads")) {
        int threads = 0;
        try {
            threads = req.at("threads").get<int>();
        } catch (const njson::exception&) {
            throw validation_error("threads: must be an integer >= 1");
        }
        if (threads < 1) throw validation_error("threads: must be >= 1");
        out["provenance"]["parameters"]["threads"] = threads;
    }
    return out.dump(2);
}

const char* engine_version() { return kVersion; }

} // namespace pfrmt
