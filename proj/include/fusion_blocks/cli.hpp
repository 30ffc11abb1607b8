#pragma once
// Command-line dispatcher.  run() is the whole program minus main(), so it
// can be driven in-process by tests.

#include "fusion_blocks/catalog.hpp"
#include "fusion_blocks/elliptic.hpp"
#include "fusion_blocks/moduli_rank.hpp"
#include "fusion_blocks/zhu_trace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fb::cli {

using nlohmann::json;

enum class Format { text, json };

struct Config {
    int q_order = 8;
    int z_window = 4;
    int deg_max = 6;
    double tolerance = 1e-6;
    Format format = Format::text;

    void validate() const {
        if (q_order <= 0) throw std::invalid_argument("config: q-order must be positive");
        if (z_window <= 0) throw std::invalid_argument("config: z-window must be positive");
        if (deg_max <= 0) throw std::invalid_argument("config: degree bound must be positive");
        if (!(tolerance > 0 && tolerance <= 1e-3)) throw std::invalid_argument("config: tolerance must lie in (0, 1e-3]");
    }
};

/// Bad input files or names; exit status 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline json scalar_json(const ExactScalar& s) {
    json a = json::array();
    for (const auto& [p, c] : s.terms()) a.push_back({{"u_power", p}, {"value", to_string(c)}});
    return a;
}

inline std::string q_power_str(const Rational& q) { return to_string(q); }

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline fusion::FusionData load_ring(const std::string& path) {
    try {
        return fusion::from_json(read_json_file(path));
    } catch (const fusion::StructuralError& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline std::vector<int> parse_legs(const std::string& s, const fusion::FusionData& ring) {
    std::vector<int> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(ring.index_of(item));
    return out;
}

/// Text rows "q^n z^e u^j : value" for a z-Laurent series.
inline void print_laurent(std::ostream& out, const ZLaurent& f) {
    for (const auto& r : elliptic::nonzero_coefficients(f))
        out << "q^" << to_string(r.q_power) << " z^" << r.z_power << " u^" << r.u_power << " : " << to_string(r.value)
            << "\n";
}

inline json laurent_json(const ZLaurent& f) {
    json a = json::array();
    for (const auto& r : elliptic::nonzero_coefficients(f))
        a.push_back({{"q_power", to_string(r.q_power)}, {"z_power", r.z_power}, {"u_power", r.u_power}, {"value", to_string(r.value)}});
    return a;
}

inline ZLaurent as_laurent(const QSeries& s) { return ZLaurent::polynomial({{0, s}}); }

} // namespace detail

/// Runs one command; returns the exit status (0 pass, 1 failed check, 2 bad input).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    Config cfg;
    bool as_json = false;

    CLI::App app{"Fusion rings, conformal-block ranks and genus-one trace identities", "fusion_blocks"};
    app.require_subcommand(1);
    app.add_flag("--json", as_json, "Machine-readable JSON report");
    app.add_option("--tolerance", cfg.tolerance, "Verlinde integrality tolerance");

    // catalog
    auto* cat = app.add_subcommand("catalog", "Named fusion rings");
    cat->require_subcommand(1);
    auto* cat_list = cat->add_subcommand("list", "List ring names");
    std::string ring_name, out_path;
    auto* cat_export = cat->add_subcommand("export", "Write the fusion-data JSON of a named ring");
    cat_export->add_option("name", ring_name, "ising, lee_yang, trivial, su2_K or A*B")->required();
    cat_export->add_option("-o,--out", out_path, "Output file (default stdout)");
    auto* cat_smatrix = cat->add_subcommand("smatrix", "Rebuild a ring from its S-matrix and compare");
    cat_smatrix->add_option("name", ring_name, "ising, lee_yang or su2_K")->required();

    // verify-ring
    std::string ring_path, graph_path, legs_str;
    auto* verify = app.add_subcommand("verify-ring", "Check the fusion axioms of a ring file");
    verify->add_option("--ring", ring_path, "Fusion-data JSON")->required();

    // rank
    int genus = 0;
    bool no_vacuum = false;
    auto* rank = app.add_subcommand("rank", "Rank of a conformal-block bundle");
    rank->add_option("--ring", ring_path, "Fusion-data JSON")->required();
    auto* genus_opt = rank->add_option("--genus", genus, "Genus");
    rank->add_option("--legs", legs_str, "Comma-separated leg labels");
    auto* graph_opt = rank->add_option("--graph", graph_path, "Dual-graph JSON");
    rank->add_flag("--no-vacuum-insertion", no_vacuum, "Reject unstable queries instead of adding vacuum legs");
    graph_opt->excludes(genus_opt);

    // decomp-check
    auto* decomp = app.add_subcommand("decomp-check", "Compare all trivalent degenerations with the closed form");
    decomp->add_option("--ring", ring_path, "Fusion-data JSON")->required();
    decomp->add_option("--genus", genus, "Genus")->required();
    decomp->add_option("--legs", legs_str, "Comma-separated leg labels");

    // series
    int k = 1, m = 2, wt = 1;
    int z_lo = 0, z_hi = 0;
    bool have_window = false;
    auto* series = app.add_subcommand("series", "Elliptic series and lemma checks");
    series->require_subcommand(1);
    auto* s_eis = series->add_subcommand("eisenstein", "G_2k");
    s_eis->add_option("--k", k, "k >= 1")->required();
    s_eis->add_option("--order", cfg.q_order, "q-order");
    auto* s_wp = series->add_subcommand("wp", "Expansion of wp_m");
    auto* s_p = series->add_subcommand("p", "P_m in |q| < |z| < 1");
    auto* s_pexp = series->add_subcommand("pexp", "P_m(e^{uz}, q)");
    auto* s_lemma = series->add_subcommand("check-lemma", "P/wp lemma for index m");
    auto* s_res = series->add_subcommand("residue", "Residue identities");
    for (auto* sc : {s_wp, s_p, s_pexp, s_lemma}) {
        sc->add_option("--m", m, "Index")->required();
        sc->add_option("--order", cfg.q_order, "q-order");
        sc->add_option("--z-order", cfg.z_window, "z-order / window half-width");
    }
    for (auto* sc : {s_wp, s_p}) {
        sc->add_option("--z-min", z_lo, "Lowest z-exponent")->each([&](const std::string&) { have_window = true; });
        sc->add_option("--z-max", z_hi, "Highest z-exponent")->each([&](const std::string&) { have_window = true; });
    }
    s_res->add_option("--wt", wt, "Weight of a")->required();
    s_res->add_option("--m", m, "m >= 1")->required();
    s_res->add_option("--order", cfg.q_order, "q-order");

    // zhu-check
    std::string identity;
    bool m_given = false;
    auto* zhu = app.add_subcommand("zhu-check", "Trace identities on the free-boson Fock module");
    zhu->add_option("--identity", identity, "a0|am|aminus1|sumformula|block")
        ->required()
        ->check(CLI::IsMember({"a0", "am", "aminus1", "sumformula", "block"}));
    zhu->add_option("--deg-max", cfg.deg_max, "Largest degree of a and v");
    zhu->add_option("--q-order", cfg.q_order, "q-order");
    zhu->add_option("--m", m, "m for am/block")->each([&](const std::string&) { m_given = true; });
    zhu->add_option("--z-window", cfg.z_window, "t-window half-width for sumformula");

    std::vector<const char*> argv{"fusion_blocks"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2; // --help is success, every usage error is input error
    }
    cfg.format = as_json ? Format::json : Format::text;

    json report;
    json inputs = json::object();
    json residuals = json::array();
    json result;
    int status = 0;
    std::ostringstream text;

    try {
        cfg.validate();
        if (*cat) {
            report["command"] = "catalog";
            if (*cat_list) {
                result = json::array({"ising", "lee_yang", "trivial", "su2_K (K >= 0)", "A*B"});
                text << "ising\nlee_yang\ntrivial\nsu2_K (K >= 0)\nA*B (product of two names)\n";
            } else if (*cat_export) {
                fusion::FusionData ring;
                try {
                    ring = catalog::named(ring_name);
                } catch (const std::invalid_argument& e) {
                    throw InputError(e.what());
                }
                inputs["name"] = ring_name;
                result = fusion::to_json(ring);
                if (!out_path.empty()) {
                    std::ofstream f(out_path);
                    if (!f) throw InputError("cannot write '" + out_path + "'");
                    f << fusion::to_json(ring).dump(1) << "\n";
                    text << "wrote " << out_path << "\n";
                } else {
                    text << fusion::to_json(ring).dump(1) << "\n";
                }
            } else if (*cat_smatrix) {
                inputs["name"] = ring_name;
                catalog::SMatrix S;
                fusion::FusionData expect;
                if (ring_name == "ising") S = catalog::ising_smatrix(), expect = catalog::ising();
                else if (ring_name == "lee_yang") S = catalog::lee_yang_smatrix(), expect = catalog::lee_yang();
                else if (ring_name.rfind("su2_", 0) == 0) {
                    expect = catalog::named(ring_name);
                    S = catalog::su2_smatrix(static_cast<int>(expect.size()) - 1);
                } else throw InputError("smatrix: no S-matrix for '" + ring_name + "'");
                const auto rep = catalog::from_smatrix_report(S, expect.labels(), cfg.tolerance);
                const bool same = rep.ring.same_structure(expect);
                status = same ? 0 : 1;
                result = {{"matches_combinatorial", same}, {"max_deviation", rep.max_deviation}};
                text << (same ? "match" : "MISMATCH") << " max-deviation " << rep.max_deviation << "\n";
            }
        } else if (*verify) {
            report["command"] = "verify-ring";
            inputs["ring"] = ring_path;
            const auto ring = detail::load_ring(ring_path);
            const auto v = fusion::verify_axioms(ring);
            result = json::array();
            for (const auto& x : v) {
                result.push_back({{"axiom", x.axiom}, {"witness", x.witness}});
                text << "violated " << x.str() << "\n";
            }
            if (v.empty()) text << "ok: " << ring.size() << " labels satisfy all fusion axioms\n";
            status = v.empty() ? 0 : 1;
        } else if (*rank) {
            report["command"] = "rank";
            inputs["ring"] = ring_path;
            const auto ring = detail::load_ring(ring_path);
            moduli::RankEngine eng(ring);
            Integer r;
            if (!graph_path.empty()) {
                inputs["graph"] = graph_path;
                moduli::DualGraph g;
                try {
                    g = moduli::graph_from_json(detail::read_json_file(graph_path), ring);
                } catch (const moduli::GraphError& e) {
                    throw InputError(graph_path + ": " + e.what());
                }
                r = eng.dual_graph(g);
            } else {
                inputs["genus"] = genus;
                inputs["legs"] = legs_str;
                r = eng.closed_form(moduli::RankQuery{genus, detail::parse_legs(legs_str, ring), !no_vacuum});
            }
            result = r.get_str();
            text << r.get_str() << "\n";
        } else if (*decomp) {
            report["command"] = "decomp-check";
            inputs["ring"] = ring_path;
            inputs["genus"] = genus;
            inputs["legs"] = legs_str;
            const auto ring = detail::load_ring(ring_path);
            const auto rep = moduli::decomposition_invariance(ring, genus, detail::parse_legs(legs_str, ring));
            json values = json::array();
            for (const auto& v : rep.values) values.push_back(v.get_str());
            result = {{"graphs", rep.graphs}, {"closed_form", rep.closed_form.get_str()}, {"values", values},
                      {"consistent", rep.consistent()}};
            if (rep.consistent()) {
                text << rep.graphs << " trivalent graphs, all give " << rep.closed_form.get_str() << "\n";
            } else {
                const size_t i = *rep.first_discrepancy;
                residuals.push_back({{"graph", i}, {"value", rep.values[i].get_str()}});
                text << "discrepancy: graph " << i << " gives " << rep.values[i].get_str() << ", closed form "
                     << rep.closed_form.get_str() << "\n";
                status = 1;
            }
        } else if (*series) {
            inputs["order"] = cfg.q_order;
            const Window win = have_window ? Window{z_lo, z_hi} : Window{-std::max(m, cfg.z_window), cfg.z_window};
            auto emit = [&](const ZLaurent& f) {
                result = detail::laurent_json(f);
                detail::print_laurent(text, f);
            };
            if (*s_eis) {
                report["command"] = "series eisenstein";
                inputs["k"] = k;
                if (k < 1) throw std::invalid_argument("eisenstein: k must be >= 1");
                emit(detail::as_laurent(elliptic::eisenstein(k, cfg.q_order)));
            } else if (*s_wp) {
                report["command"] = "series wp";
                inputs["m"] = m;
                emit(elliptic::wp_expansion(m, cfg.q_order, win));
            } else if (*s_p) {
                report["command"] = "series p";
                inputs["m"] = m;
                emit(elliptic::p_series(m, cfg.q_order, win));
            } else if (*s_pexp) {
                report["command"] = "series pexp";
                inputs["m"] = m;
                emit(elliptic::p_series_exp(m, cfg.q_order, cfg.z_window));
            } else if (*s_lemma) {
                report["command"] = "series check-lemma";
                inputs["m"] = m;
                inputs["z_order"] = cfg.z_window;
                const auto res = elliptic::p_wp_lemma_check(m, cfg.q_order, cfg.z_window);
                for (const auto& r : res) {
                    residuals.push_back({{"q_power", to_string(r.q_power)}, {"z_power", r.z_power}, {"u_power", r.u_power},
                                         {"value", to_string(r.value)}});
                    text << "residual q^" << to_string(r.q_power) << " z^" << r.z_power << " u^" << r.u_power << " : "
                         << to_string(r.value) << "\n";
                }
                result = res.empty();
                if (res.empty()) text << "P_" << m << " lemma holds through q^" << cfg.q_order << ", z^" << cfg.z_window << "\n";
                status = res.empty() ? 0 : 1;
            } else if (*s_res) {
                report["command"] = "series residue";
                inputs["wt"] = wt;
                inputs["m"] = m;
                const auto tri = elliptic::residue_identities(wt, m, cfg.q_order);
                const std::array<QSeries, 3> expect{
                    QSeries::constant(1, cfg.q_order), QSeries::constant(ExactScalar::monomial(1, make_rational(-1, 2)), cfg.q_order),
                    (m + 1) % 2 == 0 ? elliptic::eisenstein((m + 1) / 2, cfg.q_order) : QSeries::zero(cfg.q_order)};
                result = json::array();
                for (int i = 0; i < 3; ++i) {
                    result.push_back(detail::laurent_json(detail::as_laurent(tri[i])));
                    text << "identity " << i + 1 << ":\n";
                    detail::print_laurent(text, detail::as_laurent(tri[i]));
                    const QSeries d = tri[i] - expect[i];
                    if (auto bad = zhu::first_nonzero(d)) {
                        residuals.push_back({{"identity", i + 1}, {"q_power", to_string(bad->q_power)}, {"value", detail::scalar_json(bad->value)}});
                        status = 1;
                    }
                }
                text << (status == 0 ? "matches (1, -u/2, G_{m+1})\n" : "MISMATCH\n");
            }
        } else if (*zhu) {
            report["command"] = "zhu-check";
            inputs = {{"identity", identity}, {"deg_max", cfg.deg_max}, {"q_order", cfg.q_order}};
            std::vector<int> ms{0};
            if (identity == "am") ms = m_given ? std::vector<int>{m} : std::vector<int>{2, 3, 4};
            if (identity == "block") ms = m_given ? std::vector<int>{m} : std::vector<int>{0, 2, 3, 4};
            if (identity == "am" || identity == "block") inputs["m"] = ms;
            voa::FockBackend backend;
            zhu::TraceEngine<voa::FockBackend> engine(backend);
            std::vector<voa::Partition> states;
            for (int d = 0; d <= cfg.deg_max; ++d)
                for (auto& p : voa::partitions(d)) states.push_back(p);
            size_t checked = 0, failed = 0;
            for (int mm : ms)
                for (const auto& pa : states)
                    for (const auto& pv : states) {
                        const voa::Vector a = backend.state(pa), v = backend.state(pv);
                        ++checked;
                        std::string bad;
                        json bad_json;
                        if (identity == "sumformula") {
                            const auto res = engine.check_sum_formula(a, v, cfg.q_order, {-cfg.z_window, cfg.z_window});
                            if (!res.empty()) {
                                const auto& [basis, series] = *res.begin();
                                const auto terms = series.nonzero_terms();
                                const auto c = zhu::first_nonzero(terms.front().second);
                                bad = "[" + voa::to_string(basis) + "] t^" + std::to_string(terms.front().first) + " q^" +
                                      to_string(c->q_power) + " " + c->value.str();
                                bad_json = {{"basis", voa::to_string(basis)}, {"t_power", terms.front().first},
                                            {"q_power", to_string(c->q_power)}, {"value", detail::scalar_json(c->value)}};
                            }
                        } else {
                            QSeries r;
                            if (identity == "a0") r = engine.check_a0(a, v, cfg.q_order);
                            else if (identity == "am") r = engine.check_am(a, v, mm, cfg.q_order);
                            else if (identity == "aminus1") r = engine.check_aminus1(a, v, cfg.q_order);
                            else r = engine.conformal_block_annihilation(a, v, mm, cfg.q_order);
                            if (auto c = zhu::first_nonzero(r)) {
                                bad = "q^" + to_string(c->q_power) + " " + c->value.str();
                                bad_json = {{"q_power", to_string(c->q_power)}, {"value", detail::scalar_json(c->value)}};
                            }
                        }
                        if (!bad.empty()) {
                            ++failed;
                            text << identity << ", " << voa::to_string(pa) << ", " << voa::to_string(pv) << ", " << mm << ", "
                                 << bad << "\n";
                            residuals.push_back({{"identity", identity}, {"a", voa::to_string(pa)}, {"v", voa::to_string(pv)},
                                                 {"m", mm}, {"first_bad", bad_json}});
                        }
                    }
            result = {{"checked", checked}, {"failed", failed}};
            text << identity << ": " << checked << " checks, " << failed << " nonzero residuals\n";
            status = failed == 0 ? 0 : 1;
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const fusion::LabelError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    const double ms_elapsed = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    if (cfg.format == Format::json) {
        report["inputs"] = inputs;
        report["result"] = result;
        report["residuals"] = residuals;
        report["runtime-ms"] = ms_elapsed;
        report["status"] = status;
        out << report.dump(1) << "\n";
    } else {
        out << text.str();
    }
    return status;
}

} // namespace fb::cli
