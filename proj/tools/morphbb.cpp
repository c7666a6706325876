#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bga.hpp"
#include "bposd.hpp"
#include "experiments.hpp"
#include "layout.hpp"
#include "morph.hpp"
#include "specs.hpp"
#include "surgery.hpp"
#include "util.hpp"

using namespace morphbb;

namespace {

struct GlobalOpts {
    uint64_t seed = 0;
    int threads = 0;
    std::string out;
    std::string argv_line;
};

// Artifacts start with a resolved-config header; wall-clock timestamps go to a
// sidecar log next to the output file.
void write_artifact(const GlobalOpts& g, const std::string& path, const std::string& body,
                    const std::string& comment_prefix = "# ") {
    std::string header = comment_prefix + "cmd: " + g.argv_line + "\n" + comment_prefix +
                         "seed: " + std::to_string(g.seed) + " threads: " +
                         std::to_string(resolve_thread_count(g.threads)) + "\n";
    if (path.empty() || path == "-") {
        std::cout << header << body;
        return;
    }
    std::ofstream f(path);
    if (!f) throw error("cannot write " + path);
    f << header << body;
    std::ofstream log(path + ".log", std::ios::app);
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    log << buf << " wrote " << path << "\n";
}

Homomorphism hom_by_name(const Group& g, const std::string& name) {
    for (const auto& h : find_homomorphisms(g))
        if (h.name(g) == name) return h;
    throw criterion_failure("homomorphism '" + name + "' does not exist for this group");
}

std::vector<Homomorphism> criterion1_homs(const BgaCode& code) {
    std::vector<Homomorphism> out;
    for (const auto& h : find_homomorphisms(code.group)) {
        try {
            contracting_sets(code, h);
            out.push_back(h);
        } catch (const criterion_failure&) {
        }
    }
    return out;
}

std::string hom_list_string(const BgaCode& code) {
    std::string s;
    for (const auto& h : criterion1_homs(code)) {
        if (!s.empty()) s += " ";
        s += h.name(code.group);
    }
    return s.empty() ? "none" : s;
}

std::string params_string(std::size_t n, std::size_t k, const std::string& d = "") {
    std::string s = "[[" + std::to_string(n) + "," + std::to_string(k);
    if (!d.empty()) s += "," + d;
    return s + "]]";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"morphbb: morphing parity-check circuits for bivariate bicycle codes"};
    app.require_subcommand(1);

    GlobalOpts g;
    for (int i = 0; i < argc; i++) {
        if (i) g.argv_line += " ";
        g.argv_line += argv[i];
    }
    app.add_option("--seed", g.seed, "master RNG seed");
    app.add_option("--threads", g.threads, "worker count (0 = MORPHBB_THREADS or hardware)");
    app.add_option("--out", g.out, "output file (default: stdout)");

    std::string code_name, hom_name, variant_name_s = "standard", kind_s = "z_memory";
    std::string circuit_path, config_path, results_path, logical_json, side = "both";
    int rounds = 2, max_weight = 6, upper_trials = 10000, link_r = 3, logical_index = 0;
    double noise_p = 0.0;
    std::size_t shots = 10000;
    bool noiseless = false, emit_spec = false, as_detector = false, with_dcirc = false;
    std::string codes_filter = "all";

    auto add_code_opt = [&](CLI::App* sub, bool required = true) {
        auto* o = sub->add_option("--code", code_name, "builtin code name or JSON spec path");
        if (required) o->required();
    };
    auto add_hom_opt = [&](CLI::App* sub, bool required = true) {
        auto* o = sub->add_option("--hom", hom_name, "homomorphism (f_x, f_y, f_xy)");
        if (required) o->required();
    };
    auto add_variant_opt = [&](CLI::App* sub) {
        sub->add_option("--variant", variant_name_s,
                        "standard | reverse_round3 | reverse_round2");
    };

    CLI::App* c_build = app.add_subcommand("build", "construct a code and print its parameters");
    add_code_opt(c_build);

    CLI::App* c_homs = app.add_subcommand("homs", "list homomorphisms satisfying the criterion");
    add_code_opt(c_homs);

    CLI::App* c_protocol = app.add_subcommand("protocol", "write the morphing protocol summary");
    add_code_opt(c_protocol);
    add_hom_opt(c_protocol);
    add_variant_opt(c_protocol);

    CLI::App* c_verify = app.add_subcommand("verify", "validate the contraction circuits");
    add_code_opt(c_verify);
    add_hom_opt(c_verify);
    add_variant_opt(c_verify);

    CLI::App* c_endcycle = app.add_subcommand("endcycle", "derive the end-cycle code");
    add_code_opt(c_endcycle);
    add_hom_opt(c_endcycle);
    add_variant_opt(c_endcycle);
    c_endcycle->add_flag("--emit-spec", emit_spec, "write the end-cycle code as a JSON spec");
    c_endcycle->add_option("--dexact", max_weight, "exact distance search cutoff (0 = skip)");

    CLI::App* c_distance = app.add_subcommand("distance", "code distance tools");
    add_code_opt(c_distance);
    c_distance->add_option("--exact", max_weight, "exact search cutoff (0 = skip)");
    c_distance->add_option("--upper-trials", upper_trials, "randomized upper-bound trials");

    CLI::App* c_layout = app.add_subcommand("layout", "connectivity, biplanarity, toric+ layout");
    add_code_opt(c_layout);
    add_hom_opt(c_layout);
    add_variant_opt(c_layout);

    CLI::App* c_circuit = app.add_subcommand("circuit", "emit a circuit in text format");
    add_code_opt(c_circuit);
    add_hom_opt(c_circuit);
    add_variant_opt(c_circuit);
    c_circuit->add_option("--kind", kind_s, "round | z_memory | x_memory | bell_memory");
    c_circuit->add_option("--rounds", rounds, "QEC rounds");
    c_circuit->add_option("--p", noise_p, "uniform depolarizing strength");
    c_circuit->add_flag("--noiseless", noiseless, "omit noise channels");
    c_circuit->add_flag("--logical-as-detector", as_detector,
                        "emit the chosen logical as a detector (z/x memory)");
    c_circuit->add_option("--logical", logical_index, "chosen logical index (-1 = all)");

    CLI::App* c_dem = app.add_subcommand("dem", "detector error model of a circuit");
    c_dem->add_option("--circuit", circuit_path, "circuit text file")->required();

    CLI::App* c_dcirc = app.add_subcommand("dcirc", "circuit-level distance upper bound");
    add_code_opt(c_dcirc);
    add_hom_opt(c_dcirc);
    add_variant_opt(c_dcirc);
    c_dcirc->add_option("--side", side, "X | Z | both");

    CLI::App* c_sim = app.add_subcommand("simulate", "logical error rate via BP-OSD");
    add_code_opt(c_sim);
    add_hom_opt(c_sim);
    add_variant_opt(c_sim);
    c_sim->add_option("--kind", kind_s, "z_memory | x_memory | bell_memory");
    c_sim->add_option("--rounds", rounds, "QEC rounds");
    c_sim->add_option("--p", noise_p, "physical error rate")->required();
    c_sim->add_option("--shots", shots, "Monte Carlo shots");
    c_sim->add_option("--config", config_path, "decoder config file (key=value)");

    CLI::App* c_surgery = app.add_subcommand("surgery", "lattice-surgery construction and checks");
    add_code_opt(c_surgery);
    add_hom_opt(c_surgery);
    c_surgery->add_option("--logical", logical_json, "measured X logical as JSON {\"P\":[..],\"Q\":[..]}");
    c_surgery->add_option("--r", link_r, "repetition length of the linking code");

    CLI::App* c_table1 = app.add_subcommand("table1", "reproduce the code-parameter table");
    c_table1->add_option("--codes", codes_filter, "'all' or comma-separated builtin names");

    CLI::App* c_table7 = app.add_subcommand("table7", "round-2-reversal code parameters");
    c_table7->add_flag("--dcirc", with_dcirc, "also probe the circuit-level distance");

    CLI::App* c_plot = app.add_subcommand("plotdata", "split a results CSV into per-code data files");
    c_plot->add_option("--results", results_path, "results CSV from simulate")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        unsigned threads = resolve_thread_count(g.threads);
        auto load = [&]() { return load_code(code_name); };
        auto protocol = [&]() {
            BgaCode c = load();
            return build_protocol(c, hom_by_name(c.group, hom_name), parse_variant(variant_name_s));
        };

        if (c_build->parsed()) {
            BgaCode c = load();
            TannerDegrees t = tanner_degrees(c);
            std::ostringstream out;
            out << "code: " << params_string(c.n, c.k) << "\n";
            out << "check weights: " << t.x_check_weights[0] << " (X), " << t.z_check_weights[0]
                << " (Z); qubit degree: " << t.qubit_degrees[0] << "\n";
            out << "homomorphisms: " << hom_list_string(c) << "\n";
            write_artifact(g, g.out, out.str());
        } else if (c_homs->parsed()) {
            BgaCode c = load();
            std::ostringstream out;
            for (const auto& h : find_homomorphisms(c.group)) {
                out << h.name(c.group) << ": ";
                try {
                    ContractingSets s = contracting_sets(c, h);
                    out << "criterion holds, a1=" << c.group.element_name(s.a1)
                        << " b1=" << c.group.element_name(s.b1) << "\n";
                } catch (const criterion_failure& e) {
                    out << "criterion fails (" << e.what() << ")\n";
                }
            }
            if (find_homomorphisms(c.group).empty()) out << "none\n";
            write_artifact(g, g.out, out.str());
        } else if (c_protocol->parsed()) {
            write_artifact(g, g.out, protocol().summary_json() + "\n", "// ");
        } else if (c_verify->parsed()) {
            MorphingProtocol p = protocol();
            VerifyReport rep = verify_contraction(p);
            ConnectivityGraph graph = connectivity_graph(p);
            Circuit round = qec_round_circuit(p, 1, std::nullopt);
            std::ostringstream out;
            if (!rep.ok) {
                out << "contraction INVALID: " << rep.detail << "\n";
                write_artifact(g, g.out, out.str());
                return 1;
            }
            bool mid = midpoint_matches_mid_cycle(p, 1) && midpoint_matches_mid_cycle(p, 2);
            out << "contraction valid; depth " << round.cx_layer_count() << "; degree "
                << graph.max_degree << "\n";
            out << "midpoint code matches the mid-cycle code: " << (mid ? "yes" : "NO") << "\n";
            write_artifact(g, g.out, out.str());
            if (!mid) return 1;
        } else if (c_endcycle->parsed()) {
            MorphingProtocol p = protocol();
            EndCycleCode e = end_cycle_code(p, 1);
            std::ostringstream out;
            std::string dstr;
            if (max_weight > 0) {
                auto d = distance_exact_css(e.css(), max_weight,
                                            static_cast<long>(e.kdec.sub.order));
                dstr = d ? std::to_string(*d) : (">" + std::to_string(max_weight));
            }
            out << "end-cycle code: " << params_string(e.n_tilde, e.k_tilde, dstr) << "\n";
            if (e.has_2bga) {
                out << "as 2BGA over kernel subgroup with orders [";
                for (std::size_t i = 0; i < e.kdec.sub.orders.size(); i++)
                    out << (i ? "," : "") << e.kdec.sub.orders[i];
                out << "]\nA~ = {";
                bool first = true;
                for (const auto& s : e.kdec.sub.subset_names(e.a_tilde)) {
                    out << (first ? "" : ", ") << s;
                    first = false;
                }
                out << "}\nB~ = {";
                first = true;
                for (const auto& s : e.kdec.sub.subset_names(e.b_tilde)) {
                    out << (first ? "" : ", ") << s;
                    first = false;
                }
                out << "}\n";
                if (emit_spec) {
                    write_artifact(g, g.out, code_to_json(e.rebuilt) + "\n", "");
                    return 0;
                }
            }
            write_artifact(g, g.out, out.str());
        } else if (c_distance->parsed()) {
            BgaCode c = load();
            std::ostringstream out;
            if (max_weight > 0) {
                auto d = distance_exact(c, max_weight);
                out << "exact: " << (d ? std::to_string(*d) : ("> " + std::to_string(max_weight)))
                    << "\n";
            }
            if (upper_trials > 0)
                out << "upper bound (" << upper_trials
                    << " trials): " << distance_upper(c, upper_trials, g.seed) << "\n";
            write_artifact(g, g.out, out.str());
        } else if (c_layout->parsed()) {
            MorphingProtocol p = protocol();
            ConnectivityGraph graph = connectivity_graph(p);
            std::ostringstream out;
            out << "vertices: " << graph.n_vertices << ", edges: " << graph.edges.size()
                << ", max degree: " << graph.max_degree << ", bipartite: yes\n";
            BiplanarPartition part = biplanar_partition(graph, p);
            out << "biplanar partition: E1 " << (part.e1_planar ? "planar" : "NOT planar")
                << ", E2 " << (part.e2_planar ? "planar" : "NOT planar")
                << ", wheel structure: " << (part.wheel_ok ? "yes" : "no") << "\n";
            auto lay = toric_plus_layout(p);
            if (lay)
                out << "toric+ layout: lambda=" << lay->lambda << " mu=" << lay->mu << " g1="
                    << p.code.group.element_name(lay->g1)
                    << " g2=" << p.code.group.element_name(lay->g2) << "\n";
            else
                out << "toric+ layout: none found\n";
            if (!g.out.empty()) {
                std::ofstream dot(g.out + ".dot");
                dot << graph_to_dot(graph, p);
                std::ofstream csv(g.out + ".csv");
                csv << graph_to_csv(graph, p, &part);
                out << "wrote " << g.out << ".dot and " << g.out << ".csv\n";
            }
            write_artifact(g, g.out, out.str());
            if (!part.ok()) return 1;
        } else if (c_circuit->parsed()) {
            MorphingProtocol p = protocol();
            std::optional<NoiseParams> noise;
            if (!noiseless && noise_p > 0) noise = NoiseParams{noise_p};
            Circuit c;
            if (kind_s == "round") c = qec_round_circuit(p, 1, noise);
            else c = memory_experiment(p, parse_memory_kind(kind_s), rounds, noise, as_detector,
                                       logical_index);
            write_artifact(g, g.out, c.to_text(), "# ");
        } else if (c_dem->parsed()) {
            std::ifstream in(circuit_path);
            if (!in) throw error("cannot open " + circuit_path);
            std::stringstream ss;
            ss << in.rdbuf();
            Circuit c = Circuit::from_text(ss.str());
            DetectorErrorModel dem = enumerate_faults_dem(c, threads);
            write_artifact(g, g.out, dem.to_text());
        } else if (c_dcirc->parsed()) {
            MorphingProtocol p = protocol();
            std::ostringstream out;
            int best = INT32_MAX;
            for (char s : std::string(side == "both" ? "ZX" : side)) {
                CircuitDistanceResult res = circuit_distance_upper(p, s, nullptr, threads);
                out << s << " side: <= " << res.bound << " (per logical:";
                for (int v : res.per_logical) out << " " << v;
                out << ")\n";
                best = std::min(best, res.bound);
            }
            out << "circuit-level distance: <= " << best << "\n";
            write_artifact(g, g.out, out.str());
        } else if (c_sim->parsed()) {
            MorphingProtocol p = protocol();
            DecoderConfig cfg;
            cfg.bp_method = BpMethod::minimum_sum;
            cfg.max_iterations = 10000;
            cfg.osd_method = OsdMethod::osd_cs;
            cfg.osd_order = 20;
            if (!config_path.empty()) cfg = DecoderConfig::from_file(config_path);
            LogicalErrorResult res = logical_error_rate(p, parse_memory_kind(kind_s), rounds,
                                                        noise_p, shots, cfg, g.seed, threads);
            std::ostringstream out;
            out << "protocol,kind,p,rounds,shots,failures,rate,ci_low,ci_high,seed\n";
            out << code_name << ":" << hom_name << ":" << variant_name_s << "," << kind_s << ","
                << noise_p << "," << rounds << "," << res.shots << "," << res.failures << ","
                << res.rate << "," << res.ci_low << "," << res.ci_high << "," << g.seed << "\n";
            write_artifact(g, g.out, out.str());
        } else if (c_surgery->parsed()) {
            BgaCode c = load();
            MorphingProtocol p = build_protocol(c, hom_by_name(c.group, hom_name),
                                                Variant::standard);
            PauliOperator op = [&]() {
                if (logical_json.empty()) {
                    // default to a light logical satisfying the support criterion
                    LogicalBasis basis = logical_basis(c);
                    for (const auto& x : basis.x)
                        if (check_logical_support_criterion(p, x).ok()) return x;
                    throw criterion_failure("no basis logical satisfies the support criterion");
                }
                nlohmann::json j = nlohmann::json::parse(logical_json);
                return PauliOperator::x_op(
                    c.group.parse_subset(j.at("P").get<std::vector<std::string>>()),
                    c.group.parse_subset(j.at("Q").get<std::vector<std::string>>()));
            }();
            LogicalSupportReport crit = check_logical_support_criterion(p, op);
            std::ostringstream out;
            out << "support criterion: " << (crit.ok() ? "pass" : "FAIL") << "\n";
            if (!crit.ok()) {
                write_artifact(g, g.out, out.str());
                return 1;
            }
            LinkingCode link = build_linking_code(p, op, link_r);
            MergedCode merged = build_merged_code(p, link);
            SurgeryProtocol sp = build_surgery_protocol(p, link, merged);
            out << "linking code: " << link.lay.total - link.lay.n_bb << " qubits, |H|="
                << link.H.popcount() << ", |H~|=" << link.Htilde.popcount() << "\n";
            ScheduleOutcome sched = run_surgery_schedule(sp, false);
            out << "noiseless schedule: "
                << (sched.consistent() ? "consistent" : "INCONSISTENT") << ", inferred XX = "
                << (sched.inferred_value ? "-1" : "+1") << "\n";
            out << "merged contraction spread factor: "
                << std::max(merged_distance_bound_factor(sp, 1), merged_distance_bound_factor(sp, 2))
                << "\n";
            write_artifact(g, g.out, out.str());
            if (!sched.consistent()) return 1;
        } else if (c_table1->parsed()) {
            std::vector<std::string> names;
            if (codes_filter == "all")
                names = {"bb72", "bb90", "bb108", "bb144", "bb288", "bb360", "bb756"};
            else {
                std::stringstream ss(codes_filter);
                std::string item;
                while (std::getline(ss, item, ',')) names.push_back(item);
            }
            std::ostringstream out;
            out << "code,n,k,homomorphisms,end_n,end_k\n";
            for (const auto& name : names) {
                BgaCode c = builtin_code(name);
                out << name << "," << c.n << "," << c.k << "," << hom_list_string(c);
                auto homs = criterion1_homs(c);
                if (homs.empty()) {
                    out << ",,\n";
                } else {
                    MorphingProtocol p = build_protocol(c, homs.back(), Variant::standard);
                    EndCycleCode e = end_cycle_code(p, 1);
                    out << "," << e.n_tilde << "," << e.k_tilde << "\n";
                }
            }
            write_artifact(g, g.out, out.str());
        } else if (c_table7->parsed()) {
            std::ostringstream out;
            out << "code,A,B,hom,end_n,end_k" << (with_dcirc ? ",dcirc" : "") << "\n";
            for (const auto& inst : round2_reversal_instances()) {
                BgaCode base = builtin_code(inst.code_name);
                BgaCode c = build_code_named(base.group.orders, inst.A, inst.B);
                MorphingProtocol p = build_protocol(c, hom_by_name(c.group, inst.hom),
                                                    Variant::reverse_round2);
                EndCycleCode e = end_cycle_code(p, 1);
                out << inst.code_name << ",";
                for (std::size_t i = 0; i < inst.A.size(); i++) out << (i ? " " : "") << inst.A[i];
                out << ",";
                for (std::size_t i = 0; i < inst.B.size(); i++) out << (i ? " " : "") << inst.B[i];
                out << "," << inst.hom << "," << e.n_tilde << "," << e.k_tilde;
                if (with_dcirc) out << "," << circuit_distance_upper_both(p, nullptr, threads);
                out << "\n";
            }
            write_artifact(g, g.out, out.str());
        } else if (c_plot->parsed()) {
            std::ifstream in(results_path);
            if (!in) throw parse_error("cannot open " + results_path);
            std::string line;
            if (!std::getline(in, line) || line.rfind("protocol,", 0) != 0)
                throw parse_error("results CSV must start with the protocol header");
            std::map<std::string, std::string> per_code;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                std::stringstream ss(line);
                std::vector<std::string> cols;
                std::string col;
                while (std::getline(ss, col, ',')) cols.push_back(col);
                if (cols.size() < 10) throw parse_error("malformed results row: " + line);
                per_code[cols[0]] += cols[2] + " " + cols[6] + " " + cols[7] + " " + cols[8] + "\n";
            }
            std::string base = g.out.empty() ? "plot" : g.out;
            std::ostringstream out;
            for (auto& [code, body] : per_code) {
                std::string fname = base + "." + code + ".dat";
                for (auto& ch : fname)
                    if (ch == ':' || ch == '/') ch = '_';
                std::ofstream f(fname);
                f << "# p rate ci_low ci_high\n" << body;
                out << "wrote " << fname << "\n";
            }
            write_artifact(g, g.out.empty() ? "-" : g.out + ".plotlog", out.str());
        }
        return 0;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
