#include <netflow/cli.hpp>

#include <netflow/diagnostics.hpp>
#include <netflow/expander.hpp>
#include <netflow/flow.hpp>
#include <netflow/gluing.hpp>
#include <netflow/manifest.hpp>
#include <netflow/network.hpp>
#include <netflow/network_io.hpp>
#include <netflow/shapes.hpp>
#include <netflow/svg.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace netflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ------------------------------------------------------------ config files

// Expands `--config file` into explicit long options placed before the
// command-line ones; with every option taking the last occurrence this gives
// explicit flags precedence over the file.
std::vector<std::string> config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NetworkError("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    std::vector<std::string> args;
    auto push = [&](const std::string& key, const std::string& value) {
        const std::string name = key.rfind("--", 0) == 0 ? key : "--" + key;
        args.push_back(name + "=" + value);
    };
    if (first != std::string::npos && text[first] == '{') {
        json j = json::parse(text);
        if (!j.is_object()) throw NetworkError("config JSON must be an object");
        for (const auto& [key, value] : j.items()) {
            if (value.is_string())
                push(key, value.get<std::string>());
            else if (value.is_array()) {
                std::string joined;
                for (const auto& item : value) {
                    if (!joined.empty()) joined += ',';
                    joined += item.is_string() ? item.get<std::string>()
                                               : item.dump();
                }
                push(key, joined);
            } else
                push(key, value.dump());
        }
        return args;
    }
    std::istringstream lines(text);
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(lines, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw NetworkError("config line is not key=value: " + line);
        push(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return args;
}

// ------------------------------------------------------------ output helper

struct OutDir {
    fs::path dir;
    std::vector<std::string> files;
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    RunManifest manifest;

    explicit OutDir(const std::string& d, std::string command) : dir(d) {
        fs::create_directories(dir);
        manifest.command = std::move(command);
    }
    std::string path(const std::string& name) {
        files.push_back(name);
        return (dir / name).string();
    }
    void set(const std::string& key, const std::string& value) {
        manifest.config[key] = value;
    }
    void set(const std::string& key, double value) {
        manifest.config[key] = format_double(value);
    }
    void finish() {
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        for (const auto& f : files)
            manifest.outputs.push_back({f, hash_file((dir / f).string())});
        write_manifest(manifest, (dir / "run_manifest.json").string());
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NetworkError("cannot open " + path + " for writing");
    out << text;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : traj.rows)
        rows.push_back({format_double(r.t), format_double(r.total_length),
                        format_double(r.sup_k),
                        format_double(r.min_segment_length),
                        format_double(r.junction_defect_max), r.event});
    write_csv(path,
              {"t", "total_length", "sup_k", "min_segment_length",
               "junction_defect_max", "event"},
              rows);
}

json validation_json(const ValidationReport& rep) {
    json j;
    j["regular"] = rep.regular;
    j["max_triple_defect"] = rep.max_triple_defect;
    j["min_segment_length"] = rep.min_segment_length;
    j["min_marker_spacing"] = rep.min_marker_spacing;
    j["length_ratio_bound"] = rep.length_ratio_bound;
    j["embedding_violations"] = rep.embedding_violations;
    j["junctions"] = json::array();
    for (const auto& jr : rep.junctions)
        j["junctions"].push_back({{"vertex", jr.vertex_id},
                                  {"valence", jr.valence},
                                  {"defect", jr.defect}});
    return j;
}

json solution_json(const ExpanderSolution& sol, const DecayReport& decay) {
    json j;
    j["converged"] = sol.converged;
    j["ray_angles"] = sol.ray_angles;
    j["shoot_residual"] = sol.shoot_residual;
    j["residual_sup"] = sol.residual_sup;
    j["junctions"] = json::array();
    for (const auto& p : sol.junctions) j["junctions"].push_back({p.x, p.y});
    j["frame_angles"] = sol.frame_angles;
    j["multistart"] = json::array();
    for (const auto& m : sol.multistart)
        j["multistart"].push_back({{"seed", m.seed},
                                   {"converged", m.converged},
                                   {"residual", m.residual},
                                   {"junction", {m.junction.x, m.junction.y}},
                                   {"frame_angle", m.frame_angle},
                                   {"iterations", m.iterations}});
    j["decay"] = json::array();
    for (const auto& b : decay.branches)
        j["decay"].push_back({{"C_u", b.C_u},
                              {"C_up", b.C_up},
                              {"C_upp", b.C_upp},
                              {"fit_lo", b.fit_lo},
                              {"fit_hi", b.fit_hi},
                              {"monotone_tail", b.monotone_tail},
                              {"straight", b.straight}});
    j["r0"] = decay.r0;
    return j;
}

json hypotheses_json(const HypothesisReport& h) {
    return json{{"length_ratio", h.length_ratio},
                {"theta_beta_growth", h.theta_beta_growth},
                {"graph_height_const", h.graph_height_const},
                {"graph_slope_const", h.graph_slope_const},
                {"expander_distance_B2", h.expander_distance[0]},
                {"expander_distance_B4", h.expander_distance[1]},
                {"expander_distance_B8", h.expander_distance[2]}};
}

json glue_json(const GlueReport& g) {
    return json{{"s", g.s},
                {"scale", g.scale},
                {"splice_inner", g.splice_inner},
                {"splice_outer", g.splice_outer},
                {"max_angle_mismatch", g.max_angle_mismatch},
                {"r0", g.r0},
                {"asymptotic_regime", g.asymptotic_regime},
                {"core_markers", g.core_markers},
                {"splice_height_const", g.splice_height_const},
                {"splice_slope_const", g.splice_slope_const}};
}

bool newton_failed(const Trajectory& traj) {
    for (const auto& ev : traj.events)
        if (ev.kind == EventKind::NewtonFailure) return true;
    return false;
}

// Solves the expander for a seed junction's cone, trying both non-crossing
// pairings in the four-ray case; returns the first converged solution.
ExpanderSolution solve_for_cone(const ConeData& cone, const ShootOpts& opts) {
    const auto angles = cone.angles();
    if (angles.size() == 3) return solve_triod_expander(angles, opts);
    if (angles.size() == 4) {
        auto a = solve_tree_expander(angles, {0, 1, 2, 3}, opts);
        if (a.converged) return a;
        return solve_tree_expander(angles, {1, 2, 3, 0}, opts);
    }
    throw NetworkError("expander gluing supports 3- and 4-ray junctions");
}

}  // namespace

int run_cli(int argc, char** argv) {
    // Expand --config <file> before regular parsing.
    std::vector<std::string> raw;
    for (int i = 1; i < argc; ++i) raw.emplace_back(argv[i]);
    std::vector<std::string> expanded;
    try {
        std::string config_path;
        std::vector<std::string> rest;
        for (size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == "--config" && i + 1 < raw.size()) {
                config_path = raw[++i];
            } else if (raw[i].rfind("--config=", 0) == 0) {
                config_path = raw[i].substr(9);
            } else {
                rest.push_back(raw[i]);
            }
        }
        if (!config_path.empty()) {
            const auto injected = config_args(config_path);
            if (!rest.empty()) {
                expanded.push_back(rest.front());  // subcommand name first
                expanded.insert(expanded.end(), injected.begin(), injected.end());
                expanded.insert(expanded.end(), rest.begin() + 1, rest.end());
            } else {
                expanded = injected;
            }
        } else {
            expanded = rest;
        }
    } catch (const NetworkError& e) {
        std::cerr << "netlab: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "netlab: bad config: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"curvature-flow laboratory for planar networks"};
    app.set_version_flag("--version", "netlab 0.1.0");
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help and exit");
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string command_line = "netlab";
    for (const auto& a : raw) command_line += " " + a;

    int rc = 0;

    // ---------------------------------------------------------- validate
    struct {
        std::string net, out_dir = ".";
        double angle_tol = 1e-6;
    } va;
    auto* validate_cmd = app.add_subcommand("validate", "check a network file");
    validate_cmd->set_help_flag("--help");
    validate_cmd->add_option("--net,net", va.net, "network JSON")->required();
    validate_cmd->add_option("--angle-tol", va.angle_tol, "junction balance tolerance");
    validate_cmd->add_option("--out-dir", va.out_dir, "output directory");
    validate_cmd->callback([&] {
        OutDir out(va.out_dir, command_line);
        out.set("net", va.net);
        out.set("angle_tol", va.angle_tol);
        const Network net = load_network(va.net);
        const auto rep = validate(net, va.angle_tol);
        const json j = validation_json(rep);
        write_text(out.path("validate.json"), j.dump(1) + "\n");
        out.finish();
        std::cout << j.dump(1) << "\n";
    });

    // ------------------------------------------------------------ evolve
    struct {
        std::string net, out_dir = ".";
        double T = 0.1, h = 0.0, cfl = 0.25, domain_radius = 0.0;
        std::string scheme = "explicit";
        std::vector<int> free_endpoints;
    } ev;
    auto* evolve_cmd = app.add_subcommand("evolve", "run the curvature flow");
    evolve_cmd->set_help_flag("--help");
    evolve_cmd->add_option("--net,net", ev.net, "network JSON")->required();
    evolve_cmd->add_option("--T", ev.T, "final time")->required();
    evolve_cmd->add_option("--h", ev.h, "resample spacing (0: keep markers)");
    evolve_cmd->add_option("--cfl", ev.cfl, "time step safety factor");
    evolve_cmd->add_option("--scheme", ev.scheme, "explicit | semi-implicit")
        ->check(CLI::IsMember({"explicit", "semi-implicit"}));
    evolve_cmd->add_option("--domain-radius", ev.domain_radius,
                           "emit boundary-exit outside this radius");
    evolve_cmd->add_option("--free-endpoints", ev.free_endpoints,
                           "endpoint vertex ids moving by curvature")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    evolve_cmd->add_option("--out-dir", ev.out_dir, "output directory");
    evolve_cmd->callback([&] {
        OutDir out(ev.out_dir, command_line);
        out.set("net", ev.net);
        out.set("T", ev.T);
        out.set("h", ev.h);
        out.set("cfl", ev.cfl);
        out.set("scheme", ev.scheme);
        Network net = load_network(ev.net);
        if (ev.h > 0.0) {
            net = resample(net, ev.h);
            for (const auto& v : net.vertices)
                if (v.kind == VertexKind::Triple) junction_solve(net, v.id);
        }
        FlowState state;
        state.net = std::move(net);
        state.controls.cfl = ev.cfl;
        state.controls.scheme = ev.scheme == "semi-implicit"
                                    ? TimeScheme::SemiImplicit
                                    : TimeScheme::Explicit;
        state.controls.target_spacing = ev.h;
        state.controls.domain_radius = ev.domain_radius;
        state.controls.free_endpoints = ev.free_endpoints;
        const auto traj = evolve(state, ev.T);
        write_trajectory_csv(out.path("trajectory.csv"), traj);
        save_network(state.net, out.path("final.json"));
        save_svg(state.net, out.path("final.svg"));
        out.finish();
        std::cout << "final t " << format_double(traj.final_t) << ", length "
                  << format_double(traj.rows.back().total_length) << ", events "
                  << traj.events.size() << "\n";
        if (newton_failed(traj)) rc = 3;
    });

    // ---------------------------------------------------------- expander
    struct {
        std::vector<double> angles;
        std::string out_dir = ".";
        double r_max = 8.0, r_trunc = 10.0;
    } ex;
    auto* expander_cmd =
        app.add_subcommand("expander", "solve the self-expanding network");
    expander_cmd->set_help_flag("--help");
    expander_cmd->add_option("--angles", ex.angles, "asymptotic ray angles")
        ->required()
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    expander_cmd->add_option("--r-max", ex.r_max, "shooting radius");
    expander_cmd->add_option("--r-trunc", ex.r_trunc, "network truncation radius");
    expander_cmd->add_option("--out-dir", ex.out_dir, "output directory");
    expander_cmd->callback([&] {
        OutDir out(ex.out_dir, command_line);
        out.set("r_max", ex.r_max);
        out.set("r_trunc", ex.r_trunc);
        ShootOpts opts;
        opts.r_max = ex.r_max;
        json report = json::array();
        bool any = false;
        if (ex.angles.size() == 3) {
            const auto sol = solve_triod_expander(ex.angles, opts);
            json entry = solution_json(sol, sol.converged ? verify_decay(sol)
                                                          : DecayReport{});
            entry["pairing"] = "triod";
            report.push_back(entry);
            if (sol.converged) {
                any = true;
                const auto net = expander_to_network(sol, ex.r_trunc);
                save_network(net, out.path("expander.json"));
                save_svg(net, out.path("expander.svg"));
            }
        } else if (ex.angles.size() == 4) {
            const std::array<std::array<int, 4>, 2> pairings{
                {{0, 1, 2, 3}, {1, 2, 3, 0}}};
            for (size_t pi = 0; pi < pairings.size(); ++pi) {
                const auto sol = solve_tree_expander(ex.angles, pairings[pi], opts);
                json entry = solution_json(sol, sol.converged ? verify_decay(sol)
                                                              : DecayReport{});
                entry["pairing"] = json::array(
                    {pairings[pi][0], pairings[pi][1], pairings[pi][2],
                     pairings[pi][3]});
                report.push_back(entry);
                if (sol.converged) {
                    any = true;
                    const auto net = expander_to_network(sol, ex.r_trunc);
                    const std::string stem =
                        pi == 0 ? "expander" : "expander_alt";
                    save_network(net, out.path(stem + ".json"));
                    save_svg(net, out.path(stem + ".svg"));
                }
            }
        } else {
            throw NetworkError("expander solve expects 3 or 4 ray angles");
        }
        write_text(out.path("expander_report.json"), report.dump(1) + "\n");
        out.finish();
        std::cout << report.dump(1) << "\n";
        if (!any) rc = 3;
    });

    // -------------------------------------------------------------- glue
    struct {
        std::string seed, out_dir = ".";
        int vertex = 0;
        double s = 1e-2;
    } gl;
    auto* glue_cmd =
        app.add_subcommand("glue", "replace a junction by the rescaled expander");
    glue_cmd->set_help_flag("--help");
    glue_cmd->add_option("--seed,seed", gl.seed, "seed network JSON")->required();
    glue_cmd->add_option("--vertex", gl.vertex, "junction vertex id");
    glue_cmd->add_option("--s", gl.s, "gluing scale")->required();
    glue_cmd->add_option("--out-dir", gl.out_dir, "output directory");
    glue_cmd->callback([&] {
        OutDir out(gl.out_dir, command_line);
        out.set("seed", gl.seed);
        out.set("vertex", double(gl.vertex));
        out.set("s", gl.s);
        const Network seed = load_network(gl.seed);
        const auto cone = extract_cone(seed, gl.vertex);
        const auto sol = solve_for_cone(cone, {});
        if (!sol.converged) {
            std::cerr << "netlab: expander shooting did not converge\n";
            rc = 3;
            return;
        }
        const auto decay = verify_decay(sol);
        const auto glued = glue(seed, gl.vertex, sol, decay, gl.s);
        const auto hyp = verify_hypotheses(glued, sol);
        json report = glue_json(glued);
        report["hypotheses"] = hypotheses_json(hyp);
        report["expander"] = solution_json(sol, decay);
        save_network(glued.net, out.path("glued.json"));
        save_svg(glued.net, out.path("glued.svg"));
        write_text(out.path("glue_report.json"), report.dump(1) + "\n");
        out.finish();
        std::cout << glue_json(glued).dump(1) << "\n";
    });

    // ------------------------------------------------------------ family
    struct {
        std::string seed, out_dir = ".";
        int vertex = 0;
        std::vector<double> s_values{1e-2, 4e-3, 1e-3};
        double T = 0.05, h = 0.01;
    } fa;
    auto* family_cmd = app.add_subcommand(
        "family", "glue at several scales and evolve each network");
    family_cmd->set_help_flag("--help");
    family_cmd->add_option("--seed,seed", fa.seed, "seed network JSON")->required();
    family_cmd->add_option("--vertex", fa.vertex, "junction vertex id");
    family_cmd->add_option("--s", fa.s_values, "gluing scales")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    family_cmd->add_option("--T", fa.T, "common horizon");
    family_cmd->add_option("--h", fa.h, "resample spacing");
    family_cmd->add_option("--out-dir", fa.out_dir, "output directory");
    family_cmd->callback([&] {
        OutDir out(fa.out_dir, command_line);
        out.set("seed", fa.seed);
        out.set("vertex", double(fa.vertex));
        out.set("T", fa.T);
        out.set("h", fa.h);
        const Network seed = load_network(fa.seed);
        const auto cone = extract_cone(seed, fa.vertex);
        const auto sol = solve_for_cone(cone, {});
        if (!sol.converged) {
            std::cerr << "netlab: expander shooting did not converge\n";
            rc = 3;
            return;
        }
        const auto decay = verify_decay(sol);
        FamilyOpts opts;
        opts.s_values = fa.s_values;
        opts.horizon = fa.T;
        opts.spacing = fa.h;
        const auto members = run_family(seed, fa.vertex, sol, decay, opts);
        json report = json::array();
        bool failed = false;
        for (size_t i = 0; i < members.size(); ++i) {
            const auto& fm = members[i];
            json entry = {{"s", fm.s},
                          {"sup_k_sqrt_t", fm.sup_k_sqrt_t},
                          {"min_seg_over_sqrt_t", fm.min_seg_over_sqrt_t},
                          {"max_density", fm.max_density},
                          {"density_resolved", fm.density_resolved},
                          {"events", fm.events},
                          {"glue", glue_json(fm.glue)},
                          {"hypotheses", hypotheses_json(fm.hypotheses)}};
            report.push_back(entry);
            const std::string idx = std::to_string(i);
            write_trajectory_csv(out.path("trajectory_" + idx + ".csv"), fm.traj);
            save_network(fm.traj.snapshots.back().second,
                         out.path("final_" + idx + ".json"));
            if (newton_failed(fm.traj)) failed = true;
        }
        write_text(out.path("family_report.json"), report.dump(1) + "\n");
        out.finish();
        std::cout << report.dump(1) << "\n";
        if (failed) rc = 3;
    });

    // ----------------------------------------------------------- density
    struct {
        std::string net, out_dir = ".";
        double x = 0.0, y = 0.0, r = 1.0, extent = 1.0;
        int grid = 0;
    } de;
    auto* density_cmd =
        app.add_subcommand("density", "Gaussian density of a network");
    density_cmd->set_help_flag("--help");
    density_cmd->add_option("--net,net", de.net, "network JSON")->required();
    density_cmd->add_option("--x", de.x, "center x");
    density_cmd->add_option("--y", de.y, "center y");
    density_cmd->add_option("--r", de.r, "scale")->required();
    density_cmd->add_option("--grid", de.grid, "probe an NxN grid instead");
    density_cmd->add_option("--extent", de.extent, "grid spans [-extent, extent]^2");
    density_cmd->add_option("--out-dir", de.out_dir, "output directory");
    density_cmd->callback([&] {
        OutDir out(de.out_dir, command_line);
        out.set("net", de.net);
        out.set("r", de.r);
        const Network net = load_network(de.net);
        if (de.grid <= 1) {
            const auto d = gaussian_density(net, {de.x, de.y}, de.r);
            json j = {{"x", de.x},
                      {"y", de.y},
                      {"r", de.r},
                      {"value", d.value},
                      {"under_resolved", d.under_resolved}};
            write_text(out.path("density.json"), j.dump(1) + "\n");
            out.finish();
            std::cout << j.dump(1) << "\n";
            return;
        }
        std::vector<std::vector<std::string>> rows;
        double max_value = 0.0;
        for (int iy = 0; iy < de.grid; ++iy) {
            for (int ix = 0; ix < de.grid; ++ix) {
                const Vec2 p{-de.extent + 2.0 * de.extent * ix / (de.grid - 1),
                             -de.extent + 2.0 * de.extent * iy / (de.grid - 1)};
                const auto d = gaussian_density(net, p, de.r);
                max_value = std::max(max_value, d.value);
                rows.push_back({format_double(p.x), format_double(p.y),
                                format_double(d.value),
                                d.under_resolved ? "1" : "0"});
            }
        }
        write_csv(out.path("density.csv"), {"x", "y", "value", "under_resolved"},
                  rows);
        out.finish();
        std::cout << "max density " << format_double(max_value) << "\n";
    });

    // ------------------------------------------------------------- trace
    struct {
        std::string net, out_dir = ".";
        double T = 0.1, t0 = 0.2, x0 = 0.0, y0 = 0.0, h = 0.0;
        int samples = 24;
    } tr;
    auto* trace_cmd = app.add_subcommand(
        "trace", "density trace along the flow toward a spacetime point");
    trace_cmd->set_help_flag("--help");
    trace_cmd->add_option("--net,net", tr.net, "network JSON")->required();
    trace_cmd->add_option("--T", tr.T, "final flow time");
    trace_cmd->add_option("--t0", tr.t0, "trace reference time (> T)")->required();
    trace_cmd->add_option("--x0", tr.x0, "trace center x");
    trace_cmd->add_option("--y0", tr.y0, "trace center y");
    trace_cmd->add_option("--h", tr.h, "resample spacing (0: keep markers)");
    trace_cmd->add_option("--samples", tr.samples, "number of snapshots");
    trace_cmd->add_option("--out-dir", tr.out_dir, "output directory");
    trace_cmd->callback([&] {
        if (tr.t0 <= tr.T)
            throw NetworkError("trace reference time t0 must exceed T");
        OutDir out(tr.out_dir, command_line);
        out.set("net", tr.net);
        out.set("T", tr.T);
        out.set("t0", tr.t0);
        Network net = load_network(tr.net);
        if (tr.h > 0.0) {
            net = resample(net, tr.h);
            for (const auto& v : net.vertices)
                if (v.kind == VertexKind::Triple) junction_solve(net, v.id);
        }
        FlowState state;
        state.net = std::move(net);
        state.controls.target_spacing = tr.h;
        std::vector<double> snaps;
        for (int i = 1; i < tr.samples; ++i)
            snaps.push_back(tr.T * i / tr.samples);
        const auto traj = evolve(state, tr.T, snaps);
        const auto trace = huisken_trace(traj.snapshots, {tr.x0, tr.y0}, tr.t0);
        std::vector<std::vector<std::string>> rows;
        for (size_t i = 0; i < trace.points.size(); ++i) {
            const auto& p = trace.points[i];
            const double slack =
                i == 0 ? 0.0
                       : std::max(0.0, p.theta - trace.points[i - 1].theta);
            rows.push_back({format_double(p.t), format_double(p.theta),
                            format_double(p.defect), format_double(slack)});
        }
        write_csv(out.path("trace.csv"), {"t", "theta_value", "defect", "slack"},
                  rows);
        out.finish();
        std::cout << "max increase " << format_double(trace.max_increase) << "\n";
        if (newton_failed(traj)) rc = 3;
    });

    // ---------------------------------------------------------- pseudoloc
    struct {
        std::string net, out_dir = ".";
        double cx = 0.0, cy = 0.0, radius = 1.0, axis_angle = 0.0;
        double delta = 0.2, eta = 0.5, h = 0.0;
        int samples = 16;
    } ps;
    auto* pseudoloc_cmd = app.add_subcommand(
        "pseudoloc", "track graphicality of the flow in a shrunken window");
    pseudoloc_cmd->set_help_flag("--help");
    pseudoloc_cmd->add_option("--net,net", ps.net, "network JSON")->required();
    pseudoloc_cmd->add_option("--cx", ps.cx, "window center x");
    pseudoloc_cmd->add_option("--cy", ps.cy, "window center y");
    pseudoloc_cmd->add_option("--radius", ps.radius, "initial window radius")
        ->required();
    pseudoloc_cmd->add_option("--axis-angle", ps.axis_angle, "graph direction");
    pseudoloc_cmd->add_option("--delta", ps.delta, "window shrink factor");
    pseudoloc_cmd->add_option("--eta", ps.eta, "Lipschitz bound to verify");
    pseudoloc_cmd->add_option("--h", ps.h, "resample spacing (0: keep markers)");
    pseudoloc_cmd->add_option("--samples", ps.samples, "number of snapshots");
    pseudoloc_cmd->add_option("--out-dir", ps.out_dir, "output directory");
    pseudoloc_cmd->callback([&] {
        OutDir out(ps.out_dir, command_line);
        out.set("net", ps.net);
        out.set("radius", ps.radius);
        out.set("delta", ps.delta);
        out.set("eta", ps.eta);
        Network net = load_network(ps.net);
        if (ps.h > 0.0) {
            net = resample(net, ps.h);
            for (const auto& v : net.vertices)
                if (v.kind == VertexKind::Triple) junction_solve(net, v.id);
        }
        const Window big{{ps.cx, ps.cy}, ps.radius, ps.axis_angle};
        const auto initial = graph_window_monitor(net, big);
        const double T = (ps.delta * ps.radius) * (ps.delta * ps.radius);
        FlowState state;
        state.net = std::move(net);
        state.controls.target_spacing = ps.h;
        std::vector<double> snaps;
        for (int i = 1; i < ps.samples; ++i)
            snaps.push_back(T * i / ps.samples);
        const auto traj = evolve(state, T, snaps);
        const Window small{{ps.cx, ps.cy}, ps.delta * ps.radius, ps.axis_angle};
        std::vector<std::vector<std::string>> rows;
        bool ok = true;
        double worst_lip = 0.0;
        for (const auto& [t, snap] : traj.snapshots) {
            const auto rep = graph_window_monitor(snap, small);
            ok = ok && rep.is_graph && rep.lipschitz <= ps.eta;
            worst_lip = std::max(worst_lip, rep.lipschitz);
            rows.push_back({format_double(t), rep.is_graph ? "1" : "0",
                            format_double(rep.lipschitz),
                            format_double(rep.height)});
        }
        write_csv(out.path("pseudoloc.csv"), {"t", "is_graph", "lipschitz", "height"},
                  rows);
        json j = {{"initial_is_graph", initial.is_graph},
                  {"initial_lipschitz", initial.lipschitz},
                  {"horizon", T},
                  {"window_radius", ps.delta * ps.radius},
                  {"graph_throughout", ok},
                  {"max_lipschitz", worst_lip}};
        write_text(out.path("pseudoloc.json"), j.dump(1) + "\n");
        out.finish();
        std::cout << j.dump(1) << "\n";
        if (newton_failed(traj)) rc = 3;
    });

    try {
        std::reverse(expanded.begin(), expanded.end());
        app.parse(expanded);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const NetworkError& e) {
        std::cerr << "netlab: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "netlab: internal error: " << e.what() << "\n";
        return 4;
    }
    return rc;
}

}  // namespace netflow
