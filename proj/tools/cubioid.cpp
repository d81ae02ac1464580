// cubioid: command-line front end for the combinatorial and numerical modules.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "cubioid/param_rays.hpp"
#include "cubioid/png_io.hpp"
#include "cubioid/quad_gaps.hpp"
#include "cubioid/render.hpp"

using namespace cubioid;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw UsageError("not a finite number: '" + s + "'");
    return v;
}

// "re,im" or a bare real number.
cplx parse_complex(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() == 1) return parse_double(parts[0]);
    if (parts.size() == 2) return {parse_double(parts[0]), parse_double(parts[1])};
    throw UsageError("expected re,im but got '" + s + "'");
}

Angle parse_angle(const std::string& s) {
    try {
        return Angle::parse(s);
    } catch (const parse_error& e) {
        throw UsageError(e.what());
    }
}

std::pair<int, int> parse_rotation(const std::string& s) {
    const auto parts = split(s, '/');
    if (parts.size() != 2) throw UsageError("rotation must be p/q: '" + s + "'");
    try {
        std::size_t a = 0, b = 0;
        const int p = std::stoi(parts[0], &a), q = std::stoi(parts[1], &b);
        if (a != parts[0].size() || b != parts[1].size()) throw std::invalid_argument(s);
        return {p, q};
    } catch (const std::exception&) {
        throw UsageError("rotation must be p/q with integers: '" + s + "'");
    }
}

std::pair<int, int> parse_resolution(const std::string& s) {
    const auto parts = split(s, 'x');
    if (parts.size() != 2) throw UsageError("resolution must be WxH: '" + s + "'");
    const double w = parse_double(parts[0]), h = parse_double(parts[1]);
    if (w != std::floor(w) || h != std::floor(h) || w < 1 || h < 1 || w > 16384 || h > 16384) {
        throw UsageError("resolution out of range: '" + s + "'");
    }
    return {static_cast<int>(w), static_cast<int>(h)};
}

QHole parse_hole(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 2) throw UsageError("hole must be theta1,theta2: '" + s + "'");
    const Angle t1 = parse_angle(parts[0]), t2 = parse_angle(parts[1]);
    if (t1 == t2) throw UsageError("hole endpoints coincide: '" + s + "'");
    const auto shape = orbit_period(3, t1 + one_third());
    if (shape.preperiod == 0 && shape.period <= max_atlas_period) {
        for (const auto& h : cached_holes_of_period(shape.period)) {
            if (h.theta1 == t1 && h.theta2 == t2) return h;
        }
    }
    throw UsageError("(" + s + ") is not a Q-hole of period <= " + std::to_string(max_atlas_period));
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }
json angle_json(const Angle& a) { return a.str(); }
json chord_json(const Chord& c) { return json::array({c.a.str(), c.b.str()}); }
json arc_json(const Arc& a) { return json::array({a.start.str(), a.end.str()}); }

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw UsageError("failed writing " + path);
}

// Everything needed to reproduce an output: version, invocation and the resolved option values.
json reproducibility_header(const std::vector<std::string>& args, const std::vector<const CLI::App*>& apps) {
    json config = json::object();
    for (const CLI::App* app : apps) {
        for (const CLI::Option* opt : app->get_options()) {
            const std::string name = opt->get_single_name();
            if (name == "help" || name == "version") continue;
            const auto& res = opt->results();
            if (!res.empty()) {
                config[name] = res.size() == 1 ? json(res[0]) : json(res);
            } else {
                const std::string d = opt->get_default_str();
                config[name] = d.empty() && opt->get_expected_max() == 0 ? "false" : d;
            }
        }
    }
    json invocation = json::array({"cubioid"});
    for (const auto& a : args) invocation.push_back(a);
    return {{"tool", "cubioid"}, {"version", kVersion}, {"invocation", invocation}, {"config", config}};
}

// Config file entries replace option values, whatever the command line said.
void apply_config(CLI::App& app, const json& cfg) {
    if (!cfg.is_object()) throw UsageError("config section must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        if (value.is_object()) {
            if (key == "tolerances") {
                apply_config(app, value);
                continue;
            }
            CLI::App* sub = nullptr;
            try {
                sub = app.get_subcommand(key);
            } catch (const CLI::OptionNotFound&) {
                throw UsageError("unknown config section '" + key + "'");
            }
            if (sub->parsed()) apply_config(*sub, value);
            continue;
        }
        CLI::Option* opt = app.get_option_no_throw("--" + key);
        if (opt == nullptr) throw UsageError("unknown config key '" + key + "'");
        auto as_text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        std::vector<std::string> items;
        if (value.is_array()) {
            for (const auto& v : value) items.push_back(as_text(v));
            if (opt->get_items_expected_max() == 1) {
                std::string joined;
                for (std::size_t i = 0; i < items.size(); ++i) joined += (i ? "," : "") + items[i];
                items = {joined};
            }
        } else {
            items.push_back(as_text(value));
        }
        opt->clear();
        for (const auto& s : items) opt->add_result(s);
        try {
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError("config key '" + key + "': " + e.what());
        }
    }
}

struct Globals {
    int threads = 0;
    std::uint64_t seed = 0;
    std::string config;
    Tolerances tol;

    [[nodiscard]] int thread_count() const {
        if (threads > 0) return threads;
        return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
};

void check_tolerances(const Tolerances& t) {
    if (!(t.r_big > 1) || !(t.land_tol > 0) || !(t.crash_tol > 0) || !(t.newton_tol > 0) || t.max_newton <= 0 ||
        t.max_iter <= 0) {
        throw UsageError("every tolerance must be positive (and r-big > 1)");
    }
}

// ---- subcommands -----------------------------------------------------------------------------

struct AtlasArgs {
    int max_period = 0;
    std::string out, svg;
    int svg_size = 512;
};

void run_atlas(const AtlasArgs& a, const json& header) {
    if (a.max_period < 1 || a.max_period > max_atlas_period) {
        throw UsageError("--max-period must lie in [1, " + std::to_string(max_atlas_period) + "]");
    }
    const QAtlas atlas = enumerate_holes(a.max_period);
    json holes = json::array();
    for (const auto& h : atlas.holes) {
        holes.push_back({{"theta1", angle_json(h.theta1)},
                         {"theta2", angle_json(h.theta2)},
                         {"period", h.period},
                         {"major", chord_json(h.major())}});
    }
    json out{{"header", header},
             {"max_period", atlas.max_period},
             {"hole_count", atlas.holes.size()},
             {"total_length", atlas.total_length().str()},
             {"holes", holes}};
    write_text(a.out, out.dump(2) + "\n");
    if (!a.svg.empty()) {
        std::string svg = render_q_svg(atlas, a.svg_size);
        const auto at = svg.find(">\n");
        std::string meta = header.dump();
        for (std::size_t i = 0; (i = meta.find("--", i)) != std::string::npos;) meta.replace(i, 2, "- -");
        svg.insert(at + 2, "<!-- " + meta + " -->\n");
        write_text(a.svg, svg);
    }
}

struct GapArgs {
    std::string theta;
    int depth = 3;
    int max_period = default_search_period;
    bool clean = false;
    std::string out;
};

void run_gaps(const GapArgs& a, const json& header) {
    if (a.depth < 0 || a.depth > 12) throw UsageError("--depth must lie in [0, 12]");
    if (a.max_period < 1 || a.max_period > max_atlas_period) throw UsageError("--max-period out of range");
    QuadGap g = make_gap(parse_angle(a.theta), a.max_period);
    if (a.clean) g = clean_gap(g, a.max_period);
    json verts = json::array();
    for (const auto& v : vertices(g, a.depth)) verts.push_back(angle_json(v));
    json out{{"header", header},
             {"generator", angle_json(g.generator)},
             {"type", to_string(g.type)},
             {"major", chord_json(g.major)},
             {"major_hole", arc_json(g.major_hole)},
             {"major_period", g.major_period ? json(*g.major_period) : json(nullptr)},
             {"depth", a.depth},
             {"vertices", verts}};
    write_text(a.out, out.dump(2) + "\n");
}

struct TypedArgs {
    std::string rotation;
    bool all = false;
    std::string out;
};

void run_typed(const TypedArgs& a, const json& header) {
    const auto [p, q] = parse_rotation(a.rotation);
    const auto gaps = a.all ? enumerate_finite_gaps(p, q) : enumerate_typeD(p, q);
    const QAtlas atlas = enumerate_holes(std::min(q, max_atlas_period));
    json list = json::array();
    for (const auto& g : gaps) {
        json verts = json::array(), majors = json::array(), holes = json::array(), qholes = json::array();
        for (const auto& v : g.vertices) verts.push_back(angle_json(v));
        for (const auto& m : g.majors) majors.push_back(chord_json(m));
        for (const auto& h : g.major_holes) holes.push_back(arc_json(h));
        if (g.type == FiniteGapType::D) {
            for (std::size_t k = 0; k < g.major_holes.size(); ++k) {
                const QHole h = typeD_major_to_qhole(g, k, atlas);
                qholes.push_back(json::array({angle_json(h.theta1), angle_json(h.theta2)}));
            }
        }
        json item{{"type", to_string(g.type)},
                  {"rotation", g.rotation.str()},
                  {"vertices", verts},
                  {"majors", majors},
                  {"major_holes", holes},
                  {"degenerate_leaf", g.degenerate_leaf}};
        if (g.type == FiniteGapType::D) item["qholes"] = qholes;
        list.push_back(item);
    }
    json out{{"header", header}, {"rotation", std::to_string(p) + "/" + std::to_string(q)}, {"count", gaps.size()},
             {"gaps", list}};
    write_text(a.out, out.dump(2) + "\n");
}

struct TpolyArgs {
    std::string rotation;
    bool roots = false;
    std::string out;
};

void run_tpoly(const TpolyArgs& a, const json& header) {
    const auto [p, q] = parse_rotation(a.rotation);
    const MultiplierPoly t = tpoly(p, q);
    json coeffs = json::array();
    for (cplx c : t.coefficients) coeffs.push_back(cplx_json(c));
    json out{{"header", header}, {"p", p}, {"q", q}, {"degree", degree(t.coefficients, 1e-8)}, {"coefficients", coeffs}};
    if (a.roots) {
        json roots = json::array();
        for (cplx r : tpoly_roots(t)) roots.push_back(cplx_json(r));
        out["roots"] = roots;
    }
    write_text(a.out, out.dump(2) + "\n");
}

struct TraceArgs {
    std::string lambda, b, theta;
    bool param = false;
    int depth = 20;
    int steps = 8;
    std::string csv;
};

void run_trace(const TraceArgs& a, const Globals& g, const json& header) {
    const cplx lambda = parse_complex(a.lambda);
    const Angle theta = parse_angle(a.theta);
    if (a.steps < 1 || a.steps > 64) throw UsageError("--steps must lie in [1, 64]");
    if (a.param == !a.b.empty()) throw UsageError("give exactly one of --b (dynamic ray) or --param (parameter ray)");
    const RayTrace ray = a.param ? trace_param_ray(lambda, theta, a.depth, a.steps, g.tol)
                                 : trace_dynamic_ray(CubicMap(lambda, parse_complex(a.b)), theta, a.depth, a.steps, g.tol);
    std::ostringstream os;
    os << "# " << header.dump() << "\n";
    os << "# plane: " << (a.param ? "parameter" : "dynamic") << ", theta: " << theta.str()
       << ", status: " << status_name(ray.status);
    if (ray.landed()) os << " at " << std::get<Landed>(ray.status).z;
    if (ray.crashed()) os << " near " << std::get<Crashed>(ray.status).near;
    os << "\nlevel,potential,re,im\n";
    char buf[128];
    for (std::size_t i = 0; i < ray.points.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", ray.levels[i], ray.potentials[i], ray.points[i].real(),
                      ray.points[i].imag());
        os << buf;
    }
    write_text(a.csv, os.str());
}

json landing_json(const LandingEstimate& l) {
    return {{"b", cplx_json(l.b)},
            {"method", to_string(l.method)},
            {"error_estimate", l.error_estimate},
            {"tail", cplx_json(l.tail)},
            {"tail_potential", l.tail_potential}};
}

json wake_json(const WakeCheck& w, double wake_tol) {
    json out{{"hole", json::array({angle_json(w.hole.theta1), angle_json(w.hole.theta2)})},
             {"period", w.hole.period},
             {"lambda", cplx_json(w.lambda)},
             {"special", w.special},
             {"landing1", landing_json(w.landing1)},
             {"landing2", landing_json(w.landing2)},
             {"separation", w.separation},
             {"tail_separation", w.tail_separation},
             {"wake_tol", wake_tol},
             {"passes", w.passes(wake_tol)}};
    out["tpq_match"] = w.tpq_match ? json{{"root", cplx_json(w.tpq_match->root)}, {"distance", w.tpq_match->distance}}
                                   : json(nullptr);
    return out;
}

struct RenderArgs {
    std::string lambda, center = "0,0", res = "512x512";
    double width = 6.0;
    int max_iter = 200;
    std::vector<std::string> rays;
    int ray_depth = 12;
    std::vector<std::string> wakes;
    bool tpoly_roots = false;
    std::string png, sidecar;
};

void run_render(const RenderArgs& a, const Globals& g, const json& header) {
    SliceSpec s;
    s.lambda = parse_complex(a.lambda);
    s.center = parse_complex(a.center);
    std::tie(s.w, s.h) = parse_resolution(a.res);
    s.width = a.width;
    s.max_iter = a.max_iter;
    if (!(s.width > 0) || s.max_iter < 1) throw UsageError("--width and --max-iter must be positive");
    std::vector<Angle> ray_angles;
    for (const auto& r : a.rays) ray_angles.push_back(parse_angle(r));
    std::vector<QHole> holes;
    for (const auto& w : a.wakes) holes.push_back(parse_hole(w));
    std::optional<std::pair<int, int>> rot;
    if (a.tpoly_roots) {
        rot = rational_rotation(s.lambda);
        if (!rot) throw UsageError("--tpoly-roots needs lambda = exp(2 pi i p/q) with q <= " + std::to_string(max_tpoly_q));
    }

    Image img = render_slice(s, g.thread_count());

    // One ray per worker; results land in their own slots.
    std::vector<RayTrace> traces(ray_angles.size());
    {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(ray_angles.size());
        for (std::size_t i = 0; i < ray_angles.size(); ++i) {
            pool.emplace_back([&, i] {
                try {
                    traces[i] = trace_param_ray(s.lambda, ray_angles[i], a.ray_depth, 4, g.tol);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    json rays_out = json::array();
    for (const auto& t : traces) {
        draw_polyline(img, s, t.points, Rgb{200, 30, 30});
        rays_out.push_back({{"theta", angle_json(t.theta)},
                            {"status", status_name(t.status)},
                            {"end", t.points.empty() ? json(nullptr) : cplx_json(t.points.back())},
                            {"end_potential", t.potentials.empty() ? json(nullptr) : json(t.potentials.back())}});
    }
    json wakes_out = json::array();
    for (const auto& h : holes) {
        const WakeCheck w = wake_check(s.lambda, h, 1e-6, default_extrapolation_depth, g.tol);
        draw_marker(img, s, 0.5 * (w.landing1.b + w.landing2.b), Rgb{20, 140, 40}, 4);
        wakes_out.push_back(wake_json(w, 1e-3));
    }
    json roots_out = json::array();
    if (rot) {
        for (cplx r : tpoly_roots(tpoly(rot->first, rot->second))) {
            draw_marker(img, s, r, Rgb{30, 30, 200}, 3);
            roots_out.push_back(cplx_json(r));
        }
    }

    json spec{{"lambda", cplx_json(s.lambda)}, {"center", cplx_json(s.center)}, {"width", s.width},
              {"resolution", json::array({s.w, s.h})}, {"max_iter", s.max_iter}};
    write_png(a.png, img, {{"Software", std::string("cubioid ") + kVersion}, {"cubioid", header.dump()}, {"slice", spec.dump()}});
    json side{{"header", header}, {"png", a.png}, {"slice", spec}, {"rays", rays_out}, {"wakes", wakes_out},
              {"tpoly_roots", roots_out}};
    write_text(a.sidecar.empty() ? a.png + ".json" : a.sidecar, side.dump(2) + "\n");
}

struct WakeArgs {
    std::string lambda, hole;
    double potential = 1e-6;
    int deep_depth = default_extrapolation_depth;
    double wake_tol = 1e-3;
    std::string out;
};

void run_wake(const WakeArgs& a, const Globals& g, const json& header) {
    const cplx lambda = parse_complex(a.lambda);
    const QHole h = parse_hole(a.hole);
    if (!(a.potential > 0) || !(a.wake_tol > 0)) throw UsageError("--potential and --wake-tol must be positive");
    json out{{"header", header}};
    out.update(wake_json(wake_check(lambda, h, a.potential, a.deep_depth, g.tol), a.wake_tol));
    write_text(a.out, out.dump(2) + "\n");
}

int fail(int code, const std::string& kind, const std::string& message, const std::string& command) {
    json err{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    if (!command.empty()) err["command"] = command;
    std::cerr << err.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tripling-map combinatorics and cubic polynomial dynamics", "cubioid"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Globals g;
    std::vector<std::pair<const CLI::App*, const CLI::Option*>> required;  // checked after the config file is applied
    app.add_option("--threads", g.threads, "Worker threads for rendering (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", g.seed, "Reserved; every computation is deterministic");
    app.add_option("--config", g.config, "JSON config; its entries override command-line flags");
    app.add_option("--r-big", g.tol.r_big, "Radius beyond which the Bottcher product is used directly");
    app.add_option("--land-tol", g.tol.land_tol, "Tail diameter at which a ray counts as landed");
    app.add_option("--crash-tol", g.tol.crash_tol, "Relative distance counted as hitting a critical point");
    app.add_option("--newton-tol", g.tol.newton_tol, "Relative Newton step size accepted as converged");
    app.add_option("--max-newton", g.tol.max_newton, "Newton iterations per ray point");
    app.add_option("--orbit-max-iter", g.tol.max_iter, "Iteration cap for orbit escape tests");

    AtlasArgs atlas;
    auto* c_atlas = app.add_subcommand("q-atlas", "Enumerate Q-holes up to a period");
    required.emplace_back(c_atlas, c_atlas->add_option("--max-period", atlas.max_period, "Largest major period"));
    c_atlas->add_option("--out", atlas.out, "JSON output (default stdout)");
    c_atlas->add_option("--svg", atlas.svg, "Also draw the holes as SVG");
    c_atlas->add_option("--svg-size", atlas.svg_size, "SVG side length in pixels");

    GapArgs gap;
    auto* c_gaps = app.add_subcommand("gaps", "Quadratic invariant gap of a critical chord");
    required.emplace_back(c_gaps, c_gaps->add_option("--theta", gap.theta, "Generator angle num/den"));
    c_gaps->add_option("--depth", gap.depth, "Pull-back depth for vertices");
    c_gaps->add_option("--max-period", gap.max_period, "Period bound when searching for the major");
    c_gaps->add_flag("--clean", gap.clean, "Replace a caterpillar gap by its clean periodic gap");
    c_gaps->add_option("--out", gap.out, "JSON output (default stdout)");

    TypedArgs typed;
    auto* c_typed = app.add_subcommand("typed", "Finite invariant gaps of a rotation number");
    c_typed->require_subcommand(1);
    auto* c_enum = c_typed->add_subcommand("enumerate", "List type D gaps (or all finite gaps)");
    required.emplace_back(c_enum, c_enum->add_option("--rotation", typed.rotation, "Rotation number p/q"));
    c_enum->add_flag("--all", typed.all, "Include gaps of types A and B");
    c_enum->add_option("--out", typed.out, "JSON output (default stdout)");

    TpolyArgs tp;
    auto* c_tpoly = app.add_subcommand("tpoly", "Multiplier polynomial T_{p/q}");
    required.emplace_back(c_tpoly, c_tpoly->add_option("--rotation", tp.rotation, "Rotation number p/q"));
    c_tpoly->add_flag("--roots", tp.roots, "Also list the roots");
    c_tpoly->add_option("--out", tp.out, "JSON output (default stdout)");

    TraceArgs tr;
    auto* c_trace = app.add_subcommand("trace-ray", "Trace a dynamic or parameter external ray");
    required.emplace_back(c_trace, c_trace->add_option("--lambda", tr.lambda, "Multiplier at 0 as re,im"));
    c_trace->add_option("--b", tr.b, "Coefficient b as re,im (dynamic ray)");
    c_trace->add_flag("--param", tr.param, "Trace the parameter ray in the b-plane instead");
    required.emplace_back(c_trace, c_trace->add_option("--theta", tr.theta, "Ray angle num/den"));
    c_trace->add_option("--depth", tr.depth, "Number of potential levels (factor 3 each)");
    c_trace->add_option("--steps", tr.steps, "Substeps per level");
    c_trace->add_option("--csv", tr.csv, "CSV output (default stdout)");

    RenderArgs rs;
    auto* c_render = app.add_subcommand("render-slice", "Escape-time picture of a lambda-slice");
    required.emplace_back(c_render, c_render->add_option("--lambda", rs.lambda, "Multiplier at 0 as re,im"));
    c_render->add_option("--center", rs.center, "Window centre as re,im");
    c_render->add_option("--width", rs.width, "Window width along the real axis");
    c_render->add_option("--res", rs.res, "Resolution WxH");
    c_render->add_option("--max-iter", rs.max_iter, "Escape-time iteration cap");
    c_render->add_option("--rays", rs.rays, "Parameter rays to overlay, comma separated")->delimiter(',');
    c_render->add_option("--ray-depth", rs.ray_depth, "Levels traced for each overlaid ray");
    c_render->add_option("--wake", rs.wakes, "Mark the root of the wake of a hole theta1,theta2 (repeatable)");
    c_render->add_flag("--tpoly-roots", rs.tpoly_roots, "Mark the roots of T_{p/q} for lambda = exp(2 pi i p/q)");
    required.emplace_back(c_render, c_render->add_option("--png", rs.png, "PNG output"));
    c_render->add_option("--json", rs.sidecar, "JSON sidecar (default <png>.json)");

    WakeArgs wk;
    auto* c_wake = app.add_subcommand("wake-check", "Landing estimates for the two rays of a wake");
    required.emplace_back(c_wake, c_wake->add_option("--lambda", wk.lambda, "Multiplier at 0 as re,im"));
    required.emplace_back(c_wake, c_wake->add_option("--hole", wk.hole, "Q-hole theta1,theta2"));
    c_wake->add_option("--potential", wk.potential, "Potential the rays are traced to");
    c_wake->add_option("--deep-depth", wk.deep_depth, "Levels for the extrapolated estimate");
    c_wake->add_option("--wake-tol", wk.wake_tol, "Separation below which the rays co-land");
    c_wake->add_option("--json", wk.out, "JSON output (default stdout)");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "usage", e.what(), "");
    }

    CLI::App* sub = app.get_subcommands().front();
    std::string command = sub->get_name();
    std::vector<const CLI::App*> apps{&app, sub};
    if (sub == c_typed) {
        apps.push_back(c_enum);
        command += " enumerate";
    }

    try {
        if (!g.config.empty()) {
            std::ifstream in(g.config);
            if (!in) throw UsageError("cannot read config " + g.config);
            json cfg;
            try {
                cfg = json::parse(in);
            } catch (const json::parse_error& e) {
                throw UsageError("config " + g.config + " is not valid JSON: " + e.what());
            }
            apply_config(app, cfg);
        }
        for (const auto& [owner, opt] : required) {
            if (owner->parsed() && opt->count() == 0) throw UsageError(opt->get_name() + " is required");
        }
        check_tolerances(g.tol);
        const json header = reproducibility_header(args, apps);

        if (sub == c_atlas) run_atlas(atlas, header);
        else if (sub == c_gaps) run_gaps(gap, header);
        else if (sub == c_typed) run_typed(typed, header);
        else if (sub == c_tpoly) run_tpoly(tp, header);
        else if (sub == c_trace) run_trace(tr, g, header);
        else if (sub == c_render) run_render(rs, g, header);
        else if (sub == c_wake) run_wake(wk, g, header);
    } catch (const UsageError& e) {
        return fail(2, "usage", e.what(), command);
    } catch (const error& e) {
        if (e.numerical()) return fail(3, "numerical", e.what(), command);
        return fail(2, "invalid-input", e.what(), command);
    } catch (const std::exception& e) {
        return fail(3, "internal", e.what(), command);
    }
    return 0;
}
