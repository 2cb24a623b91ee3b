/* linkhom: bigraded link homology over Z and Z[c], Kauffman bracket and
 * Jones polynomials, 1-string tangle invariants with module
 * coefficients, and cobordism (movie) chain maps, all from planar
 * diagram codes or braid words.
 *
 * Exit codes: 0 success, 2 parse error, 3 domain/window error,
 * 4 unsupported move, 70 internal invariant violation.
 */

#include "linkhom/cobordism.hpp"
#include "linkhom/fixtures.hpp"
#include "linkhom/invariants.hpp"
#include "linkhom/tangle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace linkhom;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string pd;
    std::string braid;
    int strands = 0;
    std::string ring = "z";
    std::string window;
    std::string format = "json";
    int jobs = 1;
    bool modern = false;
};

void add_input_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--pd", o.pd, "planar diagram code, e.g. PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]");
    cmd->add_option("--braid", o.braid, "braid word to close up, e.g. \"1 1 1\" (negative letters invert)");
    cmd->add_option("--strands", o.strands, "strand count for --braid");
}

void add_output_options(CLI::App* cmd, CommonOpts& o, bool with_ring = true) {
    if (with_ring) cmd->add_option("--ring", o.ring, "coefficients: z (integers) or zc (Z[c])")->check(CLI::IsMember({"z", "zc"}));
    cmd->add_option("--window", o.window, "internal-degree report window lo:hi (Z[c] jobs)");
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "table", "poincare"}));
    cmd->add_option("--jobs", o.jobs, "worker threads for per-bidegree work")->check(CLI::PositiveNumber);
}

Diagram load_diagram(const CLI::App* cmd, const CommonOpts& o) {
    bool has_pd = cmd->count("--pd") > 0;
    bool has_braid = cmd->count("--braid") > 0;
    if (has_pd == has_braid) fail(Errc::parse, "give exactly one input: --pd or --braid");
    if (has_pd) return Diagram::parse_pd(o.pd);
    if (cmd->count("--strands") == 0) fail(Errc::parse, "--braid needs --strands");
    return Diagram::parse_braid(parse_braid_word(o.braid), o.strands);
}

std::pair<int, int> parse_window_spec(const std::string& s) {
    size_t colon = s.find(':', 1); // skip a leading minus sign
    if (colon == std::string::npos) fail(Errc::domain, "window must be lo:hi");
    int lo, hi;
    try {
        size_t used = 0;
        lo = std::stoi(s.substr(0, colon), &used);
        if (used != colon) fail(Errc::domain, "window must be lo:hi");
        std::string rest = s.substr(colon + 1);
        hi = std::stoi(rest, &used);
        if (used != rest.size()) fail(Errc::domain, "window must be lo:hi");
    } catch (const std::logic_error&) {
        fail(Errc::domain, "window must be lo:hi");
    }
    if (lo > hi) fail(Errc::domain, "window lo exceeds hi");
    return {lo, hi};
}

std::optional<std::pair<int, int>> requested_window(const CLI::App* cmd, const CommonOpts& o) {
    if (cmd->count("--window")) return parse_window_spec(o.window);
    if (const char* env = std::getenv("LINKHOM_WINDOW")) return parse_window_spec(env);
    return std::nullopt;
}

Ring parse_ring(const std::string& r) { return r == "zc" ? Ring::ZC : Ring::Z; }

BigradedGroups run_homology(const Diagram& d, Ring ring, std::optional<std::pair<int, int>> w, int jobs) {
    BigradedComplex cx = assemble_complex(d, ring);
    int lo, hi;
    if (ring == Ring::Z) {
        lo = w ? std::max(w->first, cx.j_min()) : cx.j_min();
        hi = w ? std::min(w->second, cx.j_max_z()) : cx.j_max_z();
    } else {
        auto dw = w ? *w : std::make_pair(cx.j_min(), cx.j_min() + 2 * cx.cube().n() + 8);
        lo = dw.first;
        hi = dw.second;
    }
    return all_homology(cx, lo, hi, jobs);
}

std::string group_table(const BigradedGroups& g) {
    std::ostringstream out;
    out << "   i    j  group\n";
    for (const auto& [ij, grp] : g.groups)
        out << std::setw(4) << ij.first << " " << std::setw(4) << ij.second << "  " << grp.str() << "\n";
    return out.str();
}

json homology_json(const Diagram& d, const BigradedGroups& g, Ring ring) {
    json out{{"schema", 1},
             {"ring", ring_name(ring)},
             {"crossings", d.n()},
             {"writhe", d.writhe()},
             {"groups", g.to_json()}};
    if (ring == Ring::ZC) out["window"] = {g.jlo, g.jhi};
    return out;
}

void print_groups(const Diagram& d, const BigradedGroups& g, Ring ring, const std::string& format) {
    if (format == "json")
        std::cout << homology_json(d, g, ring).dump(2) << "\n";
    else if (format == "poincare")
        std::cout << g.poincare() << "\n";
    else
        std::cout << group_table(g);
}

std::string jones_string(const Diagram& d, bool modern) {
    Laurent v = jones(d);
    return modern ? v.subst_neg().str("q") : v.str_half("t");
}

PropertyReport run_property(const Diagram& d, const std::string& name) {
    if (name == "d2_z") return check_d2(d, Ring::Z);
    if (name == "d2_zc") return check_d2(d, Ring::ZC);
    if (name == "euler_c0") return check_euler_c0(d);
    if (name == "euler_zc") return check_euler_zc(d);
    if (name == "mirror") return check_mirror(d);
    if (name == "parity") return check_parity(d);
    if (name == "adequacy") return check_adequacy_bound(d);
    if (name == "ss_degeneration") return check_ss_degeneration(d);
    fail(Errc::domain,
         "unknown property (have: d2_z d2_zc euler_c0 euler_zc mirror parity adequacy ss_degeneration): " + name);
}

int print_reports(const std::vector<PropertyReport>& reports, const std::string& format) {
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.ok();
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(r.to_json());
        std::cout << json{{"schema", 1}, {"ok", ok}, {"reports", arr}}.dump(2) << "\n";
    } else {
        for (const auto& r : reports)
            std::cout << (r.status + std::string(9 - r.status.size(), ' ')) << r.name
                      << (r.witness.empty() ? "" : "  [" + r.witness + "]") << "\n";
        std::cout << (ok ? "all checks passed\n" : "FAILURES above\n");
    }
    return ok ? 0 : 1;
}

std::string ring_value_string(const Int& coef, int cpow) {
    if (coef == 0) return "0";
    if (cpow == 0) return coef.get_str();
    std::string c = cpow == 1 ? "c" : "c^" + std::to_string(cpow);
    if (coef == 1) return c;
    if (coef == -1) return "-" + c;
    return coef.get_str() + "*" + c;
}

json group_json(const AbGroup& g) {
    json t = json::array();
    for (const Int& d : g.torsion) t.push_back(d.get_str());
    return {{"rank", g.rank}, {"torsion", t}, {"str", g.str()}};
}

int run_movie(const std::string& path, Ring ring, const std::string& format) {
    std::ifstream in(path);
    if (!in) fail(Errc::parse, "cannot open movie file: " + path);
    json mj;
    try {
        in >> mj;
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("movie json: ") + e.what());
    }
    Movie mv = Movie::from_json(mj);
    MovieMap mm = movie_map(mv, ring, true);

    json out{{"schema", 1}, {"ring", ring_name(ring)}, {"dj", mm.dj}, {"commutes", true}};
    json frames = json::array();
    for (const auto& f : mm.frames) frames.push_back(f.pd_string());
    out["frames"] = frames;

    auto is_empty = [](const Diagram& d) { return d.n() == 0 && d.free_loops() == 0; };
    bool closed = is_empty(mm.frames.front()) && is_empty(mm.frames.back());
    out["closed"] = closed;
    if (closed) {
        auto [coef, cpow] = closed_movie_value(mm);
        out["value"] = ring_value_string(coef, cpow);
    } else {
        /* Induced maps on homology per bidegree, over the part of the
         * report window both endpoint complexes are prepared on. */
        int lo = std::max({mm.src->j_min(), mm.vlo, mm.vlo - mm.dj});
        int hi = std::min(ring == Ring::Z ? mm.src->j_max_z() : mm.src->j_min() + 2 * mm.src->cube().n() + 8,
                          std::min(mm.vhi, mm.vhi - mm.dj));
        json maps = json::array();
        for (int i = mm.src->i_min(); i <= mm.src->i_max(); ++i)
            for (int j = lo; j <= hi; ++j) {
                if (mm.src->basis(i, j).empty() && mm.tgt->basis(i, j + mm.dj).empty()) continue;
                HomPresentation hs = hom_presentation(*mm.src, i, j);
                HomPresentation hd = hom_presentation(*mm.tgt, i, j + mm.dj);
                if (hs.group().trivial() && hd.group().trivial()) continue;
                InducedMap im = induced_map(hs, hd, mm.block(i, j));
                maps.push_back({{"i", i},
                                {"j", j},
                                {"src", group_json(im.src)},
                                {"dst", group_json(im.dst)},
                                {"kernel", group_json(im.kernel)},
                                {"cokernel", group_json(im.cokernel)},
                                {"iso", im.iso()}});
            }
        out["induced"] = maps;
    }

    if (format == "table") {
        std::cout << "frames:\n";
        for (const auto& f : out["frames"]) std::cout << "  " << f.get<std::string>() << "\n";
        std::cout << "dj = " << mm.dj << ", commutes with d: yes\n";
        if (closed) std::cout << "closed surface value: " << out["value"].get<std::string>() << "\n";
        else
            std::cout << "induced maps on " << out["induced"].size() << " bidegrees (use --format json for them)\n";
    } else {
        std::cout << out.dump(2) << "\n";
    }
    return 0;
}

struct RowResult {
    json payload;
    int code = 0;
};

json run_table_row(const std::string& name, const std::string& pdtext, const std::string& command,
                   const CommonOpts& o, std::optional<std::pair<int, int>> w, int* code) {
    try {
        Diagram d = Diagram::parse_pd(pdtext);
        json row{{"name", name}};
        if (command == "homology") {
            Ring ring = parse_ring(o.ring);
            BigradedGroups g = run_homology(d, ring, w, 1);
            row["groups"] = g.to_json();
            if (ring == Ring::ZC) row["window"] = {g.jlo, g.jhi};
        } else if (command == "jones") {
            row["jones"] = jones_string(d, o.modern);
        } else if (command == "bracket") {
            row["bracket"] = kauffman_bracket(d).str("q");
            row["scaled"] = scaled_bracket(d).str("q");
        } else if (command == "check") {
            json arr = json::array();
            bool ok = true;
            for (const char* p : {"d2_z", "d2_zc", "euler_c0", "euler_zc", "mirror", "parity"}) {
                PropertyReport r = run_property(d, p);
                ok = ok && r.ok();
                arr.push_back(r.to_json());
            }
            row["reports"] = arr;
            row["ok"] = ok;
            if (!ok) *code = 1;
        } else {
            fail(Errc::parse, "table --command must be homology, jones, bracket, or check");
        }
        return row;
    } catch (const Error& e) {
        *code = (int)e.kind();
        return json{{"name", name}, {"error", e.what()}, {"exit", (int)e.kind()}};
    }
}

int run_table(const std::string& path, const std::string& command, const CLI::App* cmd, const CommonOpts& o) {
    std::ifstream in(path);
    if (!in) fail(Errc::parse, "cannot open table file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "name,pd") fail(Errc::parse, "table csv must start with header: name,pd");
    std::vector<std::pair<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos) fail(Errc::parse, "table row needs name,pd: " + line);
        rows.push_back({line.substr(0, comma), line.substr(comma + 1)});
    }
    auto w = requested_window(cmd, o);

    std::vector<RowResult> results(rows.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t r; (r = next.fetch_add(1)) < rows.size();)
            results[r].payload = run_table_row(rows[r].first, rows[r].second, command, o, w, &results[r].code);
    };
    int nthreads = std::max(1, std::min<int>(o.jobs, (int)rows.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = 0;
    json arr = json::array();
    for (const auto& r : results) {
        arr.push_back(r.payload);
        if (code == 0 && r.code != 0) code = r.code;
    }
    if (o.format == "table") {
        for (const auto& r : arr) std::cout << r.dump() << "\n";
    } else {
        std::cout << json{{"schema", 1}, {"results", arr}}.dump(2) << "\n";
    }
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bigraded link homology, polynomial invariants, tangles, and movie maps"};
    app.require_subcommand(1);

    CommonOpts home;
    auto* cmd_hom = app.add_subcommand("homology", "bigraded homology groups of a link diagram");
    add_input_options(cmd_hom, home);
    add_output_options(cmd_hom, home);

    CommonOpts jon;
    auto* cmd_jones = app.add_subcommand("jones", "Jones polynomial of an oriented link diagram");
    add_input_options(cmd_jones, jon);
    cmd_jones->add_option("--format", jon.format)->check(CLI::IsMember({"json", "table"}));
    cmd_jones->add_flag("--modern", jon.modern, "print in the variable q instead of powers of t^(1/2)");

    CommonOpts bra;
    auto* cmd_bracket = app.add_subcommand("bracket", "Kauffman bracket and its writhe-scaled form");
    add_input_options(cmd_bracket, bra);
    cmd_bracket->add_option("--format", bra.format)->check(CLI::IsMember({"json", "table"}));

    CommonOpts chk;
    std::string property;
    bool check_all = false;
    auto* cmd_check = app.add_subcommand("check", "structural property checks");
    add_input_options(cmd_check, chk);
    cmd_check->add_option("--property", property, "one named check for the given diagram");
    cmd_check->add_flag("--all", check_all, "run the full fixture property suite");
    cmd_check->add_option("--format", chk.format)->check(CLI::IsMember({"json", "table"}));

    CommonOpts tan;
    std::string module_path;
    auto* cmd_tangle = app.add_subcommand("tangle", "homology of a 1-string tangle with module coefficients");
    cmd_tangle->add_option("--pd", tan.pd, "tangle PD code with two open arc labels")->required();
    cmd_tangle->add_option("--module", module_path, "module json file")->required();
    add_output_options(cmd_tangle, tan, false);

    CommonOpts mov;
    std::string movie_path;
    auto* cmd_movie = app.add_subcommand("movie", "chain map of a movie of diagram moves");
    cmd_movie->add_option("file", movie_path, "movie json file")->required();
    mov.ring = "zc";
    cmd_movie->add_option("--ring", mov.ring)->check(CLI::IsMember({"z", "zc"}));
    cmd_movie->add_option("--format", mov.format)->check(CLI::IsMember({"json", "table"}));

    CommonOpts tab;
    std::string table_path, table_command = "homology";
    auto* cmd_table = app.add_subcommand("table", "batch-run a command over a knot table csv (name,pd)");
    cmd_table->add_option("file", table_path, "csv file with header name,pd")->required();
    cmd_table->add_option("--command", table_command, "homology | jones | bracket | check");
    add_output_options(cmd_table, tab);
    cmd_table->add_flag("--modern", tab.modern);

    auto* cmd_fixtures = app.add_subcommand("fixtures", "print the embedded fixture set as csv (name,pd)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cmd_hom->parsed()) {
            Diagram d = load_diagram(cmd_hom, home);
            Ring ring = parse_ring(home.ring);
            BigradedGroups g = run_homology(d, ring, requested_window(cmd_hom, home), home.jobs);
            print_groups(d, g, ring, home.format);
            return 0;
        }
        if (cmd_jones->parsed()) {
            Diagram d = load_diagram(cmd_jones, jon);
            std::string s = jones_string(d, jon.modern);
            if (jon.format == "table")
                std::cout << s << "\n";
            else
                std::cout << json{{"schema", 1}, {"jones", s}, {"var", jon.modern ? "q" : "t^(1/2)"}}.dump(2)
                          << "\n";
            return 0;
        }
        if (cmd_bracket->parsed()) {
            Diagram d = load_diagram(cmd_bracket, bra);
            std::string raw = kauffman_bracket(d).str("q");
            std::string scaled = scaled_bracket(d).str("q");
            if (bra.format == "table")
                std::cout << "bracket: " << raw << "\nscaled:  " << scaled << "\n";
            else
                std::cout << json{{"schema", 1}, {"bracket", raw}, {"scaled", scaled}}.dump(2) << "\n";
            return 0;
        }
        if (cmd_check->parsed()) {
            if (check_all == (cmd_check->count("--property") > 0))
                fail(Errc::parse, "check needs exactly one of --all or --property");
            std::vector<PropertyReport> reports;
            if (check_all) {
                reports = fixtures::property_suite();
            } else {
                Diagram d = load_diagram(cmd_check, chk);
                reports.push_back(run_property(d, property));
            }
            return print_reports(reports, chk.format);
        }
        if (cmd_tangle->parsed()) {
            Diagram d = Diagram::parse_pd(tan.pd);
            std::ifstream min(module_path);
            if (!min) fail(Errc::parse, "cannot open module file: " + module_path);
            json mj;
            try {
                min >> mj;
            } catch (const json::exception& e) {
                fail(Errc::parse, std::string("module json: ") + e.what());
            }
            GradedModule m = GradedModule::from_json(mj);
            auto w = requested_window(cmd_tangle, tan);
            auto dw = w ? *w : default_window_tangle(d, m);
            BigradedGroups g = tangle_homology(d, m, dw.first, dw.second);
            print_groups(d, g, Ring::ZC, tan.format);
            return 0;
        }
        if (cmd_movie->parsed()) return run_movie(movie_path, parse_ring(mov.ring), mov.format);
        if (cmd_table->parsed()) return run_table(table_path, table_command, cmd_table, tab);
        if (cmd_fixtures->parsed()) {
            std::cout << fixtures::knots_csv();
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return (int)e.kind();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }
    return 0;
}
