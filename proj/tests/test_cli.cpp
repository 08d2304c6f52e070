#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "varidual/csvio.hpp"
#include "varidual/runner.hpp"
#include "varidual/svg.hpp"

using namespace varidual;
namespace fs = std::filesystem;

namespace {

std::string tmp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("varidual_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Minimal solvable configuration, fast enough for exit-code tests.
std::string tiny_config(const std::string& extra_constraint = "kind = \"none\"",
                        const std::string& solver_extra = "") {
    std::ostringstream os;
    os << "[domain]\nn = 1\nk = 1\nh = 0.05\ninner_extent = [19]\ncollar_width = 1\n";
    os << "[integrand]\nkind = \"quadratic\"\nparams = []\n";
    os << "[boundary]\npoly = [0.0, 0.0, 1.0]\n";  // curved start, affine optimum
    os << "[constraint]\n" << extra_constraint << "\n";
    os << "[schedule]\nj_start = 2\nj_end = 3\n";
    os << "[solver]\nseed = 7\ngrad_tol = 1e-8\n" << solver_extra << "\n";
    os << "[verification]\nn_dirs = 40\nn_test = 40\nseed = 11\n";
    os << "[outputs]\ncsv_dir = \"unused\"\n";
    return os.str();
}

}  // namespace

TEST_CASE("parse_config: bundled reference config round-trips to a fixed point") {
    ConfigParseResult res = parse_config_file(std::string(VARIDUAL_CONFIG_DIR) + "/quadratic_dirichlet.toml");
    REQUIRE(res.ok());
    std::string normal = serialize_config(*res.config);
    ConfigParseResult again = parse_config_text(normal);
    REQUIRE(again.ok());
    CHECK(serialize_config(*again.config) == normal);
}

TEST_CASE("parse_config: errors carry key paths and are collected, not fail-fast") {
    ConfigParseResult res = parse_config_text(
        "[domain]\nh = 0.1\n"
        "[integrand]\nkind = \"cubic_hinge\"\n"
        "[boundary]\npoly = [0.0]\n"
        "[schedule]\nj_start = 1\n"
        "[solver]\n"          // missing seed
        "[verification]\n");  // missing seed
    CHECK(!res.ok());
    auto has_error = [&](const std::string& needle) {
        for (const std::string& e : res.errors)
            if (e.find(needle) != std::string::npos) return true;
        return false;
    };
    CHECK(has_error("integrand.kind"));
    CHECK(has_error("cubic_hinge"));
    CHECK(has_error("schedule.j_start"));
    CHECK(has_error("pole"));
    CHECK(has_error("solver.seed"));
    CHECK(has_error("verification.seed"));
    CHECK(res.errors.size() >= 4);

    ConfigParseResult unknown = parse_config_text(tiny_config() + "\n[solver]\nwarp_drive = 1\n");
    // duplicate section is fine in the flat model; the unknown key is not
    CHECK(!unknown.ok());
    bool found = false;
    for (const std::string& e : unknown.errors)
        if (e.find("solver.warp_drive") != std::string::npos && e.find("unknown key") != std::string::npos)
            found = true;
    CHECK(found);
}

TEST_CASE("run_solve: exit codes for success, infeasibility and the iteration cap") {
    ConfigParseResult ok = parse_config_text(tiny_config());
    REQUIRE(ok.ok());
    std::string out = tmp_dir("solve_ok");
    std::ostringstream err;
    CHECK(run_solve(*ok.config, out, err) == exit_code::ok);
    CHECK(fs::exists(out + "/schedule.csv"));
    CHECK(fs::exists(out + "/u_final.csv"));
    CHECK(fs::exists(out + "/sigma_j_2.csv"));

    std::string schedule = slurp(out + "/schedule.csv");
    CHECK(schedule.find("j,f_j,iters,residual,ekeland_distance") == 0);
    int rows = 0;
    for (char c : schedule) rows += c == '\n';
    CHECK(rows == 1 + 2);  // header + j in {2, 3}

    // obstacle above the boundary data on the collar: infeasible
    ConfigParseResult bad = parse_config_text(tiny_config("kind = \"obstacle\"\npsi_poly = [1.0]"));
    REQUIRE(bad.ok());
    std::ostringstream err2;
    CHECK(run_solve(*bad.config, tmp_dir("solve_bad"), err2) == exit_code::infeasible);

    // one inner iteration from a curved start cannot converge
    ConfigParseResult cap = parse_config_text(tiny_config("kind = \"none\"", "max_inner_iters = 1\n"));
    REQUIRE(cap.ok());
    std::string out3 = tmp_dir("solve_cap");
    std::ostringstream err3;
    CHECK(run_solve(*cap.config, out3, err3) == exit_code::non_converged);
    CHECK(fs::exists(out3 + "/schedule.csv"));  // partial artifacts still written
}

TEST_CASE("run_verify: pass, perturbed artifact, missing artifact") {
    ConfigParseResult res = parse_config_text(tiny_config());
    REQUIRE(res.ok());
    std::string out = tmp_dir("verify");
    std::ostringstream sink;
    REQUIRE(run_solve(*res.config, out, sink) == exit_code::ok);

    std::ostringstream msg, err;
    CHECK(run_verify(*res.config, out, msg, err) == exit_code::ok);
    CHECK(fs::exists(out + "/certificate.json"));
    CHECK(msg.str().find("overall=PASS") != std::string::npos);

    // perturb the artifact: an interior kink breaks the variational flag
    auto dom = res.config->make_domain();
    Field u = read_field_csv(dom, out + "/u_final.csv");
    u.at(dom->total(0) / 2) += 0.1;
    write_field_csv(u, out + "/u_final.csv");
    std::ostringstream msg2, err2;
    CHECK(run_verify(*res.config, out, msg2, err2) == exit_code::verify_fail);
    CHECK(msg2.str().find("el=FAIL") != std::string::npos);

    fs::remove(out + "/sigma_j_2.csv");
    std::ostringstream msg3, err3;
    CHECK(run_verify(*res.config, out, msg3, err3) == exit_code::infeasible);
}

TEST_CASE("run_conjugate_table: self-duality, recession and monotone smoothing columns") {
    ConfigParseResult res = parse_config_text(tiny_config());
    REQUIRE(res.ok());
    res.config->table_js = {2, 5};
    res.config->table_radius = 1.5;
    res.config->table_spacing = 0.25;
    std::string out = tmp_dir("table");
    std::ostringstream err;
    REQUIRE(run_conjugate_table(*res.config, out, err) == exit_code::ok);

    std::ifstream is(out + "/conjugate_table.csv");
    std::string header;
    REQUIRE(std::getline(is, header));
    CHECK(header == "xi,F,Fstar,Fstarstar,Frecession,F_2,F_5");
    std::string line;
    while (std::getline(is, line)) {
        std::stringstream ss(line);
        std::vector<std::string> cells;
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        REQUIRE(cells.size() == 7);
        double xi = std::stod(cells[0]);
        double f = std::stod(cells[1]);
        CHECK(std::fabs(f - 0.5 * xi * xi) <= 1e-12);
        // F** tracks F on the query box; F_2 <= F_5 <= F row-wise
        CHECK(std::fabs(std::stod(cells[3]) - f) <= 2e-2);
        CHECK(cells[4] == (xi == 0.0 ? "0" : "inf"));
        double f2 = std::stod(cells[5]), f5 = std::stod(cells[6]);
        CHECK(f2 <= f5 + 1e-12);
        CHECK(f5 <= f + 1e-12);
    }
}

TEST_CASE("run_bv_demo: table rows and the infinite-target flag") {
    ConfigParseResult res = parse_config_file(std::string(VARIDUAL_CONFIG_DIR) + "/bv_step.toml");
    REQUIRE(res.ok());
    res.config->bv_eps = {0.1, 0.05};
    res.config->bv_h = {0.004, 0.002};
    std::string out = tmp_dir("bv");
    std::ostringstream err;
    REQUIRE(run_bv_demo(*res.config, out, err) == exit_code::ok);
    std::string table = slurp(out + "/bv_table.csv");
    CHECK(table.find("eps,h,energy,target") == 0);
    CHECK(table.find("\n0.1") != std::string::npos);

    res.config->kind = IntegrandKind::quadratic;
    std::string out2 = tmp_dir("bv_inf");
    REQUIRE(run_bv_demo(*res.config, out2, err) == exit_code::ok);
    CHECK(slurp(out2 + "/bv_table.csv").find(",inf") != std::string::npos);
}

TEST_CASE("svg: determinism, empty input, heatmap") {
    SvgSeries s{"a", {0.0, 1.0, 2.0}, {1.0, -1.0, 0.5}};
    std::string one = svg_line_chart({s}, "t");
    std::string two = svg_line_chart({s}, "t");
    CHECK(one == two);
    CHECK(one.find("<svg") == 0);

    std::string empty = svg_line_chart({}, "empty");
    CHECK(empty.find("<svg") == 0);
    CHECK(empty.find("</svg>") != std::string::npos);

    std::vector<double> cells{0.0, 0.5, 1.0, 0.25};
    std::string hm1 = svg_heatmap(cells, 2, 2, "hm");
    CHECK(hm1 == svg_heatmap(cells, 2, 2, "hm"));
    CHECK(hm1.find("#ffffff") != std::string::npos);  // max cell
    CHECK(hm1.find("#000000") != std::string::npos);  // min cell
    CHECK_THROWS_AS(svg_heatmap(cells, 3, 2, "bad"), UsageError);

    std::string hist = svg_histogram({0.1, 0.2, 0.9}, 4, "h");
    CHECK(hist == svg_histogram({0.1, 0.2, 0.9}, 4, "h"));
}

TEST_CASE("full pipeline determinism: byte-identical artifacts across reruns") {
    ConfigParseResult res = parse_config_text(tiny_config());
    REQUIRE(res.ok());
    res.config->svg = true;
    std::string a = tmp_dir("det_a"), b = tmp_dir("det_b");
    std::ostringstream sink;
    REQUIRE(run_solve(*res.config, a, sink) == exit_code::ok);
    REQUIRE(run_solve(*res.config, b, sink) == exit_code::ok);
    for (const char* name : {"schedule.csv", "u_final.csv", "sigma_final.csv", "sigma_j_2.csv", "fields.svg",
                             "f_curve.svg", "sigma.svg"}) {
        CHECK(slurp(a + "/" + name) == slurp(b + "/" + name));
    }
    std::ostringstream m1, m2, e1, e2;
    REQUIRE(run_verify(*res.config, a, m1, e1) == exit_code::ok);
    REQUIRE(run_verify(*res.config, b, m2, e2) == exit_code::ok);
    CHECK(slurp(a + "/certificate.json") == slurp(b + "/certificate.json"));
    CHECK(m1.str() == m2.str());
}
