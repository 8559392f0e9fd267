#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "nlslab/scenario.hpp"

namespace fs = std::filesystem;
using namespace nlslab;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

unsigned worker_count(std::size_t jobs) {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NLSLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) cap = static_cast<unsigned>(v);
        else std::cerr << "warning: ignoring NLSLAB_THREADS='" << env << "'\n";
    }
    return static_cast<unsigned>(std::min<std::size_t>(cap, std::max<std::size_t>(jobs, 1)));
}

void print_failures(const ScenarioResult& r) {
    for (const auto* a : r.failures()) std::cout << "FAIL " << r.name << ": " << a->name << ": " << a->detail << '\n';
}

int cmd_run(const std::vector<std::string>& files, const std::string& out_dir) {
    int code = 0;
    std::vector<Scenario> scenarios;
    std::set<std::string> names;
    for (const auto& f : files) {
        try {
            auto sc = load_scenario_file(f);
            if (!names.insert(sc.name).second) {
                std::cerr << f << ":1:1: error: scenario name '" << sc.name << "' is used by another file\n";
                code = 2;
                continue;
            }
            scenarios.push_back(std::move(sc));
        } catch (const ParseError& e) {
            std::cerr << e.file() << ':' << e.line() << ':' << e.column() << ": error: " << e.message() << '\n';
            code = 2;
        }
    }

    const unsigned workers = worker_count(scenarios.size());
    std::vector<ScenarioResult> results(scenarios.size());
    std::vector<std::string> errors(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < scenarios.size();) {
            const auto t0 = std::chrono::steady_clock::now();
            const std::string started = utc_now();
            try {
                results[i] = run_scenario(scenarios[i]);
                const fs::path dir = fs::path(out_dir) / scenarios[i].name;
                write_outputs(results[i], dir);
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                nlohmann::json meta{{"scenario_file", scenarios[i].file.string()},
                                    {"started_utc", started},
                                    {"finished_utc", utc_now()},
                                    {"wall_seconds", secs},
                                    {"workers", workers},
                                    {"version", kVersion}};
                write_text((dir / "metadata.json").string(), dump_json(meta));
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        if (!errors[i].empty()) {
            std::cout << "FAIL " << scenarios[i].name << ": " << errors[i] << '\n';
            code = std::max(code, 1);
            continue;
        }
        const auto& r = results[i];
        if (r.exit_code == 0) std::cout << "PASS " << r.name << '\n';
        else print_failures(r);
        code = std::max(code, r.exit_code);
    }
    return code;
}

int cmd_ground_state(double p, int n, std::optional<double> omega, double L, int N, double tol,
                     const std::string& out) {
    const Grid1D g(L, N);
    const auto q = omega ? ground_state_imag_time(p, n, *omega, g, tol) : ground_state_star(p, n, g, tol);
    const auto th = thresholds_of(q, g);
    write_profile_csv(out + ".csv", q);
    nlohmann::json j;
    to_json(j, th);
    j["iterations"] = q.iterations;
    write_text(out + ".json", dump_json(j));
    const auto poh = pohozaev_residuals(q.norms, p, n, q.omega_eff);
    std::cout << "p = " << format_double(p) << ", n = " << n << ", omega = " << format_double(q.omega_eff) << '\n'
              << "mass       " << format_double(th.mass) << '\n'
              << "grad_sq    " << format_double(th.grad_sq) << '\n'
              << "energy     " << format_double(th.energy) << '\n'
              << "residual   " << format_double(q.residual) << '\n'
              << "pohozaev   " << format_double(poh.multiplier) << ", " << format_double(poh.dilation) << '\n'
              << "wrote " << out << ".csv and " << out << ".json\n";
    return poh.multiplier < kGroundStateTol && poh.dilation < kGroundStateTol ? 0 : 1;
}

int cmd_verify(const std::string& id, const std::string& check, std::optional<double> L, std::optional<int> N,
               const std::vector<double>& times) {
    const ExactSolution sol = parse_catalog_id(id);
    const bool peregrine = sol.kind == SolutionKind::Peregrine;
    std::ostringstream text;
    text << "name = verify\nsource = catalog:" << id << "\nchecks = " << check << '\n';
    text << "grid.L = " << format_double(L.value_or(peregrine ? 2000.0 : sol.background() == BackgroundKind::Stokes ? 40.0 : 20.0))
         << '\n';
    text << "grid.N = " << N.value_or(peregrine ? 65536 : 2048) << '\n';
    if (peregrine && check != "appendix" && check != "virial-identity") text << "invariants.tail = algebraic\n";
    auto list = [&] {
        std::string s;
        for (std::size_t i = 0; i < times.size(); ++i) s += (i ? "," : "") + format_double(times[i]);
        return s;
    };
    if (!times.empty() && check == "virial-identity") text << "identity.times = " << list() << '\n';
    if (!times.empty() && check == "appendix") text << "appendix.times = " << list() << '\n';
    if (check == "appendix" && peregrine) text << "appendix.tol = 1e-3\n";
    const Scenario sc = load_scenario_text(text.str(), "verify");
    const auto r = run_scenario(sc);
    std::cout << dump_json(r.report);
    if (r.exit_code == 0) std::cout << "PASS " << id << " " << check << '\n';
    else print_failures(r);
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nlslab: nonlinear Schrodinger virial laboratory"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run scenario files (in parallel, capped by NLSLAB_THREADS)");
    std::vector<std::string> files;
    std::string out_dir = "nlslab-out";
    run->add_option("files", files, "Scenario files")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--out", out_dir, "Output directory; each scenario writes to <out>/<name>/");

    auto* list = app.add_subcommand("list-catalog", "List the exact solutions");

    auto* gs = app.add_subcommand("ground-state", "Compute a ground state and its thresholds");
    double p = 2.0, gs_L = 30.0, gs_tol = 1e-9;
    int n = 1, gs_N = 2048;
    std::string omega_text = "1";
    std::string gs_out = "ground_state";
    gs->add_option("--p", p, "Nonlinearity power")->required();
    gs->add_option("--n", n, "Dimension (1, or 2 for the radial solver)")->required();
    gs->add_option("--omega", omega_text, "Frequency, or 'star' for 1 - s_c")->required();
    gs->add_option("--L", gs_L, "Half-width (1-D) or radius (n = 2)");
    gs->add_option("--N", gs_N, "Points (power of two)");
    gs->add_option("--tol", gs_tol, "Residual tolerance");
    gs->add_option("-o,--out", gs_out, "Output prefix for .csv and .json");

    auto* verify = app.add_subcommand("verify", "Check a catalog solution");
    std::string solution, check;
    std::optional<double> v_L;
    std::optional<int> v_N;
    std::vector<double> times;
    verify->add_option("--solution", solution, "Catalog id, e.g. kuznetsov-ma:a=1")->required();
    verify->add_option("--check", check, "invariants, virial-identity, appendix or classify")
        ->required()
        ->check(CLI::IsMember({"invariants", "virial-identity", "appendix", "classify"}));
    verify->add_option("--L", v_L, "Grid half-width");
    verify->add_option("--N", v_N, "Grid points");
    verify->add_option("--times", times, "Evaluation times")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(files, out_dir);
        if (*list) {
            std::cout << format_catalog_table();
            return 0;
        }
        if (*gs) {
            std::optional<double> omega;
            if (omega_text != "star") {
                try {
                    omega = std::stod(omega_text);
                } catch (const std::exception&) {
                    std::cerr << "error: --omega expects a number or 'star'\n";
                    return 2;
                }
            }
            return cmd_ground_state(p, n, omega, gs_L, gs_N, gs_tol, gs_out);
        }
        if (*verify) return cmd_verify(solution, check, v_L, v_N, times);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
