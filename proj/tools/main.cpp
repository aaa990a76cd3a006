#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isvd/solver.hpp"
#include "isvd/sparse.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_json(const isvd::SolverResult& r) {
    nlohmann::json j;
    j["sigma"] = nlohmann::json::array();
    j["residual"] = nlohmann::json::array();
    for (const isvd::SingularTriplet& t : r.triplets) {
        j["sigma"].push_back(t.sigma);
        j["residual"].push_back(t.residual);
    }
    j["iter"] = r.stats.restarts;
    j["mv"] = r.stats.matvecs;
    j["time_sec"] = r.stats.wall_seconds;
    j["stopcrit"] = r.stats.stopcrit;
    j["converged"] = r.converged;
    std::cout << j.dump(2) << "\n";
}

void print_csv(const isvd::SolverResult& r) {
    std::cout << "index,sigma,residual\n";
    for (std::size_t i = 0; i < r.triplets.size(); ++i)
        std::cout << (i + 1) << "," << fmt(r.triplets[i].sigma) << ","
                  << fmt(r.triplets[i].residual) << "\n";
    std::cout << "iter,mv,time_sec,stopcrit,converged\n";
    std::cout << r.stats.restarts << "," << r.stats.matvecs << "," << fmt(r.stats.wall_seconds)
              << "," << fmt(r.stats.stopcrit) << "," << (r.converged ? 1 : 0) << "\n";
}

void print_table(const isvd::SolverResult& r) {
    std::printf("%-6s %-24s %-12s\n", "index", "sigma", "residual");
    for (std::size_t i = 0; i < r.triplets.size(); ++i)
        std::printf("%-6zu %-24.16e %-12.3e\n", i + 1, r.triplets[i].sigma,
                    r.triplets[i].residual);
    std::printf("\niter = %zu, mv = %lld, time = %.3f s, stopcrit = %.3e, converged = %s\n",
                r.stats.restarts, static_cast<long long>(r.stats.matvecs), r.stats.wall_seconds,
                r.stats.stopcrit, r.converged ? "yes" : "no");
}

int write_history(const isvd::SolverResult& r, std::size_t k, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write history file '" << path << "'\n";
        return 1;
    }
    out << "restart";
    for (std::size_t i = 1; i <= k; ++i) out << ",eps_" << i;
    out << "\n";
    for (std::size_t row = 0; row < r.stats.residual_history.size(); ++row) {
        out << row;
        for (double eps : r.stats.residual_history[row]) out << "," << fmt(eps);
        out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Computes the k singular triplets of a sparse matrix nearest a target tau,\n"
                 "by implicitly restarted harmonic Lanczos bidiagonalization (no factorization\n"
                 "of the matrix is ever needed). tau = 0 computes the smallest triplets."};

    std::string matrix_path;
    double tau = 0.0;
    long long k = 0;
    long long m = 0;
    double tol = 1e-6;
    long long max_restarts = 2000;
    unsigned long long seed = 0;
    std::string output_format = "table";
    std::string history_path;
    bool verbose = false;

    app.add_option("--matrix", matrix_path, "Matrix Market file (coordinate or array, real)")
        ->required();
    app.add_option("--tau", tau, "target value; triplets nearest tau are computed")->required();
    app.add_option("--k", k, "number of singular triplets")->required();
    app.add_option("--m", m, "max bidiagonalization steps per cycle")->required();
    app.add_option("--tol", tol, "relative tolerance (default 1e-6)");
    app.add_option("--max-restarts", max_restarts, "restart budget (default 2000)");
    app.add_option("--seed", seed, "starting-vector seed (default 0)");
    app.add_option("--output", output_format, "output format: json, csv or table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    app.add_option("--history", history_path, "write per-restart residual estimates as CSV");
    app.add_flag("--verbose", verbose, "per-cycle progress on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (k < 1 || m < 2 || tol <= 0.0 || tau < 0.0 || max_restarts < 0) {
        std::cerr << "error: need k >= 1, m >= 2, tol > 0, tau >= 0, max-restarts >= 0\n";
        return 1;
    }

    try {
        isvd::SparseMatrix a = isvd::load_matrix_market(matrix_path);

        isvd::SolverConfig config;
        config.tau = tau;
        config.k = static_cast<std::size_t>(k);
        config.m = static_cast<std::size_t>(m);
        config.tol = tol;
        config.max_restarts = static_cast<std::size_t>(max_restarts);
        config.seed = seed;
        config.verbose = verbose;

        isvd::SolverResult result = isvd::solve(a, config);

        if (output_format == "json")
            print_json(result);
        else if (output_format == "csv")
            print_csv(result);
        else
            print_table(result);

        if (!history_path.empty()) {
            if (int rc = write_history(result, config.k, history_path)) return rc;
        }
        return result.converged ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
