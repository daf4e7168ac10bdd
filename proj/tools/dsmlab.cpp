#include <cstdint>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"

namespace {

void print_usage() {
    std::cout <<
        "usage: dsmlab <command> [--seed N] [--out-dir DIR] [--jobs N] [flags...]\n"
        "\n"
        "commands:\n"
        "  weights     per-level weighting curves (heuristic vs optimal)\n"
        "  train       weighted DSM training run, RunLog CSV\n"
        "  trainsweep  multi-seed sweep aggregated into figure-layout CSVs\n"
        "  sample      reverse-SDE sampling (analytic or trained score)\n"
        "  estimators  second-order estimator bias/variance table\n"
        "  gradvar     gradient covariance traces per noise level\n"
        "  decompose   DSM-vs-SM loss gap against the analytic constant\n"
        "  figures     run every experiment in a manifest\n"
        "\n"
        "run 'dsmlab <command> --help' for per-command flags.\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2 || std::strcmp(argv[1], "--help") == 0 || std::strcmp(argv[1], "-h") == 0) {
        print_usage();
        return argc < 2 ? dsmcli::kExitConfig : dsmcli::kExitOk;
    }

    const std::string command = argv[1];
    dsmcli::GlobalOpts g;
    dsmcli::Args rest;
    for (int i = 2; i < argc; ++i) {
        const std::string a = argv[i];
        auto take_value = [&](const char* flag) -> const char* {
            if (i + 1 >= argc) {
                std::cerr << "error: " << flag << " needs a value\n";
                std::exit(dsmcli::kExitConfig);
            }
            return argv[++i];
        };
        if (a == "--seed") {
            g.seed = std::strtoull(take_value("--seed"), nullptr, 10);
        } else if (a == "--out-dir") {
            g.out_dir = take_value("--out-dir");
        } else if (a == "--jobs") {
            g.jobs = static_cast<int>(std::strtol(take_value("--jobs"), nullptr, 10));
        } else {
            rest.push_back(a);
        }
    }
    return dsmcli::run_command(command, rest, g);
}
