#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace dsmcli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitPartial = 4;

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::string out_dir;  // prefix applied to outputs when set
    int jobs = 1;
    std::string base_dir;  // directory for resolving relative config paths
};

using Args = std::vector<std::string>;

int cmd_weights(const Args& args, const GlobalOpts& g);
int cmd_train(const Args& args, const GlobalOpts& g);
int cmd_trainsweep(const Args& args, const GlobalOpts& g);
int cmd_sample(const Args& args, const GlobalOpts& g);
int cmd_estimators(const Args& args, const GlobalOpts& g);
int cmd_gradvar(const Args& args, const GlobalOpts& g);
int cmd_decompose(const Args& args, const GlobalOpts& g);
int cmd_figures(const Args& args, const GlobalOpts& g);

// Dispatch by name; returns kExitConfig for unknown commands.
int run_command(const std::string& name, const Args& args, const GlobalOpts& g);

}  // namespace dsmcli
