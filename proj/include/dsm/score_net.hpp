#pragma once
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dsm {

// Fully connected score network s(x, sigma; theta) on features (x, ln sigma),
// tanh hidden layers, linear scalar output, no preconditioning.
struct MlpLayout {
    std::vector<int> hidden;

    int input_width() const { return 2; }
    int output_width() const { return 1; }
    std::vector<int> widths() const;   // [2, hidden..., 1]
    std::size_t param_count() const;   // sum over layers of (in+1)*out

    // Single hidden layer of width (params-1)/4; 25 -> [6], 361 -> [90],
    // 1321 -> [330]. Throws if params cannot be hit exactly.
    static MlpLayout for_param_count(std::size_t params);
};

// Flat parameter vector, layer-major: weights row-major, then biases.
struct MlpParams {
    MlpLayout layout;
    std::vector<double> values;
};

// Glorot-uniform weights, zero biases; deterministic per seed.
MlpParams mlp_init(const MlpLayout& layout, std::uint64_t seed);

// Scratch buffers so the hot paths stay allocation-free. Resized on demand;
// one instance per thread.
struct MlpWorkspace {
    std::vector<double> act;    // activations, all layers concatenated
    std::vector<double> delta;  // backprop buffer (widest layer)
};

double mlp_forward(const MlpParams& p, double x, double sigma, MlpWorkspace& ws);
double mlp_forward(const MlpParams& p, double x, double sigma);

// d output / d x, by backprop through the input. Used for sanity checks of
// the hand-rolled backward pass.
double mlp_input_gradient(const MlpParams& p, double x, double sigma);

struct TrainSample {
    double x;
    double sigma;
    double target;
    double weight;
};

struct LossGrad {
    double loss;
    std::vector<double> grad;
};

// loss = (1/N) sum_i w_i (s(x_i, sigma_i) - target_i)^2, exact reverse-mode
// gradient with respect to every parameter.
LossGrad mlp_loss_and_grad(const MlpParams& p, std::span<const TrainSample> batch);

// Plain-text persistence: header `mlp 2 <hidden...> 1`, one value per line at
// full round-trip precision. load(save(p)) == p bit for bit.
void mlp_save(const MlpParams& p, const std::string& path);
MlpParams mlp_load(const std::string& path);

}  // namespace dsm
