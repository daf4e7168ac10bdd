#include "dsm/score_net.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dsm/errors.hpp"
#include "dsm/rng.hpp"

namespace dsm {

std::vector<int> MlpLayout::widths() const {
    std::vector<int> w;
    w.reserve(hidden.size() + 2);
    w.push_back(input_width());
    for (int h : hidden) w.push_back(h);
    w.push_back(output_width());
    return w;
}

std::size_t MlpLayout::param_count() const {
    const auto w = widths();
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l)
        n += static_cast<std::size_t>(w[l] + 1) * static_cast<std::size_t>(w[l + 1]);
    return n;
}

MlpLayout MlpLayout::for_param_count(std::size_t params) {
    // 2-h-1 net has 3h + h + 1 = 4h + 1 parameters
    if (params < 5 || (params - 1) % 4 != 0)
        throw std::invalid_argument("param count " + std::to_string(params) +
                                    " is not 4h+1 for any hidden width h");
    return MlpLayout{{static_cast<int>((params - 1) / 4)}};
}

MlpParams mlp_init(const MlpLayout& layout, std::uint64_t seed) {
    for (int h : layout.hidden)
        if (h < 1) throw std::invalid_argument("mlp_init: hidden widths must be positive");
    Rng rng(seed);
    const auto w = layout.widths();
    MlpParams p{layout, {}};
    p.values.reserve(layout.param_count());
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        const int fan_in = w[l], fan_out = w[l + 1];
        const double lim = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (int i = 0; i < fan_in * fan_out; ++i) p.values.push_back(rng.uniform(-lim, lim));
        for (int i = 0; i < fan_out; ++i) p.values.push_back(0.0);
    }
    return p;
}

namespace {

// forward pass writing every layer's activations into ws.act; returns output.
// act layout: [in0, in1 | layer1 outputs | layer2 outputs | ... | output]
double forward_into(const MlpParams& p, double x, double log_sigma, MlpWorkspace& ws) {
    const auto w = p.layout.widths();
    std::size_t total = 0;
    for (int width : w) total += static_cast<std::size_t>(width);
    if (ws.act.size() < total) ws.act.resize(total);

    ws.act[0] = x;
    ws.act[1] = log_sigma;
    const double* params = p.values.data();
    std::size_t off = 0;     // parameter offset
    std::size_t base = 0;    // activation offset of current layer input
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        const int nin = w[l], nout = w[l + 1];
        const double* in = ws.act.data() + base;
        double* out = ws.act.data() + base + nin;
        const double* weights = params + off;
        const double* bias = params + off + static_cast<std::size_t>(nin) * nout;
        const bool last = (l + 2 == w.size());
        for (int j = 0; j < nout; ++j) {
            double s = bias[j];
            const double* row = weights + static_cast<std::size_t>(j) * nin;
            for (int i = 0; i < nin; ++i) s += row[i] * in[i];
            out[j] = last ? s : std::tanh(s);
        }
        off += static_cast<std::size_t>(nin + 1) * nout;
        base += static_cast<std::size_t>(nin);
    }
    return ws.act[total - 1];
}

void check_finite_output(double out) {
    if (!std::isfinite(out))
        throw NumericError("score network produced a non-finite activation");
}

}  // namespace

double mlp_forward(const MlpParams& p, double x, double sigma, MlpWorkspace& ws) {
    if (!(sigma > 0.0)) throw std::invalid_argument("mlp_forward: sigma must be positive");
    const double out = forward_into(p, x, std::log(sigma), ws);
    check_finite_output(out);
    return out;
}

double mlp_forward(const MlpParams& p, double x, double sigma) {
    MlpWorkspace ws;
    return mlp_forward(p, x, sigma, ws);
}

// Backward pass from a seeded output gradient. Accumulates parameter
// gradients into grad (same flat layout) and optionally reports the gradient
// with respect to the x input.
namespace {
void backward_from(const MlpParams& p, const MlpWorkspace& ws, double out_grad, double* grad,
                   double* x_grad) {
    const auto w = p.layout.widths();
    const std::size_t nlayers = w.size() - 1;

    // activation base offsets per layer input
    std::vector<std::size_t> base(nlayers + 1);
    for (std::size_t l = 0; l + 1 <= nlayers; ++l) base[l + 1] = base[l] + static_cast<std::size_t>(w[l]);
    // parameter offsets per layer
    std::vector<std::size_t> poff(nlayers);
    std::size_t off = 0;
    for (std::size_t l = 0; l < nlayers; ++l) {
        poff[l] = off;
        off += static_cast<std::size_t>(w[l] + 1) * w[l + 1];
    }

    int widest = 0;
    for (int width : w) widest = width > widest ? width : widest;
    std::vector<double> cur(static_cast<std::size_t>(widest)), nxt(static_cast<std::size_t>(widest));
    cur[0] = out_grad;

    for (std::size_t l = nlayers; l-- > 0;) {
        const int nin = w[l], nout = w[l + 1];
        const double* in = ws.act.data() + base[l];
        const double* out_act = ws.act.data() + base[l + 1];
        const double* weights = p.values.data() + poff[l];
        double* gw = grad ? grad + poff[l] : nullptr;
        double* gb = gw ? gw + static_cast<std::size_t>(nin) * nout : nullptr;
        const bool last = (l + 1 == nlayers);

        for (int i = 0; i < nin; ++i) nxt[static_cast<std::size_t>(i)] = 0.0;
        for (int j = 0; j < nout; ++j) {
            double dz = cur[static_cast<std::size_t>(j)];
            if (!last) dz *= 1.0 - out_act[j] * out_act[j];  // tanh'
            const double* row = weights + static_cast<std::size_t>(j) * nin;
            if (gw) {
                double* grow = gw + static_cast<std::size_t>(j) * nin;
                for (int i = 0; i < nin; ++i) grow[i] += dz * in[i];
                gb[j] += dz;
            }
            for (int i = 0; i < nin; ++i) nxt[static_cast<std::size_t>(i)] += dz * row[i];
        }
        std::swap(cur, nxt);
    }
    if (x_grad) *x_grad = cur[0];
}
}  // namespace

double mlp_input_gradient(const MlpParams& p, double x, double sigma) {
    MlpWorkspace ws;
    forward_into(p, x, std::log(sigma), ws);
    double xg = 0.0;
    backward_from(p, ws, 1.0, nullptr, &xg);
    return xg;
}

LossGrad mlp_loss_and_grad(const MlpParams& p, std::span<const TrainSample> batch) {
    if (batch.empty()) throw std::invalid_argument("mlp_loss_and_grad: batch must be nonempty");
    LossGrad out;
    out.grad.assign(p.values.size(), 0.0);
    MlpWorkspace ws;
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const TrainSample& s : batch) {
        if (!std::isfinite(s.x) || !std::isfinite(s.target) || !std::isfinite(s.weight) ||
            !(s.sigma > 0.0))
            throw std::invalid_argument("mlp_loss_and_grad: non-finite sample in batch");
        if (s.weight < 0.0) throw std::invalid_argument("mlp_loss_and_grad: negative weight");
        const double pred = forward_into(p, s.x, std::log(s.sigma), ws);
        check_finite_output(pred);
        const double r = pred - s.target;
        loss += s.weight * r * r * inv_n;
        backward_from(p, ws, 2.0 * s.weight * r * inv_n, out.grad.data(), nullptr);
    }
    out.loss = loss;
    return out;
}

void mlp_save(const MlpParams& p, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << "mlp 2";
    for (int h : p.layout.hidden) f << ' ' << h;
    f << " 1\n";
    char buf[40];
    for (double v : p.values) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        f << buf;
    }
    if (!f) throw ConfigError("write failed: " + path);
}

MlpParams mlp_load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open model file: " + path);
    std::string header;
    if (!std::getline(f, header)) throw ConfigError(path + ": empty file");
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag != "mlp") throw ConfigError(path + ":1: expected 'mlp' header");
    std::vector<int> widths;
    int v;
    while (hs >> v) widths.push_back(v);
    if (widths.size() < 3 || widths.front() != 2 || widths.back() != 1)
        throw ConfigError(path + ":1: malformed layout header");
    MlpLayout layout{std::vector<int>(widths.begin() + 1, widths.end() - 1)};

    MlpParams p{layout, {}};
    p.values.reserve(layout.param_count());
    std::string line;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            std::size_t pos = 0;
            const double val = std::stod(line, &pos);
            if (!std::isfinite(val))
                throw ConfigError(path + ":" + std::to_string(lineno) + ": non-finite parameter");
            p.values.push_back(val);
        } catch (const std::invalid_argument&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: '" + line + "'");
        } catch (const std::out_of_range&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": value out of range: '" + line + "'");
        }
    }
    if (p.values.size() != layout.param_count())
        throw ConfigError(path + ": expected " + std::to_string(layout.param_count()) +
                          " parameters, found " + std::to_string(p.values.size()));
    return p;
}

}  // namespace dsm
