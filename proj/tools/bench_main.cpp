// Timing comparison between the serial reference paths and the
// OpenMP-parallel kernels: batched gradient accumulation, dataset
// generation, and Monte-Carlo sweep trials. Verifies along the way that
// parallel results equal the serial ones bit-for-bit.

#include <chrono>
#include <cstdio>
#include <cstring>

#include <omp.h>

#include "toricnn/montecarlo.hpp"
#include "toricnn/training.hpp"

using namespace toricnn;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial_s, double parallel_s, bool equal) {
    std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %4.2fx   %s\n", name, serial_s,
                parallel_s, serial_s / parallel_s, equal ? "bit-equal" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    int workers = omp_get_max_threads();
    long batches = 40;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--workers") && i + 1 < argc) workers = std::atoi(argv[++i]);
        if (!std::strcmp(argv[i], "--batches") && i + 1 < argc) batches = std::atol(argv[++i]);
    }
    std::printf("workers: %d\n", workers);

    const LatticeGeometry geom(4, 4);
    TrainingRunConfig cfg;
    cfg.dim = 4;
    cfg.train_side = 4;
    cfg.p_lo = 0.03;
    cfg.p_hi = 0.07;
    cfg.seed = 99;

    // Dataset generation.
    const long n_samples = 4000;
    auto t0 = std::chrono::steady_clock::now();
    const auto data_serial = generate_dataset(geom, cfg, n_samples, 1);
    const double gen_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto data_parallel = generate_dataset(geom, cfg, n_samples, workers);
    const double gen_parallel = seconds_since(t0);
    bool gen_equal = true;
    for (long i = 0; i < n_samples; ++i)
        gen_equal = gen_equal && data_serial[i].syndrome_bits == data_parallel[i].syndrome_bits;
    report("dataset generation", gen_serial, gen_parallel, gen_equal);

    // Batched gradient accumulation.
    Network net = build_decoder_network(4, 15, 7);
    std::vector<long> idx(64);
    NetGrads gs, gp;
    double cs = 0, cp = 0;
    t0 = std::chrono::steady_clock::now();
    for (long b = 0; b < batches; ++b) {
        for (long i = 0; i < 64; ++i) idx[i] = (b * 64 + i) % n_samples;
        cs += batch_cost_and_grads(net, geom, data_serial, idx, gs, false, 1);
    }
    const double grad_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    for (long b = 0; b < batches; ++b) {
        for (long i = 0; i < 64; ++i) idx[i] = (b * 64 + i) % n_samples;
        cp += batch_cost_and_grads(net, geom, data_serial, idx, gp, true, workers);
    }
    const double grad_parallel = seconds_since(t0);
    bool grad_equal = cs == cp;
    for (size_t l = 0; l < gs.kernel.size() && grad_equal; ++l)
        grad_equal = gs.kernel[l] == gp.kernel[l] && gs.bias[l] == gp.bias[l];
    report("batch gradients", grad_serial, grad_parallel, grad_equal);

    // Monte-Carlo sweep trials.
    SweepConfig sweep;
    sweep.dim = 4;
    sweep.sides = {4};
    sweep.ps = {0.04};
    sweep.trials = 200;
    sweep.seed = 5;
    t0 = std::chrono::steady_clock::now();
    const auto rows_serial = run_noiseless_sweep(net, sweep, 1);
    const double sweep_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto rows_parallel = run_noiseless_sweep(net, sweep, workers);
    const double sweep_parallel = seconds_since(t0);
    report("sweep trials", sweep_serial, sweep_parallel,
           rows_serial[0].failures == rows_parallel[0].failures);
    return 0;
}
