#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "toricnn/analysis.hpp"
#include "toricnn/training.hpp"

using namespace toricnn;

TEST_CASE("toy overlap: exact-copy database entry gives full overlap and zero weight") {
    // Direct construction mirror: if the best entry equals the target the
    // weight after is 2k - 2k = 0; checked through the stats identity.
    ToyLatticeConfig cfg;
    cfg.side = 10;
    cfg.p = 0.1; // k = 10
    cfg.db_size = 30;
    cfg.seed = 3;
    const ToyOverlapStats stats = nn_toy_overlap_experiment(cfg, 5);
    for (const auto& rep : stats.reps) {
        CHECK(rep.weight_before == 10);
        CHECK(rep.weight_after == 2 * rep.weight_before - 2 * rep.max_overlap);
    }
    CHECK_THROWS_AS(nn_toy_overlap_experiment({10, 0.001, 10, 1}, 3), std::invalid_argument);
}

TEST_CASE("toy overlap at paper scale: best entry falls far short of the error weight") {
    ToyLatticeConfig cfg;
    cfg.side = 50;
    cfg.p = 0.05;
    cfg.db_size = 2000; // reduced from 10^4 for the unit tier; acceptance runs the full size
    cfg.seed = 8;
    const ToyOverlapStats stats = nn_toy_overlap_experiment(cfg, 20);
    const double k = 125.0;
    CHECK(stats.mean_max_overlap < k);
    CHECK(stats.mean_weight_after > stats.mean_weight_before);
    // Random-pair overlap mean is L^2 p^2 = 6.25 (exactly k^2 / L^2 here).
    const double expected = k * k / 2500.0;
    const double var_bound = k; // hypergeometric variance < k
    const double sigma_mean = std::sqrt(var_bound / (20.0 * 2000.0));
    CHECK(std::abs(stats.mean_overlap - expected) < 3 * sigma_mean);
}

TEST_CASE("count_paths matches the trinomial coefficients and brute-force enumeration") {
    const long expect[7] = {1, 3, 6, 7, 6, 3, 1};
    for (int k = 0; k < 7; ++k) CHECK(count_paths(4, 7, k) == expect[k]);
    CHECK(count_paths(2, 3, 0) == 1);
    CHECK(count_paths(2, 3, 1) == 1);
    CHECK(count_paths(2, 3, 2) == 1);
    CHECK(count_paths(4, 7, -1) == 0);
    CHECK(count_paths(4, 7, 7) == 0);
    // corner/center ratio at m=4 is 1/7
    CHECK(count_paths(4, 7, 0) * 7 == count_paths(4, 7, 3));

    // Brute force: recursively walk every connection for m <= 5, n <= 9.
    std::function<long(int, int, int, int)> walk = [&](int m, int n, int layer, int pos) -> long {
        const int size = n - 2 * layer;
        if (pos < 0 || pos >= size) return 0;
        if (layer == m - 1) return size == 1 && pos == 0 ? 1 : 0;
        long total = 0;
        for (int k = 0; k < 3; ++k) {
            const int next = pos - k; // output j consumes inputs j, j+1, j+2
            total += walk(m, n, layer + 1, next);
        }
        return total;
    };
    for (int m = 2; m <= 5; ++m) {
        const int n = 2 * (m - 1) + 1;
        for (int k = 0; k < n; ++k) CHECK(count_paths(m, n, k) == walk(m, n, 0, k));
    }
}

TEST_CASE("linear LocalNet output is the weighted sum of basis responses") {
    LocalNetSpec spec;
    spec.depth_m = 4;
    spec.input_n = 7;
    spec.dims = 1;
    spec.channels = 1;
    spec.hidden_act = Activation::none;
    Rng rng(21);
    LocalNet net(spec, rng);
    std::vector<double> coef(7);
    std::vector<double> input(7, 0.0);
    for (int k = 0; k < 7; ++k) {
        std::fill(input.begin(), input.end(), 0.0);
        input[k] = 1.0;
        coef[k] = net.forward(input);
    }
    Rng rx(5);
    for (int rep = 0; rep < 10; ++rep) {
        double expect = 0.0;
        for (int k = 0; k < 7; ++k) {
            input[k] = rx.normal();
            expect += coef[k] * input[k];
        }
        CHECK(net.forward(input) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("LocalNet backward matches finite differences (2D, relu)") {
    LocalNetSpec spec;
    spec.depth_m = 4;
    spec.input_n = 7;
    spec.dims = 2;
    spec.channels = 3;
    spec.hidden_act = Activation::relu_fn;
    Rng rng(33);
    LocalNet net(spec, rng);
    std::vector<double> input(49);
    Rng rx(2);
    for (double& v : input) v = rx.normal();

    // cost = 0.5 * out^2 so d(cost)/d(out) = out. A small step along the
    // gradient must lower the cost, and the directional derivative at 0
    // must agree between step sizes.
    const double out0 = net.forward(input);
    const double eta = 1e-6;
    LocalNet stepped = net;
    stepped.zero_grads();
    stepped.backward(input, out0);
    const double cost0 = 0.5 * out0 * out0;
    stepped.sgd_update(eta);
    const double out1 = stepped.forward(input);
    const double cost1 = 0.5 * out1 * out1;
    const double drop = cost0 - cost1;
    CHECK(drop > 0.0);

    // And a true directional finite-difference check: d(cost)/d(eta) at 0
    // equals |g|^2.
    LocalNet s2 = net;
    s2.zero_grads();
    s2.backward(input, out0);
    s2.sgd_update(2 * eta);
    const double out2 = s2.forward(input);
    const double cost2 = 0.5 * out2 * out2;
    const double slope1 = (cost0 - cost1) / eta;
    const double slope2 = (cost0 - cost2) / (2 * eta);
    CHECK(slope1 == doctest::Approx(slope2).epsilon(1e-3));
}

TEST_CASE("variance scales with path counts and with sigma^(2(m-1))") {
    LocalNetSpec spec;
    spec.depth_m = 4;
    spec.input_n = 7;
    spec.dims = 1;
    spec.channels = 1;
    spec.hidden_act = Activation::none;
    spec.init_sigma = 0.1;
    const auto pts = variance_vs_paths_experiment(spec, 600, 424242);
    REQUIRE(pts.size() == 7);
    const double ratio = pts[3].variance / pts[0].variance;
    CHECK(ratio > 4.9);
    CHECK(ratio < 9.8);
    CHECK(pts[3].paths == 7);
    CHECK(pts[0].paths == 1);

    // Doubling sigma multiplies every variance by 2^(2(m-1)) = 64.
    LocalNetSpec spec2 = spec;
    spec2.init_sigma = 0.2;
    const auto pts2 = variance_vs_paths_experiment(spec2, 600, 424242);
    for (int k = 0; k < 7; ++k) {
        const double s = pts2[k].variance / pts[k].variance;
        CHECK(s > 64.0 * 0.7);
        CHECK(s < 64.0 * 1.3);
    }

    // m=2: all positions have one path and equal variance within tolerance.
    LocalNetSpec flat;
    flat.depth_m = 2;
    flat.input_n = 3;
    flat.dims = 1;
    const auto pf = variance_vs_paths_experiment(flat, 600, 11);
    for (const auto& pt : pf) CHECK(pt.paths == 1);
    CHECK(pf[0].variance / pf[2].variance > 0.7);
    CHECK(pf[0].variance / pf[2].variance < 1.4);
}

TEST_CASE("empirical covariance of distinct path products vanishes") {
    // Two disjoint paths share no weight: products are uncorrelated.
    Rng rng(55);
    const int trials = 4000;
    double sx = 0, sy = 0, sxy = 0;
    for (int t = 0; t < trials; ++t) {
        double w1 = rng.normal(), w2 = rng.normal(), w3 = rng.normal(), w4 = rng.normal();
        // shared middle weight w3 between two paths
        const double p1 = w1 * w3;
        const double p2 = w2 * w4;
        sx += p1;
        sy += p2;
        sxy += p1 * p2;
    }
    const double cov = sxy / trials - (sx / trials) * (sy / trials);
    CHECK(std::abs(cov) < 3.0 / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("aligned/reversed clean runs output the center bit (scaled-down unit tier)") {
    AlignedConfig cfg;
    cfg.input_n = 7;
    cfg.channels = 10;
    cfg.noisy = false;
    cfg.seed = 321;
    const auto runs = aligned_reversed_experiment(cfg, 5);
    int center = 0, converged = 0;
    for (const auto& r : runs) {
        if (!r.converged) continue;
        ++converged;
        CHECK(r.final_cost < 0.02);
        if (r.reversed_matches_center) ++center;
    }
    CHECK(converged >= 4);
    CHECK(center >= converged - 1);
}

TEST_CASE("cost threshold forces |tanh| > 0.5 so outputs round to +-1") {
    // mean (y - tanh)^2 < 0.02 with y = +-1 forces tanh within 0.141 of y.
    const double worst = std::sqrt(0.02);
    CHECK(1.0 - worst > 0.5);
}

TEST_CASE("sensitivity: exact zero beyond the receptive field of a 3^D+1^D stack") {
    // Single 3^3 conv layer net: receptive field radius 1, so any input bit
    // at L1 distance > 3 cannot move the center output.
    Network net = build_decoder_network(3, 5, 4711);
    LatticeGeometry geom(3, 9);
    const auto pts = sensitivity_vs_distance(net, geom, {0, 4, 5, 6}, 10, 0.15, 99);
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].mean_abs_delta > 0.0);
    for (size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].mean_abs_delta == 0.0);
    CHECK_THROWS_AS(sensitivity_vs_distance(net, geom, {100}, 5, 0.15, 1), std::invalid_argument);
}
