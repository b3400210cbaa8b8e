#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "toricnn/code.hpp"

using namespace toricnn;

TEST_CASE("sample_error endpoints: p=0 empty, p=1 full") {
    LatticeGeometry geom(4, 2);
    Rng rng(1);
    CHECK(sample_error(geom, 0.0, rng).bits.count() == 0);
    CHECK(sample_error(geom, 1.0, rng).bits.count() == static_cast<size_t>(geom.n_faces()));
    CHECK_THROWS_AS(sample_error(geom, 1.5, rng), std::invalid_argument);
}

TEST_CASE("sample_error mean weight concentrates: D=4, L=3, p=0.05") {
    LatticeGeometry geom(4, 3);
    const double p = 0.05;
    const long trials = 10000;
    double total = 0.0;
    for (long t = 0; t < trials; ++t) {
        Rng rng = Rng::split(42, t);
        total += static_cast<double>(sample_error(geom, p, rng).bits.count());
    }
    const double n = static_cast<double>(geom.n_faces());
    const double mean = total / trials;
    const double sigma = std::sqrt(n * p * (1 - p) / trials);
    CHECK(std::abs(mean - n * p) < 3 * sigma);
}

TEST_CASE("single-face error has syndrome weight 4 (distance of the syndrome code)") {
    LatticeGeometry geom(4, 3);
    ErrorConfig e(geom);
    e.bits.set(17, true);
    CHECK(syndrome_of(e).weight() == 4);
}

TEST_CASE("Z-stabilizers and logical sheets have empty syndrome") {
    for (int dim : {3, 4}) {
        LatticeGeometry geom(dim, 3);
        for (long c = 0; c < geom.n_cubes(); c += 5) {
            ErrorConfig e(geom);
            long faces[6];
            geom.cube_incident_faces_flat(c, faces);
            for (long f : faces) e.bits.toggle(f);
            CHECK(syndrome_of(e).weight() == 0);
        }
        for (const auto& sheet : logical_sheets(geom)) {
            ErrorConfig e(geom);
            for (const auto& f : sheet.faces(geom)) e.bits.set(geom.cell_to_index(f), true);
            CHECK(syndrome_of(e).weight() == 0);
        }
    }
}

TEST_CASE("syndrome validity: produced syndromes valid, single bit invalid, zero valid") {
    LatticeGeometry geom(4, 3);
    for (long t = 0; t < 1000; ++t) {
        Rng rng = Rng::split(7, t);
        CHECK(syndrome_is_valid(syndrome_of(sample_error(geom, 0.08, rng))));
    }
    Syndrome s(geom);
    CHECK(syndrome_is_valid(s));
    s.bits.set(5, true);
    CHECK(!syndrome_is_valid(s));
}

TEST_CASE("syndrome linearity and apply_flips bookkeeping at L=2") {
    LatticeGeometry geom(3, 2);
    for (long t = 0; t < 200; ++t) {
        Rng rng = Rng::split(11, t);
        const ErrorConfig e1 = sample_error(geom, 0.3, rng);
        const ErrorConfig e2 = sample_error(geom, 0.3, rng);
        ErrorConfig both = e1;
        both.bits ^= e2.bits;
        CHECK(syndrome_of(both).bits == (syndrome_of(e1).bits ^ syndrome_of(e2).bits));

        const auto flips = e2.bits.set_bits();
        std::vector<long> flips_l(flips.begin(), flips.end());
        const ErrorConfig applied = apply_flips(e1, flips_l);
        CHECK(applied.bits == both.bits);
    }
}

TEST_CASE("flip involution: same face twice restores the error") {
    LatticeGeometry geom(4, 2);
    Rng rng(3);
    const ErrorConfig e = sample_error(geom, 0.2, rng);
    const ErrorConfig twice = apply_flips(e, {10, 10});
    CHECK(twice.bits == e.bits);
    const auto all = e.bits.set_bits();
    std::vector<long> all_l(all.begin(), all.end());
    CHECK(apply_flips(e, all_l).bits.count() == 0);
    CHECK_THROWS_AS(apply_flips(e, {geom.n_faces()}), std::out_of_range);
}

TEST_CASE("logical_failure classifies stabilizers and sheets") {
    for (int dim : {3, 4}) {
        LatticeGeometry geom(dim, 3);
        ErrorConfig stab(geom);
        long faces[6];
        geom.cube_incident_faces_flat(2, faces);
        for (long f : faces) stab.bits.toggle(f);
        const auto cls = logical_failure(stab);
        CHECK(!cls.nontrivial);
        CHECK(cls.class_bits == 0);

        for (int r = 0; r < geom.n_axis_pairs(); ++r) {
            const auto sheet = logical_sheets(geom)[r];
            ErrorConfig e(geom);
            for (const auto& f : sheet.faces(geom)) e.bits.set(geom.cell_to_index(f), true);
            const auto sheet_cls = logical_failure(e);
            CHECK(sheet_cls.nontrivial);
            CHECK(sheet_cls.class_bits == (1u << r));
        }
    }
}

TEST_CASE("logical_failure rejects nonzero syndromes") {
    LatticeGeometry geom(3, 2);
    ErrorConfig e(geom);
    e.bits.set(0, true);
    CHECK_THROWS_AS(logical_failure(e), std::invalid_argument);
}

TEST_CASE("two parallel sheets are a stabilizer product (GF(2) oracle), L=2") {
    for (int dim : {3, 4}) {
        LatticeGeometry geom(dim, 2);
        LogicalSheet s0{{0, 1}, {0, 0, 0, 0}};
        LogicalSheet s1{{0, 1}, {0, 0, 1, 1}};
        ErrorConfig e(geom);
        for (const auto& f : s0.faces(geom)) e.bits.toggle(geom.cell_to_index(f));
        for (const auto& f : s1.faces(geom)) e.bits.toggle(geom.cell_to_index(f));
        CHECK(syndrome_of(e).weight() == 0);
        CHECK(!logical_failure(e).nontrivial);
        // Independent check against the stabilizer generator matrix.
        CHECK(cube_stabilizer_matrix(geom).in_row_space(e.bits));
        // A single sheet is NOT in the stabilizer row space.
        ErrorConfig single(geom);
        for (const auto& f : s0.faces(geom)) single.bits.toggle(geom.cell_to_index(f));
        CHECK(!cube_stabilizer_matrix(geom).in_row_space(single.bits));
    }
}

TEST_CASE("logical class bits match stabilizer-group membership exhaustively for weight-2 residuals") {
    LatticeGeometry geom(3, 2);
    const auto stab = cube_stabilizer_matrix(geom);
    // All weight-2 zero-syndrome residuals are... none (distance 4), so use
    // pairs of sheets and stabilizer elements as residual candidates.
    for (long c = 0; c < geom.n_cubes(); ++c) {
        ErrorConfig e(geom);
        long faces[6];
        geom.cube_incident_faces_flat(c, faces);
        for (long f : faces) e.bits.toggle(f);
        CHECK(logical_failure(e).nontrivial == !stab.in_row_space(e.bits));
    }
}

TEST_CASE("logical class bits do not depend on the crossing-sheet offset (L=2)") {
    LatticeGeometry geom(4, 2);
    for (long t = 0; t < 50; ++t) {
        Rng rng = Rng::split(19, t);
        ErrorConfig e = sample_error(geom, 0.2, rng);
        // Project to zero syndrome by adding the syndrome's source back.
        // Instead use known zero-syndrome residuals: stabilizers + sheets.
        ErrorConfig res(geom);
        long faces[6];
        geom.cube_incident_faces_flat(static_cast<long>(rng.below(geom.n_cubes())), faces);
        for (long f : faces) res.bits.toggle(f);
        if (rng.bernoulli(0.5)) {
            const auto sheet = logical_sheets(geom)[rng.below(6)];
            for (const auto& f : sheet.faces(geom)) res.bits.toggle(geom.cell_to_index(f));
        }
        const auto c0 = logical_failure_at_offset(res, 0);
        const auto c1 = logical_failure_at_offset(res, 1);
        CHECK(c0.class_bits == c1.class_bits);
        (void)e;
    }
}

TEST_CASE("syndrome code rank is L^4 - 1") {
    LatticeGeometry g2(4, 2);
    CHECK(syndrome_code_rank(g2) == 15);
    CHECK(4 * 16 - syndrome_code_rank(g2) == 49); // 3 L^4 + 1 encoded bits
    LatticeGeometry g3(4, 3);
    CHECK(syndrome_code_rank(g3) == 80);
}

TEST_CASE("adding a face boundary maps valid syndromes to valid syndromes") {
    LatticeGeometry geom(4, 2);
    Rng rng(5);
    Syndrome s = syndrome_of(sample_error(geom, 0.1, rng));
    for (long f = 0; f < geom.n_faces(); f += 13) {
        Syndrome s2 = s;
        xor_face_boundary(geom, f, s2.bits);
        CHECK(syndrome_is_valid(s2));
    }
}

TEST_CASE("corrupt_syndrome endpoints and concentration") {
    LatticeGeometry geom(4, 3);
    Rng rng(9);
    const Syndrome s = syndrome_of(sample_error(geom, 0.05, rng));
    Rng r2(10);
    CHECK(corrupt_syndrome(s, 0.0, r2).bits == s.bits);
    const Syndrome full = corrupt_syndrome(s, 1.0, r2);
    for (long e = 0; e < geom.n_edges(); ++e) CHECK(full.bits.get(e) == !s.bits.get(e));

    const double q = 0.025;
    const long trials = 10000;
    long flipped = 0;
    for (long t = 0; t < trials; ++t) {
        Rng r = Rng::split(77, t);
        const Syndrome c = corrupt_syndrome(s, q, r);
        flipped += static_cast<long>((c.bits ^ s.bits).count());
    }
    const double n = static_cast<double>(geom.n_edges()) * trials;
    const double frac = flipped / n;
    const double sigma = std::sqrt(q * (1 - q) / n);
    CHECK(std::abs(frac - q) < 3 * sigma);
}

TEST_CASE("stabilizer kernel: syndrome and class invariant under cube stabilizers") {
    LatticeGeometry geom(4, 2);
    for (long t = 0; t < 30; ++t) {
        Rng rng = Rng::split(23, t);
        const ErrorConfig e = sample_error(geom, 0.15, rng);
        ErrorConfig e2 = e;
        long faces[6];
        geom.cube_incident_faces_flat(static_cast<long>(rng.below(geom.n_cubes())), faces);
        for (long f : faces) e2.bits.toggle(f);
        CHECK(syndrome_of(e).bits == syndrome_of(e2).bits);
    }
}

TEST_CASE("oracle: zero syndrome and single-face syndromes") {
    LatticeGeometry geom(3, 2);
    Syndrome zero(geom);
    auto res = exhaustive_oracle_decode(geom, zero, 2);
    REQUIRE(res.has_value());
    CHECK(res->bits.count() == 0);

    for (long f = 0; f < geom.n_faces(); ++f) {
        ErrorConfig e(geom);
        e.bits.set(f, true);
        auto dec = exhaustive_oracle_decode(geom, syndrome_of(e), 1);
        REQUIRE(dec.has_value());
        CHECK(dec->bits.count() == 1);
        CHECK(dec->bits.get(f));
    }
    CHECK_THROWS_AS(exhaustive_oracle_decode(geom, zero, 4), std::invalid_argument);
}

TEST_CASE("oracle on all weight-2 errors at D=3, L=2: min-weight correction up to class ambiguity") {
    LatticeGeometry geom(3, 2);
    const auto stab = cube_stabilizer_matrix(geom);
    const long n = geom.n_faces();
    long trivial_diff = 0, class_mismatch = 0;
    for (long f = 0; f < n; ++f)
        for (long g = f + 1; g < n; ++g) {
            ErrorConfig truth(geom);
            truth.bits.set(f, true);
            truth.bits.set(g, true);
            const Syndrome s = syndrome_of(truth);
            auto dec = exhaustive_oracle_decode(geom, s, 2);
            REQUIRE(dec.has_value());
            CHECK(dec->bits.count() <= 2);
            ErrorConfig diff = truth;
            diff.bits ^= dec->bits;
            CHECK(syndrome_of(diff).weight() == 0);
            if (logical_failure(diff).nontrivial) {
                // Only genuinely ambiguous cases may differ in class: the
                // truth itself must be another minimum-weight correction.
                CHECK(dec->bits.count() == truth.bits.count());
                ++class_mismatch;
            } else {
                CHECK(stab.in_row_space(diff.bits));
                ++trivial_diff;
            }
        }
    // Frozen from the exhaustive enumeration: 276 weight-2 errors total.
    // The 18 class mismatches are all exact weight ties (two equal-weight
    // corrections in different classes, e.g. the two halves of a logical
    // sheet); below half the distance no ambiguity exists.
    CHECK(trivial_diff + class_mismatch == 276);
    CHECK(trivial_diff == 258);
    CHECK(class_mismatch == 18);
}
