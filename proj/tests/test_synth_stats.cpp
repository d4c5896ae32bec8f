#include "oracles.hpp"

#include "intdim/error.hpp"
#include "intdim/estimators.hpp"
#include "intdim/dataset.hpp"
#include "intdim/parallel.hpp"
#include "intdim/stats.hpp"
#include "intdim/synth.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace intdim;

TEST_CASE("random orthonormal basis") {
    for (auto [n, d] : {std::pair<std::size_t, std::size_t>{128, 8}, {10, 10}, {64, 1}}) {
        const auto q = random_orthonormal(n, d, 5);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                double s = 0.0;
                for (std::size_t r = 0; r < n; ++r)
                    s += q[a * n + r] * q[b * n + r];
                REQUIRE(std::abs(s - (a == b ? 1.0 : 0.0)) < 1e-10);
            }
    }
    CHECK(random_orthonormal(20, 3, 1) == random_orthonormal(20, 3, 1));
    CHECK(random_orthonormal(20, 3, 1) != random_orthonormal(20, 3, 2));
}

TEST_CASE("generated sets are isometric images of their latent samples") {
    for (auto kind : {SyntheticKind::Hypercube, SyntheticKind::Hypersphere, SyntheticKind::Affine}) {
        const SyntheticSpec spec{kind, 3, 40, 200, 11};
        const auto ps = generate(spec);
        const auto z = latent_samples(spec);
        const auto l = latent_dim(spec);
        CHECK(l == (kind == SyntheticKind::Hypersphere ? 4u : 3u));
        CHECK(ps.dim() == 40);
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = i + 1; j < 20; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < l; ++c)
                    s += (z[i * l + c] - z[j * l + c]) * (z[i * l + c] - z[j * l + c]);
                REQUIRE(std::sqrt(oracle::dist2(ps, i, j)) == doctest::Approx(std::sqrt(s)).epsilon(1e-9));
            }
        // Q^T recovers the latent coordinates up to the offset.
        if (kind == SyntheticKind::Hypercube) {
            const auto q = embedding_basis(spec);
            for (std::size_t c = 0; c < 3; ++c) {
                double s = 0.0;
                for (std::size_t r = 0; r < 40; ++r)
                    s += q[c * 40 + r] * ps.row(7)[r];
                CHECK(s == doctest::Approx(z[7 * 3 + c]).epsilon(1e-10));
            }
        }
        if (kind == SyntheticKind::Hypersphere)
            for (std::size_t i = 0; i < 10; ++i) {
                double s = 0.0;
                for (std::size_t c = 0; c < l; ++c)
                    s += z[i * l + c] * z[i * l + c];
                CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
            }
    }
}

TEST_CASE("generate edge cases") {
    const auto id = generate({SyntheticKind::Hypercube, 5, 5, 100, 3});
    for (double v : id.data())
        REQUIRE((v >= 0.0 && v <= 1.0));
    CHECK(generate({SyntheticKind::Hypercube, 5, 9, 50, 3}) == generate({SyntheticKind::Hypercube, 5, 9, 50, 3}));
    CHECK_THROWS_AS(generate({SyntheticKind::Hypercube, 6, 5, 10, 0}), DatasetError);
    CHECK_THROWS_AS(generate({SyntheticKind::Hypersphere, 5, 5, 10, 0}), DatasetError);
    CHECK_THROWS_AS(generate({SyntheticKind::Hypercube, 0, 5, 10, 0}), DatasetError);
}

TEST_CASE("generation does not depend on thread count") {
    const SyntheticSpec spec{SyntheticKind::Hypersphere, 4, 30, 3000, 8};
    set_max_threads(1);
    const auto a = generate(spec);
    set_max_threads(3);
    const auto b = generate(spec);
    set_max_threads(0);
    CHECK(a == b);
}

TEST_CASE("hypercube noise") {
    const auto base = generate({SyntheticKind::Hypercube, 2, 50, 300, 1});
    SUBCASE("replace-pixels overwrites a fixed set of coordinates") {
        const NoiseSpec spec{7, NoiseMode::ReplacePixels, 4};
        const auto pos = noise_positions(spec, 50);
        CHECK(pos.size() == 7);
        CHECK(std::is_sorted(pos.begin(), pos.end()));
        const std::set<std::size_t> fixed(pos.begin(), pos.end());
        const auto out = add_hypercube_noise(base, spec);
        std::size_t changed_rows = 0;
        for (std::size_t i = 0; i < base.size(); ++i) {
            bool changed = false;
            for (std::size_t c = 0; c < 50; ++c) {
                if (!fixed.count(c))
                    REQUIRE(out.row(i)[c] == base.row(i)[c]);
                else {
                    REQUIRE((out.row(i)[c] >= 0.0 && out.row(i)[c] <= 1.0));
                    changed |= out.row(i)[c] != base.row(i)[c];
                }
            }
            changed_rows += changed;
        }
        CHECK(changed_rows == base.size());
        CHECK(add_hypercube_noise(base, spec) == out);
    }
    SUBCASE("add mode moves rows within the span of one fixed basis") {
        const NoiseSpec spec{3, NoiseMode::Add, 6};
        const auto out = add_hypercube_noise(base, spec);
        // The displacement of every row lies in one 3-dim subspace: the
        // 4th singular direction of the stacked displacements vanishes.
        std::vector<std::vector<double>> delta;
        for (std::size_t i = 0; i < 5; ++i) {
            std::vector<double> v(50);
            for (std::size_t c = 0; c < 50; ++c)
                v[c] = out.row(i)[c] - base.row(i)[c];
            delta.push_back(v);
        }
        // Gram-Schmidt: the 4th and 5th residuals vanish.
        std::vector<std::vector<double>> basis;
        for (auto v : delta) {
            for (const auto& b : basis) {
                double p = 0.0;
                for (std::size_t c = 0; c < 50; ++c)
                    p += v[c] * b[c];
                for (std::size_t c = 0; c < 50; ++c)
                    v[c] -= p * b[c];
            }
            double nrm = 0.0;
            for (double x : v)
                nrm += x * x;
            nrm = std::sqrt(nrm);
            if (basis.size() < 3) {
                REQUIRE(nrm > 1e-6);
                for (auto& x : v)
                    x /= nrm;
                basis.push_back(v);
            } else {
                CHECK(nrm < 1e-9);
            }
        }
    }
    SUBCASE("invalid noise dimension") {
        CHECK_THROWS_AS(add_hypercube_noise(base, {0, NoiseMode::Add, 0}), DatasetError);
        CHECK_THROWS_AS(add_hypercube_noise(base, {51, NoiseMode::ReplacePixels, 0}), DatasetError);
    }
}

TEST_CASE("add-mode noise raises the estimate monotonically") {
    const auto base = generate({SyntheticKind::Hypercube, 3, 64, 10000, 12});
    auto spec = default_spec(EstimatorKind::Mle);
    spec.k = 10;
    double prev = estimate(base, spec).estimate;
    for (std::size_t dn : {2, 6, 12}) {
        const double e = estimate(add_hypercube_noise(base, {dn, NoiseMode::Add, 3}), spec).estimate;
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("summaries") {
    const std::vector<double> v{1.0, 2.0, 4.0};
    const auto s = summarize(v);
    const double mean = 7.0 / 3.0;
    const double var = ((1 - mean) * (1 - mean) + (2 - mean) * (2 - mean) + (4 - mean) * (4 - mean)) / 2.0;
    CHECK(oracle::rel(s.mean, mean) < 1e-15);
    CHECK(std::abs(s.std_error - std::sqrt(var / 3.0)) < 1e-12);
    const std::vector<double> one{5.0};
    CHECK(summarize(one).std_error == 0.0);
}

TEST_CASE("replicate_estimate") {
    const auto ps = generate({SyntheticKind::Hypercube, 4, 16, 3000, 3});
    auto spec = default_spec(EstimatorKind::Mle);
    const auto one = replicate_estimate(ps, spec, 1, 10);
    CHECK(one.std_error == 0.0);
    CHECK(one.per_replicate.size() == 1);

    const auto r = replicate_estimate(ps, spec, 5, 10, 1000);
    CHECK(r.per_replicate.size() == 5);
    const auto s = summarize(r.per_replicate);
    CHECK(r.estimate == s.mean);
    CHECK(std::abs(r.std_error - s.std_error) < 1e-12);
    // replicate i is the plain estimate on subsample(seed + i)
    auto plain = spec;
    plain.seed = 12;
    CHECK(r.per_replicate[2] == estimate(subsample(ps, 1000, 12), plain).estimate);

    const auto again = replicate_estimate(ps, spec, 5, 10, 1000);
    CHECK(again.per_replicate == r.per_replicate);
    CHECK_THROWS_AS(replicate_estimate(ps, spec, 0, 1), EstimatorError);
}

TEST_CASE("convergence curve") {
    const auto ps = generate({SyntheticKind::Hypercube, 10, 20, 20000, 10});
    auto spec = default_spec(EstimatorKind::Mle);
    const std::vector<std::size_t> sizes{500, 2000, 10000, 20000};
    const auto c = convergence_curve(ps, spec, sizes, 3, 1);
    REQUIRE(c.mean_estimates.size() == 4);
    // Estimates climb towards 10 as the sample grows.
    CHECK(c.mean_estimates[0] < c.mean_estimates[2]);
    CHECK(c.mean_estimates[1] < c.mean_estimates[3]);
    CHECK(std::abs(c.mean_estimates[3] - 10.0) < std::abs(c.mean_estimates[0] - 10.0));
    CHECK(c.std_errors[3] == 0.0); // every replicate sees all rows
    CHECK(c.std_errors[0] >= c.std_errors[2]);

    const auto single = convergence_curve(ps, spec, {20000}, 1, 4);
    CHECK(single.mean_estimates[0] == estimate(ps, spec).estimate);

    const auto again = convergence_curve(ps, spec, sizes, 3, 1);
    CHECK(again.mean_estimates == c.mean_estimates);
    CHECK(again.std_errors == c.std_errors);

    std::ostringstream csv;
    write_curve_csv(c, csv);
    CHECK(csv.str().rfind("m,mean,stderr,R\n500,", 0) == 0);

    CHECK_THROWS_AS(convergence_curve(ps, spec, {2000, 500}, 2, 1), EstimatorError);
    CHECK_THROWS_AS(convergence_curve(ps, spec, {5}, 2, 1), EstimatorError);
    CHECK_THROWS_AS(convergence_curve(ps, spec, {30000}, 2, 1), EstimatorError);
}
