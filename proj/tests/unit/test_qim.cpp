#include "helpers.hpp"

#include "meshwm/error.hpp"
#include "meshwm/qim.hpp"
#include "meshwm/rng.hpp"
#include "meshwm/stability.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace meshwm;

namespace {

// nearest point of coset u by scanning lattice indices around x
double coset_search(double x, int u, double delta)
{
    const double d = (u == 0 ? 1.0 : -1.0) * delta / 4;
    double best = 0.0, best_dist = INFINITY;
    const long c = std::lround(x / delta);
    for (long k = c - 3; k <= c + 3; ++k) {
        const double pt = k * delta + d;
        if (std::abs(pt - x) < best_dist) {
            best_dist = std::abs(pt - x);
            best = pt;
        }
    }
    return best;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

std::vector<std::uint8_t> random_bits(Rng& rng, std::size_t n)
{
    std::vector<std::uint8_t> b(n);
    for (auto& x : b)
        x = rng.bit();
    return b;
}

std::vector<std::uint32_t> carriers(const Mesh& m, std::size_t count)
{
    return interleave_selection(select_embedding_vertices(stability_rank(m), count), 1);
}

} // namespace

TEST_CASE("qim_quantize: examples")
{
    CHECK(qim_quantize(0.3, 0, 1.0) == doctest::Approx(0.25));
    CHECK(qim_quantize(0.3, 1, 1.0) == doctest::Approx(0.75));
    CHECK(qim_quantize(0.25, 0, 1.0) == 0.25);
    CHECK_THROWS_AS(qim_quantize(NAN, 0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(qim_quantize(0.1, 0, 0.0), InvalidArgument);
}

TEST_CASE("qim_quantize: matches exhaustive coset search, idempotent, within delta/2")
{
    Rng rng(1);
    for (int i = 0; i < 20000; ++i) {
        const double delta = rng.uniform(0.001, 2.0);
        const double x = rng.uniform(-10, 10);
        for (int u = 0; u < 2; ++u) {
            const double q = qim_quantize(x, u, delta);
            CHECK(std::abs(q - coset_search(x, u, delta)) < 1e-12 * std::max(1.0, std::abs(x)));
            CHECK(std::abs(qim_quantize(q, u, delta) - q) < 1e-12 * std::max(1.0, std::abs(x)));
            CHECK(std::abs(q - x) <= delta / 2 * (1 + 1e-12));
        }
    }
}

TEST_CASE("qim_detect: examples and tie rule")
{
    CHECK(qim_detect(0.3, 1.0) == 0);
    CHECK(qim_detect(0.75, 1.0) == 1);
    CHECK(qim_detect(0.5, 1.0) == 0); // midpoint between 0.25 and 0.75
    CHECK(qim_detect(0.0, 1.0) == 0);
    CHECK_THROWS_AS(qim_detect(INFINITY, 1.0), InvalidArgument);
}

TEST_CASE("qim_detect: correct for any error below delta/4")
{
    const double delta = 0.37;
    Rng rng(2);
    for (int i = 0; i < 5000; ++i) {
        const double x = rng.uniform(-5, 5);
        const int u = rng.bit();
        const double q = qim_quantize(x, u, delta);
        const double eps = 1e-9;
        CHECK(qim_detect(q + (delta / 4 - eps), delta) == u);
        CHECK(qim_detect(q - (delta / 4 - eps), delta) == u);
    }
}

TEST_CASE("coset separation is delta/2")
{
    const double delta = 0.8;
    double best = INFINITY;
    for (long a = -20; a <= 20; ++a)
        for (long b = -20; b <= 20; ++b)
            best = std::min(best, std::abs((a * delta + delta / 4) - (b * delta - delta / 4)));
    CHECK(best == doctest::Approx(delta / 2));
}

TEST_CASE("quantization MSE is delta^2/12")
{
    const double delta = 0.2;
    Rng rng(3);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform(0.0, delta);
        const double e = qim_quantize(x, i & 1, delta) - x;
        sum += e * e;
    }
    CHECK(sum / n == doctest::Approx(delta * delta / 12).epsilon(0.02));
}

TEST_CASE("sqim_embed: worked example")
{
    const double s = 1.0 / std::sqrt(2.0);
    const std::vector<double> x{0.1, 0.2}, p{s, s};
    const auto y = sqim_embed(x, p, 1, 1.0);
    // x.p = 0.21213, Q_1 = -0.25, displacement -0.46213 p
    CHECK(y[0] == doctest::Approx(-0.2267767).epsilon(1e-6));
    CHECK(y[1] == doctest::Approx(-0.1267767).epsilon(1e-6));
    CHECK(dot(y, p) == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(sqim_detect(y, p, 1.0) == 1);
    CHECK_THROWS_AS(sqim_embed(x, std::vector<double>{1.0}, 0, 1.0), InvalidArgument);
}

TEST_CASE("sqim_embed: L=1 reduces to scalar QIM; fixed point")
{
    const std::vector<double> p{1.0};
    for (double x : {-1.3, 0.0, 0.3, 2.71}) {
        CHECK(sqim_embed(std::vector<double>{x}, p, 1, 0.5)[0] == doctest::Approx(qim_quantize(x, 1, 0.5)));
        CHECK(sqim_detect(std::vector<double>{x}, p, 0.5) == qim_detect(x, 0.5));
    }
    const double s = 1.0 / std::sqrt(2.0);
    const std::vector<double> pp{s, s};
    const std::vector<double> on{0.25 / std::sqrt(2.0), 0.25 / std::sqrt(2.0)};
    const auto y = sqim_embed(on, pp, 0, 1.0);
    CHECK(std::abs(y[0] - on[0]) < 1e-15);
    CHECK(std::abs(y[1] - on[1]) < 1e-15);
}

TEST_CASE("sqim: distortion bound and noise margin")
{
    Rng rng(4);
    const double delta = 0.05;
    std::size_t errors = 0;
    for (int t = 0; t < 100000; ++t) {
        const std::size_t L = 1 + t % 6;
        const auto p = generate_projection(t, L);
        std::vector<double> x(L);
        for (auto& v : x)
            v = rng.uniform(0.5, 1.5);
        const int u = rng.bit();
        auto y = sqim_embed(x, p, u, delta);
        double dist = 0.0;
        for (std::size_t i = 0; i < L; ++i)
            dist += (y[i] - x[i]) * (y[i] - x[i]);
        CHECK(std::sqrt(dist) <= delta / 2 * (1 + 1e-12));
        CHECK(std::abs(dot(y, p) - qim_quantize(dot(x, p), u, delta)) < 1e-12);

        // noise whose projection is below delta/4
        std::vector<double> n(L);
        for (auto& v : n)
            v = rng.normal();
        const double proj = dot(n, p);
        const double target = rng.uniform(-1, 1) * (delta / 4 - 1e-6);
        for (std::size_t i = 0; i < L; ++i)
            y[i] += n[i] + (target - proj) * p[i];
        errors += sqim_detect(y, p, delta) != u;
    }
    CHECK(errors == 0);
}

TEST_CASE("generate_projection")
{
    const auto a = generate_projection(42, 4);
    CHECK(a == generate_projection(42, 4));
    for (double v : a)
        CHECK(std::abs(std::abs(v) - 0.5) < 1e-15);
    CHECK(dot(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(generate_projection(42, 4, 1) == generate_projection(42, 4, 1));

    // distinct keys give distinct vectors with probability about 1 - 2^-L
    std::size_t same = 0;
    const std::size_t L = 8, trials = 4000;
    for (std::size_t k = 0; k < trials; ++k)
        same += generate_projection(k, L) == generate_projection(k + 100000, L);
    CHECK(static_cast<double>(same) / trials < 3.0 / 256);
    CHECK(generate_projection(1, 1) == std::vector<double>{generate_projection(1, 1)[0]});
    CHECK(std::abs(generate_projection(1, 1)[0]) == 1.0);
}

TEST_CASE("lattice_residual")
{
    CHECK(lattice_residual(0.25, 1.0) < 1e-15);
    CHECK(lattice_residual(-0.25, 1.0) < 1e-15);
    CHECK(lattice_residual(0.5, 1.0) == doctest::Approx(0.25));
    CHECK(lattice_residual(0.3, 1.0) == doctest::Approx(0.05));
    CHECK(lattice_residual(0.0103, 0.01) == doctest::Approx(0.22));
}

TEST_CASE("embed_bits_in_mesh: noiseless round trip with L=1 and 1000 bits")
{
    const Mesh m = make_feature_sphere(7, 24);
    const auto sel = carriers(m, 1000);
    Rng rng(9);
    const auto bits = random_bits(rng, 1000);
    QimConfig cfg;
    std::vector<std::uint32_t> unsettled;
    const Mesh marked = embed_bits_in_mesh(m, sel, bits, cfg, CentroidMode::Surface, &unsettled);
    const auto out = extract_bits_from_mesh(marked, sel, cfg);
    REQUIRE(out.size() == bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        CHECK(out[i] == bits[i]);

    // each carrier sits on the lattice of the marked mesh's own frame
    const auto frame = compute_frame_center(marked, CentroidMode::Surface);
    for (auto v : sel)
        CHECK(lattice_residual((marked.vertex(v) - frame.origin).norm() / frame.scale_ref, cfg.delta) <
              kLatticeTolerance);

    // only the angles of carriers change, other vertices are untouched
    const std::set<std::uint32_t> in_sel(sel.begin(), sel.end());
    for (std::uint32_t v = 0; v < m.vertex_count(); ++v) {
        if (in_sel.count(v)) {
            const Point3 a = (m.vertex(v) - frame.origin).normalized(), b = (marked.vertex(v) - frame.origin).normalized();
            CHECK((a - b).norm() < 1e-12);
        } else {
            CHECK(marked.vertex(v) == m.vertex(v));
        }
    }

    // per-vertex displacement stays within (delta/2) scale_ref for settled blocks
    const std::set<std::uint32_t> bad(unsettled.begin(), unsettled.end());
    for (auto v : sel)
        if (!bad.count(v))
            CHECK((marked.vertex(v) - m.vertex(v)).norm() <= 0.5 * cfg.delta * frame.scale_ref * (1 + 1e-9));
    if (bad.empty())
        CHECK(hausdorff(m.vertices(), marked.vertices()) <= 0.5 * cfg.delta * frame.scale_ref * (1 + 1e-9));
}

TEST_CASE("embed_bits_in_mesh: spreading length 3")
{
    const Mesh m = make_spiky_torus(3, 60, 30);
    const auto sel = carriers(m, 300);
    Rng rng(10);
    const auto bits = random_bits(rng, 100);
    QimConfig cfg;
    cfg.spreading_length = 3;
    cfg.key = 5;
    const Mesh marked = embed_bits_in_mesh(m, sel, bits, cfg);
    const auto out = extract_bits_from_mesh(marked, sel, cfg);
    for (std::size_t i = 0; i < bits.size(); ++i)
        CHECK(out[i] == bits[i]);
}

TEST_CASE("embed_bits_in_mesh: argument errors")
{
    const Mesh m = make_feature_sphere(1, 8);
    QimConfig cfg;
    const std::vector<std::uint8_t> bits{1, 0};
    CHECK_THROWS_AS(embed_bits_in_mesh(m, std::vector<std::uint32_t>{1}, bits, cfg), CapabilityError);
    CHECK_THROWS_AS(embed_bits_in_mesh(m, std::vector<std::uint32_t>{1, 1}, bits, cfg), InvalidArgument);
    cfg.spreading_length = 2;
    CHECK_THROWS_AS(extract_bits_from_mesh(m, std::vector<std::uint32_t>{1, 2, 3}, cfg), InvalidArgument);
    cfg.delta = -1;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("embed and extract are invariant to rotation, translation and uniform scale")
{
    const Mesh m = make_terrain(4, 60);
    const auto sel = carriers(m, 400);
    Rng rng(12);
    const auto bits = random_bits(rng, 400);
    QimConfig cfg;
    const Mesh marked = embed_bits_in_mesh(m, sel, bits, cfg);
    for (int t = 0; t < 5; ++t) {
        Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
        q.normalize();
        const Point3 shift(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
        const double s = rng.uniform(0.1, 20);
        std::vector<Point3> v = marked.vertices();
        for (auto& p : v)
            p = s * (q * p) + shift;
        const auto out = extract_bits_from_mesh(marked.with_vertices(v), sel, cfg);
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < bits.size(); ++i)
            wrong += out[i] != bits[i];
        CHECK(wrong == 0);
    }
}

TEST_CASE("extraction tolerates radial noise below delta/8")
{
    const Mesh m = make_feature_sphere(2, 16);
    const auto sel = carriers(m, 200);
    QimConfig cfg;
    const auto frame = compute_frame_center(m, CentroidMode::Surface);
    Rng rng(13);
    std::size_t wrong = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto bits = random_bits(rng, sel.size());
        Mesh marked = embed_bits_with_frame(m, sel, bits, cfg, frame);
        std::vector<Point3> v = marked.vertices();
        for (auto c : sel) {
            const Point3 d = v[c] - frame.origin;
            const double r = d.norm();
            v[c] = frame.origin + d * ((r + rng.uniform(-1, 1) * cfg.delta / 8 * frame.scale_ref) / r);
        }
        const auto out = extract_bits_with_frame(marked.with_vertices(v), sel, cfg, frame);
        for (std::size_t i = 0; i < bits.size(); ++i)
            wrong += out[i] != bits[i];
    }
    CHECK(wrong == 0);
}

TEST_CASE("partial block detection renormalizes the surviving projection")
{
    const Mesh m = make_feature_sphere(6, 16);
    const auto sel = carriers(m, 200);
    QimConfig cfg;
    cfg.spreading_length = 2;
    cfg.key = 77;
    const auto frame = compute_frame_center(m, CentroidMode::Surface);
    Rng rng(14);
    const auto bits = random_bits(rng, 100);
    const Mesh marked = embed_bits_with_frame(m, sel, bits, cfg, frame);

    auto damaged = sel;
    for (std::size_t j = 0; j < 100; ++j)
        damaged[2 * j + (j % 2)] = kMissingVertex;
    damaged[10] = damaged[11] = kMissingVertex; // block 5 entirely gone

    const auto out = extract_bits_with_frame(marked, damaged, cfg, frame);
    for (std::size_t j = 0; j < 100; ++j) {
        if (j == 5) {
            CHECK(out[j] == kDeletedBit);
            continue;
        }
        // scalar QIM on the survivor with p reduced to its sign
        const std::size_t slot = 2 * j + 1 - (j % 2);
        const auto p = generate_projection(cfg.key, 2, j);
        const double r = (marked.vertex(sel[slot]) - frame.origin).norm() / frame.scale_ref;
        const double sign = p[slot % 2] > 0 ? 1.0 : -1.0;
        CHECK(out[j] == qim_detect(sign * r, cfg.delta));
    }
}
