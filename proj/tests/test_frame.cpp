#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qn/activation.hpp"
#include "qn/frame.hpp"
#include "qn/quadrature.hpp"
#include "qn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

using namespace qn;

TEST_CASE("mother function normalizer matches frozen constants") {
    MotherFunction m1 = normalize_mother(1, 4.0);
    CHECK(m1.c_d == doctest::Approx(0.12520478022787150164).epsilon(1e-10));
    MotherFunction m2 = normalize_mother(2, 4.0);
    CHECK(m2.c_d == doctest::Approx(0.019894367746560915451).epsilon(1e-10));

    // unit integral, re-derived with an independent quadrature radius
    for (const MotherFunction& m : {m1, m2}) {
        double mass = integrate_radial([&](double rho) { return m.value_radial(rho); },
                                       m.n, m.r_max + 6.0, 131072);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }

    // the normalizing constant is insensitive to the truncation radius
    double mass_far = integrate_radial([&](double rho) { return sigmoid(16.0 - rho * rho); },
                                       1, 2.0 * m1.r_max, 131072);
    CHECK(1.0 / mass_far == doctest::Approx(m1.c_d).epsilon(1e-10));

    CHECK(m1.value({0.0}) <= m1.c_d);
    CHECK(m1.value({0.0}) == doctest::Approx(m1.c_d * sigmoid(16.0)).epsilon(1e-15));
    CHECK(m1.value_radial(5.0) > 0.0);
}

TEST_CASE("scaled kernels reduce to the mother function at scale zero") {
    MotherFunction m = normalize_mother(1, 4.0);
    for (double d : {0.0, 0.5, 2.0, 7.0})
        CHECK(kernel_S_radial(m, 0, d) == doctest::Approx(m.value_radial(d)).epsilon(1e-15));

    Vec x{1.25}, y{-0.75};
    CHECK(kernel_S(m, 3, x, y) == doctest::Approx(kernel_S(m, 3, y, x)).epsilon(1e-15));
    CHECK(kernel_S(m, 3, x, y) ==
          doctest::Approx(kernel_S_radial(m, 3, 2.0)).epsilon(1e-15));
}

TEST_CASE("scaled kernels keep unit mass across scales") {
    MotherFunction m = normalize_mother(1, 4.0);
    for (int k : {-2, 0, 3})
        CHECK(kernel_mass(m, k) == doctest::Approx(1.0).epsilon(1e-5));

    MotherFunction m2 = normalize_mother(2, 4.0);
    CHECK(kernel_mass(m2, 2) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("wavelet atoms satisfy the rescaling identity") {
    MotherFunction m = normalize_mother(1, 4.0);
    Rng rng(5150);
    for (int trial = 0; trial < 200; ++trial) {
        int k = -3 + static_cast<int>(rng.below(9));
        double b = rng.uniform(-5.0, 5.0);
        double x = rng.uniform(-20.0, 20.0);
        double direct = atom_psi(m, k, {b}, {x});
        double scale = std::pow(2.0, static_cast<double>(k) / m.n);
        double rescaled = std::pow(2.0, 0.5 * k) * atom_psi(m, 0, {0.0}, {scale * (x - b)});
        CHECK(std::abs(direct - rescaled) <= 1e-10);
    }

    MotherFunction m2 = normalize_mother(2, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        int k = -2 + static_cast<int>(rng.below(6));
        Vec b{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        Vec x{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
        double scale = std::pow(2.0, static_cast<double>(k) / m2.n);
        Vec arg{scale * (x[0] - b[0]), scale * (x[1] - b[1])};
        double rescaled = std::pow(2.0, 0.5 * k) * atom_psi(m2, 0, {0.0, 0.0}, arg);
        CHECK(std::abs(atom_psi(m2, k, b, x) - rescaled) <= 1e-10);
    }
}

TEST_CASE("wavelet atoms have vanishing integral and compact reach") {
    MotherFunction m = normalize_mother(1, 4.0);
    double mass = integrate_radial([&](double rho) { return atom_psi_radial(m, 0, rho); },
                                   1, 40.0, 262144);
    CHECK(std::abs(mass) <= 1e-5);

    CHECK(std::abs(atom_psi_radial(m, 0, 50.0)) < 1e-8);

    double radius = psi_support_radius(m);
    CHECK(radius == doctest::Approx(11.7338).epsilon(5e-3));
    // just inside the radius the atom still clears the cutoff scale
    CHECK(std::abs(atom_psi_radial(m, 0, radius + 1.0)) < 1e-8);
}

TEST_CASE("lattice spacing halves when the scale index advances by n") {
    CHECK(lattice_spacing(1, 0) == 1.0);
    CHECK(lattice_spacing(1, 1) == 0.5);
    CHECK(lattice_spacing(1, -1) == 2.0);
    CHECK(lattice_spacing(2, 2) == doctest::Approx(0.5));
    CHECK(lattice_spacing(2, 1) == doctest::Approx(std::pow(2.0, -0.5)));

    FrameAtom a{3, {2, -1}};
    Vec p = a.point(2);
    double h = lattice_spacing(2, 3);
    CHECK(p[0] == doctest::Approx(2.0 * h));
    CHECK(p[1] == doctest::Approx(-h));
}

TEST_CASE("grid construction covers the box plus the support margin") {
    MotherFunction m = normalize_mother(1, 4.0);
    auto atoms = build_grid(m, {0.0}, {4.0}, 0, 0);
    CHECK(atoms.size() == 27); // indices -11..15 for support radius ~11.73
    std::set<long long> idx;
    for (const auto& a : atoms) {
        CHECK(a.k == 0);
        idx.insert(a.idx[0]);
    }
    for (long long i : {0LL, 1LL, 2LL, 3LL}) CHECK(idx.count(i) == 1);

    // one scale step up in one dimension halves the spacing inside the box
    auto atoms01 = build_grid(m, {0.0}, {4.0}, 0, 1);
    std::size_t coarse_total = 0, coarse_in = 0, fine_in = 0;
    for (const auto& a : atoms01) {
        double pos = a.point(1)[0];
        if (a.k == 0) {
            ++coarse_total;
            coarse_in += pos >= 0.0 && pos <= 4.0;
        } else {
            CHECK(a.k == 1);
            fine_in += pos >= 0.0 && pos <= 4.0;
        }
    }
    CHECK(coarse_total == atoms.size());
    CHECK(coarse_in == 5);
    CHECK(fine_in == 9);

    CHECK(build_grid(m, {1.0}, {0.0}, 0, 2).empty());
    CHECK_THROWS_AS(build_grid(m, {0.0}, {4.0}, 0, 40), std::runtime_error);
    CHECK_THROWS_AS(build_grid(m, {0.0, 0.0}, {1.0, 1.0}, 0, 0), std::invalid_argument);
}

namespace {

FrameExpansion tiny_expansion(const MotherFunction& m) {
    FrameExpansion e;
    e.mother = m;
    e.atoms = {{0, {0}}, {0, {2}}, {1, {1}}};
    e.coeffs = {3.0, -5.0, 1.0};
    return e;
}

} // namespace

TEST_CASE("synthesis is linear in the coefficients") {
    MotherFunction m = normalize_mother(1, 4.0);
    FrameExpansion empty;
    empty.mother = m;
    CHECK(synthesize(empty, {0.3}) == 0.0);

    FrameExpansion one;
    one.mother = m;
    one.atoms = {{0, {0}}};
    one.coeffs = {2.0};
    CHECK(synthesize(one, {0.7}) ==
          doctest::Approx(2.0 * atom_psi(m, 0, {0.0}, {0.7})).epsilon(1e-15));

    FrameExpansion e = tiny_expansion(m);
    for (double x : {-1.0, 0.0, 0.4, 2.2}) {
        double sum = 0.0;
        for (std::size_t i = 0; i < e.atoms.size(); ++i)
            sum += e.coeffs[i] * atom_psi(m, e.atoms[i].k, e.atoms[i].point(m.n), {x});
        CHECK(synthesize(e, {x}) == doctest::Approx(sum).epsilon(1e-14));
    }
    CHECK(l1_frame_norm(e) == doctest::Approx(9.0));
}

TEST_CASE("greedy selection keeps the largest coefficients") {
    MotherFunction m = normalize_mother(1, 4.0);
    FrameExpansion e = tiny_expansion(m);

    FrameExpansion top2 = greedy_n_term(e, 2);
    REQUIRE(top2.coeffs.size() == 2);
    CHECK(l1_frame_norm(top2) == doctest::Approx(8.0));
    std::set<double> kept(top2.coeffs.begin(), top2.coeffs.end());
    CHECK(kept.count(-5.0) == 1);
    CHECK(kept.count(3.0) == 1);

    FrameExpansion all = greedy_n_term(e, 10);
    CHECK(all.coeffs.size() == 3);
    CHECK(l1_frame_norm(all) == doctest::Approx(l1_frame_norm(e)));

    FrameExpansion none = greedy_n_term(e, 0);
    CHECK(none.coeffs.empty());
}

TEST_CASE("greedy ties break toward the coarser scale then the lower index") {
    MotherFunction m = normalize_mother(1, 4.0);
    FrameExpansion e;
    e.mother = m;
    e.atoms = {{2, {0}}, {0, {4}}, {0, {1}}, {1, {0}}};
    e.coeffs = {2.0, 2.0, 2.0, 1.0};
    FrameExpansion kept = greedy_n_term(e, 2);
    REQUIRE(kept.atoms.size() == 2);
    // all three 2.0s tie; scale 0 wins, then index 1 before 4
    CHECK(kept.atoms[0].k == 0);
    CHECK(kept.atoms[0].idx[0] == 1);
    CHECK(kept.atoms[1].k == 0);
    CHECK(kept.atoms[1].idx[0] == 4);
}

TEST_CASE("tensor-grid distance computes exact simple cases") {
    auto zero = [](const Vec&) { return 0.0; };
    auto one = [](const Vec&) { return 1.0; };
    CHECK(l2_error(one, zero, {0.0}, {1.0}, 65) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(l2_error(one, one, {0.0}, {1.0}, 65) == 0.0);
    CHECK(l2_error(one, zero, {0.0, 0.0}, {1.0, 1.0}, 33) == doctest::Approx(1.0).epsilon(1e-12));

    auto linear = [](const Vec& x) { return x[0]; };
    CHECK(l2_error(linear, zero, {0.0}, {1.0}, 129) ==
          doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-10));

    // grid refinement barely moves the value on a smooth integrand
    MotherFunction m = normalize_mother(1, 4.0);
    auto f = [&](const Vec& x) { return atom_psi(m, 0, {0.0}, x); };
    double coarse = l2_error(f, zero, {-16.0}, {16.0}, 1025);
    double fine = l2_error(f, zero, {-16.0}, {16.0}, 2049);
    CHECK(std::abs(coarse - fine) < 1e-6);
    CHECK(coarse == doctest::Approx(0.2381).epsilon(2e-3));
}

TEST_CASE("random targets use distinct atoms with bounded magnitudes") {
    MotherFunction m = normalize_mother(1, 4.0);
    Rng rng(808);
    FrameExpansion e = make_random_expansion(m, {0.0}, {8.0}, 0, 4, 128, rng);
    REQUIRE(e.atoms.size() == 128);
    REQUIRE(e.coeffs.size() == 128);
    std::set<std::pair<int, long long>> seen;
    for (const auto& a : e.atoms) seen.insert({a.k, a.idx[0]});
    CHECK(seen.size() == 128);
    for (double c : e.coeffs) {
        CHECK(std::abs(c) >= 1.0);
        CHECK(std::abs(c) < 10.0);
    }

    Rng rng2(808);
    FrameExpansion e2 = make_random_expansion(m, {0.0}, {8.0}, 0, 4, 128, rng2);
    CHECK(e2.coeffs == e.coeffs);

    Rng rng3(9);
    CHECK_THROWS_AS(make_random_expansion(m, {0.0}, {1.0}, 0, 0, 100000, rng3),
                    std::invalid_argument);
}

TEST_CASE("greedy approximation error shrinks within the coefficient budget") {
    MotherFunction m = normalize_mother(1, 4.0);
    Rng rng(4242);
    FrameExpansion target = make_random_expansion(m, {0.0}, {8.0}, 0, 4, 96, rng);

    std::vector<std::size_t> ns{1, 2, 4, 8, 16, 32, 64, 96};
    auto rows = rate_experiment(target, ns, 1025);
    REQUIRE(rows.size() == ns.size());

    double l1 = l1_frame_norm(target);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        CHECK(row.error <= prev * (1.0 + 1e-12));
        prev = row.error;
        CHECK(row.bound == doctest::Approx(l1 / std::sqrt(row.n_kept + 1.0)).epsilon(1e-12));
        CHECK(row.error <= row.bound * (1.0 + 1e-6) + 1e-5);
        if (row.error > 0.0) {
            CHECK(row.log_ratio ==
                  doctest::Approx(std::log(row.error / l1) / std::log(row.n_kept + 1.0))
                      .epsilon(1e-12));
            CHECK(row.log_ratio <= -0.5 + 1e-6);
        }
    }
    // keeping every atom reproduces the target up to summation roundoff
    CHECK(rows.back().error <= 1e-12);
}
