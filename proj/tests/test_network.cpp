#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qn/network.hpp"
#include "qn/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

using namespace qn;

namespace {

Network golden_network() {
    Network net({{2, 2, FormClass::elliptic, Activation::sigmoid},
                 {2, 1, FormClass::affine, Activation::identity}});
    auto& p = net.params();
    p[0].W(0, 0) = 0.1;  p[0].W(0, 1) = -0.2;
    p[0].W(1, 0) = 0.3;  p[0].W(1, 1) = 0.4;
    p[0].s(0, 0) = 1.0;  p[0].s(0, 1) = 0.5;
    p[0].s(1, 0) = -0.5; p[0].s(1, 1) = 2.0;
    p[0].w_q = {0.7, -1.1};
    p[0].theta = {0.0, 0.25};
    p[1].W(0, 0) = 1.5;
    p[1].W(1, 0) = -2.5;
    p[1].theta = {0.1};
    return net;
}

Mat single_row(const Vec& x) {
    Mat m(1, x.size());
    for (std::size_t i = 0; i < x.size(); ++i) m(0, i) = x[i];
    return m;
}

} // namespace

TEST_CASE("two-layer reference network produces the frozen output") {
    Network net = golden_network();
    Vec out = net.forward_one({0.5, -1.0});
    REQUIRE(out.size() == 1);
    CHECK(out[0] == doctest::Approx(0.86535039351108401685).epsilon(1e-13));
}

TEST_CASE("saved reference file loads to the same network") {
    Network loaded = Network::from_json_file(std::string(QN_TEST_DATA_DIR) + "/network_v1.json");
    Vec out = loaded.forward_one({0.5, -1.0});
    REQUIRE(out.size() == 1);
    CHECK(out[0] == doctest::Approx(0.86535039351108401685).epsilon(1e-13));

    Network built = golden_network();
    CHECK(loaded.get_params() == built.get_params());
    REQUIRE(loaded.specs().size() == 2);
    CHECK(loaded.specs()[0].kind == FormClass::elliptic);
    CHECK(loaded.specs()[0].activation == Activation::sigmoid);
    CHECK(loaded.specs()[1].kind == FormClass::affine);
}

TEST_CASE("json round trip preserves parameters bit for bit") {
    Network net = golden_network();
    Network back = Network::from_json(net.to_json());
    CHECK(back.get_params() == net.get_params());
    CHECK(back.to_json() == net.to_json());

    auto tmp = std::filesystem::temp_directory_path() / "qn_net_roundtrip.json";
    net.save_json(tmp.string());
    Network file_back = Network::from_json_file(tmp.string());
    CHECK(file_back.get_params() == net.get_params());
    std::filesystem::remove(tmp);
}

TEST_CASE("unsupported serialization versions are rejected") {
    CHECK_THROWS_AS(Network::from_json("{\"format_version\": 2, \"layers\": []}"),
                    std::invalid_argument);
    CHECK_THROWS_AS(Network::from_json("{\"layers\": []}"), std::invalid_argument);
    CHECK_THROWS_AS(Network::from_json_file("/nonexistent/net.json"), std::runtime_error);
}

TEST_CASE("single neurons compute the documented values per kind") {
    // affine: plain W x + theta
    Network aff({{1, 1, FormClass::affine, Activation::identity}});
    aff.params()[0].W(0, 0) = 1.0;
    aff.params()[0].theta = {0.0};
    CHECK(aff.forward_one({2.0})[0] == doctest::Approx(2.0));

    // hyperbolic in one dimension: the single quadratic sign is negative
    Network hyp({{1, 1, FormClass::hyperbolic, Activation::identity}});
    hyp.params()[0].W(0, 0) = 2.0;
    hyp.params()[0].s(0, 0) = 3.0;
    hyp.params()[0].w_q = {0.5};
    hyp.params()[0].theta = {-1.0};
    CHECK(hyp.forward_one({2.0})[0] == doctest::Approx(-15.0));

    // parabolic: last input carries no quadratic term
    Network par({{2, 1, FormClass::parabolic, Activation::identity}});
    par.params()[0].W(0, 0) = 1.0;
    par.params()[0].W(1, 0) = 1.0;
    par.params()[0].s(0, 0) = 2.0;
    par.params()[0].s(1, 0) = 0.0;
    par.params()[0].w_q = {1.0};
    par.params()[0].theta = {0.0};
    CHECK(par.forward_one({3.0, 5.0})[0] == doctest::Approx(44.0));

    // elliptic: all quadratic signs positive
    Network ell({{2, 1, FormClass::elliptic, Activation::identity}});
    ell.params()[0].W(0, 0) = 0.0;
    ell.params()[0].W(1, 0) = 0.0;
    ell.params()[0].s(0, 0) = 1.0;
    ell.params()[0].s(1, 0) = 1.0;
    ell.params()[0].w_q = {1.0};
    ell.params()[0].theta = {0.0};
    CHECK(ell.forward_one({3.0, 4.0})[0] == doctest::Approx(25.0));
}

TEST_CASE("initialization pins the parabolic quadratic row to zero") {
    Network net({{3, 4, FormClass::parabolic, Activation::sigmoid},
                 {4, 1, FormClass::affine, Activation::identity}});
    Rng rng(11);
    net.init(rng, {InitScheme::gaussian, 1.0, 0.5});
    const auto& s = net.params()[0].s;
    for (std::size_t j = 0; j < 4; ++j) CHECK(s(2, j) == 0.0);
    // other rows should have been drawn
    bool any_nonzero = false;
    for (std::size_t j = 0; j < 4; ++j)
        if (s(0, j) != 0.0 || s(1, j) != 0.0) any_nonzero = true;
    CHECK(any_nonzero);

    // the pinned entries receive zero gradient
    Mat x(6, 3), y(6, 1);
    Rng data_rng(5);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = data_rng.uniform(-1.0, 1.0);
        y(i, 0) = data_rng.uniform(0.0, 1.0);
    }
    Workspace ws;
    net.forward(x, ws);
    auto grads = net.zero_grads();
    net.backward(ws, LossKind::mse, y, grads);
    for (std::size_t j = 0; j < 4; ++j) CHECK(grads[0].s(2, j) == 0.0);
}

TEST_CASE("elliptic layer with zero quadratic weights behaves like affine") {
    Network ell({{3, 2, FormClass::elliptic, Activation::sigmoid}});
    Network aff({{3, 2, FormClass::affine, Activation::sigmoid}});
    Rng rng(21);
    ell.init(rng, {InitScheme::gaussian, 0.0, 0.7});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            ell.params()[0].s(i, j) = 0.0;
            aff.params()[0].W(i, j) = ell.params()[0].W(i, j);
        }
    aff.params()[0].theta = ell.params()[0].theta;

    Mat x(5, 3), y(5, 2);
    Rng data_rng(33);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = data_rng.uniform(-2.0, 2.0);
        for (std::size_t j = 0; j < 2; ++j) y(i, j) = data_rng.uniform(0.0, 1.0);
    }

    Workspace we, wa;
    Mat oe = ell.forward(x, we);
    Mat oa = aff.forward(x, wa);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(oe(i, j) == doctest::Approx(oa(i, j)).epsilon(1e-15));

    auto ge = ell.zero_grads();
    auto ga = aff.zero_grads();
    ell.backward(we, LossKind::mse, y, ge);
    aff.backward(wa, LossKind::mse, y, ga);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(ge[0].W(i, j) == doctest::Approx(ga[0].W(i, j)).epsilon(1e-13));
            CHECK(ge[0].s(i, j) == 0.0);
        }
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(ge[0].theta[j] == doctest::Approx(ga[0].theta[j]).epsilon(1e-13));
        CHECK(ge[0].w_q[j] == 0.0);
    }
}

namespace {

struct GradCheckStats {
    double worst_rel = 0.0;
    std::size_t params = 0;
};

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
}

GradCheckStats gradcheck_one(Network& net, const Mat& x, const Mat& y, LossKind loss) {
    Workspace ws;
    net.forward(x, ws);
    auto grads = net.zero_grads();
    net.backward(ws, loss, y, grads);

    Vec flat_analytic;
    for (const auto& g : grads) {
        flat_analytic.insert(flat_analytic.end(), g.W.data(), g.W.data() + g.W.size());
        flat_analytic.insert(flat_analytic.end(), g.s.data(), g.s.data() + g.s.size());
        flat_analytic.insert(flat_analytic.end(), g.w_q.begin(), g.w_q.end());
        flat_analytic.insert(flat_analytic.end(), g.theta.begin(), g.theta.end());
    }

    const double h = 1e-5;
    Vec base = net.get_params();
    GradCheckStats stats;
    stats.params = base.size();
    REQUIRE(flat_analytic.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        Vec p = base;
        p[i] = base[i] + h;
        net.set_params(p);
        double up = loss_value(loss, net.forward(x), y);
        p[i] = base[i] - h;
        net.set_params(p);
        double down = loss_value(loss, net.forward(x), y);
        double numeric = (up - down) / (2.0 * h);
        stats.worst_rel = std::max(stats.worst_rel, rel_err(flat_analytic[i], numeric));
    }
    net.set_params(base);
    return stats;
}

} // namespace

TEST_CASE("analytic gradients match central differences for every layer kind") {
    const std::vector<FormClass> kinds{FormClass::affine, FormClass::elliptic,
                                       FormClass::hyperbolic, FormClass::parabolic};
    Rng rng(424242);
    for (FormClass kind : kinds) {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            std::size_t in = 1 + static_cast<std::size_t>(rng.below(4));
            std::size_t hidden = 1 + static_cast<std::size_t>(rng.below(4));
            std::size_t batch = 1 + static_cast<std::size_t>(rng.below(8));
            bool deep = trial % 2 == 0;
            LossKind loss = trial % 3 == 0 ? LossKind::mae
                          : trial % 3 == 1 ? LossKind::mse : LossKind::bce;
            Activation out_act = loss == LossKind::bce ? Activation::sigmoid
                                                       : Activation::identity;
            std::vector<LayerSpec> specs;
            if (deep) {
                specs.push_back({in, hidden, kind, Activation::sigmoid});
                specs.push_back({hidden, 1, kind, out_act});
            } else {
                specs.push_back({in, 1, kind, out_act});
            }
            Network net(specs);
            net.init(rng, {InitScheme::gaussian, 0.0, 0.6});

            Mat x(batch, in);
            for (std::size_t r = 0; r < batch; ++r)
                for (std::size_t c = 0; c < in; ++c) x(r, c) = rng.uniform(-1.5, 1.5);
            Mat y(batch, 1);
            if (loss == LossKind::bce) {
                for (std::size_t r = 0; r < batch; ++r) y(r, 0) = rng.below(2) ? 1.0 : 0.0;
            } else if (loss == LossKind::mae) {
                // keep residuals well away from the nondifferentiable point
                Mat pred = net.forward(x);
                for (std::size_t r = 0; r < batch; ++r) y(r, 0) = pred(r, 0) + 0.7;
            } else {
                for (std::size_t r = 0; r < batch; ++r) y(r, 0) = rng.uniform(-1.0, 1.0);
            }
            worst = std::max(worst, gradcheck_one(net, x, y, loss).worst_rel);
        }
        INFO("kind ", to_string(kind), " worst relative error ", worst);
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("loss functions agree with hand-computed values") {
    Mat pred(2, 1), target(2, 1);
    pred(0, 0) = 0.0; pred(1, 0) = 1.0;
    target(0, 0) = 1.0; target(1, 0) = 1.0;
    CHECK(mse(pred, target) == doctest::Approx(0.5));
    CHECK(mae(pred, target) == doctest::Approx(0.5));
    CHECK(accuracy(pred, target) == doctest::Approx(0.5));
    CHECK(loss_value(LossKind::mse, pred, target) == mse(pred, target));
    CHECK(loss_value(LossKind::mae, pred, target) == mae(pred, target));

    // clamped cross entropy stays finite at a hard-wrong prediction
    Mat p1(1, 1), t1(1, 1);
    p1(0, 0) = 0.0; t1(0, 0) = 1.0;
    CHECK(bce(p1, t1) == doctest::Approx(-std::log(1e-12)).epsilon(1e-12));
    p1(0, 0) = 0.5;
    CHECK(bce(p1, t1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    Mat empty;
    CHECK_THROWS_AS(mse(empty, empty), std::invalid_argument);
}

TEST_CASE("network construction and forward reject shape mismatches") {
    CHECK_THROWS_AS(Network({}), std::invalid_argument);
    CHECK_THROWS_AS(Network({{2, 3, FormClass::affine, Activation::identity},
                             {4, 1, FormClass::affine, Activation::identity}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Network({{2, 1, FormClass::circular, Activation::identity}}),
                    std::invalid_argument);

    Network net({{2, 1, FormClass::affine, Activation::identity}});
    Mat wrong(1, 3);
    CHECK_THROWS_AS(net.forward(wrong), std::invalid_argument);

    // nonfinite weights are caught during the pass
    Network bad({{1, 1, FormClass::affine, Activation::identity}});
    bad.params()[0].W(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(bad.forward(single_row({1.0})), std::runtime_error);
}

TEST_CASE("flat parameter vector round-trips through get and set") {
    Network net({{2, 3, FormClass::elliptic, Activation::sigmoid},
                 {3, 1, FormClass::affine, Activation::identity}});
    Rng rng(77);
    net.init(rng, {InitScheme::gaussian, 0.0, 1.0});
    Vec flat = net.get_params();
    CHECK(flat.size() == net.param_count());

    Vec shifted = flat;
    for (double& v : shifted) v += 0.25;
    net.set_params(shifted);
    CHECK(net.get_params() == shifted);
    CHECK_THROWS_AS(net.set_params(Vec(flat.size() + 1, 0.0)), std::invalid_argument);

    // constant_one initialization sets weights to 1 and biases to 0
    Network ones({{2, 2, FormClass::elliptic, Activation::identity}});
    Rng rng2(1);
    ones.init(rng2, {InitScheme::constant_one, 0.0, 0.0});
    CHECK(ones.params()[0].W(0, 0) == 1.0);
    CHECK(ones.params()[0].s(1, 1) == 1.0);
    CHECK(ones.params()[0].w_q[0] == 1.0);
    CHECK(ones.params()[0].theta[0] == 0.0);
}
