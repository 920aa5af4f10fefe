#include "torusflux/random_fields.hpp"
#include "torusflux/stress.hpp"

#include "test_helpers.hpp"

using namespace torusflux;
using namespace tfx_test;

// Resolved-scale validation: at lambda = 1 with a 2-harmonic profile on a
// 64^3 grid every wave frequency sits inside the dealias cube, so the exact
// chain-rule evaluators can be checked against spectral differentiation of the
// sampled fields, and grid means of wave products are exact integrals.
namespace {

const TorusGrid g64(64);

struct Setup {
    ParamSchedule sched = desk_schedule(8.0, 32.0, 0.25, 0.05);
    std::shared_ptr<FlowProvider> f1, f2;
    std::unique_ptr<StageQ> stage;
    std::unique_ptr<GluedStage> glued;
    Placement place;
    BuildingBlockProfile prof;
    double lambda = 1.0;

    Setup() : place(place_shifts(direction_set(), 1.0 / 64.0)), prof(make_profile(2, 6.0, place.width)) {
        BoussinesqState init;
        init.t = 0.40;
        init.v = leray_project(random_vector(g64, 201, 3, 4.0));
        init.v *= 0.12 / holder_norm(init.v, 1, 0.0);
        init.theta = random_scalar(g64, 202, 3, 4.0);
        init.theta *= 0.25 / sup_norm(init.theta);
        init.p = pressure_from(init.v, init.theta);
        f1 = std::make_shared<SolvedFlow>(std::move(init), 5e-3);
        f2 = std::make_shared<ShearFlow>(g64, 0.2, [](double x) { return std::cos(two_pi * x); });
        stage = std::make_unique<StageQ>(f1, f2, sched);
        glued = std::make_unique<GluedStage>(*stage, f1, f2, 5e-3);
    }

    double probe_time() const {
        const auto& win = glued->windows();
        return win.t_i(0) + 0.5 * win.tau;  // middle of I_0: eta = 1
    }
};

Setup& setup() {
    static Setup s;
    return s;
}

}  // namespace

TEST_CASE("perturbation context prepares with R_v inside the ball") {
    Setup& S = setup();
    Perturbation P(*S.glued, direction_set(), S.place, S.prof, S.lambda, 0, S.probe_time());
    REQUIRE(P.eta() == 1.0);
    REQUIRE(P.rv_ball_margin() > 0.0);
    REQUIRE(P.map().max_det_dev <= 1e-6);
    REQUIRE(P.map().max_grad_dev <= 0.1);
}

TEST_CASE("assembled waves are divergence-free by both routes") {
    Setup& S = setup();
    Perturbation P(*S.glued, direction_set(), S.place, S.prof, S.lambda, 0, S.probe_time());
    WaveAssembly W(P);
    WaveGrids g = W.assemble(true, true);

    DivergenceReport rep = divergence_check(P, g);
    REQUIRE(rep.w_sup > 0.0);
    REQUIRE(rep.div_sup <= 1e-10 * rep.scale);

    // all frequencies resolved at lambda = 1, J = 2: spectral divergence of
    // the sampled field must agree with the chain-rule value
    VectorField w(g64);
    for (int c = 0; c < 3; ++c) {
        ScalarField s(g64);
#pragma omp parallel for
        for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = g.w_p[c][i] + g.w_c[c][i];
        w[c] = s;
    }
    ScalarField div_spec = divergence(w);
    REQUIRE(max_abs_diff(div_spec, g.div_w) <= 1e-8 * std::max(1.0, rep.scale));
}

TEST_CASE("chain-rule gradients match spectral gradients at resolved scale") {
    Setup& S = setup();
    Perturbation P(*S.glued, direction_set(), S.place, S.prof, S.lambda, 0, S.probe_time());
    WaveAssembly W(P);
    WaveGrids g = W.assemble(true, false);

    double gmax = 0;
    for (int r = 0; r < 3; ++r) {
        ScalarField wr(g64);
#pragma omp parallel for
        for (std::size_t i = 0; i < wr.v.size(); ++i) wr.v[i] = g.w_p[r][i] + g.w_c[r][i];
        VectorField gw = gradient(wr);
        for (int m = 0; m < 3; ++m) {
            gmax = std::max(gmax, sup_norm(gw[m]));
            REQUIRE(max_abs_diff(gw[m], g.grad_w[r * 3 + m]) <= 1e-7 * std::max(1.0, gmax));
        }
    }
}

TEST_CASE("deformed blocks keep unit mass and mutual orthogonality") {
    Setup& S = setup();
    Perturbation P(*S.glued, direction_set(), S.place, S.prof, S.lambda, 0, S.probe_time());
    const auto& fams = S.place.families;
    const auto& prof = S.prof;
    const std::size_t np = g64.points();

    // W_f(Phi) sampled; products have frequencies below the grid, so grid
    // means are exact integrals.
    std::vector<std::vector<double>> W(fams.size(), std::vector<double>(np));
    for (std::size_t f = 0; f < fams.size(); ++f)
#pragma omp parallel for
        for (std::size_t i = 0; i < np; ++i) {
            const double u1 = P.arg_u(fams[f], 0, i);
            const double u2 = P.arg_u(fams[f], 1, i);
            W[f][i] = prof.eval(u1) * prof.eval(u2);
        }

    for (std::size_t f = 0; f < fams.size(); ++f) {
        double m2 = 0;
#pragma omp parallel for reduction(+ : m2)
        for (std::size_t i = 0; i < np; ++i) m2 += W[f][i] * W[f][i];
        m2 /= double(np);
        REQUIRE(std::abs(std::sqrt(m2) - 1.0) <= 1e-6);  // eq-level: unit L2 mass
    }
    for (std::size_t f = 0; f < fams.size(); ++f)
        for (std::size_t f2 = f + 1; f2 < fams.size(); ++f2) {
            double ip = 0;
#pragma omp parallel for reduction(+ : ip)
            for (std::size_t i = 0; i < np; ++i) ip += W[f][i] * W[f2][i];
            REQUIRE(std::abs(ip / double(np)) <= 1e-9);
        }
}

TEST_CASE("pair frequencies within a family stay orthogonal to the wave direction") {
    Setup& S = setup();
    for (const auto& fam : S.place.families) {
        if (!fam.theta_type) continue;
        for (int l = -2; l <= 2; ++l)
            for (int m = -2; m <= 2; ++m) {
                const Vec3 j = fam.arg1 * double(l) + fam.arg2 * double(m);
                REQUIRE(std::abs(dot(j, fam.wave_dir)) <= 1e-12);
            }
    }
}

TEST_CASE("low-frequency cancellation identities hold") {
    Setup& S = setup();
    Perturbation P(*S.glued, direction_set(), S.place, S.prof, S.lambda, 0, S.probe_time());
    CancellationReport rep = cancellation_checks(P);
    REQUIRE(rep.mosc_sup <= 1e-8 * rep.mosc_scale);
    REQUIRE(rep.rosc_sup <= 1e-8 * rep.rosc_scale);
}

TEST_CASE("mother-block supports stay disjoint under the flow map") {
    Setup& S = setup();
    Perturbation P(*S.glued, direction_set(), S.place, S.prof, S.lambda, 0, S.probe_time());
    SupportReport rep = support_check(P);
    REQUIRE(rep.overlap_integral == 0.0);
    REQUIRE(rep.overlap_sup == 0.0);
}

TEST_CASE("time derivatives of the waves match finite differences") {
    Setup& S = setup();
    const double t = S.probe_time();
    const double dt = 2e-4;
    Perturbation P0(*S.glued, direction_set(), S.place, S.prof, S.lambda, 0, t);
    Perturbation Pm(*S.glued, direction_set(), S.place, S.prof, S.lambda, 0, t - dt);
    Perturbation Pp(*S.glued, direction_set(), S.place, S.prof, S.lambda, 0, t + dt);
    WaveGrids g0 = WaveAssembly(P0).assemble(true, true);
    WaveGrids gm = WaveAssembly(Pm).assemble(false, false);
    WaveGrids gp = WaveAssembly(Pp).assemble(false, false);

    double w_scale = 0, err = 0;
#pragma omp parallel for reduction(max : w_scale, err)
    for (std::size_t i = 0; i < g64.points(); ++i) {
        const Vec3 fd = (gp.w_at(i) - gm.w_at(i)) * (1.0 / (2.0 * dt));
        err = std::max(err, norm(fd - g0.dw_dt.at(i)));
        w_scale = std::max(w_scale, norm(g0.dw_dt.at(i)));
    }
    REQUIRE(err <= 2e-3 * std::max(w_scale, 1.0));
}

TEST_CASE("stress assembly: consistency, decay bookkeeping, finiteness") {
    Setup& S = setup();
    Perturbation P(*S.glued, direction_set(), S.place, S.prof, S.lambda, 0, S.probe_time());
    WaveAssembly W(P);
    WaveGrids g = W.assemble(true, true);
    StressReport rep = assemble_stress(P, g, 2);

    REQUIRE(rep.consistency_v <= 1e-6 * rep.consistency_scale_v);
    REQUIRE(rep.consistency_t <= 1e-6 * rep.consistency_scale_t);
    REQUIRE(std::isfinite(rep.r_sup));
    REQUIRE(rep.r_sup > 0.0);
    REQUIRE(std::isfinite(rep.t_sup));
    REQUIRE(rep.old_r_sup > 0.0);
    REQUIRE(rep.w_sup > 0.0);
    REQUIRE(rep.v_next_sup > 0.0);
}
