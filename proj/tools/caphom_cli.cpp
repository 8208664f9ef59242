// Command-line front end: stability analysis, verification suites, the
// periodic cell pipeline, the single-inclusion demo, and the dilute bound.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage/config error,
//             3 solver/geometry fault.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <caphom/capillary.hpp>
#include <caphom/dilute.hpp>
#include <caphom/mesh.hpp>
#include <caphom/parallel.hpp>
#include <caphom/poly3.hpp>
#include <caphom/solve.hpp>
#include <caphom/sphharm.hpp>
#include <caphom/surface_energy.hpp>

using json = nlohmann::ordered_json;
using namespace caphom;

namespace {

constexpr const char *kSchema = "capillary-homog/1";

json units_block() {
    return json{{"gamma", "stress*length"}, {"lambda_fl", "stress"},   {"a", "length"},
                {"p", "stress"},            {"lambda", "stress"},      {"mu", "stress"},
                {"energy", "stress"},       {"stiffness", "stress"},   {"length", "cell side = 1"},
                {"t", "volume"}};
}

json header(const std::string &command) {
    return json{{"schema", kSchema}, {"command", command}, {"units", units_block()}};
}

void emit(const json &j, const std::string &out_path) {
    std::string text = j.dump(2);
    text.push_back('\n');
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw Error("cannot open output file " + out_path);
        os << text;
    }
}

std::string fmt(double v, const char *format = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

CapillaryParams params_from(double gamma, double lfl, double a) {
    if (gamma == 0.0 && lfl == 0.0) return CapillaryParams::void_like(a);
    return CapillaryParams::make(gamma, lfl, a);
}

json kelvin_to_json(const Mat6 &K) {
    json rows = json::array();
    for (int i = 0; i < 6; ++i) {
        json row = json::array();
        for (int j = 0; j < 6; ++j) row.push_back(K(i, j));
        rows.push_back(row);
    }
    return rows;
}

// -------------------------------------------------------------------------
// verification suites (pure, seeded, single threaded by construction)
// -------------------------------------------------------------------------

struct CheckList {
    json entries = json::array();
    bool pass = true;

    void add(const std::string &name, double value, double tol, bool ok_iff_below = true) {
        bool ok = ok_iff_below ? value <= tol : value >= tol;
        entries.push_back(json{{"name", name}, {"value", value}, {"tol", tol}, {"pass", ok}});
        pass = pass && ok;
    }
    void add_flag(const std::string &name, bool ok) {
        entries.push_back(json{{"name", name}, {"pass", ok}});
        pass = pass && ok;
    }
};

void tensor_suite(CheckList &cl, Pcg32 &rng) {
    double worst_cof = 0.0, worst_det = 0.0, worst_exp = 0.0;
    for (int k = 0; k < 10000; ++k) {
        Mat3 A;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) A(i, j) = rng.uniform(-1, 1);
        Mat3 lhs = cofactor(A).transpose() * A;
        Mat3 rhs = A.determinant() * Mat3::Identity();
        worst_cof = std::max(worst_cof, (lhs - rhs).norm() / (1.0 + rhs.norm()));
        double eps = rng.uniform(0.0, 1.0);
        double d0 = (Mat3::Identity() + eps * A).determinant();
        double d1 = 1.0 + eps * A.trace() + eps * eps * trace_cofactor(A) +
                    eps * eps * eps * A.determinant();
        worst_det = std::max(worst_det, std::abs(d0 - d1) / (1.0 + std::abs(d1)));
        Mat3 quad = trace_cofactor(A) * Mat3::Identity() - A.trace() * A.transpose() +
                    A.transpose() * A.transpose();
        Mat3 c0 = cofactor(Mat3::Identity() + eps * A);
        Mat3 c1 = Mat3::Identity() + eps * (A.trace() * Mat3::Identity() - A.transpose()) +
                  eps * eps * quad;
        worst_exp = std::max(worst_exp, (c0 - c1).norm() / (1.0 + c1.norm()));
    }
    cl.add("cofactor_adjugate_identity", worst_cof, 1e-10);
    cl.add("det_expansion", worst_det, 1e-12);
    cl.add("cof_expansion_terms", worst_exp, 1e-12);

    double worst_jid = 0.0;
    for (int k = 0; k < 5; ++k) {
        double gamma = rng.uniform(0.1, 2.0), a = rng.uniform(0.1, 0.45);
        auto prm = CapillaryParams::make(gamma, 4.0 * gamma / a, a);
        SurfaceDeformation id{[](const Vec3 &x) { return x; },
                              [](const Vec3 &) { return Mat3::Identity(); }, a};
        double J = surface_energy_J(id, prm);
        double expect = 4.0 / 3.0 * M_PI * gamma * a * a;
        worst_jid = std::max(worst_jid, std::abs(J - expect) / expect);
    }
    cl.add("surface_energy_identity", worst_jid, 1e-12);

    // cubic remainder of the quadratic expansion for random smooth fields
    auto prm = CapillaryParams::make(1.0, 6.0, 0.3);
    double ratio_min = 1e30, ratio_max = 0.0;
    for (int k = 0; k < 5; ++k) {
        auto comps = std::make_shared<std::array<Poly3, 3>>();
        for (int c = 0; c < 3; ++c) {
            Poly3 p;
            for (int i = 0; i <= 2; ++i)
                for (int j = 0; i + j <= 2; ++j)
                    for (int l = 0; i + j + l <= 2; ++l)
                        p += Poly3::monomial(i, j, l,
                                             rng.uniform(-0.15, 0.15) / std::pow(prm.a, i + j + l));
            (*comps)[c] = p;
        }
        SmoothField u;
        u.u = [comps](const Vec3 &x) {
            return Vec3((*comps)[0](x), (*comps)[1](x), (*comps)[2](x));
        };
        u.grad_u = [comps](const Vec3 &x) {
            Mat3 G;
            for (int c = 0; c < 3; ++c) G.row(c) = (*comps)[c].eval_gradient(x).transpose();
            return G;
        };
        auto r = linearization_residual(u, prm, {1e-2, 1e-3});
        if (r[1] > 1e-11) {
            double ratio = r[0] / r[1];
            ratio_min = std::min(ratio_min, ratio);
            ratio_max = std::max(ratio_max, ratio);
        }
    }
    cl.add("linearization_cubic_ratio_min", ratio_min, 500.0, false);
    cl.add("linearization_cubic_ratio_max", ratio_max, 2000.0);
}

void sphharm_suite(CheckList &cl, Pcg32 &rng, double a, int degree) {
    SphereRule rule = SphereRule::for_degree(degree);
    double worst_m = 0.0;
    for (int p = 0; p <= 6; ++p)
        for (int q = 0; p + q <= 6; ++q)
            for (int r = 0; p + q + r <= 6; ++r) {
                double quad = rule.integrate([&](const Vec3 &n) {
                    return std::pow(n.x(), p) * std::pow(n.y(), q) * std::pow(n.z(), r);
                });
                worst_m = std::max(worst_m, std::abs(quad - sphere_monomial_moment(p, q, r)));
            }
    cl.add("rule_monomial_moments", worst_m, 1e-12);

    double worst_eig = 0.0;
    for (int l = 0; l <= 4; ++l)
        for (int m = -l; m <= l; ++m) {
            double q = eigencheck(l, m, a, rule);
            worst_eig = std::max(worst_eig,
                                 std::abs(q - l * (l + 1) / (a * a)) / (1.0 + l * (l + 1) / (a * a)));
        }
    cl.add("laplace_beltrami_eigenvalues", worst_eig, 1e-8);

    auto random_coeffs = [&rng]() {
        Eigen::VectorXd c(harmonic_count(4));
        for (int i = 0; i < c.size(); ++i) c[i] = rng.uniform(-1.0, 1.0);
        return c;
    };
    double worst_pars = 0.0, min_poincare = 1e30, min_coer = 1e30, min_lhs = 1e30;
    auto prm = CapillaryParams::make(1.0, 4.0 / a, a);
    for (int k = 0; k < 1000; ++k) {
        auto f = SphereField::from_harmonics(rule, a, random_coeffs());
        auto s = project_components(f);
        worst_pars = std::max(
            worst_pars, std::abs(s.norm2_p0 + s.norm2_p1 + s.norm2_p2 - f.norm2()) / f.norm2());
        min_poincare = std::min(min_poincare, poincare_gap(f) / f.norm2());
        auto g = coercivity_gap(f, prm);
        double scale = prm.gamma * f.norm2() / (a * a);
        min_coer = std::min(min_coer, g.slack / scale);
        min_lhs = std::min(min_lhs, g.lhs / scale);
    }
    cl.add("parseval_split", worst_pars, 1e-10);
    cl.add("poincare_gap_min", min_poincare, -1e-10, false);
    cl.add("coercivity_slack_min", min_coer, -1e-10, false);
    cl.add("surface_form_nonnegative", min_lhs, -1e-10, false);
}

void dilute_suite(CheckList &cl, Pcg32 &rng, double perturb) {
    double w_div = 0.0, w_tb = 0.0, w_ta = 0.0, w_c1 = 0.0, w_c2 = 0.0;
    for (int k = 0; k < 20; ++k) {
        double lambda = rng.uniform(0.3, 3.0), mu = rng.uniform(0.3, 3.0);
        double a = rng.uniform(0.05, 0.3), b = rng.uniform(a + 0.1, 0.5);
        double g = rng.uniform(0.2, 4.0);
        auto c = shell_coeffs(lambda, mu, 4.0 * mu * std::max(1.0, g), 2.0 * mu * a * g, a, b);
        auto rep = check_admissibility(c, rng.uniform(-2, 2), rng.uniform(-2, 2), 100,
                                       1000 + k, {}, perturb);
        w_div = std::max(w_div, rep.div_residual);
        w_tb = std::max(w_tb, rep.traction_b_residual);
        w_ta = std::max(w_ta, rep.parallel_a_residual);
        w_c1 = std::max(w_c1, rep.cond_i_residual);
        w_c2 = std::max(w_c2, rep.cond_ii_residual);
    }
    cl.add("shell_divergence_fd", w_div, 1e-6);
    cl.add("traction_continuity_b", w_tb, 1e-8);
    cl.add("radial_traction_a", w_ta, 1e-8);
    cl.add("interface_condition_i", w_c1, 1e-7);
    cl.add("interface_condition_ii", w_c2, 1e-7);

    cl.add("dilute_star_spot",
           std::abs(dilute_coefficient(1.0, 1.0, 4.0 * 0.2, 0.2) - 45.0 / 121.0), 1e-12);
    cl.add("dilute_star_zero", std::abs(dilute_coefficient(1.0, 1.0, 2.0 * 0.2, 0.2)), 1e-14);
    cl.add_flag("enhancement_predicate",
                enhancement_predicate(1.0, 1.0, 0.4) && !enhancement_predicate(0.8, 1.0, 0.4));
}

// -------------------------------------------------------------------------

int cmd_stability(double gamma, double lfl, double a, const std::string &out,
                  const std::string &json_out, int samples) {
    auto prm = CapillaryParams::make(gamma, lfl, a);
    PhiProfile prof = phi_profile(prm);
    json j = header("stability");
    j["gamma"] = gamma;
    j["lambda_fl"] = lfl;
    j["a"] = a;
    j["p"] = prm.p;
    j["stable"] = prm.stable();
    j["isoperimetric_constant"] = prof.isoper_const;
    j["t_star"] = prof.t_star;
    j["t_min"] = prof.t_min;
    j["phi_at_t_min"] = phi_eval(prof.t_min, prm).value;
    j["phi_at_ball_volume"] = phi_eval(prm.ball_vol(), prm).value;
    if (!out.empty()) {
        std::ofstream os(out, std::ios::binary);
        if (!os) throw Error("cannot open " + out);
        os << "t,phi,dphi,d2phi\n";
        double T = 3.0 * prm.ball_vol();
        for (int i = 1; i <= samples; ++i) {
            double t = T * i / samples;
            auto e = phi_eval(t, prm);
            os << fmt(t) << ',' << fmt(e.value) << ',' << fmt(e.d1) << ',' << fmt(e.d2) << "\n";
        }
        j["profile_csv"] = out;
    }
    emit(j, json_out);
    return 0;
}

int cmd_sphere_check(double a, int degree, std::uint64_t seed, const std::string &json_out) {
    CheckList cl;
    Pcg32 rng(seed);
    sphharm_suite(cl, rng, a, degree);
    json j = header("sphere-check");
    j["a"] = a;
    j["degree"] = degree;
    j["seed"] = seed;
    j["checks"] = cl.entries;
    j["pass"] = cl.pass;
    emit(j, json_out);
    return cl.pass ? 0 : 1;
}

int cmd_verify(std::uint64_t seed, bool perturb, const std::string &json_out) {
    json j = header("verify");
    j["seed"] = seed;
    j["perturb"] = perturb;
    json suites = json::object();
    bool pass = true;
    {
        CheckList cl;
        Pcg32 rng(seed);
        tensor_suite(cl, rng);
        suites["tensor"] = json{{"checks", cl.entries}, {"pass", cl.pass}};
        pass = pass && cl.pass;
    }
    {
        CheckList cl;
        Pcg32 rng(seed + 1);
        sphharm_suite(cl, rng, 0.35, 20);
        suites["sphharm"] = json{{"checks", cl.entries}, {"pass", cl.pass}};
        pass = pass && cl.pass;
    }
    {
        CheckList cl;
        Pcg32 rng(seed + 2);
        dilute_suite(cl, rng, perturb ? 1.01 : 1.0);
        suites["dilute"] = json{{"checks", cl.entries}, {"pass", cl.pass}};
        pass = pass && cl.pass;
    }
    j["suites"] = suites;
    j["pass"] = pass;
    emit(j, json_out);
    return pass ? 0 : 1;
}

int cmd_cell(double a, double lambda, double mu, double gamma, double lfl, int refine, double tol,
             const std::string &json_out) {
    auto prm = params_from(gamma, lfl, a);
    if (!prm.stable()) throw StabilityFault("cell: parameters violate the stability condition");
    auto mesh = std::make_shared<const PeriodicMesh>(build_cell_mesh(a, refine));
    auto A = ElasticTensor::isotropic(lambda, mu);
    SolveOptions opt;
    opt.tol = tol;
    auto sol = compute_Ahom(mesh, A, prm, opt);
    MeshQuality q = mesh_quality(*mesh);

    json j = header("cell");
    j["params"] = json{{"a", a},         {"lambda", lambda},   {"mu", mu},
                       {"gamma", gamma}, {"lambda_fl", lfl},   {"p", prm.p},
                       {"stable", prm.stable()}};
    j["mesh"] = json{{"refine", refine},
                     {"nodes", mesh->node_count()},
                     {"tets", mesh->tet_count()},
                     {"quality",
                      json{{"volume_defect", q.volume_defect},
                           {"cavity_area_defect", q.cavity_area_defect},
                           {"min_dihedral_deg", q.min_dihedral_deg},
                           {"max_aspect", q.max_aspect}}}};
    json iters = json::array();
    for (const auto &s : sol.stats) iters.push_back(s.iterations);
    j["solver"] = json{{"tol", tol},
                       {"max_iterations", sol.Ahom.max_iterations},
                       {"iterations", iters}};
    json eig = json::array();
    for (int i = 0; i < 6; ++i) eig.push_back(sol.Ahom.eigenvalues[i]);
    j["ahom"] = json{{"basis", "kelvin (11, 22, 33, sqrt2*23, sqrt2*13, sqrt2*12)"},
                     {"kelvin", kelvin_to_json(sol.Ahom.kelvin)},
                     {"eigenvalues", eig},
                     {"symmetry_defect", sol.Ahom.symmetry_defect},
                     {"cubic_symmetry_defect", cubic_symmetry_defect(sol.Ahom.kelvin)},
                     {"polarization_residual", sol.Ahom.polarization_residual}};
    emit(j, json_out);
    return 0;
}

int cmd_solve(double a, double lambda, double mu, double gamma, double lfl, int refine, double box,
              Vec3 f, double tol, const std::string &mesh_in, const std::string &field_out,
              const std::string &json_out) {
    auto prm = params_from(gamma, lfl, a);
    if (!prm.stable()) throw StabilityFault("solve: parameters violate the stability condition");
    DomainMesh mesh;
    if (mesh_in.empty()) {
        mesh = build_domain_mesh(box, a, refine);
    } else {
        std::ifstream is(mesh_in);
        if (!is) throw Error("cannot open mesh file " + mesh_in);
        PeriodicMesh pm = read_mesh(is);
        mesh.nodes = std::move(pm.nodes);
        mesh.tets = std::move(pm.tets);
        mesh.cavity = std::move(pm.cavity);
        mesh.a = mesh.cavity.radius;
        mesh.refine = 0;
        double L = 0.0;
        for (const auto &p : mesh.nodes) L = std::max(L, p.cwiseAbs().maxCoeff());
        mesh.half_width = L;
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
            if (std::abs(mesh.nodes[i].z() + L) < 1e-9 * L) mesh.gamma_nodes.push_back(int(i));
        if (mesh.gamma_nodes.empty()) throw Error("imported mesh has no bottom-face nodes");
        if (std::abs(prm.a - mesh.a) > 1e-9 * prm.a)
            prm = gamma == 0.0 && lfl == 0.0 ? CapillaryParams::void_like(mesh.a)
                                             : CapillaryParams::make(gamma, lfl, mesh.a);
    }
    auto A = ElasticTensor::isotropic(lambda, mu);
    SolveOptions opt;
    opt.tol = tol;
    auto load = [f](const Vec3 &) { return f; };
    auto r = solve_single_inclusion(mesh, A, prm, load, opt);
    auto id = check_interface_identity(r.u, mesh, A, prm, load, opt);

    if (!field_out.empty()) {
        std::ofstream os(field_out, std::ios::binary);
        if (!os) throw Error("cannot open " + field_out);
        PeriodicMesh shim;
        shim.nodes = mesh.nodes;
        shim.tets = mesh.tets;
        shim.cavity = mesh.cavity;
        shim.a = mesh.a;
        write_field(os, shim, r.u);
    }

    json j = header("solve");
    j["params"] = json{{"a", prm.a},      {"lambda", lambda}, {"mu", mu},
                       {"gamma", gamma},  {"lambda_fl", lfl}, {"box_half_width", mesh.half_width},
                       {"f", {f.x(), f.y(), f.z()}}};
    j["mesh"] = json{{"refine", mesh.refine},
                     {"nodes", mesh.node_count()},
                     {"tets", mesh.tet_count()},
                     {"gamma_nodes", mesh.gamma_nodes.size()}};
    j["solver"] = json{{"tol", tol},
                       {"iterations", r.stats.iterations},
                       {"rel_residual", r.stats.rel_residual}};
    j["interface_identity"] =
        json{{"lhs", id.lhs}, {"rhs", id.rhs}, {"residual", id.residual}};
    j["max_displacement"] = r.u.lpNorm<Eigen::Infinity>();
    if (!field_out.empty()) j["field_file"] = field_out;
    emit(j, json_out);
    return 0;
}

void write_sweep_row(std::ostream &os, double theta, double b, double lambda, double mu, double g,
                     double lfl, const BoundResult &r, double star) {
    double slope = theta > 0.0 ? (r.value / r.matrix_energy - 1.0) / theta : 0.0;
    os << fmt(theta) << ',' << fmt(b) << ',' << fmt(lambda) << ',' << fmt(mu) << ',' << fmt(g)
       << ',' << fmt(lfl) << ',' << fmt(r.value) << ',' << fmt(slope) << ',' << fmt(star) << ','
       << (star > 0.0 ? 1 : 0) << "\n";
}

int cmd_dilute(double lambda, double mu, double g, double theta, double b, double lfl_over_mu,
               double f, const std::string &csv_out, const std::string &json_out) {
    double a = std::cbrt(3.0 * theta / (4.0 * M_PI));
    double gamma = 2.0 * mu * a * g;
    double lfl = (lfl_over_mu > 0.0 ? lfl_over_mu : 4.0 * std::max(1.0, g)) * mu;
    auto r = lower_bound(f, lambda, mu, gamma, lfl, a, b);
    double star = dilute_coefficient(lambda, mu, gamma, a);

    std::ostringstream csv;
    csv << "theta,b,lambda,mu,gamma_over_2mua,lambda_fl,bound,slope,star,enhanced\n";
    write_sweep_row(csv, theta, b, lambda, mu, g, lfl, r, star);
    if (!csv_out.empty()) {
        std::ofstream os(csv_out, std::ios::binary);
        if (!os) throw Error("cannot open " + csv_out);
        os << csv.str();
    }

    json j = header("dilute");
    j["params"] = json{{"lambda", lambda}, {"mu", mu},     {"gamma_over_2mua", g},
                       {"theta", theta},   {"b", b},       {"lambda_fl", lfl},
                       {"a", a},           {"gamma", gamma}, {"f", f}};
    j["bound"] = r.value;
    j["matrix_energy"] = r.matrix_energy;
    j["slope"] = (r.value / r.matrix_energy - 1.0) / theta;
    j["star"] = star;
    j["enhanced"] = star > 0.0;
    j["optimizer"] = json{{"s11", r.s11}, {"s33", r.s33}};
    j["admissibility"] = json{{"div", r.admissibility.div_residual},
                              {"traction_b", r.admissibility.traction_b_residual},
                              {"parallel_a", r.admissibility.parallel_a_residual},
                              {"cond_i", r.admissibility.cond_i_residual},
                              {"cond_ii", r.admissibility.cond_ii_residual},
                              {"pass", r.admissibility.pass}};
    if (!csv_out.empty()) j["csv_file"] = csv_out;
    emit(j, json_out);
    return 0;
}

int cmd_sweep(double lambda, double mu, const std::vector<double> &gs,
              const std::vector<double> &thetas, double b, double lfl_over_mu, double f,
              const std::string &csv_out) {
    std::ostringstream csv;
    csv << "theta,b,lambda,mu,gamma_over_2mua,lambda_fl,bound,slope,star,enhanced\n";
    for (double g : gs)
        for (double theta : thetas) {
            double a = std::cbrt(3.0 * theta / (4.0 * M_PI));
            double gamma = 2.0 * mu * a * g;
            double lfl = (lfl_over_mu > 0.0 ? lfl_over_mu : 4.0 * std::max(1.0, g)) * mu;
            auto r = lower_bound(f, lambda, mu, gamma, lfl, a, b);
            write_sweep_row(csv, theta, b, lambda, mu, g, lfl, r,
                            dilute_coefficient(lambda, mu, gamma, a));
        }
    if (csv_out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream os(csv_out, std::ios::binary);
        if (!os) throw Error("cannot open " + csv_out);
        os << csv.str();
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"capillary elastomer homogenization toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file with one section per subcommand");

    int threads = 1;
    app.add_option("--threads", threads, "worker threads for assembly and solves")
        ->capture_default_str();

    std::string json_out;
    app.add_option("--out", json_out, "write the JSON report here instead of stdout")
        ->capture_default_str();

    // stability
    auto *st = app.add_subcommand("stability", "equilibrium pressure and cavity stability");
    double st_gamma = 0.0, st_lfl = 0.0, st_a = 0.0;
    std::string st_csv;
    int st_samples = 200;
    st->add_option("--gamma", st_gamma, "surface tension")->required();
    st->add_option("--lfl", st_lfl, "fluid bulk modulus")->required();
    st->add_option("--a", st_a, "cavity radius")->required();
    st->add_option("--profile", st_csv, "write the Phi profile CSV here");
    st->add_option("--samples", st_samples, "profile sample count")->capture_default_str();

    // sphere-check
    auto *sc = app.add_subcommand("sphere-check", "spherical quadrature and projection checks");
    double sc_a = 1.0;
    int sc_degree = 20;
    std::uint64_t sc_seed = 7;
    sc->add_option("--a", sc_a, "sphere radius")->capture_default_str();
    sc->add_option("--degree", sc_degree, "quadrature degree")->capture_default_str();
    sc->add_option("--seed", sc_seed, "random seed")->capture_default_str();

    // verify
    auto *vf = app.add_subcommand("verify", "run the residual verification suites");
    std::uint64_t vf_seed = 7;
    bool vf_perturb = false;
    vf->add_option("--seed", vf_seed, "random seed")->capture_default_str();
    vf->add_flag("--perturb", vf_perturb, "inject a deliberate defect (negative control)");

    // cell
    auto *ce = app.add_subcommand("cell", "periodic cell problem and homogenized tensor");
    double ce_a = 0.2, ce_lambda = 1.0, ce_mu = 1.0, ce_gamma = 0.0, ce_lfl = 0.0, ce_tol = 1e-10;
    int ce_refine = 2;
    ce->add_option("--a", ce_a, "cavity radius")->capture_default_str();
    ce->add_option("--lambda", ce_lambda, "Lame lambda")->capture_default_str();
    ce->add_option("--mu", ce_mu, "shear modulus")->capture_default_str();
    ce->add_option("--gamma", ce_gamma, "surface tension")->capture_default_str();
    ce->add_option("--lfl", ce_lfl, "fluid bulk modulus")->capture_default_str();
    ce->add_option("--refine", ce_refine, "mesh refinement level")->capture_default_str();
    ce->add_option("--tol", ce_tol, "CG relative residual")->capture_default_str();

    // solve
    auto *so = app.add_subcommand("solve", "single-inclusion boundary value problem");
    double so_a = 0.2, so_lambda = 1.0, so_mu = 1.0, so_gamma = 0.2, so_lfl = 4.0, so_tol = 1e-10,
           so_box = 0.5;
    int so_refine = 2;
    std::vector<double> so_f = {0.0, 0.0, 1.0};
    std::string so_mesh, so_field;
    so->add_option("--a", so_a, "cavity radius")->capture_default_str();
    so->add_option("--lambda", so_lambda, "Lame lambda")->capture_default_str();
    so->add_option("--mu", so_mu, "shear modulus")->capture_default_str();
    so->add_option("--gamma", so_gamma, "surface tension")->capture_default_str();
    so->add_option("--lfl", so_lfl, "fluid bulk modulus")->capture_default_str();
    so->add_option("--refine", so_refine, "mesh refinement level")->capture_default_str();
    so->add_option("--box", so_box, "box half width")->capture_default_str();
    so->add_option("--f", so_f, "body force density (3 components)")->expected(3);
    so->add_option("--mesh", so_mesh, "import a capmesh file instead of the template");
    so->add_option("--field", so_field, "write the nodal field file here");
    so->add_option("--tol", so_tol, "CG relative residual")->capture_default_str();

    // dilute
    auto *di = app.add_subcommand("dilute", "certified lower bound at one volume fraction");
    double di_lambda = 1.0, di_mu = 1.0, di_g = 2.0, di_theta = 1e-3, di_b = 0.45,
           di_lfl_over = 0.0, di_f = 1.0;
    std::string di_csv;
    di->add_option("--lambda", di_lambda, "Lame lambda")->capture_default_str();
    di->add_option("--mu", di_mu, "shear modulus")->capture_default_str();
    di->add_option("--g", di_g, "gamma / (2 mu a)")->capture_default_str();
    di->add_option("--theta", di_theta, "inclusion volume fraction")->capture_default_str();
    di->add_option("--b", di_b, "shell outer radius (<= 1/2)")->capture_default_str();
    di->add_option("--lfl-over-mu", di_lfl_over, "lambda_fl / mu (0 = auto stable)")
        ->capture_default_str();
    di->add_option("--f", di_f, "axisymmetric strain magnitude")->capture_default_str();
    di->add_option("--csv", di_csv, "write the CSV row here");

    // sweep
    auto *sw = app.add_subcommand("sweep", "bound sweep over surface tensions and fractions");
    double sw_lambda = 1.0, sw_mu = 1.0, sw_b = 0.45, sw_lfl_over = 0.0, sw_f = 1.0;
    std::vector<double> sw_gs = {0.5, 1.0, 2.0, 4.0};
    std::vector<double> sw_thetas = {1e-2, 1e-3, 1e-4};
    std::string sw_csv;
    sw->add_option("--lambda", sw_lambda, "Lame lambda")->capture_default_str();
    sw->add_option("--mu", sw_mu, "shear modulus")->capture_default_str();
    sw->add_option("--g", sw_gs, "gamma / (2 mu a) values")->expected(-1);
    sw->add_option("--theta", sw_thetas, "volume fractions")->expected(-1);
    sw->add_option("--b", sw_b, "shell outer radius")->capture_default_str();
    sw->add_option("--lfl-over-mu", sw_lfl_over, "lambda_fl / mu (0 = auto stable)")
        ->capture_default_str();
    sw->add_option("--f", sw_f, "axisymmetric strain magnitude")->capture_default_str();
    sw->add_option("--csv", sw_csv, "write the CSV here (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    set_num_threads(threads);
    try {
        if (st->parsed()) return cmd_stability(st_gamma, st_lfl, st_a, st_csv, json_out, st_samples);
        if (sc->parsed()) return cmd_sphere_check(sc_a, sc_degree, sc_seed, json_out);
        if (vf->parsed()) return cmd_verify(vf_seed, vf_perturb, json_out);
        if (ce->parsed())
            return cmd_cell(ce_a, ce_lambda, ce_mu, ce_gamma, ce_lfl, ce_refine, ce_tol, json_out);
        if (so->parsed())
            return cmd_solve(so_a, so_lambda, so_mu, so_gamma, so_lfl, so_refine, so_box,
                             Vec3(so_f[0], so_f[1], so_f[2]), so_tol, so_mesh, so_field, json_out);
        if (di->parsed())
            return cmd_dilute(di_lambda, di_mu, di_g, di_theta, di_b, di_lfl_over, di_f, di_csv,
                              json_out);
        if (sw->parsed())
            return cmd_sweep(sw_lambda, sw_mu, sw_gs, sw_thetas, sw_b, sw_lfl_over, sw_f, sw_csv);
    } catch (const DomainFault &e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const GeometryFault &e) {
        std::cerr << "geometry fault: " << e.what() << "\n";
        return 3;
    } catch (const StabilityFault &e) {
        std::cerr << "stability fault: " << e.what() << "\n";
        return 3;
    } catch (const SolverFault &e) {
        std::cerr << "solver fault: " << e.what() << "\n";
        return 3;
    } catch (const ConcavityFault &e) {
        std::cerr << "concavity fault: " << e.what() << "\n";
        return 3;
    } catch (const DegenerateDenominator &e) {
        std::cerr << "degenerate parameters: " << e.what() << "\n";
        return 3;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
