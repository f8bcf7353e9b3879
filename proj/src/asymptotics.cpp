#include "hlsim/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace hlsim {

namespace {

double l2_distance(const std::vector<cdouble>& a, const std::vector<cdouble>& b, double cell_volume) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) s += std::norm(a[p] - b[p]);
    return std::sqrt(s * cell_volume);
}

WaveFunction joint_product(const WaveFunction& phi, const std::vector<WaveFunction>& chis) {
    std::vector<WaveFunction> parts;
    parts.push_back(phi);
    for (const auto& c : chis) parts.push_back(c);
    return tensor_product(parts);
}

long exact_steps(double t, double dt) {
    long n = (long)std::llround(t / dt);
    if (n < 1) n = 1;
    return n;
}

} // namespace

XiEvolver::XiEvolver(const WaveFunction& phi, const std::vector<WaveFunction>& chis, double alpha,
                     const PotentialSpec& V, double dt_fast)
    : state_(joint_product(phi, chis)), dt_(dt_fast), unitarity_tol_(1e-10) {
    HamiltonianSpec frozen;
    frozen.kind = HamiltonianKind::joint;
    frozen.epsilon = 1.0; // fast-time units: unit light mass, plain alpha coupling
    frozen.alpha = alpha;
    frozen.pair_potential = V;
    const int kh = state_.grid.axis_count(AxisRole::heavy);
    const int na = state_.grid.num_axes();
    prop_ = std::make_unique<SplitPropagator>(state_.grid, build_kinetic(state_.grid, 0.0, 1.0),
                                              build_potential(state_.grid, frozen), kh, na - kh);
}

XiEvolver::~XiEvolver() = default;

void XiEvolver::advance_to(double t_fast) {
    if (t_fast < t_ - 1e-12) throw std::invalid_argument("XiEvolver: cannot rewind");
    const double span = t_fast - t_;
    if (span <= 1e-12) return;
    const long n = exact_steps(span, dt_);
    prop_->advance(state_.amplitudes, span / (double)n, n, unitarity_tol_);
    t_ = t_fast;
}

WaveFunction build_xi(const WaveFunction& phi, const std::vector<WaveFunction>& chis, double alpha,
                      const PotentialSpec& V, double t_fast, double dt_fast) {
    XiEvolver ev(phi, chis, alpha, V, dt_fast);
    ev.advance_to(t_fast);
    return ev.state();
}

WaveFunction build_zeta(const WaveFunction& xi_at_t_over_eps, double t,
                        const std::optional<PotentialSpec>& U, const EvolutionConfig& cfg) {
    HamiltonianSpec heavy;
    heavy.kind = HamiltonianKind::heavy;
    heavy.heavy_potential = U;
    return evolve_heavy_on_joint(xi_at_t_over_eps, heavy, t, cfg);
}

DenseField build_field(const SpatialGrid& heavy_grid, const std::vector<WaveFunction>& chis,
                       double alpha, const PotentialSpec& V, double tol,
                       const WaveOperatorParams& params, const WaveFunction* phi_weight,
                       double weight_cut) {
    if (heavy_grid.num_axes() != 1 || heavy_grid.axes[0] != AxisRole::heavy)
        throw std::invalid_argument("build_field: single heavy axis required");
    const int nR = heavy_grid.points_per_axis;

    std::vector<int> active;
    if (phi_weight && alpha != 0.0) {
        if ((int)phi_weight->amplitudes.size() != nR)
            throw GridMismatchError("build_field: phi weight size mismatch");
        double amax = 0.0;
        for (const auto& z : phi_weight->amplitudes) amax = std::max(amax, std::abs(z));
        for (int i = 0; i < nR; ++i)
            if (std::abs(phi_weight->amplitudes[i]) >= weight_cut * amax) active.push_back(i);
    } else {
        for (int i = 0; i < nR; ++i) active.push_back(i);
    }

    std::vector<std::vector<double>> R_grid;
    R_grid.reserve(active.size());
    for (int i : active) R_grid.push_back({heavy_grid.coord(i)});

    HamiltonianSpec ham;
    ham.kind = HamiltonianKind::light_parametric;
    ham.alpha = alpha;
    ham.pair_potential = V;
    ham.heavy_positions = {0.0};

    DenseField field;
    field.heavy_grid = heavy_grid;
    field.light_grid = chis.empty() ? SpatialGrid{} : chis[0].grid;
    const int nx = field.light_grid.points_per_axis;

    for (const auto& chi : chis) {
        if (!(chi.grid == field.light_grid))
            throw GridMismatchError("build_field: all light particles share one grid");
        std::vector<WaveOperatorResult> col = wave_operator_field_1p(chi, R_grid, ham, tol, params);
        // rows outside the phi support keep the free value
        std::vector<cdouble> block((std::size_t)nR * nx);
        const double chi_nrm = chi.l2_norm();
        for (int j = 0; j < nR; ++j)
            for (int i = 0; i < nx; ++i) block[(std::size_t)j * nx + i] = chi.amplitudes[i] / chi_nrm;
        for (std::size_t a = 0; a < active.size(); ++a) {
            WaveOperatorResult& r = col[a];
            field.worst_cauchy = std::max(field.worst_cauchy, r.cauchy_residual);
            field.worst_tail = std::max(field.worst_tail, r.duhamel_tail);
            field.worst_isometry = std::max(field.worst_isometry, r.isometry_defect);
            field.tail_exponent = std::max(field.tail_exponent, r.tail_exponent);
            const double nrm = r.state.l2_norm();
            for (int i = 0; i < nx; ++i)
                block[(std::size_t)active[a] * nx + i] = r.state.amplitudes[i] / nrm;
        }
        field.omega.push_back(std::move(block));
    }
    return field;
}

WaveFunction build_psi_a(const WaveFunction& phi, const DenseField& field, double t, double epsilon,
                         const std::optional<PotentialSpec>& U, const EvolutionConfig& cfg) {
    if (!(t > 0.0)) throw std::invalid_argument("build_psi_a: t must be positive (the formula excludes t = 0)");
    if (!(phi.grid == field.heavy_grid)) throw GridMismatchError("build_psi_a: phi grid mismatch");
    const int nR = field.heavy_grid.points_per_axis;
    const int nx = field.light_grid.points_per_axis;
    const std::size_t N = field.omega.size();
    if (N == 0) throw std::invalid_argument("build_psi_a: empty field");

    // free-evolve every field row by the fast time t / eps
    const double t_fast = t / epsilon;
    FftEngine row_fft({nR, nx});
    std::vector<double> k2(nx);
    for (int i = 0; i < nx; ++i) {
        const double k = field.light_grid.wavenumber(i);
        k2[i] = 0.5 * k * k;
    }
    std::vector<std::vector<cdouble>> evolved(N);
    for (std::size_t j = 0; j < N; ++j) {
        evolved[j] = field.omega[j];
        row_fft.forward_axes(evolved[j], 1, 1);
        for (std::size_t p = 0; p < evolved[j].size(); ++p)
            evolved[j][p] *= std::polar(1.0, -t_fast * k2[p % (std::size_t)nx]);
        row_fft.backward_axes(evolved[j], 1, 1);
    }

    // assemble phi(R') prod_j omega_j(R'; r_j) on the joint grid
    SpatialGrid joint;
    joint.dim = 1;
    joint.points_per_axis = field.heavy_grid.points_per_axis;
    joint.half_width = field.heavy_grid.half_width;
    joint.axes.push_back(AxisRole::heavy);
    for (std::size_t j = 0; j < N; ++j) joint.axes.push_back(AxisRole::light);
    joint.validate();
    if (field.light_grid.points_per_axis != joint.points_per_axis ||
        field.light_grid.half_width != joint.half_width)
        throw GridMismatchError("build_psi_a: heavy and light grids must share (points, half_width)");

    WaveFunction out(joint);
    std::vector<std::size_t> stride(N);
    {
        std::size_t s = 1;
        for (std::size_t j = N; j-- > 0;) {
            stride[j] = s;
            s *= (std::size_t)nx;
        }
    }
    const std::size_t light_block = out.amplitudes.size() / (std::size_t)nR;
    for (int iR = 0; iR < nR; ++iR) {
        const cdouble amp = phi.amplitudes[iR];
        for (std::size_t q = 0; q < light_block; ++q) {
            cdouble v = amp;
            for (std::size_t j = 0; j < N; ++j)
                v *= evolved[j][(std::size_t)iR * nx + (q / stride[j]) % (std::size_t)nx];
            out.amplitudes[(std::size_t)iR * light_block + q] = v;
        }
    }

    HamiltonianSpec heavy;
    heavy.kind = HamiltonianKind::heavy;
    heavy.heavy_potential = U;
    out = evolve_heavy_on_joint(out, heavy, t, cfg);
    out.normalization = out.l2_norm();
    return out;
}

SweepResult run_epsilon_sweep(const SweepSetup& setup, const std::vector<double>& epsilons,
                              const std::vector<double>& t_list) {
    if (epsilons.size() < 1 || t_list.empty()) throw std::invalid_argument("run_epsilon_sweep: empty lattice");
    for (double t : t_list)
        if (!(t > 0.0)) throw std::invalid_argument("run_epsilon_sweep: the t grid excludes t = 0");

    const int nR = setup.heavy_grid.points_per_axis;
    (void)nR;
    WaveFunction phi = make_gaussian(setup.heavy_grid, setup.phi);
    std::vector<WaveFunction> chis;
    for (const auto& c : setup.chis) chis.push_back(make_gaussian(setup.light_grid, c));

    // eps-independent ingredients: wave-operator field and xi checkpoints
    WaveOperatorParams wo_params;
    wo_params.dt = setup.dt_fast;
    DenseField field =
        build_field(setup.heavy_grid, chis, setup.alpha, setup.V, setup.wave_op_tol, wo_params, &phi);

    std::vector<double> ts = t_list;
    std::sort(ts.begin(), ts.end());
    std::set<double> fast_times;
    for (double e : epsilons)
        for (double t : ts) fast_times.insert(t / e);

    std::map<double, std::vector<cdouble>> xi_at;
    {
        XiEvolver xi(phi, chis, setup.alpha, setup.V, setup.dt_fast);
        for (double tf : fast_times) {
            xi.advance_to(tf);
            xi_at[tf] = xi.state().amplitudes;
        }
    }

    WaveFunction psi0 = joint_product(phi, chis);
    const double vol = psi0.grid.cell_volume();
    EvolutionConfig heavy_cfg; // exact multiplier path unless U is present
    heavy_cfg.dt = setup.dt_fast;

    HamiltonianSpec joint_ham;
    joint_ham.kind = HamiltonianKind::joint;
    joint_ham.alpha = setup.alpha;
    joint_ham.pair_potential = setup.V;
    joint_ham.heavy_potential = setup.U;

    SweepResult result;
    std::vector<double> eps_sorted = epsilons;
    std::sort(eps_sorted.begin(), eps_sorted.end());

    for (double eps : eps_sorted) {
        joint_ham.epsilon = eps;
        const double dt = setup.dt_joint_factor * eps;
        SplitPropagator prop(psi0.grid, build_kinetic(psi0.grid, 1.0, 1.0 / eps),
                             build_potential(psi0.grid, joint_ham), 0, psi0.grid.num_axes());
        std::vector<cdouble> exact = psi0.amplitudes;
        std::vector<cdouble> shadow = psi0.amplitudes; // 2 dt run, Richardson certificate
        double t_prev = 0.0;
        for (double t : ts) {
            long steps = exact_steps(t - t_prev, dt);
            if (steps % 2) ++steps;
            const double dt_leg = (t - t_prev) / (double)steps;
            prop.advance(exact, dt_leg, steps);
            prop.advance(shadow, 2.0 * dt_leg, steps / 2);
            t_prev = t;

            SweepRecord rec;
            rec.epsilon = eps;
            rec.t = t;
            // second-order splitting: err(dt) ~ ||psi_{2dt} - psi_dt|| / 3
            rec.self_convergence = l2_distance(exact, shadow, vol) / 3.0;
            rec.valid = rec.self_convergence <= setup.self_convergence_tol;

            WaveFunction exact_wf = psi0;
            exact_wf.amplitudes = exact;
            rec.boundary_mass = boundary_mass_fraction(exact_wf);

            WaveFunction psi_a = build_psi_a(phi, field, t, eps, setup.U, heavy_cfg);
            WaveFunction zeta_in = psi0;
            zeta_in.amplitudes = xi_at.at(t / eps);
            WaveFunction zeta = build_zeta(zeta_in, t, setup.U, heavy_cfg);

            rec.err_psi_a = l2_distance(exact, psi_a.amplitudes, vol);
            rec.err_zeta = l2_distance(exact, zeta.amplitudes, vol);
            rec.err_a_zeta = l2_distance(psi_a.amplitudes, zeta.amplitudes, vol);
            result.records.push_back(rec);
        }
    }

    std::sort(result.records.begin(), result.records.end(),
              [](const SweepRecord& a, const SweepRecord& b) {
                  return a.epsilon != b.epsilon ? a.epsilon < b.epsilon : a.t < b.t;
              });

    // log-log slope at the largest t over valid records
    result.fit_t = ts.back();
    std::vector<double> fe, fv;
    for (const auto& r : result.records)
        if (r.t == result.fit_t && r.valid) {
            fe.push_back(r.epsilon);
            fv.push_back(std::max(r.err_psi_a, 1e-16));
        }
    if (fe.size() >= 3) {
        const LineFit f = fit_power_law(fe, fv);
        result.fitted_slope = f.slope;
        result.slope_ci_lo = f.ci_lo;
        result.slope_ci_hi = f.ci_hi;
        result.r_squared = f.r_squared;
        result.spearman_eps_err = spearman(fe, fv);
    }

    result.field_diagnostics = DenseField{};
    result.field_diagnostics.worst_cauchy = field.worst_cauchy;
    result.field_diagnostics.worst_tail = field.worst_tail;
    result.field_diagnostics.worst_isometry = field.worst_isometry;
    result.field_diagnostics.tail_exponent = field.tail_exponent;
    return result;
}

} // namespace hlsim
