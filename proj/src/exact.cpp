#include "chiralgate/exact.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chiralgate::exact {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;
constexpr int kMaxEmittersDouble = 40;

// channel 0 = R, 1 = L; level e couples forward at the full scaled rate and
// backward at gamma_b * scale, level f mirrored.
double coupling_rate(const EmitterChain& c, int mu, int level, int channel) {
    const double g = c.rate_scales[mu];
    if (channel == 0) return (level == 0 ? 1.0 : c.gamma_b) * g;
    return (level == 0 ? c.gamma_b : 1.0) * g;
}

Eigen::MatrixXcd build_h1(const EmitterChain& c) {
    const int n = c.n_emitters;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int mu = 0; mu < n; ++mu) {
        const double g = c.rate_scales[mu];
        for (int l = 0; l < 2; ++l)
            h(2 * mu + l, 2 * mu + l) = c.detunings[mu] - 0.5 * kI * g * c.gamma_tot();
        // e<->f mixing through the shared backward channel
        h(2 * mu, 2 * mu + 1) += -kI * std::sqrt(c.gamma_b) * g;
        h(2 * mu + 1, 2 * mu) += -kI * std::sqrt(c.gamma_b) * g;
    }
    for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
            if (mu == nu) continue;
            const double z = c.positions[nu] - c.positions[mu];
            const Complex phase = std::exp(kI * c.k0d * std::abs(z));
            const int channel = z > 0 ? 0 : 1;  // R mediates downstream, L upstream
            for (int la = 0; la < 2; ++la)
                for (int lb = 0; lb < 2; ++lb) {
                    const double amp = std::sqrt(coupling_rate(c, nu, lb, channel) *
                                                 coupling_rate(c, mu, la, channel));
                    if (amp != 0.0) h(2 * nu + lb, 2 * mu + la) += -kI * amp * phase;
                }
        }
    return h;
}

std::vector<std::array<int, 4>> make_pair_basis(const EmitterChain& c) {
    const bool chiral = c.gamma_b == 0.0;
    std::vector<std::array<int, 4>> basis;
    for (int mu = 0; mu < c.n_emitters; ++mu)
        for (int nu = mu + 1; nu < c.n_emitters; ++nu)
            for (int la = 0; la < 2; ++la)
                for (int lb = 0; lb < 2; ++lb) {
                    // without backward coupling only mixed e/f pairs are reachable
                    if (chiral && la + lb != 1) continue;
                    basis.push_back({mu, la, nu, lb});
                }
    return basis;
}

// flat lookup (2mu+la, 2nu+lb), mu < nu, -1 outside the kept basis
std::vector<int> make_pair_index(const std::vector<std::array<int, 4>>& basis, int d1) {
    std::vector<int> idx(static_cast<std::size_t>(d1) * d1, -1);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto& b = basis[i];
        idx[(2 * b[0] + b[1]) * d1 + 2 * b[2] + b[3]] = static_cast<int>(i);
    }
    return idx;
}

int pair_at(const std::vector<int>& idx, int d1, int mu, int la, int nu, int lb) {
    if (mu < nu) return idx[(2 * mu + la) * d1 + 2 * nu + lb];
    return idx[(2 * nu + lb) * d1 + 2 * mu + la];
}

Eigen::MatrixXcd build_h2(const EmitterChain& c, const Eigen::MatrixXcd& h1,
                          const std::vector<std::array<int, 4>>& basis) {
    const int d1 = 2 * c.n_emitters;
    const int d2 = static_cast<int>(basis.size());
    const auto idx = make_pair_index(basis, d1);
    Eigen::MatrixXcd h2 = Eigen::MatrixXcd::Zero(d2, d2);
    for (int i = 0; i < d2; ++i) {
        const auto [mu, la, nu, lb] = basis[i];
        for (int rho = 0; rho < c.n_emitters; ++rho)
            for (int lc = 0; lc < 2; ++lc) {
                const Complex a1 = h1(2 * rho + lc, 2 * mu + la);
                if (a1 != 0.0 && rho != nu) {
                    const int k = pair_at(idx, d1, rho, lc, nu, lb);
                    if (k >= 0) h2(k, i) += a1;
                }
                const Complex a2 = h1(2 * rho + lc, 2 * nu + lb);
                if (a2 != 0.0 && rho != mu) {
                    const int k = pair_at(idx, d1, mu, la, rho, lc);
                    if (k >= 0) h2(k, i) += a2;
                }
            }
    }
    return h2;
}

Eigen::VectorXcd make_in_vector(const EmitterChain& c, int channel) {
    const int n = c.n_emitters;
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(2 * n);
    for (int mu = 0; mu < n; ++mu)
        for (int l = 0; l < 2; ++l) {
            const double rate = coupling_rate(c, mu, l, channel);
            if (rate == 0.0) continue;
            const double path =
                channel == 0 ? c.positions[mu] : c.positions[n - 1] - c.positions[mu];
            w(2 * mu + l) = std::sqrt(rate) * std::exp(kI * c.k0d * path);
        }
    return w;
}

void require_shared_uniform_grid(const TwoPhotonState& st) {
    const auto& g1 = st.grid1;
    const auto& g2 = st.grid2;
    if (g1.min != g2.min || g1.max != g2.max || g1.n_points != g2.n_points)
        throw std::invalid_argument("scatter_state: grids must be identical");
}

}  // namespace

EffectiveHamiltonian build_hamiltonian(const EmitterChain& chain, Sector sector) {
    require_valid(chain);
    EffectiveHamiltonian h;
    h.sector = sector;
    if (sector == Sector::Single) {
        h.matrix = build_h1(chain);
    } else {
        if (chain.n_emitters > kMaxEmittersDouble)
            throw std::invalid_argument("double sector limited to N <= 40");
        h.pair_basis = make_pair_basis(chain);
        h.matrix = build_h2(chain, build_h1(chain), h.pair_basis);
    }
    h.dimension = static_cast<int>(h.matrix.rows());
    return h;
}

ScatteringEngine::ScatteringEngine(const EmitterChain& chain) : chain_(chain) {
    require_valid(chain);
    if (chain.n_emitters > kMaxEmittersDouble)
        throw std::invalid_argument("double sector limited to N <= 40");
    d1_ = 2 * chain.n_emitters;
    h1_ = build_h1(chain);
    basis2_ = make_pair_basis(chain);
    d2_ = static_cast<int>(basis2_.size());
    h2_ = build_h2(chain, h1_, basis2_);
    in_r_ = make_in_vector(chain, 0);
    in_l_ = make_in_vector(chain, 1);
    out_r_ = in_r_.conjugate();
    out_l_ = in_l_.conjugate();

    const auto idx = make_pair_index(basis2_, d1_);
    lift_r_ = Eigen::MatrixXcd::Zero(d2_, d1_);
    lift_l_ = Eigen::MatrixXcd::Zero(d2_, d1_);
    for (int mu = 0; mu < chain.n_emitters; ++mu)
        for (int la = 0; la < 2; ++la)
            for (int nu = 0; nu < chain.n_emitters; ++nu) {
                if (nu == mu) continue;
                for (int lb = 0; lb < 2; ++lb) {
                    const int k = pair_at(idx, d1_, mu, la, nu, lb);
                    if (k < 0) continue;
                    lift_r_(k, 2 * mu + la) += in_r_(2 * nu + lb);
                    lift_l_(k, 2 * mu + la) += in_l_(2 * nu + lb);
                }
            }
    emit_r_ = Eigen::MatrixXcd::Zero(d1_, d2_);
    emit_l_ = Eigen::MatrixXcd::Zero(d1_, d2_);
    for (int m = 0; m < d2_; ++m) {
        const auto [mu, la, nu, lb] = basis2_[m];
        emit_r_(2 * mu + la, m) += out_r_(2 * nu + lb);
        emit_r_(2 * nu + lb, m) += out_r_(2 * mu + la);
        emit_l_(2 * mu + la, m) += out_l_(2 * nu + lb);
        emit_l_(2 * nu + lb, m) += out_l_(2 * mu + la);
    }
}

Complex ScatteringEngine::transmission(double omega, Direction in) const {
    const Eigen::MatrixXcd m = omega * Eigen::MatrixXcd::Identity(d1_, d1_) - h1_;
    const Eigen::VectorXcd& w = in == Direction::Right ? in_r_ : in_l_;
    const Eigen::VectorXcd& wt = in == Direction::Right ? out_r_ : out_l_;
    return 1.0 - kI * (wt.transpose() * m.partialPivLu().solve(w)).value();
}

Complex ScatteringEngine::reflection(double omega, Direction in) const {
    const Eigen::MatrixXcd m = omega * Eigen::MatrixXcd::Identity(d1_, d1_) - h1_;
    const Eigen::VectorXcd& w = in == Direction::Right ? in_r_ : in_l_;
    const Eigen::VectorXcd& wt = in == Direction::Right ? out_l_ : out_r_;
    return -kI * (wt.transpose() * m.partialPivLu().solve(w)).value();
}

SinglePhotonS single_photon_s(const EmitterChain& chain, Direction direction,
                              const FrequencyGrid& grid) {
    const ScatteringEngine eng(chain);
    SinglePhotonS s;
    s.direction = direction;
    s.grid = grid;
    s.transmission.resize(grid.n_points);
    s.reflection.resize(grid.n_points);
    const Eigen::VectorXd ws = grid.values();
    for (int i = 0; i < grid.n_points; ++i) {
        s.transmission(i) = eng.transmission(ws(i), direction);
        s.reflection(i) = eng.reflection(ws(i), direction);
    }
    return s;
}

Complex ScatteringEngine::two_photon_kernel(double omega1_in, double omega2_in,
                                            double omega1_out) const {
    const double energy = omega1_in + omega2_in;
    const double omega2_out = energy - omega1_out;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d1_, d1_);
    const Eigen::VectorXcd a1 = (omega1_in * id - h1_).partialPivLu().solve(in_r_);
    const Eigen::VectorXcd a2 = (omega2_in * id - h1_).partialPivLu().solve(in_l_);
    Eigen::VectorXcd xr = Eigen::VectorXcd::Zero(d1_);
    Eigen::VectorXcd xl = Eigen::VectorXcd::Zero(d1_);
    if (d2_ > 0) {
        const Eigen::VectorXcd b =
            (energy * Eigen::MatrixXcd::Identity(d2_, d2_) - h2_)
                .partialPivLu()
                .solve(lift_l_ * a1 + lift_r_ * a2);
        xr = emit_r_ * b;
        xl = emit_l_ * b;
    }
    const Complex cr1 = (out_r_.transpose() * a1).value();
    const Complex cr2 = (out_r_.transpose() * a2).value();
    const Complex cl1 = (out_l_.transpose() * a1).value();
    const Complex cl2 = (out_l_.transpose() * a2).value();
    xr -= cr1 * a2 + cr2 * a1;
    xl -= cl2 * a1 + cl1 * a2;
    const Eigen::VectorXcd yl =
        (omega2_out * id - h1_).transpose().partialPivLu().solve(out_l_);
    const Eigen::VectorXcd yr =
        (omega1_out * id - h1_).transpose().partialPivLu().solve(out_r_);
    return -kI * ((yl.transpose() * xr).value() + (yr.transpose() * xl).value());
}

ScatterOutput ScatteringEngine::scatter_state(const TwoPhotonState& psi_in) const {
    require_shared_uniform_grid(psi_in);
    const int g = psi_in.grid1.n_points;
    const double h = psi_in.grid1.step();
    const Eigen::VectorXd grid = psi_in.grid1.values();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d1_, d1_);

    Eigen::MatrixXcd ar(d1_, g), al(d1_, g), yr(d1_, g), yl(d1_, g);
    Eigen::VectorXcd tr(g), tl(g), rlr(g), rrl(g);
    for (int i = 0; i < g; ++i) {
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(grid(i) * id - h1_);
        ar.col(i) = lu.solve(in_r_);
        al.col(i) = lu.solve(in_l_);
        yr.col(i) = lu.transpose().solve(out_r_);
        yl.col(i) = lu.transpose().solve(out_l_);
        tr(i) = 1.0 - kI * (out_r_.transpose() * ar.col(i)).value();
        tl(i) = 1.0 - kI * (out_l_.transpose() * al.col(i)).value();
        rlr(i) = -kI * (out_r_.transpose() * al.col(i)).value();
        rrl(i) = -kI * (out_l_.transpose() * ar.col(i)).value();
    }
    const Eigen::VectorXcd cr1 = ar.transpose() * out_r_;
    const Eigen::VectorXcd cr2 = al.transpose() * out_r_;
    const Eigen::VectorXcd cl1 = ar.transpose() * out_l_;
    const Eigen::VectorXcd cl2 = al.transpose() * out_l_;

    ScatterOutput out;
    out.state.grid1 = psi_in.grid1;
    out.state.grid2 = psi_in.grid2;
    out.state.amplitudes =
        (tr * tl.transpose()).cwiseProduct(psi_in.amplitudes) +
        (rlr * rrl.transpose()).cwiseProduct(psi_in.amplitudes.transpose());

    // pulse resolution estimate from the omega1 marginal
    {
        const Eigen::VectorXd w2 = psi_in.grid2.trapezoid_weights();
        const Eigen::VectorXd marg = psi_in.amplitudes.cwiseAbs2() * w2;
        const double mass = marg.sum();
        if (mass > 0.0) {
            const double mean = grid.dot(marg) / mass;
            const double var = (grid.array() - mean).square().matrix().dot(marg) / mass;
            if (4.0 * std::sqrt(var) / h < 16.0) out.grid_coarse_warning = true;
        }
    }

    const double cutoff = 1e-14 * psi_in.amplitudes.cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(d2_, d2_);
    for (int s = 0; s <= 2 * g - 2; ++s) {
        const int lo = std::max(0, s - g + 1), hi = std::min(s, g - 1);
        const int m = hi - lo + 1;
        Eigen::VectorXcd shell(m);
        for (int k = 0; k < m; ++k) shell(k) = psi_in.amplitudes(lo + k, s - lo - k);
        if (shell.cwiseAbs().maxCoeff() <= cutoff) continue;
        const double energy = grid(lo) + grid(s - lo);

        Eigen::MatrixXcd a1s(d1_, m), a2s(d1_, m);
        for (int k = 0; k < m; ++k) {
            a1s.col(k) = ar.col(lo + k);
            a2s.col(k) = al.col(s - lo - k);
        }
        Eigen::MatrixXcd xrs, xls;
        if (d2_ > 0) {
            const Eigen::MatrixXcd b = (energy * id2 - h2_)
                                           .partialPivLu()
                                           .solve(lift_l_ * a1s + lift_r_ * a2s);
            xrs = emit_r_ * b;
            xls = emit_l_ * b;
        } else {
            xrs = Eigen::MatrixXcd::Zero(d1_, m);
            xls = Eigen::MatrixXcd::Zero(d1_, m);
        }
        for (int k = 0; k < m; ++k) {
            const int i = lo + k, j = s - lo - k;
            xrs.col(k) -= cr1(i) * a2s.col(k) + cr2(j) * a1s.col(k);
            xls.col(k) -= cl2(j) * a1s.col(k) + cl1(i) * a2s.col(k);
        }
        Eigen::MatrixXcd yri(d1_, m), ylj(d1_, m);
        for (int k = 0; k < m; ++k) {
            yri.col(k) = yr.col(lo + k);
            ylj.col(k) = yl.col(s - lo - k);
        }
        const Eigen::MatrixXcd tmat =
            -kI * (ylj.transpose() * xrs + yri.transpose() * xls);
        Eigen::VectorXcd wts = Eigen::VectorXcd::Constant(m, h);
        wts(0) *= 0.5;
        wts(m - 1) *= 0.5;
        const Eigen::VectorXcd add = (0.5 / kPi) * (tmat * wts.cwiseProduct(shell));
        for (int k = 0; k < m; ++k) out.state.amplitudes(lo + k, s - lo - k) += add(k);
    }
    return out;
}

namespace {

Complex pulse_time(const PulseSpec& p, double t) {
    const double s = p.width;
    const double u = t - p.delay;
    return std::pow(2.0 * s * s / kPi, 0.25) *
           std::exp(Complex(-s * s * u * u, -p.center * u));
}

struct OracleRun {
    Eigen::MatrixXcd conn;     // connected two-photon amplitude on the grid
    Eigen::VectorXcd t_right;  // single-photon transmissions read off in time
    Eigen::VectorXcd t_left;
};

OracleRun run_oracle(const Eigen::MatrixXcd& h1, const Eigen::MatrixXcd& h2,
                     const Eigen::MatrixXcd& lift_r, const Eigen::MatrixXcd& lift_l,
                     const Eigen::MatrixXcd& emit_r, const Eigen::MatrixXcd& emit_l,
                     const Eigen::VectorXcd& in_r, const Eigen::VectorXcd& in_l,
                     const PulseSpec& right, const PulseSpec& left,
                     const FrequencyGrid& grid, double t0, double t1, double dt) {
    const int d1 = static_cast<int>(h1.rows());
    const int d2 = static_cast<int>(h2.rows());
    const int nt = static_cast<int>(std::lround((t1 - t0) / dt)) + 1;
    const int g = grid.n_points;
    const Eigen::VectorXd ws = grid.values();
    const Eigen::VectorXcd out_r = in_r.conjugate();
    const Eigen::VectorXcd out_l = in_l.conjugate();

    Eigen::MatrixXcd a1s(nt, d1), a2s(nt, d1), bs(nt, d2);
    Eigen::VectorXcd y1 = Eigen::VectorXcd::Zero(d1);
    Eigen::VectorXcd y2 = Eigen::VectorXcd::Zero(d1);
    Eigen::VectorXcd yb = Eigen::VectorXcd::Zero(d2);
    auto f1 = [&](const Eigen::VectorXcd& y, Complex xi) -> Eigen::VectorXcd {
        return -kI * (h1 * y) - kI * xi * in_r;
    };
    auto f2 = [&](const Eigen::VectorXcd& y, Complex xi) -> Eigen::VectorXcd {
        return -kI * (h1 * y) - kI * xi * in_l;
    };
    auto fb = [&](const Eigen::VectorXcd& y, Complex xr, Complex xl,
                  const Eigen::VectorXcd& v1,
                  const Eigen::VectorXcd& v2) -> Eigen::VectorXcd {
        return -kI * (h2 * y) - kI * xl * (lift_l * v1) - kI * xr * (lift_r * v2);
    };
    for (int it = 0; it < nt; ++it) {
        a1s.row(it) = y1.transpose();
        a2s.row(it) = y2.transpose();
        bs.row(it) = yb.transpose();
        if (it == nt - 1) break;
        const double t = t0 + it * dt;
        const Complex ra = pulse_time(right, t), rm = pulse_time(right, t + 0.5 * dt),
                      rb = pulse_time(right, t + dt);
        const Complex la = pulse_time(left, t), lm = pulse_time(left, t + 0.5 * dt),
                      lb = pulse_time(left, t + dt);
        const Eigen::VectorXcd k11 = f1(y1, ra), k12 = f2(y2, la),
                               k1b = fb(yb, ra, la, y1, y2);
        Eigen::VectorXcd m1 = y1 + 0.5 * dt * k11, m2 = y2 + 0.5 * dt * k12,
                         mb = yb + 0.5 * dt * k1b;
        const Eigen::VectorXcd k21 = f1(m1, rm), k22 = f2(m2, lm),
                               k2b = fb(mb, rm, lm, m1, m2);
        m1 = y1 + 0.5 * dt * k21;
        m2 = y2 + 0.5 * dt * k22;
        mb = yb + 0.5 * dt * k2b;
        const Eigen::VectorXcd k31 = f1(m1, rm), k32 = f2(m2, lm),
                               k3b = fb(mb, rm, lm, m1, m2);
        m1 = y1 + dt * k31;
        m2 = y2 + dt * k32;
        mb = yb + dt * k3b;
        const Eigen::VectorXcd k41 = f1(m1, rb), k42 = f2(m2, lb),
                               k4b = fb(mb, rb, lb, m1, m2);
        y1 += dt / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41);
        y2 += dt / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42);
        if (d2 > 0) yb += dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    }

    // connected emission sources; the re-excitation pathway cancels against
    // the product of single-photon amplitudes
    Eigen::MatrixXcd vl = bs * emit_l.transpose();
    Eigen::MatrixXcd vr = bs * emit_r.transpose();
    vl -= ((a2s * out_l).array().replicate(1, d1) * a1s.array()).matrix();
    vr -= ((a1s * out_r).array().replicate(1, d1) * a2s.array()).matrix();

    Eigen::VectorXd wt = Eigen::VectorXd::Constant(nt, dt);
    wt(0) *= 0.5;
    wt(nt - 1) *= 0.5;

    // Fourier transforms at the 2g-1 shell energies and the g grid frequencies
    const int ns = 2 * g - 1;
    Eigen::MatrixXcd gl(ns, d1), gr(ns, d1), ahat1(g, d1), ahat2(g, d1);
    Eigen::VectorXcd ft(nt);
    for (int s = 0; s < ns; ++s) {
        const double om = 2.0 * ws(0) + s * grid.step();
        for (int it = 0; it < nt; ++it)
            ft(it) = wt(it) * std::exp(kI * om * (t0 + it * dt));
        gl.row(s) = ft.transpose() * vl;
        gr.row(s) = ft.transpose() * vr;
    }
    for (int i = 0; i < g; ++i) {
        for (int it = 0; it < nt; ++it)
            ft(it) = wt(it) * std::exp(kI * ws(i) * (t0 + it * dt));
        ahat1.row(i) = ft.transpose() * a1s;
        ahat2.row(i) = ft.transpose() * a2s;
    }

    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d1, d1);
    Eigen::MatrixXcd rows_r(g, d1), rows_l(g, d1);
    for (int i = 0; i < g; ++i) {
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(ws(i) * id - h1);
        const Eigen::VectorXcd row_r = lu.transpose().solve(out_r);
        const Eigen::VectorXcd row_l = lu.transpose().solve(out_l);
        rows_r.row(i) = row_r.transpose();
        rows_l.row(i) = row_l.transpose();
    }

    OracleRun run;
    run.conn.resize(g, g);
    for (int ia = 0; ia < g; ++ia)
        for (int ib = 0; ib < g; ++ib) {
            const int s = ia + ib;
            run.conn(ia, ib) = (-kI / (2.0 * kPi)) *
                               ((rows_r.row(ia) * gl.row(s).transpose()).value() +
                                (rows_l.row(ib) * gr.row(s).transpose()).value());
        }
    const double root2pi = std::sqrt(2.0 * kPi);
    run.t_right.resize(g);
    run.t_left.resize(g);
    for (int i = 0; i < g; ++i) {
        run.t_right(i) =
            1.0 - kI * (out_r.transpose() * ahat1.row(i).transpose()).value() /
                      (root2pi * right.envelope(ws(i)));
        run.t_left(i) =
            1.0 - kI * (out_l.transpose() * ahat2.row(i).transpose()).value() /
                      (root2pi * left.envelope(ws(i)));
    }
    return run;
}

}  // namespace

OracleResult time_domain_oracle(const EmitterChain& chain, const PulseSpec& right,
                                const PulseSpec& left, const FrequencyGrid& grid,
                                const OracleOptions& options) {
    if (chain.gamma_b != 0.0)
        throw std::invalid_argument(
            "time_domain_oracle: only perfectly chiral chains are supported");
    const ScatteringEngine eng(chain);
    const EffectiveHamiltonian h1 = build_hamiltonian(chain, Sector::Single);
    const EffectiveHamiltonian h2 = build_hamiltonian(chain, Sector::Double);
    const Eigen::VectorXcd in_r = make_in_vector(chain, 0);
    const Eigen::VectorXcd in_l = make_in_vector(chain, 1);

    const auto& basis = h2.pair_basis;
    const int d1 = 2 * chain.n_emitters;
    const int d2 = static_cast<int>(basis.size());
    const auto idx = make_pair_index(basis, d1);
    Eigen::MatrixXcd lift_r = Eigen::MatrixXcd::Zero(d2, d1);
    Eigen::MatrixXcd lift_l = Eigen::MatrixXcd::Zero(d2, d1);
    for (int mu = 0; mu < chain.n_emitters; ++mu)
        for (int la = 0; la < 2; ++la)
            for (int nu = 0; nu < chain.n_emitters; ++nu) {
                if (nu == mu) continue;
                for (int lb = 0; lb < 2; ++lb) {
                    const int k = pair_at(idx, d1, mu, la, nu, lb);
                    if (k < 0) continue;
                    lift_r(k, 2 * mu + la) += in_r(2 * nu + lb);
                    lift_l(k, 2 * mu + la) += in_l(2 * nu + lb);
                }
            }
    Eigen::MatrixXcd emit_r = Eigen::MatrixXcd::Zero(d1, d2);
    Eigen::MatrixXcd emit_l = Eigen::MatrixXcd::Zero(d1, d2);
    for (int m = 0; m < d2; ++m) {
        const auto [mu, la, nu, lb] = basis[m];
        emit_r(2 * mu + la, m) += std::conj(in_r(2 * nu + lb));
        emit_r(2 * nu + lb, m) += std::conj(in_r(2 * mu + la));
        emit_l(2 * mu + la, m) += std::conj(in_l(2 * nu + lb));
        emit_l(2 * nu + lb, m) += std::conj(in_l(2 * mu + la));
    }

    auto total = [&](double dt) {
        const OracleRun run =
            run_oracle(h1.matrix, h2.matrix, lift_r, lift_l, emit_r, emit_l, in_r,
                       in_l, right, left, grid, options.t_start, options.t_end, dt);
        const Eigen::VectorXd ws = grid.values();
        Eigen::VectorXcd tr(grid.n_points), tl(grid.n_points);
        Eigen::VectorXcd p1(grid.n_points), p2(grid.n_points);
        for (int i = 0; i < grid.n_points; ++i) {
            tr(i) = eng.transmission(ws(i), Direction::Right);
            tl(i) = eng.transmission(ws(i), Direction::Left);
            p1(i) = right.envelope(ws(i));
            p2(i) = left.envelope(ws(i));
        }
        OracleResult res;
        res.state.grid1 = grid;
        res.state.grid2 = grid;
        res.state.amplitudes =
            (tr.cwiseProduct(p1)) * (tl.cwiseProduct(p2)).transpose() + run.conn;
        res.t_right = run.t_right;
        res.t_left = run.t_left;
        return res;
    };

    OracleResult res = total(options.dt);
    if (options.check_convergence) {
        const OracleResult half = total(0.5 * options.dt);
        TwoPhotonState diff = res.state;
        diff.amplitudes -= half.state.amplitudes;
        if (std::sqrt(diff.norm()) > options.convergence_tol)
            throw std::runtime_error("time_domain_oracle: dt not converged");
    }
    return res;
}

}  // namespace chiralgate::exact
